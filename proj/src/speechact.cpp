#include "propshift/speechact.hpp"

#include <cctype>

#include "propshift/error.hpp"
#include "propshift/inflect.hpp"
#include "propshift/text.hpp"

namespace propshift {
namespace {

using Words = std::vector<std::string>;

constexpr std::string_view kEdgePunct = ".,;:!?\"()[]";
constexpr int kMaxPasses = 4;

bool is_edge_punct(char c) { return kEdgePunct.find(c) != std::string_view::npos; }

// Lowercased token without surrounding punctuation; inner apostrophes stay.
std::string bare(std::string_view word) {
  std::size_t b = 0;
  std::size_t e = word.size();
  while (b < e && is_edge_punct(word[b])) ++b;
  while (e > b && is_edge_punct(word[e - 1])) --e;
  return to_lower_ascii(word.substr(b, e - b));
}

// Trailing punctuation of a token, so a rewritten word can keep it.
std::string trailing_punct(std::string_view word) {
  std::size_t e = word.size();
  while (e > 0 && is_edge_punct(word[e - 1])) --e;
  return std::string(word.substr(e));
}

std::string core(std::string_view word) {
  std::size_t e = word.size();
  while (e > 0 && is_edge_punct(word[e - 1])) --e;
  return std::string(word.substr(0, e));
}

bool is_capitalized(std::string_view word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word.front()));
}

bool has_digit_or_symbol(std::string_view word) {
  for (char c : core(word)) {
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '&') return true;
  }
  return false;
}

bool is_possessive(std::string_view word) {
  const std::string b = bare(word);
  return (b.size() > 2 && b.compare(b.size() - 2, 2, "'s") == 0) ||
         (b.size() > 1 && b.back() == '\'');
}

std::string capitalize(std::string text) {
  if (!text.empty() && text[0] >= 'a' && text[0] <= 'z') text[0] = static_cast<char>(text[0] - 32);
  return text;
}

std::string lowercase_first(std::string text) {
  // Only plain sentence-initial words; acronyms and names stay untouched.
  if (text.size() > 1 && std::isupper(static_cast<unsigned char>(text[0])) &&
      std::islower(static_cast<unsigned char>(text[1]))) {
    text[0] = static_cast<char>(std::tolower(static_cast<unsigned char>(text[0])));
  }
  return text;
}

std::string strip_leading_punct(std::string_view text) {
  std::size_t b = 0;
  while (b < text.size() && (text[b] == ',' || text[b] == ':' || text[b] == ';' || text[b] == ' ')) ++b;
  return trim(text.substr(b));
}

std::string strip_terminator(std::string_view text, bool* had_question = nullptr) {
  std::string s = trim(text);
  while (!s.empty() && (s.back() == '.' || s.back() == '?' || s.back() == '!')) {
    if (s.back() == '?' && had_question) *had_question = true;
    s.pop_back();
  }
  return trim(s);
}

class RuleEngine {
 public:
  explicit RuleEngine(const IfidLexicon& lexicon) : lex_(lexicon) {}

  SpeechAct classify(std::string_view text) const {
    if (lex_.match_prefix(lex::kDeclarativeFrames, text)) return SpeechAct::Declarative;
    if (lex_.match_prefix(lex::kCommissiveFrames, text)) return SpeechAct::Commissive;
    if (lex_.match_prefix(lex::kExpressiveFrames, text)) return SpeechAct::Expressive;
    if (indirect_frame(text)) return SpeechAct::Indirect;

    const Words words = split_words(text);
    if (words.empty()) return SpeechAct::Assertive;
    std::size_t i = 0;
    while (i < words.size() && lex_.contains(lex::kPolitenessTerms, bare(words[i]))) ++i;
    if (i > 0) return SpeechAct::Directive;
    if (lex_.contains(lex::kImperativeVerbs, bare(words[0]))) return SpeechAct::Directive;

    if (text.find('?') != std::string_view::npos) return SpeechAct::Interrogative;
    const std::string lead = bare(words[0]);
    const char last = text.back();
    if ((lex_.contains(lex::kQuestionLeads, lead) || lex_.contains(lex::kQuestionAuxiliaries, lead)) &&
        last != '.' && last != '!' && words.size() > 1) {
      return SpeechAct::Interrogative;
    }
    return SpeechAct::Assertive;
  }

  std::string apply(SpeechAct act, std::string_view text, ExtractionTrace& trace) const {
    switch (act) {
      case SpeechAct::Assertive:
        return std::string(text);
      case SpeechAct::Interrogative:
        return interrogative(text, trace);
      case SpeechAct::Directive:
        return directive(text, trace);
      case SpeechAct::Expressive:
        return framed(lex::kExpressiveFrames, text, trace);
      case SpeechAct::Indirect:
        return indirect(text, trace);
      case SpeechAct::Commissive:
        return commissive(text, trace);
      case SpeechAct::Declarative:
        return declarative(text, trace);
    }
    return std::string(text);
  }

  std::string enforce(std::string_view text) const {
    std::string s = trim(text);
    constexpr std::string_view kGuarded[] = {lex::kIndirectFrames, lex::kPerformativeVerbs,
                                             lex::kExpressiveFrames, lex::kCommissiveFrames,
                                             lex::kDeclarativeFrames, lex::kPolitenessTerms};
    for (int pass = 0; pass < kMaxPasses; ++pass) {
      bool stripped = false;
      for (auto section : kGuarded) {
        if (auto m = lex_.match_prefix(section, s)) {
          s = strip_complementizer(strip_leading_punct(std::string_view(s).substr(m->length)));
          stripped = true;
        }
      }
      if (!stripped) break;
    }
    bool had_question = false;
    std::string out;
    const bool ends_question = !s.empty() && s.back() == '?';
    for (char c : s) {
      if (c == '?') {
        had_question = true;
        continue;
      }
      out += c;
    }
    out = trim(out);
    if (had_question && ends_question && !out.empty() && out.back() != '.') out += '.';
    return capitalize(out);
  }

  bool satisfies(std::string_view text) const {
    if (text.find('?') != std::string_view::npos) return false;
    for (auto section : {lex::kIndirectFrames, lex::kPerformativeVerbs, lex::kExpressiveFrames,
                         lex::kCommissiveFrames, lex::kDeclarativeFrames, lex::kPolitenessTerms}) {
      if (lex_.match_prefix(section, text)) return false;
    }
    return true;
  }

 private:
  std::optional<FrameMatch> indirect_frame(std::string_view text) const {
    auto a = lex_.match_prefix(lex::kIndirectFrames, text);
    auto b = lex_.match_prefix(lex::kPerformativeVerbs, text);
    if (a && b) return a->length >= b->length ? a : b;
    return a ? a : b;
  }

  static void note(ExtractionTrace& trace, std::string_view transform) {
    for (const auto& t : trace.transforms_applied) {
      if (t == transform) return;
    }
    trace.transforms_applied.emplace_back(transform);
  }

  static void note_frame(ExtractionTrace& trace, const FrameMatch& m, std::string_view text) {
    trace.matched_frames.push_back({m.lexicon, std::string(text.substr(0, m.length))});
  }

  std::string strip_complementizer(const std::string& text, bool* stripped = nullptr) const {
    Words words = split_words(text);
    if (words.size() > 1 && lex_.contains(lex::kComplementizers, bare(words[0]))) {
      if (stripped) *stripped = true;
      return join_words(words, 1);
    }
    return text;
  }

  // Appends the final period (unless told not to), removes question marks
  // and capitalizes.
  static std::string finish(std::string_view text, ExtractionTrace& trace, bool period = true) {
    bool had_question = false;
    std::string s = strip_terminator(text, &had_question);
    while (!s.empty() && (s.back() == ',' || s.back() == ';' || s.back() == ':')) s.pop_back();
    if (s.find('?') != std::string::npos) {
      had_question = true;
      std::string clean;
      for (char c : s) {
        if (c != '?') clean += c;
      }
      s = trim(clean);
    }
    if (had_question) note(trace, "strip-question-mark");
    if (s.empty()) return s;
    s = capitalize(std::move(s));
    if (period) s += '.';
    return s;
  }

  // End of a subject noun phrase starting at `begin`: an optional
  // determiner, then capitalized, numeric or possessive-headed tokens, with
  // a single lowercase head allowed when nothing else has been taken.
  std::size_t np_end(const Words& w, std::size_t begin) const {
    std::size_t i = begin;
    if (i < w.size() && lex_.contains(lex::kDeterminers, bare(w[i]))) ++i;
    std::size_t taken = 0;
    while (i < w.size()) {
      const std::string b = bare(w[i]);
      const bool after_possessive = i > begin && is_possessive(w[i - 1]);
      if (after_possessive || is_capitalized(w[i]) || has_digit_or_symbol(w[i])) {
        ++i;
        ++taken;
        continue;
      }
      if (taken == 0 && !lex_.contains(lex::kAdverbs, b) &&
          !lex_.contains(lex::kQuestionAuxiliaries, b) && !looks_like_gerund(b)) {
        ++i;
        ++taken;
        continue;
      }
      if (b == "and" && taken > 0 && i + 1 < w.size() && is_capitalized(w[i + 1])) {
        i += 2;
        ++taken;
        continue;
      }
      break;
    }
    return taken == 0 ? begin : i;
  }

  static std::string rewrite(const std::string& word, Inflection mode, const IfidLexicon& lex) {
    return reinflect(core(word), mode, lex) + trailing_punct(word);
  }

  // words[0] is the fronted auxiliary.
  std::string uninvert(const Words& w, ExtractionTrace& trace) const {
    const std::string aux = bare(w[0]);
    const std::size_t subj_end = np_end(w, 1);
    if (subj_end == 1) {
      note(trace, "drop-aux");
      return join_words(w, 1);
    }
    std::size_t v = subj_end;
    while (v < w.size() && lex_.contains(lex::kAdverbs, bare(w[v]))) ++v;

    auto restore = [&] {
      note(trace, "un-invert");
      Words out(w.begin() + 1, w.begin() + static_cast<std::ptrdiff_t>(subj_end));
      out.push_back(to_lower_ascii(core(w[0])));
      out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(subj_end), w.end());
      return join_words(out);
    };
    auto with_verb = [&](std::string verb) {
      Words out(w.begin() + 1, w.end());
      out[v - 1] = std::move(verb);
      return join_words(out);
    };

    if (v >= w.size()) return restore();
    const std::string verb = bare(w[v]);

    if (aux == "did" || aux == "does" || aux == "do") {
      note(trace, "un-invert");
      note(trace, "drop-do-support");
      if (aux == "did") {
        note(trace, "reinflect-past");
        return with_verb(rewrite(w[v], Inflection::BaseToPast, lex_));
      }
      if (aux == "does") {
        note(trace, "reinflect-present");
        return with_verb(rewrite(w[v], Inflection::BaseToPresent3sg, lex_));
      }
      return with_verb(w[v]);
    }
    if (aux == "has" || aux == "have" || aux == "had") {
      if (!looks_like_past_participle(verb, lex_)) return restore();
      note(trace, "un-invert");
      note(trace, "drop-perfect-aux");
      note(trace, "reinflect-past");
      return with_verb(rewrite(w[v], Inflection::PastParticipleToPast, lex_));
    }
    if ((aux == "is" || aux == "are" || aux == "am") && looks_like_gerund(verb)) {
      note(trace, "un-invert");
      note(trace, "reinflect-present");
      return with_verb(rewrite(w[v], aux == "is" ? Inflection::IngToPresent3sg : Inflection::IngToBase, lex_));
    }
    return restore();
  }

  std::string interrogative(std::string_view text, ExtractionTrace& trace) const {
    bool had_question = false;
    std::string body = strip_terminator(text, &had_question);
    if (had_question) note(trace, "strip-question-mark");
    Words w = split_words(body);
    if (w.empty()) return finish(body, trace);
    const std::string lead = bare(w[0]);

    std::string out = body;
    if (lex_.contains(lex::kQuestionLeads, lead)) {
      trace.matched_frames.push_back({std::string(lex::kQuestionLeads), core(w[0])});
      const std::string second = w.size() > 1 ? bare(w[1]) : std::string();
      const bool copula = second == "is" || second == "are" || second == "was" || second == "were";
      if (w.size() >= 3 && copula && (lead == "what" || lead == "who" || lead == "which")) {
        note(trace, "wh-definition");
        out = join_words(w, 2);
      } else if (w.size() >= 3 && lex_.contains(lex::kQuestionAuxiliaries, second)) {
        note(trace, "drop-wh");
        out = uninvert(Words(w.begin() + 1, w.end()), trace);
      } else {
        note(trace, "drop-wh");
        out = join_words(w, 1);
      }
    } else if (lex_.contains(lex::kQuestionAuxiliaries, lead) && w.size() >= 2) {
      trace.matched_frames.push_back({std::string(lex::kQuestionAuxiliaries), core(w[0])});
      out = uninvert(w, trace);
    }
    return finish(out, trace);
  }

  // "the HEAD about the X and its Y" -> "X HEAD and Y"
  std::optional<std::string> compound_coordinated(const Words& w) const {
    std::size_t i = 0;
    if (i < w.size() && lex_.contains(lex::kArticles, bare(w[i]))) ++i;
    if (i + 4 >= w.size() || is_capitalized(w[i])) return std::nullopt;
    const std::string head = core(w[i]);
    const std::string prep = bare(w[i + 1]);
    if (prep != "about" && prep != "on" && prep != "of" && prep != "regarding") return std::nullopt;
    std::size_t x = i + 2;
    if (lex_.contains(lex::kArticles, bare(w[x]))) ++x;
    std::size_t conj = x;
    while (conj < w.size() && bare(w[conj]) != "and") ++conj;
    if (conj == x || conj + 2 >= w.size()) return std::nullopt;
    const std::string poss = bare(w[conj + 1]);
    if (poss != "its" && poss != "their") return std::nullopt;
    for (std::size_t k = conj + 2; k < w.size(); ++k) {
      if (bare(w[k]) == "and") return std::nullopt;
    }
    Words out(w.begin() + static_cast<std::ptrdiff_t>(x), w.begin() + static_cast<std::ptrdiff_t>(conj));
    out.push_back(head);
    out.push_back("and");
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(conj + 2), w.end());
    return join_words(out);
  }

  // "the HEAD Subj VERBed in its MOD PREP REST" -> "Subj MOD HEAD PREP REST"
  std::optional<std::string> compound_relative(const Words& w) const {
    std::size_t i = 0;
    if (i < w.size() && lex_.contains(lex::kArticles, bare(w[i]))) ++i;
    if (i + 4 >= w.size() || is_capitalized(w[i])) return std::nullopt;
    const std::string head = core(w[i]);
    std::size_t s = i + 1;
    std::size_t subj_end = s;
    while (subj_end < w.size() && (is_capitalized(w[subj_end]) || has_digit_or_symbol(w[subj_end]))) {
      ++subj_end;
    }
    if (subj_end == s || subj_end + 3 >= w.size()) return std::nullopt;
    const std::string verb = bare(w[subj_end]);
    const bool past = (verb.size() > 3 && verb.compare(verb.size() - 2, 2, "ed") == 0) ||
                      lex_.base_of_past(verb).has_value();
    if (!past || !lex_.contains(lex::kPrepositions, bare(w[subj_end + 1]))) return std::nullopt;
    const std::string poss = bare(w[subj_end + 2]);
    if (poss != "its" && poss != "their") return std::nullopt;
    std::size_t mod = subj_end + 3;
    std::size_t mod_end = mod;
    while (mod_end < w.size() && !lex_.contains(lex::kPrepositions, bare(w[mod_end]))) ++mod_end;
    if (mod_end == mod) return std::nullopt;

    Words out(w.begin() + static_cast<std::ptrdiff_t>(s), w.begin() + static_cast<std::ptrdiff_t>(subj_end));
    for (std::size_t k = mod; k < mod_end; ++k) out.push_back(core(w[k]));
    out.push_back(head);
    out.insert(out.end(), w.begin() + static_cast<std::ptrdiff_t>(mod_end), w.end());
    return join_words(out);
  }

  std::string directive(std::string_view text, ExtractionTrace& trace) const {
    const Words all = split_words(strip_terminator(text));
    Words w;
    for (const auto& word : all) {
      if (lex_.contains(lex::kPolitenessTerms, bare(word))) {
        note(trace, "drop-politeness");
        trace.matched_frames.push_back({std::string(lex::kPolitenessTerms), core(word)});
        continue;
      }
      w.push_back(word);
    }
    std::size_t i = 0;
    if (i < w.size() && lex_.contains(lex::kImperativeVerbs, bare(w[i]))) {
      trace.matched_frames.push_back({std::string(lex::kImperativeVerbs), core(w[i])});
      note(trace, "drop-imperative");
      ++i;
    }
    while (i < w.size() && lex_.contains(lex::kObjectPronouns, bare(w[i]))) {
      note(trace, "drop-pronoun");
      ++i;
    }
    std::string rest = strip_leading_punct(join_words(w, i));
    bool clause = false;
    if (auto m = lex_.match_prefix(lex::kDirectiveFillers, rest)) {
      note_frame(trace, *m, rest);
      note(trace, "drop-filler");
      const Words filler = split_words(m->phrase);
      clause = lex_.contains(lex::kComplementizers, filler.back());
      rest = strip_leading_punct(std::string_view(rest).substr(m->length));
    }
    bool comp = false;
    rest = strip_complementizer(rest, &comp);
    clause = clause || comp;

    Words r = split_words(rest);
    if (clause) {
      // "X are improving Y" -> "X improving Y"
      for (std::size_t k = 1; k + 1 < r.size(); ++k) {
        const std::string b = bare(r[k]);
        if ((b == "is" || b == "are") && looks_like_gerund(bare(r[k + 1]))) {
          r.erase(r.begin() + static_cast<std::ptrdiff_t>(k));
          note(trace, "drop-copula");
          break;
        }
      }
      return finish(join_words(r), trace);
    }
    if (auto c = compound_coordinated(r)) {
      note(trace, "compound-nominal");
      return finish(*c, trace, false);
    }
    if (auto c = compound_relative(r)) {
      note(trace, "compound-nominal");
      return finish(*c, trace, false);
    }
    if (r.size() > 1 && lex_.contains(lex::kArticles, bare(r[0]))) {
      note(trace, "drop-article");
      r.erase(r.begin());
    }
    return finish(join_words(r), trace);
  }

  // Shared by expressive and indirect frames: strip the frame and any
  // complementizer. A frame ending in a preposition takes a noun phrase,
  // whose leading article goes too.
  std::string strip_frame(const FrameMatch& m, std::string_view text, ExtractionTrace& trace,
                          bool* clause_out = nullptr) const {
    note_frame(trace, m, text);
    note(trace, "drop-frame");
    std::string rest = strip_leading_punct(text.substr(m.length));
    bool clause = false;
    rest = strip_complementizer(rest, &clause);
    if (clause) note(trace, "drop-complementizer");
    const Words frame_words = split_words(m.phrase);
    const bool np_frame = lex_.contains(lex::kPrepositions, frame_words.back());
    if (!clause && np_frame) rest = drop_article(rest, trace);
    if (clause_out) *clause_out = clause;
    return rest;
  }

  std::string drop_article(const std::string& text, ExtractionTrace& trace) const {
    Words r = split_words(text);
    if (r.size() > 1 && lex_.contains(lex::kArticles, bare(r[0]))) {
      note(trace, "drop-article");
      return join_words(r, 1);
    }
    return text;
  }

  std::string framed(std::string_view section, std::string_view text, ExtractionTrace& trace) const {
    auto m = lex_.match_prefix(section, text);
    if (!m) return std::string(text);
    return finish(strip_frame(*m, text, trace), trace);
  }

  std::string indirect(std::string_view text, ExtractionTrace& trace) const {
    auto m = indirect_frame(text);
    if (!m) return std::string(text);
    return finish(strip_frame(*m, text, trace), trace);
  }

  // Noun form for a verb-led remainder, e.g. "use the X" -> "Use of the X".
  std::optional<Words> nominalize(const Words& r, ExtractionTrace& trace) const {
    if (r.empty()) return std::nullopt;
    auto noun = lex_.nominalization(bare(r[0]));
    if (!noun) return std::nullopt;
    note(trace, "nominalize");
    Words out = split_words(*noun);
    out.back() += trailing_punct(r[0]);
    out.insert(out.end(), r.begin() + 1, r.end());
    return out;
  }

  std::string declarative(std::string_view text, ExtractionTrace& trace) const {
    auto m = lex_.match_prefix(lex::kDeclarativeFrames, text);
    if (!m) return std::string(text);
    note_frame(trace, *m, text);
    note(trace, "drop-frame");
    std::string rest = strip_leading_punct(text.substr(m->length));
    bool clause = false;
    rest = strip_complementizer(rest, &clause);
    if (clause) note(trace, "drop-complementizer");
    const Words frame_words = split_words(m->phrase);
    if (frame_words.back() == "to") {
      if (auto n = nominalize(split_words(rest), trace)) rest = join_words(*n);
    } else if (!clause) {
      rest = drop_article(rest, trace);
    }
    return finish(rest, trace);
  }

  std::string commissive(std::string_view text, ExtractionTrace& trace) const {
    auto m = lex_.match_prefix(lex::kCommissiveFrames, text);
    if (!m) return std::string(text);
    note_frame(trace, *m, text);
    note(trace, "drop-frame");
    const std::string subject = core(split_words(text.substr(0, m->length)).front());
    Words r = split_words(strip_terminator(strip_leading_punct(text.substr(m->length))));
    if (r.empty()) return finish("", trace);

    if (auto n = nominalize(r, trace)) {
      // The frame consumed the subject; rewrite first-person material that
      // would otherwise dangle.
      Words in(n->begin(), n->end());
      const std::size_t noun_len = split_words(*lex_.nominalization(bare(r[0]))).size();
      Words out(in.begin(), in.begin() + static_cast<std::ptrdiff_t>(noun_len));
      std::size_t k = noun_len;
      if (k < in.size() && (bare(in[k]) == "my" || bare(in[k]) == "our")) {
        note(trace, "rewrite-possessive");
        ++k;
      }
      for (; k < in.size(); ++k) {
        const std::string b = bare(in[k]);
        if (lex_.contains(lex::kSubordinators, b) && k + 2 < in.size() &&
            (bare(in[k + 1]) == "i" || bare(in[k + 1]) == "we")) {
          note(trace, "gerund-clause");
          out.push_back(b == "once" ? "after" : core(in[k]));
          out.push_back(rewrite(in[k + 2], Inflection::BaseToGerund, lex_));
          k += 2;
          continue;
        }
        if (b == "once") {
          note(trace, "rewrite-subordinator");
          out.push_back("after");
          continue;
        }
        if ((b == "my" || b == "our") && !out.empty() &&
            lex_.contains(lex::kPrepositions, bare(out.back()))) {
          note(trace, "rewrite-possessive");
          out.push_back("the" + trailing_punct(in[k]));
          continue;
        }
        out.push_back(in[k]);
      }
      return finish(join_words(out), trace);
    }
    if (looks_like_gerund(bare(r[0]))) return finish(join_words(r), trace);

    note(trace, "retain-subject");
    Words out{subject};
    out.push_back(lowercase_first(r[0]));
    out.insert(out.end(), r.begin() + 1, r.end());
    return finish(join_words(out), trace);
  }

  const IfidLexicon& lex_;
};

}  // namespace

std::string_view to_string(SpeechAct act) {
  switch (act) {
    case SpeechAct::Assertive: return "Assertive";
    case SpeechAct::Interrogative: return "Interrogative";
    case SpeechAct::Directive: return "Directive";
    case SpeechAct::Expressive: return "Expressive";
    case SpeechAct::Commissive: return "Commissive";
    case SpeechAct::Indirect: return "Indirect";
    case SpeechAct::Declarative: return "Declarative";
  }
  return "Assertive";
}

std::optional<SpeechAct> parse_speech_act(std::string_view name) {
  const std::string lower = to_lower_ascii(trim(name));
  for (SpeechAct act : kAllSpeechActs) {
    if (to_lower_ascii(to_string(act)) == lower) return act;
  }
  return std::nullopt;
}

Utterance::Utterance(std::string_view text) : text_(text), normalized_(normalize_text(text)) {
  if (normalized_.empty()) throw Error(ErrorKind::EmptyText, "utterance is blank");
}

SpeechAct classify(const Utterance& u, const IfidLexicon& lexicon) {
  return RuleEngine(lexicon).classify(u.normalized());
}

Proposition extract_rule(const Utterance& u, const IfidLexicon& lexicon) {
  const RuleEngine engine(lexicon);
  Proposition p;
  p.source_category = engine.classify(u.normalized());
  std::string text = u.normalized();
  SpeechAct act = p.source_category;
  for (int pass = 0; pass < kMaxPasses && act != SpeechAct::Assertive; ++pass) {
    std::string next = engine.apply(act, text, p.trace);
    if (next == text) break;
    text = std::move(next);
    if (text.empty()) break;
    act = engine.classify(text);
  }
  if (!engine.satisfies(text)) {
    text = engine.enforce(text);
    p.trace.transforms_applied.emplace_back("enforce-invariants");
  }
  p.text = std::move(text);
  return p;
}

double char_reduction(std::string_view original, std::string_view proposition) {
  const std::size_t n = utf8_length(original);
  if (n == 0) throw Error(ErrorKind::EmptyText, "char_reduction needs a non-empty original");
  const double m = static_cast<double>(utf8_length(proposition));
  return 100.0 * (static_cast<double>(n) - m) / static_cast<double>(n);
}

bool satisfies_proposition_invariants(std::string_view text, const IfidLexicon& lexicon) {
  return RuleEngine(lexicon).satisfies(text);
}

std::string enforce_proposition_invariants(std::string_view text, const IfidLexicon& lexicon) {
  return RuleEngine(lexicon).enforce(text);
}

std::string comparison_form(std::string_view text) {
  std::string s = normalize_text(text);
  if (!s.empty() && s.back() == '.') s.pop_back();
  return s;
}

}  // namespace propshift
