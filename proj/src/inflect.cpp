#include "propshift/inflect.hpp"

#include <cctype>

#include "propshift/text.hpp"

namespace propshift {
namespace {

bool is_vowel_letter(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u';
}

// Porter-style consonant test: 'y' is a consonant at the start or after a vowel.
bool is_consonant(std::string_view w, std::size_t i) {
  const char c = w[i];
  if (is_vowel_letter(c)) return false;
  if (c == 'y') return i == 0 || !is_consonant(w, i - 1);
  return true;
}

// Number of vowel-consonant sequences, the [C](VC)^m[V] measure.
int measure(std::string_view w) {
  int m = 0;
  bool prev_vowel = false;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const bool cons = is_consonant(w, i);
    if (cons && prev_vowel) ++m;
    prev_vowel = !cons;
  }
  return m;
}

// Ends consonant-vowel-consonant with the last not w, x or y.
bool ends_cvc(std::string_view w) {
  const std::size_t n = w.size();
  if (n < 3) return false;
  const char last = w[n - 1];
  if (last == 'w' || last == 'x' || last == 'y') return false;
  return is_consonant(w, n - 3) && !is_consonant(w, n - 2) && is_consonant(w, n - 1);
}

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() && w.substr(w.size() - suffix.size()) == suffix;
}

bool short_stressed(std::string_view w) { return measure(w) == 1 && ends_cvc(w); }

std::string regular_past(const std::string& base) {
  if (ends_with(base, "e")) return base + "d";
  if (base.size() > 1 && base.back() == 'y' && is_consonant(base, base.size() - 2)) {
    return base.substr(0, base.size() - 1) + "ied";
  }
  if (short_stressed(base)) return base + base.back() + "ed";
  return base + "ed";
}

std::string present_3sg(const std::string& base) {
  if (base == "be") return "is";
  if (base == "have") return "has";
  if (base == "do") return "does";
  if (ends_with(base, "s") || ends_with(base, "x") || ends_with(base, "z") ||
      ends_with(base, "ch") || ends_with(base, "sh") || ends_with(base, "o")) {
    return base + "es";
  }
  if (base.size() > 1 && base.back() == 'y' && is_consonant(base, base.size() - 2)) {
    return base.substr(0, base.size() - 1) + "ies";
  }
  return base + "s";
}

std::string gerund(const std::string& base) {
  if (base == "be") return "being";
  if (ends_with(base, "ie")) return base.substr(0, base.size() - 2) + "ying";
  if (ends_with(base, "ee") || ends_with(base, "ye") || ends_with(base, "oe")) return base + "ing";
  if (ends_with(base, "e") && base.size() > 2) return base.substr(0, base.size() - 1) + "ing";
  if (short_stressed(base)) return base + base.back() + "ing";
  return base + "ing";
}

std::string base_from_ing(const std::string& word, const IfidLexicon& lexicon) {
  if (word == "being") return "be";
  if (!ends_with(word, "ing") || word.size() < 5) return word;
  std::string stem = word.substr(0, word.size() - 3);
  if (lexicon.contains(lex::kSilentEStems, stem)) return stem + "e";
  const std::size_t n = stem.size();
  if (n >= 3 && stem[n - 1] == stem[n - 2] && is_consonant(stem, n - 1)) {
    std::string undoubled = stem.substr(0, n - 1);
    if (short_stressed(undoubled)) return undoubled;
    return stem;
  }
  if (short_stressed(stem)) return stem + "e";
  return stem;
}

std::string match_case(const std::string& out, std::string_view original) {
  if (original.empty() || !std::isupper(static_cast<unsigned char>(original.front()))) return out;
  std::string cap = out;
  if (!cap.empty()) cap[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(cap[0])));
  return cap;
}

}  // namespace

std::string reinflect(std::string_view verb, Inflection mode, const IfidLexicon& lexicon) {
  const std::string word = to_lower_ascii(verb);
  if (word.empty()) return std::string(verb);
  std::string out;
  switch (mode) {
    case Inflection::BaseToPast:
      if (auto irr = lexicon.irregular(word)) {
        out = irr->past;
      } else {
        out = regular_past(word);
      }
      break;
    case Inflection::PastParticipleToPast:
      if (auto base = lexicon.base_of_past_participle(word)) {
        out = lexicon.irregular(*base)->past;
      } else {
        out = word;
      }
      break;
    case Inflection::IngToBase:
      out = base_from_ing(word, lexicon);
      break;
    case Inflection::IngToPresent3sg:
      out = present_3sg(base_from_ing(word, lexicon));
      break;
    case Inflection::BaseToPresent3sg:
      out = present_3sg(word);
      break;
    case Inflection::BaseToGerund:
      out = gerund(word);
      break;
  }
  return match_case(out, verb);
}

bool looks_like_past_participle(std::string_view word, const IfidLexicon& lexicon) {
  const std::string w = to_lower_ascii(word);
  if (w.size() > 3 && ends_with(w, "ed")) return true;
  return lexicon.base_of_past_participle(w).has_value();
}

bool looks_like_gerund(std::string_view word) {
  const std::string w = to_lower_ascii(word);
  return w.size() >= 5 && ends_with(w, "ing");
}

}  // namespace propshift
