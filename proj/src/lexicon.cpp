#include "propshift/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "propshift/error.hpp"
#include "propshift/text.hpp"

namespace propshift {
namespace {

constexpr std::string_view kSectionHeader = "# lexicon:";

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '\'' ||
         (static_cast<unsigned char>(c) & 0x80);
}

const std::vector<std::string>& empty_list() {
  static const std::vector<std::string> empty;
  return empty;
}

}  // namespace

IfidLexicon IfidLexicon::parse(std::string_view text) {
  IfidLexicon lexicon;
  std::string section;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw);
    if (line.empty()) continue;
    if (line.rfind(kSectionHeader, 0) == 0) {
      section = trim(std::string_view(line).substr(kSectionHeader.size()));
      if (section.empty()) {
        throw Error(ErrorKind::SchemaError, "line " + std::to_string(line_no) + ": empty lexicon name");
      }
      lexicon.sections_[section];
      continue;
    }
    if (line.front() == '#') continue;
    if (section.empty()) {
      throw Error(ErrorKind::SchemaError,
                  "line " + std::to_string(line_no) + ": entry before any '# lexicon:' header");
    }
    lexicon.add_phrase(section, line, line_no);
  }
  return lexicon;
}

IfidLexicon IfidLexicon::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read lexicon file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const IfidLexicon& IfidLexicon::builtin() {
  static const IfidLexicon lexicon = parse(default_lexicon_text());
  return lexicon;
}

void IfidLexicon::add_phrase(const std::string& section, std::string phrase, std::size_t line_no) {
  auto fail = [&](const std::string& what) {
    throw Error(ErrorKind::SchemaError, "line " + std::to_string(line_no) + ": " + what);
  };
  if (section == lex::kNominalizations) {
    auto eq = phrase.find('=');
    if (eq == std::string::npos) fail("nominalization needs 'verb = Noun form'");
    std::string key = to_lower_ascii(trim(std::string_view(phrase).substr(0, eq)));
    std::string value = trim(std::string_view(phrase).substr(eq + 1));
    if (key.empty() || value.empty()) fail("empty nominalization side");
    nominalizations_[key] = value;
    phrase = key;
  } else if (section == lex::kIrregularVerbs) {
    auto forms = split_words(to_lower_ascii(phrase));
    if (forms.size() != 3) fail("irregular verb needs 'base past past-participle'");
    irregular_[forms[0]] = IrregularForms{forms[1], forms[2]};
    phrase = forms[0];
  } else {
    phrase = to_lower_ascii(phrase);
  }
  if (lookup_[section].insert(phrase).second) sections_[section].push_back(phrase);
}

void IfidLexicon::merge(const IfidLexicon& other) {
  for (const auto& [name, list] : other.sections_) {
    auto& mine = sections_[name];
    auto& seen = lookup_[name];
    for (const auto& p : list) {
      if (seen.insert(p).second) mine.push_back(p);
    }
  }
  for (const auto& [k, v] : other.nominalizations_) nominalizations_[k] = v;
  for (const auto& [k, v] : other.irregular_) irregular_[k] = v;
}

const std::vector<std::string>& IfidLexicon::phrases(std::string_view section) const {
  auto it = sections_.find(section);
  return it == sections_.end() ? empty_list() : it->second;
}

bool IfidLexicon::contains(std::string_view section, std::string_view word) const {
  auto it = lookup_.find(section);
  if (it == lookup_.end()) return false;
  return it->second.count(to_lower_ascii(word)) > 0;
}

std::optional<FrameMatch> IfidLexicon::match_prefix(std::string_view section,
                                                    std::string_view text) const {
  std::optional<FrameMatch> best;
  for (const auto& phrase : phrases(section)) {
    if (!starts_with_ci(text, phrase)) continue;
    const bool boundary = phrase.size() == text.size() || !is_word_char(phrase.back()) ||
                          !is_word_char(text[phrase.size()]);
    if (!boundary) continue;
    // Longest wins; equal lengths are the same phrase (entries are unique).
    if (!best || phrase.size() > best->length) {
      best = FrameMatch{std::string(section), phrase, phrase.size()};
    }
  }
  return best;
}

std::optional<std::string> IfidLexicon::nominalization(std::string_view verb) const {
  auto it = nominalizations_.find(to_lower_ascii(verb));
  if (it == nominalizations_.end()) return std::nullopt;
  return it->second;
}

std::optional<IrregularForms> IfidLexicon::irregular(std::string_view base) const {
  auto it = irregular_.find(to_lower_ascii(base));
  if (it == irregular_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::string> IfidLexicon::base_of_past_participle(std::string_view pp) const {
  const std::string lower = to_lower_ascii(pp);
  for (const auto& [base, forms] : irregular_) {
    if (forms.past_participle == lower) return base;
  }
  return std::nullopt;
}

std::optional<std::string> IfidLexicon::base_of_past(std::string_view past) const {
  const std::string lower = to_lower_ascii(past);
  for (const auto& [base, forms] : irregular_) {
    if (forms.past == lower) return base;
  }
  return std::nullopt;
}

std::vector<std::string> IfidLexicon::section_names() const {
  std::vector<std::string> names;
  for (const auto& [name, list] : sections_) names.push_back(name);
  return names;
}

}  // namespace propshift
