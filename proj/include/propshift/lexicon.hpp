#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace propshift {

/// Section names understood by the rule engine.
namespace lex {
inline constexpr std::string_view kQuestionLeads = "question_leads";
inline constexpr std::string_view kQuestionAuxiliaries = "question_auxiliaries";
inline constexpr std::string_view kImperativeVerbs = "imperative_verbs";
inline constexpr std::string_view kPolitenessTerms = "politeness_terms";
inline constexpr std::string_view kObjectPronouns = "object_pronouns";
inline constexpr std::string_view kDirectiveFillers = "directive_fillers";
inline constexpr std::string_view kPerformativeVerbs = "performative_verbs";
inline constexpr std::string_view kIndirectFrames = "indirect_frames";
inline constexpr std::string_view kExpressiveFrames = "expressive_frames";
inline constexpr std::string_view kCommissiveFrames = "commissive_frames";
inline constexpr std::string_view kDeclarativeFrames = "declarative_frames";
inline constexpr std::string_view kComplementizers = "complementizers";
inline constexpr std::string_view kDeterminers = "determiners";
inline constexpr std::string_view kArticles = "articles";
inline constexpr std::string_view kPrepositions = "prepositions";
inline constexpr std::string_view kAdverbs = "adverbs";
inline constexpr std::string_view kSubordinators = "subordinators";
inline constexpr std::string_view kNominalizations = "nominalizations";
inline constexpr std::string_view kIrregularVerbs = "irregular_verbs";
inline constexpr std::string_view kSilentEStems = "silent_e_stems";
}  // namespace lex

struct IrregularForms {
  std::string past;
  std::string past_participle;
};

struct FrameMatch {
  std::string lexicon;
  std::string phrase;
  std::size_t length = 0;  // bytes consumed from the matched text
};

/// Illocutionary-force cue lexicons plus the small morphology tables the
/// rule engine needs. Immutable once built; share freely across threads.
class IfidLexicon {
 public:
  /// Parses the line-oriented format of data/lexicons.txt. Throws
  /// Error(SchemaError) naming the line on malformed input.
  static IfidLexicon parse(std::string_view text);
  static IfidLexicon load(const std::filesystem::path& path);
  /// The lexicons compiled into the library.
  static const IfidLexicon& builtin();

  /// Adds every entry of `other`; mapping entries in `other` win.
  void merge(const IfidLexicon& other);

  const std::vector<std::string>& phrases(std::string_view section) const;
  bool contains(std::string_view section, std::string_view word) const;

  /// Longest phrase of `section` that prefixes `text` at a word boundary.
  /// Case-insensitive; independent of entry order.
  std::optional<FrameMatch> match_prefix(std::string_view section, std::string_view text) const;

  std::optional<std::string> nominalization(std::string_view verb) const;
  std::optional<IrregularForms> irregular(std::string_view base) const;
  /// Reverse lookups over the irregular table.
  std::optional<std::string> base_of_past_participle(std::string_view pp) const;
  std::optional<std::string> base_of_past(std::string_view past) const;

  std::vector<std::string> section_names() const;

  /// Copy with every phrase section reordered by `permute`; used to check
  /// that matching does not depend on entry order.
  template <typename Permute>
  IfidLexicon reordered(Permute&& permute) const {
    IfidLexicon copy = *this;
    for (auto& [name, list] : copy.sections_) permute(list);
    return copy;
  }

 private:
  void add_phrase(const std::string& section, std::string phrase, std::size_t line_no);

  std::map<std::string, std::vector<std::string>, std::less<>> sections_;
  std::map<std::string, std::set<std::string, std::less<>>, std::less<>> lookup_;
  std::map<std::string, std::string, std::less<>> nominalizations_;
  std::map<std::string, IrregularForms, std::less<>> irregular_;
};

std::string_view default_lexicon_text();

}  // namespace propshift
