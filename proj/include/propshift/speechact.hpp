#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "propshift/lexicon.hpp"

namespace propshift {

enum class SpeechAct {
  Assertive,
  Interrogative,
  Directive,
  Expressive,
  Commissive,
  Indirect,
  Declarative,
};

inline constexpr std::array<SpeechAct, 7> kAllSpeechActs = {
    SpeechAct::Assertive,  SpeechAct::Interrogative, SpeechAct::Directive,
    SpeechAct::Expressive, SpeechAct::Commissive,    SpeechAct::Indirect,
    SpeechAct::Declarative,
};

std::string_view to_string(SpeechAct act);
/// Case-insensitive; accepts the names produced by to_string.
std::optional<SpeechAct> parse_speech_act(std::string_view name);

/// A user utterance. Construction rejects blank text with Error(EmptyText).
class Utterance {
 public:
  explicit Utterance(std::string_view text);

  const std::string& text() const noexcept { return text_; }
  const std::string& normalized() const noexcept { return normalized_; }

 private:
  std::string text_;
  std::string normalized_;
};

struct MatchedFrame {
  std::string lexicon;
  std::string span;

  bool operator==(const MatchedFrame&) const = default;
};

struct ExtractionTrace {
  std::vector<MatchedFrame> matched_frames;
  std::vector<std::string> transforms_applied;

  bool empty() const { return matched_frames.empty() && transforms_applied.empty(); }
};

struct Proposition {
  std::string text;
  SpeechAct source_category = SpeechAct::Assertive;
  ExtractionTrace trace;
};

/// Total classifier. Lexicons are consulted under a fixed precedence:
/// Declarative, Commissive, Expressive, Indirect, Directive, Interrogative;
/// Assertive when nothing matches.
SpeechAct classify(const Utterance& u, const IfidLexicon& lexicon = IfidLexicon::builtin());

/// Deterministic propositional-content extraction: strips force indicators
/// and rewrites the remainder as a statement or topical phrase.
Proposition extract_rule(const Utterance& u, const IfidLexicon& lexicon = IfidLexicon::builtin());

/// 100 * (len(original) - len(proposition)) / len(original), lengths in code
/// points. Negative when the proposition is longer.
double char_reduction(std::string_view original, std::string_view proposition);

/// No '?' anywhere and no leading indirect, expressive, commissive,
/// declarative or politeness phrase.
bool satisfies_proposition_invariants(std::string_view text,
                                      const IfidLexicon& lexicon = IfidLexicon::builtin());

/// Minimal rewrite that makes arbitrary text (e.g. a model reply) satisfy
/// the proposition invariants.
std::string enforce_proposition_invariants(std::string_view text,
                                           const IfidLexicon& lexicon = IfidLexicon::builtin());

/// Form used when comparing against reference strings: normalize_text plus
/// removal of one trailing period.
std::string comparison_form(std::string_view text);

}  // namespace propshift
