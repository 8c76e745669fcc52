#pragma once

#include <string>
#include <string_view>

#include "propshift/lexicon.hpp"

namespace propshift {

enum class Inflection {
  BaseToPast,          // contribute -> contributed
  PastParticipleToPast,  // taken -> took, challenged -> challenged
  IngToPresent3sg,     // providing -> provides
  IngToBase,           // improving -> improve
  BaseToPresent3sg,    // come -> comes
  BaseToGerund,        // read -> reading
};

/// Re-inflects a single English verb token. The irregular table is consulted
/// first; regular morphology is the fallback. A leading capital is kept.
std::string reinflect(std::string_view verb, Inflection mode,
                      const IfidLexicon& lexicon = IfidLexicon::builtin());

/// True when the token looks like a past participle (regular -ed or an
/// irregular participle from the table).
bool looks_like_past_participle(std::string_view word, const IfidLexicon& lexicon);
bool looks_like_gerund(std::string_view word);

}  // namespace propshift
