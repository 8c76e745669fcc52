#include <doctest.h>

#include <algorithm>
#include <random>

#include "propshift/error.hpp"
#include "propshift/lexicon.hpp"
#include "propshift/speechact.hpp"
#include "support.hpp"

using namespace propshift;
using testing_support::data_path;
using testing_support::fixtures;

TEST_CASE("bundled lexicon file matches the compiled-in lexicons") {
  const auto file = IfidLexicon::load(data_path("lexicons.txt"));
  const auto& builtin = IfidLexicon::builtin();
  REQUIRE(file.section_names() == builtin.section_names());
  for (const auto& name : builtin.section_names()) CHECK(file.phrases(name) == builtin.phrases(name));
}

TEST_CASE("every lexicon entry is lowercase") {
  const auto& lx = IfidLexicon::builtin();
  for (const auto& name : lx.section_names()) {
    for (const auto& phrase : lx.phrases(name)) {
      INFO(name << ": " << phrase);
      CHECK(std::none_of(phrase.begin(), phrase.end(), [](unsigned char c) { return c >= 'A' && c <= 'Z'; }));
    }
  }
}

TEST_CASE("parse reports the offending line") {
  try {
    IfidLexicon::parse("# lexicon: articles\nthe\n\n# lexicon: nominalizations\nshare Sharing\n");
    FAIL("expected SchemaError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::SchemaError);
    CHECK(std::string(e.what()).find("line 5") != std::string::npos);
  }
  CHECK_THROWS_AS(IfidLexicon::parse("orphan phrase\n"), Error);
}

TEST_CASE("match_prefix picks the longest phrase at a word boundary") {
  const auto lx = IfidLexicon::parse("# lexicon: frames\ncould\ncould it be that\n");
  auto m = lx.match_prefix("frames", "Could it be that Seaborn grew?");
  REQUIRE(m);
  CHECK(m->phrase == "could it be that");
  CHECK(m->length == 16);
  CHECK_FALSE(lx.match_prefix("frames", "Couldn't matter"));
  CHECK_FALSE(lx.match_prefix("frames", "Coulda"));
}

TEST_CASE("nominalization and irregular tables") {
  const auto& lx = IfidLexicon::builtin();
  CHECK(lx.nominalization("share") == "Sharing");
  CHECK(lx.nominalization("use") == "Use of");
  CHECK_FALSE(lx.nominalization("highlight"));
  REQUIRE(lx.irregular("say"));
  CHECK(lx.irregular("say")->past == "said");
  CHECK(lx.base_of_past_participle("taken") == "take");
}

TEST_CASE("classification does not depend on lexicon entry order") {
  const auto& base = IfidLexicon::builtin();
  std::mt19937 rng(20240611);
  for (int trial = 0; trial < 25; ++trial) {
    const auto shuffled = base.reordered([&](std::vector<std::string>& v) { std::shuffle(v.begin(), v.end(), rng); });
    for (const auto& r : fixtures()) {
      const Utterance u(r.original.text);
      INFO("qid " << r.qid);
      REQUIRE(classify(u, shuffled) == classify(u, base));
      REQUIRE(extract_rule(u, shuffled).text == extract_rule(u, base).text);
    }
  }
}
