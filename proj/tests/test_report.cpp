#include <doctest.h>
#include <json.hpp>

#include <sstream>

#include "propshift/csv.hpp"
#include "propshift/report.hpp"
#include "support.hpp"

using namespace propshift;
using testing_support::fixtures;

TEST_CASE("empty input gives header-only output") {
  const std::vector<QueryPairRecord> none;
  CHECK(emit_report(none, ReportFormat::Csv) == "qid,category,variant,query_text,min,max,mean,std,segments,distinct\n");
  CHECK(emit_report(none, ReportFormat::MarkdownTables).starts_with("| QID | Query Text | Min | Max | Mean | Std | Segments | Dist. |\n"));
  CHECK(emit_report(none, ReportFormat::JsonLines).empty());
}

TEST_CASE("CSV output round-trips through the fixture loader") {
  const auto text = emit_report(fixtures(), ReportFormat::Csv);
  CHECK(parse_fixtures(text) == fixtures());

  QueryPairRecord odd;
  odd.qid = 99;
  odd.category = SpeechAct::Directive;
  odd.original.text = "List \"quoted\", comma text";
  odd.original.stats = RetrievalStats{0.1 + 0.2, 0.7, 0.5, 1.0 / 3.0, 4};
  odd.original.distinct = 1;
  odd.propositional.text = "Nothing found";
  const std::vector<QueryPairRecord> records = {odd};
  CHECK(parse_fixtures(emit_report(records, ReportFormat::Csv)) == records);
}

TEST_CASE("reports are byte-stable") {
  for (auto fmt : {ReportFormat::Csv, ReportFormat::JsonLines, ReportFormat::MarkdownTables}) {
    CHECK(emit_report(fixtures(), fmt) == emit_report(fixtures(), fmt));
  }
  CHECK(emit_summary(fixtures()) == emit_summary(fixtures()));
}

TEST_CASE("markdown mirrors the appendix layout") {
  const auto md = emit_report(fixtures(), ReportFormat::MarkdownTables);
  CHECK(md.find("### Assertive") < md.find("### Interrogative"));
  CHECK(md.find("| 5 | Highline appointed") != std::string::npos);
  std::istringstream in(md);
  int data_rows = 0;
  for (std::string line; std::getline(in, line);) {
    if (line.starts_with("| ") && !line.starts_with("| QID")) ++data_rows;
  }
  CHECK(data_rows == 126);
  CHECK(md.find("| 0.5531 | 0.7539 | 0.6490 | 0.0835 | 7 | 0 |") != std::string::npos);
}

TEST_CASE("jsonl carries stats and verdicts") {
  std::istringstream in(emit_report(fixtures(), ReportFormat::JsonLines));
  std::string line;
  REQUIRE(std::getline(in, line));
  const auto j = nlohmann::json::parse(line);
  CHECK(j["qid"] == 0);
  CHECK(j["category"] == "Assertive");
  CHECK(j["verdict"] == "Unchanged");
  CHECK(j["original"]["segments"] == 18);
}

TEST_CASE("plot tables") {
  const auto reduction = csv::parse(reduction_plot_csv(fixtures()));
  REQUIRE(reduction.size() == 8);
  CHECK(reduction[0] == csv::Row{"category", "mean_reduction_pct"});
  const auto verdicts = csv::parse(verdict_plot_csv(fixtures()));
  REQUIRE(verdicts.size() == 64);
  CHECK(verdicts[0] == csv::Row{"qid", "category", "mean_orig", "mean_prop", "verdict"});
  CHECK(verdicts[7] == csv::Row{"6", "Assertive", "0.7225", "0.6965", "Decreased"});
}

TEST_CASE("summary lists the three correlations") {
  const auto s = emit_summary(fixtures());
  CHECK(s.find("| Assertive | 0.5531 | 0.8137 | 0.6871 | 0.5531 | 0.8100 | 0.6827 |") != std::string::npos);
  CHECK(s.find("| original | 63 |") != std::string::npos);
  CHECK(s.find("| propositional | 63 |") != std::string::npos);
  CHECK(s.find("| all | 126 |") != std::string::npos);
}

TEST_CASE("narrative mentions chunk counts by layer and the score range") {
  QueryPairRecord r;
  r.qid = 3;
  r.category = SpeechAct::Interrogative;
  r.original.text = "Q?";
  r.original.stats = RetrievalStats{0.5006, 0.61, 0.55, 0.02, 20};
  r.original.layers = LayerCounts{1, 19};
  r.propositional.text = "Q.";
  r.propositional.stats = RetrievalStats{0.5129, 0.66, 0.58, 0.02, 25};
  r.propositional.layers = LayerCounts{0, 25};
  const auto text = narrative(r);
  CHECK(text.find("20 chunks (19 paragraphs and 1 full text)") != std::string::npos);
  CHECK(text.find("0.5006 to 0.6100") != std::string::npos);
  CHECK(text.find("Improved") != std::string::npos);
}

TEST_CASE("number formatting") {
  CHECK(format_exact(0.1) == "0.1");
  CHECK(std::stod(format_exact(1.0 / 3.0)) == 1.0 / 3.0);
  CHECK(format_fixed(0.64899) == "0.6490");
  CHECK(format_fixed(-0.00001) == "0.0000");
}
