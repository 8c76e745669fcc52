#include <doctest.h>

#include <fstream>
#include <sstream>

#include "propshift/cli.hpp"
#include "propshift/corpus.hpp"
#include "propshift/evalkit.hpp"
#include "support.hpp"

using namespace propshift;
using testing_support::data_path;
using testing_support::TempDir;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  const int code = cli::run(args, in, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write(const std::filesystem::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

}  // namespace

TEST_CASE("classify") {
  const auto r = run_cli({"classify"},
                         "Has TelComp challenged the charging of TPU fees in other municipalities?\n\n"
                         "List the discounts Disney+ offered in its 2020 pre-sale in Brazil.\n");
  CHECK(r.code == 0);
  CHECK(r.out ==
        "Interrogative\tHas TelComp challenged the charging of TPU fees in other municipalities?\n"
        "Directive\tList the discounts Disney+ offered in its 2020 pre-sale in Brazil.\n");
  CHECK(run_cli({"classify"}, "").out.empty());
  CHECK(run_cli({"classify"}, "").code == 0);
  CHECK(run_cli({"classify", "--input", "/nonexistent/file.txt"}).code == 2);
}

TEST_CASE("extract with and without trace") {
  const std::string q = "What did Artur Coimbra say?\n";
  CHECK(run_cli({"extract"}, q).out == "Artur Coimbra said.\n");
  const auto traced = run_cli({"extract", "--trace"}, q);
  CHECK(traced.code == 0);
  CHECK(traced.out.find("\"matched_frames\"") != std::string::npos);
  CHECK(traced.out.find("\"transforms\"") != std::string::npos);
}

TEST_CASE("llm backend without a credential exits 3") {
  ::unsetenv("PROPSHIFT_LLM_API_KEY");
  const auto r = run_cli({"--backend", "llm", "extract"}, "Is X true?\n");
  CHECK(r.code == 3);
  CHECK(r.err.find("AuthMissing") != std::string::npos);
}

TEST_CASE("usage errors exit 2") {
  CHECK(run_cli({}).code == 2);
  CHECK(run_cli({"bogus"}).code == 2);
  CHECK(run_cli({"--mode", "nearest", "classify"}, "x\n").code == 0);  // mode unused by classify
  CHECK(run_cli({"--provider", "nope", "ingest", "--corpus", data_path("mini_corpus.jsonl").string(), "--index",
                 "/tmp/unused.psix"})
            .code == 2);
  CHECK(run_cli({"--help"}).code == 0);
}

TEST_CASE("ingest prints the chunk identity and is byte-stable") {
  TempDir dir;
  write(dir / "two.jsonl",
        R"({"doc_id":"a","title":"A","body":"one\n\ntwo\n\nthree"})"
        "\n"
        R"({"doc_id":"b","body":"four\n\nfive"})"
        "\n");
  const auto r = run_cli({"ingest", "--corpus", (dir / "two.jsonl").string(), "--index", (dir / "1.psix").string()});
  CHECK(r.code == 0);
  CHECK(r.out == "docs=2 paragraphs=5 chunks=7\n");
  run_cli({"ingest", "--corpus", (dir / "two.jsonl").string(), "--index", (dir / "2.psix").string()});
  CHECK(slurp(dir / "1.psix") == slurp(dir / "2.psix"));

  write(dir / "dup.jsonl", R"({"doc_id":"a","body":"x"})" "\n" R"({"doc_id":"a","body":"y"})" "\n");
  const auto dup = run_cli({"ingest", "--corpus", (dir / "dup.jsonl").string(), "--index", (dir / "3.psix").string()});
  CHECK(dup.code == 2);
  CHECK(dup.err.find("DuplicateDocId: a") != std::string::npos);
}

TEST_CASE("search and compare on the mini corpus") {
  TempDir dir;
  const auto ix = (dir / "mini.psix").string();
  REQUIRE(run_cli({"ingest", "--corpus", data_path("mini_corpus.jsonl").string(), "--index", ix}).code == 0);

  const auto s = run_cli({"--min-similarity", "0.3", "search", "--index", ix, "--query", "satellite broadband",
                          "--format", "csv"});
  CHECK(s.code == 0);
  CHECK(s.out.starts_with("chunk_id,layer,score\ntel-006#"));

  const std::vector<std::string> args = {"--config", data_path("demo.ini").string(), "compare", "--queries",
                                         data_path("sample_queries.csv").string(), "--index", ix, "--summary"};
  const auto a = run_cli(args);
  const auto b = run_cli(args);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.find("| QID | Query Text | Min | Max | Mean | Std | Segments | Dist. |") != std::string::npos);
  CHECK(a.out.find("## Per-query retrieval") != std::string::npos);

  write(dir / "empty.csv", "");
  CHECK(run_cli({"compare", "--queries", (dir / "empty.csv").string(), "--index", ix}).code == 2);
  write(dir / "header.csv", "qid,category,original_text\n");
  CHECK(run_cli({"compare", "--queries", (dir / "header.csv").string(), "--index", ix}).code == 2);

  // Index built at another dimension: every query fails, the run still reports.
  const auto mismatch = run_cli({"--dim", "64", "compare", "--queries", data_path("sample_queries.csv").string(),
                                 "--index", ix});
  CHECK(mismatch.code == 2);
  CHECK(mismatch.err.find("DimensionMismatch") != std::string::npos);
}

TEST_CASE("config file values yield to flags") {
  TempDir dir;
  write(dir / "cfg.ini", "epsilon = 0.5\n");
  const auto from_file = run_cli({"--config", (dir / "cfg.ini").string(), "compare", "--fixtures", "--summary"});
  CHECK(from_file.out.find("## Verdicts (epsilon 0.5)") != std::string::npos);
  const auto flag = run_cli({"--config", (dir / "cfg.ini").string(), "--epsilon", "0.001", "compare", "--fixtures",
                             "--summary"});
  CHECK(flag.out.find("## Verdicts (epsilon 0.001)") != std::string::npos);
  const auto dflt = run_cli({"compare", "--fixtures", "--summary"});
  CHECK(dflt.out.find("## Verdicts (epsilon 1e-04)") != std::string::npos);
}

TEST_CASE("compare --fixtures and report") {
  TempDir dir;
  const auto r = run_cli({"compare", "--fixtures", "--format", "csv", "--output", (dir / "f.csv").string(), "--plots",
                          (dir / "plots").string()});
  CHECK(r.code == 0);
  CHECK(parse_fixtures(slurp(dir / "f.csv")) == parse_fixtures(slurp(data_path("appendix_queries.csv"))));
  CHECK(std::filesystem::exists(dir / "plots" / "char_reduction.csv"));
  CHECK(std::filesystem::exists(dir / "plots" / "mean_similarity.csv"));

  const auto rep = run_cli({"report", "--input", (dir / "f.csv").string(), "--summary", "--narrative"});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("| Interrogative | 0.4532 | 0.7854 | 0.6449 |") != std::string::npos);
  CHECK(rep.out.find("QID 6 (Assertive)") != std::string::npos);
}
