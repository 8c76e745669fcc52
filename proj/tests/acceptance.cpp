// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.

#include <unistd.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "propshift/cli.hpp"
#include "propshift/corpus.hpp"
#include "propshift/embedding.hpp"
#include "propshift/evalkit.hpp"
#include "propshift/speechact.hpp"
#include "propshift/text.hpp"

using namespace propshift;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

fs::path data(const std::string& name) { return fs::path(PROPSHIFT_DATA_DIR) / name; }

const std::vector<QueryPairRecord>& fixtures() {
  static const auto rows = load_fixtures(data("appendix_queries.csv"));
  return rows;
}

std::string fmt(double v, int decimals = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

// 1 -------------------------------------------------------------------------
Outcome golden_rewrites() {
  const std::pair<const char*, const char*> rows[] = {
      {"The new Anatel Licensing Regulation began to be enforced on November 3.",
       "The new Anatel Licensing Regulation began to be enforced on November 3."},
      {"Has TelComp challenged the charging of TPU fees in other municipalities?",
       "TelComp challenged the charging of TPU fees in other municipalities."},
      {"List the discounts Disney+ offered in its 2020 pre-sale in Brazil.", "Disney+ 2020 pre-sale discounts in Brazil"},
      {"It’s surprising that Seaborn quickly activated its services after connecting the AMX-1 cable.",
       "Seaborn quickly activated its services after connecting the AMX-1 cable."},
      {"I will share my summary of the 5x5 TECSummit after I read all related articles.",
       "Sharing summary of the 5x5 TECSummit after reading all related articles."},
      {"Could it be that Seaborn’s partnership with Telecall ensures better redundancy in Rio?",
       "Seaborn's partnership with Telecall ensures better redundancy in Rio."},
      {"We hereby announce our intention to use the 5x5 TECSummit findings in our corporate strategy.",
       "Use of the 5x5 TECSummit findings in our corporate strategy."},
  };
  int ok = 0;
  std::string misses;
  for (const auto& [in, want] : rows) {
    const auto got = extract_rule(Utterance(in)).text;
    if (normalize_text(got) == normalize_text(want)) {
      ++ok;
    } else {
      misses += " [" + got + "]";
    }
  }
  return {ok == 7, std::to_string(ok) + "/7 exact" + misses};
}

// 2 -------------------------------------------------------------------------
Outcome classifier_accuracy() {
  int ok = 0;
  std::string misses;
  for (const auto& r : fixtures()) {
    if (classify(Utterance(r.original.text)) == r.category) {
      ++ok;
    } else {
      misses += " qid" + std::to_string(r.qid);
    }
  }
  return {ok == 63, std::to_string(ok) + "/63 classified" + misses};
}

// 3 -------------------------------------------------------------------------
Outcome extraction_match() {
  std::map<SpeechAct, int> hits;
  int total = 0;
  for (const auto& r : fixtures()) {
    if (comparison_form(extract_rule(Utterance(r.original.text)).text) == comparison_form(r.propositional.text)) {
      ++hits[r.category];
      ++total;
    }
  }
  std::string per;
  for (SpeechAct act : kAllSpeechActs) per += " " + std::string(to_string(act)) + "=" + std::to_string(hits[act]) + "/9";
  const double rate = total / 63.0;
  return {rate >= 0.70, std::to_string(total) + "/63 (" + fmt(100 * rate, 1) + "%);" + per};
}

// 4 -------------------------------------------------------------------------
Outcome category_table() {
  struct Row {
    SpeechAct act;
    double v[6];  // orig min, prop min, orig max, prop max, orig mean, prop mean
  };
  const Row table[] = {
      {SpeechAct::Assertive, {0.5531, 0.5531, 0.8137, 0.8100, 0.6871, 0.6827}},
      {SpeechAct::Commissive, {0.4261, 0.4667, 0.6786, 0.7530, 0.5571, 0.6001}},
      {SpeechAct::Declarative, {0.4493, 0.5300, 0.7570, 0.7761, 0.6224, 0.6396}},
      {SpeechAct::Directive, {0.4478, 0.4836, 0.8008, 0.8124, 0.6405, 0.6619}},
      {SpeechAct::Expressive, {0.4429, 0.5315, 0.7504, 0.8196, 0.6039, 0.6482}},
      {SpeechAct::Indirect, {0.4209, 0.4666, 0.7334, 0.7913, 0.6002, 0.6503}},
      {SpeechAct::Interrogative, {0.4532, 0.4601, 0.7854, 0.7891, 0.6449, 0.6526}},
  };
  int ok = 0;
  double worst = 0;
  for (const auto& t : table) {
    const auto cs = aggregate_category(fixtures(), t.act);
    const double got[6] = {cs.original.min,  cs.propositional.min,  cs.original.max,
                           cs.propositional.max, cs.original.mean, cs.propositional.mean};
    for (int i = 0; i < 6; ++i) {
      const double err = std::abs(got[i] - t.v[i]);
      worst = std::max(worst, err);
      ok += err <= 5e-4;
    }
  }
  return {ok == 42, std::to_string(ok) + "/42 within 0.0005, max error " + fmt(worst, 6)};
}

// 5 -------------------------------------------------------------------------
Outcome mean_verdicts() {
  std::map<SpeechAct, std::array<int, 3>> counts;
  bool assertive_ok = true;
  for (const auto& r : fixtures()) {
    const auto v = compare_query(*r.original.stats, *r.propositional.stats, 1e-4, r.qid).verdict;
    ++counts[r.category][static_cast<std::size_t>(v)];
    if (r.category == SpeechAct::Assertive) {
      assertive_ok &= (r.qid == 6) ? v == Verdict::Decreased : v == Verdict::Unchanged;
    }
  }
  bool others_ok = true;
  std::string per;
  for (SpeechAct act : kAllSpeechActs) {
    const auto& c = counts[act];
    per += " " + std::string(to_string(act)) + "=" + std::to_string(c[0]) + "/" + std::to_string(c[1]) + "/" +
           std::to_string(c[2]);
    if (act != SpeechAct::Assertive) others_ok &= c[0] > c[1];
  }
  return {assertive_ok && others_ok, "improved/decreased/unchanged:" + per};
}

// 6 -------------------------------------------------------------------------
std::size_t code_points(const std::string& s) {
  return static_cast<std::size_t>(std::count_if(s.begin(), s.end(), [](char c) { return (c & 0xC0) != 0x80; }));
}

Outcome reduction_by_category() {
  std::map<SpeechAct, double> sum;
  std::map<SpeechAct, int> n;
  for (const auto& r : fixtures()) {
    const double a = static_cast<double>(code_points(r.original.text));
    const double b = static_cast<double>(code_points(r.propositional.text));
    sum[r.category] += 100.0 * (a - b) / a;
    ++n[r.category];
  }
  auto mean = [&](SpeechAct act) { return sum[act] / n[act]; };
  bool ok = mean(SpeechAct::Assertive) < 2.0;
  std::string per;
  for (SpeechAct act : kAllSpeechActs) per += " " + std::string(to_string(act)) + "=" + fmt(mean(act), 2) + "%";
  for (SpeechAct act : {SpeechAct::Declarative, SpeechAct::Directive, SpeechAct::Expressive, SpeechAct::Indirect}) {
    ok &= mean(act) > mean(SpeechAct::Assertive);
  }
  // The library must agree with the independent count.
  for (const auto& cr : char_reduction_by_category(fixtures())) ok &= std::abs(cr.mean_reduction_pct - mean(cr.category)) < 1e-9;
  return {ok, per.substr(1)};
}

// 7 -------------------------------------------------------------------------
Outcome correlation() {
  const auto c = segment_mean_correlations(fixtures());
  const bool ok = c.all && *c.all >= -0.03 && *c.all <= 0.17;
  auto show = [](const std::optional<double>& v) { return v ? fmt(*v) : std::string("n/a"); };
  return {ok, "r(all 126)=" + show(c.all) + " r(original)=" + show(c.original) + " r(propositional)=" +
                  show(c.propositional)};
}

// 8 -------------------------------------------------------------------------
const char* kVocab[] = {"operator", "spectrum", "auction", "fiber",    "regulator", "broadband", "mobile",
                        "satellite", "tower",   "license", "subscriber", "network", "rural",     "price",
                        "cable",    "coverage", "merger",  "streaming", "quality",  "complaint", "data"};

std::string random_sentence(std::mt19937_64& rng) {
  std::string s;
  const int words = 3 + static_cast<int>(rng() % 8);
  for (int i = 0; i < words; ++i) s += std::string(i ? " " : "") + kVocab[rng() % std::size(kVocab)];
  return s;
}

struct Scored {
  std::string id;
  double score;
};

std::vector<Scored> oracle_scan(const Index& index, const EmbeddingVector& q) {
  std::vector<Scored> all;
  for (const auto& c : index.chunks()) {
    double dot = 0, qq = 0, cc = 0;
    for (std::size_t i = 0; i < c.vector.size(); ++i) {
      dot += q[i] * c.vector[i];
      qq += q[i] * q[i];
      cc += static_cast<double>(c.vector[i]) * c.vector[i];
    }
    all.push_back({c.chunk_id, dot / std::sqrt(qq * cc)});
  }
  std::sort(all.begin(), all.end(), [](const Scored& a, const Scored& b) {
    return a.score != b.score ? a.score > b.score : a.id < b.id;
  });
  return all;
}

bool same_hits(const std::vector<Hit>& got, const std::vector<Scored>& want) {
  if (got.size() != want.size()) return false;
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (std::abs(got[i].score - want[i].score) > 1e-6) return false;
    // Scores equal to the last bit may legitimately order by id only.
    if (got[i].chunk_id != want[i].id && std::abs(got[i].score - want[i].score) > 1e-12) return false;
  }
  return true;
}

Outcome retrieval_oracle() {
  std::mt19937_64 rng(0x5eed);
  int failures = 0;
  std::size_t chunks_seen = 0;
  for (int trial = 0; trial < 100; ++trial) {
    EmbeddingProviderConfig cfg;
    cfg.target_dim = 2 + rng() % 63;
    cfg.native_dim = 64;
    cfg.seed = rng();
    std::vector<Document> docs;
    std::size_t paragraphs = 0;
    const std::size_t budget = 1 + rng() % 500;
    for (int d = 0; docs.size() + paragraphs < budget; ++d) {
      const std::size_t want = std::min<std::size_t>(rng() % 6, budget - docs.size() - paragraphs - 1);
      std::string body;
      for (std::size_t p = 0; p < want; ++p) body += (p ? "\n\n" : "") + random_sentence(rng);
      docs.push_back({"d" + std::to_string(d), std::nullopt, body});
      paragraphs += want;
    }
    const Index index = ingest(docs, cfg);
    chunks_seen += index.size();
    if (index.size() != docs.size() + paragraphs || index.count(Layer::Paragraph) != paragraphs) ++failures;

    auto provider = make_embedding_provider(cfg);
    const auto q = provider->embed(random_sentence(rng));
    const auto scan = oracle_scan(index, q);
    const std::size_t k = 1 + rng() % 40;
    const double t = std::uniform_real_distribution<double>(-0.2, 0.8)(rng);

    std::vector<Scored> topk(scan.begin(), scan.begin() + static_cast<std::ptrdiff_t>(std::min(k, scan.size())));
    std::vector<Scored> thresh;
    std::copy_if(scan.begin(), scan.end(), std::back_inserter(thresh), [&](const Scored& s) { return s.score >= t; });
    std::vector<Scored> both(thresh.begin(), thresh.begin() + static_cast<std::ptrdiff_t>(std::min(k, thresh.size())));

    failures += !same_hits(search(index, q, {SearchPolicy::Mode::TopK, k, t}), topk);
    failures += !same_hits(search(index, q, {SearchPolicy::Mode::Threshold, k, t}), thresh);
    failures += !same_hits(search(index, q, {SearchPolicy::Mode::Both, k, t}), both);
  }
  return {failures == 0, "100 indexes, " + std::to_string(chunks_seen) + " chunks, " + std::to_string(failures) +
                             " mismatches"};
}

// 9 -------------------------------------------------------------------------
Outcome numeric_properties() {
  std::mt19937_64 rng(99);
  std::normal_distribution<double> normal;
  int bad = 0;
  for (int i = 0; i < 2000; ++i) {
    const std::size_t n = 1 + rng() % 128;
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = normal(rng);
    for (auto& x : b) x = normal(rng);
    const double ab = cosine(a, b), ba = cosine(b, a);
    bad += ab != ba || std::abs(ab) > 1 + 1e-9;

    const std::size_t d = 1 + rng() % n;
    const auto t = truncate_renormalize(a, d);
    double norm = 0;
    for (double x : t.values()) norm += x * x;
    bad += std::abs(std::sqrt(norm) - 1) > 1e-9;
    bad += std::abs(cosine(t.values(), std::span<const double>(a.data(), d)) - 1) > 1e-9;

    std::vector<double> scores(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(d));
    const auto st = retrieval_stats(scores);
    long double sum = 0;
    for (double x : scores) sum += x;
    const long double mean = sum / scores.size();
    long double ss = 0;
    for (double x : scores) ss += (x - mean) * (x - mean);
    const double sd = scores.size() > 1 ? static_cast<double>(std::sqrt(ss / (scores.size() - 1))) : 0.0;
    bad += std::abs(st.mean - static_cast<double>(mean)) > 1e-12 || std::abs(st.std - sd) > 1e-12;
    bad += st.min != *std::min_element(scores.begin(), scores.end());
    bad += st.max != *std::max_element(scores.begin(), scores.end());
  }

  EmbeddingProviderConfig cfg;
  const Index index = ingest(load_corpus_jsonl(data("mini_corpus.jsonl")), cfg);
  const auto path = fs::temp_directory_path() / ("propshift-accept-" + std::to_string(::getpid()) + ".psix");
  save_index(index, path);
  const Index loaded = load_index(path);
  fs::remove(path);
  bool exact = loaded.size() == index.size() && loaded.dim() == index.dim();
  for (std::size_t i = 0; exact && i < index.size(); ++i) {
    const auto& x = index.chunks()[i];
    const auto& y = loaded.chunks()[i];
    exact = x.chunk_id == y.chunk_id && x.text == y.text && x.layer == y.layer && x.ordinal == y.ordinal &&
            std::memcmp(x.vector.data(), y.vector.data(), x.vector.size() * sizeof(float)) == 0;
  }
  return {bad == 0 && exact, std::to_string(bad) + " property violations over 2000 cases; index round trip " +
                                 (exact ? "bit-exact" : "DIFFERS")};
}

// 10 ------------------------------------------------------------------------
Outcome end_to_end() {
  const auto dir = fs::temp_directory_path() / ("propshift-e2e-" + std::to_string(::getpid()));
  fs::create_directories(dir);
  const auto ix = (dir / "mini.psix").string();
  auto run = [](std::vector<std::string> args) {
    std::istringstream in;
    std::ostringstream out, err;
    const int code = cli::run(args, in, out, err);
    return std::make_pair(code, out.str());
  };
  const auto ingested = run({"ingest", "--corpus", data("mini_corpus.jsonl").string(), "--index", ix});
  const std::vector<std::string> args = {"--config",  data("demo.ini").string(), "--backend", "rule", "--provider",
                                         "local",     "compare",                 "--queries",
                                         data("sample_queries.csv").string(), "--index", ix, "--format", "md"};
  const auto a = run(args);
  const auto b = run(args);
  fs::remove_all(dir);
  const bool layout = a.second.find("| QID | Query Text | Min | Max | Mean | Std | Segments | Dist. |") != std::string::npos;
  const bool ok = ingested.first == 0 && a.first == 0 && b.first == 0 && a.second == b.second && layout;
  return {ok, std::string(ingested.second.substr(0, ingested.second.size() - 1)) + "; reports " +
                  (a.second == b.second ? "byte-identical" : "DIFFER") + " (" + std::to_string(a.second.size()) +
                  " bytes)"};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_ms;
    std::function<Outcome()> fn;
  };
  const Criterion criteria[] = {
      {1, "golden transformations", 1000, golden_rewrites},
      {2, "classifier accuracy on appendix queries", 1000, classifier_accuracy},
      {3, "rule extraction match rate", 1000, extraction_match},
      {4, "category table reproduction", 1000, category_table},
      {5, "mean-similarity verdicts", 1000, mean_verdicts},
      {6, "character reduction by category", 1000, reduction_by_category},
      {7, "segments vs mean correlation", 1000, correlation},
      {8, "retrieval oracle equivalence", 30000, retrieval_oracle},
      {9, "numeric property suite", 10000, numeric_properties},
      {10, "end-to-end determinism", 5000, end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = ms < c.limit_ms;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("%s  %2d  %-42s %8.1f ms (limit %.0f)  %s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, ms, c.limit_ms,
                o.detail.c_str(), in_time ? "" : " [too slow]");
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed, std::size(criteria));
  return failed == 0 ? 0 : 1;
}
