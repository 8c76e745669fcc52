#include "propshift/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "propshift/csv.hpp"
#include "propshift/text.hpp"

namespace propshift {

namespace {

struct Retrieval {
  VariantRecord variant;
  std::set<std::string> ids;
};

Retrieval retrieve(std::string_view text, const Index& index, EmbeddingProvider& provider,
                   const SearchPolicy& policy) {
  Retrieval r;
  r.variant.text = std::string(text);
  const auto hits = search(index, provider.embed(text), policy);
  std::vector<double> scores;
  LayerCounts layers;
  for (const auto& h : hits) {
    scores.push_back(h.score);
    r.ids.insert(h.chunk_id);
    ++(h.layer == Layer::FullText ? layers.full_text : layers.paragraph);
  }
  if (!scores.empty()) r.variant.stats = retrieval_stats(scores);
  r.variant.layers = layers;
  return r;
}

QueryPairRecord compare_one(const QueryInput& q, const Index& index, EmbeddingProvider& provider,
                            Extractor& extractor, const SearchPolicy& policy) {
  const Utterance u(q.original_text);
  QueryPairRecord rec;
  rec.qid = q.qid;
  rec.category = q.category ? *q.category : classify(u);
  const std::string prop = q.propositional_text ? *q.propositional_text : extractor.extract(u).text;

  auto a = retrieve(q.original_text, index, provider, policy);
  auto b = retrieve(prop, index, provider, policy);
  const auto [da, db] = distinct_segments(a.ids, b.ids);
  a.variant.distinct = da;
  b.variant.distinct = db;
  rec.original = std::move(a.variant);
  rec.propositional = std::move(b.variant);
  return rec;
}

}  // namespace

std::vector<QueryInput> parse_queries_csv(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorKind::SchemaError, "query file is empty");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].size(); ++i) col[to_lower_ascii(trim(rows[0][i]))] = i;
  for (const char* required : {"qid", "original_text"}) {
    if (!col.count(required)) {
      throw Error(ErrorKind::SchemaError, std::string("query row 1: missing column ") + required);
    }
  }
  auto cell = [&](const csv::Row& row, const char* name) -> std::string {
    auto it = col.find(name);
    if (it == col.end() || it->second >= row.size()) return {};
    return trim(row[it->second]);
  };

  std::vector<QueryInput> out;
  std::set<int> seen;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    const std::string where = "query row " + std::to_string(i + 1) + ": ";
    QueryInput q;
    const std::string qid = cell(row, "qid");
    const auto [ptr, ec] = std::from_chars(qid.data(), qid.data() + qid.size(), q.qid);
    if (qid.empty() || ec != std::errc() || ptr != qid.data() + qid.size()) {
      throw Error(ErrorKind::SchemaError, where + "bad qid '" + qid + "'");
    }
    if (!seen.insert(q.qid).second) throw Error(ErrorKind::SchemaError, where + "duplicate qid " + qid);
    if (const std::string c = cell(row, "category"); !c.empty()) {
      q.category = parse_speech_act(c);
      if (!q.category) throw Error(ErrorKind::SchemaError, where + "unknown category '" + c + "'");
    }
    q.original_text = cell(row, "original_text");
    if (q.original_text.empty()) throw Error(ErrorKind::SchemaError, where + "empty original_text");
    if (std::string p = cell(row, "propositional_text"); !p.empty()) q.propositional_text = std::move(p);
    out.push_back(std::move(q));
  }
  if (out.empty()) throw Error(ErrorKind::SchemaError, "query file has no queries");
  return out;
}

std::vector<QueryInput> load_queries_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read queries " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_queries_csv(buf.str());
}

ComparisonRun run_comparison(const std::vector<QueryInput>& queries, const Index& index,
                             EmbeddingProvider& provider, Extractor& extractor, const CompareOptions& options) {
  options.policy.validate();
  if (options.jobs < 1) throw Error(ErrorKind::InvalidConfig, "jobs must be >= 1");

  std::vector<std::optional<QueryPairRecord>> slots(queries.size());
  std::vector<std::optional<QueryFailure>> errors(queries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      try {
        slots[i] = compare_one(queries[i], index, provider, extractor, options.policy);
      } catch (const Error& e) {
        errors[i] = QueryFailure{queries[i].qid, e.kind(), e.detail()};
      }
    }
  };
  const std::size_t n = std::min<std::size_t>(static_cast<std::size_t>(options.jobs), queries.size());
  if (n <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < n; ++t) pool.emplace_back(worker);
  }

  ComparisonRun run;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    if (slots[i]) run.records.push_back(std::move(*slots[i]));
    if (errors[i]) run.failures.push_back(std::move(*errors[i]));
  }
  std::stable_sort(run.records.begin(), run.records.end(), [](const auto& a, const auto& b) { return a.qid < b.qid; });
  std::stable_sort(run.failures.begin(), run.failures.end(), [](const auto& a, const auto& b) { return a.qid < b.qid; });
  return run;
}

}  // namespace propshift
