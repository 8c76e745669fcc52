#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "propshift/corpus.hpp"
#include "propshift/embedding.hpp"
#include "propshift/error.hpp"
#include "propshift/evalkit.hpp"
#include "propshift/extractor.hpp"

namespace propshift {

struct QueryInput {
  int qid = 0;
  std::optional<SpeechAct> category;          // classified when absent
  std::string original_text;
  std::optional<std::string> propositional_text;  // extracted when absent
};

/// CSV with header columns qid, category, original_text and an optional
/// propositional_text; blank category or propositional cells fall back to
/// classification and extraction. Throws SchemaError naming the row.
std::vector<QueryInput> parse_queries_csv(std::string_view text);
std::vector<QueryInput> load_queries_csv(const std::filesystem::path& path);

struct QueryFailure {
  int qid = 0;
  ErrorKind kind = ErrorKind::InvalidConfig;
  std::string message;
};

struct ComparisonRun {
  std::vector<QueryPairRecord> records;  // sorted by qid
  std::vector<QueryFailure> failures;    // sorted by qid
};

struct CompareOptions {
  SearchPolicy policy;
  int jobs = 1;
};

/// Runs both variants of every query through embed and search and records
/// retrieval statistics, layer counts and exclusive-chunk counts. A failing
/// query is reported in `failures` and the rest still run.
ComparisonRun run_comparison(const std::vector<QueryInput>& queries, const Index& index,
                             EmbeddingProvider& provider, Extractor& extractor, const CompareOptions& options);

}  // namespace propshift
