#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "propshift/speechact.hpp"

namespace propshift {

struct RetrievalStats {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double std = 0.0;
  std::size_t segments = 0;

  bool operator==(const RetrievalStats&) const = default;
};

/// Sample standard deviation (n - 1), 0 for a single score. Throws
/// EmptyScores on an empty list.
RetrievalStats retrieval_stats(std::span<const double> scores);

/// (|A \ B|, |B \ A|)
std::pair<std::size_t, std::size_t> distinct_segments(const std::set<std::string>& a,
                                                      const std::set<std::string>& b);

enum class Verdict { Improved, Decreased, Unchanged };

std::string_view to_string(Verdict verdict);

inline constexpr double kDefaultEpsilon = 1e-4;

struct ComparisonOutcome {
  int qid = 0;
  double delta_mean = 0.0;
  Verdict verdict = Verdict::Unchanged;
};

/// delta_mean = prop.mean - orig.mean; Unchanged when |delta| <= epsilon.
ComparisonOutcome compare_query(const RetrievalStats& orig, const RetrievalStats& prop,
                                double epsilon = kDefaultEpsilon, int qid = 0);

struct LayerCounts {
  std::size_t full_text = 0;
  std::size_t paragraph = 0;

  bool operator==(const LayerCounts&) const = default;
};

struct VariantRecord {
  std::string text;
  std::optional<RetrievalStats> stats;  // empty when nothing was retrieved
  std::size_t distinct = 0;
  std::optional<LayerCounts> layers;    // known only for live retrieval runs

  bool operator==(const VariantRecord&) const = default;
};

struct QueryPairRecord {
  int qid = 0;
  SpeechAct category = SpeechAct::Assertive;
  VariantRecord original;
  VariantRecord propositional;

  bool operator==(const QueryPairRecord&) const = default;
};

struct VariantAggregate {
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;        // segment-weighted
  double macro_mean = 0.0;  // unweighted mean of per-query means
  std::size_t queries = 0;
  std::size_t segments = 0;
};

struct CategoryStats {
  SpeechAct category = SpeechAct::Assertive;
  VariantAggregate original;
  VariantAggregate propositional;
};

/// Min of mins, max of maxes, and the segment-weighted mean of per-query
/// means for each variant. Rows without stats are skipped. Throws
/// NoRowsForCategory when no row of the category carries stats.
CategoryStats aggregate_category(std::span<const QueryPairRecord> rows, SpeechAct category);

/// Sample Pearson coefficient. Throws LengthMismatch (including fewer than
/// two points) and ZeroVariance.
double pearson(std::span<const double> x, std::span<const double> y);

struct CategoryReduction {
  SpeechAct category = SpeechAct::Assertive;
  double mean_reduction_pct = 0.0;
  std::size_t queries = 0;
};

/// Mean character reduction per category, in category table order, for the
/// categories present in rows.
std::vector<CategoryReduction> char_reduction_by_category(std::span<const QueryPairRecord> rows);

/// Pearson r between segment count and mean similarity. Each entry is empty
/// when the row set has fewer than two points or no variance.
struct SegmentCorrelations {
  std::optional<double> original;
  std::optional<double> propositional;
  std::optional<double> all;
  std::size_t original_rows = 0;
  std::size_t propositional_rows = 0;
};

SegmentCorrelations segment_mean_correlations(std::span<const QueryPairRecord> rows);

/// Fixture CSV with columns qid, category, variant, query_text, min, max,
/// mean, std, segments, distinct; one original and one propositional row per
/// qid. Throws SchemaError naming the 1-based row.
std::vector<QueryPairRecord> parse_fixtures(std::string_view text);
std::vector<QueryPairRecord> load_fixtures(const std::filesystem::path& path);

}  // namespace propshift
