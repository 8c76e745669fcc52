#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "propshift/evalkit.hpp"

namespace propshift {

enum class ReportFormat { JsonLines, Csv, MarkdownTables };

std::string_view to_string(ReportFormat format);
/// Accepts "jsonl", "csv" and "md".
std::optional<ReportFormat> parse_report_format(std::string_view name);

/// Per-query records. Csv uses the fixture schema and round-trips through
/// parse_fixtures; MarkdownTables mirrors the appendix layout with two rows
/// per query, grouped by category. Output order follows the input order.
std::string emit_report(std::span<const QueryPairRecord> records, ReportFormat format,
                        double epsilon = kDefaultEpsilon);

/// Category aggregates, verdict counts, character reduction and the three
/// segment/mean correlations, as Markdown.
std::string emit_summary(std::span<const QueryPairRecord> records, double epsilon = kDefaultEpsilon);

/// Plot-ready tables: category,mean_reduction_pct
std::string reduction_plot_csv(std::span<const QueryPairRecord> records);
/// qid,category,mean_orig,mean_prop,verdict
std::string verdict_plot_csv(std::span<const QueryPairRecord> records, double epsilon = kDefaultEpsilon);

/// One paragraph per query describing chunk counts by layer and score range.
std::string narrative(const QueryPairRecord& record);

/// Shortest decimal text that parses back to the same double.
std::string format_exact(double value);
std::string format_fixed(double value, int decimals = 4);

}  // namespace propshift
