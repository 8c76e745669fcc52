#include "propshift/report.hpp"

#include <json.hpp>

#include <array>
#include <charconv>
#include <cstdio>
#include <map>
#include <sstream>

#include "propshift/csv.hpp"
#include "propshift/error.hpp"

namespace propshift {

using json = nlohmann::ordered_json;

namespace {

constexpr std::string_view kMarkdownHeader =
    "| QID | Query Text | Min | Max | Mean | Std | Segments | Dist. |\n"
    "|---:|---|---:|---:|---:|---:|---:|---:|\n";

std::string md_cell(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

std::string md_row(std::string_view qid, const VariantRecord& v) {
  std::string row = "| " + std::string(qid) + " | " + md_cell(v.text) + " | ";
  if (v.stats) {
    row += format_fixed(v.stats->min) + " | " + format_fixed(v.stats->max) + " | " + format_fixed(v.stats->mean) +
           " | " + format_fixed(v.stats->std) + " | " + std::to_string(v.stats->segments);
  } else {
    row += "- | - | - | - | 0";
  }
  return row + " | " + std::to_string(v.distinct) + " |\n";
}

json variant_json(const VariantRecord& v) {
  json j;
  j["text"] = v.text;
  if (v.stats) {
    j["min"] = v.stats->min;
    j["max"] = v.stats->max;
    j["mean"] = v.stats->mean;
    j["std"] = v.stats->std;
    j["segments"] = v.stats->segments;
  } else {
    j["segments"] = 0;
  }
  j["distinct"] = v.distinct;
  if (v.layers) {
    j["full_text"] = v.layers->full_text;
    j["paragraph"] = v.layers->paragraph;
  }
  return j;
}

csv::Row csv_row(const QueryPairRecord& r, std::string_view variant, const VariantRecord& v) {
  csv::Row row = {std::to_string(r.qid), std::string(to_string(r.category)), std::string(variant), v.text};
  if (v.stats) {
    for (double x : {v.stats->min, v.stats->max, v.stats->mean, v.stats->std}) row.push_back(format_exact(x));
    row.push_back(std::to_string(v.stats->segments));
  } else {
    row.insert(row.end(), {"", "", "", "", "0"});
  }
  row.push_back(std::to_string(v.distinct));
  return row;
}

std::optional<ComparisonOutcome> outcome(const QueryPairRecord& r, double epsilon) {
  if (!r.original.stats || !r.propositional.stats) return std::nullopt;
  return compare_query(*r.original.stats, *r.propositional.stats, epsilon, r.qid);
}

std::string opt_fixed(const std::optional<double>& v) { return v ? format_fixed(*v) : std::string("n/a"); }

std::string describe_variant(std::string_view label, const VariantRecord& v) {
  std::string out = std::string(label) + " retrieved ";
  if (!v.stats) return out + "no chunks";
  const std::size_t n = v.stats->segments;
  out += std::to_string(n) + (n == 1 ? " chunk" : " chunks");
  if (v.layers) {
    const auto& l = *v.layers;
    out += " (" + std::to_string(l.paragraph) + (l.paragraph == 1 ? " paragraph" : " paragraphs") + " and " +
           std::to_string(l.full_text) + " full text)";
  }
  return out + " with similarity " + format_fixed(v.stats->min) + " to " + format_fixed(v.stats->max) +
         ", mean " + format_fixed(v.stats->mean);
}

}  // namespace

std::string format_exact(double value) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

std::string format_fixed(double value, int decimals) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), "%.*f", decimals, value);
  std::string s(buf.data());
  if (s.starts_with("-") && s.find_first_not_of("-0.") == std::string::npos) s.erase(0, 1);
  return s;
}

std::string_view to_string(ReportFormat format) {
  switch (format) {
    case ReportFormat::JsonLines: return "jsonl";
    case ReportFormat::Csv: return "csv";
    case ReportFormat::MarkdownTables: return "md";
  }
  return "md";
}

std::optional<ReportFormat> parse_report_format(std::string_view name) {
  if (name == "jsonl") return ReportFormat::JsonLines;
  if (name == "csv") return ReportFormat::Csv;
  if (name == "md" || name == "markdown") return ReportFormat::MarkdownTables;
  return std::nullopt;
}

std::string emit_report(std::span<const QueryPairRecord> records, ReportFormat format, double epsilon) {
  std::string out;
  switch (format) {
    case ReportFormat::JsonLines:
      for (const auto& r : records) {
        json j;
        j["qid"] = r.qid;
        j["category"] = to_string(r.category);
        j["original"] = variant_json(r.original);
        j["propositional"] = variant_json(r.propositional);
        if (auto o = outcome(r, epsilon)) {
          j["delta_mean"] = o->delta_mean;
          j["verdict"] = to_string(o->verdict);
        }
        out += j.dump() + "\n";
      }
      return out;

    case ReportFormat::Csv:
      out = "qid,category,variant,query_text,min,max,mean,std,segments,distinct\n";
      for (const auto& r : records) {
        out += csv::join(csv_row(r, "original", r.original)) + "\n";
        out += csv::join(csv_row(r, "propositional", r.propositional)) + "\n";
      }
      return out;

    case ReportFormat::MarkdownTables:
      if (records.empty()) return std::string(kMarkdownHeader);
      for (SpeechAct act : kAllSpeechActs) {
        bool any = false;
        for (const auto& r : records) {
          if (r.category != act) continue;
          if (!any) {
            if (!out.empty()) out += "\n";
            out += "### " + std::string(to_string(act)) + "\n\n" + std::string(kMarkdownHeader);
            any = true;
          }
          out += md_row(std::to_string(r.qid), r.original);
          out += md_row("", r.propositional);
        }
      }
      return out;
  }
  return out;
}

std::string emit_summary(std::span<const QueryPairRecord> records, double epsilon) {
  std::ostringstream out;
  out << "## Similarity by speech act\n\n"
      << "| Speech Act | Orig Min | Orig Max | Orig Mean | Prop Min | Prop Max | Prop Mean | Orig Macro | Prop Macro |\n"
      << "|---|---:|---:|---:|---:|---:|---:|---:|---:|\n";
  for (SpeechAct act : kAllSpeechActs) {
    CategoryStats cs;
    try {
      cs = aggregate_category(records, act);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::NoRowsForCategory) continue;
      throw;
    }
    auto cells = [](const VariantAggregate& a) {
      if (a.queries == 0) return std::string("- | - | -");
      return format_fixed(a.min) + " | " + format_fixed(a.max) + " | " + format_fixed(a.mean);
    };
    auto macro = [](const VariantAggregate& a) { return a.queries ? format_fixed(a.macro_mean) : std::string("-"); };
    out << "| " << to_string(act) << " | " << cells(cs.original) << " | " << cells(cs.propositional) << " | "
        << macro(cs.original) << " | " << macro(cs.propositional) << " |\n";
  }

  out << "\n## Verdicts (epsilon " << format_exact(epsilon) << ")\n\n"
      << "| Speech Act | Improved | Decreased | Unchanged |\n|---|---:|---:|---:|\n";
  for (SpeechAct act : kAllSpeechActs) {
    std::array<int, 3> counts{};
    bool any = false;
    for (const auto& r : records) {
      if (r.category != act) continue;
      if (auto o = outcome(r, epsilon)) {
        ++counts[static_cast<std::size_t>(o->verdict)];
        any = true;
      }
    }
    if (any) out << "| " << to_string(act) << " | " << counts[0] << " | " << counts[1] << " | " << counts[2] << " |\n";
  }

  out << "\n## Character reduction\n\n| Speech Act | Mean Reduction % |\n|---|---:|\n";
  for (const auto& cr : char_reduction_by_category(records)) {
    out << "| " << to_string(cr.category) << " | " << format_fixed(cr.mean_reduction_pct, 2) << " |\n";
  }

  const auto corr = segment_mean_correlations(records);
  out << "\n## Segments vs mean similarity (Pearson r)\n\n| Rows | n | r |\n|---|---:|---:|\n"
      << "| original | " << corr.original_rows << " | " << opt_fixed(corr.original) << " |\n"
      << "| propositional | " << corr.propositional_rows << " | " << opt_fixed(corr.propositional) << " |\n"
      << "| all | " << corr.original_rows + corr.propositional_rows << " | " << opt_fixed(corr.all) << " |\n";
  return out.str();
}

std::string reduction_plot_csv(std::span<const QueryPairRecord> records) {
  std::string out = "category,mean_reduction_pct\n";
  for (const auto& cr : char_reduction_by_category(records)) {
    out += std::string(to_string(cr.category)) + "," + format_exact(cr.mean_reduction_pct) + "\n";
  }
  return out;
}

std::string verdict_plot_csv(std::span<const QueryPairRecord> records, double epsilon) {
  std::string out = "qid,category,mean_orig,mean_prop,verdict\n";
  for (const auto& r : records) {
    auto o = outcome(r, epsilon);
    if (!o) continue;
    out += std::to_string(r.qid) + "," + std::string(to_string(r.category)) + "," +
           format_exact(r.original.stats->mean) + "," + format_exact(r.propositional.stats->mean) + "," +
           std::string(to_string(o->verdict)) + "\n";
  }
  return out;
}

std::string narrative(const QueryPairRecord& record) {
  std::string out = "QID " + std::to_string(record.qid) + " (" + std::string(to_string(record.category)) + "): ";
  out += describe_variant("the original query", record.original) + "; ";
  out += describe_variant("the propositional query", record.propositional) + ". ";
  out += std::to_string(record.original.distinct) + " original and " + std::to_string(record.propositional.distinct) +
         " propositional chunks were exclusive to one variant.";
  if (auto o = outcome(record, kDefaultEpsilon)) {
    out += " Verdict: " + std::string(to_string(o->verdict)) + " (delta " + format_fixed(o->delta_mean) + ").";
  }
  return out + "\n";
}

}  // namespace propshift
