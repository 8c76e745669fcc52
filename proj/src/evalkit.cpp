#include "propshift/evalkit.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "propshift/csv.hpp"
#include "propshift/error.hpp"
#include "propshift/text.hpp"

namespace propshift {

namespace {

const std::vector<std::string> kFixtureHeader = {"qid", "category", "variant", "query_text", "min",
                                                 "max", "mean",     "std",     "segments",   "distinct"};

template <class T>
T parse_number(const std::string& field, std::size_t row, std::string_view column) {
  T value{};
  const std::string s = trim(field);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::SchemaError, "fixture row " + std::to_string(row) + ": bad " +
                                            std::string(column) + " '" + field + "'");
  }
  return value;
}

void accumulate(VariantAggregate& agg, const RetrievalStats& s, double& weighted, double& plain) {
  if (agg.queries == 0) {
    agg.min = s.min;
    agg.max = s.max;
  } else {
    agg.min = std::min(agg.min, s.min);
    agg.max = std::max(agg.max, s.max);
  }
  ++agg.queries;
  agg.segments += s.segments;
  weighted += s.mean * static_cast<double>(s.segments);
  plain += s.mean;
}

std::optional<double> try_pearson(const std::vector<double>& x, const std::vector<double>& y) {
  try {
    return pearson(x, y);
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace

RetrievalStats retrieval_stats(std::span<const double> scores) {
  if (scores.empty()) throw Error(ErrorKind::EmptyScores, "no scores to summarize");
  RetrievalStats s;
  s.segments = scores.size();
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  s.min = *lo;
  s.max = *hi;
  double sum = 0.0;
  for (double v : scores) sum += v;
  s.mean = sum / static_cast<double>(scores.size());
  // Rounding can push the mean a hair outside a constant list's range.
  s.mean = std::clamp(s.mean, s.min, s.max);
  if (scores.size() > 1) {
    double ss = 0.0;
    for (double v : scores) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(scores.size() - 1));
  }
  return s;
}

std::pair<std::size_t, std::size_t> distinct_segments(const std::set<std::string>& a,
                                                      const std::set<std::string>& b) {
  std::size_t only_a = 0;
  for (const auto& id : a) only_a += b.count(id) == 0;
  std::size_t only_b = 0;
  for (const auto& id : b) only_b += a.count(id) == 0;
  return {only_a, only_b};
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Improved: return "Improved";
    case Verdict::Decreased: return "Decreased";
    case Verdict::Unchanged: return "Unchanged";
  }
  return "Unchanged";
}

ComparisonOutcome compare_query(const RetrievalStats& orig, const RetrievalStats& prop, double epsilon, int qid) {
  ComparisonOutcome out;
  out.qid = qid;
  out.delta_mean = prop.mean - orig.mean;
  if (std::abs(out.delta_mean) <= epsilon) {
    out.verdict = Verdict::Unchanged;
  } else {
    out.verdict = out.delta_mean > 0 ? Verdict::Improved : Verdict::Decreased;
  }
  return out;
}

CategoryStats aggregate_category(std::span<const QueryPairRecord> rows, SpeechAct category) {
  CategoryStats out;
  out.category = category;
  double ow = 0, op = 0, pw = 0, pp = 0;
  for (const auto& r : rows) {
    if (r.category != category) continue;
    if (r.original.stats) accumulate(out.original, *r.original.stats, ow, op);
    if (r.propositional.stats) accumulate(out.propositional, *r.propositional.stats, pw, pp);
  }
  if (out.original.queries == 0 && out.propositional.queries == 0) {
    throw Error(ErrorKind::NoRowsForCategory, std::string(to_string(category)));
  }
  auto finish = [](VariantAggregate& a, double weighted, double plain) {
    if (a.queries == 0) return;
    a.macro_mean = plain / static_cast<double>(a.queries);
    a.mean = a.segments > 0 ? weighted / static_cast<double>(a.segments) : a.macro_mean;
  };
  finish(out.original, ow, op);
  finish(out.propositional, pw, pp);
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorKind::LengthMismatch, std::to_string(x.size()) + " vs " + std::to_string(y.size()));
  }
  if (x.size() < 2) throw Error(ErrorKind::LengthMismatch, "need at least two points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorKind::ZeroVariance, "constant input");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<CategoryReduction> char_reduction_by_category(std::span<const QueryPairRecord> rows) {
  std::vector<CategoryReduction> out;
  for (SpeechAct act : kAllSpeechActs) {
    CategoryReduction cr;
    cr.category = act;
    double sum = 0.0;
    for (const auto& r : rows) {
      if (r.category != act) continue;
      sum += char_reduction(r.original.text, r.propositional.text);
      ++cr.queries;
    }
    if (cr.queries == 0) continue;
    cr.mean_reduction_pct = sum / static_cast<double>(cr.queries);
    out.push_back(cr);
  }
  return out;
}

SegmentCorrelations segment_mean_correlations(std::span<const QueryPairRecord> rows) {
  std::vector<double> os, om, ps, pm, as, am;
  for (const auto& r : rows) {
    if (const auto& s = r.original.stats) {
      os.push_back(static_cast<double>(s->segments));
      om.push_back(s->mean);
    }
    if (const auto& s = r.propositional.stats) {
      ps.push_back(static_cast<double>(s->segments));
      pm.push_back(s->mean);
    }
  }
  as = os;
  as.insert(as.end(), ps.begin(), ps.end());
  am = om;
  am.insert(am.end(), pm.begin(), pm.end());
  SegmentCorrelations c;
  c.original = try_pearson(os, om);
  c.propositional = try_pearson(ps, pm);
  c.all = try_pearson(as, am);
  c.original_rows = os.size();
  c.propositional_rows = ps.size();
  return c;
}

std::vector<QueryPairRecord> parse_fixtures(std::string_view text) {
  const auto rows = csv::parse(text);
  if (rows.empty()) throw Error(ErrorKind::SchemaError, "fixture file is empty");
  if (rows[0] != kFixtureHeader) throw Error(ErrorKind::SchemaError, "fixture row 1: unexpected header");

  std::map<int, QueryPairRecord> by_qid;
  std::map<int, int> seen;  // bit 1 original, bit 2 propositional
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& row = rows[i];
    const std::size_t row_no = i + 1;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorKind::SchemaError, "fixture row " + std::to_string(row_no) + ": " + what);
    };
    if (row.size() == 1 && trim(row[0]).empty()) continue;
    if (row.size() != kFixtureHeader.size()) {
      fail("expected " + std::to_string(kFixtureHeader.size()) + " fields, got " + std::to_string(row.size()));
    }
    const int qid = parse_number<int>(row[0], row_no, "qid");
    const auto category = parse_speech_act(row[1]);
    if (!category) fail("unknown category '" + row[1] + "'");
    const std::string variant = to_lower_ascii(trim(row[2]));
    int bit = 0;
    if (variant == "original") bit = 1;
    else if (variant == "propositional") bit = 2;
    else fail("unknown variant '" + row[2] + "'");

    VariantRecord v;
    v.text = row[3];
    if (trim(v.text).empty()) fail("empty query_text");
    const bool no_stats = std::all_of(row.begin() + 4, row.begin() + 8, [](const auto& f) { return trim(f).empty(); });
    if (!no_stats) {
      RetrievalStats s;
      s.min = parse_number<double>(row[4], row_no, "min");
      s.max = parse_number<double>(row[5], row_no, "max");
      s.mean = parse_number<double>(row[6], row_no, "mean");
      s.std = parse_number<double>(row[7], row_no, "std");
      s.segments = parse_number<std::size_t>(row[8], row_no, "segments");
      if (!(s.min <= s.mean && s.mean <= s.max) || s.std < 0) fail("inconsistent statistics");
      v.stats = s;
    }
    v.distinct = parse_number<std::size_t>(row[9], row_no, "distinct");
    if (v.distinct > (v.stats ? v.stats->segments : 0)) fail("distinct exceeds segments");

    int& mask = seen[qid];
    if (mask & bit) fail("duplicate " + variant + " row for qid " + std::to_string(qid));
    auto& rec = by_qid[qid];
    if (mask != 0 && rec.category != *category) fail("category differs between variants of qid " + std::to_string(qid));
    mask |= bit;
    rec.qid = qid;
    rec.category = *category;
    (bit == 1 ? rec.original : rec.propositional) = std::move(v);
  }

  std::vector<QueryPairRecord> out;
  for (auto& [qid, rec] : by_qid) {
    if (seen[qid] != 3) {
      throw Error(ErrorKind::SchemaError, "qid " + std::to_string(qid) + " lacks an original or propositional row");
    }
    out.push_back(std::move(rec));
  }
  return out;
}

std::vector<QueryPairRecord> load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read fixtures " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fixtures(buf.str());
}

}  // namespace propshift
