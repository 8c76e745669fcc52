#include "propshift/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "propshift/corpus.hpp"
#include "propshift/error.hpp"
#include "propshift/evalkit.hpp"
#include "propshift/extractor.hpp"
#include "propshift/pipeline.hpp"
#include "propshift/report.hpp"
#include "propshift/speechact.hpp"
#include "propshift/text.hpp"

#ifndef PROPSHIFT_DATA_DIR
#define PROPSHIFT_DATA_DIR "data"
#endif

namespace propshift::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

struct Settings {
  // embedding
  std::string provider = "local";
  std::size_t dim = 256;
  std::size_t native_dim = 3072;
  std::uint64_t seed = 0;
  std::string embedding_endpoint = EmbeddingProviderConfig{}.endpoint_url;
  std::string embedding_model = EmbeddingProviderConfig{}.model_name;
  // extraction
  std::string backend = "rule";
  std::string llm_endpoint = ExtractorConfig{}.endpoint_url;
  std::string llm_model = ExtractorConfig{}.model_name;
  std::string cache;
  // remote knobs shared by both services
  double timeout = 30.0;
  int retries = 2;
  int max_in_flight = 4;
  // retrieval and evaluation
  std::string mode = "both";
  std::size_t k = 32;
  double min_similarity = 0.50;
  double epsilon = kDefaultEpsilon;
  int jobs = 1;

  // subcommand arguments
  std::string input;
  std::string corpus;
  std::string index;
  std::string queries;
  std::string query;
  std::string output;
  std::string plots;
  std::string fixtures_path = std::string(PROPSHIFT_DATA_DIR) + "/appendix_queries.csv";
  std::string format = "md";
  bool trace = false;
  bool fixtures = false;
  bool summary = false;
  bool narrative = false;
};

Error usage(const std::string& message) { return Error(ErrorKind::InvalidConfig, message); }

EmbeddingProviderConfig embedding_config(const Settings& s) {
  EmbeddingProviderConfig cfg;
  auto kind = parse_embedding_provider(s.provider);
  if (!kind) throw usage("unknown embedding provider '" + s.provider + "'");
  cfg.provider = *kind;
  cfg.target_dim = s.dim;
  cfg.native_dim = s.native_dim;
  cfg.seed = s.seed;
  cfg.endpoint_url = s.embedding_endpoint;
  cfg.model_name = s.embedding_model;
  cfg.timeout = std::chrono::duration<double>(s.timeout);
  cfg.max_retries = s.retries;
  cfg.max_in_flight = s.max_in_flight;
  cfg.validate();
  return cfg;
}

ExtractorConfig extractor_config(const Settings& s) {
  ExtractorConfig cfg;
  auto backend = parse_extractor_backend(s.backend);
  if (!backend) throw usage("unknown backend '" + s.backend + "'");
  cfg.backend = *backend;
  cfg.endpoint_url = s.llm_endpoint;
  cfg.model_name = s.llm_model;
  cfg.timeout = std::chrono::duration<double>(s.timeout);
  cfg.max_retries = s.retries;
  cfg.max_in_flight = s.max_in_flight;
  if (!s.cache.empty()) cfg.cache_path = s.cache;
  cfg.validate();
  return cfg;
}

SearchPolicy search_policy(const Settings& s) {
  SearchPolicy p;
  auto mode = parse_search_mode(s.mode);
  if (!mode) throw usage("unknown search mode '" + s.mode + "'");
  p.mode = *mode;
  p.k = s.k;
  p.min_similarity = s.min_similarity;
  p.validate();
  return p;
}

ReportFormat report_format(const Settings& s) {
  auto f = parse_report_format(s.format);
  if (!f) throw usage("unknown format '" + s.format + "'");
  return *f;
}

std::vector<std::string> read_lines(const Settings& s, std::istream& in) {
  std::ifstream file;
  std::istream* src = &in;
  if (!s.input.empty() && s.input != "-") {
    file.open(s.input, std::ios::binary);
    if (!file) throw Error(ErrorKind::IoError, "cannot read " + s.input);
    src = &file;
  }
  std::vector<std::string> lines;
  for (std::string line; std::getline(*src, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

void write_output(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.output.empty() || s.output == "-") {
    out << text;
    return;
  }
  std::ofstream file(s.output, std::ios::binary | std::ios::trunc);
  if (!file) throw Error(ErrorKind::IoError, "cannot write " + s.output);
  file << text;
}

void write_plots(const Settings& s, std::span<const QueryPairRecord> records) {
  if (s.plots.empty()) return;
  std::error_code ec;
  fs::create_directories(s.plots, ec);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream f(fs::path(s.plots) / name, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorKind::IoError, "cannot write plot data in " + s.plots);
    f << text;
  };
  put("char_reduction.csv", reduction_plot_csv(records));
  put("mean_similarity.csv", verdict_plot_csv(records, s.epsilon));
}

std::string render(const Settings& s, std::span<const QueryPairRecord> records, bool with_narrative) {
  const ReportFormat fmt = report_format(s);
  std::string text = emit_report(records, fmt, s.epsilon);
  if (fmt != ReportFormat::MarkdownTables) return text;
  if (s.summary) text += "\n" + emit_summary(records, s.epsilon);
  if (with_narrative && !records.empty()) {
    text += "\n## Per-query retrieval\n\n";
    for (const auto& r : records) text += narrative(r);
  }
  return text;
}

int cmd_classify(const Settings& s, std::istream& in, std::ostream& out) {
  for (const auto& line : read_lines(s, in)) {
    out << to_string(classify(Utterance(line))) << '\t' << line << '\n';
  }
  return kExitOk;
}

int cmd_extract(const Settings& s, std::istream& in, std::ostream& out) {
  const auto lines = read_lines(s, in);
  Extractor extractor(extractor_config(s));
  std::vector<Utterance> utterances(lines.begin(), lines.end());
  const auto props = extractor.extract_all(utterances);
  for (std::size_t i = 0; i < props.size(); ++i) {
    const auto& p = props[i];
    if (!s.trace) {
      out << p.text << '\n';
      continue;
    }
    json j;
    j["input"] = lines[i];
    j["category"] = to_string(p.source_category);
    j["proposition"] = p.text;
    j["matched_frames"] = json::array();
    for (const auto& f : p.trace.matched_frames) j["matched_frames"].push_back({{"lexicon", f.lexicon}, {"span", f.span}});
    j["transforms"] = p.trace.transforms_applied;
    out << j.dump() << '\n';
  }
  return kExitOk;
}

int cmd_ingest(const Settings& s, std::ostream& out) {
  const auto docs = load_corpus_jsonl(s.corpus);
  const Index index = ingest(docs, embedding_config(s));
  save_index(index, s.index);
  out << "docs=" << index.count(Layer::FullText) << " paragraphs=" << index.count(Layer::Paragraph)
      << " chunks=" << index.size() << '\n';
  return kExitOk;
}

int cmd_search(const Settings& s, std::ostream& out) {
  const ReportFormat fmt = report_format(s);
  const Index index = load_index(s.index);
  auto provider = make_embedding_provider(embedding_config(s));
  const auto hits = search(index, provider->embed(s.query), search_policy(s));
  std::string text;
  switch (fmt) {
    case ReportFormat::Csv:
      text = "chunk_id,layer,score\n";
      for (const auto& h : hits) text += h.chunk_id + "," + std::string(to_string(h.layer)) + "," + format_exact(h.score) + "\n";
      break;
    case ReportFormat::JsonLines:
      for (const auto& h : hits) {
        json j{{"chunk_id", h.chunk_id}, {"layer", to_string(h.layer)}, {"score", h.score}};
        text += j.dump() + "\n";
      }
      break;
    case ReportFormat::MarkdownTables:
      text = "| Chunk | Layer | Score |\n|---|---|---:|\n";
      for (const auto& h : hits) text += "| " + h.chunk_id + " | " + std::string(to_string(h.layer)) + " | " + format_fixed(h.score) + " |\n";
      break;
  }
  write_output(s, text, out);
  return kExitOk;
}

int cmd_compare(const Settings& s, std::ostream& out, std::ostream& err) {
  report_format(s);
  if (s.fixtures) {
    const auto records = load_fixtures(s.fixtures_path);
    write_output(s, render(s, records, false), out);
    write_plots(s, records);
    return kExitOk;
  }
  if (s.queries.empty() || s.index.empty()) throw usage("compare needs --queries and --index, or --fixtures");
  const auto queries = load_queries_csv(s.queries);
  const Index index = load_index(s.index);
  auto provider = make_embedding_provider(embedding_config(s));
  Extractor extractor(extractor_config(s));
  CompareOptions opts;
  opts.policy = search_policy(s);
  opts.jobs = s.jobs;
  const auto run = run_comparison(queries, index, *provider, extractor, opts);
  write_output(s, render(s, run.records, true), out);
  write_plots(s, run.records);

  int code = kExitOk;
  for (const auto& f : run.failures) {
    err << "qid " << f.qid << ": " << to_string(f.kind) << ": " << f.message << '\n';
    code = std::max(code, is_service_error(f.kind) ? kExitService : kExitInput);
  }
  return code;
}

int cmd_report(const Settings& s, std::ostream& out) {
  const auto records = load_fixtures(s.input);
  std::string text = render(s, records, false);
  if (s.narrative) {
    text += "\n";
    for (const auto& r : records) text += narrative(r);
  }
  write_output(s, text, out);
  write_plots(s, records);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  Settings s;
  CLI::App app{"Propositional query rewriting and retrieval comparison", "propshift"};
  app.fallthrough();
  app.require_subcommand(1);
  app.config_formatter(std::make_shared<CLI::ConfigINI>());
  app.set_config("--config", "", "Read options from a key = value file");

  app.add_option("--provider", s.provider, "Embedding provider: local or remote")->capture_default_str();
  app.add_option("--dim", s.dim, "Embedding dimension after truncation")->capture_default_str();
  app.add_option("--native-dim", s.native_dim, "Native embedding dimension")->capture_default_str();
  app.add_option("--seed", s.seed, "Seed for the local provider")->capture_default_str();
  app.add_option("--embedding-endpoint", s.embedding_endpoint)->capture_default_str();
  app.add_option("--embedding-model", s.embedding_model)->capture_default_str();
  app.add_option("--backend", s.backend, "Extraction backend: rule or llm")->capture_default_str();
  app.add_option("--llm-endpoint", s.llm_endpoint)->capture_default_str();
  app.add_option("--llm-model", s.llm_model)->capture_default_str();
  app.add_option("--cache", s.cache, "JSON Lines cache of model replies");
  app.add_option("--timeout", s.timeout, "Per-request timeout in seconds")->capture_default_str();
  app.add_option("--retries", s.retries, "Retries on 429, 5xx and transport errors")->capture_default_str();
  app.add_option("--max-in-flight", s.max_in_flight, "Concurrent remote requests")->capture_default_str();
  app.add_option("--mode", s.mode, "Search cutoff: topk, threshold or both")->capture_default_str();
  app.add_option("--k", s.k, "Result cap for topk and both")->capture_default_str();
  app.add_option("--min-similarity", s.min_similarity, "Score floor for threshold and both")->capture_default_str();
  app.add_option("--epsilon", s.epsilon, "Largest mean change reported as Unchanged")->capture_default_str();
  app.add_option("--jobs", s.jobs, "Queries compared concurrently")->capture_default_str();

  auto* classify_cmd = app.add_subcommand("classify", "Label each input line with its speech act");
  classify_cmd->add_option("--input,-i", s.input, "Input file, one utterance per line (default stdin)");

  auto* extract_cmd = app.add_subcommand("extract", "Rewrite each input line as a proposition");
  extract_cmd->add_option("--input,-i", s.input, "Input file, one utterance per line (default stdin)");
  extract_cmd->add_flag("--trace", s.trace, "Emit JSON Lines with matched frames and transforms");

  auto* ingest_cmd = app.add_subcommand("ingest", "Embed a JSON Lines corpus into an index file");
  ingest_cmd->add_option("--corpus", s.corpus)->required()->check(CLI::ExistingFile);
  ingest_cmd->add_option("--index", s.index, "Index file to write")->required();

  auto* search_cmd = app.add_subcommand("search", "Query an index");
  search_cmd->add_option("--index", s.index)->required()->check(CLI::ExistingFile);
  search_cmd->add_option("--query,-q", s.query)->required();
  search_cmd->add_option("--format", s.format, "md, csv or jsonl")->capture_default_str();
  search_cmd->add_option("--output,-o", s.output);

  auto* compare_cmd = app.add_subcommand("compare", "Compare original and propositional retrieval");
  compare_cmd->add_option("--queries", s.queries, "CSV: qid,category,original_text[,propositional_text]")
      ->check(CLI::ExistingFile);
  compare_cmd->add_option("--index", s.index)->check(CLI::ExistingFile);
  compare_cmd->add_flag("--fixtures", s.fixtures, "Use the bundled fixture numbers instead of retrieval");
  compare_cmd->add_option("--fixtures-path", s.fixtures_path)->check(CLI::ExistingFile)->capture_default_str();
  compare_cmd->add_option("--format", s.format, "md, csv or jsonl")->capture_default_str();
  compare_cmd->add_option("--output,-o", s.output);
  compare_cmd->add_flag("--summary", s.summary, "Append category aggregates and correlations (md)");
  compare_cmd->add_option("--plots", s.plots, "Directory for plot-ready CSV files");

  auto* report_cmd = app.add_subcommand("report", "Render a saved CSV report or fixture file");
  report_cmd->add_option("--input,-i", s.input)->required()->check(CLI::ExistingFile);
  report_cmd->add_option("--format", s.format, "md, csv or jsonl")->capture_default_str();
  report_cmd->add_option("--output,-o", s.output);
  report_cmd->add_flag("--summary", s.summary, "Append category aggregates and correlations (md)");
  report_cmd->add_flag("--narrative", s.narrative, "Append one paragraph per query");
  report_cmd->add_option("--plots", s.plots, "Directory for plot-ready CSV files");

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitInput;
  }

  try {
    if (classify_cmd->parsed()) return cmd_classify(s, in, out);
    if (extract_cmd->parsed()) return cmd_extract(s, in, out);
    if (ingest_cmd->parsed()) return cmd_ingest(s, out);
    if (search_cmd->parsed()) return cmd_search(s, out);
    if (compare_cmd->parsed()) return cmd_compare(s, out, err);
    if (report_cmd->parsed()) return cmd_report(s, out);
  } catch (const Error& e) {
    err << "propshift: " << e.what() << '\n';
    return is_service_error(e.kind()) ? kExitService : kExitInput;
  } catch (const std::exception& e) {
    err << "propshift: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInput;
}

}  // namespace propshift::cli
