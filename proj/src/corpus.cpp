#include "propshift/corpus.hpp"

#include <json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "propshift/error.hpp"
#include "propshift/text.hpp"

namespace propshift {

using json = nlohmann::json;

namespace {

constexpr char kMagic[4] = {'P', 'S', 'I', 'X'};

bool hit_before(const Hit& a, const Hit& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.chunk_id < b.chunk_id;
}

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
  }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void str(std::string_view s) {
    u32(static_cast<std::uint32_t>(s.size()));
    out_.append(s);
  }
  void raw(std::string_view s) { out_.append(s); }
  std::string take() { return std::move(out_); }

 private:
  std::string out_;
};

class Reader {
 public:
  explicit Reader(std::string_view in) : in_(in) {}

  std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
  std::uint32_t u32() {
    auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string str() {
    const std::uint32_t n = u32();
    return std::string(take(n));
  }
  std::string_view take(std::size_t n) {
    if (in_.size() - pos_ < n) throw Error(ErrorKind::IoError, "index file is truncated");
    auto s = in_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::string_view in_;
  std::size_t pos_ = 0;
};

std::vector<float> to_float(const EmbeddingVector& v) {
  std::vector<float> out(v.dim());
  for (std::size_t i = 0; i < v.dim(); ++i) out[i] = static_cast<float>(v[i]);
  return out;
}

}  // namespace

std::string_view to_string(Layer layer) { return layer == Layer::FullText ? "full_text" : "paragraph"; }

Index::Index(std::size_t dim, std::vector<Chunk> chunks) : dim_(dim), chunks_(std::move(chunks)) {
  for (const auto& c : chunks_) {
    if (c.vector.size() != dim_) {
      throw Error(ErrorKind::DimensionMismatch, "chunk " + c.chunk_id + " has dim " +
                                                    std::to_string(c.vector.size()) + ", index " +
                                                    std::to_string(dim_));
    }
  }
}

std::size_t Index::count(Layer layer) const {
  return static_cast<std::size_t>(
      std::count_if(chunks_.begin(), chunks_.end(), [&](const Chunk& c) { return c.layer == layer; }));
}

std::vector<std::string> segment_paragraphs(std::string_view body) {
  std::string text;
  text.reserve(body.size());
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '\r') {
      text += '\n';
      if (i + 1 < body.size() && body[i + 1] == '\n') ++i;
    } else {
      text += body[i];
    }
  }
  std::vector<std::string> paragraphs;
  std::string current;
  auto flush = [&] {
    std::string p = trim(current);
    if (!p.empty()) paragraphs.push_back(std::move(p));
    current.clear();
  };
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    if (trim(line).empty()) {
      flush();
    } else {
      if (!current.empty()) current += '\n';
      current += line;
    }
  }
  flush();
  return paragraphs;
}

std::vector<Document> parse_corpus_jsonl(std::string_view text) {
  std::vector<Document> docs;
  std::istringstream in{std::string(text)};
  std::size_t line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fail = [&](const std::string& what) {
      throw Error(ErrorKind::SchemaError, "corpus line " + std::to_string(line_no) + ": " + what);
    };
    json obj;
    try {
      obj = json::parse(line);
    } catch (const json::exception& e) {
      fail(e.what());
    }
    if (!obj.is_object()) fail("expected a JSON object");
    if (!obj.contains("doc_id") || !obj["doc_id"].is_string()) fail("missing string doc_id");
    if (!obj.contains("body") || !obj["body"].is_string()) fail("missing string body");
    Document d;
    d.doc_id = obj["doc_id"].get<std::string>();
    if (trim(d.doc_id).empty()) fail("blank doc_id");
    d.body = obj["body"].get<std::string>();
    if (obj.contains("title") && obj["title"].is_string()) d.title = obj["title"].get<std::string>();
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read corpus " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus_jsonl(buf.str());
}

Index ingest(const std::vector<Document>& docs, EmbeddingProvider& provider) {
  std::set<std::string, std::less<>> seen;
  for (const auto& d : docs) {
    if (!seen.insert(d.doc_id).second) throw Error(ErrorKind::DuplicateDocId, d.doc_id);
  }
  std::vector<Chunk> chunks;
  for (const auto& d : docs) {
    const auto paragraphs = segment_paragraphs(d.body);
    std::string full = d.title && !trim(*d.title).empty() ? trim(*d.title) : std::string();
    const std::string body = trim(d.body);
    if (!body.empty()) full = full.empty() ? body : full + "\n\n" + body;

    std::vector<std::string> texts;
    texts.push_back(full.empty() ? d.doc_id : full);
    texts.insert(texts.end(), paragraphs.begin(), paragraphs.end());
    std::vector<EmbeddingVector> vectors;
    try {
      vectors = provider.embed_batch(texts);
    } catch (const Error& e) {
      throw Error(e.kind(), "doc " + d.doc_id + ": " + e.detail());
    }
    chunks.push_back(Chunk{d.doc_id + "#full", d.doc_id, Layer::FullText, 0, full, to_float(vectors[0])});
    for (std::size_t i = 0; i < paragraphs.size(); ++i) {
      const auto ordinal = static_cast<std::uint32_t>(i + 1);
      chunks.push_back(Chunk{d.doc_id + "#p" + std::to_string(ordinal), d.doc_id, Layer::Paragraph, ordinal,
                             paragraphs[i], to_float(vectors[i + 1])});
    }
  }
  return Index(provider.dim(), std::move(chunks));
}

Index ingest(const std::vector<Document>& docs, const EmbeddingProviderConfig& cfg) {
  auto provider = make_embedding_provider(cfg);
  return ingest(docs, *provider);
}

void SearchPolicy::validate() const {
  if (mode != Mode::Threshold && k < 1) throw Error(ErrorKind::InvalidConfig, "k must be >= 1");
  if (mode != Mode::TopK && !(min_similarity >= -1.0 && min_similarity <= 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "min_similarity must lie in [-1, 1]");
  }
}

std::string_view to_string(SearchPolicy::Mode mode) {
  switch (mode) {
    case SearchPolicy::Mode::TopK: return "topk";
    case SearchPolicy::Mode::Threshold: return "threshold";
    case SearchPolicy::Mode::Both: return "both";
  }
  return "both";
}

std::optional<SearchPolicy::Mode> parse_search_mode(std::string_view name) {
  const std::string lower = to_lower_ascii(name);
  if (lower == "topk") return SearchPolicy::Mode::TopK;
  if (lower == "threshold") return SearchPolicy::Mode::Threshold;
  if (lower == "both") return SearchPolicy::Mode::Both;
  return std::nullopt;
}

std::vector<Hit> search(const Index& index, const EmbeddingVector& query, const SearchPolicy& policy) {
  policy.validate();
  if (index.empty()) return {};
  if (query.dim() != index.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "query dim " + std::to_string(query.dim()) + ", index dim " +
                                                  std::to_string(index.dim()));
  }
  const bool use_threshold = policy.mode != SearchPolicy::Mode::TopK;
  std::vector<Hit> hits;
  hits.reserve(index.size());
  for (const auto& chunk : index.chunks()) {
    double dot = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < chunk.vector.size(); ++i) {
      const double c = chunk.vector[i];
      dot += query[i] * c;
      norm += c * c;
    }
    // Stored floats are unit length only to f32 rounding; renormalize.
    const double score = norm > 0.0 ? dot / std::sqrt(norm) : 0.0;
    if (use_threshold && score < policy.min_similarity) continue;
    hits.push_back(Hit{chunk.chunk_id, chunk.layer, score});
  }
  if (policy.mode != SearchPolicy::Mode::Threshold && hits.size() > policy.k) {
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(policy.k), hits.end(), hit_before);
    hits.resize(policy.k);
  } else {
    std::sort(hits.begin(), hits.end(), hit_before);
  }
  return hits;
}

std::string serialize_index(const Index& index) {
  Writer w;
  w.raw(std::string_view(kMagic, sizeof kMagic));
  w.u32(kIndexFormatVersion);
  w.u32(static_cast<std::uint32_t>(index.dim()));
  w.u64(index.size());
  for (const auto& c : index.chunks()) {
    w.str(c.chunk_id);
    w.str(c.doc_id);
    w.u8(static_cast<std::uint8_t>(c.layer));
    w.u32(c.ordinal);
    w.str(c.text);
    for (float x : c.vector) w.f32(x);
  }
  return w.take();
}

Index deserialize_index(std::string_view bytes) {
  if (bytes.empty()) return Index();
  if (bytes.size() < sizeof kMagic || std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) {
    throw Error(ErrorKind::FormatVersionMismatch, "not a propshift index (bad magic)");
  }
  Reader r(bytes.substr(sizeof kMagic));
  const std::uint32_t version = r.u32();
  if (version != kIndexFormatVersion) {
    throw Error(ErrorKind::FormatVersionMismatch, "index format version " + std::to_string(version) +
                                                      ", expected " + std::to_string(kIndexFormatVersion));
  }
  const std::uint32_t dim = r.u32();
  const std::uint64_t count = r.u64();
  std::vector<Chunk> chunks;
  for (std::uint64_t i = 0; i < count; ++i) {
    Chunk c;
    c.chunk_id = r.str();
    c.doc_id = r.str();
    const std::uint8_t layer = r.u8();
    if (layer > 1) throw Error(ErrorKind::IoError, "chunk " + c.chunk_id + " has unknown layer");
    c.layer = static_cast<Layer>(layer);
    c.ordinal = r.u32();
    c.text = r.str();
    c.vector.resize(dim);
    for (auto& x : c.vector) x = r.f32();
    chunks.push_back(std::move(c));
  }
  if (r.remaining() != 0) throw Error(ErrorKind::IoError, "trailing bytes after the last chunk");
  return Index(dim, std::move(chunks));
}

void save_index(const Index& index, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::IoError, "cannot write index " + path.string());
  const std::string bytes = serialize_index(index);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorKind::IoError, "short write to " + path.string());
}

Index load_index(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::IoError, "cannot read index " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return deserialize_index(buf.str());
}

}  // namespace propshift
