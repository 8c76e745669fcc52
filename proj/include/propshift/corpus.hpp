#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "propshift/embedding.hpp"

namespace propshift {

struct Document {
  std::string doc_id;
  std::optional<std::string> title;
  std::string body;
};

enum class Layer : std::uint8_t { FullText = 0, Paragraph = 1 };

std::string_view to_string(Layer layer);

/// A retrievable unit. Paragraph ordinals start at 1; FullText uses 0.
struct Chunk {
  std::string chunk_id;
  std::string doc_id;
  Layer layer = Layer::FullText;
  std::uint32_t ordinal = 0;
  std::string text;
  std::vector<float> vector;  // unit norm, index dimension

  bool operator==(const Chunk&) const = default;
};

/// Immutable multi-layer vector index: one FullText chunk per document plus
/// one Paragraph chunk per segment.
class Index {
 public:
  Index() = default;
  Index(std::size_t dim, std::vector<Chunk> chunks);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return chunks_.size(); }
  bool empty() const noexcept { return chunks_.empty(); }
  const std::vector<Chunk>& chunks() const noexcept { return chunks_; }

  std::size_t count(Layer layer) const;
  std::size_t document_count() const { return count(Layer::FullText); }

  bool operator==(const Index&) const = default;

 private:
  std::size_t dim_ = 0;
  std::vector<Chunk> chunks_;
};

/// Splits on runs of blank lines after CRLF/CR canonicalization; blank
/// segments are dropped and each paragraph is trimmed.
std::vector<std::string> segment_paragraphs(std::string_view body);

/// One JSON object per line: {"doc_id", "title"?, "body"}. Throws
/// SchemaError naming the line.
std::vector<Document> parse_corpus_jsonl(std::string_view text);
std::vector<Document> load_corpus_jsonl(const std::filesystem::path& path);

/// Embeds every document and paragraph. Throws DuplicateDocId; provider
/// errors are rethrown with the offending doc_id in the message.
Index ingest(const std::vector<Document>& docs, EmbeddingProvider& provider);
Index ingest(const std::vector<Document>& docs, const EmbeddingProviderConfig& cfg);

struct SearchPolicy {
  enum class Mode { TopK, Threshold, Both };

  Mode mode = Mode::Both;
  std::size_t k = 32;
  double min_similarity = 0.50;

  /// Throws InvalidConfig when k < 1 (TopK/Both) or the threshold is
  /// outside [-1, 1] (Threshold/Both).
  void validate() const;
};

std::string_view to_string(SearchPolicy::Mode mode);
std::optional<SearchPolicy::Mode> parse_search_mode(std::string_view name);

struct Hit {
  std::string chunk_id;
  Layer layer = Layer::FullText;
  double score = 0.0;

  bool operator==(const Hit&) const = default;
};

/// Exhaustive cosine scan. Hits come back by descending score, ties by
/// ascending chunk_id. An empty index yields no hits.
std::vector<Hit> search(const Index& index, const EmbeddingVector& query, const SearchPolicy& policy);

/// Binary index file: "PSIX", u32 version, u32 dim, u64 count, then per
/// chunk length-prefixed UTF-8 strings and little-endian f32 vectors.
inline constexpr std::uint32_t kIndexFormatVersion = 1;

std::string serialize_index(const Index& index);
/// A zero-byte input is an empty index. Throws FormatVersionMismatch on a
/// bad magic or version and IoError on truncated or trailing data.
Index deserialize_index(std::string_view bytes);

void save_index(const Index& index, const std::filesystem::path& path);
Index load_index(const std::filesystem::path& path);

}  // namespace propshift
