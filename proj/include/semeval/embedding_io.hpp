#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "semeval/semantic_space.hpp"

namespace semeval {

enum class EmbeddingFormat { binary, jsonl };

EmbeddingFormat parse_embedding_format(std::string_view s);
/// `.jsonl`/`.json` -> jsonl, everything else binary.
EmbeddingFormat embedding_format_for(const std::filesystem::path& path);

/// Binary layout (little endian): "SEMB", u32 version=1, u32 dim, u64 count,
/// then per record u32 id_len, id bytes, dim x f32.
inline constexpr char kSembMagic[4] = {'S', 'E', 'M', 'B'};
inline constexpr std::uint32_t kSembVersion = 1;

std::string encode_embeddings_binary(const EmbeddingMatrix& e);
EmbeddingMatrix decode_embeddings_binary(std::string_view bytes, const std::string& origin = "<memory>");

/// JSONL layout: {"id": str, "v": [float...]} per line. Values are written as
/// the float32 the binary format would store.
std::string encode_embeddings_jsonl(const EmbeddingMatrix& e);
EmbeddingMatrix decode_embeddings_jsonl(std::string_view text, const std::string& origin = "<memory>");

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format);
inline EmbeddingMatrix load_embeddings(const std::filesystem::path& path) {
  return load_embeddings(path, embedding_format_for(path));
}
void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& e, EmbeddingFormat format);

using LabeledEmbeddings = std::pair<std::string, EmbeddingMatrix>;

/// One file holding several labeled sets for external projection tools.
/// JSONL records carry {"label", "id", "v"}; the binary form stores
/// "label<TAB>id" as the record id.
void export_embeddings_for_projection(const std::vector<LabeledEmbeddings>& sets,
                                      const std::filesystem::path& path, EmbeddingFormat format);
std::vector<LabeledEmbeddings> load_projection_export(const std::filesystem::path& path, EmbeddingFormat format);

}  // namespace semeval
