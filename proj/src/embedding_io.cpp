#include "semeval/embedding_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace semeval {
namespace {

static_assert(std::endian::native == std::endian::little, "SEMB I/O assumes a little-endian host");

template <typename T>
void put(std::string& out, T v) {
  char buf[sizeof(T)];
  std::memcpy(buf, &v, sizeof(T));
  out.append(buf, sizeof(T));
}

class Reader {
 public:
  Reader(std::string_view bytes, const std::string& origin) : bytes_(bytes), origin_(origin) {}

  template <typename T>
  T get(const char* what) {
    need(sizeof(T), what);
    T v;
    std::memcpy(&v, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return v;
  }
  std::string_view take(std::size_t n, const char* what) {
    need(n, what);
    auto s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }
  bool done() const { return pos_ == bytes_.size(); }
  std::size_t remaining() const { return bytes_.size() - pos_; }

 private:
  void need(std::size_t n, const char* what) const {
    if (bytes_.size() - pos_ < n)
      throw ParseError(origin_, 0, std::string("truncated file while reading ") + what);
  }
  std::string_view bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

std::string read_all(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_all(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << bytes;
  if (!out) throw IoError("write failed: " + path.string());
}

void check_unique(const std::vector<std::string>& ids, const std::string& origin) {
  std::set<std::string_view> seen;
  for (const auto& id : ids)
    if (!seen.insert(id).second) throw InvalidArgument(origin + ": duplicate embedding id \"" + id + "\"");
}

}  // namespace

EmbeddingFormat parse_embedding_format(std::string_view s) {
  if (s == "binary" || s == "semb") return EmbeddingFormat::binary;
  if (s == "jsonl") return EmbeddingFormat::jsonl;
  throw InvalidArgument("unknown embedding format \"" + std::string(s) + "\" (expected binary|jsonl)");
}

EmbeddingFormat embedding_format_for(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".jsonl" || ext == ".json") ? EmbeddingFormat::jsonl : EmbeddingFormat::binary;
}

std::string encode_embeddings_binary(const EmbeddingMatrix& e) {
  if (static_cast<Eigen::Index>(e.ids.size()) != e.rows())
    throw InvalidArgument("embedding matrix has mismatched id count");
  std::string out(kSembMagic, 4);
  put<std::uint32_t>(out, kSembVersion);
  put<std::uint32_t>(out, static_cast<std::uint32_t>(e.dim()));
  put<std::uint64_t>(out, static_cast<std::uint64_t>(e.rows()));
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    const auto& id = e.ids[static_cast<std::size_t>(i)];
    put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
    out += id;
    for (Eigen::Index k = 0; k < e.dim(); ++k) put<float>(out, static_cast<float>(e.vectors(i, k)));
  }
  return out;
}

EmbeddingMatrix decode_embeddings_binary(std::string_view bytes, const std::string& origin) {
  Reader r(bytes, origin);
  if (r.take(4, "magic") != std::string_view(kSembMagic, 4)) throw ParseError(origin, 0, "bad magic (expected \"SEMB\")");
  const auto version = r.get<std::uint32_t>("version");
  if (version != kSembVersion) throw ParseError(origin, 0, "unsupported SEMB version " + std::to_string(version));
  const auto dim = r.get<std::uint32_t>("dim");
  const auto count = r.get<std::uint64_t>("count");
  if (dim == 0 && count > 0) throw ParseError(origin, 0, "dimension 0 with non-empty payload");
  // Each record needs at least 4 + 4*dim bytes; reject absurd counts before allocating.
  if (count > r.remaining() / (4 + 4ULL * dim)) throw ParseError(origin, 0, "truncated file: header claims " + std::to_string(count) + " records");

  EmbeddingMatrix e;
  e.ids.reserve(count);
  e.vectors.resize(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(dim));
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto len = r.get<std::uint32_t>("id length");
    e.ids.emplace_back(r.take(len, "id"));
    for (std::uint32_t k = 0; k < dim; ++k)
      e.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = r.get<float>("vector");
  }
  if (!r.done()) throw ParseError(origin, 0, "trailing bytes after " + std::to_string(count) + " records");
  check_unique(e.ids, origin);
  if (count > 0) e.validate();
  return e;
}

std::string encode_embeddings_jsonl(const EmbeddingMatrix& e) {
  std::string out;
  for (Eigen::Index i = 0; i < e.rows(); ++i) {
    nlohmann::json rec;
    rec["id"] = e.ids[static_cast<std::size_t>(i)];
    auto& v = rec["v"] = nlohmann::json::array();
    for (Eigen::Index k = 0; k < e.dim(); ++k) v.push_back(static_cast<float>(e.vectors(i, k)));
    out += rec.dump();
    out.push_back('\n');
  }
  return out;
}

EmbeddingMatrix decode_embeddings_jsonl(std::string_view text, const std::string& origin) {
  std::vector<std::string> ids;
  std::vector<std::vector<double>> rows;
  std::size_t line_no = 0, pos = 0;
  std::size_t dim = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    auto line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& ex) {
      throw ParseError(origin, line_no, std::string("malformed JSON: ") + ex.what());
    }
    if (!rec.is_object() || !rec.contains("id") || !rec["id"].is_string())
      throw ParseError(origin, line_no, "record needs a string \"id\"");
    if (!rec.contains("v") || !rec["v"].is_array()) throw ParseError(origin, line_no, "record needs an array \"v\"");
    auto id = rec["id"].get<std::string>();
    std::vector<double> row;
    for (const auto& x : rec["v"]) {
      if (!x.is_number()) throw ParseError(origin, line_no, "non-numeric entry in \"v\" for id \"" + id + "\"");
      row.push_back(x.get<double>());
    }
    if (ids.empty())
      dim = row.size();
    else if (row.size() != dim)
      throw InvalidArgument(origin + ":" + std::to_string(line_no) + ": record \"" + id + "\" has dimension " +
                            std::to_string(row.size()) + ", expected " + std::to_string(dim));
    ids.push_back(std::move(id));
    rows.push_back(std::move(row));
  }
  EmbeddingMatrix e;
  e.ids = std::move(ids);
  e.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < dim; ++k) e.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  check_unique(e.ids, origin);
  if (!e.ids.empty()) e.validate();
  return e;
}

EmbeddingMatrix load_embeddings(const std::filesystem::path& path, EmbeddingFormat format) {
  const auto bytes = read_all(path);
  return format == EmbeddingFormat::binary ? decode_embeddings_binary(bytes, path.string())
                                           : decode_embeddings_jsonl(bytes, path.string());
}

void save_embeddings(const std::filesystem::path& path, const EmbeddingMatrix& e, EmbeddingFormat format) {
  write_all(path, format == EmbeddingFormat::binary ? encode_embeddings_binary(e) : encode_embeddings_jsonl(e));
}

void export_embeddings_for_projection(const std::vector<LabeledEmbeddings>& sets, const std::filesystem::path& path,
                                      EmbeddingFormat format) {
  if (sets.empty()) throw InvalidArgument("nothing to export");
  const auto dim = sets.front().second.dim();
  for (const auto& [label, e] : sets) {
    if (e.dim() != dim)
      throw InvalidArgument("set \"" + label + "\" has dimension " + std::to_string(e.dim()) + ", expected " +
                            std::to_string(dim));
    if (label.empty() || label.find('\t') != std::string::npos)
      throw InvalidArgument("projection labels must be non-empty and tab-free");
  }
  if (format == EmbeddingFormat::binary) {
    EmbeddingMatrix merged;
    Eigen::Index total = 0;
    for (const auto& s : sets) total += s.second.rows();
    merged.vectors.resize(total, dim);
    Eigen::Index row = 0;
    for (const auto& [label, e] : sets) {
      for (Eigen::Index i = 0; i < e.rows(); ++i, ++row) {
        merged.ids.push_back(label + '\t' + e.ids[static_cast<std::size_t>(i)]);
        merged.vectors.row(row) = e.vectors.row(i);
      }
    }
    write_all(path, encode_embeddings_binary(merged));
    return;
  }
  std::string out;
  for (const auto& [label, e] : sets) {
    for (Eigen::Index i = 0; i < e.rows(); ++i) {
      nlohmann::json rec;
      rec["label"] = label;
      rec["id"] = e.ids[static_cast<std::size_t>(i)];
      auto& v = rec["v"] = nlohmann::json::array();
      for (Eigen::Index k = 0; k < e.dim(); ++k) v.push_back(static_cast<float>(e.vectors(i, k)));
      out += rec.dump();
      out.push_back('\n');
    }
  }
  write_all(path, out);
}

std::vector<LabeledEmbeddings> load_projection_export(const std::filesystem::path& path, EmbeddingFormat format) {
  std::vector<LabeledEmbeddings> sets;
  std::vector<std::string> labels;
  std::vector<std::vector<std::pair<std::string, Eigen::RowVectorXd>>> rows;
  auto add = [&](const std::string& label, std::string id, Eigen::RowVectorXd v) {
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
      labels.push_back(label);
      rows.emplace_back();
      it = labels.end() - 1;
    }
    rows[static_cast<std::size_t>(it - labels.begin())].emplace_back(std::move(id), std::move(v));
  };

  const auto bytes = read_all(path);
  Eigen::Index dim = 0;
  if (format == EmbeddingFormat::binary) {
    auto merged = decode_embeddings_binary(bytes, path.string());
    dim = merged.dim();
    for (Eigen::Index i = 0; i < merged.rows(); ++i) {
      const auto& key = merged.ids[static_cast<std::size_t>(i)];
      const auto tab = key.find('\t');
      if (tab == std::string::npos) throw ParseError(path.string(), 0, "record id \"" + key + "\" lacks a label");
      add(key.substr(0, tab), key.substr(tab + 1), merged.vectors.row(i));
    }
  } else {
    std::istringstream in(bytes);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      nlohmann::json rec;
      try {
        rec = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& ex) {
        throw ParseError(path.string(), line_no, std::string("malformed JSON: ") + ex.what());
      }
      if (!rec.is_object() || !rec.value("label", nlohmann::json()).is_string() ||
          !rec.value("id", nlohmann::json()).is_string() || !rec.value("v", nlohmann::json()).is_array())
        throw ParseError(path.string(), line_no, "record needs \"label\", \"id\" and \"v\"");
      const auto& v = rec["v"];
      Eigen::RowVectorXd row(static_cast<Eigen::Index>(v.size()));
      for (std::size_t k = 0; k < v.size(); ++k) row(static_cast<Eigen::Index>(k)) = v[k].get<double>();
      if (dim == 0) dim = row.size();
      if (row.size() != dim) throw InvalidArgument(path.string() + ":" + std::to_string(line_no) + ": dimension mismatch");
      add(rec["label"].get<std::string>(), rec["id"].get<std::string>(), std::move(row));
    }
  }
  for (std::size_t s = 0; s < labels.size(); ++s) {
    EmbeddingMatrix e;
    e.vectors.resize(static_cast<Eigen::Index>(rows[s].size()), dim);
    for (std::size_t i = 0; i < rows[s].size(); ++i) {
      e.ids.push_back(rows[s][i].first);
      e.vectors.row(static_cast<Eigen::Index>(i)) = rows[s][i].second;
    }
    sets.emplace_back(labels[s], std::move(e));
  }
  return sets;
}

}  // namespace semeval
