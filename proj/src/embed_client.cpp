#include "semeval/embed_client.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

namespace semeval {
namespace {

httplib::Client make_client(const std::string& endpoint, const EmbedClientOptions& opts) {
  httplib::Client cli(endpoint);
  if (!cli.is_valid()) throw ServiceError("invalid embedding endpoint \"" + endpoint + "\"");
  cli.set_connection_timeout(opts.timeout);
  cli.set_read_timeout(opts.timeout);
  cli.set_write_timeout(opts.timeout);
  return cli;
}

bool transient(int status) { return status == 429 || status >= 500; }

template <typename Call>
httplib::Result with_retries(const std::string& what, const EmbedClientOptions& opts, Call&& call) {
  auto backoff = opts.initial_backoff;
  std::string last_error;
  const int attempts = std::max(1, opts.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    auto res = call();
    if (res && res->status == 200) return res;
    if (res && !transient(res->status))
      throw ServiceError(what + " returned HTTP " + std::to_string(res->status) + ": " + res->body);
    last_error = res ? "HTTP " + std::to_string(res->status) + ": " + res->body
                     : "connection failed (" + httplib::to_string(res.error()) + ")";
    if (attempt < attempts) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
  }
  throw ServiceError(what + " failed after " + std::to_string(attempts) + " attempts: " + last_error);
}

nlohmann::json parse_body(const std::string& what, const std::string& body) {
  try {
    return nlohmann::json::parse(body);
  } catch (const nlohmann::json::parse_error& e) {
    throw ServiceError(what + " returned malformed JSON: " + e.what());
  }
}

}  // namespace

ServiceHealth check_health(const std::string& endpoint, const EmbedClientOptions& opts) {
  auto cli = make_client(endpoint, opts);
  auto res = with_retries("GET /v1/health", opts, [&] { return cli.Get("/v1/health"); });
  const auto body = parse_body("GET /v1/health", res->body);
  ServiceHealth h;
  h.status = body.value("status", "");
  h.model = body.value("model", "");
  h.dim = body.value("dim", 0);
  if (h.status != "ok") throw ServiceError("embedding service at " + endpoint + " is unhealthy: " + res->body);
  return h;
}

FetchedEmbeddings fetch_embeddings_detailed(const std::vector<std::string>& texts, const std::string& endpoint,
                                            const EmbedClientOptions& opts, const std::vector<std::string>& ids) {
  if (opts.batch_size == 0) throw InvalidArgument("batch_size must be positive");
  if (!ids.empty() && ids.size() != texts.size()) throw InvalidArgument("ids and texts differ in length");
  FetchedEmbeddings out;
  for (std::size_t i = 0; i < texts.size(); ++i) out.matrix.ids.push_back(ids.empty() ? std::to_string(i) : ids[i]);
  if (texts.empty()) return out;

  auto cli = make_client(endpoint, opts);
  std::vector<std::vector<double>> rows;
  rows.reserve(texts.size());
  std::size_t dim = 0;
  for (std::size_t begin = 0; begin < texts.size(); begin += opts.batch_size) {
    const auto end = std::min(texts.size(), begin + opts.batch_size);
    nlohmann::json req;
    req["texts"] = std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                            texts.begin() + static_cast<std::ptrdiff_t>(end));
    req["normalize"] = opts.normalize;
    const auto payload = req.dump();
    auto res = with_retries("POST /v1/embed", opts,
                            [&] { return cli.Post("/v1/embed", payload, "application/json"); });
    ++out.requests;
    const auto body = parse_body("POST /v1/embed", res->body);
    if (!body.contains("vectors") || !body["vectors"].is_array())
      throw ServiceError("POST /v1/embed response lacks \"vectors\"");
    const auto& vectors = body["vectors"];
    if (vectors.size() != end - begin)
      throw ServiceError("POST /v1/embed returned " + std::to_string(vectors.size()) + " vectors for " +
                         std::to_string(end - begin) + " texts");
    const auto reported = body.value("dim", 0);
    for (const auto& v : vectors) {
      if (!v.is_array()) throw ServiceError("POST /v1/embed returned a non-array vector");
      if (dim == 0) dim = v.size();
      if (v.size() != dim || (reported > 0 && v.size() != static_cast<std::size_t>(reported)))
        throw ServiceError("embedding dimension disagreement: got " + std::to_string(v.size()) + ", expected " +
                           std::to_string(dim));
      std::vector<double> row;
      row.reserve(dim);
      for (const auto& x : v) {
        if (!x.is_number()) throw ServiceError("POST /v1/embed returned a non-numeric entry");
        row.push_back(x.get<double>());
      }
      rows.push_back(std::move(row));
    }
    const auto model = body.value("model", "");
    if (out.model.empty())
      out.model = model;
    else if (model != out.model)
      throw ServiceError("embedding model changed between batches: " + out.model + " -> " + model);
  }
  out.matrix.vectors.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(dim));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t k = 0; k < dim; ++k)
      out.matrix.vectors(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  out.matrix.validate();
  return out;
}

EmbeddingMatrix fetch_embeddings(const std::vector<std::string>& texts, const std::string& endpoint,
                                 const EmbedClientOptions& opts, const std::vector<std::string>& ids) {
  return fetch_embeddings_detailed(texts, endpoint, opts, ids).matrix;
}

}  // namespace semeval
