#pragma once

#include <chrono>
#include <cstddef>
#include <string>
#include <vector>

#include "semeval/semantic_space.hpp"

namespace semeval {

struct EmbedClientOptions {
  std::size_t batch_size = 64;
  bool normalize = false;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
  std::chrono::seconds timeout{60};
};

struct ServiceHealth {
  std::string status;
  std::string model;
  int dim = 0;
};

/// GET /v1/health on `endpoint` ("http://host:port").
ServiceHealth check_health(const std::string& endpoint, const EmbedClientOptions& opts = {});

/// Embeds `texts` through POST /v1/embed in batches, preserving order. Row ids
/// are `ids` when given, otherwise the 0-based text index. Connection failures,
/// 429 and 5xx responses are retried with doubling backoff up to
/// `max_attempts`; any other non-200 status fails immediately with the body.
EmbeddingMatrix fetch_embeddings(const std::vector<std::string>& texts, const std::string& endpoint,
                                 const EmbedClientOptions& opts = {},
                                 const std::vector<std::string>& ids = {});

/// Fetch result plus the service-reported model id and request count.
struct FetchedEmbeddings {
  EmbeddingMatrix matrix;
  std::string model;
  std::size_t requests = 0;
};
FetchedEmbeddings fetch_embeddings_detailed(const std::vector<std::string>& texts, const std::string& endpoint,
                                            const EmbedClientOptions& opts = {},
                                            const std::vector<std::string>& ids = {});

}  // namespace semeval
