#include "semeval/semantic_space.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_map>

namespace semeval {
namespace {

std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
std::uint64_t bounded(std::uint64_t& state, std::uint64_t bound) noexcept {
  using u128 = unsigned __int128;
  std::uint64_t x = splitmix64(state);
  u128 m = static_cast<u128>(x) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      x = splitmix64(state);
      m = static_cast<u128>(x) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

}  // namespace

Eigen::Index EmbeddingMatrix::index_of(const std::string& id) const {
  auto it = std::find(ids.begin(), ids.end(), id);
  if (it == ids.end()) throw InvalidArgument("no embedding for id \"" + id + "\"");
  return static_cast<Eigen::Index>(it - ids.begin());
}

EmbeddingMatrix EmbeddingMatrix::select(const std::vector<std::string>& order) const {
  std::unordered_map<std::string, Eigen::Index> index;
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], static_cast<Eigen::Index>(i));
  EmbeddingMatrix out;
  out.ids = order;
  out.vectors.resize(static_cast<Eigen::Index>(order.size()), dim());
  for (std::size_t i = 0; i < order.size(); ++i) {
    auto it = index.find(order[i]);
    if (it == index.end()) throw InvalidArgument("no embedding for id \"" + order[i] + "\"");
    out.vectors.row(static_cast<Eigen::Index>(i)) = vectors.row(it->second);
  }
  return out;
}

EmbeddingMatrix EmbeddingMatrix::normalized() const {
  EmbeddingMatrix out = *this;
  for (Eigen::Index i = 0; i < out.vectors.rows(); ++i) {
    const double n = out.vectors.row(i).norm();
    if (!(n > 0.0)) throw InvalidArgument("cannot normalize zero vector for id \"" + ids[static_cast<std::size_t>(i)] + "\"");
    out.vectors.row(i) /= n;
  }
  return out;
}

void EmbeddingMatrix::validate() const {
  if (static_cast<Eigen::Index>(ids.size()) != vectors.rows())
    throw InvalidArgument("embedding matrix has " + std::to_string(ids.size()) + " ids but " +
                          std::to_string(vectors.rows()) + " rows");
  if (vectors.cols() < 1) throw InvalidArgument("embedding dimension must be >= 1");
  for (Eigen::Index i = 0; i < vectors.rows(); ++i)
    if (!vectors.row(i).allFinite())
      throw InvalidArgument("non-finite embedding for id \"" + ids[static_cast<std::size_t>(i)] + "\"");
}

std::uint64_t retrieval_stream_key(std::uint64_t seed, std::uint64_t run, std::uint64_t query) noexcept {
  std::uint64_t s = seed;
  std::uint64_t k = splitmix64(s);
  s = k ^ run;
  k = splitmix64(s);
  s = k ^ query;
  return splitmix64(s);
}

std::vector<std::size_t> sample_negatives(std::uint64_t key, std::size_t population, std::size_t exclude,
                                          std::size_t count) {
  const std::size_t pool = exclude < population ? population - 1 : population;
  if (count > pool) throw InvalidArgument("cannot draw " + std::to_string(count) + " negatives from " + std::to_string(pool));
  // Floyd: draws `count` distinct values from [0, pool) in O(count).
  std::vector<std::size_t> chosen;
  chosen.reserve(count);
  std::uint64_t state = key;
  for (std::size_t j = pool - count; j < pool; ++j) {
    const auto t = static_cast<std::size_t>(bounded(state, static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end())
      chosen.push_back(t);
    else
      chosen.push_back(j);
  }
  // Map [0, pool) onto the population with `exclude` skipped.
  for (auto& c : chosen)
    if (exclude < population && c >= exclude) ++c;
  return chosen;
}

Eigen::MatrixXd cosine_similarity_matrix(const Eigen::MatrixXd& queries, const Eigen::MatrixXd& candidates) {
  if (queries.cols() != candidates.cols()) throw InvalidArgument("cosine_similarity_matrix: dimension mismatch");
  const Eigen::VectorXd qn = queries.rowwise().norm();
  const Eigen::VectorXd cn = candidates.rowwise().norm();
  if ((qn.array() <= 0.0).any() || (cn.array() <= 0.0).any())
    throw InvalidArgument("cosine_similarity_matrix: zero-norm vector");
  const Eigen::MatrixXd q = qn.cwiseInverse().asDiagonal() * queries;
  const Eigen::MatrixXd c = cn.cwiseInverse().asDiagonal() * candidates;
  return q * c.transpose();
}

RetrievalResult nway_retrieval_accuracy(const EmbeddingMatrix& queries, const EmbeddingMatrix& candidates,
                                        const RetrievalConfig& cfg) {
  queries.validate();
  candidates.validate();
  if (cfg.n_way < 2) throw InvalidArgument("n_way must be >= 2");
  if (cfg.runs < 1) throw InvalidArgument("runs must be >= 1");
  if (queries.dim() != candidates.dim())
    throw InvalidArgument("query dimension " + std::to_string(queries.dim()) + " != candidate dimension " +
                          std::to_string(candidates.dim()));
  if (queries.ids.size() != candidates.ids.size())
    throw InvalidArgument("queries and candidates must share the same id set");
  const std::size_t m = queries.ids.size();
  if (static_cast<std::size_t>(cfg.n_way) > m)
    throw InvalidArgument("n_way " + std::to_string(cfg.n_way) + " exceeds corpus size " + std::to_string(m));

  // Candidates reordered so row i pairs with query i.
  const EmbeddingMatrix aligned = candidates.select(queries.ids);
  const Eigen::MatrixXd sim = cosine_similarity_matrix(queries.vectors, aligned.vectors);
  const auto negatives = static_cast<std::size_t>(cfg.n_way - 1);

  RetrievalResult result;
  result.per_run.assign(static_cast<std::size_t>(cfg.runs), 0.0);
  auto run_one = [&](int run) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < m; ++i) {
      const auto key = retrieval_stream_key(cfg.seed, static_cast<std::uint64_t>(run), i);
      const auto idx = static_cast<Eigen::Index>(i);
      const double positive = sim(idx, idx);
      bool win = true;
      for (auto j : sample_negatives(key, m, i, negatives))
        if (!(positive > sim(idx, static_cast<Eigen::Index>(j)))) {
          win = false;
          break;
        }
      hits += win ? 1 : 0;
    }
    result.per_run[static_cast<std::size_t>(run)] = static_cast<double>(hits) / static_cast<double>(m);
  };

  unsigned threads = cfg.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : cfg.threads;
  threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.runs));
  if (threads <= 1) {
    for (int r = 0; r < cfg.runs; ++r) run_one(r);
  } else {
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        try {
          for (int r = next++; r < cfg.runs; r = next++) run_one(r);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  // Fixed-order reduction keeps results independent of the thread count.
  double sum = 0.0;
  for (double a : result.per_run) sum += a;
  result.mean_accuracy = sum / cfg.runs;
  if (cfg.runs > 1) {
    double ss = 0.0;
    for (double a : result.per_run) ss += (a - result.mean_accuracy) * (a - result.mean_accuracy);
    result.std = std::sqrt(ss / (cfg.runs - 1));
  }
  return result;
}

}  // namespace semeval
