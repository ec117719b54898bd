#pragma once

#include <string>
#include <vector>

namespace semeval {

struct SelfTestResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Built-in oracle checks: known sentence BLEU-1 values, brute-force n-gram counts,
/// Frechet identities, matrix square roots, attention forward/gradient and
/// loss composition.
std::vector<SelfTestResult> run_selftest();

}  // namespace semeval
