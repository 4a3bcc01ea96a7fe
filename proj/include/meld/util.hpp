#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace meld {

// Raised when inputs violate a documented precondition (bad schema, bad
// flag value, malformed file). Everything else surfaces as runtime_error.
class validation_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Neumaier compensated sum. Third-moment entries are tiny differences of
// O(1) terms, so plain accumulation is not good enough.
struct StableSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Dense three-way tensor, index (a,b,c) with c fastest.
struct Tensor3 {
  int d1 = 0, d2 = 0, d3 = 0;
  Eigen::VectorXd data;

  Tensor3() = default;
  Tensor3(int a, int b, int c) : d1(a), d2(b), d3(c), data(Eigen::VectorXd::Zero(a * b * c)) {}

  double& operator()(int a, int b, int c) { return data[(a * d2 + b) * d3 + c]; }
  double operator()(int a, int b, int c) const { return data[(a * d2 + b) * d3 + c]; }
  int size() const { return d1 * d2 * d3; }
};

// splitmix64; used to derive independent per-sample RNG streams.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return mix64(mix64(seed) ^ mix64(stream + 0x9e3779b97f4a7c15ULL));
}

}  // namespace meld
