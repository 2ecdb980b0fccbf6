#include "fdpo/rng.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdpo {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
  return mix64(mix64(parent) ^ (index * 0xd1b54a32d192ed03ULL + 0x8cb92ba72f3d8dd7ULL));
}

std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t a, std::uint64_t b) {
  return derive_seed(derive_seed(parent, a), b);
}

double Rng::beta_k1(double k) {
  if (k <= 0.0) throw std::invalid_argument("beta_k1: shape must be positive");
  return std::pow(uniform(), 1.0 / k);
}

std::size_t Rng::categorical_cdf(std::span<const double> cdf) {
  if (cdf.empty()) throw std::invalid_argument("categorical_cdf: empty distribution");
  const double u = uniform() * cdf.back();
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) {
    --it;
    while (it != cdf.begin() && *it == *(it - 1)) --it;
  }
  return static_cast<std::size_t>(it - cdf.begin());
}

std::size_t Rng::categorical(std::span<const double> weights) {
  if (weights.empty()) throw std::invalid_argument("categorical: empty distribution");
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last_positive = i;
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  return last_positive;
}

}  // namespace fdpo
