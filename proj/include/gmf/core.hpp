#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gmf {

struct DimensionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ParameterError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& msg, std::size_t step, std::size_t scenario)
      : std::runtime_error(msg), step(step), scenario(scenario) {}
  std::size_t step;
  std::size_t scenario;
};

/// Pairwise (tree) summation with a fixed fan-out, so the result depends only
/// on the data, never on how work is split across workers.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kLeafSize = 16;
  if (v.size() <= kLeafSize) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

inline double pairwise_mean(std::span<const double> v) {
  if (v.empty()) throw ParameterError("pairwise_mean: empty input");
  return pairwise_sum(v) / static_cast<double>(v.size());
}

// FNV-1a, used for config hashing and named seed streams.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                           std::uint64_t h = 1469598103934665603ull) {
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a(const std::string& s) {
  return fnv1a(std::span<const unsigned char>(
      reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

/// Derives an independent seed for a named purpose from the top-level seed.
/// Adding a stream never perturbs the draws of another.
inline std::uint64_t seed_stream(std::uint64_t top_seed, const std::string& name) {
  std::uint64_t z = top_seed + 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return z ^ fnv1a(name);
}

inline double sqr(double x) { return x * x; }

inline double euclid_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace gmf
