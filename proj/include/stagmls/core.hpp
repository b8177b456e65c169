#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstdio>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace stagmls {

template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

class Error : public std::runtime_error {
public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
public:
  using Error::Error;
};

class GeometryError : public Error {
public:
  using Error::Error;
};

/// Local stencil construction failure; carries the offending point index.
class StencilError : public Error {
public:
  StencilError(int point, const std::string& what) : Error(what), point(point) {}
  int point;
};

class SolveError : public Error {
public:
  using Error::Error;
};

/// Formats a double with 17 significant digits (decimal round-trip safe).
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Counter-based RNG helpers: a fixed key always yields the same stream,
// independent of evaluation order.
inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ull;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

/// Maps a 64-bit hash to a double in [0, 1).
inline double hash_to_unit(std::uint64_t h) {
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

/// Maps a 64-bit hash to a double in [-1, 1].
inline double hash_to_pm1(std::uint64_t h) {
  return 2.0 * hash_to_unit(h) - 1.0;
}

/// Chunked parallel loop over [0, n). Results must be written to disjoint
/// per-index slots so the schedule cannot affect the output.
template <class Fn>
void parallel_for(int n, Fn&& fn) {
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::max(1, std::min(hw, n / 64));
  if (workers <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const int chunk = (n + workers - 1) / workers;
  for (int w = 0; w < workers; ++w) {
    const int lo = w * chunk;
    const int hi = std::min(n, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back([lo, hi, &fn] {
      for (int i = lo; i < hi; ++i) fn(i);
    });
  }
  for (auto& t : pool) t.join();
}

}  // namespace stagmls
