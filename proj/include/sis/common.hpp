#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace sis {

using Vec = std::vector<double>;
using Matrix = std::vector<Vec>;          // dense, row major
using Mask = std::vector<std::uint8_t>;   // subset of features, 0/1 per index

// Thrown when an iterative method hits its cap; carries the best estimate so
// callers can still report something useful.
class convergence_error : public std::runtime_error {
 public:
  convergence_error(const std::string& what, double best)
      : std::runtime_error(what), best_estimate(best) {}
  double best_estimate;
};

class resource_cap_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_length(std::size_t got, std::size_t want, const char* what) {
  if (got != want)
    throw std::invalid_argument(std::string(what) + ": expected length " +
                                std::to_string(want) + ", got " +
                                std::to_string(got));
}

inline double sup_norm(const Vec& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sup_dist(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline Mask full_mask(std::size_t n) { return Mask(n, 1); }
inline Mask empty_mask(std::size_t n) { return Mask(n, 0); }

inline std::size_t mask_count(const Mask& m) {
  std::size_t c = 0;
  for (auto b : m) c += (b != 0);
  return c;
}

inline bool mask_subset(const Mask& a, const Mask& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && !b[i]) return false;
  return true;
}

inline bool mask_equal(const Mask& a, const Mask& b) {
  return mask_subset(a, b) && mask_subset(b, a);
}

inline Mask mask_union(const Mask& a, const Mask& b) {
  Mask r(a.size(), 0);
  for (std::size_t i = 0; i < a.size(); ++i) r[i] = (a[i] || b[i]) ? 1 : 0;
  return r;
}

}  // namespace sis
