#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>

#include "bonus/affinity.hpp"

// Shared between the OpenMP kernels and the serial reference so both compute
// exactly the same classification and per-pair loss terms.
namespace bonus::detail {

// loss term and its derivative w.r.t. the path-max m for one pair;
// positive pairs contribute -log(clamp(1-m)), negative pairs -log(clamp(m)),
// with zero derivative where the clamp is active
struct PairTerm {
  double term = 0.0;
  double dterm = 0.0;
};

inline PairTerm boundary_pair_term(bool positive, double m, double eps_log) {
  const double lo = eps_log, hi = 1.0 - eps_log;
  if (positive) {
    double a = 1.0 - m;
    if (a < lo) return {-std::log(lo), 0.0};
    if (a > hi) return {-std::log(hi), 0.0};
    return {-std::log(a), 1.0 / a};
  }
  if (m < lo) return {-std::log(lo), 0.0};
  if (m > hi) return {-std::log(hi), 0.0};
  return {-std::log(m), -1.0 / m};
}

// offsets must lie in the upper half-disk so every unordered pair is
// generated once and endpoints come out in row-major order
inline void check_offsets_canonical(std::span<const Offset> offsets) {
  for (const Offset& o : offsets)
    if (!(o.dr > 0 || (o.dr == 0 && o.dc > 0)))
      throw std::invalid_argument("offsets must lie in the upper half-disk");
}

// label+subset of the (ia, ib) pixel pair, or nullopt when an endpoint is
// uncertain
inline std::optional<std::pair<std::int8_t, AffinitySubset>> classify_pair(
    const CoarseInstancePrediction& coarse, std::size_t ia, std::size_t ib) {
  if (coarse.uncertain[ia] || coarse.uncertain[ib]) return std::nullopt;
  const std::int32_t id_a = coarse.instances.ids[ia];
  const std::int32_t id_b = coarse.instances.ids[ib];
  if (id_a > 0 && id_b > 0) {
    if (id_a == id_b) return std::make_pair(std::int8_t{1}, AffinitySubset::FgPos);
    return std::make_pair(std::int8_t{0}, AffinitySubset::FgNeg);
  }
  if (id_a == 0 && id_b == 0) return std::make_pair(std::int8_t{1}, AffinitySubset::BgPos);
  return std::make_pair(std::int8_t{0}, AffinitySubset::CrossNeg);
}

}  // namespace bonus::detail
