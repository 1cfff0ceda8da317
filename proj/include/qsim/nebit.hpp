#pragma once

// Nebit decompositions S = (1+δ)S⁺ − δS⁻ of 2x4 quasi-stochastic matrices
// into a signed mixture of two genuine stochastic matrices.

#include <algorithm>
#include <array>
#include <string>
#include <string_view>

#include "qsim/errors.hpp"
#include "qsim/frame_rep.hpp"

namespace qsim {

// Column-stochastic with non-negative entries; same layout as
// QuasiStochasticProcess (row 0 = outcome +1).
struct StochasticMatrix2x4 {
  std::array<std::array<double, 4>, 2> entries{};

  double prob_plus(int code) const { return entries[0][static_cast<std::size_t>(code)]; }

  bool is_valid(double tol = kTolerance) const {
    for (std::size_t c = 0; c < 4; ++c) {
      if (entries[0][c] < -kWeightClampTolerance || entries[1][c] < -kWeightClampTolerance) return false;
      if (std::abs(entries[0][c] + entries[1][c] - 1.0) > tol) return false;
    }
    return true;
  }
};

enum class DecompositionStrategy {
  // δ = max{0, −2 min S}, S⁻ = ½·1.
  uniform,
  // δ = largest column-wise negative mass.
  minimal,
};

inline std::string_view to_string(DecompositionStrategy s) {
  return s == DecompositionStrategy::uniform ? "uniform" : "minimal";
}

inline DecompositionStrategy parse_strategy(std::string_view s) {
  if (s == "uniform") return DecompositionStrategy::uniform;
  if (s == "minimal") return DecompositionStrategy::minimal;
  throw ParseError("unknown decomposition strategy '" + std::string(s) + "'");
}

struct NebitDecomposition {
  double delta = 0.0;
  StochasticMatrix2x4 s_plus;
  StochasticMatrix2x4 s_minus;
  double t = 1.0;  // P(r = +1) = (1+δ)/(1+2δ)
};

inline double branch_probability(double delta) { return (1.0 + delta) / (1.0 + 2.0 * delta); }

// max over columns of the summed negative entries; zero iff S is stochastic.
inline double negativity(const QuasiStochasticProcess& s) {
  double worst = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    double mass = 0.0;
    for (std::size_t r = 0; r < 2; ++r) mass += std::max(0.0, -s.entries[r][c]);
    worst = std::max(worst, mass);
  }
  return worst;
}

namespace detail {

inline StochasticMatrix2x4 minimal_negative_part(const QuasiStochasticProcess& s, double delta) {
  StochasticMatrix2x4 out;
  for (std::size_t c = 0; c < 4; ++c) {
    double mass = 0.0;
    int non_negative_rows = 0;
    for (std::size_t r = 0; r < 2; ++r) {
      mass += std::max(0.0, -s.entries[r][c]);
      if (s.entries[r][c] >= 0.0) ++non_negative_rows;
    }
    // A column of a unit-sum matrix always has a non-negative row.
    const double surplus = (delta - mass) / delta / non_negative_rows;
    for (std::size_t r = 0; r < 2; ++r) {
      const double v = s.entries[r][c];
      out.entries[r][c] = v < 0.0 ? -v / delta : surplus;
    }
  }
  return out;
}

}  // namespace detail

inline NebitDecomposition decompose(const QuasiStochasticProcess& s,
                                    DecompositionStrategy strategy = DecompositionStrategy::minimal) {
  if (!s.has_unit_column_sums()) throw ShapeError("quasi-stochastic matrix columns must sum to 1");

  NebitDecomposition dec;
  dec.delta = strategy == DecompositionStrategy::uniform ? std::max(0.0, -2.0 * s.min_entry()) : negativity(s);
  dec.t = branch_probability(dec.delta);

  for (auto& row : dec.s_minus.entries) row.fill(0.5);
  if (dec.delta == 0.0) {
    dec.s_plus.entries = s.entries;
    return dec;
  }
  if (strategy == DecompositionStrategy::minimal) dec.s_minus = detail::minimal_negative_part(s, dec.delta);

  for (std::size_t r = 0; r < 2; ++r) {
    for (std::size_t c = 0; c < 4; ++c) {
      double v = (s.entries[r][c] + dec.delta * dec.s_minus.entries[r][c]) / (1.0 + dec.delta);
      if (v < -kWeightClampTolerance) {
        throw DecompositionError("S+ entry " + std::to_string(v) + " is negative");
      }
      // Exact cancellation can leave −0 or a few ulps below zero.
      dec.s_plus.entries[r][c] = std::max(0.0, v);
    }
  }
  return dec;
}

// +1 (apply S⁺) iff draw < t.
inline int sample_branch(const NebitDecomposition& dec, double draw) { return draw < dec.t ? 1 : -1; }

inline int apply_stochastic(const StochasticMatrix2x4& s, TetraIndex idx, double draw) {
  return draw < s.prob_plus(idx.code()) ? 1 : -1;
}

}  // namespace qsim
