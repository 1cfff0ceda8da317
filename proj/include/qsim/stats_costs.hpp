#pragma once

// Closed-form predictions: Hoeffding sample sizes, binary entropy, the
// survival fraction after removal and the communication budget.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "qsim/errors.hpp"
#include "qsim/nebit.hpp"

namespace qsim {

// Nebit weight of any Pauli-axis measurement under the minimal strategy.
inline const double kPauliNebit = (std::sqrt(3.0) - 1.0) / 2.0;

// Entropy figure quoted for Pauli measurements in the Mermin example.
// It does not follow from H_b(t) at kPauliNebit (≈ 0.744); reported side by
// side with the computed value.
inline constexpr double kQuotedPauliEntropy = 0.963;

inline double binary_entropy(double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("binary entropy needs t in [0, 1]");
  auto term = [](double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; };
  return term(t) + term(1.0 - t);
}

struct HoeffdingQuery {
  double epsilon = 0.05;
  double delta_conf = 0.05;  // failure probability Δ
  double nebit_delta = 0.0;  // δ of the simulated process
};

namespace detail {

inline void validate(const HoeffdingQuery& q) {
  if (!(q.epsilon > 0.0 && q.epsilon < 1.0)) throw DomainError("epsilon must lie in (0, 1)");
  if (!(q.delta_conf > 0.0 && q.delta_conf < 1.0)) throw DomainError("confidence Δ must lie in (0, 1)");
  if (!(q.nebit_delta >= 0.0)) throw DomainError("nebit δ must be non-negative");
}

inline double hoeffding_bound(const HoeffdingQuery& q) {
  return std::log(2.0 / q.delta_conf) / (2.0 * q.epsilon * q.epsilon);
}

}  // namespace detail

// Smallest M with M ≥ ln(2/Δ) / (2ε²).
inline std::uint64_t hoeffding_min_M(const HoeffdingQuery& q) {
  detail::validate(q);
  return static_cast<std::uint64_t>(std::ceil(detail::hoeffding_bound(q)));
}

// Smallest N with N ≥ (1+2δ) ln(2/Δ) / (2ε²).
inline std::uint64_t hoeffding_min_N(const HoeffdingQuery& q) {
  detail::validate(q);
  return static_cast<std::uint64_t>(std::ceil((1.0 + 2.0 * q.nebit_delta) * detail::hoeffding_bound(q)));
}

// Half-width ε guaranteed at confidence 1−Δ by M retained samples.
inline double hoeffding_epsilon(std::uint64_t m, double delta_conf) {
  if (m == 0) throw DomainError("Hoeffding radius needs M > 0");
  return std::sqrt(std::log(2.0 / delta_conf) / (2.0 * static_cast<double>(m)));
}

struct SurvivalFraction {
  double f = 1.0;
  double lower = 1.0;  // (1/(1+2δ_max))^n
  double upper = 1.0;  // (1/(1+2δ_min))^n
};

inline SurvivalFraction survival_fraction(const std::vector<double>& deltas) {
  SurvivalFraction out;
  if (deltas.empty()) return out;
  for (double d : deltas) {
    if (!(d >= 0.0)) throw DomainError("nebit δ must be non-negative");
    out.f /= 1.0 + 2.0 * d;
  }
  const auto [lo, hi] = std::minmax_element(deltas.begin(), deltas.end());
  const double n = static_cast<double>(deltas.size());
  out.lower = std::pow(1.0 / (1.0 + 2.0 * *hi), n);
  out.upper = std::pow(1.0 / (1.0 + 2.0 * *lo), n);
  return out;
}

// Expected communication for N rounds. Party 1 collects (r_i, α_i) from the
// other n−1 parties and returns each reduced α column.
struct CostBreakdown {
  int n = 0;
  std::vector<double> deltas;
  std::uint64_t rounds = 0;
  double f = 1.0;
  double inbound_alpha = 0.0;  // N(n−1)
  double inbound_r = 0.0;      // N Σ_{i≥2} H_b(t_i)
  double outbound = 0.0;       // N(n−1)f
  double total_bits = 0.0;
  double total_bits_per_N = 0.0;
  double per_entry_bits = 0.0;  // total / (fN)
  std::optional<double> entropy_override;
};

// entropy_override replaces every H_b(t_i) with a fixed value.
inline CostBreakdown communication_cost(int n, const std::vector<double>& deltas, std::uint64_t rounds,
                                        std::optional<double> entropy_override = std::nullopt) {
  if (n < 1) throw DomainError("need at least one party");
  if (deltas.size() != static_cast<std::size_t>(n)) throw ShapeError("need one δ per party");

  CostBreakdown c;
  c.n = n;
  c.deltas = deltas;
  c.rounds = rounds;
  c.entropy_override = entropy_override;
  c.f = survival_fraction(deltas).f;
  if (n == 1) return c;

  double entropy_sum = 0.0;
  for (std::size_t i = 1; i < deltas.size(); ++i) {
    entropy_sum += entropy_override ? *entropy_override : binary_entropy(branch_probability(deltas[i]));
  }
  const double others = static_cast<double>(n - 1);
  c.total_bits_per_N = others + entropy_sum + others * c.f;
  const double big_n = static_cast<double>(rounds);
  c.inbound_alpha = big_n * others;
  c.inbound_r = big_n * entropy_sum;
  c.outbound = big_n * others * c.f;
  c.total_bits = c.inbound_alpha + c.inbound_r + c.outbound;
  c.per_entry_bits = c.total_bits_per_N / c.f;
  return c;
}

// Mermin-type benchmark: GHZ_n with every party measuring a Pauli axis.
inline std::vector<CostBreakdown> mermin_cost_table(int n_max, std::uint64_t rounds = 1,
                                                    std::optional<double> entropy_override = std::nullopt) {
  if (n_max < 2) throw DomainError("Mermin table needs n_max >= 2");
  std::vector<CostBreakdown> table;
  for (int n = 2; n <= n_max; ++n) {
    table.push_back(communication_cost(n, std::vector<double>(static_cast<std::size_t>(n), kPauliNebit), rounds,
                                       entropy_override));
  }
  return table;
}

}  // namespace qsim
