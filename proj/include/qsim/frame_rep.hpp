#pragma once

// Frame picture of qubits: states become non-negative distributions over
// 4^n bit-pair strings, local projective measurements become 2x4
// quasi-stochastic matrices. The state map is available through the
// SIC-POVM trace formula and through the correlation-tensor expansion.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsim/errors.hpp"
#include "qsim/quantum_oracle.hpp"
#include "qsim/tensor_ops.hpp"

namespace qsim {

inline constexpr double kWeightClampTolerance = 1e-12;

// Bit pair (a, a') with a, a' ∈ {+1, −1}. Codes: ++ → 0, +− → 1, −+ → 2, −− → 3.
struct TetraIndex {
  int a = 1;
  int a_prime = 1;

  constexpr int code() const { return (a < 0 ? 2 : 0) + (a_prime < 0 ? 1 : 0); }
  static constexpr TetraIndex from_code(int code) {
    return {(code & 2) ? -1 : 1, (code & 1) ? -1 : 1};
  }

  friend bool operator==(const TetraIndex&, const TetraIndex&) = default;
};

inline BlochVector tetra_vector(TetraIndex idx) {
  const double k = 1.0 / std::sqrt(3.0);
  return {k * idx.a, k * idx.a_prime, k * idx.a * idx.a_prime};
}

// SIC-POVM element (I + n_{aa'}·σ)/4.
inline Matrix2c sic_effect(TetraIndex idx) { return bloch_operator(tetra_vector(idx), 0.25); }

// Non-negative distribution over (a_1 a'_1, ..., a_n a'_n). Index
// Σ_i 4^{n-i} code_i, party 1 most significant.
class QuasiState {
 public:
  // Weights in (−1e−12, 0) are clamped to zero and the vector renormalised;
  // anything more negative means the source state was not valid.
  static QuasiState from_weights(int n, std::vector<double> weights) {
    if (n < 1 || weights.size() != detail::ipow(4, n)) {
      throw ShapeError("quasi state needs 4^n weights");
    }
    double total = 0.0;
    bool clamped = false;
    for (double& w : weights) {
      if (w < -kWeightClampTolerance) {
        throw NegativeWeight("quasi state weight " + std::to_string(w) + " is negative");
      }
      if (w < 0.0) {
        w = 0.0;
        clamped = true;
      }
      total += w;
    }
    if (std::abs(total - 1.0) > kTolerance) {
      throw InvalidState("quasi state weights sum to " + std::to_string(total));
    }
    if (clamped) {
      for (double& w : weights) w /= total;
    }
    QuasiState s;
    s.n_ = n;
    s.weights_ = std::move(weights);
    return s;
  }

  int n_parties() const { return n_; }
  std::size_t size() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  double weight(std::size_t index) const { return weights_.at(index); }

  static int code_of(std::size_t index, int party, int n) {
    return static_cast<int>((index >> (2 * (n - 1 - party))) & 3U);
  }

  static std::size_t index_of(const std::vector<TetraIndex>& row) {
    std::size_t index = 0;
    for (const auto& t : row) index = (index << 2) | static_cast<std::size_t>(t.code());
    return index;
  }

  // Sums out one party (0-based).
  QuasiState marginal(int party) const {
    if (n_ < 2 || party < 0 || party >= n_) throw ShapeError("cannot marginalise that party");
    std::vector<std::size_t> dims(static_cast<std::size_t>(n_), 4);
    static constexpr std::array<double, 4> kSum{1.0, 1.0, 1.0, 1.0};
    auto out = detail::transform_axis(weights_, dims, static_cast<std::size_t>(party), kSum, 1);
    return from_weights(n_ - 1, std::move(out));
  }

  friend bool operator==(const QuasiState&, const QuasiState&) = default;

 private:
  int n_ = 0;
  std::vector<double> weights_;
};

// η(α|aa'): row 0 is α = +1, row 1 is α = −1; columns by TetraIndex code.
struct QuasiStochasticProcess {
  std::array<std::array<double, 4>, 2> entries{};

  double operator()(int alpha, int code) const { return entries[alpha > 0 ? 0 : 1][static_cast<std::size_t>(code)]; }

  double min_entry() const {
    double m = entries[0][0];
    for (const auto& row : entries)
      for (double v : row) m = std::min(m, v);
    return m;
  }

  bool has_unit_column_sums(double tol = kTolerance) const {
    for (std::size_t c = 0; c < 4; ++c) {
      if (std::abs(entries[0][c] + entries[1][c] - 1.0) > tol) return false;
    }
    return true;
  }

  std::array<double, 8> row_major() const {
    std::array<double, 8> out{};
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 4; ++c) out[r * 4 + c] = entries[r][c];
    return out;
  }
};

inline QuasiStochasticProcess measurement_process(const BlochVector& m) {
  require_unit(m);
  QuasiStochasticProcess eta;
  for (int code = 0; code < 4; ++code) {
    const double projection = m.dot(tetra_vector(TetraIndex::from_code(code)));
    eta.entries[0][static_cast<std::size_t>(code)] = 0.5 * (1.0 + 3.0 * projection);
    eta.entries[1][static_cast<std::size_t>(code)] = 0.5 * (1.0 - 3.0 * projection);
  }
  return eta;
}

// Correlation tensors T^{(κ)} for every non-empty qubit subset κ. Subsets are
// bitmasks with bit i set for party i (0-based). A subset's tensor is stored
// flat over axes {x,y,z}^k, lowest party most significant.
class CorrelationTensor {
 public:
  explicit CorrelationTensor(int n) : n_(n) {
    if (n < 1 || n > 16) throw ShapeError("correlation tensor needs 1 <= n <= 16");
  }

  int n_parties() const { return n_; }

  static int subset_size(std::uint32_t mask) { return std::popcount(mask); }

  void set(std::uint32_t mask, std::vector<double> values) {
    if (mask == 0 || mask >= (1U << n_)) throw ShapeError("subset outside the party range");
    if (values.size() != detail::ipow(3, subset_size(mask))) throw ShapeError("tensor needs 3^k entries");
    tensors_[mask] = std::move(values);
  }

  bool has(std::uint32_t mask) const { return tensors_.contains(mask); }

  const std::vector<double>& at(std::uint32_t mask) const {
    auto it = tensors_.find(mask);
    if (it == tensors_.end()) throw IncompleteTensor("missing tensor for subset mask " + std::to_string(mask));
    return it->second;
  }

  // Single-qubit tensor = Bloch vector.
  BlochVector bloch(int party) const {
    const auto& t = at(1U << party);
    return {t[0], t[1], t[2]};
  }

  const std::map<std::uint32_t, std::vector<double>>& tensors() const { return tensors_; }

 private:
  int n_;
  std::map<std::uint32_t, std::vector<double>> tensors_;
};

// Maps a full Pauli-string index (base 4, digit 0 = I, 1..3 = x,y,z, party 0
// most significant) to (subset mask, flat index within that subset's tensor).
namespace detail {

inline std::pair<std::uint32_t, std::size_t> split_pauli_index(std::size_t index, int n) {
  std::uint32_t mask = 0;
  std::size_t flat = 0;
  for (int party = 0; party < n; ++party) {
    const auto digit = (index >> (2 * (n - 1 - party))) & 3U;
    if (digit != 0) {
      mask |= 1U << party;
      flat = flat * 3 + (digit - 1);
    }
  }
  return {mask, flat};
}

}  // namespace detail

inline CorrelationTensor correlation_tensor_of(const DensityMatrix& rho) {
  const int n = rho.n_qubits();
  const std::vector<Matrix2c> paulis{pauli(3), pauli(0), pauli(1), pauli(2)};
  const auto expectations = local_effect_traces(rho, std::vector<std::vector<Matrix2c>>(static_cast<std::size_t>(n), paulis));

  std::map<std::uint32_t, std::vector<double>> collected;
  for (std::size_t index = 1; index < expectations.size(); ++index) {
    const auto [mask, flat] = detail::split_pauli_index(index, n);
    auto& t = collected[mask];
    if (t.empty()) t.assign(detail::ipow(3, std::popcount(mask)), 0.0);
    t[flat] = expectations[index];
  }
  CorrelationTensor tensor(n);
  for (auto& [mask, values] : collected) tensor.set(mask, std::move(values));
  return tensor;
}

// p(a⃗) = Tr[ρ Π_{a_1a'_1} ⊗ ... ⊗ Π_{a_na'_n}]
inline QuasiState quasi_state_from_density(const DensityMatrix& rho) {
  std::vector<Matrix2c> sic;
  for (int code = 0; code < 4; ++code) sic.push_back(sic_effect(TetraIndex::from_code(code)));
  auto weights = local_effect_traces(rho, std::vector<std::vector<Matrix2c>>(static_cast<std::size_t>(rho.n_qubits()), sic));
  return QuasiState::from_weights(rho.n_qubits(), std::move(weights));
}

// p(a⃗) = 4^{-n} (1 + Σ_κ Σ_j T^{(κ)}_j Π_{i∈κ} (n_{a_i a'_i})_{j_i})
inline QuasiState quasi_state_from_tensor(const CorrelationTensor& tensor) {
  const int n = tensor.n_parties();
  const std::size_t size = detail::ipow(4, n);
  std::vector<double> coefficients(size, 0.0);
  coefficients[0] = 1.0;
  for (std::size_t index = 1; index < size; ++index) {
    const auto [mask, flat] = detail::split_pauli_index(index, n);
    coefficients[index] = tensor.at(mask)[flat];
  }

  // Rows: tetra code; columns: Pauli digit (I, x, y, z).
  std::array<double, 16> expand{};
  for (int code = 0; code < 4; ++code) {
    const BlochVector v = tetra_vector(TetraIndex::from_code(code));
    const auto row = static_cast<std::size_t>(code) * 4;
    expand[row + 0] = 1.0;
    expand[row + 1] = v.x;
    expand[row + 2] = v.y;
    expand[row + 3] = v.z;
  }
  std::vector<std::size_t> dims(static_cast<std::size_t>(n), 4);
  for (std::size_t axis = 0; axis < dims.size(); ++axis) {
    coefficients = detail::transform_axis(coefficients, dims, axis, expand, 4);
  }
  const double scale = 1.0 / static_cast<double>(size);
  for (double& w : coefficients) w *= scale;
  return QuasiState::from_weights(n, std::move(coefficients));
}

// q(α⃗) = Σ_{a⃗} Π_i η_i(α_i|a_i a'_i) p(a⃗), indexed like born_probabilities.
inline std::vector<double> apply_local_processes(const QuasiState& p,
                                                 const std::vector<QuasiStochasticProcess>& processes) {
  if (processes.size() != static_cast<std::size_t>(p.n_parties())) {
    throw ShapeError("need one process per party: got " + std::to_string(processes.size()) + " for " +
                     std::to_string(p.n_parties()) + " parties");
  }
  std::vector<double> data = p.weights();
  std::vector<std::size_t> dims(processes.size(), 4);
  for (std::size_t axis = 0; axis < processes.size(); ++axis) {
    const auto matrix = processes[axis].row_major();
    data = detail::transform_axis(data, dims, axis, matrix, 2);
  }
  return data;
}

// {"n": int, "weights": [...]}
inline nlohmann::json quasi_state_to_json(const QuasiState& p) {
  return {{"n", p.n_parties()}, {"weights", p.weights()}};
}

inline QuasiState quasi_state_from_json(const nlohmann::json& j) {
  try {
    return QuasiState::from_weights(j.at("n").get<int>(), j.at("weights").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("quasi state: ") + e.what());
  }
}

}  // namespace qsim
