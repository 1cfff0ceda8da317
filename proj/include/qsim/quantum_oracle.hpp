#pragma once

// Exact linear-algebra ground truth: density matrices, projectors and
// Born-rule probabilities.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qsim/errors.hpp"
#include "qsim/rng.hpp"

namespace qsim {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using Matrix2c = Eigen::Matrix2cd;

inline constexpr double kTolerance = 1e-9;

struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double operator[](int axis) const { return axis == 0 ? x : (axis == 1 ? y : z); }
  double dot(const BlochVector& o) const { return x * o.x + y * o.y + z * o.z; }
  double norm() const { return std::sqrt(dot(*this)); }

  friend bool operator==(const BlochVector&, const BlochVector&) = default;
};

namespace axes {
inline constexpr BlochVector X{1.0, 0.0, 0.0};
inline constexpr BlochVector Y{0.0, 1.0, 0.0};
inline constexpr BlochVector Z{0.0, 0.0, 1.0};
}  // namespace axes

inline void require_unit(const BlochVector& m) {
  if (!(std::abs(m.norm() - 1.0) <= kTolerance)) {
    throw InvalidDirection("measurement direction must have unit norm, got norm " +
                           std::to_string(m.norm()));
  }
}

// Uniformly distributed point on the unit sphere.
inline BlochVector random_unit_vector(rng::Stream& stream) {
  for (;;) {
    const BlochVector v{stream.normal(), stream.normal(), stream.normal()};
    const double r = v.norm();
    if (r > 1e-12) return {v.x / r, v.y / r, v.z / r};
  }
}

// Pauli matrices indexed 0,1,2 = x,y,z; index 3 returns the identity.
inline Matrix2c pauli(int axis) {
  Matrix2c s;
  switch (axis) {
    case 0: s << 0, 1, 1, 0; break;
    case 1: s << 0, Complex(0, -1), Complex(0, 1), 0; break;
    case 2: s << 1, 0, 0, -1; break;
    default: s = Matrix2c::Identity(); break;
  }
  return s;
}

// (I + v·σ) * scale
inline Matrix2c bloch_operator(const BlochVector& v, double scale) {
  return scale * (Matrix2c::Identity() + v.x * pauli(0) + v.y * pauli(1) + v.z * pauli(2));
}

inline Matrix2c build_projector(const BlochVector& m, int outcome) {
  require_unit(m);
  if (outcome != 1 && outcome != -1) throw DomainError("outcome must be +1 or -1");
  const BlochVector signed_m{outcome * m.x, outcome * m.y, outcome * m.z};
  return bloch_operator(signed_m, 0.5);
}

namespace detail {

inline bool is_power_of_two(std::size_t v) { return v != 0 && (v & (v - 1)) == 0; }

inline int log2_exact(std::size_t v) {
  int n = 0;
  while ((std::size_t{1} << n) < v) ++n;
  return n;
}

}  // namespace detail

// A validated n-qubit state. Qubit 1 is the most significant bit of the
// computational-basis index.
class DensityMatrix {
 public:
  explicit DensityMatrix(ComplexMatrix matrix) : matrix_(std::move(matrix)) {
    if (matrix_.rows() != matrix_.cols() ||
        !detail::is_power_of_two(static_cast<std::size_t>(matrix_.rows())) || matrix_.rows() < 2) {
      throw ShapeError("density matrix must be square with dimension 2^n, n >= 1");
    }
    n_qubits_ = detail::log2_exact(static_cast<std::size_t>(matrix_.rows()));
    if ((matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff() > kTolerance) {
      throw InvalidState("density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - Complex(1.0, 0.0)) > kTolerance) {
      throw InvalidState("density matrix trace is not 1");
    }
    const ComplexMatrix hermitian = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(hermitian, Eigen::EigenvaluesOnly);
    if (solver.eigenvalues().minCoeff() < -kTolerance) {
      throw InvalidState("density matrix has a negative eigenvalue " +
                         std::to_string(solver.eigenvalues().minCoeff()));
    }
  }

  const ComplexMatrix& matrix() const { return matrix_; }
  int n_qubits() const { return n_qubits_; }
  std::size_t dim() const { return static_cast<std::size_t>(matrix_.rows()); }

 private:
  ComplexMatrix matrix_;
  int n_qubits_ = 0;
};

// Evaluates Tr[ρ (E_1 ⊗ ... ⊗ E_n)] for every choice of one effect per qubit.
// effects[i] holds the candidate effects for qubit i; the result is indexed
// with qubit 1 most significant, base effects[i].size().
inline std::vector<double> local_effect_traces(const DensityMatrix& rho,
                                               const std::vector<std::vector<Matrix2c>>& effects) {
  if (effects.size() != static_cast<std::size_t>(rho.n_qubits())) {
    throw ShapeError("expected one effect list per qubit");
  }
  std::vector<ComplexMatrix> current{rho.matrix()};
  for (const auto& qubit_effects : effects) {
    const Eigen::Index half = current.front().rows() / 2;
    std::vector<ComplexMatrix> next;
    next.reserve(current.size() * qubit_effects.size());
    for (const auto& block : current) {
      const auto b00 = block.topLeftCorner(half, half);
      const auto b01 = block.topRightCorner(half, half);
      const auto b10 = block.bottomLeftCorner(half, half);
      const auto b11 = block.bottomRightCorner(half, half);
      for (const auto& e : qubit_effects) {
        next.emplace_back(e(0, 0) * b00 + e(0, 1) * b10 + e(1, 0) * b01 + e(1, 1) * b11);
      }
    }
    current = std::move(next);
  }
  std::vector<double> out;
  out.reserve(current.size());
  for (const auto& scalar : current) out.push_back(scalar(0, 0).real());
  return out;
}

// Outcome strings α⃗ ∈ {±1}^n are indexed with party 1 as the most
// significant bit; a set bit means −1.
inline int outcome_sign(std::size_t index, int party, int n) {
  return ((index >> (n - 1 - party)) & 1U) ? -1 : 1;
}

inline std::string outcome_label(std::size_t index, int n) {
  std::string s;
  for (int i = 0; i < n; ++i) s.push_back(outcome_sign(index, i, n) > 0 ? '+' : '-');
  return s;
}

inline std::size_t outcome_index(const std::vector<int>& signs) {
  std::size_t index = 0;
  for (int s : signs) index = (index << 1) | (s < 0 ? 1U : 0U);
  return index;
}

inline std::vector<double> born_probabilities(const DensityMatrix& rho,
                                              const std::vector<BlochVector>& directions) {
  if (directions.size() != static_cast<std::size_t>(rho.n_qubits())) {
    throw ShapeError("need one direction per qubit: got " + std::to_string(directions.size()) +
                     " for " + std::to_string(rho.n_qubits()) + " qubits");
  }
  std::vector<std::vector<Matrix2c>> effects;
  for (const auto& m : directions) effects.push_back({build_projector(m, 1), build_projector(m, -1)});
  return local_effect_traces(rho, effects);
}

// Traces out one qubit (0-based party index).
inline DensityMatrix partial_trace(const DensityMatrix& rho, int party) {
  const int n = rho.n_qubits();
  if (n < 2 || party < 0 || party >= n) throw ShapeError("cannot trace out that qubit");
  const std::size_t dim = rho.dim() / 2;
  const int low_bits = n - 1 - party;
  auto expand = [&](std::size_t reduced, std::size_t bit) {
    const std::size_t low = reduced & ((std::size_t{1} << low_bits) - 1);
    const std::size_t high = reduced >> low_bits;
    return (((high << 1) | bit) << low_bits) | low;
  };
  ComplexMatrix out = ComplexMatrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      Complex acc = 0.0;
      for (std::size_t b = 0; b < 2; ++b) {
        acc += rho.matrix()(static_cast<Eigen::Index>(expand(r, b)), static_cast<Eigen::Index>(expand(c, b)));
      }
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = acc;
    }
  }
  return DensityMatrix(std::move(out));
}

inline ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// State generators

struct StateSpec {
  enum class Kind { ghz, product, random_pure, random_mixed, file };

  Kind kind = Kind::ghz;
  int n = 1;
  std::vector<BlochVector> bloch;  // product states
  std::uint64_t seed = 0;          // random states
  std::string path;                // file states

  static StateSpec ghz(int n) { return {Kind::ghz, n, {}, 0, {}}; }
  static StateSpec product(std::vector<BlochVector> b) {
    const int n = static_cast<int>(b.size());
    return {Kind::product, n, std::move(b), 0, {}};
  }
  static StateSpec random_pure(int n, std::uint64_t seed) { return {Kind::random_pure, n, {}, seed, {}}; }
  static StateSpec random_mixed(int n, std::uint64_t seed) { return {Kind::random_mixed, n, {}, seed, {}}; }
  static StateSpec file(std::string path) { return {Kind::file, 0, {}, 0, std::move(path)}; }

  friend bool operator==(const StateSpec&, const StateSpec&) = default;
};

inline DensityMatrix pure_state(const Eigen::VectorXcd& amplitudes) {
  const Eigen::VectorXcd psi = amplitudes / amplitudes.norm();
  return DensityMatrix(psi * psi.adjoint());
}

inline DensityMatrix ghz_state(int n) {
  if (n < 1) throw ShapeError("GHZ state needs n >= 1");
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(Eigen::Index{1} << n);
  psi(0) = 1.0;
  psi(psi.size() - 1) += 1.0;
  return pure_state(psi);
}

inline DensityMatrix product_state(const std::vector<BlochVector>& bloch) {
  if (bloch.empty()) throw ShapeError("product state needs at least one qubit");
  ComplexMatrix rho = ComplexMatrix::Identity(1, 1);
  for (const auto& s : bloch) {
    if (s.norm() > 1.0 + kTolerance) throw InvalidState("Bloch vector longer than 1");
    rho = kron(rho, bloch_operator(s, 0.5));
  }
  return DensityMatrix(std::move(rho));
}

inline DensityMatrix random_pure_state(int n, std::uint64_t seed) {
  if (n < 1) throw ShapeError("random state needs n >= 1");
  rng::Stream stream(seed, "random_pure");
  Eigen::VectorXcd psi(Eigen::Index{1} << n);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const double re = stream.normal();
    psi(i) = Complex(re, stream.normal());
  }
  return pure_state(psi);
}

inline DensityMatrix random_mixed_state(int n, std::uint64_t seed) {
  if (n < 1) throw ShapeError("random state needs n >= 1");
  rng::Stream stream(seed, "random_mixed");
  const Eigen::Index dim = Eigen::Index{1} << n;
  ComplexMatrix a(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    for (Eigen::Index j = 0; j < dim; ++j) {
      const double re = stream.normal();
      a(i, j) = Complex(re, stream.normal());
    }
  }
  ComplexMatrix rho = a * a.adjoint();
  rho /= rho.trace().real();
  // Exact Hermitian symmetrisation removes rounding asymmetry.
  rho = 0.5 * (rho + rho.adjoint()).eval();
  return DensityMatrix(std::move(rho));
}

// {"n": int, "re": [[...]], "im": [[...]]}
inline DensityMatrix density_from_json(const nlohmann::json& j) {
  try {
    const int n = j.at("n").get<int>();
    if (n < 1 || n > 16) throw ParseError("density file: n out of range");
    const auto re = j.at("re").get<std::vector<std::vector<double>>>();
    const auto im = j.contains("im") ? j.at("im").get<std::vector<std::vector<double>>>()
                                     : std::vector<std::vector<double>>(re.size(), std::vector<double>(re.size(), 0.0));
    const std::size_t dim = std::size_t{1} << n;
    if (re.size() != dim || im.size() != dim) throw ParseError("density file: expected 2^n rows");
    ComplexMatrix m(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    for (std::size_t r = 0; r < dim; ++r) {
      if (re[r].size() != dim || im[r].size() != dim) throw ParseError("density file: expected 2^n columns");
      for (std::size_t c = 0; c < dim; ++c) {
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = Complex(re[r][c], im[r][c]);
      }
    }
    return DensityMatrix(std::move(m));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("density file: ") + e.what());
  }
}

inline nlohmann::json density_to_json(const DensityMatrix& rho) {
  const std::size_t dim = rho.dim();
  std::vector<std::vector<double>> re(dim, std::vector<double>(dim));
  std::vector<std::vector<double>> im(dim, std::vector<double>(dim));
  for (std::size_t r = 0; r < dim; ++r) {
    for (std::size_t c = 0; c < dim; ++c) {
      const Complex v = rho.matrix()(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
      re[r][c] = v.real();
      im[r][c] = v.imag();
    }
  }
  return {{"n", rho.n_qubits()}, {"re", re}, {"im", im}};
}

inline DensityMatrix read_density_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open density file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("density file " + path + ": " + e.what());
  }
  return density_from_json(j);
}

inline DensityMatrix make_state(const StateSpec& spec) {
  switch (spec.kind) {
    case StateSpec::Kind::ghz: return ghz_state(spec.n);
    case StateSpec::Kind::product: return product_state(spec.bloch);
    case StateSpec::Kind::random_pure: return random_pure_state(spec.n, spec.seed);
    case StateSpec::Kind::random_mixed: return random_mixed_state(spec.n, spec.seed);
    case StateSpec::Kind::file: return read_density_file(spec.path);
  }
  throw ParseError("unknown state kind");
}

}  // namespace qsim
