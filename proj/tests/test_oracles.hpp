#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library routine it is used to check.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qsim/quantum_oracle.hpp"

namespace qsim::reference {

// Tr[ρ (Π_1 ⊗ ... ⊗ Π_n)] with the projectors assembled by explicit
// Kronecker products, one full-size matrix per outcome string.
inline std::vector<double> naive_born(const DensityMatrix& rho, const std::vector<BlochVector>& dirs) {
  const int n = rho.n_qubits();
  std::vector<double> out;
  for (std::size_t k = 0; k < (std::size_t{1} << n); ++k) {
    ComplexMatrix proj = ComplexMatrix::Identity(1, 1);
    for (int i = 0; i < n; ++i) {
      const int s = ((k >> (n - 1 - i)) & 1U) ? -1 : 1;
      const auto& m = dirs[static_cast<std::size_t>(i)];
      Eigen::Matrix2cd p;
      p << 0.5 * (1.0 + s * m.z), 0.5 * s * std::complex<double>(m.x, -m.y),
          0.5 * s * std::complex<double>(m.x, m.y), 0.5 * (1.0 - s * m.z);
      proj = kron(proj, p);
    }
    out.push_back((rho.matrix() * proj).trace().real());
  }
  return out;
}

// Normalised GHZ_3 frame distribution written out from the closed form with
// the tetrahedron vectors (a, a', aa')/√3 inlined.
inline double ghz3_closed_form(int a, int ap, int b, int bp, int c, int cp) {
  const double r3 = std::sqrt(3.0);
  const double zz = (a * ap) * (b * bp) / 3.0 + (a * ap) * (c * cp) / 3.0 + (b * bp) * (c * cp) / 3.0;
  const double three = (a * b * c - a * bp * cp - ap * b * cp - ap * bp * c) / (3.0 * r3);
  return (1.0 + zz + three) / 64.0;
}

// Same expression with the 1/16 prefactor exactly as printed.
inline double ghz3_closed_form_printed(int a, int ap, int b, int bp, int c, int cp) {
  return 4.0 * ghz3_closed_form(a, ap, b, bp, c, cp);
}

// Single-qubit frame weights p(aa') = (1 + (s_x a + s_y a' + s_z aa')/√3)/4.
inline std::array<double, 4> single_qubit_weights(const BlochVector& s) {
  std::array<double, 4> p{};
  const int signs[4][2] = {{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  for (int k = 0; k < 4; ++k) {
    const int a = signs[k][0];
    const int ap = signs[k][1];
    p[static_cast<std::size_t>(k)] = 0.25 * (1.0 + (s.x * a + s.y * ap + s.z * a * ap) / std::sqrt(3.0));
  }
  return p;
}

inline double entropy_bits(double t) {
  long double x = t;
  long double h = 0.0L;
  if (x > 0) h -= x * std::log2(x);
  if (x < 1) h -= (1 - x) * std::log2(1 - x);
  return static_cast<double>(h);
}

}  // namespace qsim::reference
