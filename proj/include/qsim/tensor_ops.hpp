#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qsim::detail {

// Dense row-major tensor with one axis per party, party 0 outermost.
// Applies `matrix` (out_dim x in_dim, row-major) along `axis`.
inline std::vector<double> transform_axis(std::span<const double> data, std::vector<std::size_t>& dims,
                                          std::size_t axis, std::span<const double> matrix,
                                          std::size_t out_dim) {
  const std::size_t in_dim = dims[axis];
  std::size_t outer = 1;
  for (std::size_t i = 0; i < axis; ++i) outer *= dims[i];
  std::size_t inner = 1;
  for (std::size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];

  std::vector<double> out(outer * out_dim * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = data.data() + o * in_dim * inner;
    double* dst = out.data() + o * out_dim * inner;
    for (std::size_t r = 0; r < out_dim; ++r) {
      for (std::size_t c = 0; c < in_dim; ++c) {
        const double w = matrix[r * in_dim + c];
        if (w == 0.0) continue;
        const double* s = src + c * inner;
        double* d = dst + r * inner;
        for (std::size_t k = 0; k < inner; ++k) d[k] += w * s[k];
      }
    }
  }
  dims[axis] = out_dim;
  return out;
}

inline std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  while (exp-- > 0) r *= base;
  return r;
}

}  // namespace qsim::detail
