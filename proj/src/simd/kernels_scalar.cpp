#include "kernel_tables.hpp"

namespace soliton_squeeze::simd::detail {
namespace {

// Written out explicitly: std::complex operator* goes through the C99
// inf/nan recovery path, which is far slower in these loops.
inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void scale_columns(cplx* data, const cplx* factor, std::size_t rows, std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = data + k * rows;
    for (std::size_t j = 0; j < rows; ++j) col[j] = mul(col[j], factor[j]);
  }
}

void kerr_mix(cplx* mu, cplx* nu, const cplx* e11, const cplx* e12, std::size_t rows,
              std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* m = mu + k * rows;
    cplx* n = nu + k * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const cplx mj = m[j];
      const cplx nj = n[j];
      m[j] = mul(e11[j], mj) + mul(e12[j], std::conj(nj));
      n[j] = mul(e11[j], nj) + mul(e12[j], std::conj(mj));
    }
  }
}

void kerr_pull_back(cplx* p, const cplx* e11, const cplx* e12, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = p + k * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      col[j] = mul(e11[j], col[j]) + std::conj(mul(e12[j], col[j]));
    }
  }
}

void dot_columns(const cplx* v, const cplx* m, cplx* out, std::size_t rows, std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    const cplx* col = m + k * rows;
    cplx acc{0.0, 0.0};
    for (std::size_t j = 0; j < rows; ++j) acc += mul(v[j], col[j]);
    out[k] = acc;
  }
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{Isa::scalar, &scale_columns, &kerr_mix, &kerr_pull_back,
                                 &dot_columns};
  return table;
}

}  // namespace soliton_squeeze::simd::detail
