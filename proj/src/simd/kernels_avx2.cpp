// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include <immintrin.h>

#include "kernel_tables.hpp"

namespace soliton_squeeze::simd::detail {
namespace {

// Two complex doubles per register: [re0, im0, re1, im1].
inline __m256d load(const cplx* p) { return _mm256_loadu_pd(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, __m256d v) { _mm256_storeu_pd(reinterpret_cast<double*>(p), v); }

inline __m256d cmul(__m256d a, __m256d b) {
  const __m256d b_re = _mm256_movedup_pd(b);
  const __m256d b_im = _mm256_permute_pd(b, 0xF);
  const __m256d a_swap = _mm256_permute_pd(a, 0x5);
  return _mm256_fmaddsub_pd(a, b_re, _mm256_mul_pd(a_swap, b_im));
}

inline __m256d conj(__m256d a) {
  return _mm256_xor_pd(a, _mm256_set_pd(-0.0, 0.0, -0.0, 0.0));
}

inline cplx mul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

void scale_columns(cplx* data, const cplx* factor, std::size_t rows, std::size_t cols) {
  const std::size_t vec_rows = rows & ~std::size_t{1};
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = data + k * rows;
    std::size_t j = 0;
    for (; j < vec_rows; j += 2) store(col + j, cmul(load(col + j), load(factor + j)));
    for (; j < rows; ++j) col[j] = mul(col[j], factor[j]);
  }
}

void kerr_mix(cplx* mu, cplx* nu, const cplx* e11, const cplx* e12, std::size_t rows,
              std::size_t cols) {
  const std::size_t vec_rows = rows & ~std::size_t{1};
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* m = mu + k * rows;
    cplx* n = nu + k * rows;
    std::size_t j = 0;
    for (; j < vec_rows; j += 2) {
      const __m256d a = load(e11 + j);
      const __m256d b = load(e12 + j);
      const __m256d mj = load(m + j);
      const __m256d nj = load(n + j);
      store(m + j, _mm256_add_pd(cmul(a, mj), cmul(b, conj(nj))));
      store(n + j, _mm256_add_pd(cmul(a, nj), cmul(b, conj(mj))));
    }
    for (; j < rows; ++j) {
      const cplx mj = m[j];
      const cplx nj = n[j];
      m[j] = mul(e11[j], mj) + mul(e12[j], std::conj(nj));
      n[j] = mul(e11[j], nj) + mul(e12[j], std::conj(mj));
    }
  }
}

void kerr_pull_back(cplx* p, const cplx* e11, const cplx* e12, std::size_t rows,
                    std::size_t cols) {
  const std::size_t vec_rows = rows & ~std::size_t{1};
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = p + k * rows;
    std::size_t j = 0;
    for (; j < vec_rows; j += 2) {
      const __m256d pj = load(col + j);
      store(col + j, _mm256_add_pd(cmul(load(e11 + j), pj), conj(cmul(load(e12 + j), pj))));
    }
    for (; j < rows; ++j) col[j] = mul(e11[j], col[j]) + std::conj(mul(e12[j], col[j]));
  }
}

void dot_columns(const cplx* v, const cplx* m, cplx* out, std::size_t rows, std::size_t cols) {
  const std::size_t vec_rows = rows & ~std::size_t{3};
  for (std::size_t k = 0; k < cols; ++k) {
    const cplx* col = m + k * rows;
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t j = 0;
    for (; j < vec_rows; j += 4) {
      acc0 = _mm256_add_pd(acc0, cmul(load(v + j), load(col + j)));
      acc1 = _mm256_add_pd(acc1, cmul(load(v + j + 2), load(col + j + 2)));
    }
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    const __m128d sum = _mm_add_pd(_mm256_castpd256_pd128(acc), _mm256_extractf128_pd(acc, 1));
    alignas(16) double parts[2];
    _mm_store_pd(parts, sum);
    cplx total{parts[0], parts[1]};
    for (; j < rows; ++j) total += mul(v[j], col[j]);
    out[k] = total;
  }
}

}  // namespace

const KernelTable& avx2_table() {
  static const KernelTable table{Isa::avx2, &scale_columns, &kerr_mix, &kerr_pull_back,
                                 &dot_columns};
  return table;
}

}  // namespace soliton_squeeze::simd::detail
