// AArch64 Advanced SIMD variant: one complex double per register.
#include <arm_neon.h>

#include "kernel_tables.hpp"

namespace soliton_squeeze::simd::detail {
namespace {

inline float64x2_t load(const cplx* p) { return vld1q_f64(reinterpret_cast<const double*>(p)); }
inline void store(cplx* p, float64x2_t v) { vst1q_f64(reinterpret_cast<double*>(p), v); }

inline float64x2_t cmul(float64x2_t a, float64x2_t b) {
  const float64x2_t b_re = vdupq_laneq_f64(b, 0);
  const float64x2_t b_im = vdupq_laneq_f64(b, 1);
  const float64x2_t a_swap = vextq_f64(a, a, 1);
  const float64x2_t sign = {-1.0, 1.0};
  return vfmaq_f64(vmulq_f64(vmulq_f64(a_swap, b_im), sign), a, b_re);
}

inline float64x2_t conj(float64x2_t a) {
  const float64x2_t sign = {1.0, -1.0};
  return vmulq_f64(a, sign);
}

void scale_columns(cplx* data, const cplx* factor, std::size_t rows, std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = data + k * rows;
    for (std::size_t j = 0; j < rows; ++j) store(col + j, cmul(load(col + j), load(factor + j)));
  }
}

void kerr_mix(cplx* mu, cplx* nu, const cplx* e11, const cplx* e12, std::size_t rows,
              std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* m = mu + k * rows;
    cplx* n = nu + k * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const float64x2_t a = load(e11 + j);
      const float64x2_t b = load(e12 + j);
      const float64x2_t mj = load(m + j);
      const float64x2_t nj = load(n + j);
      store(m + j, vaddq_f64(cmul(a, mj), cmul(b, conj(nj))));
      store(n + j, vaddq_f64(cmul(a, nj), cmul(b, conj(mj))));
    }
  }
}

void kerr_pull_back(cplx* p, const cplx* e11, const cplx* e12, std::size_t rows,
                    std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    cplx* col = p + k * rows;
    for (std::size_t j = 0; j < rows; ++j) {
      const float64x2_t pj = load(col + j);
      store(col + j, vaddq_f64(cmul(load(e11 + j), pj), conj(cmul(load(e12 + j), pj))));
    }
  }
}

void dot_columns(const cplx* v, const cplx* m, cplx* out, std::size_t rows, std::size_t cols) {
  for (std::size_t k = 0; k < cols; ++k) {
    const cplx* col = m + k * rows;
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t j = 0;
    for (; j + 1 < rows; j += 2) {
      acc0 = vaddq_f64(acc0, cmul(load(v + j), load(col + j)));
      acc1 = vaddq_f64(acc1, cmul(load(v + j + 1), load(col + j + 1)));
    }
    if (j < rows) acc0 = vaddq_f64(acc0, cmul(load(v + j), load(col + j)));
    const float64x2_t acc = vaddq_f64(acc0, acc1);
    out[k] = cplx{vgetq_lane_f64(acc, 0), vgetq_lane_f64(acc, 1)};
  }
}

}  // namespace

const KernelTable& neon_table() {
  static const KernelTable table{Isa::neon, &scale_columns, &kerr_mix, &kerr_pull_back,
                                 &dot_columns};
  return table;
}

}  // namespace soliton_squeeze::simd::detail
