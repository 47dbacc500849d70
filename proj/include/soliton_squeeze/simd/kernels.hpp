#pragma once

// Data-parallel inner loops of the propagators. Every kernel has a scalar
// reference implementation; vectorized variants are selected once at
// startup from what the host CPU supports.
//
// Matrices are column-major with leading dimension == rows.

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

namespace soliton_squeeze::simd {

using cplx = std::complex<double>;

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;
  // data[j + k*rows] *= factor[j]
  void (*scale_columns)(cplx* data, const cplx* factor, std::size_t rows, std::size_t cols);
  // Per-row 2x2 Bogoliubov update applied to the (mu, nu) column pairs:
  //   mu <- e11*mu + e12*conj(nu),  nu <- e11*nu + e12*conj(mu)
  void (*kerr_mix)(cplx* mu, cplx* nu, const cplx* e11, const cplx* e12, std::size_t rows,
                   std::size_t cols);
  // Transpose action of the same update on covector columns:
  //   p <- e11*p + conj(e12*p)
  void (*kerr_pull_back)(cplx* p, const cplx* e11, const cplx* e12, std::size_t rows,
                         std::size_t cols);
  // out[k] = sum_j v[j] * m[j + k*rows]   (bilinear, no conjugation)
  void (*dot_columns)(const cplx* v, const cplx* m, cplx* out, std::size_t rows,
                      std::size_t cols);
};

std::string_view isa_name(Isa isa);
std::optional<Isa> parse_isa(std::string_view name);

bool isa_supported(Isa isa);

/// Kernel table for a specific ISA; throws std::invalid_argument when the
/// host (or this build) cannot run it.
const KernelTable& kernels_for(Isa isa);

/// Best supported table. SOLITON_SQUEEZE_SIMD=scalar|avx2|neon overrides the
/// choice (falls back to scalar with a warning if unsupported).
const KernelTable& active_kernels();

// Span front-ends over the active table.
void scale_columns(std::span<cplx> data, std::span<const cplx> factor);
void kerr_mix(std::span<cplx> mu, std::span<cplx> nu, std::span<const cplx> e11,
              std::span<const cplx> e12);
void kerr_pull_back(std::span<cplx> p, std::span<const cplx> e11, std::span<const cplx> e12);
void dot_columns(std::span<const cplx> v, std::span<const cplx> m, std::span<cplx> out);

}  // namespace soliton_squeeze::simd
