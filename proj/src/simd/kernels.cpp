#include "soliton_squeeze/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

#include "kernel_tables.hpp"
#include "soliton_squeeze/error.hpp"

namespace soliton_squeeze::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "unknown";
}

std::optional<Isa> parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  return std::nullopt;
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SOLITON_SQUEEZE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(SOLITON_SQUEEZE_HAVE_NEON)
      return true;  // mandatory on AArch64
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernels_for(Isa isa) {
  if (!isa_supported(isa)) {
    throw std::invalid_argument("SIMD kernels '" + std::string(isa_name(isa)) +
                                "' are not available on this host");
  }
  switch (isa) {
#if defined(SOLITON_SQUEEZE_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_table();
#endif
#if defined(SOLITON_SQUEEZE_HAVE_NEON)
    case Isa::neon: return detail::neon_table();
#endif
    default: return detail::scalar_table();
  }
}

namespace {

const KernelTable& select_kernels() {
  if (const char* forced = std::getenv("SOLITON_SQUEEZE_SIMD"); forced && *forced) {
    const auto isa = parse_isa(forced);
    if (isa && isa_supported(*isa)) return kernels_for(*isa);
    warn(std::string("SOLITON_SQUEEZE_SIMD=") + forced + " unavailable, using scalar kernels");
    return detail::scalar_table();
  }
  for (Isa isa : {Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) return kernels_for(isa);
  }
  return detail::scalar_table();
}

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

}  // namespace

const KernelTable& active_kernels() {
  static const KernelTable& table = select_kernels();
  return table;
}

void scale_columns(std::span<cplx> data, std::span<const cplx> factor) {
  require(!factor.empty() && data.size() % factor.size() == 0, "scale_columns: shape mismatch");
  active_kernels().scale_columns(data.data(), factor.data(), factor.size(),
                                 data.size() / factor.size());
}

void kerr_mix(std::span<cplx> mu, std::span<cplx> nu, std::span<const cplx> e11,
              std::span<const cplx> e12) {
  require(!e11.empty() && e11.size() == e12.size() && mu.size() == nu.size() &&
              mu.size() % e11.size() == 0,
          "kerr_mix: shape mismatch");
  active_kernels().kerr_mix(mu.data(), nu.data(), e11.data(), e12.data(), e11.size(),
                            mu.size() / e11.size());
}

void kerr_pull_back(std::span<cplx> p, std::span<const cplx> e11, std::span<const cplx> e12) {
  require(!e11.empty() && e11.size() == e12.size() && p.size() % e11.size() == 0,
          "kerr_pull_back: shape mismatch");
  active_kernels().kerr_pull_back(p.data(), e11.data(), e12.data(), e11.size(),
                                  p.size() / e11.size());
}

void dot_columns(std::span<const cplx> v, std::span<const cplx> m, std::span<cplx> out) {
  require(!v.empty() && m.size() == v.size() * out.size(), "dot_columns: shape mismatch");
  active_kernels().dot_columns(v.data(), m.data(), out.data(), v.size(), out.size());
}

}  // namespace soliton_squeeze::simd
