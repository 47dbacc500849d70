#include "soliton_squeeze/fft.hpp"

#include <fftw3.h>

#include <mutex>
#include <stdexcept>

namespace soliton_squeeze {
namespace {

// The FFTW planner and plan destruction are not thread safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

fftw_complex* as_fftw(cplx* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

struct BatchFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;

  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

BatchFft::BatchFft(std::size_t length, std::size_t batch)
    : length_(length), batch_(batch), plans_(std::make_unique<Plans>()) {
  if (length == 0 || batch == 0) throw std::invalid_argument("BatchFft: empty transform");
  ComplexVector scratch(length * batch);
  const int n[] = {static_cast<int>(length)};
  const int dist = static_cast<int>(length);
  // FFTW_ESTIMATE keeps the plan (and therefore the rounding) deterministic.
  std::lock_guard lock(planner_mutex());
  plans_->forward = fftw_plan_many_dft(1, n, static_cast<int>(batch), as_fftw(scratch.data()),
                                       nullptr, 1, dist, as_fftw(scratch.data()), nullptr, 1,
                                       dist, FFTW_FORWARD, FFTW_ESTIMATE);
  plans_->backward = fftw_plan_many_dft(1, n, static_cast<int>(batch), as_fftw(scratch.data()),
                                        nullptr, 1, dist, as_fftw(scratch.data()), nullptr, 1,
                                        dist, FFTW_BACKWARD, FFTW_ESTIMATE);
  if (!plans_->forward || !plans_->backward) throw std::runtime_error("BatchFft: planning failed");
}

BatchFft::~BatchFft() = default;
BatchFft::BatchFft(BatchFft&&) noexcept = default;
BatchFft& BatchFft::operator=(BatchFft&&) noexcept = default;

void BatchFft::forward(std::span<cplx> data) const {
  if (data.size() != length_ * batch_) throw std::invalid_argument("BatchFft: size mismatch");
  fftw_execute_dft(plans_->forward, as_fftw(data.data()), as_fftw(data.data()));
}

void BatchFft::backward(std::span<cplx> data) const {
  if (data.size() != length_ * batch_) throw std::invalid_argument("BatchFft: size mismatch");
  fftw_execute_dft(plans_->backward, as_fftw(data.data()), as_fftw(data.data()));
}

}  // namespace soliton_squeeze
