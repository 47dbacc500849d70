#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <new>
#include <span>
#include <vector>

namespace soliton_squeeze {

using cplx = std::complex<double>;

/// 64-byte aligned allocator, so every buffer handed to FFTW has the same
/// alignment class and plan selection is reproducible run to run.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() noexcept = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) {
    return static_cast<T*>(::operator new(n * sizeof(T), alignment));
  }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept { return true; }
};

using ComplexVector = std::vector<cplx, AlignedAllocator<cplx>>;

/// In-place batched 1-D complex transforms over `batch` contiguous columns of
/// length `length`. Forward uses exp(-i...), backward is unnormalized.
/// Planning is serialized internally; execution is reentrant.
class BatchFft {
 public:
  BatchFft(std::size_t length, std::size_t batch);
  ~BatchFft();
  BatchFft(BatchFft&&) noexcept;
  BatchFft& operator=(BatchFft&&) noexcept;
  BatchFft(const BatchFft&) = delete;
  BatchFft& operator=(const BatchFft&) = delete;

  std::size_t length() const { return length_; }
  std::size_t batch() const { return batch_; }

  // `data` must hold length*batch values and come from an AlignedAllocator.
  void forward(std::span<cplx> data) const;
  void backward(std::span<cplx> data) const;

 private:
  struct Plans;
  std::size_t length_ = 0;
  std::size_t batch_ = 0;
  std::unique_ptr<Plans> plans_;
};

}  // namespace soliton_squeeze
