#pragma once

#include <complex>
#include <cstddef>
#include <new>
#include <vector>

namespace rashba {

/// Allocator returning 64-byte aligned storage, so that FFTW can use its
/// SIMD kernels on our buffers.
template <class T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t alignment{64};

  AlignedAllocator() = default;
  template <class U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), alignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, alignment); }

  template <class U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

template <class T>
using AlignedVector = std::vector<T, AlignedAllocator<T>>;

using ComplexVector = AlignedVector<std::complex<double>>;

}  // namespace rashba
