#pragma once

// Thin FFTW wrapper: multi-dimensional transforms over a subset of the axes
// of a row-major array, batched over the remaining axes. Plans are created
// once per (shape, axes, kind) and shared; FFTW's planner is not thread-safe,
// so creation is serialized while execution is not.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace rashba::fft {

enum class Kind { r2c, c2r, c2c_forward, c2c_backward };

using Shape = std::vector<std::size_t>;
using Axes = std::vector<std::size_t>;

/// Shape of the half-spectrum produced by an r2c transform over `axes`:
/// the last transformed axis shrinks to n/2 + 1.
inline Shape half_shape(Shape shape, const Axes& axes) {
  const std::size_t last = axes.back();
  shape[last] = shape[last] / 2 + 1;
  return shape;
}

inline std::size_t element_count(const Shape& shape) {
  std::size_t n = 1;
  for (auto e : shape) n *= e;
  return n;
}

inline std::vector<std::ptrdiff_t> row_major_strides(const Shape& shape) {
  std::vector<std::ptrdiff_t> s(shape.size(), 1);
  for (std::size_t a = shape.size(); a-- > 1;) {
    s[a - 1] = s[a] * static_cast<std::ptrdiff_t>(shape[a]);
  }
  return s;
}

namespace detail {

struct PlanKey {
  Shape shape;
  Axes axes;
  Kind kind;
  bool aligned;
  auto operator<=>(const PlanKey&) const = default;
};

class PlanCache {
 public:
  static PlanCache& instance() {
    static PlanCache cache;
    return cache;
  }

  fftw_plan get(const PlanKey& key) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(key);
    if (it != plans_.end()) {
      return it->second;
    }
    fftw_plan p = create(key);
    if (p == nullptr) {
      throw std::runtime_error("fft: FFTW failed to create a plan");
    }
    plans_.emplace(key, p);
    return p;
  }

  PlanCache(const PlanCache&) = delete;
  PlanCache& operator=(const PlanCache&) = delete;

  ~PlanCache() {
    for (auto& [k, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  PlanCache() = default;

  static fftw_plan create(const PlanKey& key) {
    for (auto a : key.axes) {
      if (a >= key.shape.size()) throw std::invalid_argument("fft: axis out of range");
    }
    if (!std::is_sorted(key.axes.begin(), key.axes.end()) || key.axes.empty()) {
      throw std::invalid_argument("fft: axes must be non-empty and sorted");
    }
    const bool real_in = key.kind == Kind::r2c;
    const bool real_out = key.kind == Kind::c2r;
    const Shape cshape =
        (real_in || real_out) ? half_shape(key.shape, key.axes) : key.shape;
    const auto rstride = row_major_strides(key.shape);
    const auto cstride = row_major_strides(cshape);
    const auto& istride = real_out ? cstride : (real_in ? rstride : cstride);
    const auto& ostride = real_in ? cstride : (real_out ? rstride : cstride);

    std::vector<fftw_iodim> dims;
    std::vector<fftw_iodim> batch;
    for (std::size_t a = 0; a < key.shape.size(); ++a) {
      const bool transformed = std::find(key.axes.begin(), key.axes.end(), a) != key.axes.end();
      // Batch extents over the halved axis never occur: it is always transformed.
      fftw_iodim d{static_cast<int>(key.shape[a]), static_cast<int>(istride[a]),
                   static_cast<int>(ostride[a])};
      (transformed ? dims : batch).push_back(d);
    }

    const unsigned flags = FFTW_ESTIMATE | (key.aligned ? 0u : FFTW_UNALIGNED);
    const std::size_t nreal = element_count(key.shape);
    const std::size_t ncomplex = element_count(cshape);
    // FFTW_ESTIMATE does not touch the arrays, but they must be valid pointers.
    std::unique_ptr<double, decltype(&fftw_free)> r(
        static_cast<double*>(fftw_malloc(sizeof(double) * std::max<std::size_t>(nreal, 1))),
        &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> c1(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(ncomplex, 1))),
        &fftw_free);
    std::unique_ptr<fftw_complex, decltype(&fftw_free)> c2(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * std::max<std::size_t>(ncomplex, 1))),
        &fftw_free);

    const int rank = static_cast<int>(dims.size());
    const int howmany = static_cast<int>(batch.size());
    switch (key.kind) {
      case Kind::r2c:
        return fftw_plan_guru_dft_r2c(rank, dims.data(), howmany, batch.data(), r.get(), c1.get(),
                                      flags);
      case Kind::c2r:
        return fftw_plan_guru_dft_c2r(rank, dims.data(), howmany, batch.data(), c1.get(), r.get(),
                                      flags);
      case Kind::c2c_forward:
        return fftw_plan_guru_dft(rank, dims.data(), howmany, batch.data(), c1.get(), c2.get(),
                                  FFTW_FORWARD, flags);
      case Kind::c2c_backward:
        return fftw_plan_guru_dft(rank, dims.data(), howmany, batch.data(), c1.get(), c2.get(),
                                  FFTW_BACKWARD, flags);
    }
    return nullptr;
  }

  std::mutex mutex_;
  std::map<PlanKey, fftw_plan> plans_;
};

inline fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }
inline fftw_complex* as_fftw(const std::complex<double>* p) {
  // FFTW's API is not const-correct for out-of-place inputs it does not modify.
  return reinterpret_cast<fftw_complex*>(const_cast<std::complex<double>*>(p));
}

// Plans made on fftw_malloc buffers may use SIMD kernels only for buffers
// with the same alignment; anything else gets an FFTW_UNALIGNED plan.
inline bool simd_aligned(const void* a, const void* b) {
  return fftw_alignment_of(static_cast<double*>(const_cast<void*>(a))) == 0 &&
         fftw_alignment_of(static_cast<double*>(const_cast<void*>(b))) == 0;
}

inline std::size_t transform_length(const Shape& shape, const Axes& axes) {
  std::size_t n = 1;
  for (auto a : axes) n *= shape[a];
  return n;
}

}  // namespace detail

/// Unnormalized forward real-to-complex transform over `axes` (out-of-place).
inline void forward_r2c(std::span<const double> in, std::span<std::complex<double>> out,
                        const Shape& shape, const Axes& axes) {
  if (in.size() != element_count(shape) || out.size() != element_count(half_shape(shape, axes))) {
    throw std::invalid_argument("fft::forward_r2c: buffer size mismatch");
  }
  fftw_plan p = detail::PlanCache::instance().get(
      {shape, axes, Kind::r2c, detail::simd_aligned(in.data(), out.data())});
  fftw_execute_dft_r2c(p, const_cast<double*>(in.data()), detail::as_fftw(out.data()));
}

/// Normalized inverse complex-to-real transform. The input buffer is destroyed.
inline void inverse_c2r(std::span<std::complex<double>> in, std::span<double> out,
                        const Shape& shape, const Axes& axes) {
  if (out.size() != element_count(shape) || in.size() != element_count(half_shape(shape, axes))) {
    throw std::invalid_argument("fft::inverse_c2r: buffer size mismatch");
  }
  fftw_plan p = detail::PlanCache::instance().get(
      {shape, axes, Kind::c2r, detail::simd_aligned(in.data(), out.data())});
  fftw_execute_dft_c2r(p, detail::as_fftw(in.data()), out.data());
  const double scale = 1.0 / static_cast<double>(detail::transform_length(shape, axes));
  for (auto& v : out) v *= scale;
}

/// Complex transform over `axes`. sign = -1 forward (unnormalized), +1 inverse (normalized).
inline void transform_c2c(std::span<const std::complex<double>> in,
                          std::span<std::complex<double>> out, const Shape& shape,
                          const Axes& axes, int sign) {
  if (in.size() != element_count(shape) || out.size() != in.size()) {
    throw std::invalid_argument("fft::transform_c2c: buffer size mismatch");
  }
  if (in.data() == out.data()) {
    throw std::invalid_argument("fft::transform_c2c: transforms are out-of-place");
  }
  const Kind kind = sign < 0 ? Kind::c2c_forward : Kind::c2c_backward;
  fftw_plan p = detail::PlanCache::instance().get(
      {shape, axes, kind, detail::simd_aligned(in.data(), out.data())});
  fftw_execute_dft(p, detail::as_fftw(in.data()), detail::as_fftw(out.data()));
  if (sign > 0) {
    const double scale = 1.0 / static_cast<double>(detail::transform_length(shape, axes));
    for (auto& v : out) v *= scale;
  }
}

/// Signed DFT index of bin m in a length-n transform, in [-n/2, n/2).
inline long signed_index(std::size_t m, std::size_t n) {
  const long mm = static_cast<long>(m);
  const long nn = static_cast<long>(n);
  return mm < (nn + 1) / 2 ? mm : mm - nn;
}

inline bool is_nyquist(std::size_t m, std::size_t n) { return n % 2 == 0 && m == n / 2; }

}  // namespace rashba::fft
