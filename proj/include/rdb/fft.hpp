#pragma once

// Thin RAII layer over FFTW3 for batched 1D complex transforms.

#include <algorithm>
#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>

#include <fftw3.h>

namespace rdb::fft {

enum class Direction { Forward, Backward };

namespace detail {

// FFTW's planner is not thread-safe; execution with new-array functions is.
inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

template <typename Real>
struct Traits;

template <>
struct Traits<double> {
  using plan = fftw_plan;
  using complex = fftw_complex;
  static void* alloc(std::size_t bytes) { return fftw_malloc(bytes); }
  static void release(void* p) { fftw_free(p); }
  static plan make(int n, int howmany, complex* buf, int sign) {
    int dims[1] = {n};
    return fftw_plan_many_dft(1, dims, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign,
                              FFTW_ESTIMATE);
  }
  static void run(plan p, complex* buf) { fftw_execute_dft(p, buf, buf); }
  static void destroy(plan p) { fftw_destroy_plan(p); }
};

template <>
struct Traits<float> {
  using plan = fftwf_plan;
  using complex = fftwf_complex;
  static void* alloc(std::size_t bytes) { return fftwf_malloc(bytes); }
  static void release(void* p) { fftwf_free(p); }
  static plan make(int n, int howmany, complex* buf, int sign) {
    int dims[1] = {n};
    return fftwf_plan_many_dft(1, dims, howmany, buf, nullptr, 1, n, buf, nullptr, 1, n, sign,
                               FFTW_ESTIMATE);
  }
  static void run(plan p, complex* buf) { fftwf_execute_dft(p, buf, buf); }
  static void destroy(plan p) { fftwf_destroy_plan(p); }
};

}  // namespace detail

/// SIMD-aligned buffer of `count` complex values, zero-initialised.
template <typename Real>
class Buffer {
 public:
  using value_type = std::complex<Real>;

  explicit Buffer(std::size_t count)
      : size_(count),
        data_(static_cast<value_type*>(detail::Traits<Real>::alloc(sizeof(value_type) * (count ? count : 1))),
              &detail::Traits<Real>::release) {
    if (!data_) throw std::bad_alloc();
    std::fill(data_.get(), data_.get() + size_, value_type{});
  }

  value_type* data() { return data_.get(); }
  const value_type* data() const { return data_.get(); }
  std::size_t size() const { return size_; }
  value_type& operator[](std::size_t i) { return data_[i]; }
  const value_type& operator[](std::size_t i) const { return data_[i]; }
  std::span<value_type> span() { return {data_.get(), size_}; }
  void zero() { std::fill(data_.get(), data_.get() + size_, value_type{}); }

 private:
  std::size_t size_;
  std::unique_ptr<value_type[], void (*)(void*)> data_;
};

/// In-place batched transform of `howmany` contiguous rows of length `n`.
/// Unnormalised in both directions. Forward uses exp(-j...), backward exp(+j...).
template <typename Real>
class BatchPlan {
 public:
  BatchPlan(std::size_t n, std::size_t howmany, Direction dir) : n_(n), howmany_(howmany) {
    Buffer<Real> probe(n * howmany);
    std::lock_guard lock(detail::planner_mutex());
    plan_ = detail::Traits<Real>::make(static_cast<int>(n), static_cast<int>(howmany),
                                       reinterpret_cast<typename detail::Traits<Real>::complex*>(probe.data()),
                                       dir == Direction::Forward ? FFTW_FORWARD : FFTW_BACKWARD);
    if (!plan_) throw std::runtime_error("fftw planner failed");
  }
  BatchPlan(const BatchPlan&) = delete;
  BatchPlan& operator=(const BatchPlan&) = delete;
  ~BatchPlan() {
    std::lock_guard lock(detail::planner_mutex());
    detail::Traits<Real>::destroy(plan_);
  }

  std::size_t length() const { return n_; }
  std::size_t batch() const { return howmany_; }

  /// `buf` must come from Buffer<Real> and hold at least length()*batch() values.
  void execute(Buffer<Real>& buf) const {
    if (buf.size() < n_ * howmany_) throw std::invalid_argument("fft buffer too small");
    detail::Traits<Real>::run(plan_, reinterpret_cast<typename detail::Traits<Real>::complex*>(buf.data()));
  }

 private:
  std::size_t n_;
  std::size_t howmany_;
  typename detail::Traits<Real>::plan plan_{};
};

}  // namespace rdb::fft
