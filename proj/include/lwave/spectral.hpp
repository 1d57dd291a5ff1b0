#pragma once

// Multidimensional DFTs, amplitude-frequency characteristics (AFC) of
// simulation histories, ridge and cone extraction, group-velocity estimates.
//
// Forward transforms are unnormalized with the negative exponent
//   F(f) = sum_x S(x) exp(-2 pi i f.x / N);
// inverse transforms carry 1/prod(dims). Storage is natural order (index 0 =
// frequency 0) with axis 0 fastest; frequencies are reported centered,
// -n/2 < f <= n/2.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/scalar_traits.hpp"

namespace lwave {

/// Centered frequency of a natural-order index: index for index <= n/2, index - n above.
constexpr int spectral_frequency(int index, int n) { return index <= n / 2 ? index : index - n; }

enum class FftDirection : std::uint8_t { Forward, Inverse };

enum class FftAlgorithm : std::uint8_t {
  Auto,        ///< radix-2 for powers of two, mixed radix otherwise
  Radix2,      ///< iterative Cooley-Tukey; power-of-two lengths only
  MixedRadix,  ///< recursive prime-factor decimation, direct sums for prime factors
  Direct,      ///< O(n^2) reference sum
};

namespace detail {

template <class R>
struct Cx {
  R re{0};
  R im{0};
};

template <class R>
inline Cx<R> cmul(const Cx<R>& a, const Cx<R>& b) {
  return {a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re};
}

template <class R>
inline void cadd_mul(Cx<R>& acc, const Cx<R>& a, const Cx<R>& b) {
  acc.re += a.re * b.re - a.im * b.im;
  acc.im += a.re * b.im + a.im * b.re;
}

template <class R>
R two_pi() {
  if constexpr (std::is_floating_point_v<R>) {
    return R(2) * std::numbers::pi_v<R>;
  } else {
    using std::atan;
    return R(8) * atan(R(1));
  }
}

inline bool is_power_of_two(std::size_t n) { return n && !(n & (n - 1)); }

inline std::vector<std::size_t> prime_factors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t p = 2; p * p <= n; ++p) {
    while (n % p == 0) {
      out.push_back(p);
      n /= p;
    }
  }
  if (n > 1) out.push_back(n);
  return out;
}

/// One-dimensional transform of fixed length with precomputed twiddles exp(-2 pi i j / n).
template <class R>
class FftPlan {
 public:
  FftPlan(std::size_t n, FftAlgorithm algo) : n_(n), algo_(algo) {
    if (n == 0) throw DomainError("transform length must be positive");
    if (algo_ == FftAlgorithm::Auto) algo_ = is_power_of_two(n) ? FftAlgorithm::Radix2 : FftAlgorithm::MixedRadix;
    if (algo_ == FftAlgorithm::Radix2 && !is_power_of_two(n)) {
      throw DomainError("radix-2 transform needs a power-of-two length, got " + std::to_string(n));
    }
    using std::cos;
    using std::sin;
    twiddle_.resize(n);
    const R step = two_pi<R>() / R(static_cast<double>(n));
    for (std::size_t j = 0; j < n; ++j) {
      const R angle = step * R(static_cast<double>(j));
      twiddle_[j] = {R(cos(angle)), R(-sin(angle))};
    }
    factors_ = prime_factors(n);
    scratch_.resize(n);
    work_.resize(n);
  }

  std::size_t size() const { return n_; }
  FftAlgorithm algorithm() const { return algo_; }

  /// Transforms n values at data[0], data[stride], ... in place.
  void transform(Cx<R>* data, std::size_t stride, FftDirection dir) {
    for (std::size_t j = 0; j < n_; ++j) scratch_[j] = data[j * stride];
    inverse_ = dir == FftDirection::Inverse;
    switch (algo_) {
      case FftAlgorithm::Radix2: radix2(scratch_.data()); break;
      case FftAlgorithm::Direct: direct(scratch_.data(), work_.data()); std::swap(scratch_, work_); break;
      default:
        mixed(scratch_.data(), 1, work_.data(), n_, 1, 0);
        std::swap(scratch_, work_);
        break;
    }
    for (std::size_t j = 0; j < n_; ++j) data[j * stride] = scratch_[j];
  }

 private:
  Cx<R> w(std::size_t e) const {
    const Cx<R>& t = twiddle_[e % n_];
    return inverse_ ? Cx<R>{t.re, R(-t.im)} : t;
  }

  void direct(const Cx<R>* in, Cx<R>* out) const {
    for (std::size_t k = 0; k < n_; ++k) {
      Cx<R> acc;
      for (std::size_t j = 0; j < n_; ++j) cadd_mul(acc, in[j], w((j * k) % n_));
      out[k] = acc;
    }
  }

  void radix2(Cx<R>* a) const {
    const std::size_t n = n_;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
      std::size_t bit = n >> 1;
      for (; j & bit; bit >>= 1) j ^= bit;
      j ^= bit;
      if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
      const std::size_t half = len / 2, step = n / len;
      for (std::size_t i = 0; i < n; i += len) {
        for (std::size_t k = 0; k < half; ++k) {
          const Cx<R> t = cmul(a[i + k + half], w(k * step));
          Cx<R>& u = a[i + k];
          a[i + k + half] = {u.re - t.re, u.im - t.im};
          u.re += t.re;
          u.im += t.im;
        }
      }
    }
  }

  // Decimation in time over the prime factors: out[0..n) = DFT of in[0], in[s], in[2s], ...
  // `tw_step` maps the subproblem's twiddles onto the full table.
  void mixed(const Cx<R>* in, std::size_t s, Cx<R>* out, std::size_t n, std::size_t tw_step, std::size_t fi) const {
    if (n == 1) {
      out[0] = in[0];
      return;
    }
    const std::size_t p = factors_[fi];
    const std::size_t m = n / p;
    for (std::size_t r = 0; r < p; ++r) mixed(in + r * s, s * p, out + r * m, m, tw_step * p, fi + 1);
    std::vector<Cx<R>> col(p);
    for (std::size_t k = 0; k < m; ++k) {
      for (std::size_t r = 0; r < p; ++r) col[r] = out[r * m + k];
      for (std::size_t q = 0; q < p; ++q) {
        const std::size_t kk = k + q * m;
        Cx<R> acc = col[0];
        for (std::size_t r = 1; r < p; ++r) cadd_mul(acc, col[r], w((r * kk % n) * tw_step));
        out[kk] = acc;
      }
    }
  }

  std::size_t n_;
  FftAlgorithm algo_;
  bool inverse_ = false;
  std::vector<Cx<R>> twiddle_;
  std::vector<std::size_t> factors_;
  std::vector<Cx<R>> scratch_;
  std::vector<Cx<R>> work_;
};

/// Transforms axes [first_axis, last_axis) of a natural-order array with axis 0 fastest.
template <class R>
void fft_axes(std::vector<Cx<R>>& data, const std::vector<std::size_t>& dims, std::size_t first_axis,
              std::size_t last_axis, FftDirection dir, FftAlgorithm algo) {
  std::size_t total = 1;
  for (auto n : dims) total *= n;
  if (total != data.size()) throw DomainError("array size does not match its extents");
  std::size_t stride = 1;
  for (std::size_t a = 0; a < first_axis; ++a) stride *= dims[a];
  for (std::size_t a = first_axis; a < last_axis; ++a) {
    const std::size_t n = dims[a];
    if (n > 1) {
      FftPlan<R> plan(n, algo);
      const std::size_t block = stride * n;
      for (std::size_t outer = 0; outer < total; outer += block) {
        for (std::size_t inner = 0; inner < stride; ++inner) plan.transform(data.data() + outer + inner, stride, dir);
      }
    }
    stride *= n;
  }
}

template <class R, class T>
Cx<R> to_cx(const T& v) {
  if constexpr (is_complex_v<T>) {
    return {R(v.real()), R(v.imag())};
  } else {
    return {R(v), R(0)};
  }
}

template <class R>
std::complex<double> to_std(const Cx<R>& v) {
  return {to_double(v.re), to_double(v.im)};
}

}  // namespace detail

/// In-place multidimensional transform of a double-precision array (no normalization).
inline void fft_inplace(std::vector<std::complex<double>>& values, const std::vector<std::size_t>& dims,
                        FftDirection dir, FftAlgorithm algo = FftAlgorithm::Auto) {
  std::vector<detail::Cx<double>> work(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) work[i] = {values[i].real(), values[i].imag()};
  detail::fft_axes(work, dims, 0, dims.size(), dir, algo);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = {work[i].re, work[i].im};
}

/// Complex amplitudes on a frequency lattice, stored in natural order with axis 0 fastest.
class SpectrumArray {
 public:
  SpectrumArray() = default;
  SpectrumArray(std::vector<std::size_t> dims, std::vector<std::complex<double>> values)
      : dims_(std::move(dims)), values_(std::move(values)) {
    std::size_t total = 1;
    for (auto n : dims_) total *= n;
    if (dims_.empty() || total != values_.size()) throw DomainError("spectrum size does not match its extents");
  }

  const std::vector<std::size_t>& dims() const { return dims_; }
  std::size_t rank() const { return dims_.size(); }
  std::size_t size() const { return values_.size(); }
  std::span<const std::complex<double>> values() const { return values_; }
  const std::complex<double>& operator[](std::size_t i) const { return values_[i]; }

  /// Linear index of a centered frequency vector (components reduced modulo the extents).
  std::size_t index_of(std::span<const int> freq) const {
    if (freq.size() != dims_.size()) throw DomainError("frequency vector rank mismatch");
    std::size_t idx = 0;
    for (std::size_t a = dims_.size(); a-- > 0;) {
      const int n = static_cast<int>(dims_[a]);
      idx = idx * dims_[a] + static_cast<std::size_t>(wrap_index(freq[a], n));
    }
    return idx;
  }

  std::complex<double> at(std::span<const int> freq) const { return values_[index_of(freq)]; }
  std::complex<double> at(std::initializer_list<int> freq) const {
    return at(std::span<const int>(freq.begin(), freq.size()));
  }

  /// Centered frequency vector of a linear index.
  std::vector<int> frequency_of(std::size_t linear) const {
    std::vector<int> f(dims_.size());
    for (std::size_t a = 0; a < dims_.size(); ++a) {
      f[a] = spectral_frequency(static_cast<int>(linear % dims_[a]), static_cast<int>(dims_[a]));
      linear /= dims_[a];
    }
    return f;
  }

  double max_magnitude() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// |F| as a real-valued spectrum.
  SpectrumArray magnitudes() const {
    std::vector<std::complex<double>> mags(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i) mags[i] = std::abs(values_[i]);
    return SpectrumArray(dims_, std::move(mags));
  }

 private:
  std::vector<std::size_t> dims_;
  std::vector<std::complex<double>> values_;
};

/// Spatial transform of a field, computed in the field's own precision and rounded to double.
template <class T>
SpectrumArray dft(const GridField<T>& field, FftAlgorithm algo = FftAlgorithm::Auto) {
  using R = real_of_t<T>;
  std::vector<detail::Cx<R>> work(field.size());
  for (std::size_t i = 0; i < field.size(); ++i) work[i] = detail::to_cx<R>(field[i]);
  std::vector<std::size_t> dims(static_cast<std::size_t>(field.shape().dim()),
                                static_cast<std::size_t>(field.shape().extent()));
  detail::fft_axes(work, dims, 0, dims.size(), FftDirection::Forward, algo);
  std::vector<std::complex<double>> out(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) out[i] = detail::to_std(work[i]);
  return SpectrumArray(std::move(dims), std::move(out));
}

/// Transform of a plain double array with the given extents.
inline SpectrumArray dft(std::vector<std::complex<double>> values, std::vector<std::size_t> dims,
                         FftAlgorithm algo = FftAlgorithm::Auto) {
  fft_inplace(values, dims, FftDirection::Forward, algo);
  return SpectrumArray(std::move(dims), std::move(values));
}

/// Inverse transform including the 1/prod(dims) factor; natural-order values.
inline std::vector<std::complex<double>> inverse_dft(const SpectrumArray& spectrum,
                                                     FftAlgorithm algo = FftAlgorithm::Auto) {
  std::vector<std::complex<double>> values(spectrum.values().begin(), spectrum.values().end());
  fft_inplace(values, spectrum.dims(), FftDirection::Inverse, algo);
  const double scale = 1.0 / static_cast<double>(values.size());
  for (auto& v : values) v *= scale;
  return values;
}

/// Builds the (d+1)-dimensional transform of a history frame by frame: each frame's spatial
/// transform runs in the frame's precision, the temporal transform in double afterwards.
/// Only one frame of extended-precision data is alive at a time.
template <class T>
class AfcAccumulator {
 public:
  explicit AfcAccumulator(GridShape shape, FftAlgorithm algo = FftAlgorithm::Auto) : shape_(shape), algo_(algo) {}

  void add(const GridField<T>& frame) {
    if (!(frame.shape() == shape_)) throw DomainError("frame shape does not match the accumulator");
    const auto spec = dft(frame, algo_);
    buffer_.insert(buffer_.end(), spec.values().begin(), spec.values().end());
    ++frames_;
  }

  std::size_t frame_count() const { return frames_; }

  /// Complex (d+1)-dimensional spectrum, tau as the last axis.
  SpectrumArray spectrum() const {
    if (frames_ == 0) throw InsufficientData("no frames accumulated");
    std::vector<std::size_t> dims(static_cast<std::size_t>(shape_.dim()), static_cast<std::size_t>(shape_.extent()));
    dims.push_back(frames_);
    std::vector<detail::Cx<double>> work(buffer_.size());
    for (std::size_t i = 0; i < buffer_.size(); ++i) work[i] = {buffer_[i].real(), buffer_[i].imag()};
    detail::fft_axes(work, dims, dims.size() - 1, dims.size(), FftDirection::Forward, algo_);
    std::vector<std::complex<double>> out(work.size());
    for (std::size_t i = 0; i < work.size(); ++i) out[i] = {work[i].re, work[i].im};
    return SpectrumArray(std::move(dims), std::move(out));
  }

  /// Magnitude of spectrum().
  SpectrumArray afc() const { return spectrum().magnitudes(); }

 private:
  GridShape shape_;
  FftAlgorithm algo_;
  std::size_t frames_ = 0;
  std::vector<std::complex<double>> buffer_;
};

template <class T>
SpectrumArray dft(const History<T>& history, FftAlgorithm algo = FftAlgorithm::Auto) {
  AfcAccumulator<T> acc(history.shape(), algo);
  for (const auto& frame : history.frames()) acc.add(frame);
  return acc.spectrum();
}

/// Amplitude-frequency characteristic: |DFT| of the history with tau as the last axis.
template <class T>
SpectrumArray afc(const History<T>& history, FftAlgorithm algo = FftAlgorithm::Auto) {
  return dft(history, algo).magnitudes();
}

// ---------------------------------------------------------------------------
// Ridges and group velocity

/// Optional restriction of the temporal frequencies searched, in centered tau bins.
struct TauWindow {
  std::optional<double> min;
  std::optional<double> max;

  bool admits(double f_tau) const { return (!min || f_tau >= *min) && (!max || f_tau <= *max); }
};

struct RidgePoint {
  bool present = false;
  double f_tau = 0.0;  ///< centered temporal frequency, sub-bin refined
  double magnitude = 0.0;
};

namespace detail {

// 3-point parabolic vertex offset, clamped to half a bin.
inline double parabolic_offset(double a, double b, double c) {
  const double den = a - 2.0 * b + c;
  if (den == 0.0) return 0.0;
  return std::clamp(0.5 * (a - c) / den, -0.5, 0.5);
}

inline std::size_t column_base(const SpectrumArray& s, std::span<const int> f_spatial) {
  const std::size_t d = s.rank() - 1;
  if (f_spatial.size() != d) throw DomainError("spatial frequency rank mismatch");
  std::size_t idx = 0;
  for (std::size_t a = d; a-- > 0;) {
    idx = idx * s.dims()[a] + static_cast<std::size_t>(wrap_index(f_spatial[a], static_cast<int>(s.dims()[a])));
  }
  return idx;
}

}  // namespace detail

/// Temporal frequency of the largest magnitude in one spatial-frequency column.
inline RidgePoint ridge(const SpectrumArray& spectrum, std::span<const int> f_spatial, const TauWindow& window = {}) {
  if (spectrum.rank() < 2) throw DomainError("ridge needs a space-time spectrum");
  const std::size_t base = detail::column_base(spectrum, f_spatial);
  const std::size_t col_stride = spectrum.size() / spectrum.dims().back();
  const int K = static_cast<int>(spectrum.dims().back());
  auto mag = [&](int t) { return std::abs(spectrum[base + col_stride * static_cast<std::size_t>(wrap_index(t, K))]); };
  int best = -1;
  double best_mag = 0.0;
  for (int t = 0; t < K; ++t) {
    if (!window.admits(spectral_frequency(t, K))) continue;
    const double m = mag(t);
    if (m > best_mag) {
      best_mag = m;
      best = t;
    }
  }
  RidgePoint out;
  if (best < 0) return out;
  out.present = true;
  out.magnitude = best_mag;
  out.f_tau = spectral_frequency(best, K) + detail::parabolic_offset(mag(best - 1), best_mag, mag(best + 1));
  return out;
}

inline RidgePoint ridge(const SpectrumArray& spectrum, int f_x, const TauWindow& window = {}) {
  const int f[1] = {f_x};
  return ridge(spectrum, std::span<const int>(f, 1), window);
}

enum class BandSide : std::uint8_t { Both, Below, Above };

struct VelocityOptions {
  BandSide side = BandSide::Both;
  TauWindow window;
  double threshold = 0.3;  ///< peak threshold used by the d >= 2 radial fit
};

struct VelocityEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t points = 0;
};

namespace detail {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_stderr = 0.0;
};

inline LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LineFit fit;
  if (sxx == 0.0) throw InsufficientData("ridge points share one abscissa");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double sse = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double e = y[i] - fit.intercept - fit.slope * x[i];
    sse += e * e;
  }
  fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return fit;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Dispersion cones

enum class ThresholdMode : std::uint8_t {
  PerColumn,  ///< fraction of each spatial column's maximum
  Global,     ///< fraction of the whole spectrum's maximum
};

struct SpectralPeak {
  std::vector<int> f_spatial;  ///< centered spatial frequency
  double f_tau = 0.0;          ///< refined temporal frequency, in spatial-frequency units (bins * N/K)
  double magnitude = 0.0;
  double radius = 0.0;        ///< distance from the nearest apex
  double residual_sq = 0.0;   ///< f_tau^2 - radius^2
  double relative = 0.0;      ///< | |f_tau| - radius | / radius (NaN at an apex)
};

struct DispersionFit {
  std::vector<SpectralPeak> peaks;
  double median_relative = std::numeric_limits<double>::quiet_NaN();
  double group_velocity = std::numeric_limits<double>::quiet_NaN();
  double group_velocity_stderr = std::numeric_limits<double>::quiet_NaN();

  bool empty() const { return peaks.empty(); }
};

struct ConeOptions {
  FilterBand band = FilterBand::ZeroMax;
  std::vector<std::vector<double>> apexes;  ///< empty: default_apexes(band, d, N)
  double window = 0.0;                      ///< keep columns within this distance of an apex; 0 = all
  ThresholdMode mode = ThresholdMode::PerColumn;
};

/// Cone apexes of a band: the 2^d points of {0, N/2}^d for ZeroMax, (N/4, ..., N/4) for Central.
inline std::vector<std::vector<double>> default_apexes(FilterBand band, int dim, int N) {
  std::vector<std::vector<double>> out;
  if (band == FilterBand::Central) {
    out.emplace_back(static_cast<std::size_t>(dim), N / 4.0);
    return out;
  }
  for (unsigned mask = 0; mask < (1u << dim); ++mask) {
    std::vector<double> apex(static_cast<std::size_t>(dim));
    for (int a = 0; a < dim; ++a) apex[static_cast<std::size_t>(a)] = ((mask >> a) & 1u) ? N / 2.0 : 0.0;
    out.push_back(std::move(apex));
  }
  return out;
}

namespace detail {

inline double wrapped_delta(double a, double b, double n) {
  double d = std::fmod(a - b, n);
  if (d > n / 2) d -= n;
  if (d <= -n / 2) d += n;
  return d;
}

inline double distance_to(std::span<const int> f, const std::vector<double>& apex, double n) {
  double acc = 0.0;
  for (std::size_t a = 0; a < f.size(); ++a) {
    const double d = wrapped_delta(f[a], apex[a], n);
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace detail

/// Local maxima along tau of every spatial column above the threshold, each measured against the
/// nearest apex. Temporal frequencies are rescaled by N/K so the cone |f_tau| = r has unit slope.
inline DispersionFit cone_extract(const SpectrumArray& spectrum, double threshold_fraction,
                                  const ConeOptions& opts = {}) {
  if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0)) {
    throw DomainError("threshold fraction must lie in (0, 1)");
  }
  if (spectrum.rank() < 2) throw DomainError("cone_extract needs a space-time spectrum");
  const std::size_t d = spectrum.rank() - 1;
  const int N = static_cast<int>(spectrum.dims()[0]);
  for (std::size_t a = 1; a < d; ++a) {
    if (static_cast<int>(spectrum.dims()[a]) != N) throw DomainError("cone_extract needs equal spatial extents");
  }
  const int K = static_cast<int>(spectrum.dims().back());
  const double scale = static_cast<double>(N) / K;
  const auto apexes = opts.apexes.empty() ? default_apexes(opts.band, static_cast<int>(d), N) : opts.apexes;
  for (const auto& apex : apexes) {
    if (apex.size() != d) throw DomainError("apex rank does not match the spectrum");
  }
  const std::size_t columns = spectrum.size() / static_cast<std::size_t>(K);
  const double global_max = opts.mode == ThresholdMode::Global ? spectrum.max_magnitude() : 0.0;

  DispersionFit fit;
  std::vector<double> mags(static_cast<std::size_t>(K));
  for (std::size_t c = 0; c < columns; ++c) {
    std::vector<int> f(d);
    std::size_t rest = c;
    for (std::size_t a = 0; a < d; ++a) {
      f[a] = spectral_frequency(static_cast<int>(rest % spectrum.dims()[a]), static_cast<int>(spectrum.dims()[a]));
      rest /= spectrum.dims()[a];
    }
    double r = std::numeric_limits<double>::infinity();
    for (const auto& apex : apexes) r = std::min(r, detail::distance_to(f, apex, N));
    if (opts.window > 0.0 && r > opts.window) continue;

    double col_max = 0.0;
    for (int t = 0; t < K; ++t) {
      mags[static_cast<std::size_t>(t)] = std::abs(spectrum[c + columns * static_cast<std::size_t>(t)]);
      col_max = std::max(col_max, mags[static_cast<std::size_t>(t)]);
    }
    const double level = threshold_fraction * (opts.mode == ThresholdMode::Global ? global_max : col_max);
    if (col_max <= 0.0) continue;
    for (int t = 0; t < K; ++t) {
      const double a = mags[static_cast<std::size_t>(wrap_index(t - 1, K))];
      const double b = mags[static_cast<std::size_t>(t)];
      const double cc = mags[static_cast<std::size_t>(wrap_index(t + 1, K))];
      if (!(b > a && b >= cc && b >= level && b > 0.0)) continue;
      SpectralPeak p;
      p.f_spatial = f;
      p.f_tau = (spectral_frequency(t, K) + detail::parabolic_offset(a, b, cc)) * scale;
      p.magnitude = b;
      p.radius = r;
      p.residual_sq = p.f_tau * p.f_tau - r * r;
      p.relative = r > 0.0 ? std::abs(std::abs(p.f_tau) - r) / r : std::numeric_limits<double>::quiet_NaN();
      fit.peaks.push_back(std::move(p));
    }
  }

  std::vector<double> rel;
  double srr = 0.0, sry = 0.0;
  for (const auto& p : fit.peaks) {
    if (p.radius <= 0.0) continue;
    rel.push_back(p.relative);
    srr += p.radius * p.radius;
    sry += p.radius * std::abs(p.f_tau);
  }
  if (!rel.empty()) {
    const auto mid = rel.begin() + static_cast<std::ptrdiff_t>(rel.size() / 2);
    std::nth_element(rel.begin(), mid, rel.end());
    double med = *mid;
    if (rel.size() % 2 == 0) med = 0.5 * (med + *std::max_element(rel.begin(), mid));
    fit.median_relative = med;
  }
  if (rel.size() >= 2) {
    fit.group_velocity = sry / srr;
    double sse = 0.0;
    for (const auto& p : fit.peaks) {
      if (p.radius <= 0.0) continue;
      const double e = std::abs(p.f_tau) - fit.group_velocity * p.radius;
      sse += e * e;
    }
    fit.group_velocity_stderr = std::sqrt(sse / static_cast<double>(rel.size() - 1) / srr);
  }
  return fit;
}

/// Slope of the dispersion relation around a band centre.
/// d = 1: least-squares slope of the ridge f_tau(f_x) * N/K over f_x in [c - D, c + D] (or one side).
/// d >= 2: radial slope |f_tau| / r of the cone peaks within D of the centre.
inline VelocityEstimate group_velocity(const SpectrumArray& spectrum, std::span<const double> band_center,
                                       int half_width, const VelocityOptions& opts = {}) {
  if (half_width < 2) throw DomainError("group velocity needs a half-width of at least 2 bins");
  if (spectrum.rank() < 2) throw DomainError("group velocity needs a space-time spectrum");
  const std::size_t d = spectrum.rank() - 1;
  if (band_center.size() != d) throw DomainError("band centre rank mismatch");
  const int N = static_cast<int>(spectrum.dims()[0]);
  const int K = static_cast<int>(spectrum.dims().back());
  VelocityEstimate out;

  if (d == 1) {
    const int c = static_cast<int>(std::lround(band_center[0]));
    const int lo = opts.side == BandSide::Above ? 0 : -half_width;
    const int hi = opts.side == BandSide::Below ? 0 : half_width;
    std::vector<double> xs, ys;
    for (int j = lo; j <= hi; ++j) {
      const auto p = ridge(spectrum, c + j, opts.window);
      if (!p.present) continue;
      xs.push_back(j);
      ys.push_back(p.f_tau * static_cast<double>(N) / K);
    }
    if (xs.size() < 3) throw InsufficientData("fewer than 3 ridge points in the band window");
    const auto fit = detail::fit_line(xs, ys);
    out.value = fit.slope;
    out.std_error = fit.slope_stderr;
    out.points = xs.size();
    return out;
  }

  ConeOptions cone;
  cone.apexes = {std::vector<double>(band_center.begin(), band_center.end())};
  cone.window = half_width;
  const auto fit = cone_extract(spectrum, opts.threshold, cone);
  std::size_t usable = 0;
  for (const auto& p : fit.peaks) usable += p.radius > 0.0 ? 1 : 0;
  if (usable < 3) throw InsufficientData("fewer than 3 cone peaks around the band centre");
  out.value = fit.group_velocity;
  out.std_error = fit.group_velocity_stderr;
  out.points = usable;
  return out;
}

inline VelocityEstimate group_velocity(const SpectrumArray& spectrum, std::initializer_list<double> band_center,
                                       int half_width, const VelocityOptions& opts = {}) {
  return group_velocity(spectrum, std::span<const double>(band_center.begin(), band_center.size()), half_width, opts);
}

}  // namespace lwave
