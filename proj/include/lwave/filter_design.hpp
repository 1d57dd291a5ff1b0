#pragma once

// Staggered differentiating filters alpha_n(m) for the [0]+[N/2] and [N/4]
// spectral bands, their tap spectra and deviation from the ideal
// differentiator.

#include <boost/multiprecision/cpp_int.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lwave/errors.hpp"

namespace lwave {

using Rational = boost::multiprecision::cpp_rational;

enum class FilterBand : std::uint8_t {
  ZeroMax = 0,  ///< zones [0]+[N/2]
  Central = 1,  ///< band [N/4]
};

inline std::string_view to_string(FilterBand band) {
  return band == FilterBand::ZeroMax ? "zeromax" : "central";
}

inline FilterBand parse_band(std::string_view text) {
  if (text == "zeromax") return FilterBand::ZeroMax;
  if (text == "central") return FilterBand::Central;
  throw DomainError("unknown band '" + std::string(text) + "' (expected zeromax or central)");
}

inline constexpr int kMaxFilterOrder = 32;

/// Weights alpha_n(1..n) of the odd-offset stencil
///   f'(x) ~ sum_m alpha_n(m) [f(x + 2m - 1) - f(x - 2m + 1)]          (ZeroMax)
///   sum_m alpha_n(m) [S(x + 2m - 1) + S(x - 2m + 1)]                   (Central)
/// Central weights are the magnitudes of the ZeroMax weights.
class DiffFilter {
 public:
  int order() const { return static_cast<int>(exact_.size()); }
  FilterBand band() const { return band_; }

  /// Coefficients alpha_n(1..n) as doubles; index 0 holds m = 1.
  std::span<const double> coeffs() const { return coeffs_; }
  /// The same coefficients as exact rationals.
  const std::vector<Rational>& exact_coeffs() const { return exact_; }

  double operator()(int m) const { return coeffs_.at(static_cast<std::size_t>(m - 1)); }

  /// Stencil offset of tap m: 2m - 1.
  static constexpr int offset(int m) { return 2 * m - 1; }

 private:
  friend DiffFilter design_filter(int n, FilterBand band);

  DiffFilter(FilterBand band, std::vector<Rational> exact) : band_(band), exact_(std::move(exact)) {
    coeffs_.reserve(exact_.size());
    for (const auto& r : exact_) coeffs_.push_back(r.convert_to<double>());
  }

  FilterBand band_;
  std::vector<Rational> exact_;
  std::vector<double> coeffs_;
};

/// alpha_n(m) = { 2(2m-1) prod_{k != m} [1 - (2m-1)^2 / (2k-1)^2] }^{-1}, evaluated
/// exactly; the Central band takes absolute values.
inline DiffFilter design_filter(int n, FilterBand band) {
  if (n < 1 || n > kMaxFilterOrder) {
    throw DomainError("filter order must be in [1, " + std::to_string(kMaxFilterOrder) + "], got " +
                      std::to_string(n));
  }
  std::vector<Rational> alpha;
  alpha.reserve(static_cast<std::size_t>(n));
  for (int m = 1; m <= n; ++m) {
    const long long om = 2LL * m - 1;
    Rational denom = Rational(2 * om);
    for (int k = 1; k <= n; ++k) {
      if (k == m) continue;
      const long long ok = 2LL * k - 1;
      denom *= Rational(1) - Rational(om * om, ok * ok);
    }
    Rational a = Rational(1) / denom;
    if (band == FilterBand::Central && a < 0) a = -a;
    alpha.push_back(std::move(a));
  }
  return DiffFilter(band, std::move(alpha));
}

/// Symbol of the filter as applied by the schemes, at angular frequency theta:
/// ZeroMax: sum 2 alpha sin((2m-1) theta) (the stencil multiplies a plane wave by i times this),
/// Central: sum 2 alpha cos((2m-1) theta).
inline double filter_symbol(const DiffFilter& filter, double theta) {
  double acc = 0.0;
  for (int m = 1; m <= filter.order(); ++m) {
    const double arg = DiffFilter::offset(m) * theta;
    acc += 2.0 * filter(m) * (filter.band() == FilterBand::ZeroMax ? std::sin(arg) : std::cos(arg));
  }
  return acc;
}

/// Filter response sampled at every frequency -N/2 < f <= N/2.
struct SpectralResponse {
  int N = 0;
  std::vector<std::complex<double>> values;  // values[f + N/2 - 1]

  std::complex<double> at(int f) const {
    const int wrapped = ((f % N) + N) % N;
    const int centered = wrapped > N / 2 ? wrapped - N : wrapped;
    return values.at(static_cast<std::size_t>(centered + N / 2 - 1));
  }
  static int first_frequency(int N) { return -N / 2 + 1; }
};

inline void require_even_length(int N, const char* what) {
  if (N < 4 || N % 2 != 0) {
    throw DomainError(std::string(what) + ": grid length must be even and >= 4, got " + std::to_string(N));
  }
}

/// DFT (negative exponent) of the tap pattern: +alpha at offset +(2m-1), -alpha (ZeroMax)
/// or +alpha (Central) at offset -(2m-1). For n = 1 this is -i sin(2 pi f/N) or cos(2 pi f/N).
inline SpectralResponse filter_spectrum(const DiffFilter& filter, int N) {
  require_even_length(N, "filter_spectrum");
  SpectralResponse out;
  out.N = N;
  out.values.reserve(static_cast<std::size_t>(N));
  const double step = 2.0 * std::numbers::pi / N;
  const double mirror = filter.band() == FilterBand::ZeroMax ? -1.0 : 1.0;
  for (int f = SpectralResponse::first_frequency(N); f <= N / 2; ++f) {
    std::complex<double> acc{0.0, 0.0};
    for (int m = 1; m <= filter.order(); ++m) {
      const double arg = step * f * DiffFilter::offset(m);
      acc += filter(m) * (std::polar(1.0, -arg) + mirror * std::polar(1.0, arg));
    }
    out.values.push_back(acc);
  }
  return out;
}

/// Ideal response the filter approximates, as a real gain.
/// ZeroMax: y1 = 2 pi f/N for |f| <= N/4 and y2 = pi - 2 pi |f|/N beyond (odd in f).
/// Central: y_c = pi/2 - 2 pi |f|/N (the differentiator centered on N/4, even in f).
inline double limiting_response(FilterBand band, int f, int N) {
  const double theta = 2.0 * std::numbers::pi * f / N;
  const double mag = std::abs(theta);
  if (band == FilterBand::Central) return std::numbers::pi / 2 - mag;
  const double sign = f < 0 ? -1.0 : 1.0;
  if (4 * std::abs(f) <= N) return theta;
  return sign * (std::numbers::pi - mag);
}

struct ErrorPoint {
  int f = 0;
  double error = 0.0;
};

/// Gain of the filter minus the limiting response, for every -N/2 < f <= N/2.
/// The ZeroMax gain is -Im(response) (the response is -i times a real gain).
inline std::vector<ErrorPoint> filter_error_curve(const DiffFilter& filter, int N) {
  const auto response = filter_spectrum(filter, N);
  std::vector<ErrorPoint> out;
  out.reserve(response.values.size());
  for (int f = SpectralResponse::first_frequency(N); f <= N / 2; ++f) {
    const auto r = response.at(f);
    const double gain = filter.band() == FilterBand::ZeroMax ? -r.imag() : r.real();
    out.push_back({f, gain - limiting_response(filter.band(), f, N)});
  }
  return out;
}

}  // namespace lwave
