#pragma once

// Initial conditions: unit impulses, harmonics, Gaussian wave packets and
// band-limited random fields in the [0]+[N/2] or [N/4] zones.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/spectral.hpp"

namespace lwave {

inline void require_site_in_range(const GridShape& shape, const Site& site) {
  for (int a = 0; a < shape.dim(); ++a) {
    if (site[a] < 0 || site[a] >= shape.extent()) {
      throw DomainError("site coordinate " + std::to_string(site[a]) + " outside [0, " +
                        std::to_string(shape.extent()) + ")");
    }
  }
}

/// (N/2, ..., N/2).
inline Site center_site(const GridShape& shape) {
  Site s{};
  for (int a = 0; a < shape.dim(); ++a) s[a] = shape.extent() / 2;
  return s;
}

/// 1 at `site`, 0 elsewhere.
inline GridField<double> shock(const GridShape& shape, const Site& site) {
  require_site_in_range(shape, site);
  GridField<double> f(shape);
  f.at(site) = 1.0;
  return f;
}

inline GridField<double> shock(const GridShape& shape) { return shock(shape, center_site(shape)); }

/// cos(2 pi f.x / N + phase).
inline GridField<double> harmonic(const GridShape& shape, const Site& freq, double phase = 0.0) {
  const int N = shape.extent();
  for (int a = 0; a < shape.dim(); ++a) {
    if (std::abs(freq[a]) > N / 2) throw DomainError("harmonic frequency components must satisfy |f| <= N/2");
  }
  GridField<double> out(shape);
  for (std::size_t i = 0; i < out.size(); ++i) {
    const Site x = shape.coords(i);
    // Integer phase accumulation keeps f.x exact before the single rounding in cos.
    long long dot = 0;
    for (int a = 0; a < shape.dim(); ++a) dot += static_cast<long long>(freq[a]) * x[a];
    dot %= N;
    out[i] = std::cos(2.0 * std::numbers::pi * static_cast<double>(dot) / N + phase);
  }
  return out;
}

/// Gaussian-windowed harmonic along the x axis (d = 1):
/// exp(-(x - c)^2 / (2 w^2)) cos(2 pi f (x - c) / N + phase), with x - c wrapped to the nearest image.
inline GridField<double> wave_packet(const GridShape& shape, int freq, double width, int center, double phase = 0.0) {
  if (shape.dim() != 1) throw DomainError("wave_packet is defined on 1D grids");
  if (!(width > 0.0)) throw DomainError("wave packet width must be positive");
  if (std::abs(freq) > shape.extent() / 2) throw DomainError("wave packet frequency must satisfy |f| <= N/2");
  const int N = shape.extent();
  GridField<double> out(shape);
  for (int x = 0; x < N; ++x) {
    int dx = wrap_index(x - center, N);
    if (dx > N / 2) dx -= N;
    const double env = std::exp(-0.5 * dx * dx / (width * width));
    out[static_cast<std::size_t>(x)] = env * std::cos(2.0 * std::numbers::pi * freq * dx / N + phase);
  }
  return out;
}

struct BandSpec {
  FilterBand band = FilterBand::ZeroMax;
  int half_width = 1;  ///< Delta, in frequency bins

  void validate(int N) const {
    if (half_width < 1) throw DomainError("band half-width must be >= 1");
    if (half_width > N / 8) {
      throw DomainError("band half-width " + std::to_string(half_width) + " exceeds N/8 = " + std::to_string(N / 8));
    }
  }

  /// Whether a centered frequency component lies in the band on one axis.
  bool axis_in_band(int f, int N) const {
    auto dist = [N](int a, int b) {
      const int d = wrap_index(a - b, N);
      return std::min(d, N - d);
    };
    if (band == FilterBand::ZeroMax) return dist(f, 0) <= half_width || dist(f, N / 2) <= half_width;
    return dist(f, N / 4) <= half_width || dist(f, -N / 4) <= half_width;
  }

  /// Every axis in band.
  bool contains(const Site& freq, int dim, int N) const {
    for (int a = 0; a < dim; ++a) {
      if (!axis_in_band(freq[a], N)) return false;
    }
    return true;
  }
};

namespace detail {

// Uniform double in [0, 1) from the top 53 bits; independent of the library's distributions.
inline double unit_interval(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

/// Real field whose (unnormalized forward) spectrum has unit magnitude and random phase on the band's bins and zero
/// elsewhere. Phases come from std::mt19937_64 seeded with `seed`; self-conjugate bins get a
/// random sign.
inline GridField<double> band_noise(const GridShape& shape, const BandSpec& spec, std::uint64_t seed) {
  spec.validate(shape.extent());
  const int N = shape.extent();
  const int d = shape.dim();
  std::mt19937_64 rng(seed);
  const std::size_t count = shape.site_count();
  std::vector<std::complex<double>> coeffs(count);
  for (std::size_t i = 0; i < count; ++i) {
    const Site k = shape.coords(i);
    Site freq{}, mirror{};
    for (int a = 0; a < d; ++a) {
      freq[a] = spectral_frequency(k[a], N);
      mirror[a] = -k[a];
    }
    if (!spec.contains(freq, d, N)) continue;
    const std::size_t j = shape.linear(mirror);
    if (j == i) {
      coeffs[i] = detail::unit_interval(rng) < 0.5 ? -1.0 : 1.0;
    } else if (i < j) {
      const double phi = 2.0 * std::numbers::pi * detail::unit_interval(rng);
      coeffs[i] = std::polar(1.0, phi);
      coeffs[j] = std::conj(coeffs[i]);
    }
  }
  std::vector<std::size_t> dims(static_cast<std::size_t>(d), static_cast<std::size_t>(N));
  fft_inplace(coeffs, dims, FftDirection::Inverse);
  const double scale = 1.0 / static_cast<double>(count);
  std::vector<double> values(count);
  double peak = 0.0, worst_imag = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    coeffs[i] *= scale;
    values[i] = coeffs[i].real();
    peak = std::max(peak, std::abs(coeffs[i].real()));
    worst_imag = std::max(worst_imag, std::abs(coeffs[i].imag()));
  }
  if (worst_imag > 1e-12 * std::max(peak, 1e-300)) {
    throw std::logic_error("band_noise: synthesized field is not real (imaginary residue " +
                           std::to_string(worst_imag) + ")");
  }
  return GridField<double>(shape, std::move(values));
}

}  // namespace lwave
