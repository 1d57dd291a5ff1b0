#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "lwave/signal_synth.hpp"
#include "lwave/spectral.hpp"
#include "lwave/virtual_set.hpp"

using lwave::BandSpec;
using lwave::FilterBand;
using lwave::GridField;
using lwave::GridShape;
using lwave::Site;

namespace {

// Mean squared periodic second difference, summed over axes, of values on an n^d lattice.
double roughness(std::span<const double> v, int dim, int n) {
  const GridShape shape(dim, n);
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Site x = shape.coords(i);
    for (int a = 0; a < dim; ++a) {
      Site l = x, r = x;
      l[a] = lwave::wrap_index(x[a] - 1, n);
      r[a] = lwave::wrap_index(x[a] + 1, n);
      const double d2 = v[shape.linear(l)] - 2.0 * v[i] + v[shape.linear(r)];
      acc += d2 * d2;
    }
  }
  return acc / static_cast<double>(v.size());
}

}  // namespace

TEST(Shock, PlacesSingleUnit) {
  const auto f = lwave::shock(GridShape(1, 8), Site{4});
  const std::vector<double> expected{0, 0, 0, 0, 1, 0, 0, 0};
  EXPECT_EQ(std::vector<double>(f.values().begin(), f.values().end()), expected);
  EXPECT_THROW(lwave::shock(GridShape(1, 8), Site{8}), lwave::DomainError);
  EXPECT_THROW(lwave::shock(GridShape(1, 8), Site{-1}), lwave::DomainError);
}

TEST(Shock, SpectrumIsFlat) {
  for (int dim : {1, 2, 3}) {
    const auto s = lwave::dft(lwave::shock(GridShape(dim, 8)));
    for (const auto& v : s.values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-14);
  }
}

TEST(Harmonic, SpecialFrequencies) {
  const GridShape shape(1, 16);
  const auto flat = lwave::harmonic(shape, Site{0});
  for (double v : flat.values()) EXPECT_DOUBLE_EQ(v, 1.0);
  const auto alt = lwave::harmonic(shape, Site{8});
  for (int x = 0; x < 16; ++x) EXPECT_DOUBLE_EQ(alt[static_cast<std::size_t>(x)], x % 2 ? -1.0 : 1.0);
  const auto quarter = lwave::harmonic(shape, Site{4});
  const double pattern[] = {1, 0, -1, 0};
  for (int x = 0; x < 16; ++x) EXPECT_NEAR(quarter[static_cast<std::size_t>(x)], pattern[x % 4], 1e-15);
  EXPECT_THROW(lwave::harmonic(shape, Site{9}), lwave::DomainError);
}

TEST(Harmonic, PhaseAndTwoDimensions) {
  const auto f = lwave::harmonic(GridShape(2, 8), Site{1, 2}, 0.25);
  for (std::size_t i = 0; i < f.size(); ++i) {
    const auto x = f.shape().coords(i);
    EXPECT_NEAR(f[i], std::cos(2 * std::numbers::pi * (x[0] + 2 * x[1]) / 8 + 0.25), 1e-14);
  }
}

TEST(WavePacket, EnvelopeAndCarrier) {
  const auto p = lwave::wave_packet(GridShape(1, 64), 4, 3.0, 32);
  EXPECT_DOUBLE_EQ(p[32], 1.0);
  EXPECT_NEAR(p[35], std::exp(-0.5) * std::cos(2 * std::numbers::pi * 4 * 3 / 64), 1e-15);
  EXPECT_LT(std::abs(p[0]), 1e-20);
  EXPECT_THROW(lwave::wave_packet(GridShape(2, 8), 1, 1.0, 0), lwave::DomainError);
  EXPECT_THROW(lwave::wave_packet(GridShape(1, 8), 1, 0.0, 0), lwave::DomainError);
}

TEST(BandSpec, HalfWidthLimits) {
  EXPECT_THROW((BandSpec{FilterBand::ZeroMax, 0}.validate(64)), lwave::DomainError);
  EXPECT_THROW((BandSpec{FilterBand::ZeroMax, 9}.validate(64)), lwave::DomainError);
  EXPECT_NO_THROW((BandSpec{FilterBand::Central, 8}.validate(64)));
  EXPECT_THROW(lwave::band_noise(GridShape(1, 64), BandSpec{FilterBand::ZeroMax, 0}, 1), lwave::DomainError);
}

TEST(BandSpec, Membership) {
  const BandSpec zm{FilterBand::ZeroMax, 2};
  EXPECT_TRUE(zm.axis_in_band(-2, 32));
  EXPECT_TRUE(zm.axis_in_band(15, 32));
  EXPECT_FALSE(zm.axis_in_band(3, 32));
  const BandSpec c{FilterBand::Central, 2};
  EXPECT_TRUE(c.axis_in_band(6, 32));
  EXPECT_TRUE(c.axis_in_band(-10, 32));
  EXPECT_FALSE(c.axis_in_band(0, 32));
}

class BandNoise : public ::testing::TestWithParam<std::tuple<int, FilterBand>> {};

TEST_P(BandNoise, ConfinedToBand) {
  const auto [dim, band] = GetParam();
  const int N = dim == 1 ? 256 : 64;
  const BandSpec spec{band, N / 32};
  const auto f = lwave::band_noise(GridShape(dim, N), spec, 99);
  const auto s = lwave::dft(f);
  double out = 0.0, in_err = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const auto freq = s.frequency_of(i);
    Site k{};
    std::copy(freq.begin(), freq.end(), k.begin());
    if (spec.contains(k, dim, N)) {
      in_err = std::max(in_err, std::abs(std::abs(s[i]) - 1.0));
    } else {
      out = std::max(out, std::abs(s[i]));
    }
  }
  EXPECT_LT(in_err, 1e-10);
  EXPECT_LT(out, 1e-10);
}

TEST_P(BandNoise, ReproducibleForSeed) {
  const auto [dim, band] = GetParam();
  const GridShape shape(dim, 64);
  const BandSpec spec{band, 2};
  const auto a = lwave::band_noise(shape, spec, 5);
  const auto b = lwave::band_noise(shape, spec, 5);
  const auto c = lwave::band_noise(shape, spec, 6);
  EXPECT_TRUE(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  EXPECT_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST_P(BandNoise, VirtualFunctionsAreSmooth) {
  const auto [dim, band] = GetParam();
  const int N = dim == 1 ? 512 : 64;
  const auto f = lwave::band_noise(GridShape(dim, N), BandSpec{band, N / 32}, 17);
  const double full = roughness(f.values(), dim, N);
  const auto vs = lwave::decompose(f, band);
  for (unsigned mask = 0; mask < vs.count(); ++mask) {
    const auto fn = vs.function(mask);
    const double sub = roughness(std::span<const double>(fn.data(), fn.size()), dim, N / 2);
    EXPECT_GE(full / sub, 10.0) << lwave::virtual_function_name(dim, mask);
  }
}

INSTANTIATE_TEST_SUITE_P(DimsAndBands, BandNoise,
                         ::testing::Combine(::testing::Values(1, 2),
                                            ::testing::Values(FilterBand::ZeroMax, FilterBand::Central)),
                         [](const auto& info) {
                           return "d" + std::to_string(std::get<0>(info.param)) + "_" +
                                  std::string(lwave::to_string(std::get<1>(info.param)));
                         });
