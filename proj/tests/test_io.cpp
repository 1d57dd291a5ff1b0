#include <gtest/gtest.h>

#include <bit>
#include <cstring>
#include <filesystem>
#include <sstream>

#include "lwave/experiment.hpp"
#include "lwave/io.hpp"

using lwave::FilterBand;
using lwave::FormatError;

namespace {

lwave::History<double> small_history() {
  lwave::SimulationSpec s;
  s.dim = 2;
  s.grid = 8;
  s.frames = 5;
  s.band = FilterBand::Central;
  return lwave::simulate_history(s);
}

std::string serialize(const lwave::History<double>& h) {
  std::ostringstream os;
  lwave::write_history(os, h);
  return os.str();
}

std::uint64_t failure_offset(const std::string& bytes) {
  std::istringstream is(bytes);
  try {
    lwave::read_history(is);
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no format error";
  return 0;
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  for (std::string l; std::getline(is, l);) out.push_back(l);
  return out;
}

}  // namespace

TEST(HistoryFile, HeaderLayout) {
  const auto bytes = serialize(small_history());
  ASSERT_EQ(bytes.size(), 32u + 5u * 64u * 8u);
  EXPECT_EQ(bytes.substr(0, 4), "LWAV");
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  EXPECT_EQ(u8(4) | u8(5) << 8, 1);
  EXPECT_EQ(u8(6), 2);
  EXPECT_EQ(u8(8), 8);
  EXPECT_EQ(u8(12), 5);
  EXPECT_EQ(u8(16), 1);
  // Second frame value at the centre site: little-endian f64.
  std::uint64_t raw = 0;
  for (int b = 7; b >= 0; --b) raw = raw << 8 | u8(32 + 64 * 8 + 8 * (4 + 8 * 4) + static_cast<std::size_t>(b));
  EXPECT_EQ(std::bit_cast<double>(raw), small_history().frame(1).at({4, 4, 0, 0}));
}

TEST(HistoryFile, RoundTripIsExact) {
  const auto h = small_history();
  std::istringstream is(serialize(h));
  const auto back = lwave::read_history(is);
  EXPECT_EQ(back.shape(), h.shape());
  EXPECT_EQ(back.band(), h.band());
  ASSERT_EQ(back.frame_count(), h.frame_count());
  for (std::size_t k = 0; k < h.frame_count(); ++k) {
    EXPECT_TRUE(std::equal(h.frame(k).values().begin(), h.frame(k).values().end(), back.frame(k).values().begin()));
    EXPECT_EQ(back.frame(k).tau(), static_cast<std::int64_t>(k));
  }
  EXPECT_EQ(serialize(back), serialize(h));
}

TEST(HistoryFile, FileRoundTripAndPathErrors) {
  const auto dir = std::filesystem::temp_directory_path() / "lwave_io_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "h.lwav";
  lwave::write_history(path, small_history());
  EXPECT_EQ(lwave::read_history(path).frame_count(), 5u);
  EXPECT_THROW(lwave::read_history(dir / "missing.lwav"), lwave::IoError);
  EXPECT_THROW(lwave::write_history(dir / "no" / "such" / "dir.lwav", small_history()), lwave::IoError);
  std::filesystem::remove_all(dir);
}

TEST(HistoryFile, MalformedInputsReportOffsets) {
  const auto good = serialize(small_history());
  EXPECT_EQ(failure_offset(good.substr(0, 20)), 20u);
  auto bad = good;
  bad[0] = 'X';
  EXPECT_EQ(failure_offset(bad), 0u);
  bad = good;
  bad[4] = 9;
  EXPECT_EQ(failure_offset(bad), 4u);
  bad = good;
  bad[6] = 5;
  EXPECT_EQ(failure_offset(bad), 6u);
  bad = good;
  bad[8] = 7;
  EXPECT_EQ(failure_offset(bad), 8u);
  bad = good;
  bad[12] = 0;
  EXPECT_EQ(failure_offset(bad), 12u);
  bad = good;
  bad[16] = 2;
  EXPECT_EQ(failure_offset(bad), 16u);
  bad = good;
  bad[20] = 1;
  EXPECT_EQ(failure_offset(bad), 20u);
  EXPECT_EQ(failure_offset(good.substr(0, good.size() - 3)), good.size() - 3);
  EXPECT_EQ(failure_offset(good + "x"), good.size());
  bad = good;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::memcpy(&bad[32 + 8 * 10], &nan, 8);
  EXPECT_EQ(failure_offset(bad), 32u + 80u);
}

TEST(HistoryFile, DynamicRange) {
  lwave::SimulationSpec s;
  s.grid = 64;
  s.frames = 64;
  EXPECT_GT(lwave::dynamic_range(lwave::simulate_history(s)), 1e8);
  EXPECT_NEAR(lwave::dynamic_range(small_history()), small_history().growth().back(), 1e-12);
}

TEST(Csv, Coefficients) {
  std::ostringstream os;
  lwave::write_coefficients_csv(os, lwave::design_filter(2, FilterBand::ZeroMax));
  const auto l = lines(os.str());
  ASSERT_EQ(l.size(), 3u);
  EXPECT_EQ(l[0], "index,value");
  EXPECT_EQ(l[1], "1,0.5625");
  EXPECT_EQ(l[2], "2,-0.020833333333333332");
}

TEST(Csv, SpectrumAndError) {
  const auto f = lwave::design_filter(1, FilterBand::Central);
  std::ostringstream spec;
  lwave::write_spectrum_csv(spec, lwave::filter_spectrum(f, 8));
  auto l = lines(spec.str());
  EXPECT_EQ(l[0], "f,re,im");
  EXPECT_EQ(l.size(), 9u);
  EXPECT_EQ(l[1].substr(0, 3), "-3,");
  std::ostringstream err;
  lwave::write_error_csv(err, lwave::filter_error_curve(f, 8));
  EXPECT_EQ(lines(err.str())[0], "f,error");
}

TEST(Csv, GrowthRidgeAndPeaks) {
  std::ostringstream g;
  lwave::write_growth_csv(g, {1.0, 1.5});
  EXPECT_EQ(lines(g.str()), (std::vector<std::string>{"tau,max_abs", "0,1", "1,1.5"}));

  lwave::SimulationSpec s;
  s.grid = 16;
  s.frames = 16;
  const auto run = lwave::simulate_afc(s);
  std::ostringstream r;
  lwave::write_ridge_csv(r, run.spectrum);
  const auto rl = lines(r.str());
  EXPECT_EQ(rl[0], "f_x,f_tau,magnitude");
  EXPECT_EQ(rl.size(), 17u);

  lwave::SimulationSpec s2;
  s2.dim = 2;
  s2.grid = 16;
  s2.frames = 16;
  const auto fit = lwave::cone_extract(lwave::simulate_afc(s2).spectrum, 0.3);
  std::ostringstream p;
  lwave::write_peaks_csv(p, fit, 2);
  const auto pl = lines(p.str());
  EXPECT_EQ(pl[0], "f_x,f_y,f_tau,magnitude,radius,residual_sq,relative");
  EXPECT_EQ(pl.size(), fit.peaks.size() + 1);
}

TEST(Csv, PdeAndField) {
  lwave::PdeResidual r;
  r.functions.push_back({"p", 1.0, 0.01, 0.01});
  std::ostringstream os;
  lwave::write_pde_csv(os, r);
  EXPECT_EQ(lines(os.str()), (std::vector<std::string>{"function,rms_lhs,rms_residual,relative", "p,1,0.01,0.01"}));

  std::ostringstream f;
  lwave::write_field_csv(f, lwave::shock(lwave::GridShape(2, 4), lwave::Site{1, 2}));
  EXPECT_EQ(lines(f.str())[2], "0,1,0,0");
  EXPECT_THROW(lwave::write_field_csv(f, lwave::GridField<double>(lwave::GridShape(3, 4))), lwave::DomainError);
}

TEST(Pgm, HeaderAndPixels) {
  lwave::SimulationSpec s;
  s.grid = 16;
  s.frames = 12;
  const auto spectrum = lwave::simulate_afc(s).spectrum;
  for (int bits : {8, 16}) {
    std::ostringstream os;
    lwave::write_pgm(os, spectrum, bits);
    const auto text = os.str();
    const std::string header = bits == 8 ? "P5\n16 12\n255\n" : "P5\n16 12\n65535\n";
    ASSERT_EQ(text.substr(0, header.size()), header);
    EXPECT_EQ(text.size(), header.size() + 16u * 12u * (bits / 8));
    const auto peak = std::max_element(text.begin() + static_cast<std::ptrdiff_t>(header.size()), text.end(),
                                       [](char a, char b) { return static_cast<unsigned char>(a) < static_cast<unsigned char>(b); });
    EXPECT_EQ(static_cast<unsigned char>(*peak), 255);
  }
  std::ostringstream os;
  EXPECT_THROW(lwave::write_pgm(os, spectrum, 12), lwave::DomainError);
}

TEST(Pgm, SliceOfHigherRankSpectrum) {
  lwave::SimulationSpec s;
  s.dim = 2;
  s.grid = 8;
  s.frames = 6;
  const auto spectrum = lwave::simulate_afc(s).spectrum;
  const auto slice = lwave::slice_x_tau(spectrum);
  EXPECT_EQ(slice.dims(), (std::vector<std::size_t>{8, 6}));
  EXPECT_EQ(slice.at({3, 2}), spectrum.at({3, 0, 2}));
  const int fixed[] = {2};
  EXPECT_EQ(lwave::slice_x_tau(spectrum, fixed).at({1, 1}), spectrum.at({1, 2, 1}));
}
