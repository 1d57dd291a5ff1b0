#pragma once

// History files, CSV tables and PGM heatmaps.
//
// History layout (little-endian): 32-byte header
//   0  "LWAV"   4  u16 version   6  u16 d   8  u32 N   12  u32 K   16  u8 band   17..31 zero
// followed by K frames of N^d f64 values, x fastest.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "lwave/continuum_oracle.hpp"
#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/spectral.hpp"

namespace lwave {

inline constexpr std::uint16_t kHistoryVersion = 1;
inline constexpr std::size_t kHistoryHeaderBytes = 32;

/// I/O failure with the offending path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void put_le(std::string& buf, std::uint64_t v, int bytes) {
  for (int i = 0; i < bytes; ++i) buf.push_back(static_cast<char>((v >> (8 * i)) & 0xffu));
}

inline std::uint64_t get_le(const unsigned char* p, int bytes) {
  std::uint64_t v = 0;
  for (int i = bytes - 1; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

inline std::ofstream open_out(const std::filesystem::path& path, bool binary = false) {
  std::ofstream os(path, binary ? std::ios::binary : std::ios::out);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  return os;
}

inline void close_checked(std::ofstream& os, const std::filesystem::path& path) {
  os.close();
  if (!os) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace detail

inline void write_history(std::ostream& os, const History<double>& history) {
  const auto& shape = history.shape();
  std::string buf;
  buf.reserve(kHistoryHeaderBytes + history.frame_count() * shape.site_count() * 8);
  buf.append("LWAV", 4);
  detail::put_le(buf, kHistoryVersion, 2);
  detail::put_le(buf, static_cast<std::uint64_t>(shape.dim()), 2);
  detail::put_le(buf, static_cast<std::uint64_t>(shape.extent()), 4);
  detail::put_le(buf, history.frame_count(), 4);
  detail::put_le(buf, static_cast<std::uint64_t>(history.band()), 1);
  buf.append(kHistoryHeaderBytes - buf.size(), '\0');
  for (const auto& frame : history.frames()) {
    for (double v : frame.values()) detail::put_le(buf, std::bit_cast<std::uint64_t>(v), 8);
  }
  os.write(buf.data(), static_cast<std::streamsize>(buf.size()));
}

inline void write_history(const std::filesystem::path& path, const History<double>& history) {
  auto os = detail::open_out(path, true);
  write_history(os, history);
  detail::close_checked(os, path);
}

inline History<double> read_history(std::istream& is) {
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHistoryHeaderBytes) throw FormatError("truncated header", bytes.size());
  if (std::memcmp(bytes.data(), "LWAV", 4) != 0) throw FormatError("bad magic, expected \"LWAV\"", 0);
  const auto version = detail::get_le(&bytes[4], 2);
  if (version != kHistoryVersion) throw FormatError("unsupported version " + std::to_string(version), 4);
  const auto dim = detail::get_le(&bytes[6], 2);
  if (dim < 1 || dim > static_cast<std::uint64_t>(kMaxDim)) {
    throw FormatError("dimension " + std::to_string(dim) + " outside [1, 4]", 6);
  }
  const auto N = detail::get_le(&bytes[8], 4);
  if (N < 4 || N % 2 != 0 || N > (1u << 20)) throw FormatError("grid extent " + std::to_string(N) + " invalid", 8);
  const auto K = detail::get_le(&bytes[12], 4);
  if (K < 1) throw FormatError("history has no frames", 12);
  const auto band = bytes[16];
  if (band > 1) throw FormatError("unknown band code " + std::to_string(band), 16);
  for (std::size_t i = 17; i < kHistoryHeaderBytes; ++i) {
    if (bytes[i] != 0) throw FormatError("non-zero header padding", i);
  }

  const GridShape shape(static_cast<int>(dim), static_cast<int>(N));
  const std::uint64_t sites = shape.site_count();
  const std::uint64_t expected = kHistoryHeaderBytes + K * sites * 8;
  if (bytes.size() < expected) {
    throw FormatError("truncated data: expected " + std::to_string(expected) + " bytes, file has " +
                          std::to_string(bytes.size()),
                      bytes.size());
  }
  if (bytes.size() > expected) throw FormatError("trailing bytes after the last frame", expected);

  History<double> history(shape, static_cast<FilterBand>(band));
  std::size_t offset = kHistoryHeaderBytes;
  for (std::uint64_t k = 0; k < K; ++k) {
    std::vector<double> values(sites);
    for (auto& v : values) {
      v = std::bit_cast<double>(detail::get_le(&bytes[offset], 8));
      if (!std::isfinite(v)) throw FormatError("non-finite value", offset);
      offset += 8;
    }
    history.push_back(GridField<double>(shape, std::move(values), static_cast<std::int64_t>(k)));
  }
  return history;
}

inline History<double> read_history(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "' for reading");
  try {
    return read_history(is);
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + std::string(e.what()).substr(0, std::string(e.what()).rfind(" (at")),
                      e.offset());
  }
}

/// max|S| over min nonzero max|S| across frames; ~1 for bounded runs.
inline double dynamic_range(const History<double>& history) {
  double hi = 0.0, lo = std::numeric_limits<double>::infinity();
  for (double g : history.growth()) {
    hi = std::max(hi, g);
    if (g > 0.0) lo = std::min(lo, g);
  }
  return hi > 0.0 ? hi / lo : 1.0;
}

// ---------------------------------------------------------------------------
// CSV

namespace detail {

inline std::ostream& csv_number(std::ostream& os, double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return os << s.str();
}

}  // namespace detail

inline void write_coefficients_csv(std::ostream& os, const DiffFilter& filter) {
  os << "index,value\n";
  for (int m = 1; m <= filter.order(); ++m) {
    os << m << ',';
    detail::csv_number(os, filter(m)) << '\n';
  }
}

inline void write_spectrum_csv(std::ostream& os, const SpectralResponse& response) {
  os << "f,re,im\n";
  for (int f = SpectralResponse::first_frequency(response.N); f <= response.N / 2; ++f) {
    const auto v = response.at(f);
    os << f << ',';
    detail::csv_number(os, v.real()) << ',';
    detail::csv_number(os, v.imag()) << '\n';
  }
}

inline void write_error_csv(std::ostream& os, const std::vector<ErrorPoint>& curve) {
  os << "f,error\n";
  for (const auto& p : curve) {
    os << p.f << ',';
    detail::csv_number(os, p.error) << '\n';
  }
}

inline void write_growth_csv(std::ostream& os, const std::vector<double>& growth) {
  os << "tau,max_abs\n";
  for (std::size_t k = 0; k < growth.size(); ++k) {
    os << k << ',';
    detail::csv_number(os, growth[k]) << '\n';
  }
}

/// One row per spatial frequency of a 1D AFC: f_x, refined f_tau, magnitude (empty when absent).
inline void write_ridge_csv(std::ostream& os, const SpectrumArray& afc, const TauWindow& window = {}) {
  os << "f_x,f_tau,magnitude\n";
  const int N = static_cast<int>(afc.dims()[0]);
  for (int f = -N / 2 + 1; f <= N / 2; ++f) {
    const auto p = ridge(afc, f, window);
    os << f << ',';
    if (p.present) {
      detail::csv_number(os, p.f_tau) << ',';
      detail::csv_number(os, p.magnitude);
    } else {
      os << ',';
    }
    os << '\n';
  }
}

inline void write_peaks_csv(std::ostream& os, const DispersionFit& fit, int dim) {
  static constexpr const char* kAxis[] = {"f_x", "f_y", "f_z", "f_w"};
  for (int a = 0; a < dim; ++a) os << kAxis[a] << ',';
  os << "f_tau,magnitude,radius,residual_sq,relative\n";
  for (const auto& p : fit.peaks) {
    for (int f : p.f_spatial) os << f << ',';
    detail::csv_number(os, p.f_tau) << ',';
    detail::csv_number(os, p.magnitude) << ',';
    detail::csv_number(os, p.radius) << ',';
    detail::csv_number(os, p.residual_sq) << ',';
    if (std::isfinite(p.relative)) detail::csv_number(os, p.relative);
    os << '\n';
  }
}

inline void write_pde_csv(std::ostream& os, const PdeResidual& r) {
  os << "function,rms_lhs,rms_residual,relative\n";
  for (const auto& f : r.functions) {
    os << f.name << ',';
    detail::csv_number(os, f.rms_lhs) << ',';
    detail::csv_number(os, f.rms_residual) << ',';
    detail::csv_number(os, f.relative) << '\n';
  }
}

/// Field values as CSV: "x,value" (d = 1) or a row per y with N columns (d = 2).
inline void write_field_csv(std::ostream& os, const GridField<double>& field) {
  const auto& shape = field.shape();
  if (shape.dim() > 2) throw DomainError("field CSV export is limited to d <= 2");
  const int N = shape.extent();
  if (shape.dim() == 1) {
    os << "x,value\n";
    for (int x = 0; x < N; ++x) {
      os << x << ',';
      detail::csv_number(os, field[static_cast<std::size_t>(x)]) << '\n';
    }
    return;
  }
  for (int y = 0; y < N; ++y) {
    for (int x = 0; x < N; ++x) {
      if (x) os << ',';
      detail::csv_number(os, field.at({x, y, 0, 0}));
    }
    os << '\n';
  }
}

template <class Writer>
void write_file(const std::filesystem::path& path, Writer&& writer) {
  auto os = detail::open_out(path);
  writer(static_cast<std::ostream&>(os));
  detail::close_checked(os, path);
}

// ---------------------------------------------------------------------------
// PGM

/// (f_x, f_tau) plane of a space-time spectrum with the other spatial frequencies fixed.
inline SpectrumArray slice_x_tau(const SpectrumArray& spectrum, std::span<const int> fixed = {}) {
  if (spectrum.rank() < 2) throw DomainError("slice needs a space-time spectrum");
  const std::size_t d = spectrum.rank() - 1;
  const std::size_t N = spectrum.dims()[0], K = spectrum.dims().back();
  std::vector<int> f(spectrum.rank(), 0);
  for (std::size_t a = 1; a < d && a - 1 < fixed.size(); ++a) f[a] = fixed[a - 1];
  std::vector<std::complex<double>> out(N * K);
  for (std::size_t t = 0; t < K; ++t) {
    for (std::size_t x = 0; x < N; ++x) {
      f[0] = static_cast<int>(x);
      f[d] = static_cast<int>(t);
      out[x + N * t] = spectrum.at(std::span<const int>(f));
    }
  }
  return SpectrumArray({N, K}, std::move(out));
}

/// Binary PGM (P5) of a rank-2 magnitude array in centered layout: f_x left to right, f_tau top
/// (+K/2) to bottom. Pixel = maxval * max(0, 1 + log10(|F| / max|F|) / decades).
inline void write_pgm(std::ostream& os, const SpectrumArray& spectrum, int bits = 8, double decades = 6.0) {
  if (spectrum.rank() != 2) throw DomainError("PGM export needs a rank-2 spectrum");
  if (bits != 8 && bits != 16) throw DomainError("PGM depth must be 8 or 16 bits");
  const int W = static_cast<int>(spectrum.dims()[0]);
  const int H = static_cast<int>(spectrum.dims()[1]);
  const int maxval = bits == 8 ? 255 : 65535;
  const double peak = spectrum.max_magnitude();
  os << "P5\n" << W << ' ' << H << '\n' << maxval << '\n';
  std::string row;
  for (int r = 0; r < H; ++r) {
    const int ft = H / 2 - r;
    row.clear();
    for (int c = 0; c < W; ++c) {
      const int fx = c - (W - 1) / 2;
      const int f[2] = {fx, ft};
      const double m = std::abs(spectrum.at(std::span<const int>(f, 2)));
      double level = 0.0;
      if (peak > 0.0 && m > 0.0) level = std::clamp(1.0 + std::log10(m / peak) / decades, 0.0, 1.0);
      const auto px = static_cast<unsigned>(std::lround(level * maxval));
      if (bits == 16) row.push_back(static_cast<char>(px >> 8));
      row.push_back(static_cast<char>(px & 0xffu));
    }
    os.write(row.data(), static_cast<std::streamsize>(row.size()));
  }
}

}  // namespace lwave
