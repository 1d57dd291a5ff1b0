#pragma once

// Experiment drivers: one parameter set describing a run, the initial field
// it implies, precision planning, streaming AFC and verification reports.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <type_traits>
#include <vector>

#include <nlohmann/json.hpp>

#include "lwave/continuum_oracle.hpp"
#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/io.hpp"
#include "lwave/multiplier_search.hpp"
#include "lwave/precision.hpp"
#include "lwave/signal_synth.hpp"
#include "lwave/spectral.hpp"
#include "lwave/wave_stepper.hpp"

namespace lwave {

enum class InitKind : std::uint8_t { Shock, Harmonic, Noise, Packet };

inline std::string_view to_string(InitKind k) {
  switch (k) {
    case InitKind::Harmonic: return "harmonic";
    case InitKind::Noise: return "noise";
    case InitKind::Packet: return "packet";
    default: return "shock";
  }
}

inline InitKind parse_init(std::string_view text) {
  if (text == "shock") return InitKind::Shock;
  if (text == "harmonic") return InitKind::Harmonic;
  if (text == "noise") return InitKind::Noise;
  if (text == "packet") return InitKind::Packet;
  throw DomainError("unknown init '" + std::string(text) + "' (expected shock, harmonic, noise or packet)");
}

/// N = 512, 64, 32, 16 for d = 1..4.
inline int default_grid(int dim) {
  static constexpr int kGrid[] = {512, 64, 32, 16};
  if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 4]");
  return kGrid[dim - 1];
}

/// K = N for d <= 2, 2N for d >= 3.
inline int default_frames(int dim, int N) { return dim >= 3 ? 2 * N : N; }

struct SimulationSpec {
  int dim = 1;
  FilterBand band = FilterBand::ZeroMax;
  int order = 1;
  int grid = 0;    ///< 0: default_grid(dim)
  int frames = 0;  ///< stored frames K (K - 1 updates); 0: default_frames
  InitKind init = InitKind::Shock;
  Site freq{};          ///< harmonic / packet frequency
  double phase = 0.0;
  int delta = 0;        ///< noise half-width; 0: N/64 (d = 1) or N/32
  std::uint64_t seed = 1;
  UpdateMode mode = UpdateMode::Synchronous;
  double width = 0.0;   ///< packet width in sites; 0: N/32
  PrecisionChoice precision = PrecisionChoice::Auto;
  std::optional<MultiplierRule> rule;
  std::uint64_t memory_budget = kDefaultMemoryBudget;

  int N() const { return grid > 0 ? grid : default_grid(dim); }
  int K() const { return frames > 0 ? frames : default_frames(dim, N()); }
  int noise_delta() const { return delta > 0 ? delta : std::max(1, N() / (dim == 1 ? 64 : 32)); }
  GridShape shape() const { return GridShape(dim, N()); }

  void validate() const {
    if (dim < 1 || dim > kMaxDim) throw DomainError("dimension must be in [1, 4]");
    if (order < 1 || order > kMaxFilterOrder) {
      throw DomainError("filter order must be in [1, " + std::to_string(kMaxFilterOrder) + "]");
    }
    (void)shape();
    if (K() < 2) throw DomainError("a run needs at least 2 frames");
    if (rule && (rule->dim() != dim || rule->band() != band)) {
      throw ConfigError("multiplier rule does not match the run's dimension and band");
    }
  }
};

inline void to_json(nlohmann::json& j, const SimulationSpec& s) {
  j = nlohmann::json{{"dim", s.dim},
                     {"band", std::string(to_string(s.band))},
                     {"order", s.order},
                     {"grid", s.N()},
                     {"steps", s.K()},
                     {"init", std::string(to_string(s.init))},
                     {"freq", std::vector<int>(s.freq.begin(), s.freq.begin() + s.dim)},
                     {"phase", s.phase},
                     {"delta", s.noise_delta()},
                     {"seed", s.seed},
                     {"mode", std::string(to_string(s.mode))},
                     {"width", s.width},
                     {"precision", std::string(to_string(s.precision))}};
  if (s.rule) {
    std::vector<unsigned> e(s.rule->exponents().begin(), s.rule->exponents().begin() + s.dim);
    j["rule"] = e;
  }
}

/// Reads the keys present in `j` over the current values of `s`.
inline void merge_json(const nlohmann::json& j, SimulationSpec& s) {
  try {
    if (j.contains("dim")) s.dim = j.at("dim").get<int>();
    if (j.contains("band")) s.band = parse_band(j.at("band").get<std::string>());
    if (j.contains("order")) s.order = j.at("order").get<int>();
    if (j.contains("grid")) s.grid = j.at("grid").get<int>();
    if (j.contains("steps")) s.frames = j.at("steps").get<int>();
    if (j.contains("init")) s.init = parse_init(j.at("init").get<std::string>());
    if (j.contains("freq")) {
      const auto f = j.at("freq").get<std::vector<int>>();
      if (f.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError("freq has more than 4 components");
      s.freq = Site{};
      std::copy(f.begin(), f.end(), s.freq.begin());
    }
    if (j.contains("phase")) s.phase = j.at("phase").get<double>();
    if (j.contains("delta")) s.delta = j.at("delta").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("mode")) s.mode = parse_mode(j.at("mode").get<std::string>());
    if (j.contains("width")) s.width = j.at("width").get<double>();
    if (j.contains("precision")) s.precision = parse_precision(j.at("precision").get<std::string>());
    if (j.contains("rule")) {
      const auto e = j.at("rule").get<std::vector<unsigned>>();
      if (e.size() != static_cast<std::size_t>(s.dim)) throw ConfigError("rule needs one exponent mask per axis");
      std::array<unsigned, kMaxDim> ex{};
      std::copy(e.begin(), e.end(), ex.begin());
      s.rule = MultiplierRule(s.dim, s.band, ex);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

inline GridField<double> make_initial(const SimulationSpec& spec) {
  const auto shape = spec.shape();
  switch (spec.init) {
    case InitKind::Harmonic: return harmonic(shape, spec.freq, spec.phase);
    case InitKind::Noise: return band_noise(shape, BandSpec{spec.band, spec.noise_delta()}, spec.seed);
    case InitKind::Packet: {
      const double w = spec.width > 0.0 ? spec.width : spec.N() / 32.0;
      return wave_packet(shape, spec.freq[0], w, spec.N() / 2, spec.phase);
    }
    default: return shock(shape);
  }
}

/// The run's multiplier rule: explicit, the reference rule (d <= 3), or the 4D search winner.
inline MultiplierRule resolve_rule(const SimulationSpec& spec) {
  if (spec.rule) return *spec.rule;
  if (spec.dim <= 3) return reference_rule(spec.dim, spec.band);
  const auto found = find_multipliers_4d(spec.band);
  if (!found.found) throw ConfigError("the 4D multiplier search found no isotropic rule; pass one explicitly");
  return *found.rule;
}

inline SchemeConfig make_scheme(const SimulationSpec& spec) {
  return SchemeConfig(design_filter(spec.order, spec.band), resolve_rule(spec), spec.mode);
}

struct PrecisionPlan {
  bool extended = false;
  unsigned digits10 = 0;
  double decades = 0.0;  ///< log10 of the worst-case growth
};

inline PrecisionPlan plan_precision(const SimulationSpec& spec) {
  const auto filter = design_filter(spec.order, spec.band);
  const auto steps = static_cast<std::size_t>(spec.K() - 1);
  PrecisionPlan p;
  p.decades = growth_decades(filter, spec.dim, steps);
  p.extended = spec.precision == PrecisionChoice::Extended ||
               (spec.precision == PrecisionChoice::Auto && needs_extended(filter, spec.dim, steps));
  if (p.extended) p.digits10 = std::max(required_digits(filter, spec.dim, steps), 30u);
  return p;
}

/// Calls fn(T{}) with T = double or ExtendedReal (precision scoped) per the plan.
template <class Fn>
decltype(auto) with_precision(const PrecisionPlan& plan, Fn&& fn) {
  if (plan.extended) {
    PrecisionScope scope(plan.digits10);
    return fn(ExtendedReal{});
  }
  return fn(double{});
}

struct AfcRun {
  SpectrumArray spectrum;      ///< complex (d+1)-dimensional transform
  std::vector<double> growth;  ///< max |S| per frame
  PrecisionPlan precision;
};

/// Simulates and transforms frame by frame; memory is K spectra of N^d complex doubles.
inline AfcRun simulate_afc(const SimulationSpec& spec) {
  spec.validate();
  const auto shape = spec.shape();
  const auto K = static_cast<std::size_t>(spec.K());
  check_memory_budget(shape, K, 2 * sizeof(double), spec.memory_budget);
  const auto cfg = make_scheme(spec);
  const auto initial = make_initial(spec);
  const auto plan = plan_precision(spec);
  std::vector<double> growth;
  auto spectrum = with_precision(plan, [&]<class T>(T) {
    AfcAccumulator<T> acc(shape);
    evolve(convert_field<T>(initial), cfg, K - 1, [&](const GridField<T>& frame) {
      growth.push_back(frame.max_abs());
      acc.add(frame);
    });
    return acc.spectrum();
  });
  return AfcRun{std::move(spectrum), std::move(growth), plan};
}

/// Simulates K frames in the planned precision and stores them as doubles.
inline History<double> simulate_history(const SimulationSpec& spec) {
  spec.validate();
  const auto shape = spec.shape();
  const auto K = static_cast<std::size_t>(spec.K());
  check_memory_budget(shape, K, sizeof(double), spec.memory_budget);
  const auto cfg = make_scheme(spec);
  const auto initial = make_initial(spec);
  History<double> history(shape, spec.band);
  with_precision(plan_precision(spec), [&]<class T>(T) {
    evolve(convert_field<T>(initial), cfg, K - 1,
           [&](const GridField<T>& frame) { history.push_back(convert_field<double>(frame)); });
    return 0;
  });
  return history;
}

// ---------------------------------------------------------------------------
// Verification

enum class CheckStatus : std::uint8_t { Pass, Fail, Inconclusive };

inline std::string_view to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "FAIL";
    default: return "inconclusive";
  }
}

struct CheckResult {
  std::string name;
  double value = std::numeric_limits<double>::quiet_NaN();
  double target = 0.0;
  double tolerance = 0.0;
  CheckStatus status = CheckStatus::Inconclusive;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  std::optional<PdeResidual> pde;
  std::optional<DispersionFit> cone;

  CheckStatus overall() const {
    bool inconclusive = checks.empty();
    for (const auto& c : checks) {
      if (c.status == CheckStatus::Fail) return CheckStatus::Fail;
      if (c.status == CheckStatus::Inconclusive) inconclusive = true;
    }
    return inconclusive ? CheckStatus::Inconclusive : CheckStatus::Pass;
  }
};

struct VerifyOptions {
  double threshold = 0.3;
  int half_width = 0;               ///< 0: max(2, N/64) for d = 1, max(1, N/16) otherwise
  double velocity_tolerance = 0.0;  ///< 0: 0.02 ZeroMax, 0.05 Central (d = 1); 0.1 for d >= 2
  double cone_tolerance = 0.05;
  double pde_tolerance = 0.0;       ///< 0: 0.01 (d = 1) or 0.02
};

inline CheckResult check_value(std::string name, double value, double target, double tolerance) {
  CheckResult c{std::move(name), value, target, tolerance, CheckStatus::Inconclusive, {}};
  if (!std::isfinite(value)) {
    c.detail = "no estimate";
    return c;
  }
  c.status = std::abs(value - target) <= tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  return c;
}

namespace detail {

inline CheckResult velocity_check(const SpectrumArray& spectrum, std::string name, std::vector<double> center,
                                  int half_width, const VelocityOptions& vo, double target, double tolerance) {
  try {
    const auto v = group_velocity(spectrum, center, half_width, vo);
    auto c = check_value(std::move(name), v.value, target, tolerance);
    c.detail = std::to_string(v.points) + " points";
    return c;
  } catch (const InsufficientData& e) {
    CheckResult c{std::move(name), std::numeric_limits<double>::quiet_NaN(), target, tolerance,
                  CheckStatus::Inconclusive, e.what()};
    return c;
  }
}

}  // namespace detail

/// Group velocities at the band centres (d = 1) or cone residual and radial slope (d >= 2).
inline VerifyReport verify_spectrum(const SpectrumArray& spectrum, FilterBand band, const VerifyOptions& opts = {}) {
  if (spectrum.rank() < 2) throw DomainError("verification needs a space-time spectrum");
  const int d = static_cast<int>(spectrum.rank()) - 1;
  const int N = static_cast<int>(spectrum.dims()[0]);
  VerifyReport report;
  if (spectrum.max_magnitude() == 0.0) {
    report.checks.push_back({"spectrum", 0.0, 0.0, 0.0, CheckStatus::Inconclusive, "history carries no signal"});
    return report;
  }
  const int hw = opts.half_width > 0 ? opts.half_width : (d == 1 ? std::max(2, N / 64) : std::max(1, N / 16));

  if (d == 1) {
    const double tol = opts.velocity_tolerance > 0.0 ? opts.velocity_tolerance
                                                     : (band == FilterBand::ZeroMax ? 0.02 : 0.05);
    VelocityOptions vo;
    vo.threshold = opts.threshold;
    if (band == FilterBand::ZeroMax) {
      report.checks.push_back(detail::velocity_check(spectrum, "group velocity at 0", {0.0}, hw, vo, 1.0, tol));
      report.checks.push_back(
          detail::velocity_check(spectrum, "group velocity at N/2", {N / 2.0}, hw, vo, -1.0, tol));
    } else {
      vo.window.min = 0.0;
      vo.side = BandSide::Below;
      report.checks.push_back(
          detail::velocity_check(spectrum, "group velocity below N/4", {N / 4.0}, hw, vo, -1.0, tol));
      vo.side = BandSide::Above;
      report.checks.push_back(
          detail::velocity_check(spectrum, "group velocity above N/4", {N / 4.0}, hw, vo, 1.0, tol));
    }
    return report;
  }

  ConeOptions co;
  co.band = band;
  co.window = hw;
  auto fit = cone_extract(spectrum, opts.threshold, co);
  std::size_t usable = 0;
  for (const auto& p : fit.peaks) usable += p.radius > 0.0 ? 1 : 0;
  if (usable < 3) {
    report.checks.push_back({"cone median residual", std::numeric_limits<double>::quiet_NaN(), 0.0,
                             opts.cone_tolerance, CheckStatus::Inconclusive, "fewer than 3 peaks near the apexes"});
  } else {
    auto c = check_value("cone median residual", fit.median_relative, 0.0, opts.cone_tolerance);
    c.detail = std::to_string(usable) + " peaks";
    report.checks.push_back(c);
    const double vt = opts.velocity_tolerance > 0.0 ? opts.velocity_tolerance : 0.1;
    auto v = check_value("radial group velocity", fit.group_velocity, 1.0, vt);
    v.detail = c.detail;
    report.checks.push_back(v);
  }
  report.cone = std::move(fit);
  return report;
}

/// Finite-difference consistency of a band-limited history with the realized wave system.
inline CheckResult verify_pde(VerifyReport& report, const History<double>& history, const MultiplierRule& rule,
                              const VerifyOptions& opts = {}) {
  const double tol = opts.pde_tolerance > 0.0 ? opts.pde_tolerance : (history.shape().dim() == 1 ? 0.01 : 0.02);
  CheckResult c;
  try {
    auto r = pde_residual(history, rule);
    c = check_value("pde residual", r.relative, 0.0, tol);
    report.pde = std::move(r);
  } catch (const InsufficientData& e) {
    c = CheckResult{"pde residual", std::numeric_limits<double>::quiet_NaN(), 0.0, tol, CheckStatus::Inconclusive,
                    e.what()};
  }
  report.checks.push_back(c);
  return c;
}

}  // namespace lwave
