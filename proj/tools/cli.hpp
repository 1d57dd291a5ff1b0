#pragma once
// Subcommands of the lwave tool.

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lwave/lwave.hpp"

namespace lwave::cli {

namespace fs = std::filesystem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kUsage = 1, kVerifyFailed = 2, kResource = 3 };

/// Dynamic range above which a double history no longer carries the weak band of the AFC.
inline constexpr double kHistoryRangeLimit = 1e12;

/// Run parameters collected from --config and flags; flags win.
class SimulationFlags {
 public:
  void attach(CLI::App& app) {
    app.add_option("--config", config_, "JSON file with run parameters (flags override)")->check(CLI::ExistingFile);
    add(app, "--dim", dim_, "spatial dimension 1..4", [](SimulationSpec& s, int v) { s.dim = v; });
    add(app, "--band", band_, "zeromax or central", [](SimulationSpec& s, const std::string& v) { s.band = parse_band(v); });
    add(app, "-n,--order", order_, "filter order n", [](SimulationSpec& s, int v) { s.order = v; });
    add(app, "--grid", grid_, "sites per axis N (default 512, 64, 32, 16 by dimension)",
        [](SimulationSpec& s, int v) { s.grid = v; });
    add(app, "--steps", steps_, "stored frames K, including the initial one", [](SimulationSpec& s, int v) { s.frames = v; });
    add(app, "--init", init_, "shock, harmonic, noise or packet",
        [](SimulationSpec& s, const std::string& v) { s.init = parse_init(v); });
    freq_opt_ = app.add_option("--freq", freq_, "harmonic / packet frequency, one integer per axis")->delimiter(',');
    add(app, "--phase", phase_, "harmonic phase in radians", [](SimulationSpec& s, double v) { s.phase = v; });
    add(app, "--delta", delta_, "noise band half-width in bins", [](SimulationSpec& s, int v) { s.delta = v; });
    add(app, "--seed", seed_, "noise seed", [](SimulationSpec& s, std::uint64_t v) { s.seed = v; });
    add(app, "--mode", mode_, "sync or sweep", [](SimulationSpec& s, const std::string& v) { s.mode = parse_mode(v); });
    add(app, "--width", width_, "packet width in sites", [](SimulationSpec& s, double v) { s.width = v; });
    add(app, "--precision", precision_, "auto, double or extended",
        [](SimulationSpec& s, const std::string& v) { s.precision = parse_precision(v); });
    budget_opt_ = app.add_option("--memory-budget", budget_, "largest allocation allowed, e.g. 512MB")
                      ->transform(CLI::AsSizeValue(false));
    rule_opt_ = app.add_option("--rule", rule_, "multiplier exponent masks, one per axis (bit 0 = x)")->delimiter(',');
  }

  bool any_set() const {
    if (!config_.empty() || freq_opt_->count() || budget_opt_->count() || rule_opt_->count()) return true;
    for (const auto& [opt, apply] : appliers_) {
      if (opt->count()) return true;
    }
    return false;
  }

  SimulationSpec resolve() const {
    SimulationSpec s;
    if (!config_.empty()) {
      std::ifstream in(config_);
      json j;
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError(config_ + ": " + e.what());
      }
      merge_json(j, s);
    }
    for (const auto& [opt, apply] : appliers_) {
      if (opt->count()) apply(s);
    }
    if (freq_opt_->count()) {
      if (freq_.size() > static_cast<std::size_t>(kMaxDim)) throw DomainError("--freq takes at most 4 components");
      s.freq = Site{};
      std::copy(freq_.begin(), freq_.end(), s.freq.begin());
    }
    if (budget_opt_->count()) s.memory_budget = budget_;
    if (rule_opt_->count()) {
      if (rule_.size() != static_cast<std::size_t>(s.dim)) throw ConfigError("--rule needs one mask per axis");
      std::array<unsigned, kMaxDim> e{};
      std::copy(rule_.begin(), rule_.end(), e.begin());
      s.rule = MultiplierRule(s.dim, s.band, e);
    } else if (s.rule && (s.rule->dim() != s.dim || s.rule->band() != s.band)) {
      s.rule.reset();  // a config rule does not survive a --dim or --band override
    }
    s.validate();
    return s;
  }

 private:
  template <class T, class Apply>
  void add(CLI::App& app, const std::string& name, T& var, const std::string& help, Apply apply) {
    auto* opt = app.add_option(name, var, help);
    appliers_.emplace_back(opt, [&var, apply](SimulationSpec& s) { apply(s, var); });
  }

  std::string config_;
  int dim_ = 1, order_ = 1, grid_ = 0, steps_ = 0, delta_ = 0;
  std::string band_, init_, mode_, precision_;
  std::vector<int> freq_;
  std::vector<unsigned> rule_;
  double phase_ = 0.0, width_ = 0.0;
  std::uint64_t seed_ = 1, budget_ = kDefaultMemoryBudget;
  CLI::Option* freq_opt_ = nullptr;
  CLI::Option* budget_opt_ = nullptr;
  CLI::Option* rule_opt_ = nullptr;
  std::vector<std::pair<CLI::Option*, std::function<void(SimulationSpec&)>>> appliers_;
};

inline std::string fmt(double v, int precision = 6) {
  std::ostringstream os;
  os << std::setprecision(precision) << v;
  return os.str();
}

inline fs::path prepare_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError(dir + ": " + ec.message());
  return dir;
}

inline void write_json(const fs::path& path, const json& j) {
  write_file(path, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

inline std::string describe(const SimulationSpec& s) {
  std::ostringstream os;
  os << "d=" << s.dim << " N=" << s.N() << " K=" << s.K() << " band=" << to_string(s.band) << " n=" << s.order
     << " init=" << to_string(s.init);
  return os.str();
}

inline std::string describe(const PrecisionPlan& p) {
  return p.extended ? "extended (" + std::to_string(p.digits10) + " digits)" : std::string("double");
}

// ---------------------------------------------------------------------------
// design

struct DesignArgs {
  int n = 1;
  std::string band = "zeromax";
  int grid = 512;
  std::string out = ".";
};

inline int cmd_design(const DesignArgs& a, std::ostream& out) {
  if (a.n < 1) throw DomainError("--n must be at least 1");
  const auto filter = design_filter(a.n, parse_band(a.band));
  const auto dir = prepare_dir(a.out);
  const std::string stem = std::string(to_string(filter.band())) + "_n" + std::to_string(a.n);
  write_file(dir / (stem + "_coefficients.csv"), [&](std::ostream& os) { write_coefficients_csv(os, filter); });
  write_file(dir / (stem + "_spectrum.csv"),
             [&](std::ostream& os) { write_spectrum_csv(os, filter_spectrum(filter, a.grid)); });
  write_file(dir / (stem + "_error.csv"),
             [&](std::ostream& os) { write_error_csv(os, filter_error_curve(filter, a.grid)); });
  out << "alpha_" << a.n << "(m), " << to_string(filter.band()) << '\n';
  for (int m = 1; m <= filter.order(); ++m) {
    out << "  m=" << m << "  " << filter.exact_coeffs()[static_cast<std::size_t>(m - 1)] << " = "
        << fmt(filter(m), 10) << '\n';
  }
  out << "wrote " << (dir / (stem + "_*.csv")).string() << '\n';
  return kOk;
}

// ---------------------------------------------------------------------------
// simulate

inline int cmd_simulate(const SimulationSpec& spec, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const auto plan = plan_precision(spec);
  const auto history = simulate_history(spec);
  const auto dir = prepare_dir(out_dir);
  write_history(dir / "history.lwav", history);
  write_file(dir / "growth.csv", [&](std::ostream& os) { write_growth_csv(os, history.growth()); });
  write_json(dir / "config.json", json(spec));

  out << describe(spec) << ", arithmetic " << describe(plan) << '\n';
  const auto& g = history.growth();
  const std::size_t stride = std::max<std::size_t>(1, g.size() / 8);
  out << "max |S| per frame:\n";
  for (std::size_t k = 0; k < g.size(); k += stride) out << "  tau=" << k << "  " << fmt(g[k]) << '\n';
  if ((g.size() - 1) % stride != 0) out << "  tau=" << g.size() - 1 << "  " << fmt(g.back()) << '\n';
  const double range = dynamic_range(history);
  out << "dynamic range " << fmt(range, 3) << '\n';
  if (!(range <= kHistoryRangeLimit)) {
    err << "warning: dynamic range " << fmt(range, 3) << " exceeds " << fmt(kHistoryRangeLimit)
        << "; the stored doubles drop the weaker band. Run `lwave verify` with these simulation flags"
           " to analyse in " << (plan.extended ? "extended" : "higher") << " precision.\n";
  }
  out << "wrote " << (dir / "history.lwav").string() << ", growth.csv, config.json\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// afc

struct AfcArgs {
  std::string history;
  std::string out = ".";
  int bits = 8;
  double decades = 6.0;
};

inline int cmd_afc(const AfcArgs& a, std::ostream& out) {
  const auto history = read_history(fs::path(a.history));
  const auto spectrum = dft(history);
  const auto plane = slice_x_tau(spectrum);
  const auto dir = prepare_dir(a.out);
  write_file(dir / "afc.pgm", [&](std::ostream& os) { write_pgm(os, plane, a.bits, a.decades); });
  write_file(dir / "ridge.csv", [&](std::ostream& os) { write_ridge_csv(os, plane); });
  const int d = history.shape().dim();
  out << "AFC of " << history.frame_count() << " frames on " << history.shape().extent() << "^" << d << " ("
      << to_string(history.band()) << "), peak magnitude " << fmt(spectrum.max_magnitude()) << '\n';
  if (d > 1) out << "image and ridge show the (f_x, f_tau) plane at zero transverse frequency\n";
  out << "wrote " << (dir / "afc.pgm").string() << ", ridge.csv\n";
  return kOk;
}

// ---------------------------------------------------------------------------
// verify

enum class CheckSet { Auto, Spectrum, Pde, All };

struct VerifyArgs {
  std::string history;
  std::string out;
  std::string checks = "auto";
  double threshold = 0.3;
  int half_width = 0;
};

inline CheckSet parse_check_set(const std::string& s) {
  if (s == "auto") return CheckSet::Auto;
  if (s == "spectrum") return CheckSet::Spectrum;
  if (s == "pde") return CheckSet::Pde;
  if (s == "all") return CheckSet::All;
  throw DomainError("unknown check set '" + s + "' (expected auto, spectrum, pde or all)");
}

inline json to_json(const CheckResult& c) {
  const auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
  return json{{"name", c.name},     {"value", num(c.value)},
              {"target", c.target}, {"tolerance", c.tolerance},
              {"status", std::string(to_string(c.status))}, {"detail", c.detail}};
}

inline void print_report(const VerifyReport& r, std::ostream& out) {
  for (const auto& c : r.checks) {
    out << "  " << std::left << std::setw(26) << c.name << std::right << ' '
        << (std::isfinite(c.value) ? fmt(c.value, 5) : std::string("-")) << "  (target " << fmt(c.target) << " +/- "
        << fmt(c.tolerance) << ")  " << to_string(c.status);
    if (!c.detail.empty()) out << "  [" << c.detail << ']';
    out << '\n';
  }
  out << "overall: " << to_string(r.overall()) << '\n';
}

inline int cmd_verify(const VerifyArgs& a, const SimulationFlags& flags, std::ostream& out) {
  const bool from_file = !a.history.empty();
  if (from_file && flags.any_set()) throw ConfigError("give either --history or simulation flags, not both");
  auto set = parse_check_set(a.checks);
  VerifyOptions vo;
  vo.threshold = a.threshold;
  vo.half_width = a.half_width;
  VerifyReport report;

  if (from_file) {
    const auto history = read_history(fs::path(a.history));
    if (set == CheckSet::Auto) set = CheckSet::Spectrum;
    out << "history " << a.history << ": " << history.frame_count() << " frames on " << history.shape().extent()
        << "^" << history.shape().dim() << " (" << to_string(history.band()) << ")\n";
    if (set != CheckSet::Pde) report = verify_spectrum(dft(history), history.band(), vo);
    if (set != CheckSet::Spectrum) {
      SimulationSpec s;
      s.dim = history.shape().dim();
      s.band = history.band();
      verify_pde(report, history, resolve_rule(s), vo);
    }
  } else {
    const auto spec = flags.resolve();
    if (set == CheckSet::Auto) set = spec.init == InitKind::Noise ? CheckSet::Pde : CheckSet::Spectrum;
    if (set != CheckSet::Pde) {
      const auto run = simulate_afc(spec);
      out << describe(spec) << ", arithmetic " << describe(run.precision) << '\n';
      report = verify_spectrum(run.spectrum, spec.band, vo);
    } else {
      out << describe(spec) << '\n';
    }
    if (set != CheckSet::Spectrum) {
      auto hs = spec;
      verify_pde(report, simulate_history(hs), resolve_rule(spec), vo);
    }
  }

  print_report(report, out);
  if (report.cone) {
    out << "cone peaks " << report.cone->peaks.size() << ", radial velocity " << fmt(report.cone->group_velocity, 4)
        << " +/- " << fmt(report.cone->group_velocity_stderr, 2) << '\n';
  }
  if (report.pde) {
    for (const auto& f : report.pde->functions) {
      out << "  d" << f.name << "/dtau residual " << fmt(f.relative, 4) << '\n';
    }
  }
  if (!a.out.empty()) {
    const auto dir = prepare_dir(a.out);
    json j{{"overall", std::string(to_string(report.overall()))}, {"checks", json::array()}};
    for (const auto& c : report.checks) j["checks"].push_back(to_json(c));
    write_json(dir / "verify.json", j);
    if (report.cone) {
      const int d = static_cast<int>(report.cone->peaks.empty() ? 0 : report.cone->peaks.front().f_spatial.size());
      write_file(dir / "peaks.csv", [&](std::ostream& os) { write_peaks_csv(os, *report.cone, d); });
    }
    if (report.pde) write_file(dir / "pde.csv", [&](std::ostream& os) { write_pde_csv(os, *report.pde); });
  }
  return report.overall() == CheckStatus::Fail ? kVerifyFailed : kOk;
}

// ---------------------------------------------------------------------------
// search4d

struct SearchArgs {
  int dim = 4;
  std::string band = "both";
  double threshold = kMultiplierThreshold;
  std::string out;
};

inline int cmd_search(const SearchArgs& a, std::ostream& out) {
  std::vector<FilterBand> bands;
  if (a.band == "both") {
    bands = {FilterBand::ZeroMax, FilterBand::Central};
  } else {
    bands = {parse_band(a.band)};
  }
  json all = json::array();
  for (auto band : bands) {
    const auto r = a.dim == 4 ? find_multipliers_4d(band, a.threshold) : find_multipliers(a.dim, band, a.threshold);
    json j{{"dim", a.dim},           {"band", std::string(to_string(band))},
           {"found", r.found},       {"residual", r.residual},
           {"measured_residual", r.measured_residual},
           {"candidates", r.candidates}, {"examined", r.examined},
           {"passing", r.passing},   {"threshold", r.threshold}};
    out << "d=" << a.dim << " " << to_string(band) << ": " << r.candidates << " candidates, " << r.examined
        << " examined, " << r.passing << " below " << fmt(r.threshold) << '\n';
    if (r.rule) {
      std::vector<unsigned> e(r.rule->exponents().begin(), r.rule->exponents().begin() + a.dim);
      j["rule"] = e;
      out << (r.found ? "  winner\n" : "  no rule passes; best candidate\n") << r.rule->to_string();
      out << "  residual " << fmt(r.residual, 3) << ", measured " << fmt(r.measured_residual, 3) << '\n';
      if (a.dim <= 3) {
        const bool same = *r.rule == reference_rule(a.dim, band);
        const bool equal_residual = r.residual == isotropy_residual(reference_rule(a.dim, band));
        out << "  reference rule " << (same ? "rediscovered" : equal_residual ? "matched in residual" : "not matched")
            << '\n';
        j["reference_match"] = same ? "identical" : equal_residual ? "equal_residual" : "none";
      }
      if (a.dim == 4 && r.found) {
        SimulationSpec s;
        s.dim = 4;
        s.order = 2;
        s.band = band;
        s.rule = *r.rule;
        const auto report = verify_spectrum(simulate_afc(s).spectrum, band);
        const double median = report.cone ? report.cone->median_relative : std::nan("");
        out << "  16^4 x 32 shock run: cone median residual " << fmt(median, 4) << '\n';
        j["cone_median_residual"] = std::isfinite(median) ? json(median) : json(nullptr);
      }
    } else {
      out << "  no candidate\n";
    }
    all.push_back(j);
  }
  if (!a.out.empty()) write_json(prepare_dir(a.out) / ("search_d" + std::to_string(a.dim) + ".json"), all);
  return kOk;
}

// ---------------------------------------------------------------------------

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lattice wave schemes: filter design, simulation, AFC analysis and verification"};
  app.require_subcommand(1);

  DesignArgs design;
  auto* c_design = app.add_subcommand("design", "differentiating filter coefficients and responses");
  c_design->add_option("-n,--n,--order", design.n, "filter order");
  c_design->add_option("--band", design.band, "zeromax or central");
  c_design->add_option("--grid", design.grid, "length N of the sampled response");
  c_design->add_option("--out", design.out, "output directory");

  SimulationFlags sim_flags;
  std::string sim_out = ".";
  auto* c_sim = app.add_subcommand("simulate", "run a scheme and store its history");
  sim_flags.attach(*c_sim);
  c_sim->add_option("--out", sim_out, "output directory");

  AfcArgs afc;
  auto* c_afc = app.add_subcommand("afc", "space-time spectrum of a stored history");
  c_afc->add_option("--history", afc.history, "history file")->required();
  c_afc->add_option("--out", afc.out, "output directory");
  c_afc->add_option("--bits", afc.bits, "PGM depth")->check(CLI::IsMember({8, 16}));
  c_afc->add_option("--decades", afc.decades, "log range of the image");

  VerifyArgs verify;
  SimulationFlags verify_flags;
  auto* c_verify = app.add_subcommand("verify", "check group velocities, cones and the PDE system");
  c_verify->add_option("--history", verify.history, "history file (otherwise simulate from the flags)");
  verify_flags.attach(*c_verify);
  c_verify->add_option("--checks", verify.checks, "auto, spectrum, pde or all");
  c_verify->add_option("--threshold", verify.threshold, "peak threshold relative to the column maximum");
  c_verify->add_option("--half-width", verify.half_width, "frequency window around band centres and cone apexes");
  c_verify->add_option("--out", verify.out, "write verify.json and peak / residual tables here");

  SearchArgs search;
  auto* c_search = app.add_subcommand("search4d", "search for isotropic multiplier rules");
  c_search->add_option("--dim", search.dim, "dimension to search (2 and 3 cross-check the reference rules)")
      ->check(CLI::Range(1, 4));
  c_search->add_option("--band", search.band, "zeromax, central or both");
  c_search->add_option("--threshold", search.threshold, "largest accepted isotropy residual");
  c_search->add_option("--out", search.out, "write the result as JSON here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*c_design) return cmd_design(design, out);
    if (*c_sim) return cmd_simulate(sim_flags.resolve(), sim_out, out, err);
    if (*c_afc) return cmd_afc(afc, out);
    if (*c_verify) return cmd_verify(verify, verify_flags, out);
    if (*c_search) return cmd_search(search, out);
  } catch (const ResourceError& e) {
    err << "lwave: " << e.what() << '\n';
    return kResource;
  } catch (const std::exception& e) {
    err << "lwave: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}

}  // namespace lwave::cli
