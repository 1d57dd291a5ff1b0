#pragma once

// Continuum checks for the discrete schemes: plane-wave residuals of the
// complex 2D and quaternion 3D wave systems, first-order virtual-function
// systems as coefficient tables, and finite-difference residuals of a
// simulated history against the system its multiplier rule realizes.

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "lwave/errors.hpp"
#include "lwave/filter_design.hpp"
#include "lwave/grid.hpp"
#include "lwave/quaternion.hpp"
#include "lwave/virtual_set.hpp"
#include "lwave/wave_stepper.hpp"

namespace lwave {

// ---------------------------------------------------------------------------
// Plane waves  Z = Z0 exp[2 pi h (f_tau tau + f.x)]

/// dZ1/dtau = D2 Z2, dZ2/dtau = D2* Z1 with D2 = d/dx + i d/dy.
struct ComplexPlaneWave {
  std::complex<double> z1;
  std::complex<double> z2;
  double fx = 0.0, fy = 0.0;
  double f_tau = 0.0;

  /// f_tau = |f| and Z1 = (fx + i fy) Z2 / f_tau; for f = 0 both amplitudes equal z2.
  static ComplexPlaneWave on_shell(double fx, double fy, std::complex<double> z2) {
    ComplexPlaneWave w{z2, z2, fx, fy, std::hypot(fx, fy)};
    if (w.f_tau > 0.0) w.z1 = std::complex<double>(fx, fy) * z2 / w.f_tau;
    return w;
  }
};

/// Max of the two equation residuals after substituting the exponential.
inline double residual_complex_2d(const ComplexPlaneWave& w) {
  const std::complex<double> k(w.fx, w.fy);
  const double r1 = std::abs(w.f_tau * w.z1 - k * w.z2);
  const double r2 = std::abs(w.f_tau * w.z2 - std::conj(k) * w.z1);
  return 2.0 * std::numbers::pi * std::max(r1, r2);
}

/// dZ1/dtau = D3 Z2, dZ2/dtau = D3* Z1 with D3 = i d/dx + j d/dy + k d/dz (left action).
struct QuaternionPlaneWave {
  BiQuaternion z1;
  BiQuaternion z2;
  double fx = 0.0, fy = 0.0, fz = 0.0;
  double f_tau = 0.0;

  Quaternion wave_vector() const { return {0.0, fx, fy, fz}; }

  /// f_tau = |f| and Z1 = (i fx + j fy + k fz) Z2 / f_tau; for f = 0 both amplitudes equal z2.
  static QuaternionPlaneWave on_shell(double fx, double fy, double fz, BiQuaternion z2) {
    QuaternionPlaneWave w{z2, z2, fx, fy, fz, std::sqrt(fx * fx + fy * fy + fz * fz)};
    if (w.f_tau > 0.0) w.z1 = std::complex<double>(1.0 / w.f_tau) * (lift(w.wave_vector()) * z2);
    return w;
  }
};

inline double residual_quaternion_3d(const QuaternionPlaneWave& w) {
  const BiQuaternion k = lift(w.wave_vector());
  const BiQuaternion k_conj = lift(conj(w.wave_vector()));
  const double r1 = norm(std::complex<double>(w.f_tau) * w.z1 - k * w.z2);
  const double r2 = norm(std::complex<double>(w.f_tau) * w.z2 - k_conj * w.z1);
  return 2.0 * std::numbers::pi * std::max(r1, r2);
}

// ---------------------------------------------------------------------------
// First-order systems  dv_t/dtau = sum_{a,s} c[t][a][s] dv_s/dx_a

/// Coefficient table of a linear first-order system over the 2^d virtual functions (by parity mask).
class LinearSystem {
 public:
  explicit LinearSystem(int dim) : dim_(dim), count_(1u << dim), coef_(count_ * count_ * static_cast<unsigned>(dim), 0) {
    if (dim < 1 || dim > kMaxDim) throw DomainError("system dimension must be in [1, 4]");
  }

  int dim() const { return dim_; }
  unsigned function_count() const { return count_; }

  int coefficient(unsigned target, int axis, unsigned source) const { return coef_.at(index(target, axis, source)); }
  void set(unsigned target, int axis, unsigned source, int value) { coef_.at(index(target, axis, source)) = value; }

  /// Sets a coefficient by function names, e.g. set("p", 1, "s", -1).
  void set(std::string_view target, int axis, std::string_view source, int value) {
    set(virtual_function_mask(dim_, target), axis, virtual_function_mask(dim_, source), value);
  }

  /// One line per equation: "dp/dtau = dr/dx - ds/dy".
  std::string to_string() const {
    static constexpr const char* kAxis[] = {"x", "y", "z", "w"};
    std::string out;
    for (unsigned t = 0; t < count_; ++t) {
      out += "d" + virtual_function_name(dim_, t) + "/dtau =";
      bool any = false;
      for (int a = 0; a < dim_; ++a) {
        for (unsigned s = 0; s < count_; ++s) {
          const int c = coefficient(t, a, s);
          if (c == 0) continue;
          out += c > 0 ? (any ? " + " : " ") : (any ? " - " : " -");
          if (std::abs(c) != 1) out += std::to_string(std::abs(c)) + "*";
          out += "d" + virtual_function_name(dim_, s) + "/d" + kAxis[a];
          any = true;
        }
      }
      if (!any) out += " 0";
      out += "\n";
    }
    return out;
  }

  friend bool operator==(const LinearSystem&, const LinearSystem&) = default;

 private:
  std::size_t index(unsigned target, int axis, unsigned source) const {
    if (target >= count_ || source >= count_ || axis < 0 || axis >= dim_) {
      throw DomainError("system coefficient index out of range");
    }
    return (static_cast<std::size_t>(target) * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(axis)) *
               count_ +
           source;
  }

  int dim_;
  unsigned count_;
  std::vector<int> coef_;
};

/// The approximate differential systems as printed: d = 1 (both bands), d = 2 and d = 3 ([0]+[N/2]).
inline LinearSystem reference_system(int dim) {
  LinearSystem sys(dim);
  switch (dim) {
    case 1:
      sys.set("p", 0, "q", 1);
      sys.set("q", 0, "p", 1);
      return sys;
    case 2:
      sys.set("p", 0, "r", 1), sys.set("p", 1, "s", -1);
      sys.set("q", 0, "s", 1), sys.set("q", 1, "r", 1);
      sys.set("r", 0, "p", 1), sys.set("r", 1, "q", 1);
      sys.set("s", 0, "q", 1), sys.set("s", 1, "p", -1);
      return sys;
    case 3:
      sys.set("p0", 0, "q1", -1), sys.set("p0", 1, "q2", -1), sys.set("p0", 2, "q3", -1);
      sys.set("p1", 0, "q0", 1), sys.set("p1", 1, "q3", 1), sys.set("p1", 2, "q2", -1);
      sys.set("p2", 0, "q3", -1), sys.set("p2", 1, "q0", 1), sys.set("p2", 2, "q1", 1);
      sys.set("p3", 0, "q2", 1), sys.set("p3", 1, "q1", -1), sys.set("p3", 2, "q0", 1);
      sys.set("q0", 0, "p1", 1), sys.set("q0", 1, "p2", 1), sys.set("q0", 2, "p3", 1);
      sys.set("q1", 0, "p0", -1), sys.set("q1", 1, "p3", -1), sys.set("q1", 2, "p2", 1);
      sys.set("q2", 0, "p3", 1), sys.set("q2", 1, "p0", -1), sys.set("q2", 2, "p1", -1);
      sys.set("q3", 0, "p2", -1), sys.set("q3", 1, "p1", 1), sys.set("q3", 2, "p0", -1);
      return sys;
    default: throw DomainError("no printed system for d = " + std::to_string(dim));
  }
}

namespace detail {

// Z1 = sum_c units1[c] * fn1[c], Z2 likewise; expands dZ1/dtau = D Z2 and dZ2/dtau = D* Z1 with
// D = sum_a axis_units[a] d/dx_a acting from the left.
inline LinearSystem expand_hypercomplex(int dim, const std::vector<std::pair<const char*, Quaternion>>& z1,
                                        const std::vector<std::pair<const char*, Quaternion>>& z2,
                                        const std::vector<Quaternion>& axis_units) {
  LinearSystem sys(dim);
  auto component_of = [](const std::vector<std::pair<const char*, Quaternion>>& z, const Quaternion& unit,
                         int& sign) -> const char* {
    for (const auto& [name, u] : z) {
      if (u == unit) {
        sign = 1;
        return name;
      }
      if (u == -unit) {
        sign = -1;
        return name;
      }
    }
    throw DomainError("hypercomplex expansion left the component basis");
  };
  auto expand = [&](const std::vector<std::pair<const char*, Quaternion>>& lhs,
                    const std::vector<std::pair<const char*, Quaternion>>& rhs, bool conjugate) {
    for (int a = 0; a < dim; ++a) {
      const Quaternion u = conjugate ? conj(axis_units[static_cast<std::size_t>(a)]) : axis_units[static_cast<std::size_t>(a)];
      for (const auto& [source, unit] : rhs) {
        const Quaternion product = qmul(u, unit);
        int sign = 0;
        const char* target = component_of(lhs, product, sign);
        sys.set(virtual_function_mask(dim, target), a, virtual_function_mask(dim, source), sign);
      }
    }
  };
  expand(z1, z2, false);
  expand(z2, z1, true);
  return sys;
}

}  // namespace detail

/// Components of dZ1/dtau = D2 Z2, dZ2/dtau = D2* Z1 with Z1 = p + i q, Z2 = r + i s.
inline LinearSystem expand_complex_system() {
  const auto one = Quaternion::one(), i = Quaternion::i();
  return detail::expand_hypercomplex(2, {{"p", one}, {"q", i}}, {{"r", one}, {"s", i}}, {one, i});
}

/// Components of dZ1/dtau = D3 Z2, dZ2/dtau = D3* Z1 with Z1 = p0 + i p1 + j p2 + k p3,
/// Z2 = q0 + i q1 + j q2 + k q3.
inline LinearSystem expand_quaternion_system() {
  const auto one = Quaternion::one(), i = Quaternion::i(), j = Quaternion::j(), k = Quaternion::k();
  return detail::expand_hypercomplex(3, {{"p0", one}, {"p1", i}, {"p2", j}, {"p3", k}},
                                     {{"q0", one}, {"q1", i}, {"q2", j}, {"q3", k}}, {i, j, k});
}

/// Sign of the axis-a coupling seen by the virtual function with parity mask mu.
/// ZeroMax: the multiplier itself; Central: the multiplier times (-1)^(mu_a) from the
/// staggered cos/sin weights.
inline int coupling_sign(const MultiplierRule& rule, int axis, unsigned mu) {
  const int m = rule.multiplier(axis, mu);
  if (rule.band() == FilterBand::Central && ((mu >> axis) & 1u)) return -m;
  return m;
}

/// System realized by a scheme: dv_mu/dtau = sum_a sign_a(mu) d v_{mu xor e_a}/dx_a.
inline LinearSystem scheme_system(const MultiplierRule& rule) {
  LinearSystem sys(rule.dim());
  for (unsigned mu = 0; mu < sys.function_count(); ++mu) {
    for (int a = 0; a < rule.dim(); ++a) sys.set(mu, a, mu ^ (1u << a), coupling_sign(rule, a, mu));
  }
  return sys;
}

/// Mirror image x_a -> -x_a for every axis in `axes` (bit a = axis a): negates those derivatives.
inline LinearSystem reflect(const LinearSystem& sys, unsigned axes) {
  LinearSystem out = sys;
  for (unsigned t = 0; t < sys.function_count(); ++t) {
    for (int a = 0; a < sys.dim(); ++a) {
      if (!((axes >> a) & 1u)) continue;
      for (unsigned s = 0; s < sys.function_count(); ++s) out.set(t, a, s, -sys.coefficient(t, a, s));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Finite-difference residual of a history

struct FunctionResidual {
  std::string name;
  double rms_lhs = 0.0;
  double rms_residual = 0.0;
  double relative = 0.0;
};

struct PdeResidual {
  std::vector<FunctionResidual> functions;
  double rms_lhs = 0.0;
  double rms_residual = 0.0;
  double relative = 0.0;  ///< over all functions and frame pairs
};

inline constexpr int kReferenceFilterOrder = 4;

/// Compares the per-step change of every virtual function with the right-hand side of the
/// system realized by `rule`, with derivatives from the order-4 staggered filter on the partner
/// sub-grids. Residuals accumulate over all consecutive frame pairs.
template <class T>
PdeResidual pde_residual(const History<T>& history, const MultiplierRule& rule) {
  if (history.frame_count() < 2) throw InsufficientData("pde_residual needs at least 2 frames");
  const GridShape& shape = history.shape();
  if (shape.dim() != rule.dim()) throw ConfigError("history and multiplier rule dimensions differ");
  const int d = shape.dim();
  const int N = shape.extent();
  const auto ref = design_filter(kReferenceFilterOrder, FilterBand::ZeroMax);
  const FilterBand band = rule.band();

  const unsigned count = 1u << d;
  std::vector<double> lhs_sq(count, 0.0), res_sq(count, 0.0);
  std::size_t samples = 0;

  auto field_at = [](const GridField<T>& f, std::size_t i) { return to_double(f[i]); };

  VirtualSet<double> now(shape, band), next(shape, band);
  auto load = [&](VirtualSet<double>& vs, const GridField<T>& frame) {
    for (unsigned mask = 0; mask < count; ++mask) {
      auto fn = vs.function(mask);
      for (std::size_t j = 0; j < fn.size(); ++j) {
        const double s = field_at(frame, shape.linear(vs.site_of(mask, j)));
        fn[j] = vs.sign(mask, j) > 0 ? s : -s;
      }
    }
  };

  load(next, history.frame(0));
  for (std::size_t k = 0; k + 1 < history.frame_count(); ++k) {
    std::swap(now, next);
    load(next, history.frame(k + 1));
    for (unsigned mu = 0; mu < count; ++mu) {
      const auto cur = now.function(mu);
      const auto nxt = next.function(mu);
      for (std::size_t j = 0; j < cur.size(); ++j) {
        const Site x = now.site_of(mu, j);
        double rhs = 0.0;
        for (int a = 0; a < d; ++a) {
          const unsigned partner = mu ^ (1u << a);
          double deriv = 0.0;
          for (int m = 1; m <= ref.order(); ++m) {
            Site fwd = x, bwd = x;
            fwd[a] = wrap_index(x[a] + DiffFilter::offset(m), N);
            bwd[a] = wrap_index(x[a] - DiffFilter::offset(m), N);
            for (int b = 0; b < d; ++b) {
              fwd[b] /= 2;
              bwd[b] /= 2;
            }
            deriv += ref(m) * (now.value(partner, fwd) - now.value(partner, bwd));
          }
          rhs += coupling_sign(rule, a, mu) * deriv;
        }
        const double lhs = nxt[j] - cur[j];
        lhs_sq[mu] += lhs * lhs;
        res_sq[mu] += (lhs - rhs) * (lhs - rhs);
      }
    }
    ++samples;
  }

  PdeResidual out;
  double total_lhs = 0.0, total_res = 0.0;
  const double per_function = static_cast<double>(samples * now.sub_site_count());
  for (unsigned mu = 0; mu < count; ++mu) {
    FunctionResidual fr;
    fr.name = virtual_function_name(d, mu);
    fr.rms_lhs = std::sqrt(lhs_sq[mu] / per_function);
    fr.rms_residual = std::sqrt(res_sq[mu] / per_function);
    fr.relative = fr.rms_lhs > 0.0 ? fr.rms_residual / fr.rms_lhs : 0.0;
    out.functions.push_back(fr);
    total_lhs += lhs_sq[mu];
    total_res += res_sq[mu];
  }
  const double all = per_function * count;
  out.rms_lhs = std::sqrt(total_lhs / all);
  out.rms_residual = std::sqrt(total_res / all);
  out.relative = out.rms_lhs > 0.0 ? out.rms_residual / out.rms_lhs : 0.0;
  return out;
}

/// pde_residual with the reference multiplier rule of the band (d <= 3).
template <class T>
PdeResidual pde_residual(const History<T>& history, FilterBand band) {
  return pde_residual(history, reference_rule(history.shape().dim(), band));
}

}  // namespace lwave
