#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simma/numerics.hpp"

namespace simma {

/// s_+^alpha with 0^0 := 0, so alpha = 0 is the indicator of (0, inf).
struct Fractional {
  double alpha = 0.25;
  bool operator==(const Fractional&) const = default;
};

/// Indicator of the closed interval [a, b].
struct Indicator {
  double a = 0.0;
  double b = 1.0;
  bool operator==(const Indicator&) const = default;
};

/// (1 - t^2)^2 with t = (2s - a - b) / (b - a) on [a, b], zero outside.
struct SmoothBump {
  double a = -1.0;
  double b = 1.0;
  bool operator==(const SmoothBump&) const = default;
};

/// (sum_{k<N} a^k cos(b^k pi t)) * t (1 - t) on [0, 1], zero outside.
struct WeierstrassBump {
  double a = 0.5;
  double b = 13.0;
  int terms = 20;
  bool operator==(const WeierstrassBump&) const = default;
};

/// Linear interpolation through knots, constant beyond the end knots.
struct PiecewiseLinear {
  std::vector<double> x;
  std::vector<double> y;
  bool operator==(const PiecewiseLinear&) const = default;
};

struct ZeroKernel {
  bool operator==(const ZeroKernel&) const = default;
};

struct SectionBV {
  bool exact = false;
  double value = 0.0;          // exact value, or the finest level when not exact
  std::vector<double> levels;  // V_0..V_n when computed on dyadic grids
  bool divergent = false;      // last levels keep growing
};

struct ShiftGrid {
  double lo;
  double hi;
  int points = 513;
};

struct KStar {
  double value = 0.0;
  bool exact = false;
  bool divergent = false;
};

class Kernel {
 public:
  using Variant = std::variant<Fractional, Indicator, SmoothBump, WeierstrassBump, PiecewiseLinear, ZeroKernel>;

  Kernel() : v_(ZeroKernel{}) {}
  explicit Kernel(Variant v);

  const Variant& variant() const { return v_; }
  std::string family() const;
  bool operator==(const Kernel& o) const { return v_ == o.v_; }

  double eval(double s) const;
  /// Fills out[i] = eval(s[i]); faster than repeated eval for the bump kernels.
  void eval_many(std::span<const double> s, std::span<double> out) const;

  /// int_a^b f(s) ds in closed form (term by term for the Weierstrass sum).
  /// Throws DomainError when the integral diverges.
  double integral(double a, double b) const;

  /// True when the kernel is an integral of a locally integrable derivative.
  bool is_ac() const;
  /// A.e. derivative; nullopt when the kernel is not absolutely continuous.
  std::optional<double> derivative(double s) const;

  bool is_zero() const { return std::holds_alternative<ZeroKernel>(v_); }
  /// Closure of {s : f(s) != 0}; may be unbounded.
  numerics::Interval support() const;
  /// Smallest interval outside of which f is constant; may be unbounded.
  numerics::Interval variation_support() const;
  /// Jumps, kinks and support ends.
  std::vector<double> breakpoints() const;
  /// Points where the derivative is unbounded.
  std::vector<double> singular_points() const;
  /// False when sections on compact intervals can have infinite variation.
  bool locally_bv() const;

 private:
  Variant v_;
};

/// f(.) paired with f0(.) in X_t = int (f(t - s) - f0(-s)) W(ds).
struct KernelPair {
  Kernel f;
  Kernel f0;
};

/// Variation of the kernel on [a, b]: exact for piecewise monotone variants,
/// otherwise dyadic levels up to n_max with a divergence flag.
SectionBV section_bv(const Kernel& k, double a, double b, int n_max = 14);

/// sup over window starts c of the variation of f on [c, c + 1].
KStar kstar(const Kernel& k, const ShiftGrid& grid, int n_max = 14);
/// Same with a grid covering the support dilated by one unit.
KStar kstar(const Kernel& k, int n_max = 14);

}  // namespace simma
