#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "simma/numerics.hpp"

namespace simma {

/// Three-valued truth for conditions that may only be decidable numerically.
enum class Truth { False, True, Unknown };

const char* to_string(Truth t);

/// rho(dx) = c1 x^{-1-alpha} dx on x > 0 and c2 |x|^{-1-alpha} dx on x < 0.
struct Stable {
  double c1 = 1.0;
  double c2 = 1.0;
  double alpha = 1.5;
};

/// Stable densities with exponential tempering e^{-l1 x} (x > 0) and e^{-l2 |x|} (x < 0).
struct TemperedStable {
  double d1 = 1.0;
  double d2 = 1.0;
  double beta = 1.5;
  double l1 = 1.0;
  double l2 = 1.0;
};

struct Atom {
  double x;
  double rate;
};

struct FiniteAtoms {
  std::vector<Atom> atoms;
};

/// Symmetric measure given by its two-sided tail g(r) = rho([-r, r]^c) on a
/// grid. Interpolated linearly in log-log coordinates; extended to the left
/// with the first segment's slope and to the right as r^{tail_exponent}.
struct TabulatedTail {
  std::vector<double> r;
  std::vector<double> g;
  double tail_exponent = -3.0;
};

class LevyMeasure {
 public:
  using Variant = std::variant<Stable, TemperedStable, FiniteAtoms, TabulatedTail>;

  explicit LevyMeasure(Variant v);

  const Variant& variant() const { return v_; }
  std::string family() const;

  /// True for the families given by a Lebesgue density.
  bool has_density() const;
  /// Density at x = r (positive side) and x = -r (negative side), r > 0.
  double density_pos(double r) const;
  double density_neg(double r) const;
  /// Points where the density or its tail changes form (r > 0).
  std::vector<double> density_breaks() const;

  /// rho(R); +inf for infinite activity.
  double total_mass() const;
  bool is_symmetric() const;

 private:
  Variant v_;
};

/// Selects closed forms where known (Auto) or forces the generic quadrature
/// path, so the two can be cross-checked.
enum class Evaluation { Auto, Quadrature };

/// Value that may be infinite, with the reason when it is.
struct Moment {
  double value = 0.0;
  std::string cause;  // "at-zero", "at-infinity", "at-zero+at-infinity" or empty
  bool finite() const { return std::isfinite(value); }
};

/// g(u) = rho([-u, u]^c).
double tail_mass(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// int_{|x| <= u} x^2 rho(dx).
double truncated_second_moment(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// int_{|x| > u} |x| rho(dx), possibly +inf.
double tail_first_moment(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// xi(u) = int (|ux|^2 ^ |ux|) rho(dx), possibly +inf.
double xi(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// The same integrand weighted by (1 ^ x^{-2}); always finite for a Levy measure.
double xi_weighted(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// Convex companion: int (|ux|^2 1{|ux|<=1} + (2|ux|-1) 1{|ux|>1}) rho(dx).
double xi_convex(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// u * tail_first_moment(u) / truncated_second_moment(u), with a/0 := +inf.
double moment_ratio(const LevyMeasure& rho, double u, Evaluation mode = Evaluation::Auto);
/// int |x|^p rho(dx), or with weighted=true int |x|^p (1 v x^2)^{-1} rho(dx).
Moment abs_moment(const LevyMeasure& rho, double p, bool weighted, Evaluation mode = Evaluation::Auto);

/// int (x^2 y^2 ^ 1) rho(dy), the jump part of the K functional.
double k_jump(const LevyMeasure& rho, double x);
/// int ([[xy]] - x [[y]]) rho(dy), the jump part of the B functional.
double b_jump(const LevyMeasure& rho, double x);
/// -int (x - [[x]]) rho(dx): the drift that makes the noise mean zero.
/// +inf magnitude (returned as NaN) when the first tail moment diverges.
double centering_drift(const LevyMeasure& rho);

/// Limit of the moment ratio for a tail regularly varying at infinity with
/// index beta in [-2, -1): (1 - 1/(beta+1)) / (2/(beta+2) - 1), 0 at beta = -2.
double karamata_limit(double beta);

struct NoiseComponent {
  double weight = 1.0;
  double theta = 0.0;
  double sigma2 = 0.0;
  std::optional<LevyMeasure> rho;

  void validate() const;
  bool has_jumps() const;
};

struct MixedNoise {
  std::vector<NoiseComponent> components;
  void validate() const;
};

/// Whether the component has int_{-1}^{1} |x| rho(dx) = inf or sigma2 > 0.
Truth check_infinite_variation_noise(const NoiseComponent& comp);

struct UGrid {
  double lo = 1e-3;
  double hi = 1e4;
  int points = 29;
  std::vector<double> values() const;
};

struct RatioComponent {
  Truth u0 = Truth::Unknown;
  bool u0_heuristic = false;
  std::string u0_basis;
  double sup = kInf;  // sup of the moment ratio over u > 0 (grid or closed form)
  bool sup_finite_certified = false;
  bool sup_heuristic = false;
  std::string sup_basis;
  std::vector<double> grid_ratios;
};

struct RatioReport {
  std::vector<RatioComponent> components;
  double u00_sup = kInf;
  bool u00_certified = false;  // finiteness of the supremum is analytic
  bool u00_heuristic = false;
  std::vector<double> u_grid;
};

RatioReport check_ratio_conditions(const MixedNoise& noise, const UGrid& grid = {});

}  // namespace simma
