#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace simma {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Thrown when an argument lies outside the domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace numerics {

/// Raised by integrate() when the requested tolerance cannot be met within
/// the refinement budget. Carries the best partial estimate.
class NoConvergence : public std::runtime_error {
 public:
  NoConvergence(const std::string& what, double partial, double error)
      : std::runtime_error(what), partial_(partial), error_(error) {}
  double partial() const noexcept { return partial_; }
  double error() const noexcept { return error_; }

 private:
  double partial_;
  double error_;
};

struct QuadratureSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_depth = 40;
  // Points where the integrand may be unbounded or non-smooth in a power-law
  // way; each side is resolved by a geometric panel series.
  std::vector<double> singular_points;
  // Plain split points (kinks, jumps) that need no special treatment.
  std::vector<double> breakpoints;
  // Unbounded ranges are resolved by geometric panels, i.e. uniform panels
  // in t = 1/x. Without it an unbounded domain is rejected.
  bool tail_transform = true;

  void validate() const;
};

struct Interval {
  double lo;
  double hi;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
};

using Integrand = std::function<double(double)>;

/// Adaptive Gauss-Kronrod (7/15) quadrature with global bisection on each
/// smooth piece. Declared singular points and infinite ends are handled by
/// geometric panel series accelerated with Wynn's epsilon algorithm.
///
/// Throws NoConvergence when a piece cannot be resolved.
QuadResult integrate(const Integrand& fn, Interval domain, const QuadratureSpec& spec = {});

enum class Status { Finite, Divergent, Indeterminate };

const char* to_string(Status s);

/// Three-valued outcome of an integral whose finiteness is in question.
struct Assessment {
  Status status = Status::Indeterminate;
  double value = 0.0;  // extrapolated value when Finite, +inf when Divergent
  double error = 0.0;
  // Where the divergence (or loss of convergence) was detected; NaN if none.
  double location = std::numeric_limits<double>::quiet_NaN();
  std::string cause;

  static Assessment finite(double v, double err = 0.0) {
    return {Status::Finite, v, err, std::numeric_limits<double>::quiet_NaN(), {}};
  }
  static Assessment divergent(double where, std::string why) {
    return {Status::Divergent, kInf, 0.0, where, std::move(why)};
  }
  static Assessment indeterminate(double partial, std::string why) {
    return {Status::Indeterminate, partial, kInf, std::numeric_limits<double>::quiet_NaN(),
            std::move(why)};
  }
  bool is_finite() const { return status == Status::Finite; }
  bool is_divergent() const { return status == Status::Divergent; }
};

/// Thresholds of the refinement-based divergence test. Reported alongside
/// results so callers can tighten them.
struct DivergenceRule {
  int consecutive = 4;          // refinements that must agree
  double settle_tol = 1e-3;     // relative drift allowed in successive panel ratios
  int max_finite_panels = 200;  // refinements toward a finite singular point
  int max_tail_panels = 1000;   // refinements toward +-inf
};

/// Integrates a nonnegative function while deciding whether the integral is
/// finite. Refines geometrically toward every singular point and infinite end;
/// declares divergence when the panel contributions stop shrinking
/// (ratio >= 1 over `consecutive` settled refinements) and finiteness when the
/// epsilon-extrapolated sum converges.
Assessment detect_divergence(const Integrand& fn, Interval domain, const QuadratureSpec& spec = {},
                             const DivergenceRule& rule = {});

/// Sum of absolute increments of `values` (consecutive samples of a path).
/// Computed exactly and rounded once, so refining a dyadic grid never lowers it.
double dyadic_variation(std::span<const double> values);

/// V_0..V_n for samples on a level-n dyadic grid (2^n + 1 values).
std::vector<double> dyadic_levels(std::span<const double> values);

class DyadicGrid {
 public:
  DyadicGrid(double a, double b, int level);

  double a() const { return a_; }
  double b() const { return b_; }
  int level() const { return level_; }
  std::size_t size() const { return (std::size_t{1} << level_) + 1; }
  double step() const { return (b_ - a_) / static_cast<double>(std::size_t{1} << level_); }
  double point(std::size_t i) const;
  std::vector<double> points() const;

 private:
  double a_;
  double b_;
  int level_;
};

/// Root seed plus derivation path. Equal paths give bit-identical streams;
/// distinct paths are decorrelated through std::seed_seq.
struct SeedSpec {
  std::uint64_t root = 0x5EED5EEDULL;
  std::uint64_t component = 0;
  std::uint64_t replica = 0;

  SeedSpec derive(std::uint64_t comp, std::uint64_t rep) const { return {root, comp, rep}; }
  std::mt19937_64 engine() const;
};

/// Correctly rounded sum of `terms` (Shewchuk's exact partials).
double exact_sum(std::span<const double> terms);

/// Wynn epsilon extrapolation of a sequence of partial sums. Returns the
/// limit estimate and an error estimate.
QuadResult wynn_epsilon(std::span<const double> partial_sums);

}  // namespace numerics
}  // namespace simma
