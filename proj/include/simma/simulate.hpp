#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "simma/criteria.hpp"
#include "simma/numerics.hpp"

namespace simma {

struct SimPlan {
  int n_max = 12;
  // Noise support [lo, hi]; by default each component uses the shifts s for
  // which f(t - s) - f(-s) varies on [0, 1], truncated at -tail_length.
  std::optional<numerics::Interval> window;
  double tail_length = 16.0;
  // Expected number of series terms: arrivals Gamma_j <= series_terms.
  double series_terms = 1e4;
  bool gaussian_compensation = false;
  std::size_t replicas = 1000;
  numerics::SeedSpec seed;
  double growth_threshold = 1.25;
  bool check_existence = true;

  void validate() const;
};

struct PathSample {
  int level = 0;
  std::vector<double> values;  // X(t_i) - X(0), t_i = i 2^-level on [0, 1]
  std::vector<double> levels;  // V_0..V_level
  std::string method;
  double residual_variance = 0.0;  // omitted small-jump variance per unit time
  double residual_bv_bound = 0.0;  // bound on E||X_omitted||_BV (inf if not AC)
  double window_tail = 0.0;        // |f(1 - lo) - f(-lo)| for a shift just outside the window
  std::size_t jumps = 0;
  std::vector<double> jump_times;  // finite-activity components only
  std::vector<std::string> warnings;
};

/// Simulates X_t - X_0 on a dyadic grid over [0, 1] for a fixed model and plan.
class PathSimulator {
 public:
  PathSimulator(MixedModel model, SimPlan plan);
  ~PathSimulator();
  PathSimulator(const PathSimulator&) = delete;
  PathSimulator& operator=(const PathSimulator&) = delete;

  /// Replica `replica` of the plan's root seed.
  PathSample sample(std::uint64_t replica) const;
  /// Explicit seed; component i draws from seed.derive(i, seed.replica).
  PathSample sample(const numerics::SeedSpec& seed) const;

  const MixedModel& model() const { return model_; }
  const SimPlan& plan() const { return plan_; }
  numerics::Interval window(std::size_t component) const;

 private:
  struct Component;
  MixedModel model_;
  SimPlan plan_;
  std::vector<std::unique_ptr<Component>> comps_;
};

PathSample sample_path(const MixedModel& model, const SimPlan& plan, const numerics::SeedSpec& seed);

std::vector<double> bv_levels(const PathSample& path);

struct MCEstimate {
  double mean = 0.0;
  double se = 0.0;
  std::size_t replicas = 0;
  std::vector<double> level_means;  // E V_k, k = 0..n_max
  std::vector<double> level_se;
  std::vector<double> increment_means;  // 2^k E|X(2^-k) - X(0)|, k = 0..n_max
  std::vector<double> increment_se;
};

/// Mean and standard error (sample std / sqrt(R)).
std::pair<double, double> mean_se(const std::vector<double>& xs);

/// 2^n E|X(2^-n) - X(0)| over plan.replicas replicas (R >= 100).
MCEstimate mc_expected_variation(const MixedModel& model, const SimPlan& plan, int n);

/// sum_v w_v int xi_v(f_n(s, v)) ds with f_n(s) = 2^n (f(2^-n - s) - f(-s)).
Assessment compute_In(const MixedModel& model, int n, Evaluation mode = Evaluation::Auto);

struct SandwichRow {
  int n = 0;
  double in = 0.0;
  double lower = 0.0;  // (1/4) min(I_n, I_n^{1/2})
  double upper = 0.0;  // (5/4) max(I_n, I_n^{1/2})
  double estimate = 0.0;
  double se = 0.0;
  bool inside = false;  // estimate within [lower - 3 se, upper + 3 se]
};

/// L1 sandwich for symmetric, purely non-Gaussian models at levels 0..plan.n_max.
std::vector<SandwichRow> verify_L1_sandwich(const MixedModel& model, const SimPlan& plan);

struct ZeroOneExperiment {
  std::size_t replicas = 0;
  double fraction_bounded = 0.0;
  double fraction_bounded_se = 0.0;
  double fraction_empty_window = 0.0;
  double fraction_empty_se = 0.0;
  std::size_t empty_replicas = 0;
  bool empty_paths_flat = true;  // every empty-window path has V_n = 0 at all levels
  std::size_t single_atom_replicas = 0;
  double single_atom_min_ratio = kInf;  // min over single-atom paths of V_{n_max} / V_4
  std::size_t single_atom_above = 0;    // single-atom paths with V_{n_max} / V_4 > ratio_threshold
  double ratio_threshold = 10.0;
  std::vector<double> single_atom_positions_below;  // atom positions of paths failing the ratio test
};

/// Per replica: bounded when V_{n_max} / V_{n_max - 4} < growth_threshold
/// (or the path is flat). Finite-activity noise only.
ZeroOneExperiment zero_one_experiment(const MixedModel& model, const SimPlan& plan, double ratio_threshold = 10.0);

/// Unit-rate Poisson noise (rho = delta_1) with the Weierstrass kernel on
/// [0, 1] and f0 = 0: finite variation on [0, 1] has probability strictly
/// between 0 and 1.
MixedModel poisson_weierstrass_model();

}  // namespace simma
