#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <numbers>

#include "simma/simulate.hpp"

using namespace simma;
using doctest::Approx;

namespace {

MixedModel single(NoiseComponent c, Kernel f) {
  MixedModel m;
  m.noise.components.push_back(std::move(c));
  m.kernels.push_back(KernelPair{f, f});
  return m;
}

NoiseComponent jumps(LevyMeasure::Variant v, double theta = 0.0) {
  NoiseComponent c;
  c.theta = theta;
  c.rho = LevyMeasure(std::move(v));
  return c;
}

NoiseComponent gaussian(double s2) {
  NoiseComponent c;
  c.sigma2 = s2;
  return c;
}

const Kernel kStep(Fractional{0.0});

}  // namespace

TEST_CASE("indicator kernel with one atom counts the jump times") {
  // X(t) - X(0) = #{s_j in (0, t]} - #{s_j in (-1, t - 1)} on [0, 1]; the
  // compensating drift integrates to zero against the unit indicator.
  const auto m = single(jumps(FiniteAtoms{{{1.0, 2.0}}}), Kernel(Indicator{0.0, 1.0}));
  SimPlan plan;
  plan.n_max = 10;
  const PathSimulator sim(m, plan);
  CHECK(sim.window(0).lo == -1.0);
  CHECK(sim.window(0).hi == 1.0);
  std::size_t nonzero = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto p = sim.sample(r);
    const double h = std::ldexp(1.0, -plan.n_max);
    std::map<long, int> cell;  // net count per grid cell (t_{k-1}, t_k]
    for (double s : p.jump_times) {
      if (s > 0.0) cell[static_cast<long>(std::ceil(s / h))] += 1;
      if (s < 0.0) cell[static_cast<long>(std::floor((s + 1.0) / h)) + 1] -= 1;
    }
    double v = 0.0;
    for (auto [k, c] : cell) v += std::abs(c);
    CHECK(p.levels.back() == v);
    CHECK(p.values.front() == 0.0);
    for (double x : p.values) CHECK(x == std::round(x));
    nonzero += v > 0;
  }
  CHECK(nonzero > 40);
}

TEST_CASE("pure drift gives a straight line") {
  // A negligible atom keeps the noise stochastic; its compensator is folded into theta.
  const double c = -1.5;
  const auto m = single(jumps(FiniteAtoms{{{0.5, 1e-12}}}, c + 0.5e-12), kStep);
  SimPlan plan;
  plan.n_max = 8;
  plan.replicas = 100;
  const auto p = PathSimulator(m, plan).sample(std::uint64_t{3});
  REQUIRE(p.jumps == 0);
  for (double v : p.levels) CHECK(v == Approx(1.5).epsilon(1e-14));
  for (std::size_t i = 0; i < p.values.size(); ++i)
    CHECK(p.values[i] == Approx(c * std::ldexp(static_cast<double>(i), -8)).epsilon(1e-13));
  const auto est = mc_expected_variation(m, plan, 5);
  CHECK(est.mean == Approx(1.5).epsilon(1e-13));
  CHECK(est.se < 1e-12);
}

TEST_CASE("brownian increments") {
  SimPlan plan;
  plan.n_max = 4;
  plan.replicas = 4000;
  const auto est = mc_expected_variation(single(gaussian(1.0), kStep), plan, 4);
  const double target = 4.0 * std::sqrt(2.0 / std::numbers::pi);
  CHECK(std::abs(est.mean - target) < 4.0 * est.se);
  CHECK(est.se == Approx(std::sqrt(16.0 * (1.0 - 2.0 / std::numbers::pi) / 4000.0)).epsilon(0.1));
}

TEST_CASE("gaussian cell convolution matches a direct sum over the same draws") {
  const Kernel f(SmoothBump{-0.6, 0.9});
  const auto m = single(gaussian(2.0), f);
  SimPlan plan;
  plan.n_max = 6;
  const PathSimulator sim(m, plan);
  const auto w = sim.window(0);
  const numerics::SeedSpec seed{11, 0, 7};
  const auto p = sim.sample(seed);

  const double h = std::ldexp(1.0, -plan.n_max);
  const auto cells = static_cast<std::size_t>(std::ceil((w.hi - w.lo) / h));
  auto eng = seed.derive(0, 7).engine();
  std::normal_distribution<double> g(0.0, std::sqrt(2.0 * h));
  std::vector<double> z(cells);
  for (auto& v : z) v = g(eng);
  for (std::size_t i = 0; i < p.values.size(); ++i) {
    const double t = static_cast<double>(i) * h;
    double x = 0.0;
    for (std::size_t k = 0; k < cells; ++k) {
      const double c = w.lo + (static_cast<double>(k) + 0.5) * h;
      x += z[k] * (f.eval(t - c) - f.eval(-c));
    }
    CHECK(p.values[i] == Approx(x).epsilon(1e-10).scale(1.0));
  }
}

TEST_CASE("compound poisson variation converges to the expected jump mass") {
  const auto m = single(jumps(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}}), kStep);
  SimPlan plan;
  plan.n_max = 12;
  plan.replicas = 2000;
  const auto est = mc_expected_variation(m, plan, 12);
  CHECK(std::abs(est.level_means[12] - 2.0) < 4.0 * est.level_se[12]);
  for (int k = 1; k <= 12; ++k) CHECK(est.level_means[k] >= est.level_means[k - 1]);
  CHECK(est.level_means[12] / est.level_means[8] < 1.05);
}

TEST_CASE("centred tempered stable noise has mean-zero increments") {
  const TemperedStable ts{2.0, 0.5, 1.5, 1.0, 2.0};
  const LevyMeasure rho(ts);
  const auto m = single(jumps(ts, centering_drift(rho)), kStep);
  SimPlan plan;
  plan.n_max = 2;
  plan.replicas = 2000;
  plan.series_terms = 2e3;
  plan.gaussian_compensation = true;
  const PathSimulator sim(m, plan);
  std::vector<double> x1, sq;
  for (std::size_t r = 0; r < plan.replicas; ++r) {
    const auto p = sim.sample(r);
    x1.push_back(p.values.back());
    sq.push_back(p.values.back() * p.values.back());
  }
  const auto [mean, se] = mean_se(x1);
  CHECK(std::abs(mean) < 4.0 * se);
  // Var X(1) = int x^2 rho(dx) = Gamma(1/2) (d1 l1^{-1/2} + d2 l2^{-1/2}).
  const double var = std::tgamma(0.5) * (2.0 + 0.5 / std::sqrt(2.0));
  const auto [m2, se2] = mean_se(sq);
  CHECK(std::abs(m2 - var) < 4.0 * se2);
}

TEST_CASE("stable series diagnostics") {
  const auto m = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel(SmoothBump{-1.0, 1.0}));
  SimPlan plan;
  plan.n_max = 6;
  const auto p = PathSimulator(m, plan).sample(std::uint64_t{0});
  // Window [-1, 2], cutoff (c L / (alpha N))^{1/alpha} with c = 2, L = 3.
  const double r_cut = std::pow(6.0 / (1.5 * 1e4), 1.0 / 1.5);
  CHECK(p.residual_variance == Approx(2.0 * std::pow(r_cut, 0.5) / 0.5).epsilon(1e-10));
  CHECK(p.residual_bv_bound > 0.0);
  CHECK(p.warnings.empty());
  CHECK(p.jumps > 9000);
  plan.series_terms = 1e3;
  CHECK_THROWS_AS(PathSimulator(m, SimPlan{.n_max = 4, .series_terms = 10.0}), DomainError);
  CHECK_FALSE(PathSimulator(m, plan).sample(std::uint64_t{0}).warnings.size() > 0);
}

TEST_CASE("simulation refuses a process that does not exist") {
  CHECK_THROWS_AS(PathSimulator(single(jumps(Stable{1.0, 1.0, 1.5}), Kernel(Fractional{0.6})), SimPlan{}),
                  DomainError);
}

TEST_CASE("I_n for indicator and stable noise") {
  const auto m = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel(Indicator{0.0, 1.0}));
  CHECK(compute_In(m, 0).value == Approx(16.0).epsilon(1e-12));
  CHECK(compute_In(m, 1).value == Approx(16.0 * std::sqrt(2.0)).epsilon(1e-12));
  for (int n : {2, 5}) CHECK(compute_In(m, n).value == Approx(16.0 * std::pow(2.0, n / 2.0)).epsilon(1e-12));
  CHECK(compute_In(m, 3, Evaluation::Quadrature).value == Approx(16.0 * std::pow(2.0, 1.5)).epsilon(1e-6));
}

TEST_CASE("I_n approaches D_f for a smooth kernel") {
  const auto m = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel(SmoothBump{-1.0, 1.0}));
  const double df = 17.4349801012670824;
  CHECK(std::abs(compute_In(m, 10).value / df - 1.0) < 0.01);
  CHECK(compute_In(m, 14).value == Approx(df).epsilon(1e-3));
  const auto flat = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel());
  CHECK(compute_In(flat, 3).value == 0.0);
  // xi is infinite off zero for alpha < 1, so any moving kernel diverges.
  CHECK(compute_In(single(jumps(Stable{1.0, 1.0, 0.8}), Kernel(SmoothBump{})), 2).is_divergent());
}

TEST_CASE("I_n for fractional kernels avoids cancellation far from the origin") {
  const auto m = single(jumps(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0}), Kernel(Fractional{0.25}));
  const auto a = compute_In(m, 6);
  REQUIRE(a.is_finite());
  CHECK(compute_In(m, 6, Evaluation::Quadrature).value == Approx(a.value).epsilon(1e-5));
}

TEST_CASE("L1 sandwich") {
  const auto m = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel(Indicator{0.0, 1.0}));
  SimPlan plan;
  plan.n_max = 4;
  plan.replicas = 500;
  const auto rows = verify_L1_sandwich(m, plan);
  REQUIRE(rows.size() == 5);
  CHECK(rows[2].in == Approx(32.0));
  CHECK(rows[2].lower == Approx(0.25 * std::sqrt(32.0)));
  CHECK(rows[2].upper == Approx(40.0));
  for (const auto& r : rows) CHECK(r.inside);

  const auto flat = single(jumps(Stable{1.0, 1.0, 1.5}), Kernel());
  for (const auto& r : verify_L1_sandwich(flat, plan)) {
    CHECK(r.in == 0.0);
    CHECK(r.estimate == 0.0);
    CHECK(r.upper == 0.0);
    CHECK(r.inside);
  }
  CHECK_THROWS_AS(verify_L1_sandwich(single(gaussian(1.0), kStep), plan), DomainError);
}

TEST_CASE("levels are monotone and samples reproducible for every family") {
  const std::vector<MixedModel> models = {
      single(jumps(FiniteAtoms{{{1.0, 1.0}, {-0.5, 2.0}}}), Kernel(SmoothBump{-1.0, 1.0})),
      single(jumps(Stable{1.0, 0.5, 1.5}), Kernel(Indicator{0.0, 0.5})),
      single(jumps(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0}), Kernel(Fractional{0.25})),
      single(jumps(TabulatedTail{{0.01, 1.0, 100.0}, {100.0, 1.0, 1e-6}, -3.0}), Kernel(SmoothBump{0.0, 1.0})),
      single(gaussian(1.0), Kernel(PiecewiseLinear{{0.0, 0.5, 1.0}, {0.0, 1.0, 0.0}})),
      poisson_weierstrass_model(),
  };
  SimPlan plan;
  plan.n_max = 8;
  plan.series_terms = 2e3;
  for (const auto& m : models) {
    const PathSimulator sim(m, plan);
    for (std::uint64_t r = 0; r < 5; ++r) {
      const auto a = sim.sample(r);
      const auto b = sim.sample(r);
      CHECK(a.values == b.values);
      CHECK(a.levels == bv_levels(a));
      for (std::size_t k = 1; k < a.levels.size(); ++k) CHECK(a.levels[k] >= a.levels[k - 1]);
    }
    CHECK(sim.sample(std::uint64_t{0}).values != sim.sample(std::uint64_t{1}).values);
  }
}

TEST_CASE("poisson weierstrass experiment") {
  SimPlan plan;
  plan.replicas = 1500;
  const auto ex = zero_one_experiment(poisson_weierstrass_model(), plan);
  const double e2 = std::exp(-2.0);
  CHECK(std::abs(ex.fraction_empty_window - e2) < 4.0 * ex.fraction_empty_se);
  CHECK(ex.empty_paths_flat);
  CHECK(ex.empty_replicas > 0);
  CHECK(ex.single_atom_replicas > 0);
  // Paths with an atom are flagged as growing unless the atom sits at the
  // very edge of the window.
  CHECK(ex.fraction_bounded >= ex.fraction_empty_window);
  CHECK(ex.fraction_bounded < ex.fraction_empty_window + 0.01);
  CHECK(ex.single_atom_above >= ex.single_atom_replicas * 9 / 10);
  for (double s : ex.single_atom_positions_below) CHECK(std::abs(s) > 0.9);
}

TEST_CASE("bounded-variation kernels give bounded paths") {
  SimPlan plan;
  plan.replicas = 200;
  plan.n_max = 10;
  const auto ex = zero_one_experiment(
      single(jumps(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}}), Kernel(SmoothBump{-1.0, 1.0})), plan);
  CHECK(ex.fraction_bounded == 1.0);
  CHECK_THROWS_AS(zero_one_experiment(single(jumps(Stable{}), Kernel(SmoothBump{})), plan), DomainError);
}
