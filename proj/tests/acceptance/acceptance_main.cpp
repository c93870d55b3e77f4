// Runs every acceptance criterion at its stated tolerance and prints one
// [PASS]/[FAIL] line per criterion. Exit status is nonzero if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "simma/criteria.hpp"
#include "simma/noise_models.hpp"
#include "simma/simulate.hpp"

using namespace simma;

namespace {

struct Result {
  bool pass = true;
  std::string detail;
};

class Report {
 public:
  void fail(const std::string& why) {
    r_.pass = false;
    if (failures_++ < 4) note("FAIL " + why);
  }
  void check(bool ok, const std::string& why) {
    if (!ok) fail(why);
  }
  void note(const std::string& s) { r_.detail += (r_.detail.empty() ? "" : "; ") + s; }
  Result result() {
    if (failures_ > 4) note(std::to_string(failures_ - 4) + " more failures");
    return r_;
  }

 private:
  Result r_;
  int failures_ = 0;
};

std::string g(double x, int prec = 6) {
  std::ostringstream os;
  os.precision(prec);
  os << x;
  return os.str();
}

double rel(double a, double b) { return a == b ? 0.0 : std::abs(a - b) / std::max(std::abs(b), 1e-300); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
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

MixedModel model(NoiseComponent c, Kernel f, Kernel f0) {
  MixedModel m;
  m.noise.components.push_back(std::move(c));
  m.kernels.push_back(KernelPair{std::move(f), std::move(f0)});
  return m;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// 1. Stable xi: quadrature against C |u|^alpha.
Result stable_xi() {
  Report r;
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double a : {1.2, 1.5, 1.9}) {
    const LevyMeasure rho(Stable{1.0, 1.0, a});
    const double c = 2.0 * (1.0 / (a - 1.0) + 1.0 / (2.0 - a));
    for (double u : {0.1, 1.0, 10.0}) {
      const double e = rel(xi(rho, u, Evaluation::Quadrature), c * std::pow(u, a));
      worst = std::max(worst, e);
      r.check(e <= 1e-6, "alpha=" + g(a) + " u=" + g(u) + " rel " + g(e));
    }
  }
  const double dt = seconds_since(t0);
  r.check(dt < 1.0, "took " + g(dt) + " s");
  r.note("max rel err " + g(worst, 3) + ", " + g(dt, 3) + " s");
  return r.result();
}

// 2. Stable moment ratio equals (2 - alpha) / (alpha - 1).
Result stable_ratio() {
  Report r;
  double worst = 0.0;
  for (double a : {1.2, 1.5, 1.9}) {
    const LevyMeasure rho(Stable{1.0, 1.0, a});
    for (double u : log_grid(1e-2, 1e2, 20)) {
      const double e = rel(moment_ratio(rho, u, Evaluation::Quadrature), (2.0 - a) / (a - 1.0));
      worst = std::max(worst, e);
      r.check(e <= 1e-6, "alpha=" + g(a) + " u=" + g(u) + " rel " + g(e));
    }
  }
  r.note("60 points, max rel err " + g(worst, 3));
  return r.result();
}

// 3. Tail identities: first tail moment and truncated second moment in
// terms of g(r) = rho([-r, r]^c), with g integrated by quadrature.
Result tail_identities() {
  Report r;
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  double worst = 0.0;
  const std::vector<std::pair<std::string, LevyMeasure>> cases = {
      {"stable", LevyMeasure(Stable{1.0, 1.0, 1.5})},
      {"tempered", LevyMeasure(TemperedStable{1.0, 1.0, 1.5, 1.0, 1.0})}};
  for (const auto& [name, rho] : cases) {
    const auto gfun = [&rho = rho](double x) { return x > 0.0 ? tail_mass(rho, x) : 0.0; };
    for (double u : log_grid(1e-2, 1e2, 12)) {
      numerics::QuadratureSpec s1 = spec;
      s1.breakpoints = rho.density_breaks();
      const double first = u * gfun(u) + numerics::integrate(gfun, {u, kInf}, s1).value;
      numerics::QuadratureSpec s2 = s1;
      s2.singular_points = {0.0};
      const double second =
          numerics::integrate([&](double x) { return 2.0 * x * gfun(x); }, {0.0, u}, s2).value - u * u * gfun(u);
      const double e1 = rel(tail_first_moment(rho, u), first);
      const double e2 = rel(truncated_second_moment(rho, u), second);
      worst = std::max({worst, e1, e2});
      r.check(e1 <= 1e-5, name + " first moment u=" + g(u) + " rel " + g(e1));
      r.check(e2 <= 1e-5, name + " second moment u=" + g(u) + " rel " + g(e2));
    }
  }
  r.note("48 identities, max rel err " + g(worst, 3));
  return r.result();
}

// 4. int (|f' x|^2 ^ |f' x|) ds for f = s_+^alpha by direct quadrature.
Result section_identity() {
  Report r;
  double worst = 0.0;
  for (double a : {0.1, 0.25, 0.4}) {
    for (double x : {0.5, 1.0, 2.0}) {
      const auto fn = [a, x](double s) {
        const double d = std::abs(a * std::pow(s, a - 1.0) * x);
        return std::min(d * d, d);
      };
      numerics::QuadratureSpec spec;
      spec.rel_tol = 1e-11;
      spec.abs_tol = 1e-300;
      spec.singular_points = {0.0};
      spec.breakpoints = {std::pow(a * std::abs(x), 1.0 / (1.0 - a))};
      const double direct = numerics::integrate(fn, {0.0, kInf}, spec).value;
      const double p = 1.0 / (1.0 - a);
      const double closed = std::pow(std::abs(x), p) * std::pow(a, p) * (1.0 / a + 1.0 / (1.0 - 2.0 * a));
      const double e = rel(direct, closed);
      worst = std::max(worst, e);
      r.check(e <= 1e-6, "alpha=" + g(a) + " x=" + g(x) + " rel " + g(e));
      const double lib = supflp_section_integral(a, x);
      r.check(rel(lib, closed) <= 1e-12, "library closed form alpha=" + g(a) + " x=" + g(x));
      if (a == 0.25 && x == 1.0) {
        r.check(rel(direct, 0.944940787421154874) <= 1e-6, "spot value " + g(direct, 12));
        r.note("spot alpha=0.25 x=1: " + g(direct, 9));
      }
    }
  }
  r.note("max rel err " + g(worst, 3));
  return r.result();
}

// 5. Moment ratio at u = 1e4 against the regular-variation limit at beta = -1.5.
Result karamata() {
  Report r;
  const double lim = karamata_limit(-1.5);
  const double v = moment_ratio(LevyMeasure(Stable{1.0, 1.0, 1.5}), 1e4);
  r.check(rel(v, lim) <= 0.01, "ratio " + g(v) + " vs limit " + g(lim));
  r.check(std::abs(lim - 1.0) < 1e-12, "limit expression " + g(lim, 17) + " != 1");
  r.note("ratio " + g(v, 9) + ", limit " + g(lim, 9));
  return r.result();
}

// 6. Brownian motion: 2^4 E|X(2^-4)| = 4 sqrt(2/pi).
Result brownian() {
  Report r;
  const auto t0 = std::chrono::steady_clock::now();
  SimPlan plan;
  plan.n_max = 4;
  plan.replicas = 10000;
  const auto est = mc_expected_variation(model(gaussian(1.0), Kernel(Fractional{0.0}), Kernel(Fractional{0.0})), plan, 4);
  const double target = 4.0 * std::sqrt(2.0 / std::numbers::pi);
  const double dt = seconds_since(t0);
  r.check(std::abs(est.mean - target) <= 3.0 * est.se,
          "estimate " + g(est.mean) + " +- " + g(est.se) + " vs " + g(target));
  r.check(dt < 10.0, "took " + g(dt) + " s");
  r.note("estimate " + g(est.mean) + " +- " + g(est.se) + " vs " + g(target) + ", " + g(dt, 3) + " s");
  return r.result();
}

// 7. Compound Poisson with +-1 jumps at total rate 2: E V = 2.
Result compound_poisson() {
  Report r;
  SimPlan plan;
  plan.n_max = 12;
  plan.replicas = 10000;
  const auto m = model(jumps(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}}), Kernel(Fractional{0.0}), Kernel(Fractional{0.0}));
  const PathSimulator sim(m, plan);
  std::vector<double> v12;
  std::vector<double> v8;
  std::size_t nonmonotone = 0;
  for (std::size_t i = 0; i < plan.replicas; ++i) {
    const auto p = sim.sample(std::uint64_t{i});
    for (std::size_t k = 1; k < p.levels.size(); ++k) nonmonotone += p.levels[k] < p.levels[k - 1];
    v12.push_back(p.levels[12]);
    v8.push_back(p.levels[8]);
  }
  const auto [m12, se12] = mean_se(v12);
  const double m8 = mean_se(v8).first;
  r.check(std::abs(m12 - 2.0) <= 3.0 * se12, "E V_12 " + g(m12) + " +- " + g(se12));
  r.check(nonmonotone == 0, std::to_string(nonmonotone) + " level decreases");
  r.check(m12 / m8 < 1.05, "V_12/V_8 " + g(m12 / m8));
  r.note("E V_12 = " + g(m12) + " +- " + g(se12) + ", V_12/V_8 = " + g(m12 / m8, 8));
  return r.result();
}

// 8. MC estimate of E V_{n_max} under the expected-variation bound.
Result corollary() {
  Report r;
  const Kernel bump(SmoothBump{-1.0, 1.0});
  struct Case {
    std::string name;
    MixedModel m;
    int n_max;
    std::size_t replicas;
  };
  const std::vector<Case> cases = {
      {"bump+gaussian", model(gaussian(1.0), bump, bump), 10, 2000},
      {"bump+atoms", model(jumps(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}}), bump, bump), 10, 2000},
      {"bump+tempered(1.2)", model(jumps(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0}), bump, bump), 8, 1000},
  };
  for (const auto& c : cases) {
    const auto b = expected_bv_bound(c.m);
    if (!b.ok) {
      r.fail(c.name + " bound refused: " + b.reason);
      continue;
    }
    SimPlan plan;
    plan.n_max = c.n_max;
    plan.replicas = c.replicas;
    const auto est = mc_expected_variation(c.m, plan, c.n_max);
    const double ev = est.level_means[c.n_max];
    const double se = est.level_se[c.n_max];
    r.check(ev <= b.value + 3.0 * se, c.name + " E V " + g(ev) + " > bound " + g(b.value));
    r.note(c.name + ": E V_" + std::to_string(c.n_max) + " = " + g(ev) + " +- " + g(se, 2) + " <= " + g(b.value));
  }
  return r.result();
}

// 9. L1 bounds on 2^n E|X(2^-n) - X(0)| with I_n = 16 2^{n/2}.
Result sandwich() {
  Report r;
  const auto m = model(jumps(Stable{1.0, 1.0, 1.5}), Kernel(Indicator{0.0, 1.0}), Kernel());
  SimPlan plan;
  plan.n_max = 6;
  plan.replicas = 5000;
  const auto rows = verify_L1_sandwich(m, plan);
  for (const auto& row : rows) {
    const double in = 16.0 * std::pow(2.0, row.n / 2.0);
    r.check(rel(row.in, in) <= 1e-12, "I_" + std::to_string(row.n) + " = " + g(row.in) + " vs " + g(in));
    const double lo = 0.25 * std::min(in, std::sqrt(in));
    const double hi = 1.25 * std::max(in, std::sqrt(in));
    r.check(row.estimate >= lo - 3.0 * row.se && row.estimate <= hi + 3.0 * row.se,
            "n=" + std::to_string(row.n) + " estimate " + g(row.estimate) + " outside [" + g(lo) + ", " + g(hi) + "]");
  }
  std::string est;
  for (const auto& row : rows) est += (row.n ? " " : "") + g(row.estimate, 4);
  r.note("estimates n=0..6: " + est);
  return r.result();
}

// 10. Unit-rate Poisson noise against the Weierstrass kernel.
Result poisson_weierstrass() {
  Report r;
  SimPlan plan;
  plan.n_max = 12;
  plan.replicas = 10000;
  const auto ex = zero_one_experiment(poisson_weierstrass_model(), plan, 10.0);
  const double e2 = std::exp(-2.0);
  r.check(std::abs(ex.fraction_empty_window - e2) <= 3.0 * ex.fraction_empty_se,
          "empty fraction " + g(ex.fraction_empty_window) + " +- " + g(ex.fraction_empty_se));
  r.check(ex.single_atom_above == ex.single_atom_replicas,
          std::to_string(ex.single_atom_replicas - ex.single_atom_above) + " of " +
              std::to_string(ex.single_atom_replicas) + " single-atom replicas have V_12/V_4 <= 10 (min " +
              g(ex.single_atom_min_ratio, 3) + ")");
  r.check(ex.empty_paths_flat, "an empty-window path is not flat");
  r.note("empty fraction " + g(ex.fraction_empty_window) + " +- " + g(ex.fraction_empty_se, 2) + " vs " + g(e2) +
         ", flat " + (ex.empty_paths_flat ? "yes" : "no") + ", single-atom above threshold " +
         std::to_string(ex.single_atom_above) + "/" + std::to_string(ex.single_atom_replicas));
  return r.result();
}

// 11. Verdict table of six reference models.
Result verdict_table() {
  Report r;
  const Kernel frac(Fractional{0.25});
  const Kernel bump(SmoothBump{-1.0, 1.0});
  const Kernel ind(Indicator{0.0, 1.0});
  struct Row {
    std::string name;
    MixedModel m;
    bool fv_expected;
    bool indeterminate_expected;
    TheoremTag tag;
  };
  const std::vector<Row> rows = {
      {"frac+tempered(1.2)", model(jumps(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0}), frac, frac), true, false,
       TheoremTag::Sufficiency},
      {"frac+tempered(1.5)", model(jumps(TemperedStable{1.0, 1.0, 1.5, 1.0, 1.0}), frac, frac), false, false,
       TheoremTag::NecessityBase},
      {"bump+stable(1.5)", model(jumps(Stable{1.0, 1.0, 1.5}), bump, Kernel()), true, false, TheoremTag::Sufficiency},
      {"indicator+stable(1.5)", model(jumps(Stable{1.0, 1.0, 1.5}), ind, Kernel()), false, false,
       TheoremTag::NecessityAC},
      {"frac+gaussian", model(gaussian(1.0), frac, frac), false, false, TheoremTag::NecessityBase},
      {"indicator+atoms", model(jumps(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}}), ind, Kernel()), false, true,
       TheoremTag::None},
  };
  std::string summary;
  for (const auto& row : rows) {
    const Verdict v = verdict(row.m);
    const VerdictStatus want = row.indeterminate_expected ? VerdictStatus::Indeterminate
                               : row.fv_expected          ? VerdictStatus::FiniteVariation
                                                          : VerdictStatus::InfiniteVariation;
    r.check(v.status == want, row.name + " gave " + to_string(v.status));
    r.check(v.theorem == row.tag, row.name + " cites " + to_string(v.theorem));
    r.check(!v.justification.empty(), row.name + " has no justification");
    if (row.indeterminate_expected) {
      bool noted = false;
      for (const auto& n : v.notes) noted = noted || n.find("finite-variation-noise-with-non-ac-kernel") == 0;
      r.check(noted, row.name + " lacks the bounded-variation-noise note");
    }
    if (v.status == VerdictStatus::FiniteVariation)
      r.check(zero_one_classify(row.m).local_law == LocalLaw::HoldsBV, row.name + " local law not Holds(a)");
    summary += (summary.empty() ? "" : ", ") + row.name + " -> " + to_string(v.status) + "/" + to_string(v.theorem);
  }
  r.note(summary);
  return r.result();
}

// 12. Level monotonicity and seed determinism over every family.
Result monotonicity() {
  Report r;
  const Kernel bump(SmoothBump{-1.0, 1.0});
  const std::vector<std::pair<std::string, MixedModel>> models = {
      {"atoms+bump", model(jumps(FiniteAtoms{{{1.0, 1.0}, {-0.5, 2.0}}}), bump, bump)},
      {"stable+indicator", model(jumps(Stable{1.0, 0.5, 1.5}), Kernel(Indicator{0.0, 0.5}), Kernel())},
      {"tempered+fractional",
       model(jumps(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0}), Kernel(Fractional{0.25}), Kernel(Fractional{0.25}))},
      {"tabulated+bump",
       model(jumps(TabulatedTail{{0.01, 1.0, 100.0}, {100.0, 1.0, 1e-6}, -3.0}), Kernel(SmoothBump{0.0, 1.0}),
             Kernel(SmoothBump{0.0, 1.0}))},
      {"gaussian+piecewise-linear",
       model(gaussian(1.0), Kernel(PiecewiseLinear{{0.0, 0.5, 1.0}, {0.0, 1.0, 0.0}}), Kernel())},
      {"gaussian+brownian", model(gaussian(2.0), Kernel(Fractional{0.0}), Kernel(Fractional{0.0}))},
      {"atoms+weierstrass", poisson_weierstrass_model()},
  };
  SimPlan plan;
  plan.n_max = 10;
  plan.series_terms = 2e3;
  std::vector<std::unique_ptr<PathSimulator>> sims;
  for (const auto& [name, m] : models) sims.push_back(std::make_unique<PathSimulator>(m, plan));
  std::mt19937_64 seeds(20240611);
  std::size_t paths = 0;
  for (int i = 0; i < 100; ++i) {
    const numerics::SeedSpec seed{seeds(), 0, static_cast<std::uint64_t>(i)};
    for (std::size_t k = 0; k < sims.size(); ++k) {
      const auto a = sims[k]->sample(seed);
      const auto b = sims[k]->sample(seed);
      ++paths;
      r.check(a.values == b.values && a.levels == b.levels, models[k].first + " not reproducible");
      for (std::size_t n = 1; n < a.levels.size(); ++n)
        r.check(a.levels[n] >= a.levels[n - 1], models[k].first + " V_" + std::to_string(n) + " < V_" +
                                                    std::to_string(n - 1));
    }
  }
  r.note(std::to_string(paths) + " paths over " + std::to_string(models.size()) + " families, each run twice");
  return r.result();
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Result()>>> criteria = {
      {"stable xi closed form", stable_xi},
      {"stable moment ratio", stable_ratio},
      {"tail identities", tail_identities},
      {"fractional section integral", section_identity},
      {"regular-variation limit of the moment ratio", karamata},
      {"brownian increments", brownian},
      {"compound poisson variation", compound_poisson},
      {"expected-variation bound", corollary},
      {"L1 sandwich", sandwich},
      {"poisson noise with a weierstrass kernel", poisson_weierstrass},
      {"verdict table", verdict_table},
      {"level monotonicity and determinism", monotonicity},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Result res;
    try {
      res = criteria[i].second();
    } catch (const std::exception& e) {
      res = {false, std::string("exception: ") + e.what()};
    }
    failed += !res.pass;
    std::printf("[%s] %zu. %s: %s (%.1f s)\n", res.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                res.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
