#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "simma/noise_models.hpp"

using namespace simma;
using doctest::Approx;

namespace {

LevyMeasure stable(double c1, double c2, double a) { return LevyMeasure(Stable{c1, c2, a}); }
LevyMeasure tempered(double d1, double d2, double b, double l1, double l2) {
  return LevyMeasure(TemperedStable{d1, d2, b, l1, l2});
}
LevyMeasure atoms(std::vector<Atom> a) { return LevyMeasure(FiniteAtoms{std::move(a)}); }

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::abs(b); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

}  // namespace

TEST_CASE("construction rejects invalid parameters") {
  CHECK_THROWS_AS(stable(0, 0, 1.5), DomainError);
  CHECK_THROWS_AS(stable(1, 1, 2.0), DomainError);
  CHECK_THROWS_AS(tempered(1, 1, 1.5, 0.0, 1), DomainError);
  CHECK_THROWS_AS(atoms({{0.0, 1.0}}), DomainError);
  CHECK_THROWS_AS(atoms({{1.0, -1.0}}), DomainError);
  CHECK_THROWS_AS(LevyMeasure(TabulatedTail{{1, 2}, {1, 2}, -3}), DomainError);
  // Left slope -2.5 makes int_0^1 r g(r) dr diverge.
  CHECK_THROWS_AS(LevyMeasure(TabulatedTail{{1, 2}, {1, std::pow(2.0, -2.5)}, -3}), DomainError);
}

TEST_CASE("tail_mass") {
  CHECK(tail_mass(stable(1, 1, 1.5), 1.0) == Approx(4.0 / 3.0).epsilon(1e-12));
  CHECK(tail_mass(stable(1, 1, 1.5), 1.0, Evaluation::Quadrature) == Approx(4.0 / 3.0).epsilon(1e-9));
  CHECK(tail_mass(atoms({{1.0, 0.5}}), 0.5) == 0.5);
  CHECK(tail_mass(tempered(1, 1, 1.5, 1, 1), 1.0) == Approx(0.252975639186508842).epsilon(1e-9));
  const double u = 1e-4;
  CHECK(rel_close(std::pow(u, 1.5) * tail_mass(tempered(1, 1, 1.5, 1, 1), u), 4.0 / 3.0, 0.01));
  CHECK_THROWS_AS(tail_mass(stable(1, 1, 1.5), 0.0), DomainError);
  CHECK_THROWS_AS(tail_mass(stable(1, 1, 1.5), -1.0), DomainError);
}

TEST_CASE("truncated_second_moment") {
  CHECK(truncated_second_moment(stable(1, 1, 1.5), 1.0) == Approx(4.0).epsilon(1e-12));
  CHECK(truncated_second_moment(stable(1, 1, 1.5), 1.0, Evaluation::Quadrature) == Approx(4.0).epsilon(1e-9));
  CHECK(truncated_second_moment(atoms({{2.0, 3.0}}), 1.0) == 0.0);
  CHECK(truncated_second_moment(atoms({{2.0, 3.0}}), 2.0) == 12.0);
  CHECK(truncated_second_moment(tempered(1, 1, 1.5, 1, 1), 1.0) == Approx(2.98729653124970810).epsilon(1e-9));
}

TEST_CASE("tail_first_moment") {
  CHECK(tail_first_moment(stable(1, 1, 1.5), 1.0) == Approx(4.0).epsilon(1e-12));
  CHECK(tail_first_moment(stable(1, 1, 1.5), 1.0, Evaluation::Quadrature) == Approx(4.0).epsilon(1e-9));
  CHECK(std::isinf(tail_first_moment(stable(1, 1, 0.8), 1.0)));
  CHECK(std::isinf(tail_first_moment(stable(1, 1, 0.8), 1.0, Evaluation::Quadrature)));
  CHECK(tail_first_moment(atoms({{2.0, 3.0}}), 1.0) == 6.0);
  CHECK(tail_first_moment(tempered(1, 1, 1.5, 1, 1), 1.0) == Approx(0.356295423563121380).epsilon(1e-9));
}

TEST_CASE("xi") {
  CHECK(xi(stable(1, 1, 1.5), 0.0) == 0.0);
  CHECK(xi(tempered(1, 2, 1.1, 1, 3), 0.0) == 0.0);
  CHECK(xi(stable(1, 1, 1.5), 1.0) == Approx(8.0).epsilon(1e-12));
  CHECK(xi(stable(1, 1, 1.5), 1.0, Evaluation::Quadrature) == Approx(8.0).epsilon(1e-8));
  CHECK(xi(atoms({{2.0, 3.0}}), 0.25) == Approx(0.75));
  CHECK(std::isinf(xi(stable(1, 1, 0.9), 1.0)));
  CHECK(std::isinf(xi(stable(1, 1, 0.9), 1.0, Evaluation::Quadrature)));

  SUBCASE("symmetric, monotone, stable scaling") {
    const auto rho = tempered(1, 0.5, 1.3, 2, 1);
    double prev = 0.0;
    for (double u : log_grid(1e-3, 1e3, 13)) {
      const double v = xi(rho, u);
      CHECK(v == xi(rho, -u));
      CHECK(v >= prev);
      prev = v;
    }
    const auto st = stable(0.7, 1.3, 1.6);
    for (double c : {0.1, 3.0, 17.0})
      CHECK(rel_close(xi(st, c * 0.8, Evaluation::Quadrature), std::pow(c, 1.6) * xi(st, 0.8, Evaluation::Quadrature),
                      1e-6));
  }

  SUBCASE("comparable with the convex companion") {
    for (const auto& rho : {stable(1, 1, 1.5), tempered(1, 1, 1.2, 1, 1), atoms({{1, 1}, {-3, 0.5}})}) {
      for (double u : log_grid(1e-2, 1e2, 9)) {
        const double x = xi(rho, u);
        const double xt = xi_convex(rho, u);
        CHECK(xt / 2.0 <= x * (1 + 1e-9));
        CHECK(x <= xt * (1 + 1e-9));
      }
    }
  }
}

TEST_CASE("xi_weighted closed form matches quadrature") {
  for (double a : {0.6, 1.0, 1.5, 1.9}) {
    const auto rho = stable(1.0, 0.5, a);
    for (double u : {0.01, 0.3, 1.0, 7.0, 500.0})
      CHECK(rel_close(xi_weighted(rho, u), xi_weighted(rho, u, Evaluation::Quadrature), 1e-7));
  }
}

TEST_CASE("moment_ratio") {
  for (double u : {1e-2, 1.0, 37.0}) CHECK(moment_ratio(stable(1, 1, 1.5), u) == Approx(1.0).epsilon(1e-12));
  CHECK(moment_ratio(stable(1, 1, 1.2), 10.0) == Approx(4.0).epsilon(1e-12));
  CHECK(moment_ratio(stable(1, 1, 1.2), 10.0, Evaluation::Quadrature) == Approx(4.0).epsilon(1e-7));
  CHECK(moment_ratio(atoms({{1.0, 1.0}}), 2.0) == 0.0);
  // a/0 := inf below the smallest atom.
  CHECK(std::isinf(moment_ratio(atoms({{1.0, 1.0}}), 0.5)));
}

TEST_CASE("karamata limit") {
  CHECK(karamata_limit(-1.5) == Approx(1.0));
  CHECK(karamata_limit(-2.0) == 0.0);
  for (double a : {1.2, 1.5, 1.9}) CHECK(karamata_limit(-a) == Approx((2 - a) / (a - 1)));
  CHECK_THROWS_AS(karamata_limit(-1.0), DomainError);
}

TEST_CASE("abs_moment") {
  const auto m = abs_moment(tempered(1, 1, 1.2, 1, 1), 4.0 / 3.0, false);
  REQUIRE(m.finite());
  CHECK(m.value == Approx(14.0811582428224912).epsilon(1e-12));
  const auto mq = abs_moment(tempered(1, 1, 1.2, 1, 1), 4.0 / 3.0, false, Evaluation::Quadrature);
  CHECK(mq.value == Approx(14.0811582428224912).epsilon(1e-7));
  const auto mw = abs_moment(tempered(1, 1, 1.2, 1, 1), 4.0 / 3.0, true);
  CHECK(mw.value == Approx(13.8424995833015163).epsilon(1e-8));

  // |x|^{4/3} x^{-2.5} is not integrable at 0 (exponent -7/6).
  const auto s = abs_moment(stable(1, 1, 1.5), 4.0 / 3.0, false);
  CHECK(std::isinf(s.value));
  CHECK(s.cause == "at-zero");
  const auto sq = abs_moment(stable(1, 1, 1.5), 4.0 / 3.0, false, Evaluation::Quadrature);
  CHECK(sq.cause == "at-zero");
  const auto s2 = abs_moment(stable(1, 1, 1.5), 1.8, false);
  CHECK(s2.cause == "at-infinity");
  const auto s2q = abs_moment(stable(1, 1, 1.5), 1.8, false, Evaluation::Quadrature);
  CHECK(s2q.cause == "at-infinity");
  const auto sw = abs_moment(stable(1, 1, 1.5), 1.8, true);
  CHECK(sw.value == Approx(abs_moment(stable(1, 1, 1.5), 1.8, true, Evaluation::Quadrature).value).epsilon(1e-8));

  CHECK(abs_moment(atoms({{2.0, 1.0}}), 1.0, true).value == 0.5);
  CHECK(abs_moment(tempered(1, 1, 1.5, 1, 1), 4.0 / 3.0, false).cause == "at-zero");
  CHECK_THROWS_AS(abs_moment(stable(1, 1, 1.5), 2.5, false), DomainError);
}

TEST_CASE("tail identities on a log grid") {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-300;
  const TabulatedTail tab{{0.01, 0.1, 1.0, 10.0}, {300.0, 12.0, 1.0, 0.02}, -2.5};
  for (const auto& rho : {stable(1, 1, 1.5), tempered(1, 1, 1.5, 1, 1), stable(2, 0.5, 1.2), LevyMeasure(tab)}) {
    for (double u : log_grid(0.01, 100.0, 12)) {
      const auto g = [&](double r) { return r > 0 ? tail_mass(rho, r) : 0.0; };
      numerics::QuadratureSpec s1 = spec;
      s1.breakpoints = rho.density_breaks();
      const double tail = numerics::integrate(g, {u, kInf}, s1).value;
      CHECK(rel_close(tail_first_moment(rho, u), u * g(u) + tail, 1e-5));

      numerics::QuadratureSpec s2 = s1;
      s2.singular_points = {0.0};
      const double head = numerics::integrate([&](double r) { return 2.0 * r * g(r); }, {0.0, u}, s2).value;
      CHECK(rel_close(truncated_second_moment(rho, u), head - u * u * g(u), 1e-5));
    }
  }
}

TEST_CASE("tabulated tail follows its table") {
  const TabulatedTail tab{{0.5, 1.0, 4.0}, {4.0, 2.0, 0.5}, -3.0};
  const LevyMeasure rho(tab);
  CHECK(tail_mass(rho, 1.0) == Approx(2.0));
  CHECK(tail_mass(rho, 2.0) == Approx(1.0));
  CHECK(tail_mass(rho, 8.0) == Approx(0.5 / 8.0));
  CHECK(tail_mass(rho, 0.25) == Approx(8.0));
  CHECK(tail_mass(rho, 2.0, Evaluation::Quadrature) == Approx(1.0).epsilon(1e-8));
  CHECK(rho.is_symmetric());
  CHECK(std::isinf(rho.total_mass()));
}

TEST_CASE("infinite variation of the noise") {
  NoiseComponent c;
  c.rho = stable(1, 1, 1.5);
  CHECK(check_infinite_variation_noise(c) == Truth::True);
  c.rho = stable(1, 1, 0.7);
  CHECK(check_infinite_variation_noise(c) == Truth::False);
  c.rho = atoms({{1.0, 2.0}});
  CHECK(check_infinite_variation_noise(c) == Truth::False);
  c.sigma2 = 0.5;
  CHECK(check_infinite_variation_noise(c) == Truth::True);
  c.sigma2 = 0.0;
  c.rho = LevyMeasure(TabulatedTail{{0.1, 1.0}, {std::pow(10.0, 1.5), 1.0}, -3.0});
  CHECK(check_infinite_variation_noise(c) == Truth::True);
  c.rho = LevyMeasure(TabulatedTail{{0.1, 1.0}, {std::pow(10.0, 0.5), 1.0}, -3.0});
  CHECK(check_infinite_variation_noise(c) == Truth::False);
}

TEST_CASE("purely stochastic components") {
  NoiseComponent c;
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.rho = atoms({});
  CHECK_THROWS_AS(c.validate(), DomainError);
  c.sigma2 = 1.0;
  CHECK_NOTHROW(c.validate());
  MixedNoise empty;
  CHECK_THROWS_AS(empty.validate(), DomainError);
}

TEST_CASE("ratio conditions") {
  MixedNoise one;
  one.components.push_back({1.0, 0.0, 0.0, stable(1, 1, 1.5)});
  auto rep = check_ratio_conditions(one);
  CHECK(rep.components[0].u0 == Truth::True);
  CHECK_FALSE(rep.components[0].u0_heuristic);
  CHECK(rep.u00_sup == Approx(1.0));
  CHECK(rep.u00_certified);

  MixedNoise ts;
  ts.components.push_back({1.0, 0.0, 0.0, tempered(1, 1, 1.5, 1, 1)});
  rep = check_ratio_conditions(ts);
  CHECK(rep.components[0].u0 == Truth::True);
  CHECK(rep.components[0].u0_basis.find("second moment") != std::string::npos);
  CHECK(rep.u00_certified);

  MixedNoise two;
  two.components.push_back({0.5, 0.0, 0.0, stable(1, 1, 1.2)});
  two.components.push_back({0.5, 0.0, 0.0, stable(1, 1, 1.9)});
  rep = check_ratio_conditions(two);
  CHECK(rep.u00_sup == Approx(4.0));

  MixedNoise fa;
  fa.components.push_back({1.0, 0.0, 0.0, atoms({{1, 1}})});
  rep = check_ratio_conditions(fa);
  CHECK(rep.components[0].u0 == Truth::True);
  CHECK(std::isinf(rep.u00_sup));
  CHECK_FALSE(rep.u00_certified);

  CHECK_THROWS_AS(check_ratio_conditions(one, UGrid{1e-2, 1e2, 29}), DomainError);
  CHECK_THROWS_AS(check_ratio_conditions(one, UGrid{1e-3, 1e4, 10}), DomainError);
}

TEST_CASE("centering drift and B functional") {
  CHECK(centering_drift(stable(1, 1, 1.5)) == 0.0);
  CHECK(std::isnan(centering_drift(stable(1, 1, 0.8))));
  // -(c1 - c2)(1/(alpha-1) - 1/alpha) = -(2 - 2/3).
  CHECK(centering_drift(stable(2, 1, 1.5)) == Approx(-4.0 / 3.0));
  CHECK(centering_drift(tempered(2, 1, 1.5, 1, 1)) < 0.0);
  CHECK(centering_drift(atoms({{2.0, 1.0}, {0.5, 3.0}})) == Approx(-1.0));
  CHECK(b_jump(stable(1, 1, 1.5), 3.0) == 0.0);
  // Single atom at y = 2, x = 0.25: [[0.5]] - 0.25 [[2]] = 0.5 - 0.25.
  CHECK(b_jump(atoms({{2.0, 1.0}}), 0.25) == Approx(0.25));
  CHECK(k_jump(atoms({{2.0, 1.0}}), 0.25) == Approx(0.25));
  CHECK(k_jump(atoms({{2.0, 1.0}}), 1.0) == Approx(1.0));
}
