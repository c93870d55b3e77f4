#include "simma/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace simma {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

using u128 = unsigned __int128;

// cos(pi * b^k * t) for integer b, with the phase b^k t mod 2 computed exactly
// from the binary expansion of t. Keeps the high-frequency terms meaningful.
class WeierstrassPhases {
 public:
  WeierstrassPhases(const WeierstrassBump& w) : w_(w) {
    const auto b = static_cast<u128>(static_cast<unsigned long long>(w.b));
    u128 p = 1;
    long double pf = 1.0L;
    double ak = 1.0;
    for (int k = 0; k < w.terms; ++k) {
      pow_mod_.push_back(p);
      pow_ld_.push_back(pf);
      amp_.push_back(ak);
      p *= b;
      pf *= static_cast<long double>(w.b);
      ak *= w.a;
    }
  }

  // fn(k, a^k, phase) with phase = b^k t mod 2 in [0, 2).
  template <class F>
  void for_each_phase(double t, F&& fn) const {
    int e = 0;
    const double m = std::frexp(t, &e);  // t = m 2^e, m in [0.5, 1)
    const int scale = 53 - e;            // t = M 2^{-scale}
    if (t > 0.0 && scale + 1 <= 128) {
      const auto big_m = static_cast<u128>(static_cast<unsigned long long>(std::ldexp(m, 53)));
      const u128 mask = scale + 1 == 128 ? ~u128{0} : ((u128{1} << (scale + 1)) - 1);
      for (std::size_t k = 0; k < amp_.size(); ++k) {
        const u128 r = (pow_mod_[k] * big_m) & mask;
        fn(k, amp_[k], static_cast<double>(std::ldexp(static_cast<long double>(r), -scale)));
      }
    } else {
      for (std::size_t k = 0; k < amp_.size(); ++k)
        fn(k, amp_[k], static_cast<double>(std::fmod(pow_ld_[k] * static_cast<long double>(t), 2.0L)));
    }
  }

  double series(double t) const {
    double total = 0.0;
    for_each_phase(t, [&](std::size_t, double amp, double phase) { total += amp * std::cos(std::numbers::pi * phase); });
    return total;
  }

  // Antiderivative of eval on [0, 1], term by term:
  // int t(1-t) cos(w t) = t(1-t) sin/w + (1-2t) cos/w^2 + 2 sin/w^3.
  double antiderivative(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    double total = 0.0;
    for_each_phase(t, [&](std::size_t k, double amp, double phase) {
      const double w = static_cast<double>(pow_ld_[k] * std::numbers::pi_v<long double>);
      const double sn = std::sin(std::numbers::pi * phase);
      const double cs = std::cos(std::numbers::pi * phase);
      total += amp * (t * (1.0 - t) * sn / w + (1.0 - 2.0 * t) * cs / (w * w) + 2.0 * sn / (w * w * w));
    });
    return total;
  }

  double eval(double s) const {
    if (!(s > 0.0 && s < 1.0)) return 0.0;
    return series(s) * s * (1.0 - s);
  }

 private:
  WeierstrassBump w_;
  std::vector<u128> pow_mod_;
  std::vector<long double> pow_ld_;
  std::vector<double> amp_;
};

double bump_t(const SmoothBump& sb, double s) { return (2.0 * s - sb.a - sb.b) / (sb.b - sb.a); }

double pwl_eval(const PiecewiseLinear& p, double s) {
  if (s <= p.x.front()) return p.y.front();
  if (s >= p.x.back()) return p.y.back();
  const auto it = std::upper_bound(p.x.begin(), p.x.end(), s);
  const std::size_t i = static_cast<std::size_t>(it - p.x.begin()) - 1;
  const double w = (s - p.x[i]) / (p.x[i + 1] - p.x[i]);
  return p.y[i] + w * (p.y[i + 1] - p.y[i]);
}

// Variation on [a, b] of a function monotone between consecutive `cuts`.
double monotone_pieces_variation(const Kernel& k, double a, double b, std::vector<double> cuts) {
  std::vector<double> pts{a};
  std::sort(cuts.begin(), cuts.end());
  for (double c : cuts)
    if (c > a && c < b) pts.push_back(c);
  pts.push_back(b);
  std::vector<double> terms;
  for (std::size_t i = 1; i < pts.size(); ++i) terms.push_back(std::abs(k.eval(pts[i]) - k.eval(pts[i - 1])));
  return numerics::exact_sum(terms);
}

bool levels_diverge(const std::vector<double>& levels) {
  if (levels.size() < 5) return false;
  const std::size_t n = levels.size();
  for (std::size_t j = n - 4; j < n; ++j)
    if (!(levels[j] > 1.05 * levels[j - 1])) return false;
  return true;
}

}  // namespace

Kernel::Kernel(Variant v) : v_(std::move(v)) {
  std::visit(Overloaded{
                 [](const Fractional& f) {
                   if (!std::isfinite(f.alpha)) throw DomainError("fractional: alpha must be finite");
                 },
                 [](const Indicator& i) {
                   if (!(i.a < i.b) || !std::isfinite(i.a) || !std::isfinite(i.b))
                     throw DomainError("indicator: need finite a < b");
                 },
                 [](const SmoothBump& s) {
                   if (!(s.a < s.b) || !std::isfinite(s.a) || !std::isfinite(s.b))
                     throw DomainError("smooth_bump: need finite a < b");
                 },
                 [](const WeierstrassBump& w) {
                   if (!(w.a > 0.0 && w.a < 1.0)) throw DomainError("weierstrass: a must lie in (0, 1)");
                   if (!(w.b >= 3.0) || std::floor(w.b) != w.b || std::fmod(w.b, 2.0) != 1.0 || w.b > 1e6)
                     throw DomainError("weierstrass: b must be an odd integer >= 3");
                   if (!(w.a * w.b > 1.0 + 1.5 * std::numbers::pi))
                     throw DomainError("weierstrass: need a * b > 1 + 3 pi / 2");
                   if (w.terms < 1 || w.terms > 64) throw DomainError("weierstrass: terms must lie in [1, 64]");
                 },
                 [](const PiecewiseLinear& p) {
                   if (p.x.size() < 2 || p.x.size() != p.y.size())
                     throw DomainError("piecewise_linear: need at least two knots with matching values");
                   for (std::size_t i = 0; i < p.x.size(); ++i) {
                     if (!std::isfinite(p.x[i]) || !std::isfinite(p.y[i]))
                       throw DomainError("piecewise_linear: knots must be finite");
                     if (i > 0 && !(p.x[i] > p.x[i - 1]))
                       throw DomainError("piecewise_linear: knots must be strictly increasing");
                   }
                 },
                 [](const ZeroKernel&) {},
             },
             v_);
}

std::string Kernel::family() const {
  return std::visit(Overloaded{[](const Fractional&) { return std::string("fractional"); },
                               [](const Indicator&) { return std::string("indicator"); },
                               [](const SmoothBump&) { return std::string("smooth_bump"); },
                               [](const WeierstrassBump&) { return std::string("weierstrass"); },
                               [](const PiecewiseLinear&) { return std::string("piecewise_linear"); },
                               [](const ZeroKernel&) { return std::string("zero"); }},
                    v_);
}

double Kernel::eval(double s) const {
  return std::visit(Overloaded{
                        [s](const Fractional& f) {
                          if (!(s > 0.0)) return 0.0;
                          return f.alpha == 0.0 ? 1.0 : std::pow(s, f.alpha);
                        },
                        [s](const Indicator& i) { return (s >= i.a && s <= i.b) ? 1.0 : 0.0; },
                        [s](const SmoothBump& sb) {
                          const double t = bump_t(sb, s);
                          if (!(std::abs(t) < 1.0)) return 0.0;
                          const double q = 1.0 - t * t;
                          return q * q;
                        },
                        [s](const WeierstrassBump& w) { return WeierstrassPhases(w).eval(s); },
                        [s](const PiecewiseLinear& p) { return pwl_eval(p, s); },
                        [](const ZeroKernel&) { return 0.0; },
                    },
                    v_);
}

void Kernel::eval_many(std::span<const double> s, std::span<double> out) const {
  if (const auto* w = std::get_if<WeierstrassBump>(&v_)) {
    const WeierstrassPhases ph(*w);
    for (std::size_t i = 0; i < s.size(); ++i) out[i] = ph.eval(s[i]);
    return;
  }
  for (std::size_t i = 0; i < s.size(); ++i) out[i] = eval(s[i]);
}

double Kernel::integral(double a, double b) const {
  if (a == b) return 0.0;
  if (a > b) return -integral(b, a);
  return std::visit(
      Overloaded{
          [&](const Fractional& f) {
            if (b <= 0.0) return 0.0;
            if (f.alpha <= -1.0) throw DomainError("fractional: integral diverges at 0 for alpha <= -1");
            const auto F = [&](double u) { return u > 0.0 ? std::pow(u, f.alpha + 1.0) / (f.alpha + 1.0) : 0.0; };
            return F(b) - F(a);
          },
          [&](const Indicator& i) { return std::max(0.0, std::min(b, i.b) - std::max(a, i.a)); },
          [&](const SmoothBump& sb) {
            // (1 - t^2)^2 integrates to t - 2t^3/3 + t^5/5 in t; ds = (b - a)/2 dt.
            const auto G = [&](double u) {
              const double t = std::clamp(bump_t(sb, u), -1.0, 1.0);
              const double t2 = t * t;
              return t * (1.0 - t2 * (2.0 / 3.0) + t2 * t2 / 5.0);
            };
            return 0.5 * (sb.b - sb.a) * (G(b) - G(a));
          },
          [&](const WeierstrassBump& w) {
            const WeierstrassPhases ph(w);
            return ph.antiderivative(b) - ph.antiderivative(a);
          },
          [&](const PiecewiseLinear& p) {
            // Constant beyond the end knots, trapezoids in between.
            std::vector<double> pts{a};
            for (double x : p.x)
              if (x > a && x < b) pts.push_back(x);
            pts.push_back(b);
            std::vector<double> terms;
            for (std::size_t i = 1; i < pts.size(); ++i)
              terms.push_back(0.5 * (pts[i] - pts[i - 1]) * (pwl_eval(p, pts[i]) + pwl_eval(p, pts[i - 1])));
            return numerics::exact_sum(terms);
          },
          [](const ZeroKernel&) { return 0.0; },
      },
      v_);
}

bool Kernel::is_ac() const {
  return std::visit(Overloaded{[](const Fractional& f) { return f.alpha > 0.0; },
                               [](const Indicator&) { return false; }, [](const SmoothBump&) { return true; },
                               [](const WeierstrassBump&) { return false; },
                               [](const PiecewiseLinear&) { return true; }, [](const ZeroKernel&) { return true; }},
                    v_);
}

std::optional<double> Kernel::derivative(double s) const {
  if (!is_ac()) return std::nullopt;
  return std::visit(Overloaded{
                        [s](const Fractional& f) {
                          if (!(s > 0.0)) return 0.0;
                          return f.alpha == 1.0 ? 1.0 : f.alpha * std::pow(s, f.alpha - 1.0);
                        },
                        [](const Indicator&) { return 0.0; },
                        [s](const SmoothBump& sb) {
                          const double t = bump_t(sb, s);
                          if (!(std::abs(t) < 1.0)) return 0.0;
                          return -4.0 * t * (1.0 - t * t) * 2.0 / (sb.b - sb.a);
                        },
                        [](const WeierstrassBump&) { return 0.0; },
                        [s](const PiecewiseLinear& p) {
                          if (s < p.x.front() || s > p.x.back()) return 0.0;
                          auto it = std::upper_bound(p.x.begin(), p.x.end(), s);
                          std::size_t i = static_cast<std::size_t>(it - p.x.begin());
                          i = std::clamp<std::size_t>(i, 1, p.x.size() - 1) - 1;
                          return (p.y[i + 1] - p.y[i]) / (p.x[i + 1] - p.x[i]);
                        },
                        [](const ZeroKernel&) { return 0.0; },
                    },
                    v_);
}

numerics::Interval Kernel::support() const {
  return std::visit(Overloaded{[](const Fractional&) { return numerics::Interval{0.0, kInf}; },
                               [](const Indicator& i) { return numerics::Interval{i.a, i.b}; },
                               [](const SmoothBump& s) { return numerics::Interval{s.a, s.b}; },
                               [](const WeierstrassBump&) { return numerics::Interval{0.0, 1.0}; },
                               [](const PiecewiseLinear& p) {
                                 const double lo = p.y.front() == 0.0 ? p.x.front() : -kInf;
                                 const double hi = p.y.back() == 0.0 ? p.x.back() : kInf;
                                 return numerics::Interval{lo, hi};
                               },
                               [](const ZeroKernel&) { return numerics::Interval{0.0, 0.0}; }},
                    v_);
}

numerics::Interval Kernel::variation_support() const {
  return std::visit(Overloaded{[](const Fractional& f) {
                                 return f.alpha == 0.0 ? numerics::Interval{0.0, 0.0}
                                                       : numerics::Interval{0.0, kInf};
                               },
                               [](const PiecewiseLinear& p) { return numerics::Interval{p.x.front(), p.x.back()}; },
                               [this](const auto&) { return support(); }},
                    v_);
}

std::vector<double> Kernel::breakpoints() const {
  return std::visit(Overloaded{[](const Fractional&) { return std::vector<double>{0.0}; },
                               [](const Indicator& i) { return std::vector<double>{i.a, i.b}; },
                               [](const SmoothBump& s) { return std::vector<double>{s.a, 0.5 * (s.a + s.b), s.b}; },
                               [](const WeierstrassBump&) { return std::vector<double>{0.0, 1.0}; },
                               [](const PiecewiseLinear& p) { return p.x; },
                               [](const ZeroKernel&) { return std::vector<double>{}; }},
                    v_);
}

std::vector<double> Kernel::singular_points() const {
  if (const auto* f = std::get_if<Fractional>(&v_))
    if (f->alpha < 1.0 && f->alpha != 0.0) return {0.0};
  return {};
}

bool Kernel::locally_bv() const {
  if (std::holds_alternative<WeierstrassBump>(v_)) return false;
  if (const auto* f = std::get_if<Fractional>(&v_)) return f->alpha >= 0.0;
  return true;
}

SectionBV section_bv(const Kernel& k, double a, double b, int n_max) {
  if (!(a < b)) throw DomainError("section_bv: need a < b");
  if (n_max < 0 || n_max > 24) throw DomainError("section_bv: n_max must lie in [0, 24]");
  SectionBV out;
  const auto exact = [&](double v) {
    out.exact = true;
    out.value = v;
    return out;
  };
  const auto& v = k.variant();
  if (std::holds_alternative<ZeroKernel>(v)) return exact(0.0);
  if (const auto* f = std::get_if<Fractional>(&v)) {
    if (f->alpha >= 0.0) return exact(k.eval(b) - k.eval(a));
    if (b <= 0.0) return exact(0.0);
    if (a <= 0.0) return exact(kInf);
    return exact(k.eval(a) - k.eval(b));
  }
  if (const auto* i = std::get_if<Indicator>(&v)) {
    double jumps = 0.0;
    if (a < i->a && i->a <= b) jumps += 1.0;
    if (a <= i->b && i->b < b) jumps += 1.0;
    return exact(jumps);
  }
  if (std::holds_alternative<SmoothBump>(v) || std::holds_alternative<PiecewiseLinear>(v))
    return exact(monotone_pieces_variation(k, a, b, k.breakpoints()));

  // No closed form: dyadic levels.
  numerics::DyadicGrid grid(a, b, n_max);
  const auto pts = grid.points();
  std::vector<double> vals(pts.size());
  k.eval_many(pts, vals);
  out.levels = numerics::dyadic_levels(vals);
  out.value = out.levels.back();
  out.divergent = levels_diverge(out.levels);
  return out;
}

KStar kstar(const Kernel& k, const ShiftGrid& grid, int n_max) {
  const auto& v = k.variant();
  if (std::holds_alternative<ZeroKernel>(v)) return {0.0, true, false};
  if (const auto* f = std::get_if<Fractional>(&v)) {
    // (1 - s)_+^alpha - (-s)_+^alpha <= 1 for alpha in [0, 1], unbounded otherwise.
    if (f->alpha >= 0.0 && f->alpha <= 1.0) return {1.0, true, false};
    return {kInf, true, false};
  }
  if (const auto* i = std::get_if<Indicator>(&v)) return {i->b - i->a < 1.0 ? 2.0 : 1.0, true, false};
  if (const auto* s = std::get_if<SmoothBump>(&v))
    if (s->b - s->a <= 1.0) return {2.0, true, false};

  const auto sup = k.support();
  if (std::isfinite(sup.lo) && std::isfinite(sup.hi)) {
    if (grid.lo > sup.lo - 1.0 + 1e-12 || grid.hi < sup.hi - 1e-12)
      throw DomainError("kstar: shift grid must cover the support dilated by one unit");
  }
  if (grid.points < 2 || !(grid.hi > grid.lo)) throw DomainError("kstar: need a nondegenerate shift grid");

  if (!k.locally_bv()) {
    // Any window overlapping the support shows the roughness; certify on the densest one.
    const double c = std::isfinite(sup.lo) ? sup.lo : grid.lo;
    const auto sec = section_bv(k, c, c + 1.0, n_max);
    return {sec.divergent ? kInf : sec.value, false, sec.divergent};
  }
  KStar out;
  for (int j = 0; j < grid.points; ++j) {
    const double c = grid.lo + (grid.hi - grid.lo) * j / (grid.points - 1);
    const auto sec = section_bv(k, c, c + 1.0, n_max);
    if (sec.divergent) return {kInf, false, true};
    out.value = std::max(out.value, sec.value);
  }
  return out;
}

KStar kstar(const Kernel& k, int n_max) {
  auto sup = k.variation_support();
  if (!std::isfinite(sup.lo)) sup.lo = -8.0;
  if (!std::isfinite(sup.hi)) sup.hi = 8.0;
  return kstar(k, ShiftGrid{sup.lo - 1.0, sup.hi, 1025}, n_max);
}

}  // namespace simma
