#include "simma/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace simma {

namespace {

using numerics::Interval;
using numerics::QuadratureSpec;

const Fractional* as_fractional(const Kernel& k) { return std::get_if<Fractional>(&k.variant()); }

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string describe(const Assessment& a) {
  std::string s = numerics::to_string(a.status);
  if (a.is_finite()) s += " " + fmt(a.value);
  if (!a.cause.empty()) s += " (" + a.cause + ")";
  return s;
}

QuadratureSpec criteria_spec() {
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  return spec;
}

// int h(f'(s)) ds over the variation support of k.
Assessment derivative_integral(const Kernel& k, const std::function<double(double)>& h) {
  const Interval vs = k.variation_support();
  if (!(vs.hi > vs.lo)) return Assessment::finite(0.0);
  QuadratureSpec spec = criteria_spec();
  spec.breakpoints = k.breakpoints();
  spec.singular_points = k.singular_points();
  return numerics::detect_divergence([&](double s) { return h(*k.derivative(s)); }, vs, spec);
}

Assessment not_ac() { return Assessment::indeterminate(0.0, "NotAC: kernel is not absolutely continuous"); }

// alpha^{1/(1-alpha)} (1/alpha + 1/(1-2 alpha)).
double supflp_bracket(double alpha) {
  return std::pow(alpha, 1.0 / (1.0 - alpha)) * (1.0 / alpha + 1.0 / (1.0 - 2.0 * alpha));
}

Assessment cf_part(const NoiseComponent& c, const Kernel& f, Evaluation mode) {
  if (!f.is_ac()) return not_ac();
  if (c.sigma2 == 0.0) return Assessment::finite(0.0);
  if (const auto* fr = as_fractional(f); fr && mode == Evaluation::Auto) {
    // alpha^2 int_0^inf s^{2 alpha - 2} ds never converges.
    const double a = fr->alpha;
    if (a < 0.5) return Assessment::divergent(0.0, "power s^(2alpha-2) not integrable at 0");
    if (a > 0.5) return Assessment::divergent(kInf, "power s^(2alpha-2) not integrable at infinity");
    return Assessment::divergent(kInf, "1/s not integrable at 0 or infinity");
  }
  Assessment a = derivative_integral(f, [](double d) { return d * d; });
  if (a.is_finite()) {
    a.value *= c.sigma2;
    a.error *= c.sigma2;
  }
  return a;
}

// int xi(f'(s)) ds, or the (1 ^ x^-2)-weighted version.
Assessment xi_part(const NoiseComponent& c, const Kernel& f, bool weighted, Evaluation mode) {
  if (!f.is_ac()) return not_ac();
  if (!c.has_jumps()) return Assessment::finite(0.0);
  const Interval vs = f.variation_support();
  if (!(vs.hi > vs.lo)) return Assessment::finite(0.0);
  const LevyMeasure& rho = *c.rho;

  if (!weighted && !std::isfinite(tail_first_moment(rho, 1.0)))
    return Assessment::divergent(std::numeric_limits<double>::quiet_NaN(),
                                 "xi infinite off 0: first tail moment of rho diverges");

  if (mode == Evaluation::Auto) {
    if (const auto* fr = as_fractional(f)) {
      const double a = fr->alpha;
      if (a >= 0.5)
        return Assessment::divergent(kInf, "s-integral diverges at infinity for every x != 0 (alpha >= 1/2)");
      // Fubini with the closed form of the s-integral.
      const double p = 1.0 / (1.0 - a);
      const Moment m = abs_moment(rho, p, weighted);
      if (!m.finite())
        return Assessment::divergent(std::numeric_limits<double>::quiet_NaN(),
                                     "moment of order " + fmt(p) + " diverges " + m.cause);
      return Assessment::finite(supflp_bracket(a) * m.value);
    }
    if (const auto* st = std::get_if<Stable>(&rho.variant()); st && !weighted) {
      const double al = st->alpha;
      const double cst = (st->c1 + st->c2) * (1.0 / (al - 1.0) + 1.0 / (2.0 - al));
      Assessment r = derivative_integral(f, [al](double d) { return std::pow(std::abs(d), al); });
      if (r.is_finite()) {
        r.value *= cst;
        r.error *= cst;
      }
      return r;
    }
  }
  if (weighted)
    return derivative_integral(f, [&rho, mode](double d) { return xi_weighted(rho, d, mode); });
  return derivative_integral(f, [&rho, mode](double d) { return xi(rho, d, mode); });
}

Assessment combine(const std::vector<Assessment>& parts, const std::vector<double>& weights) {
  std::vector<double> terms;
  double err = 0.0;
  const Assessment* indet = nullptr;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    const Assessment& p = parts[i];
    if (p.is_divergent()) {
      Assessment d = p;
      d.cause = "component " + std::to_string(i) + ": " + p.cause;
      return d;
    }
    if (p.status == Status::Indeterminate && !indet) indet = &p;
    terms.push_back(weights[i] * p.value);
    err += weights[i] * p.error;
  }
  const double total = numerics::exact_sum(terms);
  if (indet) {
    const auto idx = static_cast<std::size_t>(indet - parts.data());
    return Assessment::indeterminate(total, "component " + std::to_string(idx) + ": " + indet->cause);
  }
  return Assessment::finite(total, err);
}

std::vector<double> weights_of(const MixedModel& m) {
  std::vector<double> w;
  for (const auto& c : m.noise.components) w.push_back(c.weight);
  return w;
}

// phi(s) = f(1 - s) - f0(-s), computed without cancellation for equal
// fractional kernels far to the left.
std::function<double(double)> phi_of(const KernelPair& kp) {
  const auto* fr = as_fractional(kp.f);
  if (fr && kp.f == kp.f0 && fr->alpha != 0.0) {
    const double a = fr->alpha;
    return [a, f = kp.f](double s) {
      if (s < -1.0) return std::pow(-s, a) * std::expm1(a * std::log1p(-1.0 / s));
      return f.eval(1.0 - s) - f.eval(-s);
    };
  }
  return [f = kp.f, f0 = kp.f0](double s) { return f.eval(1.0 - s) - f0.eval(-s); };
}

// Hull of the supports of f(1 - .) and f0(-.).
Interval phi_domain(const KernelPair& kp) {
  double lo = kInf, hi = -kInf;
  const auto add = [&](Interval iv) {
    if (!(iv.hi > iv.lo)) return;
    lo = std::min(lo, iv.lo);
    hi = std::max(hi, iv.hi);
  };
  const Interval sf = kp.f.support();
  const Interval s0 = kp.f0.support();
  add({1.0 - sf.hi, 1.0 - sf.lo});
  add({-s0.hi, -s0.lo});
  return {lo, hi};
}

QuadratureSpec phi_spec(const KernelPair& kp) {
  QuadratureSpec spec = criteria_spec();
  for (double b : kp.f.breakpoints()) spec.breakpoints.push_back(1.0 - b);
  for (double b : kp.f0.breakpoints()) spec.breakpoints.push_back(-b);
  for (double b : kp.f.singular_points()) spec.singular_points.push_back(1.0 - b);
  for (double b : kp.f0.singular_points()) spec.singular_points.push_back(-b);
  return spec;
}

}  // namespace

void MixedModel::validate() const {
  noise.validate();
  if (kernels.size() != noise.components.size())
    throw DomainError("model: one kernel pair is required per noise component");
  if (!(interval.lo < interval.hi) || !std::isfinite(interval.lo) || !std::isfinite(interval.hi))
    throw DomainError("model: interval must be finite with lo < hi");
}

Aggregate compute_Cf(const MixedModel& model) {
  model.validate();
  Aggregate out;
  for (std::size_t i = 0; i < model.size(); ++i)
    out.parts.push_back(cf_part(model.noise.components[i], model.kernels[i].f, Evaluation::Auto));
  out.total = combine(out.parts, weights_of(model));
  return out;
}

Aggregate compute_Df(const MixedModel& model, Evaluation mode) {
  model.validate();
  Aggregate out;
  for (std::size_t i = 0; i < model.size(); ++i)
    out.parts.push_back(xi_part(model.noise.components[i], model.kernels[i].f, false, mode));
  out.total = combine(out.parts, weights_of(model));
  return out;
}

NecessaryIntegrals necessary_integral(const MixedModel& model, Evaluation mode) {
  model.validate();
  NecessaryIntegrals out;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.noise.components[i];
    const auto& f = model.kernels[i].f;
    out.weighted.push_back(xi_part(c, f, true, mode));
    out.unweighted.push_back(xi_part(c, f, false, mode));
  }
  return out;
}

double supflp_section_integral(double alpha, double x, Evaluation mode) {
  if (!(alpha > 0.0 && alpha < 0.5)) throw DomainError("supflp_section_integral: alpha must lie in (0, 1/2)");
  const double ax = std::abs(x);
  if (ax == 0.0) return 0.0;
  if (mode == Evaluation::Auto) return std::pow(ax, 1.0 / (1.0 - alpha)) * supflp_bracket(alpha);
  // |f'(s) x| = 1 at s*; above 1 to the left of s*, below to the right.
  const double s_star = std::pow(alpha * ax, 1.0 / (1.0 - alpha));
  QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  spec.singular_points = {0.0};
  spec.breakpoints = {s_star};
  const auto g = [alpha, ax](double s) {
    const double z = alpha * std::pow(s, alpha - 1.0) * ax;
    return std::min(z * z, z);
  };
  return numerics::integrate(g, {0.0, kInf}, spec).value;
}

FractionalReport fractional_condition(const MixedModel& model) {
  model.validate();
  FractionalReport rep;
  rep.admissible = true;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const std::string tag = "component " + std::to_string(i) + ": ";
    const auto& kp = model.kernels[i];
    const auto* fr = as_fractional(kp.f);
    if (!fr || !(kp.f == kp.f0)) {
      rep.admissible = false;
      rep.evidence.push_back(tag + "kernel pair is not f = f0 = s_+^alpha");
      continue;
    }
    if (fr->alpha >= 0.5) {
      rep.admissible = false;
      rep.evidence.push_back(tag + "alpha >= 1/2");
    } else if (fr->alpha < 0.0) {
      rep.admissible = false;
      rep.evidence.push_back(tag + "alpha < 0");
    }
    if (model.noise.components[i].sigma2 > 0.0) rep.evidence.push_back(tag + "sigma2 > 0");
  }
  if (!rep.admissible) {
    rep.sufficient = Assessment::indeterminate(kInf, "not applicable: kernels outside the admissible family");
    return rep;
  }

  std::vector<double> terms;
  std::string div_cause;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.noise.components[i];
    const double a = as_fractional(model.kernels[i].f)->alpha;
    const double p = 1.0 / (1.0 - a);
    if (!c.has_jumps()) {
      rep.necessary.push_back({0.0, {}});
      rep.weighted.push_back({0.0, {}});
    } else {
      rep.necessary.push_back(abs_moment(*c.rho, p, false));
      rep.weighted.push_back(abs_moment(*c.rho, p, true));
    }
    const Moment& m = rep.necessary.back();
    if (!m.finite()) {
      if (div_cause.empty())
        div_cause = "component " + std::to_string(i) + ": moment of order " + fmt(p) + " diverges " + m.cause;
      rep.evidence.push_back("component " + std::to_string(i) + ": moment of order " + fmt(p) + " infinite (" +
                             m.cause + ")");
    } else {
      terms.push_back(c.weight * m.value / (0.5 - a));
    }
    if (a > 0.0) {
      for (double x : {0.5, 1.0, 2.0}) {
        IdentityCheck ic{a, x, supflp_section_integral(a, x, Evaluation::Auto),
                         supflp_section_integral(a, x, Evaluation::Quadrature), 0.0};
        ic.rel_error = std::abs(ic.quadrature - ic.closed_form) / ic.closed_form;
        rep.identities.push_back(ic);
      }
    }
  }
  rep.sufficient = div_cause.empty() ? Assessment::finite(numerics::exact_sum(terms))
                                     : Assessment::divergent(std::numeric_limits<double>::quiet_NaN(), div_cause);
  return rep;
}

const char* to_string(ExistenceStatus s) {
  switch (s) {
    case ExistenceStatus::Exists: return "Exists";
    case ExistenceStatus::FailsK: return "FailsK";
    case ExistenceStatus::FailsB: return "FailsB";
    case ExistenceStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

ExistenceReport existence_check(const MixedModel& model) {
  model.validate();
  ExistenceReport rep;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.noise.components[i];
    const auto& kp = model.kernels[i];
    const Interval dom = phi_domain(kp);
    if (!(dom.hi > dom.lo)) {
      rep.k_parts.push_back(Assessment::finite(0.0));
      rep.b_parts.push_back(Assessment::finite(0.0));
      continue;
    }
    const auto phi = phi_of(kp);
    const QuadratureSpec spec = phi_spec(kp);
    const auto kfun = [&](double s) {
      const double x = phi(s);
      double v = c.sigma2 * x * x;
      if (c.has_jumps()) v += k_jump(*c.rho, x);
      return v;
    };
    try {
      rep.k_parts.push_back(numerics::detect_divergence(kfun, dom, spec));
    } catch (const numerics::NoConvergence& e) {
      rep.k_parts.push_back(Assessment::indeterminate(e.partial(), e.what()));
    }
    const bool symmetric = !c.has_jumps() || c.rho->is_symmetric();
    if (symmetric && c.theta == 0.0) {
      rep.b_parts.push_back(Assessment::finite(0.0));
      continue;
    }
    const auto bfun = [&](double s) {
      const double x = phi(s);
      double v = c.theta * x;
      if (c.has_jumps()) v += b_jump(*c.rho, x);
      return std::abs(v);
    };
    try {
      rep.b_parts.push_back(numerics::detect_divergence(bfun, dom, spec));
    } catch (const numerics::NoConvergence& e) {
      rep.b_parts.push_back(Assessment::indeterminate(e.partial(), e.what()));
    }
  }
  const auto w = weights_of(model);
  rep.k = combine(rep.k_parts, w);
  rep.b = combine(rep.b_parts, w);
  if (rep.k.is_divergent())
    rep.status = ExistenceStatus::FailsK;
  else if (rep.b.is_divergent())
    rep.status = ExistenceStatus::FailsB;
  else if (rep.k.is_finite() && rep.b.is_finite())
    rep.status = ExistenceStatus::Exists;
  else
    rep.status = ExistenceStatus::Indeterminate;
  return rep;
}

CriteriaReport evaluate_criteria(const MixedModel& model) {
  model.validate();
  CriteriaReport rep;
  std::vector<Assessment> cf_parts, df_parts;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.noise.components[i];
    const auto& f = model.kernels[i].f;
    ComponentCriteria cc;
    cc.kernel_ac = f.is_ac();
    cc.kernel_bv = f.locally_bv();
    cc.inf_var = check_infinite_variation_noise(c);
    cc.cf = cf_part(c, f, Evaluation::Auto);
    cc.fdot = xi_part(c, f, false, Evaluation::Auto);
    cc.weighted = xi_part(c, f, true, Evaluation::Auto);
    cf_parts.push_back(cc.cf);
    df_parts.push_back(cc.fdot);
    rep.components.push_back(cc);
  }
  const auto w = weights_of(model);
  rep.cf = combine(cf_parts, w);
  rep.df = combine(df_parts, w);
  rep.ratios = check_ratio_conditions(model.noise);
  rep.existence = existence_check(model);
  return rep;
}

const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::FiniteVariation: return "FiniteVariation";
    case VerdictStatus::InfiniteVariation: return "InfiniteVariation";
    case VerdictStatus::Indeterminate: return "Indeterminate";
  }
  return "?";
}

const char* to_string(TheoremTag t) {
  switch (t) {
    case TheoremTag::Sufficiency: return "sufficiency";
    case TheoremTag::NecessityAC: return "necessity/absolute-continuity";
    case TheoremTag::NecessityBase: return "necessity/base-integrals";
    case TheoremTag::NecessityUniform: return "necessity/uniform-ratio";
    case TheoremTag::NecessityRatio: return "necessity/limsup-ratio";
    case TheoremTag::Existence: return "existence";
    case TheoremTag::None: return "none";
  }
  return "?";
}

Verdict verdict(const MixedModel& model) { return verdict(model, evaluate_criteria(model)); }

Verdict verdict(const MixedModel&, const CriteriaReport& report) {
  Verdict v;
  v.report = report;
  const auto& comps = report.components;
  const auto cid = [](std::size_t i) { return "component " + std::to_string(i); };

  const auto decide = [&](VerdictStatus s, TheoremTag t) {
    v.status = s;
    v.theorem = t;
    return v;
  };

  if (report.existence.status == ExistenceStatus::FailsK || report.existence.status == ExistenceStatus::FailsB) {
    v.justification.push_back(std::string("existence: ") + to_string(report.existence.status) +
                              "; K integral " + describe(report.existence.k) + ", B integral " +
                              describe(report.existence.b));
    return decide(VerdictStatus::Indeterminate, TheoremTag::Existence);
  }
  if (report.existence.status == ExistenceStatus::Indeterminate)
    v.caveats.push_back("existence of the process could not be certified numerically");

  bool all_ac = true;
  for (const auto& c : comps) all_ac = all_ac && c.kernel_ac;

  // Sufficiency.
  if (all_ac && report.cf.is_finite() && report.df.is_finite()) {
    v.justification.push_back("all kernel sections absolutely continuous");
    v.justification.push_back("C_f = " + fmt(report.cf.value) + " (finite)");
    v.justification.push_back("D_f = " + fmt(report.df.value) + " (finite)");
    return decide(VerdictStatus::FiniteVariation, TheoremTag::Sufficiency);
  }

  bool inf_all = true, inf_unknown = false;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    inf_all = inf_all && comps[i].inf_var == Truth::True;
    inf_unknown = inf_unknown || comps[i].inf_var == Truth::Unknown;
  }

  if (inf_all) {
    v.justification.push_back("noise has infinite variation locally in every component");
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (!comps[i].kernel_ac) v.justification.push_back(cid(i) + ": kernel section not absolutely continuous");
    if (!all_ac) return decide(VerdictStatus::InfiniteVariation, TheoremTag::NecessityAC);

    bool base = false;
    for (std::size_t i = 0; i < comps.size(); ++i) {
      if (comps[i].cf.is_divergent()) {
        v.justification.push_back(cid(i) + ": C_f integral " + describe(comps[i].cf));
        base = true;
      }
      if (comps[i].weighted.is_divergent()) {
        v.justification.push_back(cid(i) + ": weighted jump integral " + describe(comps[i].weighted));
        base = true;
      }
    }
    if (base) return decide(VerdictStatus::InfiniteVariation, TheoremTag::NecessityBase);

    const auto& rr = report.ratios;
    const bool cf_or_df_div = report.cf.is_divergent() || report.df.is_divergent();
    if (rr.u00_certified && cf_or_df_div) {
      v.justification.push_back("moment ratio bounded uniformly: sup = " + fmt(rr.u00_sup));
      v.justification.push_back("C_f " + describe(report.cf) + ", D_f " + describe(report.df));
      if (rr.u00_heuristic) v.caveats.push_back("ratio bound finite analytically; its value is a grid sup");
      return decide(VerdictStatus::InfiniteVariation, TheoremTag::NecessityUniform);
    }

    bool u0_all = true, u0_heur = false;
    for (const auto& rc : rr.components) {
      u0_all = u0_all && rc.u0 == Truth::True;
      u0_heur = u0_heur || rc.u0_heuristic;
    }
    bool fdot_div = false;
    for (std::size_t i = 0; i < comps.size(); ++i)
      if (comps[i].cf.is_divergent() || comps[i].fdot.is_divergent()) {
        v.justification.push_back(cid(i) + ": C_f " + describe(comps[i].cf) + ", unweighted jump integral " +
                                  describe(comps[i].fdot));
        fdot_div = true;
      }
    if (u0_all && !u0_heur && fdot_div) {
      v.justification.push_back("limsup ratio condition holds in every component");
      return decide(VerdictStatus::InfiniteVariation, TheoremTag::NecessityRatio);
    }
    if ((u0_all && fdot_div) || (std::isfinite(rr.u00_sup) && rr.u00_heuristic && cf_or_df_div)) {
      v.caveats.push_back("strong evidence of infinite variation: the ratio conditions hold only heuristically");
      return decide(VerdictStatus::Indeterminate, TheoremTag::None);
    }
  } else if (inf_unknown) {
    v.caveats.push_back("local infinite variation of the noise could not be decided numerically");
  }

  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    if (c.cf.status == Status::Indeterminate) v.caveats.push_back(cid(i) + ": C_f " + describe(c.cf));
    if (c.fdot.status == Status::Indeterminate) v.caveats.push_back(cid(i) + ": D_f " + describe(c.fdot));
  }
  if (!inf_all) {
    bool bv_not_ac = false;
    for (const auto& c : comps) bv_not_ac = bv_not_ac || (c.kernel_bv && !c.kernel_ac);
    if (bv_not_ac)
      v.notes.push_back(
          "finite-variation-noise-with-non-ac-kernel: the noise has locally finite variation and a kernel "
          "section is of bounded variation but not absolutely continuous; such models can have paths of "
          "finite variation (an indicator kernel gives X_t = W_t - W_{t-1}), which these criteria do not decide");
  }
  v.justification.push_back("C_f " + describe(report.cf) + ", D_f " + describe(report.df));
  return decide(VerdictStatus::Indeterminate, TheoremTag::None);
}

double corollary_bound(double cf, double df) {
  if (!(cf >= 0.0) || !(df >= 0.0)) throw DomainError("corollary_bound: C_f and D_f must be nonnegative");
  return std::sqrt(2.0 / std::numbers::pi) * std::sqrt(cf) + 1.25 * std::max(df, std::sqrt(df));
}

bool is_mean_zero(const NoiseComponent& comp, std::string* why) {
  const auto fail = [why](std::string s) {
    if (why) *why = std::move(s);
    return false;
  };
  if (!comp.has_jumps()) {
    if (comp.theta != 0.0) return fail("theta != 0 without a jump part");
    return true;
  }
  const double drift = centering_drift(*comp.rho);
  if (std::isnan(drift)) return fail("first tail moment of rho is infinite");
  if (std::abs(comp.theta - drift) > 1e-12 * std::max(1.0, std::abs(drift)))
    return fail("theta = " + fmt(comp.theta) + " differs from the centering drift " + fmt(drift));
  return true;
}

BoundResult expected_bv_bound(const MixedModel& model) {
  BoundResult out;
  for (std::size_t i = 0; i < model.noise.components.size(); ++i) {
    std::string why;
    if (!is_mean_zero(model.noise.components[i], &why)) {
      out.reason = "component " + std::to_string(i) + " is not mean zero: " + why;
      return out;
    }
  }
  const Verdict v = verdict(model);
  if (v.status != VerdictStatus::FiniteVariation) {
    out.reason = std::string("verdict is ") + to_string(v.status) + ", not FiniteVariation";
    return out;
  }
  out.cf = v.report.cf.value;
  out.df = v.report.df.value;
  out.value = corollary_bound(out.cf, out.df);
  out.ok = true;
  return out;
}

const char* to_string(GlobalLaw g) {
  return g == GlobalLaw::ProbabilityZero ? "ProbabilityZero" : "ZeroOneHolds";
}

const char* to_string(LocalLaw l) {
  switch (l) {
    case LocalLaw::HoldsBV: return "Holds(a)";
    case LocalLaw::HoldsInfiniteActivity: return "Holds(b)";
    case LocalLaw::NotCovered: return "NotCovered";
  }
  return "?";
}

ZeroOneReport zero_one_classify(const MixedModel& model) {
  model.validate();
  ZeroOneReport rep;
  rep.kernels_bv = true;
  rep.infinite_activity = true;
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& c = model.noise.components[i];
    const auto& f = model.kernels[i].f;
    const bool bv = f.locally_bv();
    rep.kernels_bv = rep.kernels_bv && bv;
    rep.infinite_activity = rep.infinite_activity && c.has_jumps() && std::isinf(c.rho->total_mass());
    if (!bv && c.has_jumps()) {
      rep.global_law = GlobalLaw::ProbabilityZero;
      std::string note = "component " + std::to_string(i) + ": jumps with a kernel of unbounded variation";
      const Interval vs = f.variation_support();
      if (std::isfinite(vs.lo)) {
        const double hi = std::isfinite(vs.hi) ? vs.hi : vs.lo + 1.0;
        if (hi > vs.lo) {
          const SectionBV s = section_bv(f, vs.lo, hi, 12);
          note += s.divergent ? "; dyadic levels diverge" : "; dyadic levels inconclusive";
        }
      }
      rep.notes.push_back(note);
    }
  }
  if (rep.kernels_bv)
    rep.local_law = LocalLaw::HoldsBV;
  else if (rep.infinite_activity)
    rep.local_law = LocalLaw::HoldsInfiniteActivity;
  else {
    rep.local_law = LocalLaw::NotCovered;
    rep.notes.push_back(
        "local law not covered: finite-activity noise with a kernel of unbounded variation; the probability of "
        "finite variation on a fixed interval can lie strictly between 0 and 1");
  }
  return rep;
}

}  // namespace simma
