#include "simma/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"

namespace simma::cli {

namespace {

// ---------------------------------------------------------------- parsing

json num_out(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

double num(const json& j, const std::string& path) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    if (s == "-inf" || s == "-infinity") return -kInf;
  }
  throw ConfigError(path + ": expected a number or \"inf\"");
}

void allow(const json& obj, const std::string& path, std::initializer_list<const char*> keys) {
  if (!obj.is_object()) throw ConfigError(path + ": expected an object");
  for (const auto& [k, v] : obj.items()) {
    bool known = false;
    for (const char* a : keys) known = known || k == a;
    if (!known) throw ConfigError(path + ": unknown field '" + k + "'");
  }
}

double get_num(const json& obj, const char* key, double def, const std::string& path) {
  return obj.contains(key) ? num(obj.at(key), path + "." + key) : def;
}

std::vector<double> num_array(const json& j, const std::string& path) {
  if (!j.is_array()) throw ConfigError(path + ": expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(num(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::string family_of(const json& obj, const std::string& path) {
  if (!obj.is_object() || !obj.contains("family") || !obj.at("family").is_string())
    throw ConfigError(path + ".family: required string");
  return obj.at("family").get<std::string>();
}

LevyMeasure parse_levy(const json& j, const std::string& path) {
  const auto fam = family_of(j, path);
  try {
    if (fam == "stable") {
      allow(j, path, {"family", "c1", "c2", "alpha"});
      const Stable d;
      return LevyMeasure(Stable{get_num(j, "c1", d.c1, path), get_num(j, "c2", d.c2, path),
                                get_num(j, "alpha", d.alpha, path)});
    }
    if (fam == "tempered_stable") {
      allow(j, path, {"family", "d1", "d2", "beta", "l1", "l2"});
      const TemperedStable d;
      return LevyMeasure(TemperedStable{get_num(j, "d1", d.d1, path), get_num(j, "d2", d.d2, path),
                                        get_num(j, "beta", d.beta, path), get_num(j, "l1", d.l1, path),
                                        get_num(j, "l2", d.l2, path)});
    }
    if (fam == "atoms") {
      allow(j, path, {"family", "atoms"});
      if (!j.contains("atoms") || !j.at("atoms").is_array()) throw ConfigError(path + ".atoms: required array");
      FiniteAtoms fa;
      for (std::size_t i = 0; i < j.at("atoms").size(); ++i) {
        const auto& a = j.at("atoms")[i];
        const auto ap = path + ".atoms[" + std::to_string(i) + "]";
        allow(a, ap, {"x", "rate"});
        if (!a.contains("x") || !a.contains("rate")) throw ConfigError(ap + ": needs x and rate");
        fa.atoms.push_back({num(a.at("x"), ap + ".x"), num(a.at("rate"), ap + ".rate")});
      }
      return LevyMeasure(fa);
    }
    if (fam == "tabulated") {
      allow(j, path, {"family", "r", "g", "tail_exponent"});
      if (!j.contains("r") || !j.contains("g")) throw ConfigError(path + ": tabulated tail needs r and g");
      return LevyMeasure(TabulatedTail{num_array(j.at("r"), path + ".r"), num_array(j.at("g"), path + ".g"),
                                       get_num(j, "tail_exponent", TabulatedTail{}.tail_exponent, path)});
    }
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".family: unknown Levy family '" + fam +
                    "' (stable, tempered_stable, atoms, tabulated)");
}

Kernel parse_kernel(const json& j, const std::string& path) {
  const auto fam = family_of(j, path);
  try {
    if (fam == "fractional") {
      allow(j, path, {"family", "alpha"});
      return Kernel(Fractional{get_num(j, "alpha", Fractional{}.alpha, path)});
    }
    if (fam == "indicator") {
      allow(j, path, {"family", "a", "b"});
      const Indicator d;
      return Kernel(Indicator{get_num(j, "a", d.a, path), get_num(j, "b", d.b, path)});
    }
    if (fam == "smooth_bump") {
      allow(j, path, {"family", "a", "b"});
      const SmoothBump d;
      return Kernel(SmoothBump{get_num(j, "a", d.a, path), get_num(j, "b", d.b, path)});
    }
    if (fam == "weierstrass") {
      allow(j, path, {"family", "a", "b", "terms"});
      const WeierstrassBump d;
      int terms = d.terms;
      if (j.contains("terms")) {
        if (!j.at("terms").is_number_integer()) throw ConfigError(path + ".terms: expected an integer");
        terms = j.at("terms").get<int>();
      }
      return Kernel(WeierstrassBump{get_num(j, "a", d.a, path), get_num(j, "b", d.b, path), terms});
    }
    if (fam == "piecewise_linear") {
      allow(j, path, {"family", "x", "y"});
      if (!j.contains("x") || !j.contains("y")) throw ConfigError(path + ": piecewise_linear needs x and y");
      return Kernel(PiecewiseLinear{num_array(j.at("x"), path + ".x"), num_array(j.at("y"), path + ".y")});
    }
    if (fam == "zero") {
      allow(j, path, {"family"});
      return Kernel();
    }
  } catch (const DomainError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  throw ConfigError(path + ".family: unknown kernel family '" + fam +
                    "' (fractional, indicator, smooth_bump, weierstrass, piecewise_linear, zero)");
}

std::uint64_t get_u64(const json& obj, const char* key, std::uint64_t def, const std::string& path) {
  if (!obj.contains(key)) return def;
  const auto& v = obj.at(key);
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError(path + "." + key + ": expected a nonnegative integer");
}

bool get_bool(const json& obj, const char* key, bool def, const std::string& path) {
  if (!obj.contains(key)) return def;
  if (!obj.at(key).is_boolean()) throw ConfigError(path + "." + key + ": expected true or false");
  return obj.at(key).get<bool>();
}

void parse_plan(const json& j, SimPlan& plan) {
  const std::string path = "plan";
  allow(j, path,
        {"n_max", "replicas", "window", "series_terms", "tail_length", "gaussian_compensation", "growth_threshold",
         "seed", "check_existence"});
  plan.n_max = static_cast<int>(get_u64(j, "n_max", static_cast<std::uint64_t>(plan.n_max), path));
  plan.replicas = get_u64(j, "replicas", plan.replicas, path);
  if (j.contains("window") && !j.at("window").is_null()) {
    const auto w = num_array(j.at("window"), "plan.window");
    if (w.size() != 2) throw ConfigError("plan.window: expected [lo, hi]");
    plan.window = numerics::Interval{w[0], w[1]};
  }
  plan.series_terms = get_num(j, "series_terms", plan.series_terms, path);
  plan.tail_length = get_num(j, "tail_length", plan.tail_length, path);
  plan.gaussian_compensation = get_bool(j, "gaussian_compensation", plan.gaussian_compensation, path);
  plan.growth_threshold = get_num(j, "growth_threshold", plan.growth_threshold, path);
  plan.seed.root = get_u64(j, "seed", plan.seed.root, path);
  plan.check_existence = get_bool(j, "check_existence", plan.check_existence, path);
  try {
    plan.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (doc.is_object() && doc.contains("command") && doc.contains("config")) doc = doc.at("config");
  allow(doc, "config", {"components", "plan", "options"});
  if (!doc.contains("components") || !doc.at("components").is_array() || doc.at("components").empty())
    throw ConfigError("components: required nonempty array");

  RunConfig cfg;
  const auto& comps = doc.at("components");
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto path = "components[" + std::to_string(i) + "]";
    const auto& c = comps[i];
    allow(c, path, {"weight", "theta", "sigma2", "levy", "kernel", "kernel0"});
    NoiseComponent nc;
    nc.weight = get_num(c, "weight", 1.0, path);
    nc.sigma2 = get_num(c, "sigma2", 0.0, path);
    if (c.contains("levy") && !c.at("levy").is_null()) nc.rho = parse_levy(c.at("levy"), path + ".levy");
    if (c.contains("theta")) {
      const auto& t = c.at("theta");
      if (t.is_string() && t.get<std::string>() == "centered") {
        if (!nc.rho) throw ConfigError(path + ".theta: \"centered\" needs a Levy measure");
        nc.theta = centering_drift(*nc.rho);
        if (std::isnan(nc.theta))
          throw ConfigError(path + ".theta: \"centered\" needs a finite first moment on |x| > 1");
      } else {
        nc.theta = num(t, path + ".theta");
      }
    }
    if (!c.contains("kernel")) throw ConfigError(path + ".kernel: required");
    const Kernel f = parse_kernel(c.at("kernel"), path + ".kernel");
    Kernel f0 = f;
    if (c.contains("kernel0")) {
      const auto& k0 = c.at("kernel0");
      if (k0.is_string()) {
        if (k0.get<std::string>() != "same") throw ConfigError(path + ".kernel0: expected \"same\" or a kernel");
      } else {
        f0 = parse_kernel(k0, path + ".kernel0");
      }
    }
    try {
      nc.validate();
    } catch (const DomainError& e) {
      throw ConfigError(path + ": " + e.what() +
                        (nc.has_jumps() || nc.sigma2 > 0.0 ? "" : " (purely stochastic noise is required)"));
    }
    cfg.model.noise.components.push_back(std::move(nc));
    cfg.model.kernels.push_back(KernelPair{f, f0});
  }
  if (doc.contains("plan")) parse_plan(doc.at("plan"), cfg.plan);
  if (doc.contains("options")) {
    const auto& o = doc.at("options");
    allow(o, "options", {"tol", "ratio_threshold", "paths"});
    cfg.tol = get_num(o, "tol", cfg.tol, "options");
    cfg.ratio_threshold = get_num(o, "ratio_threshold", cfg.ratio_threshold, "options");
    cfg.paths = get_u64(o, "paths", cfg.paths, "options");
    if (!(cfg.tol >= 0.0)) throw ConfigError("options.tol: must be nonnegative");
    if (cfg.paths == 0) throw ConfigError("options.paths: must be positive");
  }
  return cfg;
}

// ---------------------------------------------------------------- output

json to_json(const LevyMeasure& rho) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Stable>) {
          return {{"family", "stable"}, {"c1", num_out(v.c1)}, {"c2", num_out(v.c2)}, {"alpha", num_out(v.alpha)}};
        } else if constexpr (std::is_same_v<T, TemperedStable>) {
          return {{"family", "tempered_stable"}, {"d1", num_out(v.d1)}, {"d2", num_out(v.d2)},
                  {"beta", num_out(v.beta)},     {"l1", num_out(v.l1)}, {"l2", num_out(v.l2)}};
        } else if constexpr (std::is_same_v<T, FiniteAtoms>) {
          json atoms = json::array();
          for (const auto& a : v.atoms) atoms.push_back({{"x", num_out(a.x)}, {"rate", num_out(a.rate)}});
          return {{"family", "atoms"}, {"atoms", atoms}};
        } else {
          json r = json::array(), g = json::array();
          for (double x : v.r) r.push_back(num_out(x));
          for (double x : v.g) g.push_back(num_out(x));
          return {{"family", "tabulated"}, {"r", r}, {"g", g}, {"tail_exponent", num_out(v.tail_exponent)}};
        }
      },
      rho.variant());
}

json to_json(const Kernel& k) {
  return std::visit(
      [](const auto& v) -> json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Fractional>) {
          return {{"family", "fractional"}, {"alpha", num_out(v.alpha)}};
        } else if constexpr (std::is_same_v<T, Indicator>) {
          return {{"family", "indicator"}, {"a", num_out(v.a)}, {"b", num_out(v.b)}};
        } else if constexpr (std::is_same_v<T, SmoothBump>) {
          return {{"family", "smooth_bump"}, {"a", num_out(v.a)}, {"b", num_out(v.b)}};
        } else if constexpr (std::is_same_v<T, WeierstrassBump>) {
          return {{"family", "weierstrass"}, {"a", num_out(v.a)}, {"b", num_out(v.b)}, {"terms", v.terms}};
        } else if constexpr (std::is_same_v<T, PiecewiseLinear>) {
          json x = json::array(), y = json::array();
          for (double t : v.x) x.push_back(num_out(t));
          for (double t : v.y) y.push_back(num_out(t));
          return {{"family", "piecewise_linear"}, {"x", x}, {"y", y}};
        } else {
          return {{"family", "zero"}};
        }
      },
      k.variant());
}

json to_json(const RunConfig& cfg) {
  json comps = json::array();
  for (std::size_t i = 0; i < cfg.model.size(); ++i) {
    const auto& nc = cfg.model.noise.components[i];
    const auto& kp = cfg.model.kernels[i];
    json c = {{"weight", num_out(nc.weight)},
              {"theta", num_out(nc.theta)},
              {"sigma2", num_out(nc.sigma2)},
              {"levy", nc.rho ? to_json(*nc.rho) : json(nullptr)},
              {"kernel", to_json(kp.f)}};
    c["kernel0"] = kp.f0 == kp.f ? json("same") : to_json(kp.f0);
    comps.push_back(c);
  }
  const auto& p = cfg.plan;
  json plan = {{"n_max", p.n_max},
               {"replicas", p.replicas},
               {"window", p.window ? json::array({num_out(p.window->lo), num_out(p.window->hi)}) : json(nullptr)},
               {"series_terms", num_out(p.series_terms)},
               {"tail_length", num_out(p.tail_length)},
               {"gaussian_compensation", p.gaussian_compensation},
               {"growth_threshold", num_out(p.growth_threshold)},
               {"seed", p.seed.root},
               {"check_existence", p.check_existence}};
  json opts = {{"tol", num_out(cfg.tol)}, {"ratio_threshold", num_out(cfg.ratio_threshold)}, {"paths", cfg.paths}};
  return {{"components", comps}, {"plan", plan}, {"options", opts}};
}

json to_json(const Assessment& a) {
  json j = {{"status", numerics::to_string(a.status)}, {"value", num_out(a.value)}, {"error", num_out(a.error)}};
  if (!std::isnan(a.location)) j["location"] = num_out(a.location);
  if (!a.cause.empty()) j["cause"] = a.cause;
  return j;
}

json to_json(const Verdict& v) {
  const auto& r = v.report;
  json comps = json::array();
  for (const auto& c : r.components)
    comps.push_back({{"kernel_ac", c.kernel_ac},
                     {"kernel_bv", c.kernel_bv},
                     {"infinite_variation_noise", to_string(c.inf_var)},
                     {"cf", to_json(c.cf)},
                     {"fdot", to_json(c.fdot)},
                     {"weighted", to_json(c.weighted)}});
  json ratios = json::array();
  for (const auto& c : r.ratios.components) {
    json grid = json::array();
    for (double x : c.grid_ratios) grid.push_back(num_out(x));
    ratios.push_back({{"u0", to_string(c.u0)},
                      {"u0_heuristic", c.u0_heuristic},
                      {"u0_basis", c.u0_basis},
                      {"sup", num_out(c.sup)},
                      {"sup_finite_certified", c.sup_finite_certified},
                      {"sup_heuristic", c.sup_heuristic},
                      {"sup_basis", c.sup_basis},
                      {"grid_ratios", grid}});
  }
  json ugrid = json::array();
  for (double u : r.ratios.u_grid) ugrid.push_back(num_out(u));
  json k_parts = json::array(), b_parts = json::array();
  for (const auto& a : r.existence.k_parts) k_parts.push_back(to_json(a));
  for (const auto& a : r.existence.b_parts) b_parts.push_back(to_json(a));
  json evidence = {
      {to_string(TheoremTag::Existence),
       {{"status", to_string(r.existence.status)}, {"k", to_json(r.existence.k)}, {"b", to_json(r.existence.b)},
        {"k_parts", k_parts}, {"b_parts", b_parts}}},
      {to_string(TheoremTag::Sufficiency), {{"cf", to_json(r.cf)}, {"df", to_json(r.df)}}},
      {to_string(TheoremTag::NecessityAC), {{"components", comps}}},
      {to_string(TheoremTag::NecessityUniform),
       {{"u00_sup", num_out(r.ratios.u00_sup)},
        {"u00_certified", r.ratios.u00_certified},
        {"u00_heuristic", r.ratios.u00_heuristic}}},
      {to_string(TheoremTag::NecessityRatio), {{"components", ratios}, {"u_grid", ugrid}}},
  };
  return {{"status", to_string(v.status)}, {"theorem", to_string(v.theorem)}, {"justification", v.justification},
          {"caveats", v.caveats},          {"notes", v.notes},                 {"evidence", evidence}};
}

// ---------------------------------------------------------------- battery

namespace {

IdentityResult make_identity(std::string name, double expected, double actual, double tol) {
  IdentityResult r;
  r.name = std::move(name);
  r.expected = expected;
  r.actual = actual;
  r.rel_error = expected == actual ? 0.0 : std::abs(actual - expected) / std::max(std::abs(expected), 1e-300);
  r.tol = tol;
  r.pass = r.rel_error <= tol;
  return r;
}

std::string label(const char* what, std::initializer_list<std::pair<const char*, double>> args) {
  std::ostringstream os;
  os.precision(6);
  os << what << "(";
  bool first = true;
  for (const auto& [k, v] : args) {
    os << (first ? "" : ", ") << k << "=" << v;
    first = false;
  }
  os << ")";
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

MixedModel one(NoiseComponent c, Kernel f, Kernel f0) {
  MixedModel m;
  m.noise.components.push_back(std::move(c));
  m.kernels.push_back(KernelPair{std::move(f), std::move(f0)});
  return m;
}

NoiseComponent with(LevyMeasure rho) {
  NoiseComponent c;
  c.rho = std::move(rho);
  return c;
}

}  // namespace

std::vector<IdentityResult> run_identities(double tol) {
  const auto t = [tol](double own) { return tol > 0.0 ? tol : own; };
  std::vector<IdentityResult> out;
  for (double a : {1.2, 1.5, 1.9}) {
    const LevyMeasure rho(Stable{1.0, 1.0, a});
    const double c = 2.0 * (1.0 / (a - 1.0) + 1.0 / (2.0 - a));
    for (double u : {0.1, 1.0, 10.0})
      out.push_back(make_identity(label("stable_xi", {{"alpha", a}, {"u", u}}), c * std::pow(u, a),
                                  xi(rho, u, Evaluation::Quadrature), t(1e-6)));
  }
  for (double a : {1.2, 1.5, 1.9}) {
    const LevyMeasure rho(Stable{1.0, 1.0, a});
    for (double u : log_grid(1e-2, 1e2, 20))
      out.push_back(make_identity(label("stable_moment_ratio", {{"alpha", a}, {"u", u}}), (2.0 - a) / (a - 1.0),
                                  moment_ratio(rho, u, Evaluation::Quadrature), t(1e-6)));
  }
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  const std::vector<std::pair<std::string, LevyMeasure>> tails = {
      {"stable(1,1,1.5)", LevyMeasure(Stable{1.0, 1.0, 1.5})},
      {"tempered_stable(1,1,1.5,1,1)", LevyMeasure(TemperedStable{1.0, 1.0, 1.5, 1.0, 1.0})}};
  for (const auto& [name, rho] : tails) {
    const auto g = [&rho = rho](double r) { return r > 0.0 ? tail_mass(rho, r) : 0.0; };
    for (double u : log_grid(1e-2, 1e2, 12)) {
      numerics::QuadratureSpec s1 = spec;
      s1.breakpoints = rho.density_breaks();
      const double upper = u * g(u) + numerics::integrate(g, {u, kInf}, s1).value;
      out.push_back(make_identity(label(("tail_first_moment:" + name).c_str(), {{"u", u}}), upper,
                                  tail_first_moment(rho, u, Evaluation::Quadrature), t(1e-5)));
      numerics::QuadratureSpec s2 = s1;
      s2.singular_points = {0.0};
      const double lower =
          numerics::integrate([&](double r) { return 2.0 * r * g(r); }, {0.0, u}, s2).value - u * u * g(u);
      out.push_back(make_identity(label(("truncated_second_moment:" + name).c_str(), {{"u", u}}), lower,
                                  truncated_second_moment(rho, u, Evaluation::Quadrature), t(1e-5)));
    }
  }
  for (double a : {0.1, 0.25, 0.4})
    for (double x : {0.5, 1.0, 2.0})
      out.push_back(make_identity(label("fractional_section_integral", {{"alpha", a}, {"x", x}}),
                                  supflp_section_integral(a, x, Evaluation::Auto),
                                  supflp_section_integral(a, x, Evaluation::Quadrature), t(1e-6)));
  out.push_back(make_identity("karamata_limit(stable alpha=1.5, u=1e4)", karamata_limit(-1.5),
                              moment_ratio(LevyMeasure(Stable{1.0, 1.0, 1.5}), 1e4), t(1e-2)));
  const Kernel bump(SmoothBump{-1.0, 1.0});
  for (double a : {1.2, 1.5, 1.9}) {
    const auto m = one(with(LevyMeasure(Stable{1.0, 1.0, a})), bump, bump);
    out.push_back(make_identity(label("df_stable_closed_form", {{"alpha", a}}),
                                compute_Df(m, Evaluation::Quadrature).total.value,
                                compute_Df(m, Evaluation::Auto).total.value, t(1e-5)));
  }
  for (const auto& k : {Kernel(SmoothBump{-0.7, 1.3}), Kernel(Fractional{0.3}), Kernel(WeierstrassBump{0.5, 13.0, 3})}) {
    numerics::QuadratureSpec s = spec;
    s.breakpoints = k.breakpoints();
    s.singular_points = k.singular_points();
    const double q = numerics::integrate([&](double x) { return k.eval(x); }, {0.0, 0.9}, s).value;
    out.push_back(make_identity("kernel_integral:" + k.family(), q, k.integral(0.0, 0.9), t(1e-9)));
  }
  return out;
}

std::vector<CanonicalModel> canonical_models() {
  const Kernel frac(Fractional{0.25});
  const Kernel bump(SmoothBump{-1.0, 1.0});
  const Kernel ind(Indicator{0.0, 1.0});
  NoiseComponent gauss;
  gauss.sigma2 = 1.0;
  return {
      {"fractional(0.25) + tempered_stable(beta=1.2)",
       one(with(LevyMeasure(TemperedStable{1.0, 1.0, 1.2, 1.0, 1.0})), frac, frac), VerdictStatus::FiniteVariation,
       TheoremTag::Sufficiency},
      {"fractional(0.25) + tempered_stable(beta=1.5)",
       one(with(LevyMeasure(TemperedStable{1.0, 1.0, 1.5, 1.0, 1.0})), frac, frac),
       VerdictStatus::InfiniteVariation, TheoremTag::NecessityBase},
      {"smooth_bump[-1,1] + stable(alpha=1.5)", one(with(LevyMeasure(Stable{1.0, 1.0, 1.5})), bump, Kernel()),
       VerdictStatus::FiniteVariation, TheoremTag::Sufficiency},
      {"indicator[0,1] + stable(alpha=1.5)", one(with(LevyMeasure(Stable{1.0, 1.0, 1.5})), ind, Kernel()),
       VerdictStatus::InfiniteVariation, TheoremTag::NecessityAC},
      {"fractional(0.25) + gaussian(sigma2=1)", one(gauss, frac, frac), VerdictStatus::InfiniteVariation,
       TheoremTag::NecessityBase},
      {"indicator[0,1] + atoms(+-1, rate 1)",
       one(with(LevyMeasure(FiniteAtoms{{{1.0, 1.0}, {-1.0, 1.0}}})), ind, Kernel()), VerdictStatus::Indeterminate,
       TheoremTag::None},
  };
}

// ---------------------------------------------------------------- commands

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::string csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> replicas;
  std::optional<int> level;
  std::optional<double> tol;
  std::optional<std::size_t> paths;
  bool poisson_weierstrass = false;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream o(path);
  if (!o) throw std::runtime_error("cannot write '" + path + "'");
  o << text;
  if (!o) throw std::runtime_error("write failed for '" + path + "'");
}

RunConfig load(const Flags& f, bool required) {
  RunConfig cfg;
  if (!f.config.empty()) {
    cfg = parse_config(read_file(f.config));
  } else if (required) {
    throw ConfigError("--config is required for this command");
  }
  if (f.seed) cfg.plan.seed.root = *f.seed;
  if (f.replicas) cfg.plan.replicas = *f.replicas;
  if (f.level) cfg.plan.n_max = *f.level;
  if (f.tol) cfg.tol = *f.tol;
  if (f.paths) cfg.paths = *f.paths;
  try {
    cfg.plan.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
  return cfg;
}

std::string csv_prefix(const Flags& f) {
  if (!f.csv.empty()) return f.csv;
  if (f.out.empty()) return {};
  const auto dot = f.out.rfind(".json");
  return dot == std::string::npos ? f.out : f.out.substr(0, dot);
}

std::string fmt_csv(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

struct Outcome {
  json result;
  int code = kDecisive;
  std::string summary;
};

Outcome cmd_check(const RunConfig& cfg) {
  const Verdict v = verdict(cfg.model);
  Outcome o;
  o.result = {{"verdict", to_json(v)}, {"zero_one", nullptr}};
  const auto z = zero_one_classify(cfg.model);
  o.result["zero_one"] = {{"global_law", to_string(z.global_law)},
                          {"local_law", to_string(z.local_law)},
                          {"notes", z.notes}};
  o.code = v.status == VerdictStatus::Indeterminate ? kIndeterminate : kDecisive;
  o.summary = std::string(to_string(v.status)) + " [" + to_string(v.theorem) + "]";
  return o;
}

Outcome cmd_bound(const RunConfig& cfg) {
  const auto b = expected_bv_bound(cfg.model);
  Outcome o;
  o.result = {{"theorem", "corollary-bound"},
              {"ok", b.ok},
              {"bound", num_out(b.value)},
              {"cf", num_out(b.cf)},
              {"df", num_out(b.df)},
              {"reason", b.reason}};
  if (b.ok) {
    o.summary = "E||X||_BV <= " + fmt_csv(b.value);
  } else {
    const auto v = verdict(cfg.model);
    o.code = v.status == VerdictStatus::Indeterminate ? kIndeterminate : kError;
    o.summary = "bound refused: " + b.reason;
  }
  return o;
}

Outcome cmd_simulate(const RunConfig& cfg, const Flags& f) {
  const PathSimulator sim(cfg.model, cfg.plan);
  std::vector<PathSample> paths;
  for (std::size_t r = 0; r < cfg.paths; ++r) paths.push_back(sim.sample(std::uint64_t{r}));
  Outcome o;
  json arr = json::array();
  const auto prefix = csv_prefix(f);
  for (std::size_t r = 0; r < paths.size(); ++r) {
    const auto& p = paths[r];
    json lv = json::array();
    for (double v : p.levels) lv.push_back(v);
    json j = {{"replica", r},
              {"method", p.method},
              {"levels", lv},
              {"jumps", p.jumps},
              {"residual_variance", num_out(p.residual_variance)},
              {"residual_bv_bound", num_out(p.residual_bv_bound)},
              {"window_tail", num_out(p.window_tail)},
              {"warnings", p.warnings}};
    if (prefix.empty()) j["values"] = p.values;
    arr.push_back(j);
  }
  json windows = json::array();
  for (std::size_t i = 0; i < cfg.model.size(); ++i) windows.push_back({sim.window(i).lo, sim.window(i).hi});
  o.result = {{"level", cfg.plan.n_max}, {"windows", windows}, {"paths", arr}};
  if (!prefix.empty()) {
    std::ostringstream pv, lv;
    pv << "t";
    lv << "n";
    for (std::size_t r = 0; r < paths.size(); ++r) {
      pv << ",path_" << r;
      lv << ",path_" << r;
    }
    pv << "\n";
    lv << "\n";
    const std::size_t g = paths.front().values.size();
    for (std::size_t i = 0; i < g; ++i) {
      pv << fmt_csv(std::ldexp(static_cast<double>(i), -cfg.plan.n_max));
      for (const auto& p : paths) pv << "," << fmt_csv(p.values[i]);
      pv << "\n";
    }
    for (int n = 0; n <= cfg.plan.n_max; ++n) {
      lv << n;
      for (const auto& p : paths) lv << "," << fmt_csv(p.levels[n]);
      lv << "\n";
    }
    write_file(prefix + "_paths.csv", pv.str());
    write_file(prefix + "_levels.csv", lv.str());
    o.result["csv"] = {prefix + "_paths.csv", prefix + "_levels.csv"};
  }
  o.summary = std::to_string(paths.size()) + " path(s) at level " + std::to_string(cfg.plan.n_max) +
              ", V_n(last) = " + fmt_csv(paths.front().levels.back());
  return o;
}

Outcome cmd_mbv(const RunConfig& cfg, const Flags& f) {
  const auto est = mc_expected_variation(cfg.model, cfg.plan, cfg.plan.n_max);
  Outcome o;
  json rows = json::array();
  std::ostringstream csv;
  csv << "n,increment_mean,increment_se,level_mean,level_se\n";
  for (int n = 0; n <= cfg.plan.n_max; ++n) {
    rows.push_back({{"n", n},
                    {"increment_mean", est.increment_means[n]},
                    {"increment_se", est.increment_se[n]},
                    {"level_mean", est.level_means[n]},
                    {"level_se", est.level_se[n]}});
    csv << n << "," << fmt_csv(est.increment_means[n]) << "," << fmt_csv(est.increment_se[n]) << ","
        << fmt_csv(est.level_means[n]) << "," << fmt_csv(est.level_se[n]) << "\n";
  }
  o.result = {{"replicas", est.replicas}, {"estimate", est.mean}, {"se", est.se}, {"levels", rows}};
  const auto b = expected_bv_bound(cfg.model);
  o.result["corollary_bound"] = b.ok ? num_out(b.value) : json(nullptr);
  if (!b.ok) o.result["corollary_bound_reason"] = b.reason;
  const auto prefix = csv_prefix(f);
  if (!prefix.empty()) {
    write_file(prefix + "_mbv.csv", csv.str());
    o.result["csv"] = prefix + "_mbv.csv";
  }
  o.summary = "2^n E|X(2^-n) - X(0)| at n = " + std::to_string(cfg.plan.n_max) + ": " + fmt_csv(est.mean) +
              " +- " + fmt_csv(est.se);
  return o;
}

Outcome cmd_sandwich(const RunConfig& cfg) {
  const auto rows = verify_L1_sandwich(cfg.model, cfg.plan);
  Outcome o;
  json arr = json::array();
  bool all = true;
  for (const auto& r : rows) {
    arr.push_back({{"n", r.n},
                   {"I_n", num_out(r.in)},
                   {"lower", num_out(r.lower)},
                   {"upper", num_out(r.upper)},
                   {"estimate", r.estimate},
                   {"se", r.se},
                   {"inside", r.inside}});
    all = all && r.inside;
  }
  o.result = {{"rows", arr}, {"all_inside", all}};
  o.code = all ? kDecisive : kError;
  o.summary = all ? "all levels inside the L1 bounds" : "some level falls outside the L1 bounds";
  return o;
}

Outcome cmd_zeroone(RunConfig cfg, const Flags& f) {
  if (f.poisson_weierstrass) cfg.model = poisson_weierstrass_model();
  if (cfg.model.size() == 0) throw ConfigError("zeroone needs --config or --poisson-weierstrass");
  Outcome o;
  const auto z = zero_one_classify(cfg.model);
  o.result = {{"classification",
               {{"global_law", to_string(z.global_law)}, {"local_law", to_string(z.local_law)}, {"notes", z.notes}}}};
  bool finite = true;
  for (const auto& c : cfg.model.noise.components)
    finite = finite && (!c.rho || std::isfinite(c.rho->total_mass()));
  o.summary = std::string("global ") + to_string(z.global_law) + ", local " + to_string(z.local_law);
  if (finite) {
    const auto ex = zero_one_experiment(cfg.model, cfg.plan, cfg.ratio_threshold);
    o.result["experiment"] = {{"replicas", ex.replicas},
                              {"fraction_bounded", ex.fraction_bounded},
                              {"fraction_bounded_se", ex.fraction_bounded_se},
                              {"fraction_empty_window", ex.fraction_empty_window},
                              {"fraction_empty_se", ex.fraction_empty_se},
                              {"empty_replicas", ex.empty_replicas},
                              {"empty_paths_flat", ex.empty_paths_flat},
                              {"single_atom_replicas", ex.single_atom_replicas},
                              {"single_atom_above_threshold", ex.single_atom_above},
                              {"single_atom_min_ratio", num_out(ex.single_atom_min_ratio)},
                              {"single_atom_positions_below", ex.single_atom_positions_below},
                              {"ratio_threshold", ex.ratio_threshold},
                              {"growth_threshold", cfg.plan.growth_threshold}};
    o.summary += "; empty window " + fmt_csv(ex.fraction_empty_window) + " +- " + fmt_csv(ex.fraction_empty_se);
  } else {
    o.result["experiment"] = nullptr;
    o.result["experiment_skipped"] = "infinite-activity noise";
  }
  return o;
}

Outcome cmd_identities(const RunConfig& cfg) {
  const auto ids = run_identities(cfg.tol);
  Outcome o;
  json arr = json::array();
  std::size_t failed = 0;
  for (const auto& r : ids) {
    arr.push_back({{"name", r.name},
                   {"expected", num_out(r.expected)},
                   {"actual", num_out(r.actual)},
                   {"rel_error", num_out(r.rel_error)},
                   {"tol", r.tol},
                   {"pass", r.pass}});
    failed += !r.pass;
  }
  o.result = {{"identities", arr}, {"failed", failed}};
  o.code = failed == 0 ? kDecisive : kError;
  o.summary = std::to_string(ids.size() - failed) + "/" + std::to_string(ids.size()) + " identities within tolerance";
  return o;
}

Outcome cmd_table(const Flags& f) {
  Outcome o;
  json arr = json::array();
  std::ostringstream csv;
  csv << "model,status,theorem,expected_status,expected_theorem,match\n";
  bool all = true;
  for (const auto& c : canonical_models()) {
    const auto v = verdict(c.model);
    const bool match = v.status == c.expected_status && v.theorem == c.expected_tag;
    all = all && match;
    arr.push_back({{"model", c.name},
                   {"status", to_string(v.status)},
                   {"theorem", to_string(v.theorem)},
                   {"expected_status", to_string(c.expected_status)},
                   {"expected_theorem", to_string(c.expected_tag)},
                   {"match", match},
                   {"justification", v.justification},
                   {"notes", v.notes}});
    csv << "\"" << c.name << "\"," << to_string(v.status) << "," << to_string(v.theorem) << ","
        << to_string(c.expected_status) << "," << to_string(c.expected_tag) << "," << (match ? "yes" : "no") << "\n";
  }
  o.result = {{"rows", arr}, {"all_match", all}};
  const auto prefix = csv_prefix(f);
  if (!prefix.empty()) {
    write_file(prefix + "_table.csv", csv.str());
    o.result["csv"] = prefix + "_table.csv";
  }
  o.code = all ? kDecisive : kError;
  o.summary = all ? "all six models classified as expected" : "classification table mismatch";
  return o;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--out", f.out, "write the JSON report here instead of stdout");
  sub->add_option("--seed", f.seed, "root seed (overrides plan.seed)");
  sub->add_option("--replicas,-R", f.replicas, "Monte Carlo replicas (overrides plan.replicas)");
  sub->add_option("--level", f.level, "dyadic level n_max (overrides plan.n_max)");
  sub->add_option("--tol", f.tol, "relative tolerance for the identity battery");
}

}  // namespace

int run_command(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Finite-variation criteria and path simulation for mixed moving average processes", "simma"};
  app.require_subcommand(1);
  Flags f;
  const std::vector<std::pair<const char*, const char*>> cmds = {
      {"check", "criteria and finite-variation verdict"},
      {"bound", "upper bound on the expected total variation"},
      {"simulate", "simulate paths and their dyadic variation levels"},
      {"mbv", "Monte Carlo estimates of 2^n E|X(2^-n) - X(0)| and E V_n"},
      {"sandwich", "L1 bounds on dyadic increments against Monte Carlo"},
      {"zeroone", "zero-one law classification and growth experiment"},
      {"identities", "closed-form versus quadrature identity battery"},
      {"table", "classification table of the reference models"},
  };
  for (const auto& [name, desc] : cmds) {
    auto* sub = app.add_subcommand(name, desc);
    add_common(sub, f);
    if (std::string(name) == "simulate" || std::string(name) == "mbv" || std::string(name) == "table")
      sub->add_option("--csv", f.csv, "CSV file prefix");
    if (std::string(name) == "simulate") sub->add_option("--paths", f.paths, "number of paths (options.paths)");
    if (std::string(name) == "zeroone")
      sub->add_flag("--poisson-weierstrass", f.poisson_weierstrass,
                    "unit-rate Poisson noise with the Weierstrass kernel");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e, out, err);
    return rc == 0 ? kDecisive : kError;
  }
  const std::string cmd = app.get_subcommands().front()->get_name();
  try {
    const bool needs_config = cmd != "identities" && cmd != "table" && cmd != "zeroone";
    const RunConfig cfg = load(f, needs_config);
    Outcome o;
    if (cmd == "check") o = cmd_check(cfg);
    if (cmd == "bound") o = cmd_bound(cfg);
    if (cmd == "simulate") o = cmd_simulate(cfg, f);
    if (cmd == "mbv") o = cmd_mbv(cfg, f);
    if (cmd == "sandwich") o = cmd_sandwich(cfg);
    if (cmd == "zeroone") o = cmd_zeroone(cfg, f);
    if (cmd == "identities") o = cmd_identities(cfg);
    if (cmd == "table") o = cmd_table(f);

    RunConfig echo = cfg;
    if (cmd == "zeroone" && f.poisson_weierstrass) echo.model = poisson_weierstrass_model();
    json report = {{"command", cmd}, {"exit_code", o.code}, {"seed", cfg.plan.seed.root}, {"result", o.result}};
    if (echo.model.size() > 0) report["config"] = to_json(echo);
    const std::string text = report.dump(2) + "\n";
    if (f.out.empty()) {
      out << text;
    } else {
      write_file(f.out, text);
      out << cmd << ": " << o.summary << "\n";
    }
    return o.code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kError;
}

}  // namespace simma::cli
