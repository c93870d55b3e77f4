#include "simma/simulate.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace simma {

namespace {

using numerics::Interval;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(6);
  os << x;
  return os.str();
}

// int_{|x| > r} [[x]] rho(dx): the drift carried by the simulated jumps.
double big_jump_mean(const LevyMeasure& rho, double r) {
  if (rho.is_symmetric()) return 0.0;
  const auto& v = rho.variant();
  if (const auto* fa = std::get_if<FiniteAtoms>(&v)) {
    std::vector<double> terms;
    for (const auto& a : fa->atoms)
      if (std::abs(a.x) > r) terms.push_back(a.rate * a.x / std::max(std::abs(a.x), 1.0));
    return numerics::exact_sum(terms);
  }
  if (const auto* s = std::get_if<Stable>(&v)) {
    const double al = s->alpha;
    double t;
    if (r >= 1.0)
      t = std::pow(r, -al) / al;
    else if (al == 1.0)
      t = -std::log(r) + 1.0;
    else
      t = (1.0 - std::pow(r, 1.0 - al)) / (1.0 - al) + 1.0 / al;
    return (s->c1 - s->c2) * t;
  }
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-14;
  for (double b = 1.0; b > r; b *= 0.1) spec.breakpoints.push_back(b);
  const auto fn = [&](double x) { return (rho.density_pos(x) - rho.density_neg(x)) * std::min(x, 1.0); };
  return numerics::integrate(fn, {r, kInf}, spec).value;
}

// Smallest r with g(r) <= v for the two-sided tail g of a symmetric measure.
double inverse_tail(const LevyMeasure& rho, double v) {
  double lo = 1.0;
  double hi = 1.0;
  while (tail_mass(rho, lo) <= v) {
    lo *= 0.5;
    if (lo < 1e-300) return 0.0;
  }
  while (tail_mass(rho, hi) > v) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15 * hi; ++i) {
    const double mid = std::sqrt(lo * hi);
    if (mid <= lo || mid >= hi) break;
    (tail_mass(rho, mid) > v ? lo : hi) = mid;
  }
  return hi;
}

// Linear convolution of i.i.d. cell increments with the kernel sampled at
// (grid point - cell midpoint), through real FFTs.
class CellConvolution {
 public:
  CellConvolution(const Kernel& f, Interval win, int level) {
    const double h = std::ldexp(1.0, -level);
    grid_ = (std::size_t{1} << level) + 1;
    cells_ = static_cast<std::size_t>(std::ceil((win.hi - win.lo) / h));
    cells_ = std::max<std::size_t>(cells_, 1);
    const std::size_t taps = cells_ + grid_ - 1;
    size_ = 1;
    while (size_ < cells_ + taps - 1) size_ <<= 1;
    real_ = fftw_alloc_real(size_);
    spec_ = fftw_alloc_complex(size_ / 2 + 1);
    kernel_spec_ = fftw_alloc_complex(size_ / 2 + 1);
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(size_), real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(size_), spec_, real_, FFTW_ESTIMATE);

    // K[m] = f((m - (cells - 1)) h - win.lo - h / 2), m = 0..taps-1.
    std::vector<double> u(taps);
    for (std::size_t m = 0; m < taps; ++m)
      u[m] = (static_cast<double>(m) - static_cast<double>(cells_ - 1)) * h - win.lo - 0.5 * h;
    std::vector<double> k(taps);
    f.eval_many(u, k);
    std::fill(real_, real_ + size_, 0.0);
    std::copy(k.begin(), k.end(), real_);
    fftw_execute(forward_);
    for (std::size_t j = 0; j < size_ / 2 + 1; ++j) {
      kernel_spec_[j][0] = spec_[j][0];
      kernel_spec_[j][1] = spec_[j][1];
    }
  }
  ~CellConvolution() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
    fftw_free(real_);
    fftw_free(spec_);
    fftw_free(kernel_spec_);
  }
  CellConvolution(const CellConvolution&) = delete;
  CellConvolution& operator=(const CellConvolution&) = delete;

  std::size_t cells() const { return cells_; }

  // out[i] += Y[i] - Y[0] with Y[i] = sum_k z[k] K(t_i - c_k).
  void apply(const std::vector<double>& z, std::vector<double>& out) const {
    std::fill(real_, real_ + size_, 0.0);
    std::copy(z.begin(), z.end(), real_);
    fftw_execute(forward_);
    const std::size_t bins = size_ / 2 + 1;
    for (std::size_t j = 0; j < bins; ++j) {
      const double a = spec_[j][0], b = spec_[j][1];
      const double c = kernel_spec_[j][0], d = kernel_spec_[j][1];
      spec_[j][0] = a * c - b * d;
      spec_[j][1] = a * d + b * c;
    }
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(size_);
    const double y0 = real_[cells_ - 1] * scale;
    for (std::size_t i = 0; i < grid_; ++i) out[i] += real_[i + cells_ - 1] * scale - y0;
  }

 private:
  std::size_t grid_ = 0;
  std::size_t cells_ = 0;
  std::size_t size_ = 0;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_complex* kernel_spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

enum class JumpKind { None, Atoms, Stable, Tempered, Tabulated };

// Shared accumulator for jump contributions on the level-n grid.
struct JumpGrid {
  int level;
  double h;
  std::size_t size;
  std::vector<double> direct;
  std::vector<double> steps;  // difference array for piecewise-constant kernels
  std::vector<double> u;
  std::vector<double> fu;

  explicit JumpGrid(int n)
      : level(n), h(std::ldexp(1.0, -n)), size((std::size_t{1} << n) + 1), direct(size, 0.0), steps(size + 1, 0.0) {}

  double t(std::size_t i) const { return static_cast<double>(i) * h; }

  // First index i in [0, size] with pred(t_i - s) true; pred monotone in i.
  template <class Pred>
  std::size_t first(double s, Pred pred) const {
    std::size_t lo = 0, hi = size;
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (pred(t(mid) - s))
        hi = mid;
      else
        lo = mid + 1;
    }
    return lo;
  }

  void add_range(std::size_t a, std::size_t b, double x) {
    if (a >= b) return;
    steps[a] += x;
    steps[b] -= x;
  }

  void add(const Kernel& f, double s, double x) {
    const auto& v = f.variant();
    if (const auto* ind = std::get_if<Indicator>(&v)) {
      const double a = ind->a, b = ind->b;
      add_range(first(s, [a](double u) { return u >= a; }), first(s, [b](double u) { return u > b; }), x);
      return;
    }
    if (const auto* fr = std::get_if<Fractional>(&v); fr && fr->alpha == 0.0) {
      add_range(first(s, [](double u) { return u > 0.0; }), size, x);
      return;
    }
    if (f.is_zero()) return;
    const auto sup = f.support();
    const std::size_t a = first(s, [lo = sup.lo](double u) { return u >= lo; });
    const std::size_t b = first(s, [hi = sup.hi](double u) { return u > hi; });
    if (a >= b) return;
    u.resize(b - a);
    fu.resize(b - a);
    for (std::size_t i = a; i < b; ++i) u[i - a] = t(i) - s;
    f.eval_many(u, fu);
    for (std::size_t i = a; i < b; ++i) direct[i] += x * fu[i - a];
  }
};

double integral_of_sq_derivative(const Kernel& f) {
  if (!f.is_ac()) return kInf;
  if (f.is_zero()) return 0.0;
  numerics::QuadratureSpec spec;
  spec.breakpoints = f.breakpoints();
  spec.singular_points = f.singular_points();
  const auto fn = [&f](double s) {
    const auto d = f.derivative(s);
    return d ? (*d) * (*d) : 0.0;
  };
  try {
    const auto a = numerics::detect_divergence(fn, f.variation_support(), spec);
    return a.is_finite() ? a.value : kInf;
  } catch (const std::exception&) {
    return kInf;
  }
}

}  // namespace

void SimPlan::validate() const {
  if (n_max < 0 || n_max > 24) throw DomainError("SimPlan: n_max must be in [0, 24]");
  if (window && !(std::isfinite(window->lo) && std::isfinite(window->hi) && window->lo < window->hi))
    throw DomainError("SimPlan: window must be a finite interval with lo < hi");
  if (!(tail_length > 0.0) || !std::isfinite(tail_length)) throw DomainError("SimPlan: tail_length must be positive");
  if (!(series_terms >= 1.0) || !std::isfinite(series_terms))
    throw DomainError("SimPlan: series_terms must be finite and >= 1");
  if (!(growth_threshold > 1.0)) throw DomainError("SimPlan: growth_threshold must exceed 1");
}

struct PathSimulator::Component {
  const NoiseComponent* noise = nullptr;
  Kernel f;
  Interval win{0.0, 0.0};
  double length = 0.0;
  JumpKind kind = JumpKind::None;
  double intensity = 0.0;     // weight * window length
  double r_cut = 0.0;
  double drift = 0.0;         // w (theta - int_{|x| > r_cut} [[x]] rho)
  double gauss_var = 0.0;     // w (sigma2 + compensated residual)
  double residual_var = 0.0;  // w int_{|x| <= r_cut} x^2 rho
  double residual_bound = 0.0;
  double window_tail = 0.0;
  std::string method;
  std::vector<double> atom_cum;  // cumulative atom rates
  std::unique_ptr<CellConvolution> conv;
  std::vector<double> drift_path;
};

PathSimulator::PathSimulator(MixedModel model, SimPlan plan) : model_(std::move(model)), plan_(std::move(plan)) {
  model_.validate();
  plan_.validate();
  if (plan_.check_existence) {
    const auto ex = existence_check(model_);
    if (ex.status == ExistenceStatus::FailsK || ex.status == ExistenceStatus::FailsB)
      throw DomainError(std::string("simulation requires an existing process: existence check ") +
                        to_string(ex.status));
  }
  const int n = plan_.n_max;
  const double h = std::ldexp(1.0, -n);
  const std::size_t grid = (std::size_t{1} << n) + 1;
  for (std::size_t i = 0; i < model_.size(); ++i) {
    auto c = std::make_unique<Component>();
    const auto& nc = model_.noise.components[i];
    c->noise = &nc;
    c->f = model_.kernels[i].f;
    const double w = nc.weight;
    const auto vs = c->f.variation_support();
    if (plan_.window) {
      c->win = *plan_.window;
    } else {
      c->win = {-vs.hi, 1.0 - vs.lo};
      if (!std::isfinite(c->win.lo)) c->win.lo = -plan_.tail_length;
      if (!std::isfinite(c->win.hi)) c->win.hi = 1.0 + plan_.tail_length;
      if (!(c->win.lo < c->win.hi)) c->win = {0.0, 1.0};
    }
    c->length = c->win.hi - c->win.lo;
    c->intensity = w * c->length;
    if (c->win.lo > -vs.hi || c->win.hi < 1.0 - vs.lo) {
      const double lo = c->win.lo;
      c->window_tail = std::abs(c->f.eval(1.0 - lo) - c->f.eval(-lo));
    }

    std::vector<std::string> parts;
    double mean_big = 0.0;
    if (nc.rho) {
      const auto& rv = nc.rho->variant();
      const bool infinite = !std::isfinite(nc.rho->total_mass());
      if (infinite && plan_.series_terms < 1e3)
        throw DomainError("SimPlan: series_terms must be >= 1000 for infinite-activity noise");
      if (const auto* fa = std::get_if<FiniteAtoms>(&rv)) {
        c->kind = JumpKind::Atoms;
        double acc = 0.0;
        for (const auto& a : fa->atoms) c->atom_cum.push_back(acc += a.rate);
        parts.push_back("compound-poisson");
      } else if (const auto* st = std::get_if<Stable>(&rv)) {
        c->kind = JumpKind::Stable;
        c->r_cut = std::pow((st->c1 + st->c2) * c->intensity / (st->alpha * plan_.series_terms), 1.0 / st->alpha);
        parts.push_back("stable-series");
      } else if (const auto* ts = std::get_if<TemperedStable>(&rv)) {
        c->kind = JumpKind::Tempered;
        c->r_cut = std::pow((ts->d1 + ts->d2) * c->intensity / (ts->beta * plan_.series_terms), 1.0 / ts->beta);
        parts.push_back("tempered-stable-series");
      } else {
        c->kind = JumpKind::Tabulated;
        c->r_cut = inverse_tail(*nc.rho, plan_.series_terms / c->intensity);
        parts.push_back("tabulated-series");
      }
      mean_big = big_jump_mean(*nc.rho, c->r_cut);
      if (c->r_cut > 0.0) {
        c->residual_var = w * truncated_second_moment(*nc.rho, c->r_cut);
        const double d = c->residual_var * integral_of_sq_derivative(c->f);
        c->residual_bound = c->residual_var == 0.0 ? 0.0 : 1.25 * std::max(d, std::sqrt(d));
      }
    }
    c->drift = w * (nc.theta - mean_big);
    c->gauss_var = w * nc.sigma2 + (plan_.gaussian_compensation ? c->residual_var : 0.0);
    if (c->gauss_var > 0.0) {
      c->conv = std::make_unique<CellConvolution>(c->f, c->win, n);
      parts.push_back(nc.sigma2 > 0.0 ? "gaussian-cells" : "gaussian-compensation");
    }
    if (c->drift != 0.0) {
      c->drift_path.resize(grid);
      const double d0 = c->f.integral(-c->win.hi, -c->win.lo);
      for (std::size_t j = 0; j < grid; ++j) {
        const double t = static_cast<double>(j) * h;
        c->drift_path[j] = c->drift * (c->f.integral(t - c->win.hi, t - c->win.lo) - d0);
      }
      parts.push_back("drift");
    }
    for (std::size_t p = 0; p < parts.size(); ++p) c->method += (p ? "+" : "") + parts[p];
    if (c->method.empty()) c->method = "zero";
    comps_.push_back(std::move(c));
  }
}

PathSimulator::~PathSimulator() = default;

numerics::Interval PathSimulator::window(std::size_t component) const { return comps_.at(component)->win; }

PathSample PathSimulator::sample(std::uint64_t replica) const {
  return sample(plan_.seed.derive(0, replica));
}

PathSample PathSimulator::sample(const numerics::SeedSpec& seed) const {
  const int n = plan_.n_max;
  JumpGrid jg(n);
  std::vector<double> smooth(jg.size, 0.0);
  PathSample out;
  out.level = n;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::exponential_distribution<double> expo(1.0);

  for (std::size_t i = 0; i < comps_.size(); ++i) {
    const auto& c = *comps_[i];
    auto eng = seed.derive(i, seed.replica).engine();
    const double lo = c.win.lo, len = c.length;
    auto place = [&](double x) {
      const double s = lo + len * unif(eng);
      jg.add(c.f, s, x);
      return s;
    };
    switch (c.kind) {
      case JumpKind::None:
        break;
      case JumpKind::Atoms: {
        const double total = c.atom_cum.back();
        if (total <= 0.0) break;
        std::poisson_distribution<std::size_t> count(c.noise->weight * len * total);
        const std::size_t k = count(eng);
        const auto& atoms = std::get<FiniteAtoms>(c.noise->rho->variant()).atoms;
        for (std::size_t j = 0; j < k; ++j) {
          const double pick = total * unif(eng);
          std::size_t a = std::upper_bound(c.atom_cum.begin(), c.atom_cum.end(), pick) - c.atom_cum.begin();
          a = std::min(a, atoms.size() - 1);
          out.jump_times.push_back(place(atoms[a].x));
        }
        out.jumps += k;
        break;
      }
      case JumpKind::Stable: {
        const auto& st = std::get<Stable>(c.noise->rho->variant());
        const double cc = st.c1 + st.c2;
        const double p_pos = st.c1 / cc;
        double gamma = 0.0;
        while ((gamma += expo(eng)) <= plan_.series_terms) {
          const double r = std::pow(cc * c.intensity / (st.alpha * gamma), 1.0 / st.alpha);
          const double x = unif(eng) < p_pos ? r : -r;
          place(x);
          ++out.jumps;
        }
        break;
      }
      case JumpKind::Tempered: {
        const auto& ts = std::get<TemperedStable>(c.noise->rho->variant());
        const double dd = ts.d1 + ts.d2;
        const double p_pos = ts.d1 / dd;
        double gamma = 0.0;
        while ((gamma += expo(eng)) <= plan_.series_terms) {
          const double r = std::pow(dd * c.intensity / (ts.beta * gamma), 1.0 / ts.beta);
          const bool pos = unif(eng) < p_pos;
          const double keep = std::exp(-(pos ? ts.l1 : ts.l2) * r);
          const double u = unif(eng);
          const double s = lo + len * unif(eng);
          if (u < keep) {
            jg.add(c.f, s, pos ? r : -r);
            ++out.jumps;
          }
        }
        break;
      }
      case JumpKind::Tabulated: {
        double gamma = 0.0;
        while ((gamma += expo(eng)) <= plan_.series_terms) {
          const double r = inverse_tail(*c.noise->rho, gamma / c.intensity);
          if (r <= 0.0) continue;
          place(unif(eng) < 0.5 ? r : -r);
          ++out.jumps;
        }
        break;
      }
    }
    if (c.conv) {
      std::normal_distribution<double> gauss(0.0, std::sqrt(c.gauss_var * jg.h));
      std::vector<double> z(c.conv->cells());
      for (auto& v : z) v = gauss(eng);
      c.conv->apply(z, smooth);
    }
    if (!c.drift_path.empty())
      for (std::size_t j = 0; j < jg.size; ++j) smooth[j] += c.drift_path[j];

    out.residual_variance += c.residual_var;
    out.residual_bv_bound += c.residual_bound;
    out.window_tail = std::max(out.window_tail, c.window_tail);
    out.method += (i ? "," : "") + c.method;
    if (c.r_cut > 0.1)
      out.warnings.push_back("component " + std::to_string(i) + ": series truncation omits jumps up to " +
                             fmt(c.r_cut) + "; raise series_terms");
  }

  out.values.assign(jg.size, 0.0);
  double step = 0.0;
  double base = 0.0;
  for (std::size_t j = 0; j < jg.size; ++j) {
    step += jg.steps[j];
    const double y = jg.direct[j] + step;
    if (j == 0) base = y;
    out.values[j] = (y - base) + smooth[j];
  }
  out.values[0] = 0.0;
  std::sort(out.jump_times.begin(), out.jump_times.end());
  out.levels = numerics::dyadic_levels(out.values);
  return out;
}

PathSample sample_path(const MixedModel& model, const SimPlan& plan, const numerics::SeedSpec& seed) {
  return PathSimulator(model, plan).sample(seed);
}

std::vector<double> bv_levels(const PathSample& path) { return numerics::dyadic_levels(path.values); }

std::pair<double, double> mean_se(const std::vector<double>& xs) {
  if (xs.empty()) return {0.0, 0.0};
  const double m = numerics::exact_sum(xs) / static_cast<double>(xs.size());
  if (xs.size() < 2) return {m, 0.0};
  std::vector<double> sq(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) sq[i] = (xs[i] - m) * (xs[i] - m);
  const double var = numerics::exact_sum(sq) / static_cast<double>(xs.size() - 1);
  return {m, std::sqrt(var / static_cast<double>(xs.size()))};
}

MCEstimate mc_expected_variation(const MixedModel& model, const SimPlan& plan, int n) {
  if (plan.replicas < 100) throw DomainError("mc_expected_variation: replicas must be >= 100");
  if (n < 0 || n > plan.n_max) throw DomainError("mc_expected_variation: n must be in [0, n_max]");
  const PathSimulator sim(model, plan);
  const int top = plan.n_max;
  std::vector<std::vector<double>> lv(top + 1), inc(top + 1);
  for (auto& v : lv) v.reserve(plan.replicas);
  for (auto& v : inc) v.reserve(plan.replicas);
  for (std::size_t r = 0; r < plan.replicas; ++r) {
    const auto p = sim.sample(r);
    for (int k = 0; k <= top; ++k) {
      lv[k].push_back(p.levels[k]);
      inc[k].push_back(std::ldexp(std::abs(p.values[std::size_t{1} << (top - k)]), k));
    }
  }
  MCEstimate est;
  est.replicas = plan.replicas;
  for (int k = 0; k <= top; ++k) {
    const auto [lm, ls] = mean_se(lv[k]);
    const auto [im, is] = mean_se(inc[k]);
    est.level_means.push_back(lm);
    est.level_se.push_back(ls);
    est.increment_means.push_back(im);
    est.increment_se.push_back(is);
  }
  est.mean = est.increment_means[n];
  est.se = est.increment_se[n];
  return est;
}

namespace {

// f(h - s) - f(-s), avoiding cancellation for fractional kernels far out.
double shift_difference(const Kernel& f, double h, double s) {
  if (const auto* fr = std::get_if<Fractional>(&f.variant()); fr && fr->alpha != 0.0 && s < -1.0) {
    const double a = -s;
    return std::pow(a, fr->alpha) * std::expm1(fr->alpha * std::log1p(h / a));
  }
  return f.eval(h - s) - f.eval(-s);
}

Assessment in_component(const NoiseComponent& nc, const Kernel& f, int n, Evaluation mode) {
  if (!nc.rho || f.is_zero()) return Assessment::finite(0.0);
  const auto& rho = *nc.rho;
  const double h = std::ldexp(1.0, -n);
  const double scale = std::ldexp(1.0, n);
  const bool xi_infinite = !std::isfinite(tail_first_moment(rho, 1.0, mode));
  const auto& v = f.variant();
  double measure = -1.0;  // Lebesgue measure of {f_n = +-2^n} for piecewise-constant kernels
  if (const auto* ind = std::get_if<Indicator>(&v)) measure = 2.0 * std::min(h, ind->b - ind->a);
  if (const auto* fr = std::get_if<Fractional>(&v); fr && fr->alpha == 0.0) measure = h;
  if (measure >= 0.0) {
    if (measure == 0.0) return Assessment::finite(0.0);
    if (xi_infinite) return Assessment::divergent(kInf, "xi infinite off zero");
    return Assessment::finite(measure * xi(rho, scale, mode));
  }
  const auto sup = f.variation_support();
  const Interval dom{std::min(h - sup.hi, -sup.hi), std::max(h - sup.lo, -sup.lo)};
  if (!(dom.lo < dom.hi)) return Assessment::finite(0.0);
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  for (double b : f.breakpoints()) {
    spec.breakpoints.push_back(h - b);
    spec.breakpoints.push_back(-b);
  }
  for (double b : f.singular_points()) {
    spec.singular_points.push_back(h - b);
    spec.singular_points.push_back(-b);
  }
  const auto fn = [&](double s) {
    const double d = scale * shift_difference(f, h, s);
    if (d == 0.0) return 0.0;
    if (xi_infinite) return kInf;
    return xi(rho, d, mode);
  };
  if (xi_infinite) {
    // Any set of positive measure where f_n != 0 gives an infinite integral.
    for (int k = 1; k < 64; ++k) {
      const double s = dom.lo + (std::isfinite(dom.lo) && std::isfinite(dom.hi) ? (dom.hi - dom.lo) * k / 64.0 : k);
      if (shift_difference(f, h, s) != 0.0) return Assessment::divergent(s, "xi infinite off zero");
    }
    return Assessment::finite(0.0);
  }
  try {
    return numerics::detect_divergence(fn, dom, spec);
  } catch (const std::exception& e) {
    return Assessment::indeterminate(0.0, e.what());
  }
}

}  // namespace

Assessment compute_In(const MixedModel& model, int n, Evaluation mode) {
  model.validate();
  if (n < 0 || n > 60) throw DomainError("compute_In: n must be in [0, 60]");
  std::vector<double> terms;
  Assessment total = Assessment::finite(0.0);
  for (std::size_t i = 0; i < model.size(); ++i) {
    const auto& nc = model.noise.components[i];
    const auto a = in_component(nc, model.kernels[i].f, n, mode);
    if (a.is_divergent()) return a;
    if (a.status == Status::Indeterminate) total = a;
    terms.push_back(nc.weight * a.value);
  }
  if (total.status == Status::Indeterminate) return total;
  return Assessment::finite(numerics::exact_sum(terms));
}

std::vector<SandwichRow> verify_L1_sandwich(const MixedModel& model, const SimPlan& plan) {
  model.validate();
  for (const auto& c : model.noise.components) {
    if (c.theta != 0.0 || c.sigma2 != 0.0)
      throw DomainError("verify_L1_sandwich: requires theta = 0 and sigma2 = 0 in every component");
    if (c.rho && !c.rho->is_symmetric())
      throw DomainError("verify_L1_sandwich: requires a symmetric Levy measure");
  }
  SimPlan p = plan;
  p.replicas = std::max<std::size_t>(plan.replicas, 100);
  const auto est = mc_expected_variation(model, p, 0);
  std::vector<SandwichRow> rows;
  for (int n = 0; n <= plan.n_max; ++n) {
    SandwichRow row;
    row.n = n;
    const auto in = compute_In(model, n);
    row.in = in.value;
    row.lower = 0.25 * std::min(row.in, std::sqrt(row.in));
    row.upper = 1.25 * std::max(row.in, std::sqrt(row.in));
    row.estimate = est.increment_means[n];
    row.se = est.increment_se[n];
    row.inside = in.status != Status::Indeterminate && row.estimate >= row.lower - 3.0 * row.se &&
                 row.estimate <= row.upper + 3.0 * row.se;
    rows.push_back(row);
  }
  return rows;
}

ZeroOneExperiment zero_one_experiment(const MixedModel& model, const SimPlan& plan, double ratio_threshold) {
  model.validate();
  for (const auto& c : model.noise.components)
    if (c.rho && !std::isfinite(c.rho->total_mass()))
      throw DomainError("zero_one_experiment: finite-activity noise only");
  if (plan.n_max < 4) throw DomainError("zero_one_experiment: n_max must be >= 4");
  if (plan.replicas == 0) throw DomainError("zero_one_experiment: replicas must be positive");
  const PathSimulator sim(model, plan);
  ZeroOneExperiment ex;
  ex.replicas = plan.replicas;
  ex.ratio_threshold = ratio_threshold;
  std::vector<double> bounded, empty;
  const int top = plan.n_max;
  for (std::size_t r = 0; r < plan.replicas; ++r) {
    const auto p = sim.sample(r);
    const double vt = p.levels[top];
    const bool b = vt == 0.0 || vt / p.levels[top - 4] < plan.growth_threshold;
    bounded.push_back(b ? 1.0 : 0.0);
    const bool is_empty = p.jumps == 0;
    empty.push_back(is_empty ? 1.0 : 0.0);
    if (is_empty) {
      ++ex.empty_replicas;
      if (std::any_of(p.levels.begin(), p.levels.end(), [](double v) { return v != 0.0; }))
        ex.empty_paths_flat = false;
    }
    if (p.jumps == 1) {
      ++ex.single_atom_replicas;
      const double ratio = p.levels[4] > 0.0 ? vt / p.levels[4] : (vt > 0.0 ? kInf : 0.0);
      ex.single_atom_min_ratio = std::min(ex.single_atom_min_ratio, ratio);
      if (ratio > ratio_threshold)
        ++ex.single_atom_above;
      else if (!p.jump_times.empty())
        ex.single_atom_positions_below.push_back(p.jump_times.front());
    }
  }
  std::tie(ex.fraction_bounded, ex.fraction_bounded_se) = mean_se(bounded);
  std::tie(ex.fraction_empty_window, ex.fraction_empty_se) = mean_se(empty);
  return ex;
}

MixedModel poisson_weierstrass_model() {
  MixedModel m;
  NoiseComponent c;
  c.rho = LevyMeasure(FiniteAtoms{{{1.0, 1.0}}});
  m.noise.components.push_back(c);
  m.kernels.push_back(KernelPair{Kernel(WeierstrassBump{}), Kernel()});
  return m;
}

}  // namespace simma
