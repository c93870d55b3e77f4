#include "simma/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <sstream>

namespace simma::numerics {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTiny = std::numeric_limits<double>::min();
constexpr int kMaxSegments = 2000;

// Kronrod abscissae on [0,1]; odd indices are the 7-point Gauss nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a;
  double b;
  double value;
  double error;
  int depth;
  bool operator<(const Segment& o) const { return error < o.error; }
};

struct Rule15 {
  double value;
  double error;
  bool finite;
};

Rule15 gauss_kronrod15(const Integrand& f, double a, double b) {
  const double centr = 0.5 * (a + b);
  const double hlgth = 0.5 * (b - a);
  const double dhlgth = std::abs(hlgth);

  std::array<double, 7> fv1{}, fv2{};
  const double fc = f(centr);
  double resg = fc * kWg[3];
  double resk = fc * kWgk[7];
  double resabs = std::abs(resk);
  bool finite = std::isfinite(fc);

  for (int j = 0; j < 3; ++j) {
    const int jtw = 2 * j + 1;
    const double absc = hlgth * kXgk[jtw];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    finite = finite && std::isfinite(f1) && std::isfinite(f2);
    fv1[jtw] = f1;
    fv2[jtw] = f2;
    resg += kWg[j] * (f1 + f2);
    resk += kWgk[jtw] * (f1 + f2);
    resabs += kWgk[jtw] * (std::abs(f1) + std::abs(f2));
  }
  for (int j = 0; j < 4; ++j) {
    const int jtwm1 = 2 * j;
    const double absc = hlgth * kXgk[jtwm1];
    const double f1 = f(centr - absc);
    const double f2 = f(centr + absc);
    finite = finite && std::isfinite(f1) && std::isfinite(f2);
    fv1[jtwm1] = f1;
    fv2[jtwm1] = f2;
    resk += kWgk[jtwm1] * (f1 + f2);
    resabs += kWgk[jtwm1] * (std::abs(f1) + std::abs(f2));
  }
  if (!finite) return {0.0, kInf, false};

  const double reskh = resk * 0.5;
  double resasc = kWgk[7] * std::abs(fc - reskh);
  for (int j = 0; j < 7; ++j)
    resasc += kWgk[j] * (std::abs(fv1[j] - reskh) + std::abs(fv2[j] - reskh));

  const double result = resk * hlgth;
  resabs *= dhlgth;
  resasc *= dhlgth;
  double abserr = std::abs((resk - resg) * hlgth);
  if (resasc != 0.0 && abserr != 0.0)
    abserr = resasc * std::min(1.0, std::pow(200.0 * abserr / resasc, 1.5));
  if (resabs > kTiny / (50.0 * kEps)) abserr = std::max(kEps * 50.0 * resabs, abserr);
  return {result, abserr, true};
}

enum class PieceState { Ok, NonFinite, Unresolved };

struct PieceResult {
  PieceState state = PieceState::Ok;
  double value = 0.0;
  double error = 0.0;
  double where = std::numeric_limits<double>::quiet_NaN();
};

// Global adaptive bisection on a finite interval.
PieceResult adaptive_gk(const Integrand& f, double a, double b, double rel_tol, double abs_tol,
                        int max_depth) {
  PieceResult out;
  if (a == b) return out;
  const Rule15 first = gauss_kronrod15(f, a, b);
  if (!first.finite) return {PieceState::NonFinite, 0.0, kInf, 0.5 * (a + b)};

  std::priority_queue<Segment> heap;
  std::vector<Segment> frozen;
  heap.push({a, b, first.value, first.error, 0});
  double total = first.value;
  double total_err = first.error;
  int count = 1;

  while (!heap.empty()) {
    if (total_err <= std::max(abs_tol, rel_tol * std::abs(total))) break;
    if (count >= kMaxSegments) break;
    Segment s = heap.top();
    heap.pop();
    const double mid = 0.5 * (s.a + s.b);
    if (s.depth >= max_depth || mid <= std::min(s.a, s.b) || mid >= std::max(s.a, s.b)) {
      frozen.push_back(s);
      continue;
    }
    const Rule15 left = gauss_kronrod15(f, s.a, mid);
    const Rule15 right = gauss_kronrod15(f, mid, s.b);
    if (!left.finite || !right.finite) {
      return {PieceState::NonFinite, total, kInf, left.finite ? 0.5 * (mid + s.b) : 0.5 * (s.a + mid)};
    }
    total += left.value + right.value - s.value;
    total_err += left.error + right.error - s.error;
    heap.push({s.a, mid, left.value, left.error, s.depth + 1});
    heap.push({mid, s.b, right.value, right.error, s.depth + 1});
    ++count;
  }

  // Re-sum from the leaves to shed accumulated cancellation error.
  std::vector<double> values;
  double err = 0.0;
  for (const auto& s : frozen) {
    values.push_back(s.value);
    err += s.error;
  }
  while (!heap.empty()) {
    values.push_back(heap.top().value);
    err += heap.top().error;
    heap.pop();
  }
  out.value = exact_sum(values);
  out.error = err;
  if (err > std::max(abs_tol, rel_tol * std::abs(out.value))) out.state = PieceState::Unresolved;
  return out;
}

// Panel series toward `end` (a finite singular point or +-inf), starting at
// the regular point `start`.
Assessment endpoint_series(const Integrand& f, double end, double start, const QuadratureSpec& spec,
                           double abs_tol, const DivergenceRule& rule) {
  const bool infinite = std::isinf(end);
  const int budget = infinite ? rule.max_tail_panels : rule.max_finite_panels;
  const double panel_rel = std::max(spec.rel_tol * 1e-2, 1e-14);
  const double panel_abs = abs_tol * 1e-3;

  std::vector<double> panels;
  std::vector<double> sums;
  double panel_err = 0.0;
  double running = 0.0;
  double last_estimate = std::numeric_limits<double>::quiet_NaN();

  const double dir = infinite ? (end > 0 ? 1.0 : -1.0) : 0.0;
  const bool multiplicative = infinite && start * dir > 0.0;
  const double scale = std::max(1.0, std::abs(start));
  const double width = end - start;  // finite case only

  for (int k = 0; k < budget; ++k) {
    double near_start, near_end;
    if (!infinite) {
      near_start = end - width * std::ldexp(1.0, -k);
      near_end = end - width * std::ldexp(1.0, -k - 1);
      if (k == 0) near_start = start;
    } else if (multiplicative) {
      near_start = start * std::ldexp(1.0, k);
      near_end = start * std::ldexp(1.0, k + 1);
    } else {
      near_start = start + dir * scale * (std::ldexp(1.0, k) - 1.0);
      near_end = start + dir * scale * (std::ldexp(1.0, k + 1) - 1.0);
    }
    if (!std::isfinite(near_end) || near_start == near_end || near_end == end) {
      // Resolution exhausted: accept the extrapolated value if it has settled.
      if (sums.size() >= 3) {
        const QuadResult ext = wynn_epsilon(sums);
        const double target = std::max(spec.rel_tol * std::abs(ext.value), abs_tol);
        if (ext.error <= target * 1e3) return Assessment::finite(ext.value, ext.error + panel_err);
      }
      return Assessment::indeterminate(running, "panel resolution exhausted near endpoint");
    }

    const double lo = std::min(near_start, near_end);
    const double hi = std::max(near_start, near_end);
    const double sign = near_start < near_end ? 1.0 : -1.0;
    const PieceResult p = adaptive_gk(f, lo, hi, panel_rel, panel_abs, spec.max_depth);
    if (p.state == PieceState::NonFinite)
      return Assessment::divergent(p.where, "integrand not finite near endpoint");
    if (p.state == PieceState::Unresolved)
      return Assessment::indeterminate(running, "panel did not converge");

    const double value = sign * p.value;
    panels.push_back(value);
    panel_err += p.error;
    running += value;
    sums.push_back(running);

    // Divergence: panel contributions stop shrinking and their ratio has settled.
    const std::size_t n = panels.size();
    const std::size_t need = static_cast<std::size_t>(rule.consecutive) + 1;
    if (n > need) {
      bool grows = true;
      double prev_ratio = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t j = n - need; j < n && grows; ++j) {
        const double a = panels[j - 1];
        const double b = panels[j];
        if (a == 0.0 || b == 0.0 || (a > 0) != (b > 0)) {
          grows = false;
          break;
        }
        const double r = b / a;
        if (j > n - need) {
          if (r < 1.0 || std::abs(r - prev_ratio) > rule.settle_tol * r) grows = false;
        }
        prev_ratio = r;
      }
      if (grows) {
        return Assessment::divergent(
            infinite ? end : end,
            infinite ? "panel contributions do not decay toward infinity"
                     : "panel contributions do not decay toward singular point");
      }
    }

    // Trailing zeros: the integrand vanishes toward the endpoint.
    if (n >= 8 && panels[n - 1] == 0.0 && panels[n - 2] == 0.0 && panels[n - 3] == 0.0)
      return Assessment::finite(running, panel_err);

    if (n >= 4) {
      const QuadResult ext = wynn_epsilon(sums);
      double err = ext.error;
      if (std::isfinite(last_estimate)) err = std::max(err, std::abs(ext.value - last_estimate));
      last_estimate = ext.value;
      const double target = std::max(spec.rel_tol * std::abs(ext.value), abs_tol);
      if (std::isfinite(ext.value) && err <= target)
        return Assessment::finite(ext.value, err + panel_err);
    }
  }
  return Assessment::indeterminate(running, "panel budget exhausted before convergence");
}

Assessment integrate_pieces(const Integrand& f, Interval dom, const QuadratureSpec& spec,
                            const DivergenceRule& rule) {
  if (std::isnan(dom.lo) || std::isnan(dom.hi)) throw DomainError("integration bounds are NaN");
  if (dom.lo == dom.hi) return Assessment::finite(0.0);
  double flip = 1.0;
  if (dom.lo > dom.hi) {
    std::swap(dom.lo, dom.hi);
    flip = -1.0;
  }
  if ((std::isinf(dom.lo) || std::isinf(dom.hi)) && !spec.tail_transform)
    throw DomainError("unbounded domain requires tail_transform");

  struct Point {
    double x;
    bool special;
  };
  std::vector<Point> pts;
  pts.push_back({dom.lo, std::isinf(dom.lo)});
  for (double s : spec.singular_points)
    if (s > dom.lo && s < dom.hi) pts.push_back({s, true});
  for (double s : spec.breakpoints)
    if (s > dom.lo && s < dom.hi) pts.push_back({s, false});
  pts.push_back({dom.hi, std::isinf(dom.hi)});
  // Endpoints of the domain may themselves be declared singular.
  for (double s : spec.singular_points) {
    if (s == dom.lo) pts.front().special = true;
    if (s == dom.hi) pts.back().special = true;
  }
  std::sort(pts.begin(), pts.end(), [](const Point& a, const Point& b) { return a.x < b.x; });
  std::vector<Point> merged;
  for (const auto& p : pts) {
    if (!merged.empty() && merged.back().x == p.x)
      merged.back().special = merged.back().special || p.special;
    else
      merged.push_back(p);
  }

  const std::size_t pieces = merged.size() - 1;
  const double piece_abs = spec.abs_tol / static_cast<double>(std::max<std::size_t>(1, pieces));
  std::vector<double> values;
  double err = 0.0;
  Assessment pending;
  bool have_indeterminate = false;

  auto fold = [&](const Assessment& a) -> bool {
    if (a.status == Status::Divergent) return false;
    if (a.status == Status::Indeterminate) {
      have_indeterminate = true;
      pending = a;
    }
    values.push_back(a.value);
    err += a.error;
    return true;
  };

  for (std::size_t i = 0; i < pieces; ++i) {
    const Point l = merged[i];
    const Point r = merged[i + 1];
    std::vector<Assessment> parts;
    if (l.special && r.special) {
      double m;
      if (std::isinf(l.x) && std::isinf(r.x))
        m = 0.0;
      else if (std::isinf(l.x))
        m = r.x - std::max(1.0, std::abs(r.x));
      else if (std::isinf(r.x))
        m = l.x + std::max(1.0, std::abs(l.x));
      else
        m = 0.5 * (l.x + r.x);
      // Series run from m toward each end, so orientation is handled inside.
      Assessment left = endpoint_series(f, l.x, m, spec, 0.5 * piece_abs, rule);
      if (left.is_divergent()) return left;
      parts.push_back(left);
      Assessment right = endpoint_series(f, r.x, m, spec, 0.5 * piece_abs, rule);
      if (right.is_divergent()) return right;
      // The left series integrates from m toward l.x, i.e. with reversed sign.
      parts.front().value = -parts.front().value;
      parts.push_back(right);
    } else if (l.special) {
      Assessment a = endpoint_series(f, l.x, r.x, spec, piece_abs, rule);
      if (a.is_divergent()) return a;
      a.value = -a.value;
      parts.push_back(a);
    } else if (r.special) {
      Assessment a = endpoint_series(f, r.x, l.x, spec, piece_abs, rule);
      if (a.is_divergent()) return a;
      parts.push_back(a);
    } else {
      const PieceResult p = adaptive_gk(f, l.x, r.x, spec.rel_tol, piece_abs, spec.max_depth);
      if (p.state == PieceState::NonFinite)
        return Assessment::divergent(p.where, "integrand not finite");
      if (p.state == PieceState::Unresolved) {
        Assessment a = Assessment::indeterminate(p.value, "adaptive bisection did not converge");
        a.error = p.error;
        parts.push_back(a);
      } else {
        parts.push_back(Assessment::finite(p.value, p.error));
      }
    }
    for (const auto& a : parts)
      if (!fold(a)) return a;
  }

  const double total = flip * exact_sum(values);
  if (have_indeterminate) {
    Assessment a = pending;
    a.value = total;
    a.error = err;
    return a;
  }
  return Assessment::finite(total, err);
}

}  // namespace

void QuadratureSpec::validate() const {
  if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) throw DomainError("quadrature tolerances must be positive");
  if (max_depth < 10) throw DomainError("quadrature max_depth must be at least 10");
}

const char* to_string(Status s) {
  switch (s) {
    case Status::Finite: return "Finite";
    case Status::Divergent: return "Divergent";
    case Status::Indeterminate: return "Indeterminate";
  }
  return "?";
}

QuadResult integrate(const Integrand& fn, Interval domain, const QuadratureSpec& spec) {
  spec.validate();
  const Assessment a = integrate_pieces(fn, domain, spec, DivergenceRule{});
  if (a.status == Status::Finite) return {a.value, a.error};
  std::ostringstream msg;
  msg << "quadrature did not converge on [" << domain.lo << ", " << domain.hi << "]";
  if (!a.cause.empty()) msg << ": " << a.cause;
  if (!std::isnan(a.location)) msg << " (near " << a.location << ")";
  throw NoConvergence(msg.str(), a.status == Status::Divergent ? kInf : a.value, a.error);
}

Assessment detect_divergence(const Integrand& fn, Interval domain, const QuadratureSpec& spec,
                             const DivergenceRule& rule) {
  spec.validate();
  return integrate_pieces(fn, domain, spec, rule);
}

double exact_sum(std::span<const double> terms) {
  // Shewchuk / msum: maintain nonoverlapping partials, then round once.
  std::vector<double> partials;
  for (double x : terms) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size();
  double hi = partials[--n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  // Correct half-way rounding using the sign of the next partial.
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    const double yr = x - hi;
    if (y == yr) hi = x;
  }
  return hi;
}

double dyadic_variation(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  std::vector<double> terms;
  terms.reserve(2 * values.size());
  for (std::size_t i = 1; i < values.size(); ++i) {
    const double x = values[i];
    const double y = -values[i - 1];
    if (!std::isfinite(x) || !std::isfinite(y)) throw DomainError("dyadic_variation: non-finite value");
    // TwoSum: s + e == x + y exactly.
    const double s = x + y;
    const double bb = s - x;
    const double e = (x - (s - bb)) + (y - bb);
    if (s > 0.0) {
      terms.push_back(s);
      terms.push_back(e);
    } else if (s < 0.0) {
      terms.push_back(-s);
      terms.push_back(-e);
    }
  }
  return exact_sum(terms);
}

std::vector<double> dyadic_levels(std::span<const double> values) {
  const std::size_t intervals = values.size() - 1;
  if (values.size() < 2 || (intervals & (intervals - 1)) != 0)
    throw DomainError("dyadic_levels: expected 2^n + 1 samples");
  int n = 0;
  while ((std::size_t{1} << n) < intervals) ++n;
  std::vector<double> levels(n + 1);
  std::vector<double> sub;
  for (int k = 0; k <= n; ++k) {
    const std::size_t stride = std::size_t{1} << (n - k);
    sub.clear();
    for (std::size_t i = 0; i < values.size(); i += stride) sub.push_back(values[i]);
    levels[k] = dyadic_variation(sub);
  }
  return levels;
}

DyadicGrid::DyadicGrid(double a, double b, int level) : a_(a), b_(b), level_(level) {
  if (!(a < b)) throw DomainError("DyadicGrid: require a < b");
  if (level < 0 || level > 30) throw DomainError("DyadicGrid: level must be in [0, 30]");
}

double DyadicGrid::point(std::size_t i) const {
  const double n = static_cast<double>(std::size_t{1} << level_);
  return a_ + (b_ - a_) * (static_cast<double>(i) / n);
}

std::vector<double> DyadicGrid::points() const {
  std::vector<double> out(size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = point(i);
  return out;
}

std::mt19937_64 SeedSpec::engine() const {
  std::seed_seq seq{static_cast<std::uint32_t>(root), static_cast<std::uint32_t>(root >> 32),
                    static_cast<std::uint32_t>(component), static_cast<std::uint32_t>(component >> 32),
                    static_cast<std::uint32_t>(replica), static_cast<std::uint32_t>(replica >> 32)};
  return std::mt19937_64(seq);
}

QuadResult wynn_epsilon(std::span<const double> partial_sums) {
  const std::size_t total = partial_sums.size();
  if (total == 0) return {0.0, kInf};
  if (total < 3) return {partial_sums.back(), total == 2 ? std::abs(partial_sums[1] - partial_sums[0]) : kInf};

  // Use a bounded window of the most recent terms.
  const std::size_t window = std::min<std::size_t>(total, 25);
  std::vector<double> prev(window + 1, 0.0);  // epsilon_{k-1}
  std::vector<double> cur(partial_sums.end() - static_cast<std::ptrdiff_t>(window), partial_sums.end());

  QuadResult best{cur.back(), std::abs(cur.back() - cur[cur.size() - 2])};
  double prev_even = cur.back();
  double prev_prev_even = std::numeric_limits<double>::quiet_NaN();
  if (cur.size() >= 3) prev_prev_even = cur[cur.size() - 2];

  for (int k = 1; cur.size() >= 2; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double diff = cur[i + 1] - cur[i];
      if (diff == 0.0 || !std::isfinite(diff)) {
        // Exact stagnation: for an even column this entry is the limit.
        if (k % 2 == 1) return {cur[i + 1], best.error == 0.0 ? 0.0 : std::min(best.error, std::abs(cur[i + 1] - best.value))};
        next.resize(i);
        break;
      }
      next[i] = prev[i + 1] + 1.0 / diff;
    }
    if (next.empty()) break;
    if (k % 2 == 0) {
      const double est = next.back();
      if (!std::isfinite(est)) break;
      double err = std::abs(est - prev_even);
      if (std::isfinite(prev_prev_even)) err += std::abs(est - prev_prev_even);
      if (next.size() >= 2) err = std::max(err, std::abs(est - next[next.size() - 2]));
      if (err < best.error) best = {est, err};
      prev_prev_even = prev_even;
      prev_even = est;
    }
    prev.assign(cur.begin(), cur.end());
    cur = std::move(next);
  }
  return best;
}

}  // namespace simma::numerics
