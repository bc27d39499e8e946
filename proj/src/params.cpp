#include "kgm/params.hpp"

#include "kgm/errors.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace kgm {

PotentialSpec PotentialSpec::constant(double m) {
  PotentialSpec v;
  v.kind = PotentialKind::constant;
  v.m = m;
  v.v0 = m * m;
  return v;
}

PotentialSpec PotentialSpec::coercive(std::function<double(double)> sampler,
                                      double v0, std::string expr) {
  PotentialSpec v;
  v.kind = PotentialKind::coercive;
  v.sampler = std::move(sampler);
  v.v0 = v0;
  v.expr = std::move(expr);
  return v;
}

void ModelParams::validate() const {
  std::ostringstream msg;
  if (!(s > 0.0 && s < 1.0))
    msg << "s must lie in (0,1), got " << s << "; ";
  if (!(p > 2.0 && p < 6.0))
    msg << "p must lie in (2,6), got " << p << "; ";
  if (!(omega > 0.0))
    msg << "omega must be positive, got " << omega << "; ";
  if (!std::isfinite(alpha))
    msg << "alpha must be finite; ";
  if (potential.kind == PotentialKind::constant && !(potential.m > 0.0))
    msg << "mass m must be positive, got " << potential.m << "; ";
  if (potential.kind == PotentialKind::coercive &&
      (!potential.sampler || !std::isfinite(potential.v0)))
    msg << "coercive potential needs a sampler and a finite inf V; ";
  if (!msg.str().empty())
    throw DomainError(msg.str());
}

double omega_gap(double p, double m, double omega) {
  if (!(p > 2.0 && p < 6.0) || !(m > 0.0) || !(omega > 0.0))
    throw DomainError("omega_gap: need p in (2,6), m > 0, omega > 0");
  const double positive_part = p < 4.0 ? 4.0 - p : 0.0;
  const double w2 = omega * omega;
  return m * m - w2 - positive_part / (p - 2.0) * w2;
}

double alpha0(double s, double t) {
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("alpha0: s must lie in (0,1)");
  if (!(t > 0.0))
    throw DomainError("alpha0: t must be positive");
  return std::pow(s, -s) * std::pow(1.0 - s, s - 1.0) * std::pow(t, 1.0 - s);
}

AdmissibilityReport check_admissible(const ModelParams &params) {
  if (params.potential.kind != PotentialKind::constant)
    throw DomainError(
        "check_admissible applies to constant potentials only; coercive "
        "potentials admit every p in (2,6) and alpha in R, use the spectrum "
        "module for their decomposition");
  params.validate();

  const double m = params.potential.m;
  const double w = params.omega;
  const double p = params.p;

  AdmissibilityReport report;
  report.omega_gap = omega_gap(p, m, w);
  if (p >= 4.0) {
    if (!(m > w))
      report.violated_conditions.emplace_back("(a)");
  } else {
    if (!(m * std::sqrt(p - 2.0) > std::sqrt(2.0) * w))
      report.violated_conditions.emplace_back("(b)");
  }
  if (report.omega_gap > 0.0) {
    report.alpha0 = alpha0(params.s, report.omega_gap);
    if (!(params.alpha > -report.alpha0))
      report.violated_conditions.emplace_back("threshold");
  } else {
    report.alpha0 = std::numeric_limits<double>::quiet_NaN();
    report.violated_conditions.emplace_back("threshold");
  }
  report.admissible = report.violated_conditions.empty();
  return report;
}

namespace {

// Intervals narrower than this relative width leave constants at rounding level.
bool degenerate(const std::pair<double, double> &iv) {
  return !(iv.second - iv.first > 1e-12 * iv.second);
}

} // namespace

std::pair<double, double> epsilon_interval(double s, double alpha_minus,
                                           double T) {
  if (alpha_minus <= 0.0)
    return {0.0, std::numeric_limits<double>::infinity()};
  if (!(T > 0.0))
    return {std::numeric_limits<double>::infinity(), 0.0};
  const double e = (1.0 - s) / s;
  const double lo = std::pow((1.0 - s) * alpha_minus / T, e);
  const double hi = 1.0 / (alpha_minus * s);
  return {lo, hi};
}

double young_bound(double s, double eps, double k) {
  return (1.0 - s) * std::pow(eps, -s / (1.0 - s)) + s * eps * k * k;
}

double young_gamma(double s, double alpha, double v0) {
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("young_gamma: s must lie in (0,1)");
  const double am = alpha < 0.0 ? -alpha : 0.0;
  double deficit = 0.5 - v0;
  if (am > 0.0) {
    // alpha^- k^{2s} <= alpha^- (1-s) eps^{-s/(1-s)} + k^2/2 at eps = 1/(2 alpha^- s).
    const double eps = 1.0 / (2.0 * am * s);
    deficit += am * (1.0 - s) * std::pow(eps, -s / (1.0 - s));
  }
  return deficit > 0.0 ? deficit : 0.0;
}

std::vector<ThresholdRow> threshold_table(const std::vector<double> &omegas,
                                          std::size_t points) {
  if (points < 3)
    throw DomainError("threshold_table: need at least 3 points");
  constexpr double lo = 1e-4;
  constexpr double hi = 1.0 - 1e-4;
  const double step = (hi - lo) / static_cast<double>(points - 1);
  std::vector<ThresholdRow> rows;
  rows.reserve(omegas.size() * points);
  for (double omega : omegas) {
    if (!(omega > 0.0))
      throw DomainError("threshold_table: Omega must be positive");
    const std::size_t first = rows.size();
    for (std::size_t i = 0; i < points; ++i) {
      const double s = lo + static_cast<double>(i) * step;
      rows.push_back({s, omega, alpha0(s, omega), std::numeric_limits<double>::quiet_NaN()});
    }
    for (std::size_t i = 1; i + 1 < points; ++i)
      rows[first + i].second_difference = rows[first + i + 1].alpha0 -
                                          2.0 * rows[first + i].alpha0 +
                                          rows[first + i - 1].alpha0;
  }
  return rows;
}

int count_sign_changes(const std::vector<double> &values) {
  int changes = 0;
  int last = 0;
  for (double v : values) {
    if (!(v > 0.0 || v < 0.0))
      continue;
    const int sign = v > 0.0 ? 1 : -1;
    if (last != 0 && sign != last)
      ++changes;
    last = sign;
  }
  return changes;
}

namespace {

// Golden-section maximization of a unimodal function on [ln lo, ln hi].
template <class F> double golden_max_log(F &&f, double lo, double hi) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = std::log(lo);
  double b = std::log(hi);
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(std::exp(c));
  double fd = f(std::exp(d));
  while (b - a > 1e-13 * (1.0 + std::abs(a) + std::abs(b))) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(std::exp(c));
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(std::exp(d));
    }
  }
  return std::exp(0.5 * (a + b));
}

} // namespace

CoercivityConstants feasible_epsilon(const ModelParams &params,
                                     CoercivityCase which) {
  const AdmissibilityReport report = check_admissible(params);
  if (!report.admissible) {
    std::string failed;
    for (const auto &c : report.violated_conditions)
      failed += (failed.empty() ? "" : ", ") + c;
    throw InfeasibleError("coercivity system infeasible: parameters violate " +
                          failed);
  }

  const double s = params.s;
  const double am = params.alpha_minus();
  const double m2 = params.potential.m * params.potential.m;
  const double w2 = params.omega * params.omega;
  const double p = params.p;
  const double gap = m2 - w2;
  const double young_exp = -s / (1.0 - s);

  CoercivityConstants out;
  auto c1_of = [&](double eps) { return 1.0 - am * s * eps; };
  auto c2_of = [&](double eps) {
    return gap - am * (1.0 - s) * std::pow(eps, young_exp);
  };

  out.feasible_interval = epsilon_interval(s, am, gap);
  if (am == 0.0) {
    out.epsilon0 = 1.0;
    out.c1 = 1.0;
    out.c2 = gap;
  } else {
    const auto [lo, hi] = out.feasible_interval;
    if (degenerate({lo, hi}))
      throw InfeasibleError("coercivity system infeasible: empty epsilon "
                            "interval for the geometry case");
    out.epsilon0 = golden_max_log(
        [&](double e) { return std::min(c1_of(e), c2_of(e)); }, lo, hi);
    out.c1 = c1_of(out.epsilon0);
    out.c2 = c2_of(out.epsilon0);
  }

  if (which == CoercivityCase::palais_smale && p < 4.0) {
    const double q = p / 2.0 - 1.0;
    auto d1_of = [&](double eps) { return q * (1.0 - am * s * eps); };
    auto d2_of = [&](double eps) {
      return q * (m2 - am * (1.0 - s) * std::pow(eps, young_exp)) - w2;
    };
    out.ps_interval = epsilon_interval(s, am, report.omega_gap);
    double e1 = 1.0;
    if (am > 0.0) {
      const auto [lo, hi] = *out.ps_interval;
      if (degenerate({lo, hi}))
        throw InfeasibleError("coercivity system infeasible: empty epsilon "
                              "interval for the Palais-Smale case");
      e1 = golden_max_log(
          [&](double e) { return std::min(d1_of(e), d2_of(e)); }, lo, hi);
    }
    out.epsilon1 = e1;
    out.d1 = d1_of(e1);
    out.d2 = d2_of(e1);
  }
  return out;
}

namespace {

// (1 - sin(r)/r) r^{-1-2s}, using the Taylor series of 1 - sinc for small r.
double sinc_integrand(double r, double s) {
  if (r == 0.0)
    return 0.0;
  if (r < 0.1) {
    const double r2 = r * r;
    return std::pow(r, 1.0 - 2.0 * s) / 6.0 *
           (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0)));
  }
  return (1.0 - std::sin(r) / r) * std::pow(r, -1.0 - 2.0 * s);
}

} // namespace

double normalization_constant(double s) {
  if (!(s > 0.0 && s < 1.0))
    throw DomainError("normalization_constant: s must lie in (0,1)");
  constexpr double rel_tol = 1e-9;
  const double pi = std::numbers::pi;

  // Spherical average of cos(x_1) over |x| = r is sin(r)/r, so the 3-D
  // integral reduces to 4 pi int_0^inf (1 - sin r / r) r^{-1-2s} dr.
  // [0,1]: endpoint-singular for s > 1/2, handled by tanh-sinh.
  boost::math::quadrature::tanh_sinh<double> ts;
  double err_near = 0.0;
  double l1 = 0.0;
  const double near = ts.integrate(
      [s](double r) { return sinc_integrand(r, s); },
      0.0, 1.0, rel_tol * 1e-2, &err_near, &l1);

  // [1,inf): the non-oscillatory part integrates to 1/(2s); the oscillatory
  // part sin(r) r^{-a}, a = 2 + 2s, is summed over half periods up to
  // X = 400 pi and closed with its asymptotic integration-by-parts series.
  const double a = 2.0 + 2.0 * s;
  auto osc = [a](double r) { return std::sin(r) * std::pow(r, -a); };
  constexpr int half_periods = 400;
  double osc_sum = 0.0;
  double err_osc = 0.0;
  {
    double e = 0.0;
    osc_sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        osc, 1.0, pi, 15, 1e-13, &e);
    err_osc += e;
  }
  for (int j = 1; j < half_periods; ++j) {
    double e = 0.0;
    osc_sum += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        osc, j * pi, (j + 1) * pi, 15, 1e-13, &e);
    err_osc += e;
  }
  // int_X^inf sin(r) r^{-a} dr with sin X = 0, cos X = 1:
  // X^{-a} sum_k (-1)^k (a)_{2k} X^{-2k}.
  const double X = half_periods * pi;
  double tail = 0.0;
  double term = std::pow(X, -a);
  double rising = 1.0;
  for (int k = 0; k < 8; ++k) {
    tail += (k % 2 == 0 ? 1.0 : -1.0) * rising * term;
    rising *= (a + 2 * k) * (a + 2 * k + 1);
    term /= X * X;
  }
  osc_sum += tail;

  const double reduced = near + 1.0 / (2.0 * s) - osc_sum;
  const double total = 4.0 * pi * reduced;
  const double err = 4.0 * pi * (err_near + err_osc);
  if (!std::isfinite(total) || !(total > 0.0) || err > rel_tol * total) {
    std::ostringstream msg;
    msg << "normalization_constant: quadrature did not converge (s=" << s
        << ", integral=" << total << ", error estimate=" << err << ")";
    throw NumericalError(msg.str(), {near, osc_sum, err});
  }
  return 1.0 / total;
}

} // namespace kgm
