#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace kgm {

enum class PotentialKind { constant, coercive };

/// External potential V(r). Constant potentials are V = m^2; coercive ones
/// carry a sampler and the value of inf V.
struct PotentialSpec {
  PotentialKind kind = PotentialKind::constant;
  double m = 1.0;
  std::function<double(double)> sampler;
  std::string expr;
  double v0 = 1.0;

  static PotentialSpec constant(double m);
  static PotentialSpec coercive(std::function<double(double)> sampler,
                                double v0, std::string expr = {});

  double operator()(double r) const {
    return kind == PotentialKind::constant ? m * m : sampler(r);
  }
  /// inf V.
  double infimum() const { return kind == PotentialKind::constant ? m * m : v0; }
};

/// Scalar model parameters. The charge convention is fixed to e = -1, omega > 0.
struct ModelParams {
  double s = 0.5;
  double alpha = 0.0;
  double p = 4.0;
  double omega = 0.3;
  PotentialSpec potential = PotentialSpec::constant(1.0);

  /// Throws DomainError unless 0 < s < 1, 2 < p < 6, omega > 0 and m > 0.
  void validate() const;
  /// Negative part of alpha.
  double alpha_minus() const { return alpha < 0.0 ? -alpha : 0.0; }
};

struct AdmissibilityReport {
  double omega_gap = 0.0;
  double alpha0 = 0.0; // NaN when omega_gap <= 0
  bool admissible = false;
  std::vector<std::string> violated_conditions; // subset of {"(a)","(b)","threshold"}
};

enum class CoercivityCase { geometry, palais_smale };

/// Constants of the coercivity systems. c1, c2 belong to epsilon0 and the
/// geometry interval; epsilon1, d1, d2 exist only for the Palais-Smale case
/// with p < 4 and belong to ps_interval.
struct CoercivityConstants {
  double epsilon0 = 1.0;
  double c1 = 1.0;
  double c2 = 0.0;
  std::pair<double, double> feasible_interval{0.0, 0.0};
  std::optional<double> epsilon1;
  std::optional<double> d1;
  std::optional<double> d2;
  std::optional<std::pair<double, double>> ps_interval;

  double min_c() const { return c1 < c2 ? c1 : c2; }
};

/// m^2 - omega^2 - ((4-p)^+/(p-2)) omega^2.
double omega_gap(double p, double m, double omega);

/// s^{-s} (1-s)^{s-1} t^{1-s}, equal to inf_{k>0} (k^2 + t)/k^{2s}.
double alpha0(double s, double t);

AdmissibilityReport check_admissible(const ModelParams &params);

/// Chooses the auxiliary epsilon maximizing min{c1, c2} (and min{d1, d2} in
/// the Palais-Smale case) by golden-section search on the feasibility interval.
CoercivityConstants feasible_epsilon(const ModelParams &params,
                                     CoercivityCase which);

/// Open feasibility interval of the system 1 - a s e > 0,
/// T - a (1-s) e^{-s/(1-s)} > 0 for a = alpha^- > 0. May be empty (lo >= hi).
std::pair<double, double> epsilon_interval(double s, double alpha_minus,
                                           double T);

/// Young-type bound: k^{2s} <= (1-s) eps^{-s/(1-s)} + s eps k^2.
double young_bound(double s, double eps, double k);

/// Smallest gamma >= 0 with k^2 + alpha k^{2s} + v0 + gamma >= (1 + k^2)/2 for
/// every k > 0, from the Young bound at eps = 1/(2 alpha^- s) (where it is
/// attained).
double young_gamma(double s, double alpha, double v0);

struct ThresholdRow {
  double s = 0.0;
  double omega_gap = 0.0;
  double alpha0 = 0.0;
  double second_difference = 0.0; // NaN at the two ends of each block
};

/// alpha0(s, Omega) on the uniform grid of `points` values of s from 1e-4 to
/// 1 - 1e-4, one block per Omega, with the centered second difference in s.
/// Throws DomainError for Omega <= 0 or fewer than 3 points.
std::vector<ThresholdRow> threshold_table(const std::vector<double> &omegas,
                                          std::size_t points);

/// Strict sign changes in a sequence, ignoring NaN and exact zeros.
int count_sign_changes(const std::vector<double> &values);

/// C(s) = ( int_{R^3} (1 - cos x_1) / |x|^{3+2s} dx )^{-1} by quadrature.
double normalization_constant(double s);

} // namespace kgm
