#pragma once

// Independent reference computations used only by the tests.

#include <functional>
#include <vector>

namespace oracle {

/// inf_{k>0} (k^2 + t) / k^{2s} by log-grid scan plus golden refinement.
double brute_alpha0(double s, double t);

/// 2^{2s} s Gamma((3+2s)/2) / (pi^{3/2} Gamma(1-s)).
double closed_form_C(double s);

/// O(N^2) sine transform: out_n = sum_j in_j sin(pi n j / (N+1)).
std::vector<double> direct_dst(const std::vector<double> &in);

/// Hypersingular-integral value of (-Delta)^s exp(-r^2) at radius r.
double frac_laplacian_gaussian(double s, double r);

/// psi with -Delta psi = exp(-2 r^2) in R^3, shifted so psi(R) = 0.
double newtonian_gaussian(double r, double R);

/// Radial ground state of -u'' - (2/r) u' + u = u^3: value u(0) found by
/// shooting with RK4 and bisection.
double shooting_ground_state_center();

struct DenseSpectrum {
  std::vector<double> lambdas;             // ascending
  std::vector<std::vector<double>> vectors; // mode coefficients, 2 pi R sum c^2 = 1
};

/// Radial spectrum of k^2 + alpha k^{2s} + V on the sine basis of [0,R] with N
/// modes, from an explicitly assembled matrix and a dense symmetric solver.
DenseSpectrum dense_radial_spectrum(double R, int N, double s, double alpha,
                                    const std::function<double(double)> &V);

} // namespace oracle
