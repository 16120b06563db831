#pragma once

// Shared numerical kernels: adaptive complex-valued quadrature, log-space
// combinatorics, small dense Hermitian matrix exponentials, and a few scalar
// helpers used across the library.

#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace decayclock::numerics {

using Complex = std::complex<double>;

struct QuadratureSpec {
  enum class Method { adaptive, fixed_panel };
  Method method = Method::adaptive;
  double rel_tol = 1e-9;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;
  // Upper bound on the width of any quadrature panel.  Callers integrating
  // phase factors exp(iEt) set this to a fraction of the shortest oscillation
  // period so that no panel straddles many cycles and fools the error
  // estimator.  Infinite by default (no constraint).
  double max_panel_width = std::numeric_limits<double>::infinity();
};

struct IntegrationResult {
  Complex value;
  double error;  // conservative global error estimate
  int panels;    // panels in the final subdivision
};

// Thrown when the subdivision budget is exhausted before the tolerance is
// met; carries the best estimate obtained so far.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, Complex best_estimate,
                   double error_estimate)
      : std::runtime_error(what),
        best_(best_estimate),
        error_(error_estimate) {}
  Complex best_estimate() const { return best_; }
  double error_estimate() const { return error_; }

 private:
  Complex best_;
  double error_;
};

// Integrate a complex-valued function over [a, b] with a Gauss-Kronrod 7/15
// rule, either adaptively (bisecting the worst panel until the global error
// estimate meets max(abs_tol, rel_tol * |value|)) or on a fixed uniform
// panel grid.  Throws ConvergenceError if the budget runs out.
IntegrationResult integrate_complex(const std::function<Complex(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec = {});

// ln C(N, n), log-gamma based; exact 0 at the boundaries n = 0 and n = N.
double log_binomial(long long N, long long n);

// Dense Hermitian matrix with a dimension cap suitable for desk-scale
// eigendecomposition.  The constructor verifies conjugate symmetry and
// stores the symmetrized matrix.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Eigen::MatrixXcd m, int dimension_cap = 64);
  int dim() const { return static_cast<int>(m_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return m_; }

 private:
  Eigen::MatrixXcd m_;
};

// exp(-i H t) v via full eigendecomposition.
Eigen::VectorXcd matrix_exp_apply(const HermitianMatrix& H, double t,
                                  const Eigen::VectorXcd& v);

// exp(-i H t) for a raw Hermitian matrix (hermiticity checked).  Helper used
// by the brute-force propagators, which outgrow the capped public type.
Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& hermitian, double t);

// Error function (odd, |error| < 1e-12).
double erf(double x);

// (exp(w) - 1)/w, series-stabilized near w = 0; equals 1 at w = 0.  This is
// the difference quotient behind every "two nearby exponentials" amplitude.
Complex expm1_over(Complex w);

// Random dense Hermitian matrix with Gaussian entries, rescaled so its
// spectral radius is exactly the requested value.
Eigen::MatrixXcd random_hermitian(int d, double spectral_radius,
                                  std::mt19937_64& rng);

}  // namespace decayclock::numerics
