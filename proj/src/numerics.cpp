#include "decayclock/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace decayclock::numerics {
namespace {

// Gauss-Kronrod 7/15 nodes and weights on [-1, 1] (QUADPACK dqk15 tables).
// Odd-indexed abscissae are the embedded 7-point Gauss nodes.
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Panel {
  double a = 0.0;
  double b = 0.0;
  Complex value{0.0, 0.0};
  double error = 0.0;
};

// 15-point Kronrod estimate with the embedded 7-point Gauss value as the
// error reference.
Panel evaluate_panel(const std::function<Complex(double)>& f, double a,
                     double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  Complex kronrod = kWgk[7] * f(center);
  Complex gauss = kWg[3] * f(center);
  for (int k = 0; k < 7; ++k) {
    const Complex lo = f(center - half * kXgk[k]);
    const Complex hi = f(center + half * kXgk[k]);
    kronrod += kWgk[k] * (lo + hi);
    if (k % 2 == 1) gauss += kWg[k / 2] * (lo + hi);
  }
  Panel p;
  p.a = a;
  p.b = b;
  p.value = half * kronrod;
  p.error = std::abs(half * (kronrod - gauss));
  return p;
}

struct WorstFirst {
  bool operator()(const Panel& x, const Panel& y) const {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic tie-break
  }
};

}  // namespace

IntegrationResult integrate_complex(const std::function<Complex(double)>& f,
                                    double a, double b,
                                    const QuadratureSpec& spec) {
  if (!(a <= b)) throw std::invalid_argument("integrate_complex: a > b");
  if (spec.rel_tol <= 0.0 || spec.abs_tol <= 0.0)
    throw std::invalid_argument("integrate_complex: tolerances must be > 0");
  if (spec.max_subdivisions < 1)
    throw std::invalid_argument("integrate_complex: max_subdivisions < 1");
  if (a == b) return {Complex{0.0, 0.0}, 0.0, 0};

  // Initial uniform split honoring the oscillation-aware panel cap.
  int cap_initial = 1;
  if (std::isfinite(spec.max_panel_width) && spec.max_panel_width > 0.0) {
    const double demanded = std::ceil((b - a) / spec.max_panel_width);
    if (demanded > static_cast<double>(1 << 22))
      throw ConvergenceError(
          "integrate_complex: panel width cap demands an absurd panel count",
          Complex{0.0, 0.0}, std::numeric_limits<double>::infinity());
    cap_initial = std::max(1, static_cast<int>(demanded));
  }
  int initial = cap_initial;
  if (spec.method == QuadratureSpec::Method::fixed_panel) {
    initial = std::max(cap_initial, spec.max_subdivisions);
  } else if (initial > spec.max_subdivisions) {
    throw ConvergenceError(
        "integrate_complex: panel cap demands more panels than the budget",
        Complex{0.0, 0.0}, std::numeric_limits<double>::infinity());
  }

  std::priority_queue<Panel, std::vector<Panel>, WorstFirst> heap;
  Complex total{0.0, 0.0};
  double total_error = 0.0;
  int panels = 0;
  for (int k = 0; k < initial; ++k) {
    const double pa = a + (b - a) * static_cast<double>(k) / initial;
    const double pb = a + (b - a) * static_cast<double>(k + 1) / initial;
    Panel p = evaluate_panel(f, pa, pb);
    total += p.value;
    total_error += p.error;
    ++panels;
    heap.push(p);
  }

  auto tolerance = [&]() {
    return std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
  };

  if (spec.method == QuadratureSpec::Method::fixed_panel) {
    if (total_error > tolerance())
      throw ConvergenceError(
          "integrate_complex: fixed panel grid missed the tolerance", total,
          total_error);
    return {total, total_error, panels};
  }

  while (total_error > tolerance()) {
    if (panels >= spec.max_subdivisions)
      throw ConvergenceError(
          "integrate_complex: subdivision budget exhausted", total,
          total_error);
    Panel worst = heap.top();
    heap.pop();
    total -= worst.value;
    total_error -= worst.error;
    const double mid = 0.5 * (worst.a + worst.b);
    for (Panel half : {evaluate_panel(f, worst.a, mid),
                       evaluate_panel(f, mid, worst.b)}) {
      total += half.value;
      total_error += half.error;
      heap.push(half);
    }
    ++panels;
  }
  return {total, total_error, panels};
}

double log_binomial(long long N, long long n) {
  if (n < 0 || n > N)
    throw std::invalid_argument("log_binomial: need 0 <= n <= N");
  if (n == 0 || n == N) return 0.0;
  return std::lgamma(static_cast<double>(N) + 1.0) -
         std::lgamma(static_cast<double>(n) + 1.0) -
         std::lgamma(static_cast<double>(N - n) + 1.0);
}

HermitianMatrix::HermitianMatrix(Eigen::MatrixXcd m, int dimension_cap)
    : m_(std::move(m)) {
  if (m_.rows() != m_.cols() || m_.rows() < 1)
    throw std::invalid_argument("HermitianMatrix: matrix must be square");
  if (m_.rows() > dimension_cap)
    throw std::invalid_argument(
        "HermitianMatrix: dimension exceeds the configured cap");
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("HermitianMatrix: matrix is not Hermitian");
  m_ = 0.5 * (m_ + m_.adjoint().eval());
}

Eigen::VectorXcd matrix_exp_apply(const HermitianMatrix& H, double t,
                                  const Eigen::VectorXcd& v) {
  if (v.size() != H.dim())
    throw std::invalid_argument("matrix_exp_apply: dimension mismatch");
  return matrix_exp(H.matrix(), t) * v;
}

Eigen::MatrixXcd matrix_exp(const Eigen::MatrixXcd& hermitian, double t) {
  const double scale = std::max(1.0, hermitian.cwiseAbs().maxCoeff());
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
    throw std::invalid_argument("matrix_exp: matrix is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(hermitian);
  const Eigen::VectorXcd phases =
      (Complex{0.0, -1.0} * t * es.eigenvalues().cast<Complex>().array())
          .exp();
  return es.eigenvectors() * phases.asDiagonal() *
         es.eigenvectors().adjoint();
}

double erf(double x) { return std::erf(x); }

Complex expm1_over(Complex w) {
  if (std::abs(w) < 0.5) {
    // sum_{k>=0} w^k/(k+1)!  -- converges to machine precision in <= 20 terms
    Complex term{1.0, 0.0};
    Complex sum{1.0, 0.0};
    for (int k = 1; k < 24; ++k) {
      term *= w / static_cast<double>(k + 1);
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  return (std::exp(w) - 1.0) / w;
}

Eigen::MatrixXcd random_hermitian(int d, double spectral_radius,
                                  std::mt19937_64& rng) {
  if (d < 1) throw std::invalid_argument("random_hermitian: d < 1");
  if (spectral_radius <= 0.0)
    throw std::invalid_argument("random_hermitian: spectral radius <= 0");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd A(d, d);
  for (int r = 0; r < d; ++r)
    for (int c = 0; c < d; ++c) A(r, c) = Complex{gauss(rng), gauss(rng)};
  Eigen::MatrixXcd H = 0.5 * (A + A.adjoint().eval());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  const double radius = es.eigenvalues().cwiseAbs().maxCoeff();
  if (radius > 0.0) H *= spectral_radius / radius;
  return H;
}

}  // namespace decayclock::numerics
