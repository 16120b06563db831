#include "decayclock/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/FFT>
#include <unsupported/Eigen/KroneckerProduct>

namespace decayclock::oracle {

namespace {

constexpr Complex kI{0.0, 1.0};

Eigen::VectorXcd phase_factors(const Eigen::VectorXd& eigenvalues, double t) {
  Eigen::VectorXcd phases(eigenvalues.size());
  for (Eigen::Index j = 0; j < eigenvalues.size(); ++j)
    phases(j) = std::exp(-kI * eigenvalues(j) * t);
  return phases;
}

void validate_projector(const Eigen::VectorXd& diag, Eigen::Index dim) {
  if (diag.size() != dim)
    throw std::invalid_argument("projector dimension mismatch");
  for (Eigen::Index i = 0; i < dim; ++i)
    if (diag(i) != 0.0 && diag(i) != 1.0)
      throw std::invalid_argument("projector entries must be exactly 0 or 1");
}

double spectral_radius(const Eigen::MatrixXcd& hermitian) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(hermitian,
                                                         Eigen::EigenvaluesOnly);
  const auto& values = solver.eigenvalues();
  return std::max(std::fabs(values(0)), std::fabs(values(values.size() - 1)));
}

// D A D with D = diag(mask), the compression onto a 0/1 subspace.
Eigen::MatrixXcd masked(const Eigen::VectorXd& mask, const Eigen::MatrixXcd& A) {
  return mask.cast<Complex>().asDiagonal() * A *
         mask.cast<Complex>().asDiagonal();
}

void ensure_resolvable(const Eigen::MatrixXcd& H, double t,
                       const ConditionalSpec& spec) {
  const double radius = spectral_radius(H);
  if (spec.Lambda < 8.0 * radius)
    throw ResolutionError(
        "bias window too narrow: Lambda must be at least 8 times the system's "
        "spectral radius or the transform leaks");
  if (!(t < spec.L * spec.delta_tau()))
    throw ResolutionError("dwell-time grid does not reach t; increase L");
}

// Everything the bias-Fourier construction produces: the two singular
// channels and the regular dwell-time amplitudes on the tau grid, as full
// matrices.
struct BiasDecomposition {
  Eigen::MatrixXcd W_t;                      // never left the subspace
  Eigen::MatrixXcd W_0;                      // never entered it
  std::vector<Eigen::MatrixXcd> regular;     // A_reg(tau_m)
  std::vector<double> tau;
  double leakage = 0.0;
};

BiasDecomposition bias_decomposition(const Eigen::MatrixXcd& H,
                                     const Eigen::VectorXd& proj, double t,
                                     const ConditionalSpec& spec) {
  ensure_resolvable(H, t, spec);
  const Eigen::Index dim = H.rows();
  const int L = spec.L;
  const double d_lambda = spec.delta_lambda();
  const double d_tau = spec.delta_tau();

  BiasDecomposition out;
  // Histories confined to the subspace evolve under P H P; the exponential
  // is taken on the full space (it acts as the identity on the complement)
  // and then compressed, which leaves exactly the confined block.
  const Eigen::VectorXd comp = Eigen::VectorXd::Ones(dim) - proj;
  out.W_t = masked(proj, numerics::matrix_exp(masked(proj, H), t));
  out.W_0 = masked(comp, numerics::matrix_exp(masked(comp, H), t));

  // Biased propagators on the lambda grid, with the singular channels
  // removed so the remainder is a smooth function of lambda.
  const Eigen::MatrixXcd bias = proj.cast<Complex>().asDiagonal();
  std::vector<Eigen::MatrixXcd> smooth(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    const double lambda = -spec.Lambda + l * d_lambda;
    Eigen::MatrixXcd M = numerics::matrix_exp(H + lambda * bias, t);
    M -= std::exp(-kI * lambda * t) * out.W_t;
    M -= out.W_0;
    smooth[static_cast<std::size_t>(l)] = std::move(M);
  }

  // Inverse transform per matrix entry; the grids are conjugate
  // (d_lambda * d_tau * L = 2 pi), so the bias integral becomes an FFT.
  out.tau.resize(static_cast<std::size_t>(L));
  for (int m = 0; m < L; ++m)
    out.tau[static_cast<std::size_t>(m)] = m * d_tau;
  out.regular.assign(static_cast<std::size_t>(L),
                     Eigen::MatrixXcd::Zero(dim, dim));
  Eigen::FFT<double> fft;
  std::vector<Complex> in(static_cast<std::size_t>(L));
  std::vector<Complex> transformed(static_cast<std::size_t>(L));
  for (Eigen::Index r = 0; r < dim; ++r) {
    for (Eigen::Index c = 0; c < dim; ++c) {
      for (int l = 0; l < L; ++l)
        in[static_cast<std::size_t>(l)] = smooth[static_cast<std::size_t>(l)](r, c);
      fft.inv(transformed, in);
      for (int m = 0; m < L; ++m) {
        const double tau_m = out.tau[static_cast<std::size_t>(m)];
        out.regular[static_cast<std::size_t>(m)](r, c) =
            (d_lambda / (2.0 * M_PI)) * static_cast<double>(L) *
            std::exp(-kI * spec.Lambda * tau_m) *
            transformed[static_cast<std::size_t>(m)];
      }
    }
  }

  // Window-truncation estimate: regular amplitude surviving at dwell times
  // beyond t, where it must vanish.  The far end of the tau grid aliases
  // tau < 0 and is excluded from the scan.
  const double scan_lo = t + 4.0 * d_tau;
  const double scan_hi = 0.5 * L * d_tau;
  for (int m = 0; m < L; ++m) {
    const double tau_m = out.tau[static_cast<std::size_t>(m)];
    if (tau_m <= scan_lo || tau_m > scan_hi) continue;
    out.leakage = std::max(
        out.leakage, out.regular[static_cast<std::size_t>(m)].cwiseAbs().maxCoeff());
  }
  return out;
}

}  // namespace

DiscretizedModel build_discretized(const finite_band::BandProfile& band, int M,
                                   double E_e) {
  if (M < 11 || M % 2 == 0)
    throw std::invalid_argument("build_discretized: M must be odd and >= 11");
  if (!band.product)
    throw std::invalid_argument("build_discretized: band has no coupling density");

  DiscretizedModel model;
  model.E_e = E_e;
  model.spacing = band.width() / M;

  const double gamma_fermi =
      2.0 * M_PI * (band.flat ? band.flat_value
                              : (E_e >= band.E_min && E_e <= band.E_max
                                     ? band.product(E_e)
                                     : 0.0));
  if (gamma_fermi > 50.0 * model.spacing)
    throw ResolutionError(
        "build_discretized: golden-rule width exceeds 50 level spacings on "
        "this grid");

  model.energies.resize(M);
  model.couplings.resize(M);
  for (int k = 0; k < M; ++k) {
    const double E_k = band.E_min + (k + 0.5) * model.spacing;
    model.energies(k) = E_k;
    model.couplings(k) = std::sqrt(band.product(E_k) * model.spacing);
  }

  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(M + 1, M + 1);
  H(0, 0) = E_e;
  for (int k = 0; k < M; ++k) {
    H(0, k + 1) = model.couplings(k);
    H(k + 1, 0) = model.couplings(k);
    H(k + 1, k + 1) = model.energies(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(H);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("build_discretized: eigendecomposition failed");
  model.eigenvalues = solver.eigenvalues();
  model.modes = solver.eigenvectors();
  return model;
}

SurvivalResult exact_survival(const DiscretizedModel& model, double t) {
  SurvivalResult result;
  result.recurrence_warning = !(t < 0.5 * model.recurrence_time());
  Complex amplitude{0.0, 0.0};
  for (Eigen::Index j = 0; j < model.eigenvalues.size(); ++j) {
    const double weight = model.modes(0, j) * model.modes(0, j);
    amplitude += weight * std::exp(-kI * model.eigenvalues(j) * t);
  }
  result.amplitude = amplitude;
  return result;
}

SpectrumResult exact_spectrum(const DiscretizedModel& model, double t) {
  SpectrumResult result;
  result.recurrence_warning = !(t < 0.5 * model.recurrence_time());
  const Eigen::VectorXcd coefficients =
      model.modes.row(0).transpose().cwiseProduct(
          phase_factors(model.eigenvalues, t));
  const Eigen::VectorXcd amplitudes = model.modes * coefficients;
  result.survival_probability = std::norm(amplitudes(0));
  const auto M = model.levels();
  result.energies.resize(static_cast<std::size_t>(M));
  result.density.resize(static_cast<std::size_t>(M));
  for (long long k = 0; k < M; ++k) {
    result.energies[static_cast<std::size_t>(k)] = model.energies(k);
    result.density[static_cast<std::size_t>(k)] =
        std::norm(amplitudes(k + 1)) / model.spacing;
  }
  return result;
}

Complex dyson_first_order(const DiscretizedModel& model, int k, double t) {
  if (k < 0 || k >= model.levels())
    throw std::invalid_argument("dyson_first_order: level index out of range");
  const double E_k = model.energies(k);
  const Complex w = kI * (E_k - model.E_e) * t;
  return -kI * model.couplings(k) * std::exp(-kI * E_k * t) * t *
         numerics::expm1_over(w);
}

ConditionalTable conditional_via_fourier(const numerics::HermitianMatrix& system,
                                         const Eigen::VectorXd& projector_diag,
                                         int initial, int final, double t,
                                         const ConditionalSpec& spec) {
  const auto& H = system.matrix();
  validate_projector(projector_diag, H.rows());
  if (initial < 0 || initial >= H.rows() || final < 0 || final >= H.rows())
    throw std::invalid_argument("conditional_via_fourier: state index out of range");
  if (!(t > 0.0))
    throw std::invalid_argument("conditional_via_fourier: t must be positive");

  const BiasDecomposition parts =
      bias_decomposition(H, projector_diag, t, spec);
  ConditionalTable table;
  table.tau = parts.tau;
  table.regular.resize(parts.regular.size());
  for (std::size_t m = 0; m < parts.regular.size(); ++m)
    table.regular[m] = parts.regular[m](final, initial);
  table.weight_at_t = parts.W_t(final, initial);
  table.weight_at_0 = parts.W_0(final, initial);
  table.leakage = parts.leakage;
  return table;
}

IdentityCheckResult composite_identity_check(
    const numerics::HermitianMatrix& system,
    const Eigen::VectorXd& projector_diag,
    const numerics::HermitianMatrix& clock, double t,
    const ConditionalSpec& spec, ClockWiring wiring) {
  const auto& H_s = system.matrix();
  const auto& H_c = clock.matrix();
  if (H_s.rows() > 8 || H_c.rows() > 8)
    throw std::invalid_argument(
        "composite_identity_check: product space limited to 8x8 factors");
  validate_projector(projector_diag, H_s.rows());

  const BiasDecomposition parts =
      bias_decomposition(H_s, projector_diag, t, spec);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> clock_solver(H_c);
  if (clock_solver.info() != Eigen::Success)
    throw std::runtime_error("composite_identity_check: clock solve failed");
  const auto clock_at = [&](double time) -> Eigen::MatrixXcd {
    return clock_solver.eigenvectors() *
           phase_factors(clock_solver.eigenvalues(), time).asDiagonal() *
           clock_solver.eigenvectors().adjoint();
  };

  const Eigen::Index dim_c = H_c.rows();
  const Eigen::MatrixXcd identity_c = Eigen::MatrixXcd::Identity(dim_c, dim_c);
  const bool running = (wiring == ClockWiring::running);

  // Clock displacement per channel: the dwell time itself when the clock
  // ticks inside the subspace, the complement t - tau when outside.
  Eigen::MatrixXcd assembled =
      Eigen::kroneckerProduct(parts.W_t, running ? clock_at(t) : identity_c)
          .eval();
  assembled +=
      Eigen::kroneckerProduct(parts.W_0, running ? identity_c : clock_at(t));
  const double d_tau = spec.delta_tau();
  for (std::size_t m = 0; m < parts.regular.size(); ++m) {
    const double tau_m = parts.tau[m];
    assembled += d_tau * Eigen::kroneckerProduct(
                             parts.regular[m],
                             clock_at(running ? tau_m : t - tau_m));
  }

  const Eigen::VectorXd coupling_mask =
      running ? projector_diag
              : (Eigen::VectorXd::Ones(H_s.rows()) - projector_diag);
  const Eigen::MatrixXcd identity_s =
      Eigen::MatrixXcd::Identity(H_s.rows(), H_s.rows());
  const Eigen::MatrixXcd generator =
      Eigen::kroneckerProduct(H_s, identity_c).eval() +
      Eigen::kroneckerProduct(
          Eigen::MatrixXcd(coupling_mask.cast<Complex>().asDiagonal()), H_c);
  const Eigen::MatrixXcd direct = numerics::matrix_exp(generator, t);

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(assembled - direct);
  IdentityCheckResult result;
  result.residual = svd.singularValues()(0);
  result.leakage = parts.leakage;
  return result;
}

IdentityProblem make_identity_problem(int system_dim, int clock_dim,
                                      std::uint64_t seed,
                                      const ConditionalSpec& spec) {
  if (system_dim < 2 || clock_dim < 1)
    throw std::invalid_argument("make_identity_problem: degenerate dimensions");
  std::mt19937_64 rng(seed);

  // System: dense with spectral radius at half the window requirement, so
  // Lambda >= 8 * radius holds with a factor-2 margin.
  const double radius = spec.Lambda / 16.0;
  Eigen::MatrixXcd H_s = numerics::random_hermitian(system_dim, radius, rng);

  Eigen::VectorXd proj = Eigen::VectorXd::Zero(system_dim);
  for (int i = 0; i < (system_dim + 1) / 2; ++i) proj(i) = 1.0;

  // Clock: Haar-random eigenvectors, eigenvalues placed exactly on the bias
  // grid (distinct integer multiples of delta_lambda, well inside the
  // window) so the dwell-time sum telescopes without interpolation error.
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXcd ginibre(clock_dim, clock_dim);
  for (int r = 0; r < clock_dim; ++r)
    for (int c = 0; c < clock_dim; ++c)
      ginibre(r, c) = Complex(normal(rng), normal(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(ginibre);
  Eigen::MatrixXcd Q = qr.householderQ();
  const Eigen::MatrixXcd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < clock_dim; ++c) {
    const Complex r_cc = R(c, c);
    if (std::abs(r_cc) > 0.0) Q.col(c) *= r_cc / std::abs(r_cc);
  }

  const int harmonic_cap = spec.L / 8;
  std::uniform_int_distribution<int> harmonic(-harmonic_cap, harmonic_cap);
  std::vector<int> chosen;
  while (static_cast<int>(chosen.size()) < clock_dim) {
    const int candidate = harmonic(rng);
    if (std::find(chosen.begin(), chosen.end(), candidate) == chosen.end())
      chosen.push_back(candidate);
  }
  Eigen::VectorXd clock_levels(clock_dim);
  for (int j = 0; j < clock_dim; ++j)
    clock_levels(j) = chosen[static_cast<std::size_t>(j)] * spec.delta_lambda();

  Eigen::MatrixXcd H_c =
      Q * clock_levels.cast<Complex>().asDiagonal() * Q.adjoint();
  H_c = 0.5 * (H_c + Eigen::MatrixXcd(H_c.adjoint()));

  return IdentityProblem{numerics::HermitianMatrix(std::move(H_s)), proj,
                         numerics::HermitianMatrix(std::move(H_c)), spec};
}

}  // namespace decayclock::oracle
