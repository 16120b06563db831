#pragma once

// Brute-force cross-checks that do not share code paths with the model
// modules: a discretized reservoir evolved by exact diagonalization, dwell
//-time-resolved propagators built from their Fourier definition over a bias
// on the watched subspace, and the clock-coupling operator identity verified
// on small product spaces.

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "decayclock/finite_band.hpp"
#include "decayclock/numerics.hpp"

namespace decayclock::oracle {

using numerics::Complex;

// A requested computation cannot be resolved on the requested grid.
struct ResolutionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The band sampled at M discrete levels: E_k = E_min + (k + 1/2) deltaE with
// deltaE = width/M, coupled to the excited level with Omega_k =
// sqrt(product(E_k) deltaE) so the continuum coupling density is reproduced.
// The (M+1)-dimensional Hamiltonian's eigendecomposition is computed once
// and cached; basis index 0 is the excited state, 1..M the band levels.
struct DiscretizedModel {
  double E_e = 0.0;
  double spacing = 0.0;             // deltaE; the implied density is 1/deltaE
  Eigen::VectorXd energies;         // E_k, size M
  Eigen::VectorXd couplings;        // Omega_k, size M
  Eigen::VectorXd eigenvalues;      // of the (M+1)-dim Hamiltonian
  Eigen::MatrixXd modes;            // orthonormal eigenvectors, by column

  long long levels() const { return energies.size(); }
  // The discrete reservoir revives on this time scale; beyond half of it the
  // model stops emulating a continuum.
  double recurrence_time() const { return 2.0 * M_PI / spacing; }
};

// Requires M >= 11 and odd (so a level can sit at the band center).  The
// excited energy is taken from the explicit argument.  Rejects combinations
// where the implied golden-rule width exceeds 50 level spacings.
DiscretizedModel build_discretized(const finite_band::BandProfile& band, int M,
                                   double E_e);

struct SurvivalResult {
  Complex amplitude;               // <e| exp(-i H t) |e>
  bool recurrence_warning = false; // t beyond half the recurrence time
};

SurvivalResult exact_survival(const DiscretizedModel& model, double t);

struct SpectrumResult {
  std::vector<double> energies;        // E_k
  std::vector<double> density;         // |<E_k| exp(-i H t) |e>|^2 / deltaE
  double survival_probability = 0.0;   // the complementary mass
  bool recurrence_warning = false;
};

SpectrumResult exact_spectrum(const DiscretizedModel& model, double t);

// First-order emission amplitude into level k, in closed form:
// -i Omega_k Int_0^t e^{-i E_k (t - tau)} e^{-i E_e tau} dtau.
Complex dyson_first_order(const DiscretizedModel& model, int k, double t);

// Grid for the bias-Fourier construction of dwell-time amplitudes: the bias
// runs over lambda_l = -Lambda + l * (2 Lambda / L), and the conjugate dwell
// times over tau_m = m * pi / Lambda, m = 0 .. L-1.
struct ConditionalSpec {
  double Lambda = 64.0;
  int L = 4096;

  ConditionalSpec() = default;
  ConditionalSpec(double Lambda_, int L_) : Lambda(Lambda_), L(L_) {
    if (!(Lambda > 0.0))
      throw std::invalid_argument("ConditionalSpec: Lambda <= 0");
    if (L < 2 || (L & (L - 1)) != 0)
      throw std::invalid_argument("ConditionalSpec: L must be a power of 2");
  }
  double delta_lambda() const { return 2.0 * Lambda / L; }
  double delta_tau() const { return M_PI / Lambda; }
};

// Dwell-time-resolved propagation amplitude from basis state `initial` to
// `final` in time t, where the dwell time tau is the time spent in the
// subspace selected by a diagonal 0/1 projector.  The two singular channels
// (never leaving the subspace: all weight at tau = t; never entering it:
// tau = 0) are removed in closed form before the Fourier step and returned
// as discrete weights.  `leakage` estimates the bias-window truncation error
// as the largest regular amplitude found at unphysical dwell times tau > t.
struct ConditionalTable {
  std::vector<double> tau;
  std::vector<Complex> regular;    // amplitude density at tau_m
  Complex weight_at_t{0.0, 0.0};
  Complex weight_at_0{0.0, 0.0};
  double leakage = 0.0;
};

ConditionalTable conditional_via_fourier(const numerics::HermitianMatrix& system,
                                         const Eigen::VectorXd& projector_diag,
                                         int initial, int final, double t,
                                         const ConditionalSpec& spec);

// Which subspace the surrogate clock ticks in: while the system is inside
// the projector's subspace (running) or outside it (waiting).
enum class ClockWiring { running, waiting };

struct IdentityCheckResult {
  double residual = 0.0;  // operator-norm distance between the two routes
  double leakage = 0.0;   // bias-window truncation estimate, as above
};

// Checks, on the full product space, that coupling a clock generator to the
// projector is the same as evolving the clock for exactly the dwell time:
//   exp(-i (H_s x 1 + P x H_c) t)
//     =  W_t x U_c(t) + W_0 x 1 + Sum_m A_reg(tau_m) x U_c(tau_m) dtau
// (running), and the complement-projector analogue with U_c(t - tau_m)
// (waiting).  Returns the largest singular value of the difference.
IdentityCheckResult composite_identity_check(
    const numerics::HermitianMatrix& system,
    const Eigen::VectorXd& projector_diag,
    const numerics::HermitianMatrix& clock, double t,
    const ConditionalSpec& spec, ClockWiring wiring);

// A reproducible random instance for the identity check: a dense system
// Hamiltonian with unit-tested spectral radius, the projector onto the first
// half of the basis, and a clock whose eigenvalues are distinct multiples of
// the bias-grid step (so they are representable on the grid and the check
// isolates genuine identity violations from interpolation error; see the
// accompanying tests for the off-grid behaviour).
struct IdentityProblem {
  numerics::HermitianMatrix system;
  Eigen::VectorXd projector_diag;
  numerics::HermitianMatrix clock;
  ConditionalSpec spec;
};

IdentityProblem make_identity_problem(int system_dim, int clock_dim,
                                      std::uint64_t seed,
                                      const ConditionalSpec& spec = {});

}  // namespace decayclock::oracle
