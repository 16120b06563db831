#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "decayclock/composite.hpp"
#include "decayclock/finite_band.hpp"
#include "decayclock/markovian.hpp"

using namespace decayclock;
using finite_band::BandProfile;
using numerics::Complex;

namespace {

// A flat profile that hides its flatness, forcing the quadrature path.
BandProfile opaque_flat(double E_min, double E_max, double E_e, double v) {
  return BandProfile::make(E_min, E_max, E_e, [v](double) { return v; });
}

}  // namespace

TEST_CASE("profile validation, level position, golden-rule rate") {
  CHECK_THROWS_AS(BandProfile::make_flat(5.0, 5.0, 2.0, 1.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(BandProfile::make_flat(0.0, 10.0, 5.0, 0.0),
                  std::invalid_argument);
  CHECK_THROWS_AS(finite_band::clocked_decay_rate(
                      BandProfile::make(0.0, 10.0, 5.0, nullptr), 0.1),
                  std::invalid_argument);

  const double v = 1.0 / (2.0 * M_PI);
  CHECK(BandProfile::make_flat(0.0, 10.0, 5.0, v).level_position() ==
        doctest::Approx(1.0));
  CHECK(BandProfile::make_flat(0.0, 10.0, -2.5, v).level_position() ==
        doctest::Approx(-0.5));
  CHECK(BandProfile::make_flat(0.0, 10.0, 12.5, v).level_position() ==
        doctest::Approx(2.5));
  // For a flat band the golden-rule normalization stays 2 pi v even when the
  // level sits outside the band...
  CHECK(BandProfile::make_flat(0.0, 10.0, -2.5, v).fermi_rate() ==
        doctest::Approx(1.0).epsilon(1e-14));
  // ...while a general profile reads the density at the level: zero outside.
  const auto bump = BandProfile::make(
      0.0, 10.0, 3.0, [](double E) { return 0.1 + 0.01 * E; });
  CHECK(bump.fermi_rate() == doctest::Approx(2.0 * M_PI * 0.13).epsilon(1e-14));
  const auto outside = BandProfile::make(
      0.0, 10.0, -1.0, [](double E) { return 0.1 + 0.01 * E; });
  CHECK(outside.fermi_rate() == 0.0);
}

TEST_CASE("first-order conditional amplitude: pure phases in the window") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 4.0, 0.5);
  const double t = 2.0;
  const auto mid = finite_band::first_order_conditional_amplitude(band, 3.0, t, 0.7);
  CHECK(mid.in_band);
  CHECK(std::abs(mid.density) == doctest::Approx(1.0).epsilon(1e-14));
  // Emission at the last moment leaves only the excited-state phase.
  const auto late = finite_band::first_order_conditional_amplitude(band, 3.0, t, t);
  const Complex expected =
      Complex(0.0, -1.0) * std::exp(Complex(0.0, -band.E_e * t));
  CHECK(std::abs(late.density - expected) < 1e-14);
  // Outside [0, t] nothing is emitted; out-of-band energies are flagged.
  CHECK(finite_band::first_order_conditional_amplitude(band, 3.0, t, -0.1)
            .density == Complex(0.0, 0.0));
  CHECK(finite_band::first_order_conditional_amplitude(band, 3.0, t, 2.1)
            .density == Complex(0.0, 0.0));
  CHECK_FALSE(finite_band::first_order_conditional_amplitude(band, 11.0, t, 0.7)
                  .in_band);
}

TEST_CASE("first-order amplitude is the no-depletion limit of the wide-band one") {
  const auto band = BandProfile::make_flat(-50.0, 50.0, 1.0, 0.5);
  const markovian::MarkovianAtom atom(1.0, 1e-12);
  const double t = 2.0, tau = 0.8;
  for (double E_r : {0.5, 1.0, 4.0}) {
    const Complex undepleted =
        finite_band::first_order_conditional_amplitude(band, E_r, t, tau).density;
    const Complex depleted =
        markovian::conditional_amplitude(atom, markovian::FinalState::photon(E_r),
                                         t, tau)
            .density;
    CHECK(std::abs(undepleted - depleted) < 1e-9 * std::abs(depleted));
  }
}

TEST_CASE("flat-band closed form vs quadrature for random levels and resolutions") {
  std::mt19937_64 rng(20260815);
  std::uniform_real_distribution<double> xi_dist(-1.0, 3.0);
  std::uniform_real_distribution<double> log_u(std::log(0.05), std::log(20.0));
  const double W = 10.0, v = 0.07;
  for (int trial = 0; trial < 20; ++trial) {
    const double xi = xi_dist(rng);
    const double E_e = xi * W / 2.0;
    const double Delta_t = std::exp(log_u(rng)) / W;
    const double closed = finite_band::clocked_decay_rate(
        BandProfile::make_flat(0.0, W, E_e, v), Delta_t);
    const double quad = finite_band::clocked_decay_rate(
        opaque_flat(0.0, W, E_e, v), Delta_t);
    CHECK(closed == doctest::Approx(quad).epsilon(1e-9));
  }
}

TEST_CASE("clocked rate limits: golden rule at coarse resolution, linear at fine") {
  const double v = 1.0 / (2.0 * M_PI);
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, v);
  // Coarse clock: the full golden-rule rate 2 pi v = 1.
  CHECK(finite_band::clocked_decay_rate(band, 50.0) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(finite_band::clocked_decay_rate(opaque_flat(0.0, 10.0, 5.0, v), 5.0) ==
        doctest::Approx(finite_band::clocked_decay_rate(band, 5.0))
            .epsilon(1e-9));
  // Fine clock: ratio ~ width * Delta_t / sqrt(2 pi).
  const double ratio = finite_band::clocked_decay_rate(band, 0.01) / band.fermi_rate();
  CHECK(ratio == doctest::Approx(0.0398776).epsilon(1e-4));
  CHECK(ratio == doctest::Approx(10.0 * 0.01 / std::sqrt(2.0 * M_PI)).epsilon(1e-3));
}

TEST_CASE("rate ratio curve: centered level follows the error function") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.3);
  const std::vector<double> u = {0.1, 0.5, 1.0, 2.0, 3.0, 5.0, 8.0, 12.0};
  const auto ratios = finite_band::rate_ratio_curve(band, u);
  for (std::size_t i = 0; i < u.size(); ++i) {
    CHECK(ratios[i] ==
          doctest::Approx(std::erf(u[i] / (2.0 * std::sqrt(2.0))))
              .epsilon(1e-12));
    if (i > 0) CHECK(ratios[i] > ratios[i - 1]);  // Zeno side: monotone rise
  }
  CHECK_THROWS_AS(finite_band::rate_ratio_curve(band, {0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      finite_band::rate_ratio_curve(
          BandProfile::make(0.0, 10.0, -1.0, [](double) { return 0.1; }), {1.0}),
      std::invalid_argument);
  // Vanishing resolution kills the rate for every level position.
  for (double xi : {-0.5, 1.0, 2.5}) {
    const auto tiny = finite_band::rate_ratio_curve(
        BandProfile::make_flat(0.0, 10.0, 5.0 * xi, 0.3), {1e-4});
    CHECK(tiny[0] < 1e-4);
  }
}

TEST_CASE("levels outside the band decay fastest at an intermediate resolution") {
  // Anti-Zeno: the clock window must be wide enough to reach the band but
  // narrow enough not to dilute; the optimum is strictly interior.
  for (double xi : {-0.5, -1.0, 2.5}) {
    const auto band = BandProfile::make_flat(0.0, 10.0, 5.0 * xi, 0.3);
    std::vector<double> u;
    for (double x = 0.05; x <= 40.0; x *= 1.05) u.push_back(x);
    const auto ratios = finite_band::rate_ratio_curve(band, u);
    std::size_t argmax = 0;
    for (std::size_t i = 1; i < ratios.size(); ++i)
      if (ratios[i] > ratios[argmax]) argmax = i;
    CHECK(argmax > 0);
    CHECK(argmax < ratios.size() - 1);
    CHECK(ratios[argmax] > ratios.front());
    CHECK(ratios[argmax] > ratios.back());
    if (xi == -0.5) {
      // Closed form: max of (erf(5u/(4 sqrt2)) - erf(u/(4 sqrt2)))/2.
      CHECK(ratios[argmax] == doctest::Approx(0.323558).epsilon(2e-3));
      CHECK(u[argmax] == doctest::Approx(1.46489).epsilon(0.06));
    }
  }
}

TEST_CASE("projective checks: linear rate with the bare band integral") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.25);
  CHECK(finite_band::projective_decay_rate(band, 0.1) ==
        doctest::Approx(0.1 * 0.25 * 10.0).epsilon(1e-14));
  const double v = 1.0 / (2.0 * M_PI);
  CHECK(finite_band::projective_decay_rate(
            BandProfile::make_flat(0.0, 10.0, 5.0, v), 0.01) ==
        doctest::Approx(0.0159155).epsilon(1e-4));
  // Quadrature path for a sloped profile.
  const auto sloped = BandProfile::make(
      0.0, 10.0, 5.0, [](double E) { return 0.1 + 0.02 * E; });
  CHECK(finite_band::projective_decay_rate(sloped, 0.1) ==
        doctest::Approx(0.1 * (0.1 * 10.0 + 0.02 * 50.0)).epsilon(1e-9));
  CHECK_THROWS_AS(finite_band::projective_decay_rate(band, 0.0),
                  std::invalid_argument);
}

TEST_CASE("the two fine-resolution slopes differ by exactly sqrt(2 pi)") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.25);
  const double Delta_t = 1e-3;
  const double slope_ratio = finite_band::clocked_decay_rate(band, Delta_t) /
                             finite_band::projective_decay_rate(band, Delta_t);
  CHECK(slope_ratio == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-4));
}

TEST_CASE("Zeno and jump times") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.25);
  const auto times = finite_band::zeno_and_jump_time(band);
  CHECK(times.tau_zeno == doctest::Approx(1.0 / std::sqrt(2.5)).epsilon(1e-14));
  CHECK(std::fabs(times.tau_jump - 2.0 * M_PI / 10.0) < 1e-12);
  // The jump time knows only the bandwidth, not the coupling strength.
  const auto stronger =
      finite_band::zeno_and_jump_time(BandProfile::make_flat(0.0, 10.0, 5.0, 25.0));
  CHECK(stronger.tau_jump == times.tau_jump);
  CHECK(stronger.tau_zeno < times.tau_zeno);
  CHECK(times.ratio() == doctest::Approx(times.tau_zeno / times.tau_jump));
  CHECK_THROWS_AS(
      finite_band::zeno_and_jump_time(opaque_flat(0.0, 10.0, 5.0, 0.25)),
      std::invalid_argument);
}

TEST_CASE("the jump time marks the onset of golden-rule behaviour") {
  // Find where the centered-level ratio reaches 0.9 and compare with tau_J.
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.25);
  double lo = 0.1, hi = 20.0;
  for (int iter = 0; iter < 60; ++iter) {
    const double mid = 0.5 * (lo + hi);
    const double r = finite_band::rate_ratio_curve(band, {mid})[0];
    (r < 0.9 ? lo : hi) = mid;
  }
  const double u_star = 0.5 * (lo + hi);
  CHECK(u_star == doctest::Approx(3.28971).epsilon(1e-4));
  const double dt_star = u_star / band.width();
  const double factor = finite_band::zeno_and_jump_time(band).tau_jump / dt_star;
  CHECK(factor == doctest::Approx(1.90995).epsilon(1e-3));
  CHECK(factor < 3.0);
  CHECK(factor > 1.0 / 3.0);
}

TEST_CASE("clocked joint probability: peak, n-scaling, support") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, 0.25);
  const double Delta_t = 0.01, t = 1.0;
  const long long n = 100;
  CHECK(finite_band::clocked_probability(band, Delta_t, band.E_e, n, t) ==
        doctest::Approx(M_PI * Delta_t * Delta_t /
                        std::sqrt(2.0 * M_PI * 100.0))
            .epsilon(1e-14));
  // Quadrupling the reading halves the probability (same line shape).
  CHECK(finite_band::clocked_probability(band, Delta_t, 4.0, n, t) ==
        doctest::Approx(2.0 * finite_band::clocked_probability(band, Delta_t,
                                                               4.0, 4 * n, t))
            .epsilon(1e-13));
  // Readings at or beyond the elapsed time carry nothing, as does n = 0.
  CHECK(finite_band::clocked_probability(band, Delta_t, 5.0, 10000, t) == 0.0);
  CHECK(finite_band::clocked_probability(band, Delta_t, 5.0, 0, t) == 0.0);
}

TEST_CASE("summing the clocked probabilities over readings rebuilds rate x time") {
  // Wide flat band, K = t / Delta_t = 2000 readings per unit sqrt(n) step.
  const double v = 0.01 / (2.0 * M_PI), W = 40000.0, Delta_t = 5e-4, t = 1.0;
  const auto band = BandProfile::make_flat(-W / 2.0, W / 2.0, 0.0, v);

  // First: the energy integral of product x clocked_probability collapses to
  // pi v Delta_t / sqrt(n); verify by quadrature for a few readings.
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-12;
  spec.abs_tol = 1e-18;
  spec.max_subdivisions = 50000;
  spec.max_panel_width = 0.25 / Delta_t;
  for (long long n : {1LL, 100LL, 1000000LL}) {
    const auto integral = numerics::integrate_complex(
        [&](double E) {
          return Complex(band.product(E) * finite_band::clocked_probability(
                                               band, Delta_t, E, n, t),
                         0.0);
        },
        -12.0 / Delta_t, 12.0 / Delta_t, spec);
    CHECK(integral.value.real() ==
          doctest::Approx(M_PI * v * Delta_t / std::sqrt(static_cast<double>(n)))
              .epsilon(1e-9));
  }

  // Then: the reading sum against the closed per-reading mass.
  double sum = 0.0;
  const long long n_max = 4000000;  // last reading with t_n < t
  for (long long n = 1; n < n_max; ++n)
    sum += M_PI * v * Delta_t / std::sqrt(static_cast<double>(n));
  const double target = finite_band::clocked_decay_rate(band, Delta_t) * t;
  const double rel = sum / target - 1.0;
  CHECK(std::fabs(rel) < 1e-3);
  // The residual is the zeta(1/2) defect of the sqrt staircase: -0.73 / K.
  CHECK(rel == doctest::Approx(-3.6515e-4).epsilon(0.02));
}

TEST_CASE("clocked emission line integrates to the decayed mass") {
  const auto band = BandProfile::make_flat(0.0, 10.0, 4.0, 0.02);
  const double Delta_t = 1.5, t = 0.5;
  const auto mass = numerics::integrate_complex(
      [&](double E) {
        return Complex(
            finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, E, t), 0.0);
      },
      band.E_min, band.E_max);
  CHECK(mass.value.real() ==
        doctest::Approx(finite_band::clocked_decay_rate(band, Delta_t) * t)
            .epsilon(1e-9));
  CHECK(finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, -1.0, t) == 0.0);
  CHECK(finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, 11.0, t) == 0.0);
}

TEST_CASE("a level below the band emits hugging the band's lower edge") {
  const auto band = BandProfile::make_flat(0.0, 10.0, -2.5, 0.02);
  const double Delta_t = 1.0, t = 0.5;
  const double at_edge =
      finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, 0.0, t);
  const double mid = finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, 5.0, t);
  const double far_edge =
      finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, 10.0, t);
  CHECK(at_edge > mid);
  CHECK(mid > far_edge);
}

TEST_CASE("clocked line matches the wide-band composite line in shape") {
  // Same resolution from both modules: hourglass dt = 0.1 vs band Delta_t.
  const double Delta_t = 0.1;
  const auto band = BandProfile::make_flat(-500.0, 500.0, 0.0, 0.02);
  const markovian::MarkovianAtom atom(0.0, 1.0);
  const hourglass::ClockParams clock(1.0, 100);  // spacing 0.1
  std::vector<double> p, q;
  double p_sum = 0.0, q_sum = 0.0;
  for (int j = -50; j <= 50; ++j) {
    const double E_r = j * 0.1 / Delta_t;
    p.push_back(
        finite_band::clocked_spectrum_nonmarkovian(band, Delta_t, E_r, 0.5));
    q.push_back(composite::clocked_spectrum(atom, clock, E_r));
    p_sum += p.back();
    q_sum += q.back();
  }
  double tv = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i)
    tv += std::fabs(p[i] / p_sum - q[i] / q_sum);
  CHECK(0.5 * tv < 1e-3);
}

TEST_CASE("first-order validity flag") {
  const double v = 1.0 / (2.0 * M_PI);  // golden-rule rate 1
  const auto band = BandProfile::make_flat(0.0, 10.0, 5.0, v);
  CHECK(finite_band::first_order_ok(band, 50.0, 0.0999));
  CHECK_FALSE(finite_band::first_order_ok(band, 50.0, 0.101));
}
