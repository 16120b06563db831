#include "decayclock/markovian.hpp"

#include <cmath>

namespace decayclock::markovian {

namespace {
constexpr Complex kI{0.0, 1.0};
}

ProcessAmplitudes process_amplitudes(const MarkovianAtom& atom, double E_r,
                                     double t) {
  ProcessAmplitudes out;
  // Survival amplitude: free phase times exponential envelope.
  const Complex pole = atom.E_e - kI * (atom.Gamma / 2.0);
  out.a_ee = std::exp(-kI * pole * t);

  // Emission amplitude per unit Omega.  The textbook two-pole form
  //   -Omega (e^{-iE_r t} - e^{-i(E_e - iGamma/2)t}) / (E_r - E_e + iGamma/2)
  // loses precision when the denominator is small, so evaluate it as
  //   -i Omega t e^{-iE_r t} * expm1_over(i(E_r - E_e + iGamma/2) t),
  // which is exact for all detunings and regular at the pole.
  const Complex w = kI * (Complex(E_r, 0.0) - pole) * t;
  out.a_re = -kI * t * std::exp(-kI * Complex(E_r, 0.0) * t) *
             numerics::expm1_over(w);

  out.a_er = Complex(0.0, 0.0);  // no re-absorption at this order
  out.a_rr = std::exp(-kI * Complex(E_r, 0.0) * t);
  return out;
}

double lorentzian_spectrum(const MarkovianAtom& atom, double E_r) {
  const double d = E_r - atom.E_e;
  const double hw = atom.Gamma / 2.0;
  return (atom.Gamma / (2.0 * M_PI)) / (d * d + hw * hw);
}

ConditionalAmplitude conditional_amplitude(const MarkovianAtom& atom,
                                           const FinalState& final, double t,
                                           double tau) {
  ConditionalAmplitude out;
  const Complex pole = atom.E_e - kI * (atom.Gamma / 2.0);
  if (final.kind == FinalState::Kind::excited) {
    // The atom never left: the whole amplitude sits at tau = t.
    out.atom_still_excited = true;
    out.weight_at_t = std::exp(-kI * pole * t);
    out.density = Complex(0.0, 0.0);
    return out;
  }
  if (tau < 0.0 || tau > t) return out;  // emission must happen inside [0, t]
  // Survive until tau, emit, then free photon propagation for t - tau.
  out.density = -kI * std::exp(-kI * Complex(final.E_r, 0.0) * (t - tau)) *
                std::exp(-kI * pole * tau);
  return out;
}

double transient_spectrum(const MarkovianAtom& atom, double E_r, double t) {
  const ProcessAmplitudes amps = process_amplitudes(atom, E_r, t);
  return atom.rho_omega_sq() * std::norm(amps.a_re);
}

double unitarity_total(const MarkovianAtom& atom, double t,
                       double half_width_in_gamma) {
  const double G = atom.Gamma;
  const double W = half_width_in_gamma * G;
  const double survive = std::exp(-G * t);

  // Photon mass inside |E_r - E_e| <= W by adaptive quadrature.  Panels are
  // capped at half an oscillation period of e^{iE_r t} so the rule always
  // resolves the integrand's fastest scale.
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-11;
  spec.abs_tol = 1e-14;
  spec.max_subdivisions = 200000;
  if (t > 0.0) spec.max_panel_width = M_PI / (2.0 * t);
  const auto body = numerics::integrate_complex(
      [&](double E_r) {
        return Complex(transient_spectrum(atom, E_r, t), 0.0);
      },
      atom.E_e - W, atom.E_e + W, spec);

  // Tail of the photon mass beyond the window, integrated in closed form.
  // With x = E_r - E_e, the density is
  //   (G/2pi) |e^{-ixt - Gt/2} - 1|^2 / (x^2 + G^2/4)
  //     = (G/2pi) [ (1 + e^{-Gt}) - 2 e^{-Gt/2} cos(xt) ] / (x^2 + G^2/4).
  // The non-oscillatory piece integrates to arctan; the cosine piece is
  // expanded for x >> G/2 as cos(xt)/x^2 (1 - G^2/(4x^2) + ...) and
  // integrated by parts twice, keeping terms through 1/(W^3 t^2).  For
  // W = 200 Gamma and Gamma t = O(1) the truncation is below 1e-12.
  const double flat_tail = (2.0 / M_PI) * (1.0 + survive) *
                           (M_PI / 2.0 - std::atan2(2.0 * W, G));
  const double Wt = W * t;
  double osc_tail = 0.0;
  if (t > 0.0) {
    osc_tail = -(2.0 * G / M_PI) * std::exp(-G * t / 2.0) *
               (-std::sin(Wt) / (W * W * t) +
                2.0 * std::cos(Wt) / (W * W * W * t * t));
  }

  return survive + body.value.real() + flat_tail + osc_tail;
}

}  // namespace decayclock::markovian
