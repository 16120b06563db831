#pragma once

// Closed-form amplitudes and spectra of the wide-band decay model: a single
// excited level |e> at energy E_e coupled to a flat continuum of photon
// states |E_r>, with the coupling-density product held at rho*Omega^2 =
// Gamma/(2*pi).  Everything is unit-free (hbar = 1): energies and Gamma in
// one arbitrary unit, times in its inverse.

#include "decayclock/numerics.hpp"

namespace decayclock::markovian {

using numerics::Complex;

struct MarkovianAtom {
  double E_e;    // excited-state energy (ground state at 0)
  double Gamma;  // decay width, > 0

  MarkovianAtom(double excited_energy, double width)
      : E_e(excited_energy), Gamma(width) {
    if (!(Gamma > 0.0)) throw std::invalid_argument("MarkovianAtom: Gamma <= 0");
  }
  // Flat reservoir product rho * Omega^2 implied by the width.
  double rho_omega_sq() const { return Gamma / (2.0 * M_PI); }
};

// Amplitudes of the four first-order processes between the excited state and
// a reservoir state of energy E_r.  a_re is reported per unit Omega (the bare
// coupling is unphysical in the flat-band limit; observables only ever see
// rho*Omega^2).  a_er is exactly zero: an emitted photon is never reabsorbed.
struct ProcessAmplitudes {
  Complex a_ee;
  Complex a_re;  // per unit Omega
  Complex a_er;
  Complex a_rr;
};

ProcessAmplitudes process_amplitudes(const MarkovianAtom& atom, double E_r,
                                     double t);

// Steady-state photon energy distribution, normalized to integrate to 1 over
// the real line: (Gamma/2pi) / ((E_r - E_e)^2 + Gamma^2/4).
double lorentzian_spectrum(const MarkovianAtom& atom, double E_r);

// Final state of a first-order history: either the atom still excited or a
// photon of energy E_r.
struct FinalState {
  enum class Kind { excited, photon };
  Kind kind = Kind::excited;
  double E_r = 0.0;
  static FinalState excited() { return {Kind::excited, 0.0}; }
  static FinalState photon(double energy) { return {Kind::photon, energy}; }
};

// Amplitude density for reaching `final` at time t having left the excited
// state at time tau.  The photon channel is a smooth density in tau (per
// unit Omega, zero outside [0, t]).  The still-excited channel is singular:
// all of its weight sits at tau = t, and is returned as an explicit discrete
// weight rather than a numeric spike.
struct ConditionalAmplitude {
  Complex density{0.0, 0.0};     // smooth part, per unit Omega
  bool atom_still_excited = false;
  Complex weight_at_t{0.0, 0.0};  // discrete weight attached to tau = t
};

ConditionalAmplitude conditional_amplitude(const MarkovianAtom& atom,
                                           const FinalState& final, double t,
                                           double tau);

// Photon energy density observed if the measurement happens at finite time t
// (the emission line while the decay is still in progress).  Tends to the
// Lorentzian as t -> infinity; for detunings beyond 2*Gamma it is not
// monotone in t.
double transient_spectrum(const MarkovianAtom& atom, double E_r, double t);

// |a_ee|^2 + integral of the photon density over |E_r - E_e| <= width plus
// the analytic remainder of the two tails.  Equals 1 up to quadrature error;
// exposed so unitarity can be asserted to tight tolerance.
double unitarity_total(const MarkovianAtom& atom, double t,
                       double half_width_in_gamma = 200.0);

}  // namespace decayclock::markovian
