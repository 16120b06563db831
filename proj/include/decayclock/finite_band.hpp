#pragma once

// First-order decay into a reservoir of finite bandwidth, where the clocked
// decay rate stops being a constant: watching the atom with time resolution
// Delta_t probes the coupling density over an energy window 1/Delta_t wide,
// so the observed rate interpolates between Zeno suppression (Delta_t -> 0)
// and the golden-rule value (Delta_t large), and can even exceed both when
// the level sits outside the band.

#include <functional>
#include <vector>

#include "decayclock/numerics.hpp"

namespace decayclock::finite_band {

using numerics::Complex;

// Reservoir band [E_min, E_max] with coupling density product(E) =
// rho(E) * Omega(E)^2, plus the excited level E_e (which may lie outside the
// band).  Flat bands carry their constant explicitly so the closed forms can
// be used.
struct BandProfile {
  double E_min = 0.0;
  double E_max = 0.0;
  double E_e = 0.0;
  std::function<double(double)> product;  // defined on [E_min, E_max]
  bool flat = false;
  double flat_value = 0.0;

  static BandProfile make_flat(double E_min, double E_max, double E_e,
                               double product_value);
  static BandProfile make(double E_min, double E_max, double E_e,
                          std::function<double(double)> product);

  double width() const { return E_max - E_min; }
  // Position of the level relative to the band bottom in units of the
  // half-width: 1 means dead center, negative means below the band.
  double level_position() const {
    return 2.0 * (E_e - E_min) / width();
  }
  // Golden-rule rate 2 pi rho Omega^2.  For a flat band this is defined by
  // the in-band constant even when E_e lies outside the band (it is the
  // natural normalization for rate ratios); otherwise by product(E_e).
  double fermi_rate() const;
};

// Amplitude density (per unit Omega) for having emitted into energy E at
// time tau and evolved freely since, with no depletion of the excited state
// (first order in the coupling).  in_band reports whether E can actually be
// emitted into.
struct ConditionalFirstOrder {
  Complex density{0.0, 0.0};
  bool in_band = false;
};

ConditionalFirstOrder first_order_conditional_amplitude(
    const BandProfile& profile, double E, double t, double tau);

// Decay rate seen through a clock of resolution Delta_t:
//   Gamma_{Delta_t} = sqrt(2 pi) Delta_t
//       * Int_band product(E) exp( -(E - E_e)^2 Delta_t^2 / 2 ) dE.
// Flat bands evaluate in closed form (a pair of error functions); general
// profiles by adaptive quadrature.
double clocked_decay_rate(const BandProfile& profile, double Delta_t);

// Rate under projective checks repeated every delta_t, in the Zeno regime:
//   Gamma_{delta_t} = delta_t * Int_band product(E) dE.
// Like the clocked rate this vanishes linearly as the resolution sharpens,
// but with a slope smaller by sqrt(2 pi).
double projective_decay_rate(const BandProfile& profile, double delta_t);

// Gamma_{Delta_t} / fermi_rate() sampled at the dimensionless resolutions
// u = width * Delta_t.  This is the whole story of the clocked rate in one
// curve: ~u near 0, ->1 (level inside the band) or ->0 (outside) as u grows.
std::vector<double> rate_ratio_curve(const BandProfile& profile,
                                     const std::vector<double>& u_values);

// The two time scales that bound the clocked regime for a flat band: the
// Zeno time tau_zeno = (product * width)^{-1/2} below which the rate is
// suppressed, and the jump time tau_jump = 2 pi / width above which the
// reservoir memory has died out and the decay looks Markovian.
struct ZenoTimes {
  double tau_zeno;
  double tau_jump;
  double ratio() const { return tau_zeno / tau_jump; }
};

// Closed forms exist only for flat bands; any other profile is rejected.
ZenoTimes zeno_and_jump_time(const BandProfile& profile);

// Joint probability (per unit Omega^2) of emitting a photon of energy E_r
// and finding the clock reading n, at first order:
//   pi Delta_t^2 (2 pi n)^{-1/2} exp( -(E_r - E_e)^2 Delta_t^2 / 2 ),
// for n >= 1 with reading time t_n = sqrt(n) Delta_t inside (0, t).
double clocked_probability(const BandProfile& profile, double Delta_t,
                           double E_r, long long n, double t);

// Emission-line density at time t as seen through the clock (coupling
// density folded in):
//   w(E_r) = sqrt(2 pi) product(E_r) Delta_t
//            * exp( -(E_r - E_e)^2 Delta_t^2 / 2 ) * t.
// Integrates over the band to Gamma_{Delta_t} * t, the total decayed mass.
double clocked_spectrum_nonmarkovian(const BandProfile& profile,
                                     double Delta_t, double E_r, double t);

// The first-order treatment ignores depletion, so it is trustworthy only
// while Gamma_{Delta_t} * t stays small; the threshold used is 0.1.
bool first_order_ok(const BandProfile& profile, double Delta_t, double t);

}  // namespace decayclock::finite_band
