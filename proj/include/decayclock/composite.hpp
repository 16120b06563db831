#pragma once

// Joint dynamics of the decaying atom and the hourglass clock, in the two
// wirings that give the pair its meaning:
//
//  * running clock  - the clock advances only while the atom is excited, so
//    its final reading records the moment of decay;
//  * waiting clock  - the clock starts at the emission, so its final reading
//    records how long ago the decay happened.
//
// Photon-channel amplitudes are per unit Omega and joint probabilities per
// unit Omega^2, matching the conventions of the bare-atom module; physical
// numbers appear once the flat reservoir density rho = Gamma/(2 pi Omega^2)
// is folded in, which the distribution-level routines below already do.

#include <vector>

#include "decayclock/hourglass.hpp"
#include "decayclock/markovian.hpp"

namespace decayclock::composite {

using hourglass::ClockParams;
using markovian::FinalState;
using markovian::MarkovianAtom;
using numerics::Complex;

// Amplitude of finding `final` together with clock reading n at time t, for
// the running clock.  The still-excited branch is the exact product of the
// survival amplitude and the exact (binomial) clock amplitude; the photon
// branch folds the Gaussian clock amplitude into the emission history by
// quadrature over the decay moment, restricted to the +-8 Delta_t window
// where the reading-n packet has support.
Complex running_amplitude(const MarkovianAtom& atom, const ClockParams& clock,
                          const FinalState& final, long long n, double t);

// Same joint amplitude for the waiting clock.  Still excited: the clock never
// started, so the amplitude is diagonal on reading 0.  Photon: the clock runs
// for the time elapsed since emission.
Complex waiting_amplitude(const MarkovianAtom& atom, const ClockParams& clock,
                          const FinalState& final, long long n, double t);

// Joint density of photon energy and running-clock reading (per unit
// Omega^2), in the regime where the reading packet is far from both ends of
// [0, t]:
//   (pi / (omega sqrt(n N))) e^{-Gamma t_n}
//     * (Delta_t / sqrt(2 pi)) e^{-(E_r - E_e)^2 Delta_t^2 / 2}.
// Zero unless 0 < t_n < t.  The second factor is the clocked emission line:
// a Gaussian of energy width 1/Delta_t replacing the Lorentzian, the
// time-energy cost of knowing when the decay happened.
double prob_energy_and_reading(const MarkovianAtom& atom,
                               const ClockParams& clock, double E_r,
                               long long n, double t);

// The clocked emission line by itself, normalized to integrate to 1 over E_r.
double clocked_spectrum(const MarkovianAtom& atom, const ClockParams& clock,
                        double E_r);

// Probabilities of the decay-channel readings n = n_first .. n_first +
// weights.size() - 1, together with the mass e^{-Gamma t} left in the
// still-excited branch (whose reading sits elsewhere: near the mean reading
// for the running clock, at 0 for the waiting clock).
struct ReadingTable {
  long long n_first = 1;
  std::vector<double> weights;
  double survival = 0.0;

  double decayed_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

// Running-clock reading distribution in closed form:
//   P(n) = Gamma e^{-Gamma t_n} / (2 omega sqrt(n N)),   0 < t_n < t,
// i.e. the exponential waiting-time density sampled at the reading times and
// weighted by their spacing.  decayed_mass() tends to 1 - e^{-Gamma t} as the
// clock resolves the decay ever more finely.
ReadingTable reading_distribution(const MarkovianAtom& atom,
                                  const ClockParams& clock, double t);

// Waiting-clock reading distribution,
//   P(n) = Gamma (2 pi n)^{-1/2}
//          * Int_0^t e^{-2 (t_n - tau)^2 / Delta_t^2} e^{-Gamma (t - tau)} dtau,
// with tau the time since emission.  Computed by adaptive quadrature over the
// +-8 Delta_t support window of each reading.
ReadingTable waiting_reading_distribution(const MarkovianAtom& atom,
                                          const ClockParams& clock, double t);

// Survival mass plus the quadrature-level running-clock reading masses
//   Gamma (2 pi n)^{-1/2} Int_0^t e^{-2 (t_n - tau)^2 / Delta_t^2} e^{-Gamma tau} dtau
// summed over n >= 1.  Equals 1 up to the Gaussian-regime error of the clock
// amplitudes, so it measures how much probability the approximation leaks.
double conservation_total(const MarkovianAtom& atom, const ClockParams& clock,
                          double t);

}  // namespace decayclock::composite
