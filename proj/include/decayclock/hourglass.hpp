#pragma once

// A macroscopic clock made of N spin-1/2 "grains": each grain starts in the
// up state and precesses at angular frequency omega, and the clock is read by
// a joint measurement of how many grains have flipped.  A reading n maps to
// the elapsed time t_n = sqrt(n/N)/omega with spacing (resolution)
// Delta_t = 1/(omega sqrt(N)).  Valid as a clock while omega*t stays small.

#include <vector>

#include "decayclock/numerics.hpp"

namespace decayclock::hourglass {

using numerics::Complex;

struct ClockParams {
  double omega;  // grain precession frequency, > 0
  long long N;   // number of grains, > 0

  ClockParams(double omega_, long long N_) : omega(omega_), N(N_) {
    if (!(omega > 0.0)) throw std::invalid_argument("ClockParams: omega <= 0");
    if (N <= 0) throw std::invalid_argument("ClockParams: N <= 0");
  }
  // Time assigned to the reading "n grains flipped".
  double reading_time(long long n) const {
    if (n < 0 || n > N) throw std::invalid_argument("reading_time: n out of range");
    return std::sqrt(static_cast<double>(n) / static_cast<double>(N)) / omega;
  }
  // Spacing of adjacent reading times in the small-angle regime; doubles as
  // the clock's time resolution.
  double reading_spacing() const {
    return 1.0 / (omega * std::sqrt(static_cast<double>(N)));
  }
  // Expected number of flipped grains after running for time t.
  double mean_reading(double t) const {
    const double s = std::sin(omega * t);
    return static_cast<double>(N) * s * s;
  }
};

// The Gaussian reading amplitude is an approximation; these flags say whether
// its two assumptions hold.  They are advisory: out-of-regime calls still
// return the formula's value.
struct RegimeFlags {
  bool small_angle = false;  // omega * t < 0.3
  bool large_count = false;  // mean reading > 25
  bool ok() const { return small_angle && large_count; }
};

RegimeFlags gaussian_regime(const ClockParams& clock, double t);

// Exact amplitude of the reading n after running the clock for time t:
// (-i)^n sqrt( C(N,n) p^n (1-p)^(N-n) ), p = sin^2(omega t).  Evaluated in
// log space so it stays finite for N in the millions.
Complex binomial_amplitude(const ClockParams& clock, long long n, double t);

// Small-angle / large-N limit of the same amplitude:
// (-i)^n (2 pi n)^(-1/4) exp( -(t_n - t)^2 / Delta_t^2 ).  Requires n >= 1.
Complex gaussian_amplitude(const ClockParams& clock, long long n, double t);

// Time inferred from a single reading, with its resolution-limited error bar.
struct ReadingEstimate {
  double time;
  double uncertainty;
};

ReadingEstimate estimate_from_reading(const ClockParams& clock, long long n);

// Overlap between the clock states produced by running for tau and tau':
// exactly [cos(omega (tau - tau'))]^N, and in the Gaussian regime
// approximately exp( -(tau - tau')^2 / Delta_t^2 ).  Both are returned; their
// ratio tending to 1 is what makes Delta_t the clock's distinguishability
// scale.
struct OverlapResult {
  double exact;
  double asymptotic;
};

OverlapResult readings_overlap(const ClockParams& clock, double tau,
                               double tau_prime);

// A probability distribution over readings, P_n for n = n_first, n_first+1,
// ..., n_first + weights.size() - 1.
struct ReadingDistribution {
  long long n_first = 0;
  std::vector<double> weights;
};

double reading_mean(const ReadingDistribution& dist);
double reading_sigma(const ReadingDistribution& dist);

// --- von Neumann pointer readout -----------------------------------------
//
// The reading is transcribed onto a continuous pointer prepared in a Gaussian
// wave packet G(f) = C exp(-f^2 / Delta_f^2), C^2 = sqrt(2/pi)/Delta_f, and
// shifted by n.  Delta_f is the pointer's resolution: readings closer than
// Delta_f stay coherent, readings farther apart decohere.

// Overlap of the pointer states left by readings n and n' = n - k:
// exp( -k^2 / (2 Delta_f^2) ).
double pointer_kernel(double Delta_f, long long k);

// Probability that reading the pointer faithfully reproduces a projective
// reading measurement: F = sum_{n,n'} P_n P_n' exp(-(n-n')^2/(2 Delta_f^2)).
// F -> 1 for Delta_f -> 0 (sharp pointer) and -> sum P_n^2 contributions
// merging as the pointer blurs.  The double sum is banded: terms beyond
// |n - n'| > 12 Delta_f are below 1e-31 and are skipped.
double measurement_fidelity(const ReadingDistribution& dist, double Delta_f);

// Density of the final pointer position f: w(f) = sum_n P_n G^2(f - n).
// Normalized to 1 when the weights are.
double pointer_reading_density(const ReadingDistribution& dist, double Delta_f,
                               double f);

// Half-width at 1/e of the pointer density when the reading distribution is
// itself Gaussian with standard deviation sigma:
// sqrt( (Delta_f^2 + 4 sigma^2) / 2 ).
double pointer_width(double Delta_f, double sigma);

}  // namespace decayclock::hourglass
