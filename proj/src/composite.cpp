#include "decayclock/composite.hpp"

#include <cmath>

namespace decayclock::composite {

namespace {

constexpr Complex kI{0.0, 1.0};

struct Window {
  double lo;
  double hi;
  bool empty() const { return !(lo < hi); }
};

// Support of the reading-n Gaussian packet, clipped to the physical range
// [0, t] of the decay moment.  Beyond 8 spacings the packet is < 1e-27 of
// its peak.
Window packet_window(const ClockParams& clock, long long n, double t) {
  const double t_n = clock.reading_time(n);
  const double dt = clock.reading_spacing();
  return {std::max(0.0, t_n - 8.0 * dt), std::min(t, t_n + 8.0 * dt)};
}

numerics::QuadratureSpec packet_spec(const ClockParams& clock,
                                     double oscillation_freq) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-9;
  spec.abs_tol = 1e-13;
  spec.max_subdivisions = 20000;
  double cap = clock.reading_spacing();
  if (oscillation_freq > 0.0)
    cap = std::min(cap, M_PI / (2.0 * oscillation_freq));
  spec.max_panel_width = cap;
  return spec;
}

// Largest reading whose packet (center within `slack` of the range) can
// still be populated by time t.
long long last_reachable_reading(const ClockParams& clock, double t,
                                 double slack) {
  const double x = clock.omega * (t + slack);
  const double bound = static_cast<double>(clock.N) * x * x;
  if (bound <= 0.0) return 0;
  auto n = static_cast<long long>(std::floor(bound));
  return std::min(n, clock.N);
}

// Int over the packet window of e^{-2 (t_n - tau)^2 / Delta_t^2} times the
// survival weight e^{-Gamma tau} (running clock) or e^{-Gamma (t - tau)}
// (waiting clock), scaled by Gamma (2 pi n)^{-1/2}.
double reading_mass(const MarkovianAtom& atom, const ClockParams& clock,
                    long long n, double t, bool waiting) {
  const Window win = packet_window(clock, n, t);
  if (win.empty()) return 0.0;
  const double t_n = clock.reading_time(n);
  const double dt = clock.reading_spacing();
  const double norm = atom.Gamma / std::sqrt(2.0 * M_PI * static_cast<double>(n));
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-16;
  spec.max_subdivisions = 10000;
  spec.max_panel_width = dt;
  const auto result = numerics::integrate_complex(
      [&](double tau) {
        const double z = (t_n - tau) / dt;
        const double decay = waiting ? (t - tau) : tau;
        return Complex(std::exp(-2.0 * z * z - atom.Gamma * decay), 0.0);
      },
      win.lo, win.hi, spec);
  return norm * result.value.real();
}

}  // namespace

Complex running_amplitude(const MarkovianAtom& atom, const ClockParams& clock,
                          const FinalState& final, long long n, double t) {
  const Complex pole = atom.E_e - kI * (atom.Gamma / 2.0);
  if (final.kind == FinalState::Kind::excited) {
    // No decay: survival phase times the exact clock amplitude for a full
    // undisturbed run of length t.
    return std::exp(-kI * pole * t) * hourglass::binomial_amplitude(clock, n, t);
  }
  if (n < 1)
    throw std::domain_error("running_amplitude: photon branch requires n >= 1");
  if (n > clock.N) return {0.0, 0.0};
  const Window win = packet_window(clock, n, t);
  if (win.empty()) return {0.0, 0.0};
  const auto spec = packet_spec(clock, std::fabs(final.E_r - atom.E_e));
  // Survive and run the clock until tau, emit, then free photon flight.
  const auto result = numerics::integrate_complex(
      [&](double tau) {
        return hourglass::gaussian_amplitude(clock, n, tau) * (-kI) *
               std::exp(-kI * Complex(final.E_r, 0.0) * (t - tau)) *
               std::exp(-kI * pole * tau);
      },
      win.lo, win.hi, spec);
  return result.value;
}

Complex waiting_amplitude(const MarkovianAtom& atom, const ClockParams& clock,
                          const FinalState& final, long long n, double t) {
  const Complex pole = atom.E_e - kI * (atom.Gamma / 2.0);
  if (final.kind == FinalState::Kind::excited) {
    // The clock only starts at emission, so "still excited" pins reading 0.
    if (n != 0) return {0.0, 0.0};
    return std::exp(-kI * pole * t);
  }
  if (n < 1)
    throw std::domain_error("waiting_amplitude: photon branch requires n >= 1");
  if (n > clock.N) return {0.0, 0.0};
  const Window win = packet_window(clock, n, t);
  if (win.empty()) return {0.0, 0.0};
  const auto spec = packet_spec(clock, std::fabs(final.E_r - atom.E_e));
  // tau is the time since emission: the atom survived for t - tau, and the
  // clock has been running (and the photon flying) for tau.
  const auto result = numerics::integrate_complex(
      [&](double tau) {
        return (-kI) * hourglass::gaussian_amplitude(clock, n, tau) *
               std::exp(-kI * Complex(final.E_r, 0.0) * tau) *
               std::exp(-kI * pole * (t - tau));
      },
      win.lo, win.hi, spec);
  return result.value;
}

double prob_energy_and_reading(const MarkovianAtom& atom,
                               const ClockParams& clock, double E_r,
                               long long n, double t) {
  if (n < 1 || n > clock.N) return 0.0;
  const double t_n = clock.reading_time(n);
  if (!(t_n > 0.0 && t_n < t)) return 0.0;
  const double timing = M_PI /
                        (clock.omega * std::sqrt(static_cast<double>(n) *
                                                 static_cast<double>(clock.N))) *
                        std::exp(-atom.Gamma * t_n);
  return timing * clocked_spectrum(atom, clock, E_r);
}

double clocked_spectrum(const MarkovianAtom& atom, const ClockParams& clock,
                        double E_r) {
  const double dt = clock.reading_spacing();
  const double d = (E_r - atom.E_e) * dt;
  return dt / std::sqrt(2.0 * M_PI) * std::exp(-0.5 * d * d);
}

ReadingTable reading_distribution(const MarkovianAtom& atom,
                                  const ClockParams& clock, double t) {
  ReadingTable table;
  table.n_first = 1;
  table.survival = std::exp(-atom.Gamma * t);
  if (!(t > 0.0)) return table;
  // Readings with 0 < t_n < t strictly; t_n = t itself carries no decay mass.
  const double x = clock.omega * t;
  const double bound = static_cast<double>(clock.N) * x * x;
  long long n_max = static_cast<long long>(std::ceil(bound)) - 1;
  n_max = std::min(n_max, clock.N);
  if (n_max < 1) return table;
  table.weights.reserve(static_cast<std::size_t>(n_max));
  for (long long n = 1; n <= n_max; ++n) {
    const double t_n = clock.reading_time(n);
    const double w = atom.Gamma * std::exp(-atom.Gamma * t_n) /
                     (2.0 * clock.omega *
                      std::sqrt(static_cast<double>(n) * static_cast<double>(clock.N)));
    table.weights.push_back(w);
  }
  return table;
}

ReadingTable waiting_reading_distribution(const MarkovianAtom& atom,
                                          const ClockParams& clock, double t) {
  ReadingTable table;
  table.n_first = 1;
  table.survival = std::exp(-atom.Gamma * t);
  if (!(t > 0.0)) return table;
  const long long n_max =
      last_reachable_reading(clock, t, 8.0 * clock.reading_spacing());
  table.weights.reserve(static_cast<std::size_t>(std::max<long long>(n_max, 0)));
  for (long long n = 1; n <= n_max; ++n)
    table.weights.push_back(reading_mass(atom, clock, n, t, /*waiting=*/true));
  return table;
}

double conservation_total(const MarkovianAtom& atom, const ClockParams& clock,
                          double t) {
  double total = std::exp(-atom.Gamma * t);
  if (!(t > 0.0)) return total;
  const long long n_max =
      last_reachable_reading(clock, t, 8.0 * clock.reading_spacing());
  for (long long n = 1; n <= n_max; ++n)
    total += reading_mass(atom, clock, n, t, /*waiting=*/false);
  return total;
}

}  // namespace decayclock::composite
