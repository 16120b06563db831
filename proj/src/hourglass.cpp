#include "decayclock/hourglass.hpp"

#include <cmath>

namespace decayclock::hourglass {

namespace {

// (-i)^n
Complex minus_i_pow(long long n) {
  switch (((n % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

}  // namespace

RegimeFlags gaussian_regime(const ClockParams& clock, double t) {
  RegimeFlags flags;
  flags.small_angle = clock.omega * t < 0.3;
  flags.large_count = clock.mean_reading(t) > 25.0;
  return flags;
}

Complex binomial_amplitude(const ClockParams& clock, long long n, double t) {
  if (n < 0 || n > clock.N) return {0.0, 0.0};
  const double c = std::cos(clock.omega * t);
  const double s = std::sin(clock.omega * t);
  const double p = s * s;
  if (p == 0.0) return n == 0 ? Complex(1.0, 0.0) : Complex(0.0, 0.0);
  if (c == 0.0) return n == clock.N ? minus_i_pow(n) : Complex(0.0, 0.0);
  // log of the magnitude; ln(1-p) is taken as 2 ln|cos| so nothing cancels
  // when p is close to 1.
  const double log_mag =
      0.5 * (numerics::log_binomial(clock.N, n) + static_cast<double>(n) * std::log(p) +
             static_cast<double>(clock.N - n) * 2.0 * std::log(std::fabs(c)));
  return minus_i_pow(n) * std::exp(log_mag);
}

Complex gaussian_amplitude(const ClockParams& clock, long long n, double t) {
  if (n < 1)
    throw std::domain_error("gaussian_amplitude: requires n >= 1");
  const double t_n = clock.reading_time(n);
  const double dt = clock.reading_spacing();
  const double z = (t_n - t) / dt;
  const double mag =
      std::pow(2.0 * M_PI * static_cast<double>(n), -0.25) * std::exp(-z * z);
  return minus_i_pow(n) * mag;
}

ReadingEstimate estimate_from_reading(const ClockParams& clock, long long n) {
  return {clock.reading_time(n), clock.reading_spacing()};
}

OverlapResult readings_overlap(const ClockParams& clock, double tau,
                               double tau_prime) {
  const double delta = tau - tau_prime;
  const double c = std::cos(clock.omega * delta);
  OverlapResult out{};
  if (c == 0.0) {
    out.exact = 0.0;
  } else {
    // cos^N through logs; keep the sign for odd N.
    const double mag = std::exp(static_cast<double>(clock.N) * std::log(std::fabs(c)));
    out.exact = (c < 0.0 && (clock.N % 2 != 0)) ? -mag : mag;
  }
  const double dt = clock.reading_spacing();
  out.asymptotic = std::exp(-(delta * delta) / (dt * dt));
  return out;
}

double reading_mean(const ReadingDistribution& dist) {
  double total = 0.0, first = 0.0;
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    const double n = static_cast<double>(dist.n_first) + static_cast<double>(i);
    total += dist.weights[i];
    first += dist.weights[i] * n;
  }
  if (total <= 0.0) throw std::invalid_argument("reading_mean: empty distribution");
  return first / total;
}

double reading_sigma(const ReadingDistribution& dist) {
  const double mu = reading_mean(dist);
  double total = 0.0, second = 0.0;
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    const double n = static_cast<double>(dist.n_first) + static_cast<double>(i);
    total += dist.weights[i];
    second += dist.weights[i] * (n - mu) * (n - mu);
  }
  return std::sqrt(second / total);
}

double pointer_kernel(double Delta_f, long long k) {
  if (!(Delta_f > 0.0)) throw std::invalid_argument("pointer_kernel: Delta_f <= 0");
  const double x = static_cast<double>(k) / Delta_f;
  return std::exp(-0.5 * x * x);
}

double measurement_fidelity(const ReadingDistribution& dist, double Delta_f) {
  if (!(Delta_f > 0.0))
    throw std::invalid_argument("measurement_fidelity: Delta_f <= 0");
  const auto& P = dist.weights;
  const std::size_t n = P.size();
  if (n == 0) throw std::invalid_argument("measurement_fidelity: empty distribution");
  double fidelity = 0.0;
  for (double w : P) fidelity += w * w;
  const auto band = static_cast<std::size_t>(std::ceil(12.0 * Delta_f));
  const std::size_t k_max = std::min(band, n - 1);
  for (std::size_t k = 1; k <= k_max; ++k) {
    double cross = 0.0;
    for (std::size_t i = 0; i + k < n; ++i) cross += P[i] * P[i + k];
    fidelity += 2.0 * pointer_kernel(Delta_f, static_cast<long long>(k)) * cross;
  }
  return fidelity;
}

double pointer_reading_density(const ReadingDistribution& dist, double Delta_f,
                               double f) {
  if (!(Delta_f > 0.0))
    throw std::invalid_argument("pointer_reading_density: Delta_f <= 0");
  const double c_sq = std::sqrt(2.0 / M_PI) / Delta_f;
  double density = 0.0;
  for (std::size_t i = 0; i < dist.weights.size(); ++i) {
    const double n = static_cast<double>(dist.n_first) + static_cast<double>(i);
    const double z = (f - n) / Delta_f;
    const double expo = -2.0 * z * z;
    if (expo < -700.0) continue;
    density += dist.weights[i] * c_sq * std::exp(expo);
  }
  return density;
}

double pointer_width(double Delta_f, double sigma) {
  return std::sqrt((Delta_f * Delta_f + 4.0 * sigma * sigma) / 2.0);
}

}  // namespace decayclock::hourglass
