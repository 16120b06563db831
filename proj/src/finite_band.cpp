#include "decayclock/finite_band.hpp"

#include <cmath>

namespace decayclock::finite_band {

namespace {

constexpr Complex kI{0.0, 1.0};

void validate(const BandProfile& profile) {
  if (!(profile.E_max > profile.E_min))
    throw std::invalid_argument("BandProfile: E_max <= E_min");
  if (!profile.product)
    throw std::invalid_argument("BandProfile: missing coupling density");
}

// Integral of product(E) * weight(E) over the band by adaptive quadrature,
// with panels capped so a Gaussian weight narrower than the band is never
// stepped over.
double band_integral(const BandProfile& profile,
                     const std::function<double(double)>& weight,
                     double feature_scale) {
  numerics::QuadratureSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-15;
  spec.max_subdivisions = 50000;
  spec.max_panel_width = std::min(profile.width(), feature_scale);
  const auto result = numerics::integrate_complex(
      [&](double E) { return Complex(profile.product(E) * weight(E), 0.0); },
      profile.E_min, profile.E_max, spec);
  return result.value.real();
}

}  // namespace

BandProfile BandProfile::make_flat(double E_min, double E_max, double E_e,
                                   double product_value) {
  BandProfile profile;
  profile.E_min = E_min;
  profile.E_max = E_max;
  profile.E_e = E_e;
  profile.flat = true;
  profile.flat_value = product_value;
  profile.product = [product_value](double) { return product_value; };
  validate(profile);
  if (!(product_value > 0.0))
    throw std::invalid_argument("BandProfile: flat coupling density <= 0");
  return profile;
}

BandProfile BandProfile::make(double E_min, double E_max, double E_e,
                              std::function<double(double)> product) {
  BandProfile profile;
  profile.E_min = E_min;
  profile.E_max = E_max;
  profile.E_e = E_e;
  profile.flat = false;
  profile.product = std::move(product);
  validate(profile);
  return profile;
}

double BandProfile::fermi_rate() const {
  if (flat) return 2.0 * M_PI * flat_value;
  if (E_e < E_min || E_e > E_max) return 0.0;
  return 2.0 * M_PI * product(E_e);
}

ConditionalFirstOrder first_order_conditional_amplitude(
    const BandProfile& profile, double E, double t, double tau) {
  ConditionalFirstOrder out;
  out.in_band = (E >= profile.E_min && E <= profile.E_max);
  if (tau < 0.0 || tau > t) return out;
  // Free phase at E_e until tau, emission vertex, free phase at E after.
  out.density = -kI * std::exp(-kI * Complex(E, 0.0) * (t - tau)) *
                std::exp(-kI * Complex(profile.E_e, 0.0) * tau);
  return out;
}

double clocked_decay_rate(const BandProfile& profile, double Delta_t) {
  validate(profile);
  if (!(Delta_t > 0.0))
    throw std::invalid_argument("clocked_decay_rate: Delta_t <= 0");
  if (profile.flat) {
    const double s = Delta_t / std::sqrt(2.0);
    const double upper = numerics::erf((profile.E_max - profile.E_e) * s);
    const double lower = numerics::erf((profile.E_e - profile.E_min) * s);
    return 2.0 * M_PI * profile.flat_value * 0.5 * (upper + lower);
  }
  const double gauss_width = 1.0 / Delta_t;  // energy window the clock opens
  const double mass = band_integral(
      profile,
      [&](double E) {
        const double z = (E - profile.E_e) * Delta_t;
        return std::exp(-0.5 * z * z);
      },
      gauss_width);
  return std::sqrt(2.0 * M_PI) * Delta_t * mass;
}

double projective_decay_rate(const BandProfile& profile, double delta_t) {
  validate(profile);
  if (!(delta_t > 0.0))
    throw std::invalid_argument("projective_decay_rate: delta_t <= 0");
  if (profile.flat) return delta_t * profile.flat_value * profile.width();
  return delta_t * band_integral(profile, [](double) { return 1.0; },
                                 profile.width());
}

std::vector<double> rate_ratio_curve(const BandProfile& profile,
                                     const std::vector<double>& u_values) {
  const double reference = profile.fermi_rate();
  if (!(reference > 0.0))
    throw std::invalid_argument(
        "rate_ratio_curve: profile has no golden-rule rate to normalize by");
  std::vector<double> ratios;
  ratios.reserve(u_values.size());
  for (double u : u_values) {
    if (!(u > 0.0))
      throw std::invalid_argument("rate_ratio_curve: u <= 0");
    ratios.push_back(clocked_decay_rate(profile, u / profile.width()) /
                     reference);
  }
  return ratios;
}

ZenoTimes zeno_and_jump_time(const BandProfile& profile) {
  validate(profile);
  if (!profile.flat)
    throw std::invalid_argument(
        "zeno_and_jump_time: closed forms are only available for flat bands");
  ZenoTimes times{};
  times.tau_zeno = 1.0 / std::sqrt(profile.flat_value * profile.width());
  times.tau_jump = 2.0 * M_PI / profile.width();
  return times;
}

double clocked_probability(const BandProfile& profile, double Delta_t,
                           double E_r, long long n, double t) {
  if (!(Delta_t > 0.0))
    throw std::invalid_argument("clocked_probability: Delta_t <= 0");
  if (n < 1) return 0.0;
  const double t_n = std::sqrt(static_cast<double>(n)) * Delta_t;
  if (!(t_n > 0.0 && t_n < t)) return 0.0;
  const double z = (E_r - profile.E_e) * Delta_t;
  return M_PI * Delta_t * Delta_t /
         std::sqrt(2.0 * M_PI * static_cast<double>(n)) *
         std::exp(-0.5 * z * z);
}

double clocked_spectrum_nonmarkovian(const BandProfile& profile,
                                     double Delta_t, double E_r, double t) {
  validate(profile);
  if (!(Delta_t > 0.0))
    throw std::invalid_argument("clocked_spectrum_nonmarkovian: Delta_t <= 0");
  if (E_r < profile.E_min || E_r > profile.E_max) return 0.0;
  const double z = (E_r - profile.E_e) * Delta_t;
  return std::sqrt(2.0 * M_PI) * profile.product(E_r) * Delta_t *
         std::exp(-0.5 * z * z) * t;
}

bool first_order_ok(const BandProfile& profile, double Delta_t, double t) {
  return clocked_decay_rate(profile, Delta_t) * t <= 0.1;
}

}  // namespace decayclock::finite_band
