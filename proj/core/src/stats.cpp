#include "qmqfc/stats.hpp"

#include <cmath>
#include <limits>

#include "qmqfc/errors.hpp"

namespace qmqfc {

namespace {

// 84.13 % one-sided upper limit on a Poisson mean after observing zero events.
constexpr double kZeroCountUpperLimit = 1.841;

double relative_variance(double count) { return count > 0.0 ? 1.0 / count : 0.0; }

CorrelationEstimate ratio_estimate(double coincidences, double single_a, double single_b,
                                   double n, std::uint64_t n_trials, EstimateLabel label) {
  if (!(single_a > 0.0) || !(single_b > 0.0)) {
    throw UndefinedEstimate(to_string(label) + ": zero singles, correlation undefined");
  }
  CorrelationEstimate est;
  est.label = label;
  est.n_trials = n_trials;
  const double scale = n / (single_a * single_b);
  if (coincidences > 0.0) {
    est.value = coincidences * scale;
    est.sigma = est.value * std::sqrt(relative_variance(coincidences) +
                                      relative_variance(single_a) +
                                      relative_variance(single_b));
  } else {
    est.value = 0.0;
    est.sigma = kZeroCountUpperLimit * scale;
    est.flags |= CorrelationEstimate::kOneSided;
  }
  return est;
}

}  // namespace

std::string to_string(EstimateLabel label) {
  switch (label) {
    case EstimateLabel::g2_cross:
      return "g2_cross";
    case EstimateLabel::g2_auto_w:
      return "g2_auto_w";
    case EstimateLabel::g2_auto_r:
      return "g2_auto_r";
    case EstimateLabel::snr:
      return "snr";
    case EstimateLabel::R:
      return "R";
    case EstimateLabel::vmax:
      return "vmax";
    case EstimateLabel::eta_h:
      return "eta_h";
  }
  return "unknown";
}

CorrelationEstimate g2_cross(const TrialCounts& counts) {
  return ratio_estimate(static_cast<double>(counts.coincidences_wr),
                        static_cast<double>(counts.clicks_w), static_cast<double>(counts.clicks_r),
                        static_cast<double>(counts.n_trials), counts.n_trials,
                        EstimateLabel::g2_cross);
}

CorrelationEstimate g2_cross(double p_cwr, double p_cw, double p_r, std::uint64_t n_trials) {
  if (n_trials == 0) throw DomainError("g2_cross needs n_trials >= 1");
  if (!(p_cwr >= 0.0)) throw DomainError("coincidence probability must be non-negative");
  const double n = static_cast<double>(n_trials);
  return ratio_estimate(p_cwr * n, p_cw * n, p_r * n, n, n_trials, EstimateLabel::g2_cross);
}

CorrelationEstimate g2_auto(const SplitTallies& tallies, EstimateLabel label) {
  return ratio_estimate(static_cast<double>(tallies.coincidences_ab),
                        static_cast<double>(tallies.clicks_a), static_cast<double>(tallies.clicks_b),
                        static_cast<double>(tallies.n_trials), tallies.n_trials, label);
}

CorrelationEstimate cauchy_schwarz_R(const CorrelationEstimate& x, const CorrelationEstimate& a,
                                     const CorrelationEstimate& b) {
  if (!(a.value > 0.0) || !(b.value > 0.0)) {
    throw DomainError("Cauchy-Schwarz parameter needs positive autocorrelations");
  }
  CorrelationEstimate r;
  r.label = EstimateLabel::R;
  r.n_trials = x.n_trials;
  r.value = x.value * x.value / (a.value * b.value);
  if (x.value > 0.0) {
    const double rx = 2.0 * x.sigma / x.value;
    const double ra = a.sigma / a.value;
    const double rb = b.sigma / b.value;
    r.sigma = r.value * std::sqrt(rx * rx + ra * ra + rb * rb);
  } else {
    // dR/dx vanishes at x = 0; second order gives sigma_x^2 / (a b).
    r.sigma = x.sigma * x.sigma / (a.value * b.value);
    r.flags |= CorrelationEstimate::kOneSided;
  }
  return r;
}

double violation_significance(const CorrelationEstimate& r) {
  if (!(r.sigma > 0.0)) throw DomainError("significance needs sigma > 0");
  return (r.value - 1.0) / r.sigma;
}

CorrelationEstimate snr_from_counts(std::uint64_t signal_clicks, std::uint64_t signal_trials,
                                    std::uint64_t noise_clicks, std::uint64_t noise_trials) {
  if (signal_trials == 0 || noise_trials == 0) throw DomainError("SNR needs trials in both runs");
  const double p_cw = static_cast<double>(signal_clicks) / static_cast<double>(signal_trials);
  const double p_n = static_cast<double>(noise_clicks) / static_cast<double>(noise_trials);
  CorrelationEstimate est = snr_from_counts(p_cw, p_n);
  est.n_trials = signal_trials;
  if (noise_clicks > 0 && signal_clicks > 0) {
    // SNR + 1 = p_cw / p_N, so sigma_SNR = (p_cw / p_N) sqrt(1/C_cw + 1/C_N).
    est.sigma = (p_cw / p_n) * std::sqrt(1.0 / static_cast<double>(signal_clicks) +
                                         1.0 / static_cast<double>(noise_clicks));
  }
  return est;
}

CorrelationEstimate snr_from_counts(double p_cw, double p_noise, std::uint64_t n_trials) {
  if (!(p_cw >= 0.0 && p_cw <= 1.0) || !(p_noise >= 0.0 && p_noise <= 1.0)) {
    throw DomainError("SNR inputs must be probabilities");
  }
  CorrelationEstimate est;
  est.label = EstimateLabel::snr;
  est.n_trials = n_trials;
  if (p_noise == 0.0) {
    est.value = std::numeric_limits<double>::infinity();
    est.flags |= CorrelationEstimate::kInfinite;
    return est;
  }
  const double raw = (p_cw - p_noise) / p_noise;
  if (raw < 0.0) {
    est.flags |= CorrelationEstimate::kNegative;
  }
  est.value = raw < 0.0 ? 0.0 : raw;
  if (n_trials > 0) {
    const double n = static_cast<double>(n_trials);
    const double c_cw = p_cw * n;
    const double c_n = p_noise * n;
    if (c_cw > 0.0) est.sigma = (p_cw / p_noise) * std::sqrt(1.0 / c_cw + 1.0 / c_n);
  }
  return est;
}

CorrelationEstimate max_visibility(double g2) {
  CorrelationEstimate g;
  g.value = g2;
  return max_visibility(g);
}

CorrelationEstimate max_visibility(const CorrelationEstimate& g2) {
  if (!(g2.value >= 1.0)) throw DomainError("visibility bound needs g2 >= 1");
  CorrelationEstimate v;
  v.label = EstimateLabel::vmax;
  v.n_trials = g2.n_trials;
  v.value = (g2.value - 1.0) / (g2.value + 1.0);
  const double d = 2.0 / ((g2.value + 1.0) * (g2.value + 1.0));
  v.sigma = d * g2.sigma;
  if (v.value > 1.0 / std::sqrt(2.0)) v.flags |= CorrelationEstimate::kBellViolationPossible;
  return v;
}

CorrelationEstimate max_heralding_efficiency(double snr_value) {
  CorrelationEstimate s;
  s.value = snr_value;
  return max_heralding_efficiency(s);
}

CorrelationEstimate max_heralding_efficiency(const CorrelationEstimate& snr_value) {
  if (!(snr_value.value >= 0.0)) throw DomainError("heralding bound needs SNR >= 0");
  CorrelationEstimate h;
  h.label = EstimateLabel::eta_h;
  h.n_trials = snr_value.n_trials;
  if (std::isinf(snr_value.value)) {
    h.value = 1.0;
    return h;
  }
  const double denom = snr_value.value + 1.0;
  h.value = snr_value.value / denom;
  h.sigma = snr_value.sigma / (denom * denom);
  return h;
}

}  // namespace qmqfc
