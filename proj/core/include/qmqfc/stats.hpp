#pragma once

#include <cstdint>
#include <string>

#include "qmqfc/event_sim.hpp"

namespace qmqfc {

enum class EstimateLabel { g2_cross, g2_auto_w, g2_auto_r, snr, R, vmax, eta_h };

std::string to_string(EstimateLabel label);

/// A figure of merit with its +-1 standard deviation.
struct CorrelationEstimate {
  enum Flag : unsigned {
    kNone = 0,
    kOneSided = 1u << 0,             ///< zero coincidences; sigma is an upper 1-sigma bound
    kInfinite = 1u << 1,             ///< noise probability was zero
    kNegative = 1u << 2,             ///< signal below noise; value clipped to 0
    kBellViolationPossible = 1u << 3 ///< visibility above 1/sqrt(2)
  };

  double value = 0.0;
  double sigma = 0.0;
  std::uint64_t n_trials = 0;
  EstimateLabel label = EstimateLabel::g2_cross;
  unsigned flags = kNone;

  bool has(Flag f) const { return (flags & f) != 0; }
};

/// g2_cw,r = p_cwr / (p_cw p_r) from raw counts with Poisson errors.
/// Throws UndefinedEstimate when either single count is zero.
CorrelationEstimate g2_cross(const TrialCounts& counts);

/// Same estimator from externally supplied probabilities; counts are inferred
/// as p * n_trials for the error propagation.
CorrelationEstimate g2_cross(double p_cwr, double p_cw, double p_r, std::uint64_t n_trials);

/// Unheralded autocorrelation p_AB / (p_A p_B) of one split arm.
CorrelationEstimate g2_auto(const SplitTallies& tallies, EstimateLabel label);

/// R = g2_cross^2 / (g2_auto_w g2_auto_r) with first-order error propagation.
CorrelationEstimate cauchy_schwarz_R(const CorrelationEstimate& g2_cross,
                                     const CorrelationEstimate& g2_auto_w,
                                     const CorrelationEstimate& g2_auto_r);

/// (R - 1) / sigma_R in standard deviations.
double violation_significance(const CorrelationEstimate& r);

/// SNR = (p_cw - p_N) / p_N from a signal run and a blocked-input run.
CorrelationEstimate snr_from_counts(std::uint64_t signal_clicks, std::uint64_t signal_trials,
                                    std::uint64_t noise_clicks, std::uint64_t noise_trials);

/// Probability form; with n_trials = 0 no error is propagated.
CorrelationEstimate snr_from_counts(double p_cw, double p_noise, std::uint64_t n_trials = 0);

/// V_max = (g2 - 1) / (g2 + 1); flags kBellViolationPossible above 1/sqrt(2).
CorrelationEstimate max_visibility(double g2);
CorrelationEstimate max_visibility(const CorrelationEstimate& g2);

/// eta_h_max = SNR / (SNR + 1).
CorrelationEstimate max_heralding_efficiency(double snr_value);
CorrelationEstimate max_heralding_efficiency(const CorrelationEstimate& snr_value);

}  // namespace qmqfc
