/**
 * @file identification.hpp
 * @brief Grey-box fitting of contact parameters to measured force profiles.
 *
 * The objective is the force-domain RMS between a profile and the simulated
 * contact force at the profile timestamps, with time zero at contact onset.
 * Parameters are searched in log space: a Nelder-Mead simplex from four
 * starts, then Levenberg-Marquardt with central-difference Jacobians.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>

#include "impact/contact.hpp"
#include "impact/errors.hpp"
#include "impact/profile.hpp"

namespace impact {

/// Keeps the first run of samples strictly above `threshold`; timestamps are
/// preserved. Throws NoImpactFound if no sample exceeds it.
ForceProfile trim_first_impact(const ForceProfile& profile, double threshold);

/// Centred moving average of odd width (shrinking at the ends). Width 1 is
/// the identity.
ForceProfile smooth_profile(const ForceProfile& profile, int width);

struct FitOptions {
  int simplex_iterations = 300;
  /// Simplex diameter (log space) at which the search hands over.
  double simplex_tolerance = 1e-4;
  int refine_iterations = 100;
  /// Converged once the log-space step falls below this.
  double step_tolerance = 1e-9;
  /// FitDiverged when RMS exceeds this fraction of the peak force.
  double max_relative_rms = 0.25;
  /// Admissible parameter range (both k and c).
  double min_parameter = 1e-6;
  double max_parameter = 1e12;
  /// Moving-average width applied before fitting (1 = none).
  int smoothing_width = 1;
  SimulationSettings simulation{};
};

struct FitResult {
  ContactFamily family = ContactFamily::viscoelastic;
  double k = 0.0;
  double c = 0.0;
  double rms = 0.0;   ///< N
  double cor = 0.0;
  /// False when the fitted parameters imply a COR outside [0, 1].
  bool cor_in_range = true;
  int iterations = 0;
  double step_norm = 0.0;
  bool converged = false;
};

class FitDiverged : public NumericalError {
 public:
  FitDiverged(const std::string& what, FitResult best) : NumericalError(what), best_(best) {}
  const FitResult& best() const { return best_; }

 private:
  FitResult best_;
};

/// Fits k (N/m) and c (N s/m^2) of the viscoelastic law; cor = -(k/c)/v_pre.
FitResult fit_viscoelastic(const ForceProfile& profile, double m_star, double v_pre, const FitOptions& options = {});

/// Fits k (N/m) and c (N s/m) of the Maxwell element; cor is the simulated
/// detachment speed ratio.
FitResult fit_maxwell(const ForceProfile& profile, double m_star, double v_pre, const FitOptions& options = {});

FitResult fit_profile(ContactFamily family, const ForceProfile& profile, double m_star, double v_pre,
                      const FitOptions& options = {});

struct CorEstimate {
  double cor = 0.0;
  double impulse = 0.0;  ///< N s
  /// False when cor lies outside [0, 1]; the value itself is not clipped.
  bool in_range = true;
};

/// e_r = P / (m* |v_pre|) - 1 from the trapezoidal impulse of the profile.
CorEstimate cor_from_impulse(double impulse, double m_star, double v_pre);
CorEstimate estimate_cor_from_profile(const ForceProfile& profile, double m_star, double v_pre);

/// Simulated force on the uniform grid from t = 0 through the last sample
/// before detachment, optionally with multiplicative Gaussian noise of
/// relative standard deviation `noise`.
ForceProfile synthesize_profile(const ContactModel& model, double v_pre, double sample_rate_hz = 25000.0,
                                double noise = 0.0, std::mt19937_64* rng = nullptr, const std::string& label = "");

}  // namespace impact
