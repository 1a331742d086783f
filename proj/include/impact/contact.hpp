/**
 * @file contact.hpp
 * @brief Single-DOF normal impact m* x'' = f_n under three force laws.
 *
 * x is the (negative) compression of a virtual element at the contact point,
 * x(0) = 0 and x'(0) = v_pre < 0.
 *
 *   spring        f = -k x
 *   viscoelastic  f = c x x' - k x        k in N/m, c in N s/m^2
 *   maxwell       f' = -k x' - (k/c) f    series spring-dashpot, c in N s/m
 *
 * Events: compression end (x' = 0), peak force (f' = 0, first maximum) and
 * restitution end (first f = 0 crossing once compression has ended).
 */
#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "impact/errors.hpp"
#include "impact/profile.hpp"

namespace impact {

enum class ContactFamily { spring, maxwell, viscoelastic };

const char* to_string(ContactFamily family);
ContactFamily contact_family_from_string(const std::string& text);

struct ContactModel {
  ContactFamily family = ContactFamily::viscoelastic;
  double k = 1.0;
  double c = 1.0;
  double m_star = 1.0;

  /// Throws InvalidModel unless k, m_star > 0 and c > 0 (c is ignored by the
  /// spring family and may be zero there).
  void validate() const;

  /// pi sqrt(m*/k), the undamped contact duration.
  double half_period() const;
};

double force_spring(const ContactModel& model, double x);
double force_viscoelastic(const ContactModel& model, double x, double xdot);
/// Force rate of the Maxwell element.
double force_maxwell_step(const ContactModel& model, double x, double xdot, double f);

struct SimulationSettings {
  double output_rate_hz = 25000.0;
  /// NoDetachment after this many undamped half periods.
  double horizon_half_periods = 10.0;
  double rtol = 1e-11;
  /// Absolute tolerance relative to the natural scale of each state.
  double atol_scale = 1e-13;
  /// Event bracket width (s).
  double event_time_tol = 1e-12;
  /// Largest step as a fraction of the undamped half period.
  double max_step_fraction = 0.02;
  /// Accepted plus rejected steps before giving up with NumericalError.
  long max_steps = 200000;
};

struct ImpactState {
  double t = 0.0;
  double x = 0.0;
  double xdot = 0.0;
  double f = 0.0;
  double p = 0.0;
};

struct ImpactEvents {
  std::optional<ImpactState> compression_end;
  std::optional<ImpactState> peak_force;
  std::optional<ImpactState> restitution_end;
  /// Maxwell only: the force returned to zero before compression ended.
  bool force_lost_during_compression = false;
};

struct ImpactTrace {
  ContactModel model;
  double v_pre = 0.0;
  std::vector<double> t, x, xdot, f_n, p_n;
  /// Dissipation integrated alongside the motion; energy_trace reads it.
  std::vector<double> dissipated;
  /// Filled by energy_trace.
  std::vector<double> e_k, e_p, e_d, residual;
  ImpactEvents events;

  std::size_t size() const { return t.size(); }
  double initial_energy() const { return 0.5 * model.m_star * v_pre * v_pre; }
  double duration() const;
  double exit_velocity() const;
  /// -xdot(t_restitution_end) / v_pre.
  double cor() const;
  double peak_force() const;
  double max_energy_residual() const;
};

/// Integrates until restitution end, sampling on a uniform grid at
/// settings.output_rate_hz plus a final sample at the restitution-end event.
/// Throws NoDetachment if no detachment occurs within the horizon.
ImpactTrace simulate(const ContactModel& model, double v_pre, const SimulationSettings& settings = {});

/// Contact force at arbitrary sorted times; zero after detachment. Integrates
/// only up to the last requested time, so it never throws NoDetachment.
std::vector<double> sample_force(const ContactModel& model, double v_pre, std::span<const double> times,
                                 const SimulationSettings& settings = {});

/// Closed form -(k/c)/v_pre for the viscoelastic family (throws
/// SubcriticalVelocity when the result exceeds 1); simulated detachment speed
/// ratio for the other families.
double predicted_cor(const ContactModel& model, double v_pre, const SimulationSettings& settings = {});

/// Fills E_k, E_p, E_d and the balance residual |E_k + E_p + E_d - E_0|.
ImpactTrace energy_trace(ImpactTrace trace, const ContactModel& model);

struct SpringDeficiencyReport {
  bool inconsistent = false;
  double peak_time = 0.0;
  double peak_force = 0.0;
  double pre_peak_area = 0.0;
  double post_peak_area = 0.0;
  /// post / pre area, the COR an in-phase spring would need.
  double implied_cor = 0.0;
  /// Best symmetric half-sine centred at the peak.
  double spring_half_period = 0.0;
  double spring_fit_rms = 0.0;
};

/// An in-phase spring peaks when compression ends, so the area before the
/// peak is the compression impulse and the area after it is e_r times that.
/// Flags the profile when the implied e_r exceeds e_r_bound + tolerance.
SpringDeficiencyReport spring_deficiency_check(const ForceProfile& profile, double e_r_bound = 1.0,
                                               double tolerance = 0.05);

}  // namespace impact
