#include "impact/contact.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>

#include "impact/detail/dopri.hpp"

namespace impact {

namespace {

// [x, xdot, f (maxwell element force), p, dissipated energy]
using State = Eigen::Matrix<double, 5, 1>;

struct Dynamics {
  ContactModel model;

  double force(const State& y) const {
    switch (model.family) {
      case ContactFamily::spring:
        return force_spring(model, y(0));
      case ContactFamily::viscoelastic:
        return force_viscoelastic(model, y(0), y(1));
      case ContactFamily::maxwell:
        return y(2);
    }
    return 0.0;
  }

  double force_rate(const State& y) const {
    const double x = y(0);
    const double v = y(1);
    switch (model.family) {
      case ContactFamily::spring:
        return -model.k * v;
      case ContactFamily::viscoelastic: {
        const double a = force(y) / model.m_star;
        return model.c * (v * v + x * a) - model.k * v;
      }
      case ContactFamily::maxwell:
        return force_maxwell_step(model, x, v, y(2));
    }
    return 0.0;
  }

  State operator()(double /*t*/, const State& y) const {
    const double f = force(y);
    State d;
    d(0) = y(1);
    d(1) = f / model.m_star;
    d(2) = model.family == ContactFamily::maxwell ? force_rate(y) : 0.0;
    d(3) = f;
    switch (model.family) {
      case ContactFamily::spring:
        d(4) = 0.0;
        break;
      case ContactFamily::viscoelastic:
        d(4) = -model.c * y(0) * y(1) * y(1);
        break;
      case ContactFamily::maxwell:
        d(4) = f * f / model.c;
        break;
    }
    return d;
  }
};

struct Outcome {
  ImpactEvents events;
  bool detached = false;
  double t_end = 0.0;
};

ImpactState to_impact_state(const Dynamics& dyn, double t, const State& y) {
  return {t, y(0), y(1), dyn.force(y), y(3)};
}

/// Bisection on a bracketed sign change of g over [lo, hi]; `before(g)` is
/// true on the pre-event side.
template <typename G, typename Before>
double locate(const G& g, const Before& before, double lo, double hi, double tol) {
  for (int it = 0; it < 200 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (before(g(mid))) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Integrates from first touch until detachment or t_stop, invoking
/// on_sample at every time produced by sample_time(0), sample_time(1), ...
/// (+inf terminates the sequence), and once more at the detachment time.
Outcome integrate(const ContactModel& model, double v_pre, const SimulationSettings& s, double t_stop,
                  const std::function<double(std::size_t)>& sample_time,
                  const std::function<void(double, const State&)>& on_sample) {
  const Dynamics dyn{model};
  const double half = model.half_period();
  const double horizon = s.horizon_half_periods * half;
  const double limit = std::min(horizon, t_stop);
  const double speed = std::abs(v_pre);
  const double omega = std::numbers::pi / half;

  State scale;
  scale << speed / omega, speed, speed * std::sqrt(model.k * model.m_star), model.m_star * speed,
      0.5 * model.m_star * speed * speed;
  const State atol = s.atol_scale * scale;

  auto error_norm = [&](const State& err, const State& y0, const State& y1) {
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double sc = atol(i) + s.rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
      acc += (err(i) / sc) * (err(i) / sc);
    }
    return std::sqrt(acc / 5.0);
  };

  State y;
  y << 0.0, v_pre, 0.0, 0.0, 0.0;
  double t = 0.0;
  double h = 1e-3 * half;
  const double h_max = s.max_step_fraction * half;
  std::size_t next = 0;
  while (sample_time(next) <= 0.0) {
    on_sample(sample_time(next), y);
    ++next;
  }

  Outcome out;
  State err;
  long steps = 0;
  while (t < limit) {
    if (++steps > s.max_steps) throw NumericalError("impact integration exceeded the step budget");
    h = std::min({h, h_max, limit - t});
    const State y1 = detail::dopri_step(dyn, t, y, h, err);
    const double en = error_norm(err, y, y1);
    if (!(en <= 1.0)) {
      h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
      if (!std::isfinite(en) || h < 1e-14 * half) {
        throw NumericalError("impact integration failed: step size underflow");
      }
      continue;
    }
    const double t1 = t + h;
    auto state_at = [&](double ts) -> State {
      if (ts <= t) return y;
      if (ts >= t1) return y1;
      State e;
      return detail::dopri_step(dyn, t, y, ts - t, e);
    };
    auto record = [&](double te) { return to_impact_state(dyn, te, state_at(te)); };

    const bool was_compressing = !out.events.compression_end.has_value();
    if (was_compressing && y(1) < 0.0 && y1(1) >= 0.0) {
      const double te = locate([&](double ts) { return state_at(ts)(1); }, [](double g) { return g < 0.0; }, t, t1,
                               s.event_time_tol);
      out.events.compression_end = record(te);
    }
    if (!out.events.peak_force && dyn.force_rate(y) > 0.0 && dyn.force_rate(y1) <= 0.0) {
      const double te = locate([&](double ts) { return dyn.force_rate(state_at(ts)); },
                               [](double g) { return g > 0.0; }, t, t1, s.event_time_tol);
      out.events.peak_force = record(te);
    }

    std::optional<double> t_rest;
    auto force_at = [&](double ts) { return dyn.force(state_at(ts)); };
    auto positive = [](double g) { return g > 0.0; };
    if (out.events.compression_end) {
      const double ta = was_compressing ? out.events.compression_end->t : t;
      if (force_at(ta) > 0.0 && dyn.force(y1) <= 0.0) {
        t_rest = locate(force_at, positive, ta, t1, s.event_time_tol);
      }
    } else if (dyn.force(y) > 0.0 && dyn.force(y1) <= 0.0) {
      t_rest = locate(force_at, positive, t, t1, s.event_time_tol);
      out.events.force_lost_during_compression = true;
    }

    const double t_hi = t_rest.value_or(t1);
    while (t_rest ? sample_time(next) < t_hi : sample_time(next) <= t_hi) {
      const double ts = sample_time(next);
      on_sample(ts, state_at(ts));
      ++next;
    }
    if (t_rest) {
      ImpactState end = record(*t_rest);
      out.events.restitution_end = end;
      out.detached = true;
      out.t_end = *t_rest;
      on_sample(*t_rest, state_at(*t_rest));
      return out;
    }
    t = t1;
    y = y1;
    h *= std::min(5.0, std::max(0.2, 0.9 * std::pow(std::max(en, 1e-12), -0.2)));
  }
  out.t_end = t;
  return out;
}

void require_approach(double v_pre) {
  if (!(v_pre < 0.0) || !std::isfinite(v_pre)) {
    throw InvalidScenario("pre-impact normal velocity must be negative");
  }
}

}  // namespace

const char* to_string(ContactFamily family) {
  switch (family) {
    case ContactFamily::spring:
      return "spring";
    case ContactFamily::maxwell:
      return "maxwell";
    case ContactFamily::viscoelastic:
      return "viscoelastic";
  }
  return "unknown";
}

ContactFamily contact_family_from_string(const std::string& text) {
  if (text == "spring") return ContactFamily::spring;
  if (text == "maxwell") return ContactFamily::maxwell;
  if (text == "viscoelastic") return ContactFamily::viscoelastic;
  throw InputError("unknown contact model '" + text + "' (expected spring, maxwell or viscoelastic)");
}

void ContactModel::validate() const {
  if (!(k > 0.0) || !std::isfinite(k)) throw InvalidModel("contact model: k must be positive");
  if (!(m_star > 0.0) || !std::isfinite(m_star)) throw InvalidModel("contact model: m_star must be positive");
  if (family != ContactFamily::spring && (!(c > 0.0) || !std::isfinite(c))) {
    throw InvalidModel("contact model: c must be positive");
  }
}

double ContactModel::half_period() const { return std::numbers::pi * std::sqrt(m_star / k); }

double force_spring(const ContactModel& model, double x) { return -model.k * x; }

double force_viscoelastic(const ContactModel& model, double x, double xdot) {
  return model.c * x * xdot - model.k * x;
}

double force_maxwell_step(const ContactModel& model, double /*x*/, double xdot, double f) {
  return -model.k * xdot - (model.k / model.c) * f;
}

double ImpactTrace::duration() const {
  return events.restitution_end ? events.restitution_end->t : (t.empty() ? 0.0 : t.back());
}

double ImpactTrace::exit_velocity() const {
  return events.restitution_end ? events.restitution_end->xdot : std::numeric_limits<double>::quiet_NaN();
}

double ImpactTrace::cor() const { return -exit_velocity() / v_pre; }

double ImpactTrace::peak_force() const {
  double peak = f_n.empty() ? 0.0 : *std::max_element(f_n.begin(), f_n.end());
  if (events.peak_force) peak = std::max(peak, events.peak_force->f);
  return peak;
}

double ImpactTrace::max_energy_residual() const {
  return residual.empty() ? std::numeric_limits<double>::quiet_NaN()
                          : *std::max_element(residual.begin(), residual.end());
}

ImpactTrace simulate(const ContactModel& model, double v_pre, const SimulationSettings& settings) {
  model.validate();
  require_approach(v_pre);
  if (!(settings.output_rate_hz > 0.0)) throw InputError("output rate must be positive");

  ImpactTrace trace;
  trace.model = model;
  trace.v_pre = v_pre;
  const Dynamics dyn{model};
  const double dt = 1.0 / settings.output_rate_hz;
  const Outcome out = integrate(
      model, v_pre, settings, std::numeric_limits<double>::infinity(),
      [dt](std::size_t i) { return static_cast<double>(i) * dt; },
      [&](double ts, const State& y) {
        trace.t.push_back(ts);
        trace.x.push_back(y(0));
        trace.xdot.push_back(y(1));
        trace.f_n.push_back(dyn.force(y));
        trace.p_n.push_back(y(3));
        trace.dissipated.push_back(y(4));
      });
  if (!out.detached) {
    std::ostringstream os;
    os << "no detachment within the horizon of " << settings.horizon_half_periods << " half periods ("
       << settings.horizon_half_periods * model.half_period() << " s)";
    throw NoDetachment(os.str(), settings.horizon_half_periods * model.half_period());
  }
  trace.events = out.events;
  return energy_trace(std::move(trace), model);
}

std::vector<double> sample_force(const ContactModel& model, double v_pre, std::span<const double> times,
                                 const SimulationSettings& settings) {
  model.validate();
  require_approach(v_pre);
  std::vector<double> forces(times.size(), 0.0);
  if (times.empty()) return forces;
  if (!std::is_sorted(times.begin(), times.end())) throw InputError("sample times must be sorted");
  const Dynamics dyn{model};
  std::size_t filled = 0;
  const double inf = std::numeric_limits<double>::infinity();
  SimulationSettings s = settings;
  s.horizon_half_periods = inf;
  integrate(
      model, v_pre, s, times.back(),
      [&](std::size_t i) { return i < times.size() ? times[i] : inf; },
      [&](double ts, const State& y) {
        if (filled < forces.size() && ts == times[filled]) forces[filled++] = std::max(0.0, dyn.force(y));
      });
  return forces;
}

double predicted_cor(const ContactModel& model, double v_pre, const SimulationSettings& settings) {
  model.validate();
  require_approach(v_pre);
  if (model.family == ContactFamily::viscoelastic) {
    const double e = -(model.k / model.c) / v_pre;
    if (e > 1.0) {
      std::ostringstream os;
      os << "|v_pre| = " << -v_pre << " m/s is below k/c = " << model.k / model.c
         << " m/s; the closed-form COR would exceed 1";
      throw SubcriticalVelocity(os.str());
    }
    return e;
  }
  return simulate(model, v_pre, settings).cor();
}

ImpactTrace energy_trace(ImpactTrace trace, const ContactModel& model) {
  const std::size_t n = trace.size();
  trace.e_k.resize(n);
  trace.e_p.resize(n);
  trace.e_d.resize(n);
  trace.residual.resize(n);
  const double e0 = 0.5 * model.m_star * trace.v_pre * trace.v_pre;
  for (std::size_t i = 0; i < n; ++i) {
    trace.e_k[i] = 0.5 * model.m_star * trace.xdot[i] * trace.xdot[i];
    trace.e_p[i] = model.family == ContactFamily::maxwell ? 0.5 * trace.f_n[i] * trace.f_n[i] / model.k
                                                          : 0.5 * model.k * trace.x[i] * trace.x[i];
    trace.e_d[i] = model.family == ContactFamily::spring || trace.dissipated.size() != n ? 0.0 : trace.dissipated[i];
    trace.residual[i] = std::abs(trace.e_k[i] + trace.e_p[i] + trace.e_d[i] - e0);
  }
  return trace;
}

SpringDeficiencyReport spring_deficiency_check(const ForceProfile& profile, double e_r_bound, double tolerance) {
  profile.validate();
  const auto& t = profile.time;
  const auto& f = profile.force;
  const std::size_t n = f.size();
  if (n < 5) throw MalformedProfile("profile too short for a peak analysis (" + std::to_string(n) + " samples)");
  const auto peak_it = std::max_element(f.begin(), f.end());
  const std::size_t ip = static_cast<std::size_t>(peak_it - f.begin());
  if (!(*peak_it > 0.0) || ip == 0 || ip + 1 == n) {
    throw MalformedProfile("profile has no interior positive peak");
  }

  SpringDeficiencyReport r;
  const double dt = t[ip + 1] - t[ip];
  const double denom = f[ip - 1] - 2.0 * f[ip] + f[ip + 1];
  const double delta = denom < 0.0 ? std::clamp(0.5 * (f[ip - 1] - f[ip + 1]) / denom, -0.5, 0.5) : 0.0;
  r.peak_time = t[ip] + delta * dt;
  r.peak_force = f[ip] - 0.25 * (f[ip - 1] - f[ip + 1]) * delta;

  auto trapz = [&](std::size_t a, std::size_t b) {
    double s = 0.0;
    for (std::size_t i = a; i < b; ++i) s += 0.5 * (f[i] + f[i + 1]) * (t[i + 1] - t[i]);
    return s;
  };
  // Split the trapezoid containing the peak time at the linear interpolant.
  const std::size_t seg = delta >= 0.0 ? ip : ip - 1;
  const double frac = (r.peak_time - t[seg]) / (t[seg + 1] - t[seg]);
  const double f_split = f[seg] + frac * (f[seg + 1] - f[seg]);
  r.pre_peak_area = trapz(0, seg) + 0.5 * (f[seg] + f_split) * (r.peak_time - t[seg]);
  r.post_peak_area = 0.5 * (f_split + f[seg + 1]) * (t[seg + 1] - r.peak_time) + trapz(seg + 1, n - 1);
  r.implied_cor = r.post_peak_area / r.pre_peak_area;
  r.inconsistent = r.implied_cor > e_r_bound + tolerance;

  // Symmetric half-sine with the measured peak; golden-section search on the half period.
  auto rms_for = [&](double half_period) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double phase = (t[i] - r.peak_time) / half_period;
      const double model = std::abs(phase) < 0.5 ? r.peak_force * std::cos(std::numbers::pi * phase) : 0.0;
      acc += (model - f[i]) * (model - f[i]);
    }
    return std::sqrt(acc / static_cast<double>(n));
  };
  const double base = std::max(2.0 * (r.peak_time - t.front()), 2.0 * dt);
  double lo = 0.25 * base;
  double hi = 4.0 * base;
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = hi - g * (hi - lo);
  double b = lo + g * (hi - lo);
  double fa = rms_for(a);
  double fb = rms_for(b);
  for (int it = 0; it < 80; ++it) {
    if (fa < fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = rms_for(a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = rms_for(b);
    }
  }
  r.spring_half_period = 0.5 * (lo + hi);
  r.spring_fit_rms = rms_for(r.spring_half_period);
  return r;
}

}  // namespace impact
