#include "impact/identification.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace impact {

namespace {

using Params = Eigen::Vector2d;  // (log k, log c)

double trapezoid(const ForceProfile& p) {
  double s = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) s += 0.5 * (p.force[i] + p.force[i + 1]) * (p.time[i + 1] - p.time[i]);
  return s;
}

class Objective {
 public:
  Objective(ContactFamily family, const ForceProfile& profile, double m_star, double v_pre, const FitOptions& options)
      : family_(family), profile_(profile), m_star_(m_star), v_pre_(v_pre), options_(options) {}

  ContactModel model(const Params& theta) const {
    return ContactModel{family_, std::exp(theta(0)), std::exp(theta(1)), m_star_};
  }

  bool admissible(const Params& theta) const {
    const double lo = std::log(options_.min_parameter);
    const double hi = std::log(options_.max_parameter);
    return theta.allFinite() && (theta.array() >= lo).all() && (theta.array() <= hi).all();
  }

  /// Empty on simulation failure or outside the admissible box.
  std::optional<Eigen::VectorXd> residuals(const Params& theta) const {
    if (!admissible(theta)) return std::nullopt;
    std::vector<double> f;
    try {
      f = sample_force(model(theta), v_pre_, profile_.time, options_.simulation);
    } catch (const Error&) {
      return std::nullopt;
    }
    Eigen::VectorXd r(f.size());
    for (std::size_t i = 0; i < f.size(); ++i) r(static_cast<Eigen::Index>(i)) = f[i] - profile_.force[i];
    return r;
  }

  double cost(const Params& theta) const {
    const auto r = residuals(theta);
    ++evaluations_;
    return r ? 0.5 * r->squaredNorm() : std::numeric_limits<double>::infinity();
  }

  double rms(double cost_value) const { return std::sqrt(2.0 * cost_value / static_cast<double>(profile_.size())); }

  int evaluations() const { return evaluations_; }

 private:
  ContactFamily family_;
  const ForceProfile& profile_;
  double m_star_;
  double v_pre_;
  const FitOptions& options_;
  mutable int evaluations_ = 0;
};

struct SearchResult {
  Params theta;
  double cost;
  int iterations;
};

SearchResult nelder_mead(const Objective& obj, const Params& start, const FitOptions& options) {
  std::array<Params, 3> x{start, start + Params(0.3, 0.0), start + Params(0.0, 0.3)};
  std::array<double, 3> fx{};
  for (int i = 0; i < 3; ++i) fx[i] = obj.cost(x[i]);

  int it = 0;
  for (; it < options.simplex_iterations; ++it) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(), [&](int a, int b) { return fx[a] < fx[b]; });
    const int best = order[0], mid = order[1], worst = order[2];
    const double diameter = std::max((x[mid] - x[best]).norm(), (x[worst] - x[best]).norm());
    if (diameter < options.simplex_tolerance) break;

    const Params centroid = 0.5 * (x[best] + x[mid]);
    const Params xr = centroid + (centroid - x[worst]);
    const double fr = obj.cost(xr);
    if (fr < fx[best]) {
      const Params xe = centroid + 2.0 * (centroid - x[worst]);
      const double fe = obj.cost(xe);
      if (fe < fr) {
        x[worst] = xe;
        fx[worst] = fe;
      } else {
        x[worst] = xr;
        fx[worst] = fr;
      }
      continue;
    }
    if (fr < fx[mid]) {
      x[worst] = xr;
      fx[worst] = fr;
      continue;
    }
    const bool outside = fr < fx[worst];
    const Params xc = outside ? Params(centroid + 0.5 * (xr - centroid)) : Params(centroid + 0.5 * (x[worst] - centroid));
    const double fc = obj.cost(xc);
    if (fc < std::min(fr, fx[worst])) {
      x[worst] = xc;
      fx[worst] = fc;
      continue;
    }
    for (int i : {mid, worst}) {
      x[i] = x[best] + 0.5 * (x[i] - x[best]);
      fx[i] = obj.cost(x[i]);
    }
  }
  const int best = static_cast<int>(std::min_element(fx.begin(), fx.end()) - fx.begin());
  return {x[best], fx[best], it};
}

struct RefineResult {
  Params theta;
  double cost;
  int iterations;
  double step_norm;
  bool converged;
};

RefineResult levenberg_marquardt(const Objective& obj, Params theta, const FitOptions& options) {
  auto r = obj.residuals(theta);
  RefineResult out{theta, std::numeric_limits<double>::infinity(), 0, 0.0, false};
  if (!r) return out;
  double cost = 0.5 * r->squaredNorm();
  out.cost = cost;
  double lambda = 1e-3;
  constexpr double h = 1e-5;

  for (int it = 0; it < options.refine_iterations; ++it) {
    out.iterations = it + 1;
    Eigen::MatrixXd jac(r->size(), 2);
    for (int j = 0; j < 2; ++j) {
      Params tp = theta, tm = theta;
      tp(j) += h;
      tm(j) -= h;
      const auto rp = obj.residuals(tp);
      const auto rm = obj.residuals(tm);
      if (!rp || !rm) return out;
      jac.col(j) = (*rp - *rm) / (2.0 * h);
    }
    const Eigen::Matrix2d a = jac.transpose() * jac;
    const Eigen::Vector2d g = jac.transpose() * *r;

    bool accepted = false;
    while (lambda < 1e12) {
      Eigen::Matrix2d damped = a;
      damped.diagonal() += lambda * a.diagonal().cwiseMax(1e-300);
      const Params step = damped.ldlt().solve(-g);
      const Params trial = theta + step;
      const auto rt = obj.residuals(trial);
      const double ct = rt ? 0.5 * rt->squaredNorm() : std::numeric_limits<double>::infinity();
      if (ct < cost) {
        const double decrease = (cost - ct) / std::max(cost, 1e-300);
        theta = trial;
        r = rt;
        cost = ct;
        out.step_norm = step.norm();
        lambda = std::max(lambda / 3.0, 1e-12);
        accepted = true;
        if (out.step_norm < options.step_tolerance || decrease < 1e-14) out.converged = true;
        break;
      }
      lambda *= 4.0;
    }
    out.theta = theta;
    out.cost = cost;
    // No downhill step at any damping: the minimum is resolved to the
    // simulator's precision.
    if (!accepted) out.converged = true;
    if (out.converged) break;
  }
  return out;
}

FitResult fit(ContactFamily family, const ForceProfile& input, double m_star, double v_pre,
              const FitOptions& options) {
  input.validate();
  if (!(m_star > 0.0) || !std::isfinite(m_star)) throw OutOfRange("m_star must be positive");
  if (!(v_pre < 0.0) || !std::isfinite(v_pre)) throw OutOfRange("v_pre must be negative");
  if (input.size() < 3) throw MalformedProfile("profile has fewer than 3 samples");
  const ForceProfile profile = smooth_profile(input, options.smoothing_width);

  FitResult best;
  best.family = family;
  const double peak = *std::max_element(profile.force.begin(), profile.force.end());
  if (!(peak > 0.0)) throw FitDiverged("profile has no positive force", best);

  const double speed = -v_pre;
  const double lobe = profile.duration() + 1.0 / profile.sample_rate_hz;
  const double k0 = peak / (speed * lobe / 4.0);
  const double c0 = family == ContactFamily::viscoelastic ? k0 / (0.5 * speed) : k0 * lobe;

  const Objective obj(family, profile, m_star, v_pre, options);
  SearchResult search{Params(std::log(k0), std::log(c0)), std::numeric_limits<double>::infinity(), 0};
  int iterations = 0;
  for (double fk : {0.5, 2.0}) {
    for (double fc : {0.5, 2.0}) {
      const SearchResult s = nelder_mead(obj, Params(std::log(k0 * fk), std::log(c0 * fc)), options);
      iterations += s.iterations;
      if (s.cost < search.cost) search = s;
    }
  }
  const RefineResult refined = levenberg_marquardt(obj, search.theta, options);
  const bool refined_better = refined.cost <= search.cost;
  const Params theta = refined_better ? refined.theta : search.theta;
  const double cost = refined_better ? refined.cost : search.cost;

  best.k = std::exp(theta(0));
  best.c = std::exp(theta(1));
  best.rms = obj.rms(cost);
  best.iterations = iterations + refined.iterations;
  best.step_norm = refined.step_norm;
  best.converged = refined.converged && refined_better;

  if (family == ContactFamily::viscoelastic) {
    best.cor = -(best.k / best.c) / v_pre;
  } else {
    try {
      best.cor = simulate(obj.model(theta), v_pre, options.simulation).cor();
    } catch (const Error&) {
      best.cor = std::numeric_limits<double>::quiet_NaN();
    }
  }
  best.cor_in_range = best.cor >= 0.0 && best.cor <= 1.0;

  std::ostringstream why;
  if (!std::isfinite(cost)) {
    why << "no admissible parameters found";
  } else if (!best.converged) {
    why << "refinement did not converge in " << options.refine_iterations << " iterations";
  } else if (!obj.admissible(theta + Params::Constant(1e-9)) || !obj.admissible(theta - Params::Constant(1e-9))) {
    why << "parameters reached the admissible bound";
  } else if (best.rms > options.max_relative_rms * peak) {
    why << "residual RMS " << best.rms << " N exceeds " << options.max_relative_rms << " of the peak force";
  }
  if (!why.str().empty()) {
    best.converged = false;
    throw FitDiverged(std::string(to_string(family)) + " fit diverged: " + why.str(), best);
  }
  return best;
}

}  // namespace

ForceProfile trim_first_impact(const ForceProfile& profile, double threshold) {
  if (profile.size() == 0) throw MalformedProfile("profile is empty");
  if (profile.time.size() != profile.force.size()) throw MalformedProfile("time and force columns differ in length");
  const auto above = [&](double f) { return f > threshold; };
  const auto first = std::find_if(profile.force.begin(), profile.force.end(), above);
  if (first == profile.force.end()) {
    std::ostringstream os;
    os << "no sample exceeds the threshold of " << threshold << " N";
    throw NoImpactFound(os.str());
  }
  const auto last = std::find_if_not(first, profile.force.end(), above);
  const auto a = first - profile.force.begin();
  const auto b = last - profile.force.begin();
  ForceProfile out = profile;
  out.force.assign(profile.force.begin() + a, profile.force.begin() + b);
  out.time.assign(profile.time.begin() + a, profile.time.begin() + b);
  return out;
}

ForceProfile smooth_profile(const ForceProfile& profile, int width) {
  if (width < 1 || width % 2 == 0) throw OutOfRange("smoothing width must be a positive odd integer");
  if (width == 1) return profile;
  ForceProfile out = profile;
  const long n = static_cast<long>(profile.size());
  const long half = width / 2;
  for (long i = 0; i < n; ++i) {
    const long reach = std::min({half, i, n - 1 - i});
    double s = 0.0;
    for (long j = i - reach; j <= i + reach; ++j) s += profile.force[static_cast<std::size_t>(j)];
    out.force[static_cast<std::size_t>(i)] = s / static_cast<double>(2 * reach + 1);
  }
  return out;
}

FitResult fit_viscoelastic(const ForceProfile& profile, double m_star, double v_pre, const FitOptions& options) {
  return fit(ContactFamily::viscoelastic, profile, m_star, v_pre, options);
}

FitResult fit_maxwell(const ForceProfile& profile, double m_star, double v_pre, const FitOptions& options) {
  return fit(ContactFamily::maxwell, profile, m_star, v_pre, options);
}

FitResult fit_profile(ContactFamily family, const ForceProfile& profile, double m_star, double v_pre,
                      const FitOptions& options) {
  if (family == ContactFamily::spring) throw InvalidModel("only the viscoelastic and maxwell families can be fitted");
  return fit(family, profile, m_star, v_pre, options);
}

CorEstimate cor_from_impulse(double impulse, double m_star, double v_pre) {
  if (!(m_star > 0.0)) throw OutOfRange("m_star must be positive");
  if (!(v_pre < 0.0)) throw OutOfRange("v_pre must be negative");
  if (!(impulse > 0.0)) throw MalformedProfile("impulse must be positive");
  CorEstimate e;
  e.impulse = impulse;
  e.cor = impulse / (m_star * -v_pre) - 1.0;
  e.in_range = e.cor >= 0.0 && e.cor <= 1.0;
  return e;
}

CorEstimate estimate_cor_from_profile(const ForceProfile& profile, double m_star, double v_pre) {
  profile.validate();
  const double impulse = trapezoid(profile);
  if (!(impulse > 0.0)) throw MalformedProfile("profile impulse is not positive");
  return cor_from_impulse(impulse, m_star, v_pre);
}

ForceProfile synthesize_profile(const ContactModel& model, double v_pre, double sample_rate_hz, double noise,
                                std::mt19937_64* rng, const std::string& label) {
  SimulationSettings settings;
  settings.output_rate_hz = sample_rate_hz;
  const ImpactTrace trace = simulate(model, v_pre, settings);
  ForceProfile p;
  p.sample_rate_hz = sample_rate_hz;
  p.v_pre = v_pre;
  p.label = label;
  const std::size_t grid = trace.size() - 1;
  p.time.assign(trace.t.begin(), trace.t.begin() + static_cast<long>(grid));
  p.force.assign(trace.f_n.begin(), trace.f_n.begin() + static_cast<long>(grid));
  if (noise > 0.0) {
    std::mt19937_64 fallback(0);
    std::mt19937_64& gen = rng ? *rng : fallback;
    std::normal_distribution<double> normal(0.0, noise);
    for (double& f : p.force) f *= 1.0 + normal(gen);
  }
  return p;
}

}  // namespace impact
