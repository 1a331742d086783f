#include "impact/commands.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

#include "impact/chain_dynamics.hpp"
#include "impact/impulse.hpp"
#include "impact/io.hpp"

namespace impact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kDefaultRestitution = 0.627;

struct Inputs {
  std::optional<ChainModel> chain;
  Eigen::VectorXd q;
  std::optional<double> speed;
  std::vector<double> velocities;
  double restitution = kDefaultRestitution;
  std::optional<ContactModelSpec> contact;
  IimMethod m_star_method = IimMethod::crb;
  std::optional<double> m_star_value;
  std::vector<fs::path> profiles;
  std::optional<fs::path> out;
};

void check_speed(double v, const char* what) {
  if (!(v >= 0.0) || !std::isfinite(v)) throw OutOfRange(std::string(what) + " must be a finite speed >= 0");
}

Inputs resolve(const CommandOptions& o) {
  Inputs in;
  std::optional<Scenario> sc;
  if (o.scenario) sc = read_scenario(*o.scenario);
  if (o.chain) {
    in.chain = read_chain(*o.chain);
  } else if (sc && sc->chain) {
    in.chain = sc->chain;
  }
  if (in.chain) {
    in.q = Eigen::VectorXd::Zero(in.chain->dof());
    if (sc && sc->q) {
      in.chain->check_dimension(*sc->q, "scenario q");
      in.q = *sc->q;
    }
  }
  if (sc) {
    in.speed = sc->speed;
    in.velocities = sc->velocities;
    if (sc->restitution) in.restitution = *sc->restitution;
    in.contact = sc->contact_model;
    if (sc->m_star_method) in.m_star_method = *sc->m_star_method;
    in.m_star_value = sc->m_star_value;
    in.profiles = sc->profiles;
    in.out = sc->output_dir;
  }
  if (o.model || o.k || o.c) {
    if (!in.contact) in.contact = ContactModelSpec{};
    if (o.model) in.contact->family = *o.model;
    if (o.k) in.contact->k = *o.k;
    if (o.c) in.contact->c = *o.c;
  }
  if (o.m_star) {
    if (!(*o.m_star > 0.0)) throw OutOfRange("--m-star must be positive");
    in.m_star_value = o.m_star;
  }
  for (double v : o.velocities) check_speed(v, "--velocity");
  if (!o.profiles.empty()) in.profiles = o.profiles;
  if (o.out) in.out = o.out;
  return in;
}

const ChainModel& require_chain(const Inputs& in) {
  if (!in.chain) throw InputError("a chain is required (--chain or a scenario with \"chain\")");
  return *in.chain;
}

json matrix_json(const Mat3& m) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) rows.push_back({m(i, 0), m(i, 1), m(i, 2)});
  return rows;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

ContactModel build_contact_model(const ContactModelSpec& spec, double m_star) {
  if (!spec.k) throw InputError("contact model needs k (--k or contact_model.k)");
  if (spec.family != ContactFamily::spring && !spec.c) {
    throw InputError(std::string("the ") + to_string(spec.family) + " model needs c (--c or contact_model.c)");
  }
  ContactModel m{spec.family, *spec.k, spec.c.value_or(0.0), m_star};
  m.validate();
  return m;
}

/// m* from an explicit value or from the chain with the selected IIM.
std::pair<double, std::string> resolve_m_star(const Inputs& in) {
  if (in.m_star_value) return {*in.m_star_value, "value"};
  if (!in.chain) throw InputError("m* is required (--m-star, scenario m_star.value, or a chain)");
  const InverseInertiaMatrix w = compute_iim(in.m_star_method, *in.chain, in.q);
  const Vec3 n = contact_normal_in_contact_frame(*in.chain, in.q);
  const double along = w.along(n);
  if (!(along > 0.0)) {
    throw SingularOperationalInertia(std::string("n^T W n is not positive for the ") + to_string(in.m_star_method) +
                                     " IIM");
  }
  return {1.0 / along, to_string(in.m_star_method)};
}

double single_speed(const CommandOptions& o, const Inputs& in, const char* command) {
  if (o.velocities.size() > 1) throw InputError(std::string(command) + " takes a single --velocity");
  if (o.velocities.size() == 1) return o.velocities.front();
  if (in.speed) return *in.speed;
  throw InputError(std::string(command) + " needs a speed (--velocity or scenario \"speed\")");
}

json events_json(const ImpactEvents& ev) {
  auto one = [](const std::optional<ImpactState>& s) -> json {
    if (!s) return nullptr;
    return json{{"t", s->t}, {"x", s->x}, {"xdot", s->xdot}, {"f", s->f}, {"p", s->p}};
  };
  return json{{"compression_end", one(ev.compression_end)},
              {"peak_force", one(ev.peak_force)},
              {"restitution_end", one(ev.restitution_end)},
              {"force_lost_during_compression", ev.force_lost_during_compression}};
}

json trace_summary(const ImpactTrace& tr) {
  return json{{"cor", number_or_null(tr.cor())},
              {"duration", tr.duration()},
              {"peak_force", tr.peak_force()},
              {"exit_velocity", number_or_null(tr.exit_velocity())},
              {"x_end", tr.x.empty() ? 0.0 : tr.x.back()},
              {"energy",
               {{"initial", tr.initial_energy()},
                {"final_kinetic", tr.e_k.back()},
                {"final_potential", tr.e_p.back()},
                {"dissipated", tr.e_d.back()},
                {"max_residual", tr.max_energy_residual()}}},
              {"events", events_json(tr.events)}};
}

std::vector<std::string> impulse_columns() {
  return {"speed",      "p_nc_gm",       "p_nc_em", "p_nc_crb", "p_nc_crb_flex", "p_r_gm",
          "p_r_em",     "p_r_crb",       "p_r_crb_flex", "algebraic", "restitution"};
}

std::vector<std::string> impulse_cells(const ImpulseRow& r) {
  return {format_double(r.speed),  format_double(r.p_gm),  format_double(r.p_em),       format_double(r.p_crb),
          format_double(r.p_crb_flex), format_double(r.pr_gm), format_double(r.pr_em),  format_double(r.pr_crb),
          format_double(r.pr_crb_flex), format_double(r.algebraic), format_double(r.restitution)};
}

json impulse_json(const ImpulseRow& r) {
  return json{{"speed", r.speed},
              {"compression_end",
               {{"gm", number_or_null(r.p_gm)},
                {"em", number_or_null(r.p_em)},
                {"crb", number_or_null(r.p_crb)},
                {"crb_flex", number_or_null(r.p_crb_flex)}}},
              {"restitution_end",
               {{"gm", number_or_null(r.pr_gm)},
                {"em", number_or_null(r.pr_em)},
                {"crb", number_or_null(r.pr_crb)},
                {"crb_flex", number_or_null(r.pr_crb_flex)}}},
              {"algebraic", number_or_null(r.algebraic)},
              {"restitution", r.restitution}};
}

std::vector<fs::path> expand_profiles(const std::vector<fs::path>& inputs) {
  std::vector<fs::path> files;
  for (const fs::path& p : inputs) {
    if (fs::is_directory(p)) {
      std::vector<fs::path> found;
      for (const auto& e : fs::directory_iterator(p)) {
        if (e.is_regular_file() && e.path().extension() == ".csv") found.push_back(e.path());
      }
      std::sort(found.begin(), found.end());
      files.insert(files.end(), found.begin(), found.end());
    } else {
      files.push_back(p);
    }
  }
  return files;
}

struct FitRecord {
  fs::path file;
  std::string label;
  double v_pre = kNaN;
  FitResult fit;
  double impulse_cor = kNaN;
  std::string status = "error";
  std::string error;
};

}  // namespace

void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn) {
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, workers)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::mutex mu;
  std::size_t next = 0;
  std::exception_ptr first_error;
  std::vector<std::thread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i;
        {
          std::lock_guard<std::mutex> lock(mu);
          if (next >= n || first_error) return;
          i = next++;
        }
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

IimReport iim_report(const ChainModel& chain, const Eigen::VectorXd& q) {
  IimReport r;
  r.normal = contact_normal_in_contact_frame(chain, q);
  for (IimMethod m : {IimMethod::gm, IimMethod::em, IimMethod::crb, IimMethod::crb_flex}) {
    IimReport::Entry e{m, std::nullopt, kNaN, {}};
    try {
      const InverseInertiaMatrix w = compute_iim(m, chain, q);
      e.w = w.w;
      const double along = w.along(r.normal);
      e.effective_mass = along > 0.0 ? 1.0 / along : kNaN;
      if (!(along > 0.0)) e.error = "n^T W n is not positive";
    } catch (const NumericalError& ex) {
      e.error = ex.what();
    }
    r.entries.push_back(e);
  }
  try {
    r.em = em_matrix(chain, q);
  } catch (const NumericalError& ex) {
    r.em_error = ex.what();
  }
  for (int i : {0, 2}) {
    if (!r.entries[static_cast<std::size_t>(i)].w) {
      throw NumericalError(std::string(to_string(r.entries[static_cast<std::size_t>(i)].method)) + ": " +
                           r.entries[static_cast<std::size_t>(i)].error);
    }
  }
  r.flex_correction = iim_flex_correction(chain, q);
  const Mat3& gm = *r.entries[0].w;
  const Mat3& crb = *r.entries[2].w;
  r.identity_residual = (gm - (crb + r.flex_correction)).norm() / gm.norm();
  r.crb_cross_check = (crb - iim_crb_spatial(chain, q).w).norm() / crb.norm();
  return r;
}

ImpulseRow impulse_row(const ChainModel& chain, const Eigen::VectorXd& q, const IimReport& report, double speed,
                       double restitution) {
  check_speed(speed, "speed");
  ImpulseRow row;
  row.speed = speed;
  row.restitution = restitution;
  const Vec3 v_pre = -speed * report.normal;
  double* p[] = {&row.p_gm, &row.p_em, &row.p_crb, &row.p_crb_flex};
  double* pr[] = {&row.pr_gm, &row.pr_em, &row.pr_crb, &row.pr_crb_flex};
  for (std::size_t i = 0; i < report.entries.size(); ++i) {
    const auto& e = report.entries[i];
    *p[i] = *pr[i] = kNaN;
    if (!e.w || !e.error.empty()) continue;
    const ContactScenario s(InverseInertiaMatrix{*e.w, e.method, kContactFrame}, report.normal, v_pre);
    *p[i] = compression_end_impulse(s);
    *pr[i] = restitution_end_impulse(s, restitution);
  }
  row.algebraic = kNaN;
  if (report.em) row.algebraic = -report.normal.dot(algebraic_impulse(chain, q, v_pre, restitution));
  return row;
}

RunSummary cmd_iim(const CommandOptions& options) {
  const Inputs in = resolve(options);
  const ChainModel& chain = require_chain(in);
  const IimReport r = iim_report(chain, in.q);

  json methods = json::object();
  for (const auto& e : r.entries) {
    json m;
    if (e.w) {
      const InverseInertiaMatrix w{*e.w, e.method, kContactFrame};
      m["w"] = matrix_json(*e.w);
      m["symmetric"] = w.is_symmetric();
      m["positive_definite"] = w.is_positive_definite();
    }
    m["effective_mass"] = number_or_null(e.effective_mass);
    if (!e.error.empty()) m["error"] = std::string(to_string(e.method)) + ": " + e.error;
    methods[to_string(e.method)] = m;
  }
  json summary{{"command", "iim"},
               {"chain", chain.name()},
               {"q", vector_json(in.q)},
               {"normal", {r.normal.x(), r.normal.y(), r.normal.z()}},
               {"methods", methods},
               {"em_matrix", r.em ? matrix_json(*r.em) : json(nullptr)},
               {"flex_correction", matrix_json(r.flex_correction)},
               {"identity_residual", r.identity_residual},
               {"crb_cross_check", r.crb_cross_check}};
  if (!r.em_error.empty()) summary["em_error"] = std::string("em: ") + r.em_error;
  if (in.out) write_text(*in.out / "iim.json", summary.dump(2) + "\n");
  return summary;
}

RunSummary cmd_impulse(const CommandOptions& options) {
  const Inputs in = resolve(options);
  const ChainModel& chain = require_chain(in);
  std::vector<double> speeds = options.velocities;
  if (speeds.empty()) speeds.push_back(single_speed(options, in, "impulse"));
  const IimReport report = iim_report(chain, in.q);

  Table table;
  table.columns = impulse_columns();
  json rows = json::array();
  for (double s : speeds) {
    const ImpulseRow row = impulse_row(chain, in.q, report, s, in.restitution);
    table.rows.push_back(impulse_cells(row));
    rows.push_back(impulse_json(row));
  }
  json summary{{"command", "impulse"}, {"chain", chain.name()}, {"rows", rows}};
  if (!in.profiles.empty()) {
    json measured = json::array();
    for (const fs::path& f : expand_profiles(in.profiles)) {
      const ForceProfile p = read_profile(f);
      double impulse = 0.0;
      for (std::size_t i = 0; i + 1 < p.size(); ++i) impulse += 0.5 * (p.force[i] + p.force[i + 1]) * (p.time[i + 1] - p.time[i]);
      measured.push_back({{"file", f.string()}, {"label", p.label}, {"v_pre", number_or_null(p.v_pre)}, {"impulse", impulse}});
    }
    summary["measured"] = measured;
  }
  if (in.out) {
    write_table(*in.out / "impulse.csv", table);
    write_text(*in.out / "impulse.json", summary.dump(2) + "\n");
  }
  return summary;
}

RunSummary cmd_simulate(const CommandOptions& options) {
  const Inputs in = resolve(options);
  if (!in.contact) throw InputError("simulate needs a contact model (--model/--k/--c or scenario contact_model)");
  const double speed = single_speed(options, in, "simulate");
  const auto [m_star, source] = resolve_m_star(in);
  const ContactModel model = build_contact_model(*in.contact, m_star);
  const ImpactTrace trace = simulate(model, -speed);

  json summary = trace_summary(trace);
  summary["command"] = "simulate";
  summary["model"] = {{"family", to_string(model.family)}, {"k", model.k}, {"c", model.c}, {"m_star", m_star}};
  summary["m_star_source"] = source;
  summary["v_pre"] = -speed;
  if (model.family == ContactFamily::viscoelastic) {
    try {
      summary["predicted_cor"] = predicted_cor(model, -speed);
    } catch (const SubcriticalVelocity& e) {
      summary["predicted_cor"] = nullptr;
      summary["predicted_cor_error"] = e.what();
    }
  }
  if (in.out) {
    write_trace(*in.out / "trace.csv", trace);
    write_text(*in.out / "simulate.json", summary.dump(2) + "\n");
  }
  return summary;
}

RunSummary cmd_sweep(const CommandOptions& options) {
  const Inputs in = resolve(options);
  const ChainModel& chain = require_chain(in);
  std::vector<double> speeds = options.velocities;
  if (speeds.empty()) speeds = in.velocities;
  if (speeds.empty() && in.speed) speeds.push_back(*in.speed);
  if (speeds.empty()) throw InputError("sweep needs velocities (--velocity or scenario \"velocities\")");

  const IimReport report = iim_report(chain, in.q);
  std::optional<ContactModel> model;
  double m_star = kNaN;
  if (in.contact) {
    m_star = resolve_m_star(in).first;
    model = build_contact_model(*in.contact, m_star);
  }

  std::vector<SweepRow> rows(speeds.size());
  parallel_for(speeds.size(), options.parallel, [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.impulse = impulse_row(chain, in.q, report, speeds[i], in.restitution);
    row.m_star = m_star;
    row.cor = row.duration = row.peak_force = row.energy_loss = kNaN;
    if (model && speeds[i] > 0.0) {
      const ImpactTrace tr = simulate(*model, -speeds[i]);
      row.cor = tr.cor();
      row.duration = tr.duration();
      row.peak_force = tr.peak_force();
      row.energy_loss = tr.e_d.back();
    }
  });

  Table table;
  table.columns = impulse_columns();
  for (const char* c : {"m_star", "cor", "duration", "peak_force", "energy_loss"}) table.columns.push_back(c);
  json jrows = json::array();
  for (const SweepRow& r : rows) {
    auto cells = impulse_cells(r.impulse);
    for (double v : {r.m_star, r.cor, r.duration, r.peak_force, r.energy_loss}) cells.push_back(format_double(v));
    table.rows.push_back(cells);
    json j = impulse_json(r.impulse);
    j["m_star"] = number_or_null(r.m_star);
    j["cor"] = number_or_null(r.cor);
    j["duration"] = number_or_null(r.duration);
    j["peak_force"] = number_or_null(r.peak_force);
    j["energy_loss"] = number_or_null(r.energy_loss);
    jrows.push_back(j);
  }
  json summary{{"command", "sweep"}, {"chain", chain.name()}, {"rows", jrows}};
  if (model) summary["model"] = {{"family", to_string(model->family)}, {"k", model->k}, {"c", model->c}, {"m_star", m_star}};
  if (in.out) {
    write_table(*in.out / "sweep.csv", table);
    write_text(*in.out / "sweep.json", summary.dump(2) + "\n");
  }
  return summary;
}

RunSummary cmd_identify(const CommandOptions& options) {
  const Inputs in = resolve(options);
  const std::vector<fs::path> files = expand_profiles(in.profiles);
  if (files.empty()) throw InputError("identify needs at least one profile (--profiles)");
  const ContactFamily family = in.contact ? in.contact->family : ContactFamily::viscoelastic;
  if (family == ContactFamily::spring) throw InputError("identify fits the viscoelastic or maxwell model, not spring");
  const double m_star = resolve_m_star(in).first;
  const auto& vel = options.velocities;
  if (vel.size() > 1 && vel.size() != files.size()) {
    throw InputError("give one --velocity for all profiles or one per profile (" + std::to_string(files.size()) + ")");
  }

  FitOptions fit_options;
  fit_options.smoothing_width = options.smoothing_width;
  std::vector<FitRecord> records(files.size());
  parallel_for(files.size(), options.parallel, [&](std::size_t i) {
    FitRecord& rec = records[i];
    rec.file = files[i];
    rec.label = files[i].stem().string();
    try {
      ForceProfile p = read_profile(files[i]);
      rec.label = p.label;
      rec.v_pre = vel.empty() ? p.v_pre : -vel[vel.size() == 1 ? 0 : i];
      if (!(rec.v_pre < 0.0)) throw InputError("no approach velocity (sidecar v_pre or --velocity)");
      if (options.trim_threshold) p = trim_first_impact(p, *options.trim_threshold);
      try {
        rec.impulse_cor = estimate_cor_from_profile(p, m_star, rec.v_pre).cor;
      } catch (const MalformedProfile&) {
      }
      try {
        rec.fit = fit_profile(family, p, m_star, rec.v_pre, fit_options);
        rec.status = "ok";
      } catch (const FitDiverged& e) {
        rec.fit = e.best();
        rec.status = "diverged";
        rec.error = e.what();
      }
    } catch (const Error& e) {
      rec.status = "error";
      rec.error = e.what();
    }
  });

  Table fits;
  fits.columns = {"file", "label", "family", "v_pre", "k", "c", "rms", "cor", "cor_in_range",
                  "impulse_cor", "iterations", "step_norm", "status", "error"};
  json jfits = json::array();
  struct Acc {
    std::vector<double> k, c, cor, impulse_cor;
  };
  std::map<long long, Acc> groups;
  std::map<long long, double> group_speed;
  for (const FitRecord& r : records) {
    const bool have_fit = r.status != "error";
    fits.rows.push_back({r.file.string(), r.label, to_string(family), format_double(r.v_pre),
                         format_double(have_fit ? r.fit.k : kNaN), format_double(have_fit ? r.fit.c : kNaN),
                         format_double(have_fit ? r.fit.rms : kNaN), format_double(have_fit ? r.fit.cor : kNaN),
                         have_fit ? (r.fit.cor_in_range ? "1" : "0") : "", format_double(r.impulse_cor),
                         std::to_string(have_fit ? r.fit.iterations : 0), format_double(have_fit ? r.fit.step_norm : kNaN),
                         r.status, r.error});
    json j{{"file", r.file.string()}, {"label", r.label}, {"v_pre", number_or_null(r.v_pre)}, {"status", r.status}};
    if (have_fit) {
      j["k"] = r.fit.k;
      j["c"] = r.fit.c;
      j["rms"] = r.fit.rms;
      j["cor"] = number_or_null(r.fit.cor);
      j["cor_in_range"] = r.fit.cor_in_range;
      j["iterations"] = r.fit.iterations;
    }
    j["impulse_cor"] = number_or_null(r.impulse_cor);
    if (!r.error.empty()) j["error"] = r.error;
    jfits.push_back(j);
    if (r.status != "ok") continue;
    const long long key = std::llround(-r.v_pre * 1e9);
    Acc& a = groups[key];
    group_speed[key] = -r.v_pre;
    a.k.push_back(r.fit.k);
    a.c.push_back(r.fit.c);
    a.cor.push_back(r.fit.cor);
    if (std::isfinite(r.impulse_cor)) a.impulse_cor.push_back(r.impulse_cor);
  }

  auto mean = [](const std::vector<double>& v) {
    if (v.empty()) return kNaN;
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };
  auto stddev = [&](const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    const double m = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
  };
  Table conditions;
  conditions.columns = {"speed", "family", "count", "mean_k", "mean_c", "mean_cor", "std_cor", "mean_impulse_cor"};
  json jcond = json::array();
  for (const auto& [key, a] : groups) {
    const double speed = group_speed[key];
    conditions.rows.push_back({format_double(speed), to_string(family), std::to_string(a.cor.size()),
                               format_double(mean(a.k)), format_double(mean(a.c)), format_double(mean(a.cor)),
                               format_double(stddev(a.cor)), format_double(mean(a.impulse_cor))});
    jcond.push_back({{"speed", speed},
                     {"count", a.cor.size()},
                     {"mean_k", mean(a.k)},
                     {"mean_c", mean(a.c)},
                     {"mean_cor", mean(a.cor)},
                     {"std_cor", stddev(a.cor)},
                     {"mean_impulse_cor", number_or_null(mean(a.impulse_cor))}});
  }
  const auto failed = std::count_if(records.begin(), records.end(), [](const FitRecord& r) { return r.status != "ok"; });
  json summary{{"command", "identify"}, {"family", to_string(family)}, {"m_star", m_star}, {"fits", jfits},
               {"conditions", jcond}, {"failed", failed}};
  if (in.out) {
    write_table(*in.out / "fits.csv", fits);
    write_table(*in.out / "cor_vs_velocity.csv", conditions);
    write_text(*in.out / "identify.json", summary.dump(2) + "\n");
  }
  return summary;
}

}  // namespace impact
