#include "impact/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include "json.hpp"

namespace impact {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string join_path(const std::string& parent, const std::string& key) {
  if (parent.empty()) return key;
  return parent + "." + key;
}

std::string index_path(const std::string& parent, std::size_t i) {
  return parent + "[" + std::to_string(i) + "]";
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError("", what + " is not valid JSON: " + e.what());
  }
}

void require_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw ParseError(path, "expected an object");
}

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& path) {
  require_object(j, path);
  const std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items()) {
    if (!ok.count(item.key())) throw ParseError(join_path(path, item.key()), "unknown field");
  }
}

const json& require(const json& j, const char* key, const std::string& path) {
  if (!j.contains(key)) throw ParseError(join_path(path, key), "missing required field");
  return j.at(key);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) throw ParseError(path, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw ParseError(path, "expected a finite number");
  return v;
}

double number_at(const json& j, const char* key, const std::string& path) {
  return as_number(require(j, key, path), join_path(path, key));
}

std::string as_string(const json& j, const std::string& path) {
  if (!j.is_string()) throw ParseError(path, "expected a string");
  return j.get<std::string>();
}

Eigen::VectorXd as_vector(const json& j, const std::string& path) {
  if (!j.is_array()) throw ParseError(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_number(j[i], index_path(path, i));
  return v;
}

Vec3 as_vec3(const json& j, const std::string& path) {
  const Eigen::VectorXd v = as_vector(j, path);
  if (v.size() != 3) throw ParseError(path, "expected 3 numbers");
  return v;
}

void check_schema(const json& j, const std::string& path) {
  const json& v = require(j, "schema_version", path);
  if (!v.is_number_integer() || v.get<int>() != kSchemaVersion) {
    throw ParseError(join_path(path, "schema_version"), "unsupported schema version (expected " +
                                                             std::to_string(kSchemaVersion) + ")");
  }
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json nan_to_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double null_to_nan(const json& j, const std::string& path) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : as_number(j, path);
}

SpatialTransform parse_origin(const json& j, const std::string& path, const FrameId& from, const FrameId& to) {
  check_keys(j, {"xyz", "rpy", "rotation", "angle_unit"}, path);
  if (j.contains("angle_unit")) {
    const std::string unit = as_string(j.at("angle_unit"), join_path(path, "angle_unit"));
    if (unit != "rad") {
      throw ParseError(join_path(path, "angle_unit"), "angles must be given in radians (\"rad\"), got \"" + unit + "\"");
    }
  }
  const Vec3 xyz = j.contains("xyz") ? as_vec3(j.at("xyz"), join_path(path, "xyz")) : Vec3::Zero();
  if (j.contains("rpy") && j.contains("rotation")) throw ParseError(path, "give either rpy or rotation, not both");
  Mat3 r = Mat3::Identity();
  if (j.contains("rpy")) {
    r = rotation_from_rpy(as_vec3(j.at("rpy"), join_path(path, "rpy")));
  } else if (j.contains("rotation")) {
    const json& m = j.at("rotation");
    const std::string mp = join_path(path, "rotation");
    if (!m.is_array() || m.size() != 3) throw ParseError(mp, "expected a 3x3 nested array");
    for (int i = 0; i < 3; ++i) r.row(i) = as_vec3(m[static_cast<std::size_t>(i)], index_path(mp, static_cast<std::size_t>(i))).transpose();
  }
  try {
    return SpatialTransform(r, xyz, from, to);
  } catch (const InvalidModel& e) {
    throw ParseError(path, e.what());
  }
}

ChainModel chain_from_json(const json& j) {
  check_keys(j, {"schema_version", "name", "links", "joints", "contact"}, "");
  check_schema(j, "");
  const std::string name = j.contains("name") ? as_string(j.at("name"), "name") : std::string();

  const json& jl = require(j, "links", "");
  if (!jl.is_array() || jl.empty()) throw ParseError("links", "expected a non-empty array");
  std::vector<Link> links;
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const std::string p = index_path("links", i);
    check_keys(jl[i], {"name", "mass", "com", "inertia"}, p);
    const std::string link_name = as_string(require(jl[i], "name", p), join_path(p, "name"));
    const double mass = number_at(jl[i], "mass", p);
    const Vec3 com = as_vec3(require(jl[i], "com", p), join_path(p, "com"));
    const json& ji = require(jl[i], "inertia", p);
    const std::string ip = join_path(p, "inertia");
    check_keys(ji, {"ixx", "iyy", "izz", "ixy", "ixz", "iyz"}, ip);
    Mat3 inertia;
    const double ixy = ji.contains("ixy") ? number_at(ji, "ixy", ip) : 0.0;
    const double ixz = ji.contains("ixz") ? number_at(ji, "ixz", ip) : 0.0;
    const double iyz = ji.contains("iyz") ? number_at(ji, "iyz", ip) : 0.0;
    inertia << number_at(ji, "ixx", ip), ixy, ixz, ixy, number_at(ji, "iyy", ip), iyz, ixz, iyz,
        number_at(ji, "izz", ip);
    try {
      links.push_back(Link{link_name, SpatialInertia(mass, com, inertia, link_name), static_cast<int>(i) - 1});
    } catch (const InvalidModel& e) {
      throw ParseError(p, e.what());
    }
  }

  const json& jj = require(j, "joints", "");
  if (!jj.is_array()) throw ParseError("joints", "expected an array");
  if (jj.size() != links.size()) {
    throw ParseError("joints", "expected one joint per link (" + std::to_string(links.size()) + ")");
  }
  std::vector<Joint> joints;
  for (std::size_t i = 0; i < jj.size(); ++i) {
    const std::string p = index_path("joints", i);
    check_keys(jj[i], {"name", "type", "axis", "origin", "parent", "child"}, p);
    Joint joint;
    joint.name = jj[i].contains("name") ? as_string(jj[i].at("name"), join_path(p, "name")) : "joint" + std::to_string(i);
    const std::string type = as_string(require(jj[i], "type", p), join_path(p, "type"));
    if (type == "revolute") {
      joint.type = JointType::revolute;
    } else if (type == "prismatic") {
      joint.type = JointType::prismatic;
    } else {
      throw ParseError(join_path(p, "type"), "expected \"revolute\" or \"prismatic\", got \"" + type + "\"");
    }
    joint.axis = as_vec3(require(jj[i], "axis", p), join_path(p, "axis"));
    const FrameId parent = i == 0 ? kWorldFrame : links[i - 1].name;
    if (jj[i].contains("parent") && as_string(jj[i].at("parent"), join_path(p, "parent")) != parent) {
      throw ParseError(join_path(p, "parent"), "must be \"" + parent + "\" in a serial chain");
    }
    if (jj[i].contains("child") && as_string(jj[i].at("child"), join_path(p, "child")) != links[i].name) {
      throw ParseError(join_path(p, "child"), "must be \"" + links[i].name + "\"");
    }
    joint.origin = jj[i].contains("origin") ? parse_origin(jj[i].at("origin"), join_path(p, "origin"), links[i].name, parent)
                                            : SpatialTransform::identity(parent).relabel(links[i].name, parent);
    joints.push_back(std::move(joint));
  }

  const json& jc = require(j, "contact", "");
  check_keys(jc, {"link", "point", "normal"}, "contact");
  ContactSpec contact;
  const json& jcl = require(jc, "link", "contact");
  if (jcl.is_string()) {
    const std::string ln = jcl.get<std::string>();
    contact.link = -1;
    for (std::size_t i = 0; i < links.size(); ++i) {
      if (links[i].name == ln) contact.link = static_cast<int>(i);
    }
    if (contact.link < 0) throw ParseError("contact.link", "no link named \"" + ln + "\"");
  } else if (jcl.is_number_integer()) {
    contact.link = jcl.get<int>();
  } else {
    throw ParseError("contact.link", "expected a link name or index");
  }
  contact.point = as_vec3(require(jc, "point", "contact"), "contact.point");
  contact.normal = as_vec3(require(jc, "normal", "contact"), "contact.normal");

  try {
    return ChainModel(std::move(links), std::move(joints), contact, name);
  } catch (const InvalidModel& e) {
    throw ParseError("", e.what());
  }
}

json event_json(const std::optional<ImpactState>& s) {
  if (!s) return nullptr;
  return json{{"t", s->t}, {"x", s->x}, {"xdot", s->xdot}, {"f", s->f}, {"p", s->p}};
}

std::optional<ImpactState> event_from_json(const json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  check_keys(j, {"t", "x", "xdot", "f", "p"}, path);
  return ImpactState{number_at(j, "t", path), number_at(j, "x", path), number_at(j, "xdot", path),
                     number_at(j, "f", path), number_at(j, "p", path)};
}

std::vector<std::string> split_csv_line(const std::string& line, const std::string& where) {
  std::vector<std::string> cells;
  std::string cell;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cell += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cell += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else {
      cell += ch;
    }
  }
  if (quoted) throw ParseError(where, "unterminated quote");
  cells.push_back(cell);
  return cells;
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

double parse_cell(const std::string& text, const std::string& where) {
  if (text == "nan" || text == "NaN" || text.empty()) return std::numeric_limits<double>::quiet_NaN();
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (end == text.c_str() || *end != '\0') throw ParseError(where, "expected a number, got \"" + text + "\"");
  return v;
}

void require_columns(const Table& t, const std::vector<std::string>& expected, const std::string& source) {
  if (t.columns != expected) {
    std::string want;
    for (const auto& c : expected) want += (want.empty() ? "" : ",") + c;
    throw ParseError(source + " header", "expected \"" + want + "\"");
  }
}

std::vector<double> column_values(const Table& t, const std::string& name) {
  std::vector<double> v(t.rows.size());
  for (std::size_t i = 0; i < t.rows.size(); ++i) v[i] = t.number(i, name);
  return v;
}

}  // namespace

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError(path.string(), "cannot open file");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << text;
  if (!out) throw InputError("failed writing " + path.string());
}

ChainModel parse_chain(const std::string& text) { return chain_from_json(parse_json(text, "chain file")); }

ChainModel read_chain(const fs::path& path) {
  try {
    return parse_chain(read_text(path));
  } catch (const ParseError& e) {
    throw ParseError(e.field(), path.string() + ": " + (e.field().empty() ? e.what() : std::string(e.what()).substr(e.field().size() + 2)));
  }
}

std::string chain_to_json(const ChainModel& model) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["name"] = model.name();
  json links = json::array();
  for (const Link& l : model.links()) {
    const Mat3& i = l.inertia.rotational_inertia();
    links.push_back({{"name", l.name},
                     {"mass", l.inertia.mass()},
                     {"com", vec_json(l.inertia.com_offset())},
                     {"inertia",
                      {{"ixx", i(0, 0)}, {"iyy", i(1, 1)}, {"izz", i(2, 2)}, {"ixy", i(0, 1)}, {"ixz", i(0, 2)},
                       {"iyz", i(1, 2)}}}});
  }
  j["links"] = links;
  json joints = json::array();
  for (int i = 0; i < model.dof(); ++i) {
    const Joint& jt = model.joints()[static_cast<std::size_t>(i)];
    const Mat3& r = jt.origin.rotation();
    json rot = json::array();
    for (int row = 0; row < 3; ++row) rot.push_back(vec_json(r.row(row).transpose()));
    joints.push_back({{"name", jt.name},
                      {"type", to_string(jt.type)},
                      {"axis", vec_json(jt.axis)},
                      {"parent", model.parent_frame(i)},
                      {"child", model.links()[static_cast<std::size_t>(i)].name},
                      {"origin", {{"xyz", vec_json(jt.origin.translation())}, {"rotation", rot}}}});
  }
  j["joints"] = joints;
  j["contact"] = {{"link", model.links()[static_cast<std::size_t>(model.contact().link)].name},
                  {"point", vec_json(model.contact().point)},
                  {"normal", vec_json(model.contact().normal)}};
  return j.dump(2) + "\n";
}

void write_chain(const fs::path& path, const ChainModel& model) { write_text(path, chain_to_json(model)); }

Scenario parse_scenario(const std::string& text, const fs::path& base) {
  const json j = parse_json(text, "scenario file");
  check_keys(j, {"schema_version", "chain", "q", "speed", "restitution", "contact_model", "m_star", "velocities",
                 "profiles", "output_dir"},
             "");
  check_schema(j, "");
  Scenario s;
  auto resolve = [&](const fs::path& p) { return p.is_absolute() ? p : base / p; };

  if (j.contains("chain")) {
    s.chain_path = resolve(as_string(j.at("chain"), "chain"));
    if (!fs::exists(*s.chain_path)) throw ParseError("chain", "file not found: " + s.chain_path->string());
    try {
      s.chain = parse_chain(read_text(*s.chain_path));
    } catch (const ParseError& e) {
      throw ParseError("chain", s.chain_path->string() + ": " + e.what());
    }
  }
  if (j.contains("q")) {
    s.q = as_vector(j.at("q"), "q");
    if (s.chain && s.q->size() != s.chain->dof()) {
      throw ParseError("q", "expected " + std::to_string(s.chain->dof()) + " entries, got " +
                                std::to_string(s.q->size()));
    }
  }
  if (j.contains("speed")) {
    s.speed = as_number(j.at("speed"), "speed");
    if (!(*s.speed > 0.0)) throw ParseError("speed", "must be positive");
  }
  if (j.contains("restitution")) {
    s.restitution = as_number(j.at("restitution"), "restitution");
    if (!(*s.restitution >= 0.0 && *s.restitution <= 1.0)) throw ParseError("restitution", "must lie in [0, 1]");
  }
  if (j.contains("contact_model")) {
    const json& cm = j.at("contact_model");
    check_keys(cm, {"family", "k", "c"}, "contact_model");
    ContactModelSpec spec;
    try {
      spec.family = contact_family_from_string(as_string(require(cm, "family", "contact_model"), "contact_model.family"));
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError("contact_model.family", e.what());
    }
    for (const char* key : {"k", "c"}) {
      if (!cm.contains(key)) continue;
      const double v = number_at(cm, key, "contact_model");
      if (!(v > 0.0)) throw ParseError(join_path("contact_model", key), "must be positive");
      (std::string(key) == "k" ? spec.k : spec.c) = v;
    }
    s.contact_model = spec;
  }
  if (j.contains("m_star")) {
    const json& ms = j.at("m_star");
    check_keys(ms, {"method", "value"}, "m_star");
    if (ms.contains("method") == ms.contains("value")) throw ParseError("m_star", "give exactly one of method or value");
    if (ms.contains("method")) {
      try {
        s.m_star_method = iim_method_from_string(as_string(ms.at("method"), "m_star.method"));
      } catch (const ParseError&) {
        throw;
      } catch (const InputError& e) {
        throw ParseError("m_star.method", e.what());
      }
    } else {
      s.m_star_value = number_at(ms, "value", "m_star");
      if (!(*s.m_star_value > 0.0)) throw ParseError("m_star.value", "must be positive");
    }
  }
  if (j.contains("velocities")) {
    const Eigen::VectorXd v = as_vector(j.at("velocities"), "velocities");
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!(v(i) >= 0.0)) throw ParseError(index_path("velocities", static_cast<std::size_t>(i)), "speeds must be >= 0");
      s.velocities.push_back(v(i));
    }
  }
  if (j.contains("profiles")) {
    const json& jp = j.at("profiles");
    if (!jp.is_array()) throw ParseError("profiles", "expected an array of paths");
    for (std::size_t i = 0; i < jp.size(); ++i) s.profiles.push_back(resolve(as_string(jp[i], index_path("profiles", i))));
  }
  if (j.contains("output_dir")) s.output_dir = resolve(as_string(j.at("output_dir"), "output_dir"));
  return s;
}

Scenario read_scenario(const fs::path& path) {
  Scenario s = parse_scenario(read_text(path), path.parent_path());
  s.source = path;
  return s;
}

fs::path sidecar_path(const fs::path& csv) {
  fs::path p = csv;
  return p.replace_extension(".json");
}

ForceProfile read_profile(const fs::path& csv) {
  const Table t = read_table(csv);
  require_columns(t, {"time_s", "force_n"}, csv.string());
  ForceProfile p;
  p.time = column_values(t, "time_s");
  p.force = column_values(t, "force_n");
  p.label = csv.stem().string();
  p.v_pre = std::numeric_limits<double>::quiet_NaN();
  const fs::path side = sidecar_path(csv);
  if (fs::exists(side)) {
    const json j = parse_json(read_text(side), side.string());
    check_keys(j, {"schema_version", "sample_rate_hz", "v_pre", "label"}, "");
    check_schema(j, "");
    p.sample_rate_hz = number_at(j, "sample_rate_hz", "");
    if (j.contains("v_pre")) p.v_pre = null_to_nan(j.at("v_pre"), "v_pre");
    if (j.contains("label")) p.label = as_string(j.at("label"), "label");
  } else {
    if (p.size() < 2 || !(p.time.back() > p.time.front())) {
      throw MalformedProfile(csv.string() + ": cannot infer the sample rate without a sidecar");
    }
    p.sample_rate_hz = static_cast<double>(p.size() - 1) / (p.time.back() - p.time.front());
  }
  try {
    p.validate();
  } catch (const MalformedProfile& e) {
    throw MalformedProfile(csv.string() + ": " + e.what());
  }
  return p;
}

void write_profile(const fs::path& csv, const ForceProfile& profile) {
  Table t;
  t.columns = {"time_s", "force_n"};
  for (std::size_t i = 0; i < profile.size(); ++i) {
    t.rows.push_back({format_double(profile.time[i]), format_double(profile.force[i])});
  }
  write_table(csv, t);
  json j{{"schema_version", kSchemaVersion},
         {"sample_rate_hz", profile.sample_rate_hz},
         {"v_pre", nan_to_null(profile.v_pre)},
         {"label", profile.label}};
  write_text(sidecar_path(csv), j.dump(2) + "\n");
}

void write_trace(const fs::path& csv, const ImpactTrace& trace) {
  Table t;
  t.columns = {"time", "x", "xdot", "f_n", "p_n", "E_k", "E_p", "E_d", "residual"};
  const bool energy = trace.e_k.size() == trace.size();
  for (std::size_t i = 0; i < trace.size(); ++i) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    t.rows.push_back({format_double(trace.t[i]), format_double(trace.x[i]), format_double(trace.xdot[i]),
                      format_double(trace.f_n[i]), format_double(trace.p_n[i]),
                      format_double(energy ? trace.e_k[i] : nan), format_double(energy ? trace.e_p[i] : nan),
                      format_double(energy ? trace.e_d[i] : nan), format_double(energy ? trace.residual[i] : nan)});
  }
  write_table(csv, t);

  const ImpactEvents& ev = trace.events;
  json summary{{"cor", nan_to_null(trace.cor())},
               {"duration", trace.duration()},
               {"exit_velocity", nan_to_null(trace.exit_velocity())},
               {"peak_force", trace.peak_force()},
               {"initial_energy", trace.initial_energy()}};
  if (energy && trace.size() > 0) {
    summary["final_kinetic_energy"] = trace.e_k.back();
    summary["final_potential_energy"] = trace.e_p.back();
    summary["dissipated_energy"] = trace.e_d.back();
    summary["max_energy_residual"] = trace.max_energy_residual();
  }
  json j{{"schema_version", kSchemaVersion},
         {"model",
          {{"family", to_string(trace.model.family)},
           {"k", trace.model.k},
           {"c", trace.model.c},
           {"m_star", trace.model.m_star}}},
         {"v_pre", trace.v_pre},
         {"events",
          {{"compression_end", event_json(ev.compression_end)},
           {"peak_force", event_json(ev.peak_force)},
           {"restitution_end", event_json(ev.restitution_end)},
           {"force_lost_during_compression", ev.force_lost_during_compression}}},
         {"summary", summary}};
  write_text(sidecar_path(csv), j.dump(2) + "\n");
}

ImpactTrace read_trace(const fs::path& csv) {
  const Table t = read_table(csv);
  require_columns(t, {"time", "x", "xdot", "f_n", "p_n", "E_k", "E_p", "E_d", "residual"}, csv.string());
  ImpactTrace trace;
  trace.t = column_values(t, "time");
  trace.x = column_values(t, "x");
  trace.xdot = column_values(t, "xdot");
  trace.f_n = column_values(t, "f_n");
  trace.p_n = column_values(t, "p_n");
  trace.e_k = column_values(t, "E_k");
  trace.e_p = column_values(t, "E_p");
  trace.e_d = column_values(t, "E_d");
  trace.residual = column_values(t, "residual");
  trace.dissipated = trace.e_d;

  const fs::path side = sidecar_path(csv);
  const json j = parse_json(read_text(side), side.string());
  check_keys(j, {"schema_version", "model", "v_pre", "events", "summary"}, "");
  check_schema(j, "");
  const json& m = require(j, "model", "");
  check_keys(m, {"family", "k", "c", "m_star"}, "model");
  trace.model.family = contact_family_from_string(as_string(require(m, "family", "model"), "model.family"));
  trace.model.k = number_at(m, "k", "model");
  trace.model.c = number_at(m, "c", "model");
  trace.model.m_star = number_at(m, "m_star", "model");
  trace.v_pre = number_at(j, "v_pre", "");
  const json& ev = require(j, "events", "");
  check_keys(ev, {"compression_end", "peak_force", "restitution_end", "force_lost_during_compression"}, "events");
  trace.events.compression_end = event_from_json(require(ev, "compression_end", "events"), "events.compression_end");
  trace.events.peak_force = event_from_json(require(ev, "peak_force", "events"), "events.peak_force");
  trace.events.restitution_end = event_from_json(require(ev, "restitution_end", "events"), "events.restitution_end");
  if (ev.contains("force_lost_during_compression")) {
    const json& lost = ev.at("force_lost_during_compression");
    if (!lost.is_boolean()) throw ParseError("events.force_lost_during_compression", "expected a boolean");
    trace.events.force_lost_during_compression = lost.get<bool>();
  }
  return trace;
}

std::size_t Table::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i) {
    if (columns[i] == name) return i;
  }
  throw ParseError(name, "no such column");
}

double Table::number(std::size_t row, const std::string& name) const {
  const std::size_t c = column(name);
  return parse_cell(rows.at(row).at(c), name + " (row " + std::to_string(row + 1) + ")");
}

Table parse_table(const std::string& text, const std::string& source) {
  Table t;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(line_no);
    auto cells = split_csv_line(line, where);
    if (t.columns.empty()) {
      for (auto& c : cells) {
        const auto a = c.find_first_not_of(" \t");
        const auto b = c.find_last_not_of(" \t");
        c = a == std::string::npos ? std::string() : c.substr(a, b - a + 1);
      }
      t.columns = std::move(cells);
      continue;
    }
    if (cells.size() != t.columns.size()) {
      throw ParseError(where, "expected " + std::to_string(t.columns.size()) + " cells, got " +
                                  std::to_string(cells.size()));
    }
    t.rows.push_back(std::move(cells));
  }
  if (t.columns.empty()) throw ParseError(source, "missing header row");
  return t;
}

Table read_table(const fs::path& csv) { return parse_table(read_text(csv), csv.string()); }

void write_table(const fs::path& csv, const Table& table) {
  std::string out;
  auto emit = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(cells[i]);
    }
    out += '\n';
  };
  emit(table.columns);
  for (const auto& r : table.rows) emit(r);
  write_text(csv, out);
}

}  // namespace impact
