/**
 * @file io.hpp
 * @brief Chain, scenario, profile and trace files.
 *
 * Every JSON document carries "schema_version" (currently 1) and unknown
 * keys are rejected. Angles are radians. Numbers are written with 17
 * significant digits so every file reads back to the same doubles.
 *
 * Chain file:
 *   { "schema_version": 1, "name": "...",
 *     "links":  [ { "name", "mass", "com": [x,y,z],
 *                   "inertia": { "ixx","iyy","izz","ixy","ixz","iyz" } } ],
 *     "joints": [ { "name", "type": "revolute"|"prismatic", "axis": [..],
 *                   "origin": { "xyz": [..], "rpy": [..] | "rotation": [[..],[..],[..]] },
 *                   "parent"?, "child"? } ],
 *     "contact": { "link", "point": [..], "normal": [..] } }
 * Inertia is about the link COM in link axes. Joint i moves link i relative
 * to link i-1 ("world" for the first joint).
 *
 * Scenario file (all keys but schema_version optional):
 *   { "schema_version": 1, "chain": "relative/or/absolute.json", "q": [..],
 *     "speed": m/s > 0, "restitution": [0,1],
 *     "contact_model": { "family", "k", "c"? },
 *     "m_star": { "method": "gm"|"em"|"crb"|"crb_flex" } | { "value": kg },
 *     "velocities": [m/s, ...], "profiles": ["a.csv", ...], "output_dir": "..." }
 * Relative paths resolve against the scenario file's directory.
 *
 * Profile: CSV "time_s,force_n" plus an optional sidecar with the same stem
 * and a .json extension: { "schema_version", "sample_rate_hz", "v_pre", "label" }.
 *
 * Trace: CSV "time,x,xdot,f_n,p_n,E_k,E_p,E_d,residual" plus a .json sidecar
 * holding the model, events and summary scalars.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "impact/chain.hpp"
#include "impact/contact.hpp"
#include "impact/iim.hpp"
#include "impact/profile.hpp"

namespace impact {

inline constexpr int kSchemaVersion = 1;

/// Shortest text for a double that parses back to the same value (%.17g).
std::string format_double(double value);

ChainModel parse_chain(const std::string& text);
ChainModel read_chain(const std::filesystem::path& path);
std::string chain_to_json(const ChainModel& model);
void write_chain(const std::filesystem::path& path, const ChainModel& model);

struct ContactModelSpec {
  ContactFamily family = ContactFamily::viscoelastic;
  std::optional<double> k;
  std::optional<double> c;
};

struct Scenario {
  std::filesystem::path source;
  std::optional<std::filesystem::path> chain_path;
  std::optional<ChainModel> chain;
  std::optional<Eigen::VectorXd> q;
  std::optional<double> speed;
  std::optional<double> restitution;
  std::optional<ContactModelSpec> contact_model;
  std::optional<IimMethod> m_star_method;
  std::optional<double> m_star_value;
  std::vector<double> velocities;
  std::vector<std::filesystem::path> profiles;
  std::optional<std::filesystem::path> output_dir;
};

/// Parses a scenario; `base` resolves relative paths. The referenced chain
/// is loaded and checked against q.
Scenario parse_scenario(const std::string& text, const std::filesystem::path& base);
Scenario read_scenario(const std::filesystem::path& path);

/// Reads a profile CSV and its sidecar if present. Without a sidecar the
/// sample rate comes from the time column, v_pre is NaN and the label is
/// the file stem.
ForceProfile read_profile(const std::filesystem::path& csv);
void write_profile(const std::filesystem::path& csv, const ForceProfile& profile);
std::filesystem::path sidecar_path(const std::filesystem::path& csv);

void write_trace(const std::filesystem::path& csv, const ImpactTrace& trace);
ImpactTrace read_trace(const std::filesystem::path& csv);

/// Plain CSV with a header row; cells are kept as text.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
  double number(std::size_t row, const std::string& name) const;
};

void write_table(const std::filesystem::path& csv, const Table& table);
Table read_table(const std::filesystem::path& csv);
Table parse_table(const std::string& text, const std::string& source = "csv");

std::string read_text(const std::filesystem::path& path);
void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace impact
