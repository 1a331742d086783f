/**
 * @file commands.hpp
 * @brief The iim / impulse / simulate / identify / sweep workflows.
 *
 * Each command resolves its inputs from a scenario file and command-line
 * overrides, returns a JSON summary and, when an output directory is set,
 * writes its files there. Speeds on the command line and in scenarios are
 * magnitudes along -normal (m/s, >= 0); v_pre = -speed.
 */
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "impact/chain.hpp"
#include "impact/contact.hpp"
#include "impact/identification.hpp"
#include "impact/iim.hpp"

namespace impact {

struct CommandOptions {
  std::optional<std::filesystem::path> scenario;
  std::optional<std::filesystem::path> chain;
  std::optional<std::filesystem::path> out;
  std::optional<ContactFamily> model;
  std::optional<double> k;
  std::optional<double> c;
  std::optional<double> m_star;
  std::vector<double> velocities;
  /// Profile CSV files or directories of them.
  std::vector<std::filesystem::path> profiles;
  int parallel = 1;
  /// identify only: drop everything but the first lobe above this force (N).
  std::optional<double> trim_threshold;
  /// identify only: moving-average width.
  int smoothing_width = 1;
};

using RunSummary = nlohmann::json;

/// Per-method IIM, effective mass and impulse quantities at one configuration.
struct IimReport {
  struct Entry {
    IimMethod method;
    std::optional<Mat3> w;
    double effective_mass = 0.0;
    std::string error;
  };
  std::vector<Entry> entries;  ///< gm, em, crb, crb_flex
  std::optional<Mat3> em;      ///< operational-space mass block
  std::string em_error;
  Mat3 flex_correction = Mat3::Zero();
  /// |W_gm - (W_crb + W_flex)| / |W_gm| (Frobenius).
  double identity_residual = 0.0;
  /// |crb closed form - crb via the 6x6 CRB inertia| / |crb|.
  double crb_cross_check = 0.0;
  Vec3 normal = Vec3::UnitZ();  ///< contact frame
};

IimReport iim_report(const ChainModel& chain, const Eigen::VectorXd& q);

struct ImpulseRow {
  double speed = 0.0;
  /// Compression-end impulse per method (NaN when the method failed).
  double p_gm = 0.0, p_em = 0.0, p_crb = 0.0, p_crb_flex = 0.0;
  /// (1 + e_r) times the above.
  double pr_gm = 0.0, pr_em = 0.0, pr_crb = 0.0, pr_crb_flex = 0.0;
  /// Normal component of (1 + e_r) m_em v_pre, reported as a magnitude.
  double algebraic = 0.0;
  double restitution = 0.0;
};

ImpulseRow impulse_row(const ChainModel& chain, const Eigen::VectorXd& q, const IimReport& report, double speed,
                       double restitution);

struct SweepRow {
  ImpulseRow impulse;
  /// Simulated with m* from the selected method; NaN without a contact model.
  double m_star = 0.0;
  double cor = 0.0;
  double duration = 0.0;
  double peak_force = 0.0;
  double energy_loss = 0.0;
};

RunSummary cmd_iim(const CommandOptions& options);
RunSummary cmd_impulse(const CommandOptions& options);
RunSummary cmd_simulate(const CommandOptions& options);
RunSummary cmd_identify(const CommandOptions& options);
RunSummary cmd_sweep(const CommandOptions& options);

/// Runs fn(i) for i in [0, n) on up to `workers` threads; rethrows the first
/// exception after all workers finish.
void parallel_for(std::size_t n, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace impact
