// Command-line front end. Exit codes: 0 success, 2 input or usage error,
// 3 numerical failure.
#include <cstdio>
#include <iostream>
#include <map>

#include "CLI11.hpp"
#include "impact/commands.hpp"

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

void add_common(CLI::App* sub, impact::CommandOptions& o, std::string& model) {
  sub->add_option("--scenario", o.scenario, "Scenario JSON file");
  sub->add_option("--chain", o.chain, "Chain JSON file (overrides the scenario)");
  sub->add_option("--out", o.out, "Output directory");
  sub->add_option("--model", model, "Contact model")->check(CLI::IsMember({"spring", "maxwell", "viscoelastic"}));
  sub->add_option("--k", o.k, "Stiffness k (N/m)");
  sub->add_option("--c", o.c, "Damping c (N s/m^2 viscoelastic, N s/m maxwell)");
  sub->add_option("--velocity", o.velocities, "Contact speed(s) along -normal (m/s)");
  sub->add_option("--profiles", o.profiles, "Profile CSV files or directories");
  sub->add_option("--m-star", o.m_star, "Effective mass (kg)");
  sub->add_option("--parallel", o.parallel, "Worker threads")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Impact model toolkit for fixed-base serial robots"};
  app.require_subcommand(1);

  impact::CommandOptions options;
  std::string model;
  double trim = -1.0;

  std::map<std::string, impact::RunSummary (*)(const impact::CommandOptions&)> commands{
      {"iim", impact::cmd_iim},
      {"impulse", impact::cmd_impulse},
      {"simulate", impact::cmd_simulate},
      {"identify", impact::cmd_identify},
      {"sweep", impact::cmd_sweep}};
  const std::map<std::string, std::string> help{
      {"iim", "Inverse inertia matrix candidates and effective masses"},
      {"impulse", "Compression- and restitution-end impulses per method"},
      {"simulate", "Simulate a normal impact and write the trace"},
      {"identify", "Fit contact parameters to measured force profiles"},
      {"sweep", "Impulse predictions and simulations over several speeds"}};
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    add_common(sub, options, model);
    if (name == "identify") {
      sub->add_option("--trim", trim, "Keep only the first lobe above this force (N)");
      sub->add_option("--smooth", options.smoothing_width, "Moving-average width (odd)");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (!model.empty()) options.model = impact::contact_family_from_string(model);
    if (trim >= 0.0) options.trim_threshold = trim;
    for (const auto& [name, fn] : commands) {
      if (app.got_subcommand(name)) {
        std::cout << fn(options).dump(2) << "\n";
        return 0;
      }
    }
  } catch (const impact::InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const impact::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitInput;
}
