// holovar: batch experiment driver for flat-connection moduli on
// nonorientable surfaces and their double covers.
//
// Exit status: 0 success, 2 invalid configuration, 3 when the numerical
// failure rate exceeded the configured ceiling.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "holovar/experiment.hpp"
#include "holovar/report.hpp"

namespace {

using holovar::ExperimentConfig;
using holovar::Json;

struct CommonFlags {
  std::vector<std::string> group;
  std::vector<std::string> surface;
  int twist = 0;
  int trials = 1;
  std::uint64_t seed = 0;
  int perturbations = 10;
  int jobs = 0;
  double failure_ceiling = 0.25;
  std::string out_path;
  double eps_group = -1, eps_rel = -1, eps_align = -1, eps_center = -1;
};

void add_common(CLI::App* cmd, CommonFlags& flags, bool finite_group) {
  cmd->set_config("--config", "", "read options from a key-value file");
  if (finite_group) {
    cmd->add_option("--group", flags.group, "finite group name (q8 d4 s3 z4 z3 z2xz2)")
        ->expected(1)
        ->required();
  } else {
    cmd->add_option("--group", flags.group, "matrix group: family (su|so|sp) and rank")
        ->expected(2)
        ->required();
  }
  cmd->add_option("--surface", flags.surface, "surface: kind (rp2|klein|orientable) and ell")
      ->expected(2)
      ->required();
  cmd->add_option("--twist", flags.twist, "index into the center table");
  cmd->add_option("--trials", flags.trials, "number of seeded trials");
  cmd->add_option("--seed", flags.seed, "master seed");
  cmd->add_option("--perturbations", flags.perturbations,
                  "gauge perturbations per surjectivity trial");
  cmd->add_option("--jobs", flags.jobs, "worker threads (0 = hardware)");
  cmd->add_option("--failure-ceiling", flags.failure_ceiling,
                  "maximum tolerated trial failure rate");
  cmd->add_option("--out", flags.out_path, "write the JSON report here");
  cmd->add_option("--eps-group", flags.eps_group, "group membership tolerance");
  cmd->add_option("--eps-rel", flags.eps_rel, "relation residual tolerance");
  cmd->add_option("--eps-align", flags.eps_align, "alignment acceptance tolerance");
  cmd->add_option("--eps-center", flags.eps_center, "central snap radius");
}

ExperimentConfig build_config(const std::string& command, const CommonFlags& flags,
                              bool finite_group) {
  ExperimentConfig config;
  config.command = command;
  if (finite_group) {
    config.finite_group = holovar::parse_builtin_group(flags.group.at(0));
  } else {
    config.group = holovar::GroupId(holovar::parse_family(flags.group.at(0)),
                                    std::stoi(flags.group.at(1)));
  }
  config.surface = holovar::SurfacePresentation(
      holovar::parse_surface_kind(flags.surface.at(0)), std::stoi(flags.surface.at(1)));
  config.twist_index = flags.twist;
  config.trials = flags.trials;
  config.seed = flags.seed;
  config.perturbations = flags.perturbations;
  config.jobs = flags.jobs;
  config.failure_ceiling = flags.failure_ceiling;
  if (flags.eps_group > 0) config.tol.eps_group = flags.eps_group;
  if (flags.eps_rel > 0) config.tol.eps_rel = flags.eps_rel;
  if (flags.eps_align > 0) config.tol.eps_align = flags.eps_align;
  if (flags.eps_center > 0) config.tol.eps_center = flags.eps_center;
  return config;
}

int emit_report(const holovar::RunOutcome& outcome, const std::string& out_path) {
  const std::string text = outcome.report.dump(2);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << "\n";
      return 2;
    }
    out << text << "\n";
    std::cout << "report written to " << out_path << "\n";
  }
  return outcome.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"moduli of flat connections on nonorientable surfaces: experiment driver"};
  app.set_config("--config", "", "read options from a key-value file");
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> numeric_commands = {
      {"sample", "sample on-variety holonomy tuples and report residuals"},
      {"involution-check", "tau identities and fixed-class witnesses on diagonal embeds"},
      {"fiber-count", "count the fiber of the comparison map over sampled points"},
      {"surjectivity-probe", "twist classes of N_r points and their gauge stability"},
      {"phi-check", "two-basepoint to one-basepoint change of model"},
      {"lift-degree", "lifting obstruction classes of center-projected tuples"},
  };
  std::vector<std::unique_ptr<CommonFlags>> flag_blocks;
  std::vector<std::pair<CLI::App*, CommonFlags*>> numeric_cmds;
  for (const auto& [name, description] : numeric_commands) {
    auto flags = std::make_unique<CommonFlags>();
    CLI::App* cmd = app.add_subcommand(name, description);
    add_common(cmd, *flags, false);
    numeric_cmds.emplace_back(cmd, flags.get());
    flag_blocks.push_back(std::move(flags));
  }

  auto oracle_flags = std::make_unique<CommonFlags>();
  CLI::App* oracle_cmd =
      app.add_subcommand("oracle", "exact enumeration over a builtin finite group");
  add_common(oracle_cmd, *oracle_flags, true);

  CLI::App* report_cmd =
      app.add_subcommand("report", "summarize degree reports into a comparison table");
  std::vector<std::string> report_files;
  std::string csv_path, table_path;
  report_cmd->add_option("files", report_files, "report JSON files")->required();
  report_cmd->add_option("--csv", csv_path, "write the CSV table here");
  report_cmd->add_option("--out", table_path, "write the text table here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    for (const auto& [cmd, flags] : numeric_cmds) {
      if (cmd->parsed()) {
        const auto outcome =
            holovar::run_experiment(build_config(cmd->get_name(), *flags, false));
        return emit_report(outcome, flags->out_path);
      }
    }
    if (oracle_cmd->parsed()) {
      const auto outcome =
          holovar::run_experiment(build_config("oracle", *oracle_flags, true));
      return emit_report(outcome, oracle_flags->out_path);
    }
    if (report_cmd->parsed()) {
      std::vector<Json> reports;
      for (const std::string& path : report_files) {
        std::ifstream in(path);
        if (!in) {
          std::cerr << "cannot read " << path << "\n";
          return 2;
        }
        reports.push_back(Json::parse(in));
      }
      const holovar::SummaryTable table = holovar::summarize(reports);
      const std::string text = holovar::render_text(table);
      if (table_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream out(table_path);
        out << text;
      }
      if (!csv_path.empty()) {
        std::ofstream out(csv_path);
        out << holovar::render_csv(table);
      }
      return 0;
    }
  } catch (const holovar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
