// Batch front end: spectrum / bethe / oracle / potential / verify.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "tmboson/config.hpp"
#include "tmboson/oracle.hpp"
#include "tmboson/report.hpp"
#include "tmboson/runner.hpp"
#include "tmboson/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct CommonArgs {
  std::string config_path;
  std::vector<std::string> blocks;
  std::optional<long long> charge;
  std::optional<double> tol;
  std::optional<int> starts;
  std::optional<long long> seed;
  std::optional<int> jobs;
  std::string out_path;
  std::string format;
};

void add_common_options(CLI::App* cmd, CommonArgs* args, bool solver_flags) {
  cmd->add_option("--config", args->config_path, "JSON run configuration")->required();
  cmd->add_option("--block", args->blocks, "block selector M,delta1,delta2 (repeatable)");
  auto* charge = cmd->add_option_function<long long>(
      "--charge", [args](const long long& k) { args->charge = k; },
      "enumerate all blocks with conserved charge K");
  charge->default_str("");
  if (solver_flags) {
    cmd->add_option_function<double>(
        "--tol", [args](const double& v) { args->tol = v; }, "solver residual tolerance");
    cmd->add_option_function<int>(
        "--starts", [args](const int& v) { args->starts = v; }, "multistart count");
    cmd->add_option_function<long long>(
        "--seed", [args](const long long& v) { args->seed = v; }, "RNG seed");
  }
  cmd->add_option_function<int>(
      "--jobs", [args](const int& v) { args->jobs = v; }, "parallel block workers");
  cmd->add_option("--out", args->out_path, "output path (default stdout)");
  cmd->add_option("--format", args->format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
}

tmb::BlockLabel parse_block_flag(const std::string& text) {
  tmb::BlockLabel label;
  if (std::sscanf(text.c_str(), "%d,%d,%d", &label.M, &label.delta1, &label.delta2) != 3) {
    throw tmb::ConfigError("--block expects M,delta1,delta2 (got '" + text + "')");
  }
  return label;
}

tmb::RunConfig load_config(const CommonArgs& args) {
  tmb::RunConfig config = tmb::parse_config_file(args.config_path);
  if (!args.blocks.empty()) {
    config.blocks.clear();
    for (const std::string& text : args.blocks) {
      config.blocks.push_back(parse_block_flag(text));
    }
    config.charge.reset();
  }
  if (args.charge) config.charge = *args.charge;
  if (args.tol) config.solver.tol = *args.tol;
  if (args.starts) config.solver.starts = *args.starts;
  if (args.seed) config.solver.seed = static_cast<std::uint64_t>(*args.seed);
  if (args.jobs) config.jobs = *args.jobs;
  if (!args.out_path.empty()) config.out_path = args.out_path;
  if (args.format == "json") config.format = tmb::OutputFormat::kJson;
  if (args.format == "csv") config.format = tmb::OutputFormat::kCsv;
  for (const tmb::BlockLabel& label : config.blocks) {
    tmb::validate_label(config.model, label);
  }
  return config;
}

int emit(const std::string& payload, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << payload;
    return kExitOk;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << out_path << "\n";
    return kExitRuntime;
  }
  out << payload;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(tmb::kToolName) + " " + tmb::kToolVersion +
               " - exact spectra of two-mode boson models"};
  app.require_subcommand(1);

  CommonArgs spectrum_args, bethe_args, oracle_args, potential_args;
  auto* spectrum = app.add_subcommand("spectrum", "oracle + Bethe solve + pairing per block");
  add_common_options(spectrum, &spectrum_args, true);
  auto* bethe = app.add_subcommand("bethe", "Bethe-ansatz solve only");
  add_common_options(bethe, &bethe_args, true);
  auto* oracle = app.add_subcommand("oracle", "exact diagonalization only");
  add_common_options(oracle, &oracle_args, true);
  auto* potential = app.add_subcommand("potential", "Schroedinger potential of one block");
  add_common_options(potential, &potential_args, true);

  tmb::VerifyConfig verify_config;
  auto* verify = app.add_subcommand("verify", "run the cross-validation property suites");
  verify->add_option("--max-degree", verify_config.max_degree, "sweep s, r up to this degree");
  verify->add_option("--max-m", verify_config.max_m, "sweep block size up to this M");
  verify->add_option("--draws", verify_config.draws, "random coupling draws per block");
  verify->add_option_function<long long>(
      "--seed", [&verify_config](const long long& v) {
        verify_config.seed = static_cast<std::uint64_t>(v);
      },
      "sweep RNG seed");
  verify
      ->add_flag("--inject-qminus-sign-flip", verify_config.mutate_qminus_sign,
                 "fault-injection hook: flip the sign of Q- before the commutator suite")
      ->group("");  // hidden

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (spectrum->parsed() || bethe->parsed() || oracle->parsed()) {
      const CommonArgs& args =
          spectrum->parsed() ? spectrum_args : (bethe->parsed() ? bethe_args : oracle_args);
      const tmb::RunConfig config = load_config(args);
      tmb::SpectrumReport report;
      if (spectrum->parsed()) {
        report = tmb::cmd_spectrum(config);
      } else if (bethe->parsed()) {
        report = tmb::cmd_bethe(config);
      } else {
        report = tmb::cmd_oracle(config);
      }
      const std::string payload = config.format == tmb::OutputFormat::kCsv
                                      ? tmb::to_csv(report)
                                      : tmb::dump_json(tmb::to_json(report));
      return emit(payload, config.out_path);
    }
    if (potential->parsed()) {
      const tmb::RunConfig config = load_config(potential_args);
      const tmb::PotentialReport report = tmb::cmd_potential(config);
      const std::string payload = config.format == tmb::OutputFormat::kCsv
                                      ? tmb::to_csv(report)
                                      : tmb::dump_json(tmb::to_json(report));
      return emit(payload, config.out_path);
    }
    if (verify->parsed()) {
      const tmb::VerifyReport report = tmb::cmd_verify(verify_config);
      for (const auto& suite : report.suites) {
        std::printf("%-20s %s  (%.2fs)  %s\n", suite.name.c_str(),
                    suite.pass ? "PASS" : "FAIL", suite.seconds, suite.detail.c_str());
      }
      std::printf("verify: %s\n", report.all_pass ? "all suites passed" : "FAILURES present");
      return report.all_pass ? kExitOk : kExitRuntime;
    }
  } catch (const tmb::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}
