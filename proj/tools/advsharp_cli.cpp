// advsharp command-line front end. Talks to the library through the C API only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"
#include "advsharp/advsharp.h"

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> data_dir;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::vector<std::string> only;
};

constexpr int kConfigExit = 2;

// Config file (if any) with the command-line flags applied on top.
std::optional<nlohmann::json> merged_config(const Flags& f) {
  nlohmann::json j = nlohmann::json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    if (!in) {
      std::cerr << "error: cannot open config " << f.config << "\n";
      return std::nullopt;
    }
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      std::cerr << "error: config " << f.config << " is not valid JSON: " << e.what() << "\n";
      return std::nullopt;
    }
    if (!j.is_object()) {
      std::cerr << "error: config must be a JSON object\n";
      return std::nullopt;
    }
  }
  if (f.data_dir) j["dataset"]["data_dir"] = *f.data_dir;
  if (f.out) j["outputs"] = *f.out;
  if (f.jobs) j["jobs"] = *f.jobs;
  if (f.seed) {
    j["train"]["seed"] = *f.seed;
    j["landscape"]["seed"] = *f.seed;
    j["verify"]["seed"] = *f.seed;
  }
  if (!f.only.empty()) j["verify"]["only"] = f.only;
  return j;
}

int run(const std::string& command, const Flags& flags) {
  const auto cfg = merged_config(flags);
  if (!cfg) return kConfigExit;
  char* report = nullptr;
  const advsharp_status st = advsharp_run_command(command.c_str(), cfg->dump().c_str(), &report);
  if (report) {
    std::cout << report << "\n";
    advsharp_string_free(report);
  }
  if (st != ADVSHARP_OK) {
    std::cerr << command << ": " << advsharp_status_name(st) << ": " << advsharp_last_error() << "\n";
  }
  return advsharp_exit_code(st);
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "experiment config (JSON)");
  sub->add_option("--data-dir", f.data_dir, "directory with the MNIST IDX files");
  sub->add_option("--out", f.out, "output directory");
  sub->add_option("--seed", f.seed, "seed for training, landscape directions and checks");
  sub->add_option("--jobs", f.jobs, "grid points run in parallel")->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adversarial training sharpness experiments for logistic regression"};
  app.set_version_flag("--version", std::string(advsharp_version()));
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "train one checkpoint per grid epsilon; writes accuracy.csv"},
      {"landscape", "loss landscape around each checkpoint; writes CSV and SVG"},
      {"spectrum", "top Hessian eigenvalues per checkpoint; writes spectrum.csv"},
      {"verify", "run the oracle suite; writes verify.json"},
      {"all", "train, landscape, spectrum, then verify"},
  };
  std::vector<CLI::App*> subs;
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    if (name == "verify" || name == "all") {
      sub->add_option("--only", flags.only, "run only the named checks");
    }
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  for (CLI::App* sub : subs) {
    if (!sub->parsed()) continue;
    const std::string name = sub->get_name();
    if (name != "all") return run(name, flags);
    for (const char* step : {"train", "landscape", "spectrum", "verify"}) {
      const int code = run(step, flags);
      if (code != 0) return code;
    }
    return 0;
  }
  return kConfigExit;
}
