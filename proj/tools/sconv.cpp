#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sconv/errors.hpp"
#include "sconv/random.hpp"
#include "sconv/scenario.hpp"

namespace {

struct Flags {
  std::string scenario;
  std::string out = ".";
  unsigned threads = 1;
  std::size_t dim_cap = sconv::kDefaultDimCap;
};

int fail(int code, const std::string& message, const std::string& field) {
  std::cout << sconv::error_json(message, field).dump() << "\n";
  return code;
}

int run(const std::string& task, const Flags& flags) {
  try {
    sconv::Scenario s;
    if (flags.scenario.empty()) {
      if (task != "verify") return fail(sconv::kExitValidation, "--scenario is required", "scenario");
      s.task = "verify";
    } else {
      s = sconv::load_scenario(flags.scenario);
      if (s.task != task) {
        return fail(sconv::kExitValidation, "scenario task '" + s.task + "' does not match subcommand '" + task + "'",
                    "task");
      }
    }
    sconv::RunOptions opts;
    opts.out_dir = flags.out;
    opts.threads = flags.threads;
    opts.dim_cap = flags.dim_cap;
    opts.seed = sconv::seed_from_env();
    const sconv::RunResult r = sconv::run_scenario(s, opts);
    std::cout << r.summary.dump(2) << "\n";
    return r.exit_code;
  } catch (const sconv::ValidationError& e) {
    return fail(sconv::kExitValidation, e.what(), e.field());
  } catch (const sconv::ResourceError& e) {
    return fail(sconv::kExitRuntime, e.what(), "dim_cap");
  } catch (const std::exception& e) {
    return fail(sconv::kExitRuntime, e.what(), "");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rényi divergences, strong converse exponents and their finite-n checks"};
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  for (const std::string& task : sconv::kTasks) {
    CLI::App* sub = app.add_subcommand(task, "run a '" + task + "' scenario");
    sub->add_option("--scenario", flags.scenario, "scenario JSON file");
    sub->add_option("--out", flags.out, "output directory")->capture_default_str();
    sub->add_option("--threads", flags.threads, "worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    sub->add_option("--dim-cap", flags.dim_cap, "largest Hilbert-space dimension to build")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    sub->callback([&chosen, task] { chosen = task; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return fail(sconv::kExitValidation, e.what(), "arguments");
  }
  return run(chosen, flags);
}
