#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "sconv/families.hpp"
#include "sconv/serialize.hpp"

namespace sconv {

inline const std::vector<std::string> kTasks = {"renyi", "hoeffding", "np-sweep", "sc-report",
                                                "ldp",   "family",    "verify"};

struct Scenario {
  std::string task;
  std::optional<StateFamilySpec> family;
  Json params = Json::object();
};

// Validates the task name, the family (when present) and the task's params.
Scenario parse_scenario(const Json& j);
// Reads and parses a scenario file; malformed JSON is a ValidationError
// whose field names the byte offset.
Scenario load_scenario(const std::string& path);

struct RunOptions {
  std::string out_dir = ".";
  unsigned threads = 1;
  std::size_t dim_cap = kDefaultDimCap;
  std::uint64_t seed = 42;
};

enum ExitCode { kExitOk = 0, kExitRuntime = 1, kExitValidation = 2, kExitInvariant = 3 };

struct RunResult {
  int exit_code = kExitOk;
  Json summary;                     // written to <task>.json and printed by the CLI
  std::vector<std::string> files;   // artifacts written under out_dir
};

RunResult run_scenario(const Scenario& s, const RunOptions& opts);

// {"error": message, "field": field}
Json error_json(const std::string& message, const std::string& field);

}  // namespace sconv
