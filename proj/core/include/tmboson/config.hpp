#ifndef TMBOSON_CONFIG_HPP
#define TMBOSON_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "tmboson/bethe.hpp"
#include "tmboson/model.hpp"
#include "tmboson/qes.hpp"

namespace tmb {

/// Schema violations; the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class OutputFormat { kJson, kCsv };

struct QesConfig {
  double z_lo = 0.25;
  double z_hi = 4.0;
  int samples = 201;
  int branch_sign = +1;
  FdGridConfig grid;
  bool equivalence = false;  // run the -E membership report
  bool emit_states = true;   // include psi_tilde columns
};

struct RunConfig {
  ModelParams model;
  std::vector<BlockLabel> blocks;      // explicit selectors, may be empty
  std::optional<long long> charge;     // alternative selector
  SolverConfig solver;
  QesConfig qes;
  std::string out_path;                // empty = stdout
  OutputFormat format = OutputFormat::kJson;
  int jobs = 1;

  /// Explicit blocks plus the expansion of the charge selector.
  std::vector<BlockLabel> resolved_blocks() const;
};

/// Parses and schema-validates a config document. Unknown keys are rejected
/// with a path diagnostic. Coupling fields accept decimals or exact "p/q"
/// strings; label fields accept integers only.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig parse_config_file(const std::string& path);

/// Canonical key-sorted JSON of a fully resolved config (defaults filled).
nlohmann::json canonical_config_json(const RunConfig& config);

/// FNV-1a 64-bit over the canonical dump, as fixed-width hex.
std::string config_hash(const RunConfig& config);

std::uint64_t fnv1a64(const std::string& bytes);

}  // namespace tmb

#endif
