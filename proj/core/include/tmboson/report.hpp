#ifndef TMBOSON_REPORT_HPP
#define TMBOSON_REPORT_HPP

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmboson/bethe.hpp"
#include "tmboson/config.hpp"
#include "tmboson/model.hpp"
#include "tmboson/oracle.hpp"
#include "tmboson/qes.hpp"

namespace tmb {

struct Provenance {
  std::string tool;
  std::string version;
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string timestamp;  // excluded from determinism comparisons
};

Provenance make_provenance(const RunConfig& config);

struct BlockReport {
  BlockLabel label;
  int dimension = 0;
  long long charge = 0;
  std::string q1, q2, l;  // exact rationals, printed as "p/q"
  bool exactly_solvable = false;  // g == 0, diagonal route
  bool has_oracle = false;
  std::vector<double> oracle_energies;
  std::vector<int> deficient_states;
  bool has_bethe = false;
  std::vector<BetheState> bethe_states;
  std::optional<PairingReport> pairing;
  std::vector<std::string> warnings;
};

struct SpectrumReport {
  Provenance provenance;
  ModelParams model;
  std::vector<BlockReport> blocks;
  std::vector<std::string> warnings;
};

struct PotentialReport {
  Provenance provenance;
  ModelParams model;
  BlockLabel label;
  SampledPotential potential;
  std::vector<double> energies;  // block energies E
  std::vector<std::vector<double>> psi_tilde;  // one column per emitted state
  // Decay of |psi_tilde| at the sampled ends relative to its peak; reported,
  // never enforced.
  std::vector<bool> psi_decays;
  std::optional<SpectralEquivalenceReport> equivalence;
};

struct VerifyReport {
  struct Suite {
    std::string name;
    bool pass = false;
    double seconds = 0.0;
    std::string detail;
  };
  std::vector<Suite> suites;
  bool all_pass = false;
};

nlohmann::ordered_json to_json(const SpectrumReport& report);
nlohmann::ordered_json to_json(const PotentialReport& report);
nlohmann::ordered_json to_json(const VerifyReport& report);

/// Deterministic serialization: insertion-ordered keys, doubles with 17
/// significant digits, LF newline at the end.
std::string dump_json(const nlohmann::ordered_json& doc);

/// Flat per-state rows for spreadsheets.
std::string to_csv(const SpectrumReport& report);
/// Columns x,V[,psi_0,...], full double precision, LF line endings.
std::string to_csv(const PotentialReport& report);

/// %.17g formatting used by every emitter.
std::string format_double(double value);

}  // namespace tmb

#endif
