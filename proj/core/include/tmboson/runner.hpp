#ifndef TMBOSON_RUNNER_HPP
#define TMBOSON_RUNNER_HPP

#include <cstdint>

#include "tmboson/config.hpp"
#include "tmboson/report.hpp"

namespace tmb {

/// Oracle diagonalization plus Bethe solve and pairing for every selected
/// block. g == 0 blocks are routed to the oracle and flagged exactly solvable.
SpectrumReport cmd_spectrum(const RunConfig& config);

/// Bethe solver output only (no oracle energies or pairing in the report).
SpectrumReport cmd_bethe(const RunConfig& config);

/// Oracle diagonalization only.
SpectrumReport cmd_oracle(const RunConfig& config);

/// Schroedinger mapping of a single second-order block; optional -E
/// membership report. Throws UnsupportedCaseError for higher-order blocks.
PotentialReport cmd_potential(const RunConfig& config);

struct VerifyConfig {
  int max_degree = 3;   // sweep s, r = 1..max_degree
  int max_m = 6;
  int draws = 10;
  std::uint64_t seed = 20240101;
  bool mutate_qminus_sign = false;  // fault-injection hook for the test suite
};

VerifyReport cmd_verify(const VerifyConfig& config = {});

}  // namespace tmb

#endif
