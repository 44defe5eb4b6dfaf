#include "tmboson/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <limits>
#include <cmath>
#include <mutex>
#include <thread>

#include "tmboson/algebra.hpp"
#include "tmboson/oracle.hpp"

namespace tmb {

namespace {

enum class RunMode { kBoth, kOracleOnly, kBetheOnly };

struct SplitMix {
  std::uint64_t state;
  explicit SplitMix(std::uint64_t seed) : state(seed) {}
  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ull;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
  }
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double coupling() { return -2.0 + 4.0 * unit(); }
};

BlockReport run_block(const ModelParams& model, const BlockLabel& label,
                      const SolverConfig& solver, RunMode mode) {
  BlockReport report;
  report.label = label;
  report.dimension = label.M + 1;
  report.charge = block_charge(model, label);
  report.q1 = to_string(q1_of(model, label));
  report.q2 = to_string(q2_of(model, label));
  report.l = to_string(l_of(model, label));

  const bool want_bethe = mode != RunMode::kOracleOnly;
  bool want_oracle = mode != RunMode::kBetheOnly;
  if (want_bethe && model.g == 0.0) {
    report.exactly_solvable = true;
    report.warnings.push_back("g = 0: spectrum is the diagonal of the block; BAE skipped");
    want_oracle = true;
  }

  std::vector<OracleState> states;
  if (want_oracle) {
    states = oracle_states(model, label, solver.occupation_cap);
    report.has_oracle = true;
    for (int k = 0; k < static_cast<int>(states.size()); ++k) {
      report.oracle_energies.push_back(states[static_cast<size_t>(k)].energy);
      if (states[static_cast<size_t>(k)].leading_deficient) {
        report.deficient_states.push_back(k);
      }
    }
    if (!report.deficient_states.empty()) {
      report.warnings.push_back(std::to_string(report.deficient_states.size()) +
                                " degree-deficient state(s) excluded from BAE matching");
    }
  }

  if (want_bethe && !report.exactly_solvable) {
    BetheSolveResult solved = solve_bae(model, label, solver);
    report.has_bethe = true;
    report.bethe_states = std::move(solved.states);
    for (std::string& warning : solved.warnings) report.warnings.push_back(std::move(warning));

    if (want_oracle) {
      std::vector<double> bethe_energies;
      for (const BetheState& state : report.bethe_states) {
        bethe_energies.push_back(state.energy);
      }
      std::vector<int> oracle_index;
      std::vector<double> oracle_energies;
      for (int k = 0; k < static_cast<int>(states.size()); ++k) {
        if (!states[static_cast<size_t>(k)].leading_deficient) {
          oracle_index.push_back(k);
          oracle_energies.push_back(states[static_cast<size_t>(k)].energy);
        }
      }
      PairingReport pairing = match_spectrum(bethe_energies, oracle_energies);
      for (auto& pair : pairing.pairs) {
        pair.oracle_index = oracle_index[static_cast<size_t>(pair.oracle_index)];
        report.bethe_states[static_cast<size_t>(pair.bethe_index)].pairing_index =
            pair.oracle_index;
      }
      for (int& k : pairing.unmatched_oracle) k = oracle_index[static_cast<size_t>(k)];
      if (!pairing.unmatched_oracle.empty()) {
        report.warnings.push_back(std::to_string(pairing.unmatched_oracle.size()) +
                                  " oracle state(s) without a matched Bethe state");
      }
      report.pairing = std::move(pairing);
    }
  }
  return report;
}

SpectrumReport run_spectrum(const RunConfig& config, RunMode mode) {
  config.model.validate();
  const std::vector<BlockLabel> blocks = config.resolved_blocks();
  SpectrumReport report;
  report.provenance = make_provenance(config);
  report.model = config.model;
  if (blocks.empty()) {
    report.warnings.push_back("no blocks selected");
    return report;
  }
  report.blocks.resize(blocks.size());

  const int jobs = std::max(1, std::min<int>(config.jobs, static_cast<int>(blocks.size())));
  if (jobs == 1) {
    for (size_t i = 0; i < blocks.size(); ++i) {
      report.blocks[i] = run_block(config.model, blocks[i], config.solver, mode);
    }
  } else {
    std::atomic<size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
      while (true) {
        const size_t i = next.fetch_add(1);
        if (i >= blocks.size()) return;
        try {
          report.blocks[i] = run_block(config.model, blocks[i], config.solver, mode);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }
  return report;
}

}  // namespace

SpectrumReport cmd_spectrum(const RunConfig& config) {
  return run_spectrum(config, RunMode::kBoth);
}

SpectrumReport cmd_bethe(const RunConfig& config) {
  return run_spectrum(config, RunMode::kBetheOnly);
}

SpectrumReport cmd_oracle(const RunConfig& config) {
  return run_spectrum(config, RunMode::kOracleOnly);
}

PotentialReport cmd_potential(const RunConfig& config) {
  config.model.validate();
  const std::vector<BlockLabel> blocks = config.resolved_blocks();
  if (blocks.size() != 1) {
    throw ConfigError("potential requires exactly one selected block, got " +
                      std::to_string(blocks.size()));
  }
  const BlockLabel label = blocks.front();

  PotentialReport report;
  report.provenance = make_provenance(config);
  report.model = config.model;
  report.label = label;

  PotentialMap map(config.model, label, config.qes.branch_sign);
  report.potential = gauge_and_potential(map, config.qes.z_lo, config.qes.z_hi,
                                         config.qes.samples);

  const auto states = oracle_states(config.model, label, config.solver.occupation_cap);
  for (const OracleState& state : states) report.energies.push_back(state.energy);
  if (config.qes.emit_states) {
    for (const OracleState& state : states) {
      std::vector<double> column = psi_tilde_values(map, state.monomial, report.potential.z);
      double peak = 0.0;
      for (double v : column) peak = std::max(peak, std::abs(v));
      const bool decays = peak > 0.0 && std::abs(column.front()) < 1e-2 * peak &&
                          std::abs(column.back()) < 1e-2 * peak;
      report.psi_decays.push_back(decays);
      report.psi_tilde.push_back(std::move(column));
    }
  }
  if (config.qes.equivalence) {
    if (map.has_closed_form_v()) {
      report.equivalence = verify_spectral_equivalence(
          [&map](double x) { return map.closed_form_v(x); }, report.energies, config.qes.grid);
    } else {
      report.equivalence =
          verify_spectral_equivalence(report.potential, report.energies, config.qes.grid);
    }
  }
  return report;
}

namespace {

struct SweepPoint {
  ModelParams model;
  BlockLabel label;
};

template <typename Fn>
void for_each_block(const VerifyConfig& config, std::uint64_t salt, Fn&& fn) {
  SplitMix rng(config.seed ^ salt);
  for (int s = 1; s <= config.max_degree; ++s) {
    for (int r = 1; r <= config.max_degree; ++r) {
      for (int d1 = 0; d1 < s; ++d1) {
        for (int d2 = 0; d2 < r; ++d2) {
          for (int m = 0; m <= config.max_m; ++m) {
            for (int draw = 0; draw < config.draws; ++draw) {
              ModelParams model;
              model.s = s;
              model.r = r;
              model.w1 = rng.coupling();
              model.w2 = rng.coupling();
              model.w11 = rng.coupling();
              model.w22 = rng.coupling();
              model.w12 = rng.coupling();
              model.g = rng.coupling();
              fn(SweepPoint{model, BlockLabel{m, d1, d2}});
            }
          }
        }
      }
    }
  }
}

double rel_gap(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  double worst = 0.0;
  for (int i = 0; i < a.rows(); ++i) {
    for (int j = 0; j < a.cols(); ++j) {
      const double scale = std::max({1.0, std::abs(a(i, j)), std::abs(b(i, j))});
      worst = std::max(worst, std::abs(a(i, j) - b(i, j)) / scale);
    }
  }
  return worst;
}

VerifyReport::Suite timed_suite(const std::string& name,
                                const std::function<std::pair<bool, std::string>()>& body) {
  VerifyReport::Suite suite;
  suite.name = name;
  const auto start = std::chrono::steady_clock::now();
  try {
    const auto [pass, detail] = body();
    suite.pass = pass;
    suite.detail = detail;
  } catch (const std::exception& e) {
    suite.pass = false;
    suite.detail = std::string("exception: ") + e.what();
  }
  suite.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return suite;
}

std::string max_detail(const char* what, double value, double tol) {
  return std::string(what) + " max = " + format_double(value) +
         " (tol = " + format_double(tol) + ")";
}

}  // namespace

VerifyReport cmd_verify(const VerifyConfig& config) {
  VerifyReport report;

  report.suites.push_back(timed_suite("stirling", [&]() -> std::pair<bool, std::string> {
    // Recurrence oracle S(k,i) = i S(k-1,i) + S(k-1,i-1).
    constexpr int kMax = 12;
    std::vector<std::vector<std::int64_t>> table(kMax + 1, std::vector<std::int64_t>(kMax + 2, 0));
    table[0][0] = 1;
    for (int k = 1; k <= kMax; ++k) {
      for (int i = 1; i <= k; ++i) {
        table[k][i] = i * table[k - 1][i] + table[k - 1][i - 1];
      }
    }
    for (int k = 1; k <= kMax; ++k) {
      for (int i = 1; i <= k; ++i) {
        if (stirling_second_kind(k, i) != table[k][i]) {
          return {false, "mismatch at (" + std::to_string(k) + ", " + std::to_string(i) + ")"};
        }
      }
    }
    return {true, "exact match for all k <= 12"};
  }));

  report.suites.push_back(timed_suite("commutators", [&]() -> std::pair<bool, std::string> {
    for (int k = 1; k <= config.max_degree; ++k) {
      for (const Rational& q : allowed_q(k)) {
        Rational prod(1);
        for (int j = 1; j <= k; ++j) {
          prod *= q - Rational(static_cast<long long>(j - 1) * k + 1,
                               static_cast<long long>(k) * k);
        }
        if (prod != Rational(0)) return {false, "annihilation identity broken"};
      }
    }
    double worst = 0.0;
    bool ok = true;
    for_each_block(config, 0x636f6d6dull, [&](const SweepPoint& point) {
      if (!ok) return;
      RepMatrices mats = build_block_matrices(point.model, point.label);
      if (config.mutate_qminus_sign) mats.qm = -mats.qm;
      const CommutatorReport check = commutator_check(mats, point.model, point.label);
      worst = std::max(worst, check.max_deviation());
      if (!check.pass(1e-10)) ok = false;
    });
    return {ok, max_detail("commutator deviation", worst, 1e-10)};
  }));

  report.suites.push_back(timed_suite("triple-equivalence", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    bool ok = true;
    for_each_block(config, 0x74726970ull, [&](const SweepPoint& point) {
      if (!ok) return;
      const Eigen::MatrixXd h_rep = build_block_matrices(point.model, point.label).h;
      const Eigen::MatrixXd h_fock = build_fock_hamiltonian(point.model, point.label);
      const Eigen::MatrixXd h_diff = diffop_block_matrix(point.model, point.label);
      worst = std::max({worst, rel_gap(h_rep, h_fock), rel_gap(h_rep, h_diff)});
      if (worst > 1e-9) ok = false;
    });
    return {ok, max_detail("entrywise relative gap", worst, 1e-9)};
  }));

  report.suites.push_back(timed_suite("case-tables", [&]() -> std::pair<bool, std::string> {
    double worst = 0.0;
    bool ok = true;
    for_each_block(config, 0x63617365ull, [&](const SweepPoint& point) {
      if (!ok) return;
      const int s = point.model.s;
      const int r = point.model.r;
      const bool supported =
          (s == 1 && r == 1) || (s == 2 && r == 1) || (s == 2 && r == 2) || (s == 3 && r == 3);
      if (!supported) return;
      const DiffOperator built = build_diff_operator(point.model, point.label);
      const DiffOperator table = case_operator(point.model, point.label);
      for (size_t i = 0; i < built.p.size(); ++i) {
        const int hi = std::max(built.p[i].degree(), table.p[i].degree());
        for (int k = 0; k <= hi; ++k) {
          const double a = built.p[i].coeff(k);
          const double b = table.p[i].coeff(k);
          const double gap = std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
          worst = std::max(worst, gap);
          if (gap > 1e-12) ok = false;
        }
      }
    });
    return {ok, max_detail("coefficient relative gap", worst, 1e-12)};
  }));

  report.suites.push_back(timed_suite("bae-oracle", [&]() -> std::pair<bool, std::string> {
    double worst_residual = 0.0;
    double worst_energy = 0.0;
    bool ok = true;
    for_each_block(config, 0x62616564ull, [&](const SweepPoint& point) {
      if (!ok) return;
      ModelParams model = point.model;
      if (std::abs(model.g) < 0.1) model.g = model.g < 0.0 ? -0.1 : 0.1;
      SolverConfig solver;
      solver.oracle_seeding = true;
      const BetheSolveResult solved = solve_bae(model, point.label, solver);
      for (const OracleState& state : oracle_states(model, point.label)) {
        if (state.leading_deficient) continue;
        double best = std::numeric_limits<double>::infinity();
        const BetheState* hit = nullptr;
        for (const BetheState& candidate : solved.states) {
          const double gap =
              std::abs(candidate.energy - state.energy) / (1.0 + std::abs(state.energy));
          if (gap < best) {
            best = gap;
            hit = &candidate;
          }
        }
        if (hit == nullptr || best > 1e-8) {
          ok = false;
          return;
        }
        worst_residual = std::max(worst_residual, hit->residual_norm);
        worst_energy = std::max(worst_energy, best);
        if (hit->residual_norm > 1e-8) ok = false;
      }
    });
    return {ok, max_detail("BAE residual", worst_residual, 1e-8) + "; " +
                    max_detail("energy error", worst_energy, 1e-8)};
  }));

  report.all_pass = std::all_of(report.suites.begin(), report.suites.end(),
                                [](const auto& suite) { return suite.pass; });
  return report;
}

}  // namespace tmb
