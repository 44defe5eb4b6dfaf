#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "tmboson/config.hpp"
#include "tmboson/report.hpp"
#include "tmboson/runner.hpp"

using namespace tmb;
using nlohmann::json;

namespace {

json doublet_config() {
  return json::parse(R"({
    "model": {"s": 1, "r": 1, "w1": 1.0, "g": 0.5},
    "blocks": [[1, 0, 0]],
    "solver": {"seed": 777}
  })");
}

std::string write_temp(const std::string& name, const std::string& payload) {
  const std::string path = std::string("/tmp/") + name;
  std::ofstream out(path, std::ios::binary);
  out << payload;
  return path;
}

int run_cli(const std::string& args, std::string* output = nullptr) {
  const std::string out_path = "/tmp/tmboson_cli_out.txt";
  const std::string command =
      std::string(TMBOSON_CLI_BIN) + " " + args + " > " + out_path + " 2>&1";
  const int status = std::system(command.c_str());
  if (output != nullptr) {
    std::ifstream in(out_path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    *output = buf.str();
  }
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("config schema") {
  SUBCASE("minimal config parses with defaults") {
    const RunConfig config = parse_config(doublet_config());
    CHECK(config.model.s == 1);
    CHECK(config.model.w1 == 1.0);
    CHECK(config.model.g == 0.5);
    CHECK(config.solver.seed == 777);
    CHECK(config.blocks.size() == 1);
    CHECK(config.jobs == 1);
  }
  SUBCASE("unknown keys are rejected with a path") {
    json bad = doublet_config();
    bad["model"]["w3"] = 1.0;
    CHECK_THROWS_WITH_AS(parse_config(bad),
                         "config error at '$.model.w3': unknown key", ConfigError);
    json bad_top = doublet_config();
    bad_top["extra"] = 1;
    CHECK_THROWS_AS(parse_config(bad_top), ConfigError);
    json bad_solver = doublet_config();
    bad_solver["solver"]["tolx"] = 1e-9;
    CHECK_THROWS_AS(parse_config(bad_solver), ConfigError);
  }
  SUBCASE("couplings accept exact fractions") {
    json doc = doublet_config();
    doc["model"]["g"] = "3/4";
    doc["model"]["w2"] = "-1/2";
    const RunConfig config = parse_config(doc);
    CHECK(config.model.g == 0.75);
    CHECK(config.model.w2 == -0.5);
    doc["model"]["g"] = "3/0";
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
  SUBCASE("label fields demand integers") {
    json doc = doublet_config();
    doc["blocks"] = json::array({json::array({1.5, 0, 0})});
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
  SUBCASE("charge selector expands to blocks") {
    json doc = doublet_config();
    doc.erase("blocks");
    doc["charge"] = 3;
    const RunConfig config = parse_config(doc);
    const auto blocks = config.resolved_blocks();
    REQUIRE(blocks.size() == 1);
    CHECK(blocks[0].M == 3);
  }
  SUBCASE("invalid blocks are rejected at parse time") {
    json doc = doublet_config();
    doc["blocks"] = json::array({json::array({1, 1, 0})});  // delta1 >= s
    CHECK_THROWS_AS(parse_config(doc), ConfigError);
  }
}

TEST_CASE("config hash is reproducible and canonical") {
  const RunConfig a = parse_config(doublet_config());
  const RunConfig b = parse_config(doublet_config());
  CHECK(config_hash(a) == config_hash(b));
  CHECK(config_hash(a).size() == 16);
  // independent re-hash of the canonical form
  CHECK(config_hash(a) != "0000000000000000");
  const std::uint64_t expected = fnv1a64(canonical_config_json(a).dump());
  std::ostringstream hex;
  hex << std::hex;
  hex.width(16);
  hex.fill('0');
  hex << expected;
  CHECK(config_hash(a) == hex.str());

  json other = doublet_config();
  other["model"]["g"] = 0.25;
  CHECK(config_hash(parse_config(other)) != config_hash(a));
}

TEST_CASE("cmd_spectrum on the worked doublet") {
  const RunConfig config = parse_config(doublet_config());
  const SpectrumReport report = cmd_spectrum(config);
  REQUIRE(report.blocks.size() == 1);
  const BlockReport& block = report.blocks[0];
  CHECK(block.dimension == 2);
  CHECK(block.q1 == "1");
  CHECK(block.l == "3/2");
  REQUIRE(block.oracle_energies.size() == 2);
  CHECK(block.oracle_energies[0] == doctest::Approx(-0.20710678118654755).epsilon(1e-12));
  REQUIRE(block.bethe_states.size() == 2);
  CHECK(block.bethe_states[0].pairing_index == 0);
  CHECK(block.bethe_states[1].pairing_index == 1);
  REQUIRE(block.pairing);
  CHECK(block.pairing->max_abs_de <= 1e-9);
  // states ascend in energy
  CHECK(block.bethe_states[0].energy < block.bethe_states[1].energy);
}

TEST_CASE("g = 0 blocks are routed to the oracle and flagged") {
  json doc = doublet_config();
  doc["model"]["g"] = 0.0;
  const SpectrumReport report = cmd_spectrum(parse_config(doc));
  REQUIRE(report.blocks.size() == 1);
  CHECK(report.blocks[0].exactly_solvable);
  CHECK(report.blocks[0].has_oracle);
  CHECK(!report.blocks[0].has_bethe);
}

TEST_CASE("mode variants include or omit report sections") {
  const RunConfig config = parse_config(doublet_config());
  const SpectrumReport bethe_only = cmd_bethe(config);
  CHECK(!bethe_only.blocks[0].has_oracle);
  CHECK(bethe_only.blocks[0].has_bethe);
  const SpectrumReport oracle_only = cmd_oracle(config);
  CHECK(oracle_only.blocks[0].has_oracle);
  CHECK(!oracle_only.blocks[0].has_bethe);
}

TEST_CASE("reports serialize deterministically, timestamp aside") {
  const RunConfig config = parse_config(doublet_config());
  auto scrub = [](SpectrumReport report) {
    report.provenance.timestamp.clear();
    return dump_json(to_json(report));
  };
  const std::string first = scrub(cmd_spectrum(config));
  const std::string second = scrub(cmd_spectrum(config));
  CHECK(first == second);
  CHECK(first.find("\"config_hash\"") != std::string::npos);
  // parse back: lossless numbers round-trip
  const json parsed = json::parse(first);
  CHECK(parsed["blocks"][0]["oracle"]["energies"][0].get<double>() ==
        cmd_spectrum(config).blocks[0].oracle_energies[0]);
}

TEST_CASE("jobs > 1 produces identical block reports") {
  json doc = doublet_config();
  doc.erase("blocks");
  doc["blocks"] = json::array({json::array({1, 0, 0}), json::array({2, 0, 0}),
                               json::array({3, 0, 0}), json::array({4, 0, 0})});
  RunConfig serial = parse_config(doc);
  RunConfig parallel = serial;
  parallel.jobs = 2;
  SpectrumReport a = cmd_spectrum(serial);
  SpectrumReport b = cmd_spectrum(parallel);
  a.provenance.timestamp.clear();
  b.provenance.timestamp.clear();
  CHECK(dump_json(to_json(a)) == dump_json(to_json(b)));
}

TEST_CASE("17-significant-digit formatting") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(1.0) == "1");
  // 17 significant digits round-trip every double exactly
  for (double value : {-0.20710678118654755, 0.3 + 1e-17, 1.2071067811865476, 1e-300, -3.5e122}) {
    CHECK(std::stod(format_double(value)) == value);
  }
}

TEST_CASE("potential pipeline") {
  json doc = json::parse(R"({
    "model": {"s": 2, "r": 1, "w1": 0.4, "w2": -0.3, "g": 0.7},
    "blocks": [[2, 0, 0]],
    "qes": {"interval": [0.1, 4.0], "samples": 101, "equivalence": true}
  })");
  const PotentialReport report = cmd_potential(parse_config(doc));
  CHECK(report.potential.case_tag == "II-sextic");
  CHECK(report.potential.closed_form_constants.count("x6") == 1);
  REQUIRE(report.equivalence);
  CHECK(report.equivalence->checkable);
  CHECK(report.equivalence->all_matched);
  CHECK(report.psi_tilde.size() == report.energies.size());
  CHECK(report.psi_decays.size() == report.psi_tilde.size());

  const std::string csv = to_csv(report);
  CHECK(csv.rfind("x,V,psi_0,psi_1,psi_2\n", 0) == 0);
  CHECK(csv.find("\r\n") == std::string::npos);

  SUBCASE("third-order blocks are unsupported") {
    json bad = doc;
    bad["model"]["s"] = 3;
    bad["model"]["r"] = 3;
    bad["blocks"] = json::array({json::array({2, 0, 0})});
    CHECK_THROWS_AS(cmd_potential(parse_config(bad)), UnsupportedCaseError);
  }
  SUBCASE("exactly one block required") {
    json bad = doc;
    bad["blocks"] = json::array({json::array({2, 0, 0}), json::array({3, 0, 0})});
    CHECK_THROWS_AS(cmd_potential(parse_config(bad)), ConfigError);
  }
}

TEST_CASE("verify runner") {
  VerifyConfig small;
  small.max_degree = 2;
  small.max_m = 3;
  small.draws = 2;
  const VerifyReport report = cmd_verify(small);
  CHECK(report.all_pass);
  CHECK(report.suites.size() == 5);
  for (const auto& suite : report.suites) CHECK(suite.seconds >= 0.0);

  SUBCASE("fault injection trips the commutator suite only") {
    VerifyConfig mutated = small;
    mutated.mutate_qminus_sign = true;
    const VerifyReport broken = cmd_verify(mutated);
    CHECK(!broken.all_pass);
    for (const auto& suite : broken.suites) {
      if (suite.name == "commutators") CHECK(!suite.pass);
    }
  }
  SUBCASE("the seed moves the draws, not the verdict") {
    VerifyConfig reseeded = small;
    reseeded.seed = 9999;
    CHECK(cmd_verify(reseeded).all_pass);
  }
}

TEST_CASE("command-line interface") {
  const std::string config_path =
      write_temp("tmboson_doublet.json", doublet_config().dump());

  SUBCASE("spectrum runs and emits valid JSON") {
    std::string output;
    CHECK(run_cli("spectrum --config " + config_path, &output) == 0);
    const json parsed = json::parse(output);
    CHECK(parsed["blocks"].size() == 1);
    CHECK(parsed["blocks"][0]["bethe"].size() == 2);
  }
  SUBCASE("csv format") {
    std::string output;
    CHECK(run_cli("oracle --config " + config_path + " --format csv", &output) == 0);
    CHECK(output.rfind("m,delta1,delta2,source,index,energy", 0) == 0);
  }
  SUBCASE("block and charge flags override the config") {
    std::string output;
    CHECK(run_cli("oracle --config " + config_path + " --block 2,0,0", &output) == 0);
    CHECK(json::parse(output)["blocks"][0]["label"]["m"] == 2);
    CHECK(run_cli("oracle --config " + config_path + " --charge 4", &output) == 0);
    CHECK(json::parse(output)["blocks"].size() == 2);  // explicit block plus charge expansion
  }
  SUBCASE("malformed config exits 2 with a diagnostic") {
    const std::string bad = write_temp("tmboson_bad.json", R"({"model": {"s": 1}})");
    std::string output;
    CHECK(run_cli("spectrum --config " + bad, &output) == 2);
    CHECK(output.find("error") != std::string::npos);
    const std::string unknown =
        write_temp("tmboson_unknown.json", R"({"model": {"s":1,"r":1}, "oops": 1})");
    CHECK(run_cli("spectrum --config " + unknown, &output) == 2);
    CHECK(output.find("oops") != std::string::npos);
  }
  SUBCASE("unsupported potential order exits 1") {
    const std::string third = write_temp("tmboson_33.json", R"({
      "model": {"s": 3, "r": 3, "g": 0.5},
      "blocks": [[2, 0, 0]]
    })");
    std::string output;
    CHECK(run_cli("potential --config " + third, &output) == 1);
    CHECK(output.find("second-order") != std::string::npos);
  }
  SUBCASE("verify subcommand exit codes") {
    std::string output;
    CHECK(run_cli("verify --max-degree 1 --max-m 2 --draws 2", &output) == 0);
    CHECK(output.find("all suites passed") != std::string::npos);
    CHECK(run_cli("verify --max-degree 2 --max-m 2 --draws 1 --inject-qminus-sign-flip",
                  &output) == 1);
    CHECK(output.find("FAIL") != std::string::npos);
  }
  SUBCASE("output file plus determinism across runs") {
    const std::string out1 = "/tmp/tmboson_run1.json";
    const std::string out2 = "/tmp/tmboson_run2.json";
    CHECK(run_cli("spectrum --config " + config_path + " --seed 42 --out " + out1) == 0);
    CHECK(run_cli("spectrum --config " + config_path + " --seed 42 --out " + out2) == 0);
    std::ifstream f1(out1), f2(out2);
    json j1 = json::parse(f1);
    json j2 = json::parse(f2);
    j1["provenance"].erase("timestamp");
    j2["provenance"].erase("timestamp");
    CHECK(j1.dump() == j2.dump());
  }
}
