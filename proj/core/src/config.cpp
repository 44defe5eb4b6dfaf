#include "tmboson/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace tmb {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("config error at '" + path + "': " + what);
}

void reject_unknown_keys(const json& obj, const std::string& path,
                         const std::set<std::string>& allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (allowed.count(it.key()) == 0) fail(path + "." + it.key(), "unknown key");
  }
}

double parse_coupling(const json& v, const std::string& path) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const auto rational = parse_rational(v.get<std::string>());
    if (!rational) fail(path, "expected a number or a \"p/q\" fraction");
    return to_double(*rational);
  }
  fail(path, "expected a number or a \"p/q\" fraction");
}

long long parse_integer(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<long long>();
}

bool parse_bool(const json& v, const std::string& path) {
  if (!v.is_boolean()) fail(path, "expected a boolean");
  return v.get<bool>();
}

ModelParams parse_model(const json& v, const std::string& path) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown_keys(v, path, {"s", "r", "w1", "w2", "w11", "w22", "w12", "g"});
  if (!v.contains("s") || !v.contains("r")) fail(path, "mode degrees s and r are required");
  ModelParams model;
  model.s = static_cast<int>(parse_integer(v.at("s"), path + ".s"));
  model.r = static_cast<int>(parse_integer(v.at("r"), path + ".r"));
  if (v.contains("w1")) model.w1 = parse_coupling(v.at("w1"), path + ".w1");
  if (v.contains("w2")) model.w2 = parse_coupling(v.at("w2"), path + ".w2");
  if (v.contains("w11")) model.w11 = parse_coupling(v.at("w11"), path + ".w11");
  if (v.contains("w22")) model.w22 = parse_coupling(v.at("w22"), path + ".w22");
  if (v.contains("w12")) model.w12 = parse_coupling(v.at("w12"), path + ".w12");
  if (v.contains("g")) model.g = parse_coupling(v.at("g"), path + ".g");
  try {
    model.validate();
  } catch (const std::exception& e) {
    fail(path, e.what());
  }
  return model;
}

BlockLabel parse_block(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) fail(path, "expected [M, delta1, delta2]");
  BlockLabel label;
  label.M = static_cast<int>(parse_integer(v.at(0), path + "[0]"));
  label.delta1 = static_cast<int>(parse_integer(v.at(1), path + "[1]"));
  label.delta2 = static_cast<int>(parse_integer(v.at(2), path + "[2]"));
  return label;
}

void parse_solver(const json& v, const std::string& path, SolverConfig* solver) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown_keys(v, path, {"tol", "max_iters", "starts", "seed", "oracle_seeding"});
  if (v.contains("tol")) {
    solver->tol = parse_coupling(v.at("tol"), path + ".tol");
    if (!(solver->tol > 0.0)) fail(path + ".tol", "must be > 0");
  }
  if (v.contains("max_iters")) {
    solver->max_iters = static_cast<int>(parse_integer(v.at("max_iters"), path + ".max_iters"));
    if (solver->max_iters < 1) fail(path + ".max_iters", "must be >= 1");
  }
  if (v.contains("starts")) {
    solver->starts = static_cast<int>(parse_integer(v.at("starts"), path + ".starts"));
  }
  if (v.contains("seed")) {
    const long long seed = parse_integer(v.at("seed"), path + ".seed");
    if (seed < 0) fail(path + ".seed", "must be >= 0");
    solver->seed = static_cast<std::uint64_t>(seed);
  }
  if (v.contains("oracle_seeding")) {
    solver->oracle_seeding = parse_bool(v.at("oracle_seeding"), path + ".oracle_seeding");
  }
}

void parse_qes(const json& v, const std::string& path, QesConfig* qes) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown_keys(v, path,
                      {"interval", "samples", "branch_sign", "grid_l", "grid_n", "tol",
                       "margin", "equivalence", "emit_states"});
  if (v.contains("interval")) {
    const json& iv = v.at("interval");
    if (!iv.is_array() || iv.size() != 2) fail(path + ".interval", "expected [z_lo, z_hi]");
    qes->z_lo = parse_coupling(iv.at(0), path + ".interval[0]");
    qes->z_hi = parse_coupling(iv.at(1), path + ".interval[1]");
    if (!(qes->z_lo < qes->z_hi)) fail(path + ".interval", "need z_lo < z_hi");
  }
  if (v.contains("samples")) {
    qes->samples = static_cast<int>(parse_integer(v.at("samples"), path + ".samples"));
    if (qes->samples < 2) fail(path + ".samples", "must be >= 2");
  }
  if (v.contains("branch_sign")) {
    const long long sign = parse_integer(v.at("branch_sign"), path + ".branch_sign");
    if (sign != 1 && sign != -1) fail(path + ".branch_sign", "must be +1 or -1");
    qes->branch_sign = static_cast<int>(sign);
  }
  if (v.contains("grid_l")) {
    qes->grid.L = parse_coupling(v.at("grid_l"), path + ".grid_l");
  }
  if (v.contains("grid_n")) {
    qes->grid.N = static_cast<int>(parse_integer(v.at("grid_n"), path + ".grid_n"));
    if (qes->grid.N < 3) fail(path + ".grid_n", "must be >= 3");
  }
  if (v.contains("tol")) {
    qes->grid.tol = parse_coupling(v.at("tol"), path + ".tol");
    if (!(qes->grid.tol > 0.0)) fail(path + ".tol", "must be > 0");
  }
  if (v.contains("margin")) {
    qes->grid.margin = parse_coupling(v.at("margin"), path + ".margin");
  }
  if (v.contains("equivalence")) {
    qes->equivalence = parse_bool(v.at("equivalence"), path + ".equivalence");
  }
  if (v.contains("emit_states")) {
    qes->emit_states = parse_bool(v.at("emit_states"), path + ".emit_states");
  }
}

void parse_output(const json& v, const std::string& path, RunConfig* config) {
  if (!v.is_object()) fail(path, "expected an object");
  reject_unknown_keys(v, path, {"path", "format"});
  if (v.contains("path")) {
    if (!v.at("path").is_string()) fail(path + ".path", "expected a string");
    config->out_path = v.at("path").get<std::string>();
  }
  if (v.contains("format")) {
    if (!v.at("format").is_string()) fail(path + ".format", "expected \"json\" or \"csv\"");
    const std::string f = v.at("format").get<std::string>();
    if (f == "json") {
      config->format = OutputFormat::kJson;
    } else if (f == "csv") {
      config->format = OutputFormat::kCsv;
    } else {
      fail(path + ".format", "expected \"json\" or \"csv\"");
    }
  }
}

}  // namespace

std::vector<BlockLabel> RunConfig::resolved_blocks() const {
  std::vector<BlockLabel> out = blocks;
  if (charge) {
    for (const BlockLabel& label : blocks_for_charge(model, *charge)) {
      const bool seen = std::any_of(out.begin(), out.end(), [&](const BlockLabel& b) {
        return b.M == label.M && b.delta1 == label.delta1 && b.delta2 == label.delta2;
      });
      if (!seen) out.push_back(label);
    }
  }
  for (const BlockLabel& label : out) validate_label(model, label);
  return out;
}

RunConfig parse_config(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ConfigError("config error at '$': expected a JSON object");
  reject_unknown_keys(doc, "$", {"model", "blocks", "charge", "solver", "qes", "output", "jobs"});
  if (!doc.contains("model")) throw ConfigError("config error at '$.model': required");
  RunConfig config;
  config.model = parse_model(doc.at("model"), "$.model");
  if (doc.contains("blocks")) {
    const json& blocks = doc.at("blocks");
    if (!blocks.is_array()) fail("$.blocks", "expected an array of [M, delta1, delta2]");
    for (size_t i = 0; i < blocks.size(); ++i) {
      config.blocks.push_back(
          parse_block(blocks.at(i), "$.blocks[" + std::to_string(i) + "]"));
    }
  }
  if (doc.contains("charge")) {
    const long long charge = parse_integer(doc.at("charge"), "$.charge");
    if (charge < 0) fail("$.charge", "must be >= 0");
    config.charge = charge;
  }
  if (doc.contains("solver")) parse_solver(doc.at("solver"), "$.solver", &config.solver);
  if (doc.contains("qes")) parse_qes(doc.at("qes"), "$.qes", &config.qes);
  if (doc.contains("output")) parse_output(doc.at("output"), "$.output", &config);
  if (doc.contains("jobs")) {
    config.jobs = static_cast<int>(parse_integer(doc.at("jobs"), "$.jobs"));
    if (config.jobs < 1) fail("$.jobs", "must be >= 1");
  }
  for (const BlockLabel& label : config.blocks) {
    try {
      validate_label(config.model, label);
    } catch (const std::exception& e) {
      fail("$.blocks", e.what());
    }
  }
  return config;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const std::exception& e) {
    throw ConfigError("config file is not valid JSON: " + std::string(e.what()));
  }
  return parse_config(doc);
}

nlohmann::json canonical_config_json(const RunConfig& config) {
  // Plain json sorts keys; all defaults are materialized so the hash is a
  // function of the effective computation. Output routing and worker count
  // cannot change results, so they stay out of the canonical form.
  nlohmann::json doc;
  doc["model"] = {{"s", config.model.s},   {"r", config.model.r},   {"w1", config.model.w1},
                  {"w2", config.model.w2}, {"w11", config.model.w11}, {"w22", config.model.w22},
                  {"w12", config.model.w12}, {"g", config.model.g}};
  doc["blocks"] = nlohmann::json::array();
  for (const BlockLabel& label : config.blocks) {
    doc["blocks"].push_back({label.M, label.delta1, label.delta2});
  }
  if (config.charge) {
    doc["charge"] = *config.charge;
  } else {
    doc["charge"] = nullptr;
  }
  doc["solver"] = {{"tol", config.solver.tol},
                   {"max_iters", config.solver.max_iters},
                   {"starts", config.solver.starts},
                   {"seed", config.solver.seed},
                   {"oracle_seeding", config.solver.oracle_seeding}};
  doc["qes"] = {{"interval", {config.qes.z_lo, config.qes.z_hi}},
                {"samples", config.qes.samples},
                {"branch_sign", config.qes.branch_sign},
                {"grid_l", config.qes.grid.L},
                {"grid_n", config.qes.grid.N},
                {"tol", config.qes.grid.tol},
                {"margin", config.qes.grid.margin},
                {"equivalence", config.qes.equivalence},
                {"emit_states", config.qes.emit_states}};
  return doc;
}

std::uint64_t fnv1a64(const std::string& bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string config_hash(const RunConfig& config) {
  const std::uint64_t h = fnv1a64(canonical_config_json(config).dump());
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

}  // namespace tmb
