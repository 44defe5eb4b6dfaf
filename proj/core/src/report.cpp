#include "tmboson/report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "tmboson/version.hpp"

namespace tmb {

namespace {

using nlohmann::ordered_json;

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02d:%02d:%02dZ", tm.tm_year + 1900,
                tm.tm_mon + 1, tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec);
  return buf;
}

ordered_json json_roots(const std::vector<Complex>& roots) {
  ordered_json arr = ordered_json::array();
  for (const Complex& root : roots) arr.push_back({root.real(), root.imag()});
  return arr;
}

ordered_json json_model(const ModelParams& model) {
  return ordered_json{{"s", model.s},     {"r", model.r},     {"w1", model.w1},
                      {"w2", model.w2},   {"w11", model.w11}, {"w22", model.w22},
                      {"w12", model.w12}, {"g", model.g}};
}

ordered_json json_provenance(const Provenance& p) {
  return ordered_json{{"tool", p.tool},
                      {"version", p.version},
                      {"config_hash", p.config_hash},
                      {"seed", p.seed},
                      {"timestamp", p.timestamp}};
}

ordered_json json_pairing(const PairingReport& pairing) {
  ordered_json pairs = ordered_json::array();
  for (const auto& pair : pairing.pairs) {
    pairs.push_back({{"bethe", pair.bethe_index},
                     {"oracle", pair.oracle_index},
                     {"abs_de", pair.abs_de}});
  }
  return ordered_json{{"pairs", pairs},
                      {"unmatched_bethe", pairing.unmatched_bethe},
                      {"unmatched_oracle", pairing.unmatched_oracle},
                      {"max_abs_de", pairing.max_abs_de}};
}

void write_escaped(const std::string& s, std::string& out) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out.push_back(c);
        }
    }
  }
  out.push_back('"');
}

void write_value(const ordered_json& v, std::string& out, int indent) {
  const std::string pad(static_cast<size_t>(indent) * 2, ' ');
  const std::string pad_in(static_cast<size_t>(indent + 1) * 2, ' ');
  switch (v.type()) {
    case ordered_json::value_t::object: {
      if (v.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (auto it = v.begin(); it != v.end(); ++it) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        write_escaped(it.key(), out);
        out += ": ";
        write_value(it.value(), out, indent + 1);
      }
      out += "\n" + pad + "}";
      return;
    }
    case ordered_json::value_t::array: {
      if (v.empty()) {
        out += "[]";
        return;
      }
      // Scalar-only arrays stay on one line.
      bool flat = true;
      for (const auto& item : v) {
        if (item.is_object() || item.is_array()) {
          flat = false;
          break;
        }
      }
      if (flat) {
        out += "[";
        bool first = true;
        for (const auto& item : v) {
          if (!first) out += ", ";
          first = false;
          write_value(item, out, indent);
        }
        out += "]";
        return;
      }
      out += "[\n";
      bool first = true;
      for (const auto& item : v) {
        if (!first) out += ",\n";
        first = false;
        out += pad_in;
        write_value(item, out, indent + 1);
      }
      out += "\n" + pad + "]";
      return;
    }
    case ordered_json::value_t::string:
      write_escaped(v.get<std::string>(), out);
      return;
    case ordered_json::value_t::boolean:
      out += v.get<bool>() ? "true" : "false";
      return;
    case ordered_json::value_t::number_integer:
      out += std::to_string(v.get<long long>());
      return;
    case ordered_json::value_t::number_unsigned:
      out += std::to_string(v.get<unsigned long long>());
      return;
    case ordered_json::value_t::number_float:
      out += format_double(v.get<double>());
      return;
    default:
      out += "null";
      return;
  }
}

}  // namespace

std::string format_double(double value) {
  if (!std::isfinite(value)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

Provenance make_provenance(const RunConfig& config) {
  Provenance p;
  p.tool = kToolName;
  p.version = kToolVersion;
  p.config_hash = config_hash(config);
  p.seed = config.solver.seed;
  p.timestamp = utc_timestamp();
  return p;
}

nlohmann::ordered_json to_json(const SpectrumReport& report) {
  ordered_json doc;
  doc["provenance"] = json_provenance(report.provenance);
  doc["model"] = json_model(report.model);
  ordered_json blocks = ordered_json::array();
  for (const BlockReport& block : report.blocks) {
    ordered_json b;
    b["label"] = {{"m", block.label.M},
                  {"delta1", block.label.delta1},
                  {"delta2", block.label.delta2}};
    b["q1"] = block.q1;
    b["q2"] = block.q2;
    b["l"] = block.l;
    b["dimension"] = block.dimension;
    b["charge"] = block.charge;
    b["exactly_solvable"] = block.exactly_solvable;
    if (block.has_oracle) {
      b["oracle"] = {{"energies", block.oracle_energies},
                     {"deficient_states", block.deficient_states}};
    }
    if (block.has_bethe) {
      ordered_json states = ordered_json::array();
      for (const BetheState& state : block.bethe_states) {
        states.push_back({{"energy", state.energy},
                          {"residual_norm", state.residual_norm},
                          {"roots", json_roots(state.roots)},
                          {"monomial_coeffs", state.monomial_coeffs},
                          {"pairing_index", state.pairing_index},
                          {"near_zero_root", state.near_zero_root}});
      }
      b["bethe"] = std::move(states);
    }
    if (block.pairing) b["pairing"] = json_pairing(*block.pairing);
    b["warnings"] = block.warnings;
    blocks.push_back(std::move(b));
  }
  doc["blocks"] = std::move(blocks);
  doc["warnings"] = report.warnings;
  return doc;
}

nlohmann::ordered_json to_json(const PotentialReport& report) {
  ordered_json doc;
  doc["provenance"] = json_provenance(report.provenance);
  doc["model"] = json_model(report.model);
  doc["label"] = {{"m", report.label.M},
                  {"delta1", report.label.delta1},
                  {"delta2", report.label.delta2}};
  doc["case"] = report.potential.case_tag;
  doc["branch_sign"] = report.potential.sign;
  doc["closed_form_constants"] = report.potential.closed_form_constants;
  if (report.potential.weierstrass_invariants) {
    doc["weierstrass_invariants"] = {report.potential.weierstrass_invariants->first,
                                     report.potential.weierstrass_invariants->second};
  }
  doc["energies"] = report.energies;
  doc["samples"] = {{"z", report.potential.z},
                    {"x", report.potential.x},
                    {"v", report.potential.v},
                    {"w", report.potential.w}};
  if (!report.psi_tilde.empty()) {
    ordered_json psi = ordered_json::array();
    for (const auto& column : report.psi_tilde) psi.push_back(column);
    doc["psi_tilde"] = std::move(psi);
    doc["psi_decays_at_ends"] = report.psi_decays;
  }
  if (report.equivalence) {
    const SpectralEquivalenceReport& eq = *report.equivalence;
    ordered_json entries = ordered_json::array();
    for (const auto& entry : eq.entries) {
      entries.push_back({{"block_energy", entry.block_energy},
                         {"target", entry.target},
                         {"nearest_fd", entry.nearest_fd},
                         {"rel_error", entry.rel_error},
                         {"matched", entry.matched}});
    }
    doc["equivalence"] = {{"checkable", eq.checkable},
                          {"note", eq.note},
                          {"grid_l", eq.grid_l},
                          {"grid_n", eq.grid_n},
                          {"entries", entries},
                          {"all_matched", eq.all_matched},
                          {"max_rel_error", eq.max_rel_error}};
  }
  return doc;
}

nlohmann::ordered_json to_json(const VerifyReport& report) {
  ordered_json suites = ordered_json::array();
  for (const auto& suite : report.suites) {
    suites.push_back({{"name", suite.name},
                      {"pass", suite.pass},
                      {"seconds", suite.seconds},
                      {"detail", suite.detail}});
  }
  return ordered_json{{"suites", suites}, {"all_pass", report.all_pass}};
}

std::string dump_json(const nlohmann::ordered_json& doc) {
  std::string out;
  write_value(doc, out, 0);
  out += "\n";
  return out;
}

std::string to_csv(const SpectrumReport& report) {
  std::string out = "m,delta1,delta2,source,index,energy,residual_norm,pairing_index\n";
  for (const BlockReport& block : report.blocks) {
    const std::string prefix = std::to_string(block.label.M) + "," +
                               std::to_string(block.label.delta1) + "," +
                               std::to_string(block.label.delta2) + ",";
    if (block.has_oracle) {
      for (size_t k = 0; k < block.oracle_energies.size(); ++k) {
        out += prefix + "oracle," + std::to_string(k) + "," +
               format_double(block.oracle_energies[k]) + ",,\n";
      }
    }
    if (block.has_bethe) {
      for (size_t k = 0; k < block.bethe_states.size(); ++k) {
        const BetheState& state = block.bethe_states[k];
        out += prefix + "bethe," + std::to_string(k) + "," + format_double(state.energy) + "," +
               format_double(state.residual_norm) + "," + std::to_string(state.pairing_index) +
               "\n";
      }
    }
  }
  return out;
}

std::string to_csv(const PotentialReport& report) {
  std::string out = "x,V";
  for (size_t k = 0; k < report.psi_tilde.size(); ++k) out += ",psi_" + std::to_string(k);
  out += "\n";
  for (size_t i = 0; i < report.potential.x.size(); ++i) {
    out += format_double(report.potential.x[i]) + "," + format_double(report.potential.v[i]);
    for (const auto& column : report.psi_tilde) out += "," + format_double(column[i]);
    out += "\n";
  }
  return out;
}

}  // namespace tmb
