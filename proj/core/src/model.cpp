#include "tmboson/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace tmb {

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::optional<Rational> parse_rational(const std::string& text) {
  const auto slash = text.find('/');
  try {
    if (slash == std::string::npos) {
      size_t used = 0;
      const long long v = std::stoll(text, &used);
      if (used != text.size()) return std::nullopt;
      return Rational(v);
    }
    size_t used = 0;
    const long long num = std::stoll(text.substr(0, slash), &used);
    if (used != slash) return std::nullopt;
    const std::string den_text = text.substr(slash + 1);
    const long long den = std::stoll(den_text, &used);
    if (used != den_text.size() || den == 0) return std::nullopt;
    return Rational(num, den);
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

void ModelParams::validate() const {
  if (s < 1 || r < 1) throw std::invalid_argument("mode degrees must satisfy s >= 1, r >= 1");
  for (double w : {w1, w2, w11, w22, w12, g}) {
    if (!std::isfinite(w)) throw std::invalid_argument("couplings must be finite");
  }
}

void validate_label(const ModelParams& model, const BlockLabel& label) {
  model.validate();
  if (label.M < 0) throw std::invalid_argument("block degree M must be >= 0");
  if (label.delta1 < 0 || label.delta1 >= model.s)
    throw std::invalid_argument("delta1 must lie in [0, s)");
  if (label.delta2 < 0 || label.delta2 >= model.r)
    throw std::invalid_argument("delta2 must lie in [0, r)");
}

std::vector<Rational> allowed_q(int k) {
  if (k < 1) throw std::invalid_argument("allowed_q: degree k must be >= 1");
  std::vector<Rational> q;
  q.reserve(static_cast<size_t>(k));
  for (int j = 0; j < k; ++j) {
    q.emplace_back(static_cast<long long>(j) * k + 1, static_cast<long long>(k) * k);
  }
  return q;
}

Rational q1_of(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  return Rational(static_cast<long long>(label.delta1) * model.s + 1,
                  static_cast<long long>(model.s) * model.s);
}

Rational q2_of(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  return Rational(static_cast<long long>(label.delta2) * model.r + 1,
                  static_cast<long long>(model.r) * model.r);
}

Rational l_of(const ModelParams& model, const BlockLabel& label) {
  return (Rational(label.M) + q1_of(model, label) + q2_of(model, label)) / 2;
}

std::pair<long long, long long> occupations(const ModelParams& model, const BlockLabel& label,
                                            int n) {
  validate_label(model, label);
  if (n < 0 || n > label.M) throw std::invalid_argument("block index out of range");
  return {static_cast<long long>(model.s) * n + label.delta1,
          static_cast<long long>(model.r) * (label.M - n) + label.delta2};
}

long long block_charge(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  return static_cast<long long>(model.r) * model.s * label.M +
         static_cast<long long>(model.r) * label.delta1 +
         static_cast<long long>(model.s) * label.delta2;
}

std::vector<std::pair<long long, long long>> block_states(const ModelParams& model,
                                                          const BlockLabel& label) {
  validate_label(model, label);
  std::vector<std::pair<long long, long long>> states;
  states.reserve(static_cast<size_t>(label.M) + 1);
  for (int n = 0; n <= label.M; ++n) states.push_back(occupations(model, label, n));
  return states;
}

std::pair<BlockLabel, int> block_from_quanta(const ModelParams& model, long long n1,
                                             long long n2) {
  model.validate();
  if (n1 < 0 || n2 < 0) throw std::invalid_argument("occupations must be >= 0");
  BlockLabel label;
  label.delta1 = static_cast<int>(n1 % model.s);
  label.delta2 = static_cast<int>(n2 % model.r);
  const long long n = (n1 - label.delta1) / model.s;
  label.M = static_cast<int>(n + (n2 - label.delta2) / model.r);
  return {label, static_cast<int>(n)};
}

std::vector<BlockLabel> blocks_for_charge(const ModelParams& model, long long K) {
  model.validate();
  if (K < 0) throw std::invalid_argument("conserved charge must be >= 0");
  std::vector<BlockLabel> blocks;
  const long long rs = static_cast<long long>(model.r) * model.s;
  for (int d1 = 0; d1 < model.s; ++d1) {
    for (int d2 = 0; d2 < model.r; ++d2) {
      const long long rest = K - static_cast<long long>(model.r) * d1 -
                             static_cast<long long>(model.s) * d2;
      if (rest < 0 || rest % rs != 0) continue;
      blocks.push_back(BlockLabel{static_cast<int>(rest / rs), d1, d2});
    }
  }
  std::sort(blocks.begin(), blocks.end(), [](const BlockLabel& a, const BlockLabel& b) {
    return std::tie(a.M, a.delta1, a.delta2) < std::tie(b.M, b.delta1, b.delta2);
  });
  return blocks;
}

}  // namespace tmb
