#include "tmboson/algebra.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmb {

namespace {

// prod_{i=1..k}(x + i/k - 1/k^2), exact.
Rational rising_product(int k, const Rational& x) {
  Rational prod(1);
  for (int i = 1; i <= k; ++i) {
    prod *= x + Rational(i, k) - Rational(1, static_cast<long long>(k) * k);
  }
  return prod;
}

}  // namespace

Rational casimir_constant(int k) {
  if (k < 1) throw std::invalid_argument("casimir_constant: degree k must be >= 1");
  Rational prod(1);
  for (int i = 1; i <= k; ++i) {
    prod *= Rational(i - k, k) - Rational(1, static_cast<long long>(k) * k);
  }
  return prod;
}

Rational structure_poly(int k, const Rational& x) {
  if (k < 1) throw std::invalid_argument("structure_poly: degree k must be >= 1");
  return -rising_product(k, x) + casimir_constant(k);
}

double structure_poly(int k, double x) {
  if (k < 1) throw std::invalid_argument("structure_poly: degree k must be >= 1");
  double prod = 1.0;
  const double kk = static_cast<double>(k) * k;
  for (int i = 1; i <= k; ++i) prod *= x + i / static_cast<double>(k) - 1.0 / kk;
  return -prod + to_double(casimir_constant(k));
}

Rational pair_structure_poly(int s, int r, const Rational& x, const Rational& l) {
  if (s < 1 || r < 1) throw std::invalid_argument("pair_structure_poly: degrees must be >= 1");
  Rational first(1);
  for (int i = 1; i <= s; ++i) {
    first *= l + x + Rational(i, s) - Rational(1, static_cast<long long>(s) * s);
  }
  Rational second(1);
  for (int j = 1; j <= r; ++j) {
    second *= l - x - 1 + Rational(j, r) - Rational(1, static_cast<long long>(r) * r);
  }
  return -first * second;
}

LadderElements su11_matrix_elements(int k, const Rational& q, int n) {
  if (n < 0) throw std::invalid_argument("su11_matrix_elements: n must be >= 0");
  const auto allowed = allowed_q(k);
  if (std::find(allowed.begin(), allowed.end(), q) == allowed.end()) {
    throw std::invalid_argument("su11_matrix_elements: q is not an allowed weight for k");
  }
  const long long kk = static_cast<long long>(k) * k;
  Rational up_sq(1), down_sq(1);
  for (int i = 1; i <= k; ++i) {
    up_sq *= Rational(n) + q + Rational(static_cast<long long>(i) * k - 1, kk);
    down_sq *= Rational(n) + q - Rational(static_cast<long long>(i - 1) * k + 1, kk);
  }
  LadderElements out;
  out.diag = to_double(Rational(n) + q);
  out.up = std::sqrt(to_double(up_sq));
  out.down = down_sq == Rational(0) ? 0.0 : std::sqrt(to_double(down_sq));
  return out;
}

RepMatrices build_block_matrices(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  const int dim = label.M + 1;
  const int s = model.s;
  const int r = model.r;
  const Rational q1 = q1_of(model, label);
  const Rational l = l_of(model, label);
  const long long ss = static_cast<long long>(s) * s;
  const long long rr = static_cast<long long>(r) * r;

  RepMatrices m;
  m.q0 = Eigen::MatrixXd::Zero(dim, dim);
  m.qp = Eigen::MatrixXd::Zero(dim, dim);
  m.n1 = Eigen::MatrixXd::Zero(dim, dim);
  m.n2 = Eigen::MatrixXd::Zero(dim, dim);

  for (int n = 0; n < dim; ++n) {
    m.q0(n, n) = to_double(q1 - l + Rational(n));
    const auto [n1, n2] = occupations(model, label, n);
    m.n1(n, n) = static_cast<double>(n1);
    m.n2(n, n) = static_cast<double>(n2);
  }
  for (int n = 0; n + 1 < dim; ++n) {
    // Q+ |n> = sqrt(prod_r * prod_s) |n+1>; exact rational radicand.
    Rational radicand(1);
    for (int i = 1; i <= r; ++i) {
      radicand *= 2 * l - q1 - Rational(n) -
                  Rational(static_cast<long long>(i - 1) * r + 1, rr);
    }
    for (int j = 1; j <= s; ++j) {
      radicand *= Rational(n) + q1 + Rational(static_cast<long long>(j) * s - 1, ss);
    }
    m.qp(n + 1, n) = std::sqrt(to_double(radicand));
  }
  m.qm = m.qp.transpose();

  double power = 1.0;
  for (int i = 0; i < s; ++i) power *= s;
  for (int i = 0; i < r; ++i) power *= r;
  const double gscale = model.g * std::sqrt(power);

  m.h = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    const double n1 = m.n1(n, n);
    const double n2 = m.n2(n, n);
    m.h(n, n) = model.w1 * n1 + model.w2 * n2 + model.w11 * n1 * n1 + model.w22 * n2 * n2 +
                2.0 * model.w12 * n1 * n2;
  }
  for (int n = 0; n + 1 < dim; ++n) {
    const double offdiag = gscale * m.qp(n + 1, n);
    m.h(n + 1, n) += offdiag;
    m.h(n, n + 1) += offdiag;
  }
  return m;
}

double CommutatorReport::max_deviation() const {
  return std::max({ladder_plus, ladder_minus, structure});
}

CommutatorReport commutator_check(const RepMatrices& mats, const ModelParams& model,
                                  const BlockLabel& label) {
  validate_label(model, label);
  const int dim = label.M + 1;
  const Rational q1 = q1_of(model, label);
  const Rational l = l_of(model, label);

  const Eigen::MatrixXd ladder_p = mats.q0 * mats.qp - mats.qp * mats.q0 - mats.qp;
  const Eigen::MatrixXd ladder_m = mats.q0 * mats.qm - mats.qm * mats.q0 + mats.qm;

  Eigen::MatrixXd structure = mats.qp * mats.qm - mats.qm * mats.qp;
  for (int n = 0; n < dim; ++n) {
    const Rational x = q1 - l + Rational(n);
    const Rational expected = pair_structure_poly(model.s, model.r, x, l) -
                              pair_structure_poly(model.s, model.r, x - 1, l);
    structure(n, n) -= to_double(expected);
  }

  CommutatorReport report;
  report.ladder_plus = ladder_p.cwiseAbs().maxCoeff();
  report.ladder_minus = ladder_m.cwiseAbs().maxCoeff();
  report.structure = structure.cwiseAbs().maxCoeff();
  return report;
}

}  // namespace tmb
