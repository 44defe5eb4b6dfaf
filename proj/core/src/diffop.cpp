#include "tmboson/diffop.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmb {

namespace {

// Integer power with the sign kept, for s^s and (-r)^r prefactors.
double signed_pow(int base, int exp) {
  double v = 1.0;
  for (int i = 0; i < exp; ++i) v *= base;
  return v;
}

// Elementary symmetric polynomials e_0..e_m by the one-pass recurrence.
template <typename T>
std::vector<T> elementary_symmetric(const std::vector<T>& a) {
  std::vector<T> e(a.size() + 1, T(0));
  e[0] = T(1);
  size_t used = 0;
  for (const T& x : a) {
    ++used;
    for (size_t j = std::min(used, a.size()); j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

template <typename T>
std::vector<T> expand_euler_product_impl(const std::vector<T>& a) {
  if (a.empty()) throw std::invalid_argument("expand_euler_product: empty factor list");
  const int m = static_cast<int>(a.size());
  const auto e = elementary_symmetric(a);
  std::vector<T> c(static_cast<size_t>(m) + 1, T(0));
  c[0] = e[static_cast<size_t>(m)];
  for (int i = 1; i <= m; ++i) {
    T acc(0);
    for (int k = i; k <= m; ++k) {
      acc += e[static_cast<size_t>(m - k)] * T(stirling_second_kind(k, i));
    }
    c[static_cast<size_t>(i)] = acc;
  }
  return c;
}

}  // namespace

std::int64_t stirling_second_kind(int k, int i) {
  if (k < 1 || i < 1 || i > k) throw std::invalid_argument("stirling_second_kind: need 1 <= i <= k");
  if (i == k) return 1;
  // sum over increasing tuples n_1 < ... < n_t from {1..k-1} of
  // n_1 (n_2 - 1) ... (n_t - t + 1), with t = k - i.
  const int t = k - i;
  std::vector<int> tuple(static_cast<size_t>(t));
  for (int j = 0; j < t; ++j) tuple[static_cast<size_t>(j)] = j + 1;
  std::int64_t total = 0;
  while (true) {
    std::int64_t term = 1;
    for (int j = 0; j < t; ++j) term *= tuple[static_cast<size_t>(j)] - j;
    total += term;
    int pos = t - 1;
    while (pos >= 0 && tuple[static_cast<size_t>(pos)] == k - 1 - (t - 1 - pos)) --pos;
    if (pos < 0) break;
    ++tuple[static_cast<size_t>(pos)];
    for (int j = pos + 1; j < t; ++j)
      tuple[static_cast<size_t>(j)] = tuple[static_cast<size_t>(j - 1)] + 1;
  }
  return total;
}

std::vector<Rational> expand_euler_product(const std::vector<Rational>& a) {
  return expand_euler_product_impl(a);
}

std::vector<double> expand_euler_product(const std::vector<double>& a) {
  return expand_euler_product_impl(a);
}

std::vector<Rational> lowering_shift_values(const ModelParams& model, const BlockLabel& label) {
  const Rational q1 = q1_of(model, label);
  const int s = model.s;
  std::vector<Rational> a;
  a.reserve(static_cast<size_t>(s));
  for (int j = 1; j <= s; ++j) {
    a.push_back(q1 - Rational(static_cast<long long>(j - 1) * s + 1,
                              static_cast<long long>(s) * s));
  }
  return a;
}

std::vector<Rational> raising_shift_values(const ModelParams& model, const BlockLabel& label) {
  const Rational q1 = q1_of(model, label);
  const Rational l = l_of(model, label);
  const int r = model.r;
  std::vector<Rational> b;
  b.reserve(static_cast<size_t>(r));
  for (int j = 1; j <= r; ++j) {
    b.push_back(-(2 * l - q1 - Rational(static_cast<long long>(j - 1) * r + 1,
                                        static_cast<long long>(r) * r)));
  }
  return b;
}

Rational closure_product(const ModelParams& model, const BlockLabel& label, int m) {
  const Rational q1 = q1_of(model, label);
  const Rational l = l_of(model, label);
  const int r = model.r;
  Rational prod(1);
  for (int j = 1; j <= r; ++j) {
    prod *= Rational(r) * (2 * l - q1 -
                           Rational(static_cast<long long>(j - 1) * r + 1,
                                    static_cast<long long>(r) * r) -
                           Rational(m));
  }
  return prod;
}

DiffOperator build_diff_operator(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  const int s = model.s;
  const int r = model.r;
  const int order = std::max({s, r, 2});

  const auto c_lower = expand_euler_product(lowering_shift_values(model, label));
  const auto c_raise = expand_euler_product(raising_shift_values(model, label));
  if (c_lower[0] != Rational(0)) {
    throw std::logic_error("annihilation identity violated: z^{-1} term survives");
  }

  DiffOperator op;
  op.order = order;
  op.p.assign(static_cast<size_t>(order) + 1, Polynomial{});

  const double lower_scale = model.g * signed_pow(s, s);
  const double raise_scale = model.g * signed_pow(-r, r);
  for (int i = 1; i <= s; ++i) {
    op.p[static_cast<size_t>(i)] +=
        Polynomial::monomial(i - 1, lower_scale * to_double(c_lower[static_cast<size_t>(i)]));
  }
  for (int i = 0; i <= r; ++i) {
    op.p[static_cast<size_t>(i)] +=
        Polynomial::monomial(i + 1, raise_scale * to_double(c_raise[static_cast<size_t>(i)]));
  }

  // Diagonal part as a polynomial in the Euler operator D = z d/dz:
  // N1 = s D + delta1, N2 = beta - r D with beta = r M + delta2.
  const double d1 = label.delta1;
  const double beta = static_cast<double>(model.r) * label.M + label.delta2;
  const double f = model.w11 * s * s + model.w22 * r * r - 2.0 * model.w12 * s * r;
  const double c1 = model.w1 * s - model.w2 * r + 2.0 * model.w11 * s * d1 -
                    2.0 * model.w22 * r * beta + 2.0 * model.w12 * (s * beta - r * d1);
  const double c0 = model.w1 * d1 + model.w2 * beta + model.w11 * d1 * d1 +
                    model.w22 * beta * beta + 2.0 * model.w12 * d1 * beta;
  // D^2 = z^2 d^2 + z d, so the quadratic term feeds both P_2 and P_1.
  op.p[2] += Polynomial::monomial(2, f);
  op.p[1] += Polynomial::monomial(1, c1 + f);
  op.p[0] += Polynomial::constant(c0);
  return op;
}

double CaseCoefficients::at(const std::string& name) const {
  const auto it = values.find(name);
  if (it == values.end()) throw std::out_of_range("no case coefficient named " + name);
  return it->second;
}

CaseCoefficients case_coefficients(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  const double q1 = to_double(q1_of(model, label));
  const double l = to_double(l_of(model, label));
  const double w1 = model.w1, w2 = model.w2, w11 = model.w11, w22 = model.w22,
               w12 = model.w12, g = model.g;
  CaseCoefficients table;
  if (model.s == 1 && model.r == 1) {
    table.tag = "11";
    table.values["A11"] = w11 + w22 - 2.0 * w12;
    table.values["B11"] = w1 - w2 + w11 + (5.0 - 4.0 * l) * w22 + (4.0 * l - 6.0) * w12;
    table.values["D11"] = 2.0 * (l - 1.0) * w2 + 4.0 * (l - 1.0) * (l - 1.0) * w22;
  } else if (model.s == 2 && model.r == 1) {
    table.tag = "21";
    table.values["A21"] = 4.0 * w11 + w22 - 4.0 * w12;
    table.values["B21"] = 2.0 * w1 - w2 + 2.0 * w11 * (1.0 + 4.0 * q1) +
                          w22 * (3.0 + 2.0 * q1 - 4.0 * l) +
                          w12 * (-7.0 - 8.0 * q1 + 8.0 * l);
    table.values["D21"] = 2.0 * w1 * (q1 - 0.25) + w2 * (2.0 * l - q1 - 1.0) +
                          4.0 * w11 * (q1 - 0.25) * (q1 - 0.25) +
                          w22 * (2.0 * l - 1.0 - q1) * (2.0 * l - 1.0 - q1) +
                          4.0 * w12 * (q1 - 0.25) * (2.0 * l - 1.0 - q1);
  } else if (model.s == 2 && model.r == 2) {
    table.tag = "22";
    table.values["A22"] = w11 + w22 - 2.0 * w12;
    table.values["B22"] = 8.0 * g * (1.0 + q1 - 2.0 * l);
    table.values["D22"] = 2.0 * w1 - 2.0 * w2 + 2.0 * w11 * (1.0 + 4.0 * q1) +
                          2.0 * w22 * (3.0 - 8.0 * l + 4.0 * q1) +
                          8.0 * w12 * (-1.0 - 2.0 * q1 + 2.0 * l);
    table.values["F22"] = 4.0 * g * (2.0 * l - q1 - 0.25) * (2.0 * l - q1 - 0.75);
    table.values["G22"] = 2.0 * w1 * (q1 - 0.25) + 2.0 * w2 * (2.0 * l - q1 - 0.25) +
                          4.0 * w11 * (q1 - 0.25) * (q1 - 0.25) +
                          8.0 * w12 * (q1 - 0.25) * (2.0 * l - q1 - 0.25) +
                          4.0 * w22 * (2.0 * l - q1 - 0.25) * (2.0 * l - q1 - 0.25);
  } else if (model.s == 3 && model.r == 3) {
    table.tag = "33";
    const double ninth = 1.0 / 9.0;
    table.values["A33"] = 9.0 * g * (18.0 * l - 9.0 * q1 - 13.0);
    table.values["B33"] = 9.0 * (w11 + w22 - 2.0 * w12);
    table.values["D33"] = 9.0 * g * (9.0 * q1 + 5.0);
    table.values["F33"] = 9.0 * g * (-36.0 * l * l - 76.0 * ninth + 34.0 * l +
                                     36.0 * l * q1 - 9.0 * q1 * q1 - 17.0 * q1);
    table.values["G33"] = 3.0 * w1 - 3.0 * w2 + w11 * (7.0 + 18.0 * q1) +
                          2.0 * w12 * (-9.0 - 18.0 * q1 + 18.0 * l) +
                          w22 * (11.0 + 18.0 * q1 - 36.0 * l);
    table.values["K33"] = 9.0 * g * (q1 + 9.0 * q1 * q1 + 4.0 * ninth);
    table.values["R33"] = 27.0 * g * (2.0 * l - q1 - 1.0 * ninth) *
                          (2.0 * l - q1 - 4.0 * ninth) * (2.0 * l - q1 - 7.0 * ninth);
    table.values["S33"] = 9.0 * w11 * (q1 - ninth) * (q1 - ninth) +
                          9.0 * w22 * (2.0 * l - q1 - ninth) * (2.0 * l - q1 - ninth) +
                          18.0 * w12 * (q1 - ninth) * (2.0 * l - q1 - ninth) +
                          3.0 * w1 * (q1 - ninth) + 3.0 * w2 * (2.0 * l - q1 - ninth);
  } else {
    throw UnsupportedCaseError("no closed-form table for (s, r) = (" +
                               std::to_string(model.s) + ", " + std::to_string(model.r) + ")");
  }
  return table;
}

DiffOperator case_operator(const ModelParams& model, const BlockLabel& label) {
  const CaseCoefficients t = case_coefficients(model, label);
  const double q1 = to_double(q1_of(model, label));
  const double l = to_double(l_of(model, label));
  const double g = model.g;
  DiffOperator op;
  if (t.tag == "11") {
    op.order = 2;
    op.p = {Polynomial({t.at("D11"), 2.0 * (l - 1.0) * g}),
            Polynomial({g, t.at("B11"), -g}),
            Polynomial({0.0, 0.0, t.at("A11")})};
  } else if (t.tag == "21") {
    op.order = 2;
    op.p = {Polynomial({t.at("D21"), g * (2.0 * l - q1 - 1.0)}),
            Polynomial({8.0 * g * q1, t.at("B21"), -g}),
            Polynomial({0.0, 4.0 * g, t.at("A21")})};
  } else if (t.tag == "22") {
    op.order = 2;
    op.p = {Polynomial({t.at("G22"), t.at("F22")}),
            Polynomial({8.0 * g * q1, t.at("D22"), t.at("B22")}),
            Polynomial({0.0, 4.0 * g, 4.0 * t.at("A22"), 4.0 * g})};
  } else {
    op.order = 3;
    op.p = {Polynomial({t.at("S33"), t.at("R33")}),
            Polynomial({t.at("K33"), t.at("G33"), t.at("F33")}),
            Polynomial({0.0, t.at("D33"), t.at("B33"), t.at("A33")}),
            Polynomial({0.0, 0.0, 27.0 * g, 0.0, -27.0 * g})};
  }
  return op;
}

Polynomial apply_diffop(const DiffOperator& op, const Polynomial& poly) {
  Polynomial out;
  for (size_t i = 0; i < op.p.size(); ++i) {
    if (op.p[i].is_zero()) continue;
    out += op.p[i] * poly.derivative(static_cast<int>(i));
  }
  return out;
}

Eigen::MatrixXd diffop_block_matrix(const ModelParams& model, const BlockLabel& label) {
  const DiffOperator op = build_diff_operator(model, label);
  const int dim = label.M + 1;
  std::vector<double> log_norms(static_cast<size_t>(dim));
  for (int n = 0; n < dim; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    log_norms[static_cast<size_t>(n)] = std::lgamma(static_cast<double>(n1) + 1.0) +
                                        std::lgamma(static_cast<double>(n2) + 1.0);
  }
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int j = 0; j < dim; ++j) {
    const Polynomial image = apply_diffop(op, Polynomial::monomial(j));
    for (int i = 0; i < dim; ++i) {
      const double t = image.coeff(i);
      if (t == 0.0) continue;
      h(i, j) = t * std::exp(0.5 * (log_norms[static_cast<size_t>(i)] -
                                    log_norms[static_cast<size_t>(j)]));
    }
  }
  return h;
}

bool LeadingTermReport::pass(double tol) const {
  for (double e : relative_error) {
    if (!(e <= tol)) return false;
  }
  return closure_exact;
}

LeadingTermReport leading_term_check(const ModelParams& model, const BlockLabel& label) {
  const DiffOperator op = build_diff_operator(model, label);
  LeadingTermReport report;
  report.relative_error.reserve(static_cast<size_t>(label.M) + 1);
  for (int m = 0; m <= label.M; ++m) {
    const Polynomial image = apply_diffop(op, Polynomial::monomial(m));
    const double actual = image.coeff(m + 1);
    const double expected = model.g * to_double(closure_product(model, label, m));
    const double scale = 1.0 + std::max(std::abs(expected), image.max_abs_coeff());
    report.relative_error.push_back(std::abs(actual - expected) / scale);
    if (m == label.M) report.closure_coefficient = std::abs(actual);
  }
  report.closure_exact = closure_product(model, label, label.M) == Rational(0);
  return report;
}

}  // namespace tmb
