#include "tmboson/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tmb {

Polynomial::Polynomial(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

Polynomial Polynomial::constant(double c) { return Polynomial({c}); }

Polynomial Polynomial::monomial(int power, double coeff) {
  if (power < 0) throw std::invalid_argument("monomial power must be >= 0");
  std::vector<double> c(static_cast<size_t>(power) + 1, 0.0);
  c.back() = coeff;
  return Polynomial(std::move(c));
}

void Polynomial::trim() {
  while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

int Polynomial::degree() const {
  return coeffs_.empty() ? kZeroDegree : static_cast<int>(coeffs_.size()) - 1;
}

double Polynomial::coeff(int k) const {
  if (k < 0 || static_cast<size_t>(k) >= coeffs_.size()) return 0.0;
  return coeffs_[static_cast<size_t>(k)];
}

double Polynomial::leading() const { return coeffs_.empty() ? 0.0 : coeffs_.back(); }

double Polynomial::operator()(double z) const {
  double acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::complex<double> Polynomial::operator()(const std::complex<double>& z) const {
  std::complex<double> acc = 0.0;
  for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

Polynomial Polynomial::derivative(int order) const {
  if (order < 0) throw std::invalid_argument("derivative order must be >= 0");
  std::vector<double> c = coeffs_;
  for (int pass = 0; pass < order; ++pass) {
    if (c.empty()) break;
    for (size_t k = 1; k < c.size(); ++k) c[k - 1] = c[k] * static_cast<double>(k);
    c.pop_back();
  }
  return Polynomial(std::move(c));
}

Polynomial Polynomial::shifted_up(int k) const {
  if (k < 0) throw std::invalid_argument("shift power must be >= 0");
  if (coeffs_.empty()) return {};
  std::vector<double> c(static_cast<size_t>(k), 0.0);
  c.insert(c.end(), coeffs_.begin(), coeffs_.end());
  return Polynomial(std::move(c));
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] += other.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  if (other.coeffs_.size() > coeffs_.size()) coeffs_.resize(other.coeffs_.size(), 0.0);
  for (size_t k = 0; k < other.coeffs_.size(); ++k) coeffs_[k] -= other.coeffs_[k];
  trim();
  return *this;
}

Polynomial& Polynomial::operator*=(double scale) {
  for (double& c : coeffs_) c *= scale;
  trim();
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  if (a.coeffs_.empty() || b.coeffs_.empty()) return {};
  std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
  for (size_t i = 0; i < a.coeffs_.size(); ++i) {
    for (size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
  }
  return Polynomial(std::move(c));
}

double Polynomial::max_abs_coeff() const {
  double m = 0.0;
  for (double c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

Polynomial polynomial_from_roots(const std::vector<std::complex<double>>& roots,
                                 double imag_tol) {
  std::vector<std::complex<double>> c{1.0};  // ascending powers
  for (const auto& root : roots) {
    std::vector<std::complex<double>> next(c.size() + 1, 0.0);
    for (size_t k = 0; k < c.size(); ++k) {
      next[k + 1] += c[k];
      next[k] -= root * c[k];
    }
    c = std::move(next);
  }
  double scale = 0.0;
  for (const auto& v : c) scale = std::max(scale, std::abs(v));
  std::vector<double> real_coeffs(c.size());
  for (size_t k = 0; k < c.size(); ++k) {
    if (std::abs(c[k].imag()) > imag_tol * (1.0 + scale)) {
      throw std::invalid_argument("polynomial_from_roots: root set is not conjugation-closed");
    }
    real_coeffs[k] = c[k].real();
  }
  return Polynomial(std::move(real_coeffs));
}

}  // namespace tmb
