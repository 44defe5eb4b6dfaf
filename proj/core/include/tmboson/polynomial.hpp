#ifndef TMBOSON_POLYNOMIAL_HPP
#define TMBOSON_POLYNOMIAL_HPP

#include <complex>
#include <limits>
#include <vector>

namespace tmb {

/// Dense real polynomial, coefficient index = power of z.
/// Trailing exact zeros are trimmed; the zero polynomial has no coefficients
/// and degree() returns kZeroDegree.
class Polynomial {
 public:
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs);

  static Polynomial constant(double c);
  static Polynomial monomial(int power, double coeff = 1.0);

  int degree() const;
  bool is_zero() const { return coeffs_.empty(); }
  const std::vector<double>& coeffs() const { return coeffs_; }
  /// Coefficient of z^k (0 beyond the stored degree).
  double coeff(int k) const;
  double leading() const;

  double operator()(double z) const;
  std::complex<double> operator()(const std::complex<double>& z) const;

  Polynomial derivative(int order = 1) const;
  /// Multiplies by z^k.
  Polynomial shifted_up(int k) const;

  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(double scale);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(Polynomial a, double s) { return a *= s; }
  friend Polynomial operator*(double s, Polynomial a) { return a *= s; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);

  double max_abs_coeff() const;

 private:
  void trim();
  std::vector<double> coeffs_;
};

/// Monic polynomial prod_i (z - roots[i]) for a conjugation-closed root set.
/// Throws std::invalid_argument when the imaginary residue of any coefficient
/// exceeds imag_tol relative to the coefficient scale.
Polynomial polynomial_from_roots(const std::vector<std::complex<double>>& roots,
                                 double imag_tol = 1e-10);

}  // namespace tmb

#endif
