#ifndef TMBOSON_QES_HPP
#define TMBOSON_QES_HPP

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "tmboson/bethe.hpp"
#include "tmboson/diffop.hpp"
#include "tmboson/model.hpp"
#include "tmboson/polynomial.hpp"

namespace tmb {

/// Second-order operator split H = P d^2 + (Q + P'/2) d + R.
struct NormalForm {
  Polynomial P;
  Polynomial Q;  // P_1 - P_2'/2
  Polynomial R;  // P_0
};

/// Throws UnsupportedCaseError unless op.order == 2.
NormalForm normal_form(const DiffOperator& op);

enum class PotentialCase {
  kCoshI,           // s = r = 1, P = A z^2
  kHyperbolicII,    // s = 2, r = 1, A != 0
  kSexticII,        // s = 2, r = 1, A == 0
  kWeierstrassIII,  // s = r = 2 (parametric sampling only)
  kGeneric,
};

std::string to_string(PotentialCase c);

/// The Liouville change of variable x(z) = sign * int dz / sqrt(P), the gauge
/// exponent W with psi_tilde = exp(-W(x)) psi(z(x)), and the potential
///   V = -R + Q'/2 - Q (P' - Q) / (4P)
/// evaluated in z. Closed forms are used for the recognized cases; otherwise
/// x and W come from adaptive quadrature anchored at the interval midpoint.
class PotentialMap {
 public:
  PotentialMap(const ModelParams& model, const BlockLabel& label, int sign = +1);

  PotentialCase potential_case() const { return case_; }
  const NormalForm& nf() const { return nf_; }
  int sign() const { return sign_; }

  /// Named closed-form constants of the recognized case (empty for generic).
  const std::map<std::string, double>& constants() const { return constants_; }
  /// Weierstrass invariants (g2, g3), recorded for the (2,2) case only.
  std::optional<std::pair<double, double>> weierstrass_invariants() const;

  /// Throws std::domain_error when P(z) <= 0 anywhere on the requested range.
  double x_of_z(double z) const;
  double w_of_z(double z) const;
  double v_of_z(double z) const;

  /// Inverse map where a closed form exists; quadrature-free.
  double z_of_x(double x) const;
  bool has_closed_inverse() const;

  /// Closed-form potential as a function of x (cases I, II, II-sextic).
  double closed_form_v(double x) const;
  bool has_closed_form_v() const;

  /// Sets the quadrature anchor for the x and W integrals (the samplers
  /// default it to the interval midpoint; closed-form cases ignore it).
  void set_anchor(double z_anchor) const;
  bool has_anchor() const { return anchor_.has_value(); }

 private:
  void classify(const ModelParams& model, const BlockLabel& label);

  PotentialCase case_ = PotentialCase::kGeneric;
  NormalForm nf_;
  int sign_ = +1;
  double g_ = 0.0;
  double l_ = 0.0;
  double q1_ = 0.0;
  std::map<std::string, double> constants_;
  mutable std::optional<double> anchor_;
};

/// Tabulated potential over a strictly monotone x grid.
struct SampledPotential {
  std::string case_tag;
  int sign = +1;
  std::vector<double> z;
  std::vector<double> x;
  std::vector<double> v;
  std::vector<double> w;
  std::map<std::string, double> closed_form_constants;
  std::optional<std::pair<double, double>> weierstrass_invariants;
};

/// x(z) samples over [z_lo, z_hi]; throws std::domain_error when P <= 0
/// inside the interval.
std::vector<double> change_of_variable(const PotentialMap& map, double z_lo, double z_hi,
                                       int n_samples);

/// Full sampling of (z, x, V, W) over the interval; validates monotone x and
/// finite V.
SampledPotential gauge_and_potential(const PotentialMap& map, double z_lo, double z_hi,
                                     int n_samples);

/// psi_tilde = exp(-W) * psi(z) on the sample grid, one column per state.
std::vector<double> psi_tilde_values(const PotentialMap& map, const Polynomial& psi,
                                     const std::vector<double>& z_grid);

/// Lowest eigenvalues of -d^2/dx^2 + V on [-L, L], Dirichlet ends, N interior
/// points, by Sturm-sequence bisection of the finite-difference matrix.
std::vector<double> fd_eigenvalues(const std::function<double(double)>& potential, double L,
                                   int N, int count);
/// All finite-difference eigenvalues in [lo, hi].
std::vector<double> fd_eigenvalues_between(const std::function<double(double)>& potential,
                                           double L, int N, double lo, double hi);

struct FdGridConfig {
  double L = 0.0;      // 0 => grow until the ends clear the confinement margin
  int N = 4000;        // interior grid points
  double tol = 1e-3;   // relative match tolerance (grid limited)
  double margin = 10;  // required V(+-L) - max(-E)
};

struct SpectralEquivalenceReport {
  struct Entry {
    double block_energy = 0.0;  // E
    double target = 0.0;        // -E
    double nearest_fd = 0.0;
    double rel_error = 0.0;     // |target - nearest| / (1 + |E|)
    bool matched = false;
  };
  bool checkable = false;
  std::string note;
  double grid_l = 0.0;
  int grid_n = 0;
  std::vector<Entry> entries;
  bool all_matched = false;
  double max_rel_error = 0.0;
};

/// Checks -E membership in the finite-difference spectrum for each block
/// energy. Non-confining potentials yield checkable = false, not an error.
SpectralEquivalenceReport verify_spectral_equivalence(
    const std::function<double(double)>& potential, const std::vector<double>& energies,
    const FdGridConfig& grid = {});

/// Same check driven by a sampled potential (linear interpolation in x).
SpectralEquivalenceReport verify_spectral_equivalence(const SampledPotential& pot,
                                                      const std::vector<double>& energies,
                                                      const FdGridConfig& grid = {});

/// Max interior |(-D2 + V + E) psi_tilde| / max|psi_tilde| with the second
/// central difference on a uniform x grid of n points spanning [x_lo, x_hi].
double schrodinger_residual(const PotentialMap& map, const Polynomial& psi, double energy,
                            double x_lo, double x_hi, int n);

/// Adaptive Simpson quadrature, shared by the change-of-variable machinery.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-12);

}  // namespace tmb

#endif
