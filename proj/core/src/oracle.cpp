#include "tmboson/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "tmboson/bethe.hpp"

namespace tmb {

namespace {

// log(n!) via lgamma; exact enough for the occupation cap.
double log_factorial(long long n) { return std::lgamma(static_cast<double>(n) + 1.0); }

void check_capacity(const ModelParams& model, const BlockLabel& label, long long cap) {
  const auto [n1_max, n2_max] = occupations(model, label, label.M);
  const auto [n1_min, n2_min] = occupations(model, label, 0);
  const long long peak = std::max({n1_max, n2_max, n1_min, n2_min});
  if (peak > cap) {
    throw CapacityError("block occupations reach " + std::to_string(peak) +
                        ", beyond the configured cap " + std::to_string(cap));
  }
}

}  // namespace

Eigen::MatrixXd build_fock_hamiltonian(const ModelParams& model, const BlockLabel& label,
                                       long long occupation_cap) {
  validate_label(model, label);
  check_capacity(model, label, occupation_cap);
  const int dim = label.M + 1;
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (int n = 0; n < dim; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    const double x1 = static_cast<double>(n1);
    const double x2 = static_cast<double>(n2);
    h(n, n) = model.w1 * x1 + model.w2 * x2 + model.w11 * x1 * x1 + model.w22 * x2 * x2 +
              2.0 * model.w12 * x1 * x2;
  }
  for (int n = 0; n + 1 < dim; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    // <n+1| a1^dag^s a2^r |n> = sqrt((n1+s)!/n1!) sqrt(n2!/(n2-r)!)
    const double log_ratio = 0.5 * (log_factorial(n1 + model.s) - log_factorial(n1) +
                                    log_factorial(n2) - log_factorial(n2 - model.r));
    const double t = model.g * std::exp(log_ratio);
    h(n + 1, n) = t;
    h(n, n + 1) = t;
  }
  return h;
}

std::vector<std::pair<double, Eigen::VectorXd>> diagonalize_block(const Eigen::MatrixXd& h) {
  if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize_block: square matrix required");
  const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
  if ((h - h.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("diagonalize_block: matrix is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("diagonalize_block: eigensolver failed to converge");
  }
  std::vector<std::pair<double, Eigen::VectorXd>> out;
  out.reserve(static_cast<size_t>(h.rows()));
  for (int k = 0; k < h.rows(); ++k) {
    Eigen::VectorXd v = solver.eigenvectors().col(k);
    for (int i = 0; i < v.size(); ++i) {
      if (std::abs(v(i)) > 1e-12) {
        if (v(i) < 0.0) v = -v;
        break;
      }
    }
    out.emplace_back(solver.eigenvalues()(k), std::move(v));
  }
  return out;
}

Polynomial eigenvector_to_polynomial(const Eigen::VectorXd& fock_vector,
                                     const ModelParams& model, const BlockLabel& label,
                                     bool* deficient, double deficiency_tol) {
  validate_label(model, label);
  if (fock_vector.size() != label.M + 1) {
    throw std::invalid_argument("eigenvector_to_polynomial: vector size must be M + 1");
  }
  std::vector<double> coeffs(static_cast<size_t>(label.M) + 1);
  for (int n = 0; n <= label.M; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    coeffs[static_cast<size_t>(n)] =
        fock_vector(n) * std::exp(-0.5 * (log_factorial(n1) + log_factorial(n2)));
  }
  double peak = 0.0;
  for (double c : coeffs) peak = std::max(peak, std::abs(c));
  const double lead = coeffs.back();
  const bool is_deficient = std::abs(lead) < deficiency_tol * peak;
  if (deficient != nullptr) *deficient = is_deficient;
  if (!is_deficient && lead != 1.0) {
    for (double& c : coeffs) c /= lead;
  }
  return Polynomial(std::move(coeffs));
}

std::vector<std::complex<double>> polynomial_roots(const Polynomial& poly) {
  const int degree = poly.degree();
  if (degree == Polynomial::kZeroDegree) {
    throw std::invalid_argument("polynomial_roots: zero polynomial");
  }
  if (degree == 0) return {};
  const double lead = poly.leading();
  if (degree == 1) {
    return {std::complex<double>(-poly.coeff(0) / lead, 0.0)};
  }
  Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(degree, degree);
  for (int i = 1; i < degree; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < degree; ++i) companion(i, degree - 1) = -poly.coeff(i) / lead;
  Eigen::EigenSolver<Eigen::MatrixXd> solver(companion);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("polynomial_roots: companion eigensolver failed");
  }
  std::vector<std::complex<double>> roots(static_cast<size_t>(degree));
  for (int k = 0; k < degree; ++k) roots[static_cast<size_t>(k)] = solver.eigenvalues()(k);
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return roots;
}

std::vector<OracleState> oracle_states(const ModelParams& model, const BlockLabel& label,
                                       long long occupation_cap) {
  const Eigen::MatrixXd h = build_fock_hamiltonian(model, label, occupation_cap);
  auto pairs = diagonalize_block(h);
  std::vector<OracleState> states;
  states.reserve(pairs.size());
  for (auto& [energy, vector] : pairs) {
    OracleState state;
    state.energy = energy;
    state.monomial = eigenvector_to_polynomial(vector, model, label, &state.leading_deficient);
    if (!state.leading_deficient && state.monomial.degree() >= 1) {
      state.roots = polynomial_roots(state.monomial);
    }
    state.fock_vector = std::move(vector);
    states.push_back(std::move(state));
  }
  return states;
}

OracleBetheReport oracle_bethe_check(const ModelParams& model, const BlockLabel& label) {
  OracleBetheReport report;
  if (model.g == 0.0) {
    report.skipped_exactly_solvable = true;
    return report;
  }
  const auto states = oracle_states(model, label);
  const BaeSystem sys(model, label);
  for (int k = 0; k < static_cast<int>(states.size()); ++k) {
    const OracleState& state = states[static_cast<size_t>(k)];
    OracleBetheReport::Entry entry;
    entry.state_index = k;
    entry.deficient = state.leading_deficient;
    if (!entry.deficient) {
      try {
        entry.residual = sys.residual_norm(state.roots);
        const double formula = energy_from_roots(state.roots, model, label);
        entry.energy_error = std::abs(formula - state.energy) / (1.0 + std::abs(state.energy));
        report.max_residual = std::max(report.max_residual, entry.residual);
        report.max_energy_error = std::max(report.max_energy_error, entry.energy_error);
      } catch (const DegenerateRootsError&) {
        entry.degenerate = true;
      }
    }
    report.entries.push_back(entry);
  }
  return report;
}

}  // namespace tmb
