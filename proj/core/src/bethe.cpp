#include "tmboson/bethe.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "tmboson/algebra.hpp"

namespace tmb {

namespace {

bool lex_less(const Complex& a, const Complex& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

std::vector<Complex> sorted_roots(std::vector<Complex> roots) {
  std::sort(roots.begin(), roots.end(), lex_less);
  return roots;
}

// e_0..e_top of the values in u (zero beyond the list size).
std::vector<Complex> elem_sym(const std::vector<Complex>& u, int top) {
  std::vector<Complex> e(static_cast<size_t>(top) + 1, 0.0);
  e[0] = 1.0;
  size_t used = 0;
  for (const Complex& x : u) {
    ++used;
    const size_t hi = std::min(used, static_cast<size_t>(top));
    for (size_t j = hi; j >= 1; --j) e[j] += x * e[j - 1];
  }
  return e;
}

std::vector<double> elem_sym_abs(const std::vector<Complex>& u, int top) {
  std::vector<double> e(static_cast<size_t>(top) + 1, 0.0);
  e[0] = 1.0;
  size_t used = 0;
  for (const Complex& x : u) {
    ++used;
    const double ax = std::abs(x);
    const size_t hi = std::min(used, static_cast<size_t>(top));
    for (size_t j = hi; j >= 1; --j) e[j] += ax * e[j - 1];
  }
  return e;
}

// e_k(u with u_q removed) for k = 0..top via the deflation recurrence.
std::vector<Complex> elem_sym_without(const std::vector<Complex>& e, const Complex& v,
                                      int top) {
  std::vector<Complex> f(static_cast<size_t>(top) + 1, 0.0);
  f[0] = 1.0;
  for (int k = 1; k <= top; ++k) {
    const Complex ek = static_cast<size_t>(k) < e.size() ? e[static_cast<size_t>(k)] : 0.0;
    f[static_cast<size_t>(k)] = ek - v * f[static_cast<size_t>(k - 1)];
  }
  return f;
}

double splitmix64_to_unit(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  z = z ^ (z >> 31);
  return static_cast<double>(z >> 11) * 0x1.0p-53;
}

std::uint64_t mix_seed(std::uint64_t seed, const BlockLabel& label) {
  std::uint64_t state = seed;
  for (std::uint64_t v : {static_cast<std::uint64_t>(label.M) + 1,
                          static_cast<std::uint64_t>(label.delta1) + 1,
                          static_cast<std::uint64_t>(label.delta2) + 1}) {
    state ^= v + 0x9e3779b97f4a7c15ull + (state << 6) + (state >> 2);
  }
  return state;
}

// Seed roots for the oracle-seeded refinement, computed in extended
// precision. Monomial coefficients of near-diagonal states span many orders
// of magnitude; double-precision eigenvectors cannot resolve their small
// roots well enough for Newton to latch on.
using LongMatrix = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;

std::vector<std::vector<Complex>> extended_precision_seeds(const ModelParams& model,
                                                           const BlockLabel& label,
                                                           double deficiency_tol = 1e-10) {
  const int dim = label.M + 1;
  LongMatrix h = LongMatrix::Zero(dim, dim);
  std::vector<long double> log_norm(static_cast<size_t>(dim), 0.0L);
  for (int n = 0; n < dim; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    const long double x1 = static_cast<long double>(n1);
    const long double x2 = static_cast<long double>(n2);
    h(n, n) = model.w1 * x1 + model.w2 * x2 + model.w11 * x1 * x1 + model.w22 * x2 * x2 +
              2.0L * model.w12 * x1 * x2;
    log_norm[static_cast<size_t>(n)] =
        std::lgammal(x1 + 1.0L) + std::lgammal(x2 + 1.0L);
  }
  for (int n = 0; n + 1 < dim; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    long double ratio = 1.0L;
    for (int j = 1; j <= model.s; ++j) ratio *= static_cast<long double>(n1 + j);
    for (int j = 0; j < model.r; ++j) ratio *= static_cast<long double>(n2 - j);
    const long double t = static_cast<long double>(model.g) * std::sqrt(ratio);
    h(n + 1, n) = t;
    h(n, n + 1) = t;
  }
  Eigen::SelfAdjointEigenSolver<LongMatrix> solver(h);
  std::vector<std::vector<Complex>> seeds;
  if (solver.info() != Eigen::Success) return seeds;
  for (int k = 0; k < dim; ++k) {
    std::vector<long double> coeff(static_cast<size_t>(dim));
    long double peak = 0.0L;
    for (int n = 0; n < dim; ++n) {
      coeff[static_cast<size_t>(n)] =
          solver.eigenvectors()(n, k) * std::exp(-0.5L * log_norm[static_cast<size_t>(n)]);
      peak = std::max(peak, std::abs(coeff[static_cast<size_t>(n)]));
    }
    if (label.M == 0 || std::abs(coeff.back()) < deficiency_tol * peak) continue;
    LongMatrix companion = LongMatrix::Zero(label.M, label.M);
    for (int i = 1; i < label.M; ++i) companion(i, i - 1) = 1.0L;
    for (int i = 0; i < label.M; ++i) {
      companion(i, label.M - 1) = -coeff[static_cast<size_t>(i)] / coeff.back();
    }
    Eigen::EigenSolver<LongMatrix> roots_solver(companion);
    if (roots_solver.info() != Eigen::Success) continue;
    std::vector<Complex> roots(static_cast<size_t>(label.M));
    for (int i = 0; i < label.M; ++i) {
      roots[static_cast<size_t>(i)] =
          Complex(static_cast<double>(roots_solver.eigenvalues()(i).real()),
                  static_cast<double>(roots_solver.eigenvalues()(i).imag()));
    }
    seeds.push_back(std::move(roots));
  }
  return seeds;
}

}  // namespace

BaeSystem::BaeSystem(const ModelParams& model, const BlockLabel& label)
    : m_(label.M), op_(build_diff_operator(model, label)) {
  const Polynomial& p1 = op_.p[1];
  double ratio = 1.0;
  if (p1.degree() >= 1) {
    const double lead = std::abs(p1.leading());
    if (lead > 0.0) {
      for (int k = 0; k < p1.degree(); ++k) ratio = std::max(ratio, std::abs(p1.coeff(k)) / lead);
    }
  }
  root_scale_ = 1.0 + ratio;
}

namespace {

void check_distinct(const std::vector<Complex>& roots, double threshold) {
  for (size_t i = 0; i < roots.size(); ++i) {
    for (size_t j = i + 1; j < roots.size(); ++j) {
      if (std::abs(roots[i] - roots[j]) <= threshold) {
        throw DegenerateRootsError("coincident Bethe roots: simple-pole form breaks down");
      }
    }
  }
}

}  // namespace

Eigen::VectorXcd BaeSystem::residuals(const std::vector<Complex>& roots,
                                      double degenerate_tol) const {
  if (static_cast<int>(roots.size()) != m_) {
    throw std::invalid_argument("bae residuals: expected M roots");
  }
  check_distinct(roots, degenerate_tol * root_scale_);
  const int d = op_.order;
  Eigen::VectorXcd res(m_);
  std::vector<Complex> u;
  u.reserve(roots.size());
  for (int p = 0; p < m_; ++p) {
    u.clear();
    for (int j = 0; j < m_; ++j) {
      if (j != p) u.push_back(1.0 / (roots[static_cast<size_t>(p)] - roots[static_cast<size_t>(j)]));
    }
    const auto e = elem_sym(u, d - 1);
    Complex acc = op_.p[1](roots[static_cast<size_t>(p)]);
    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) {
      factorial *= i;
      acc += factorial * op_.p[static_cast<size_t>(i)](roots[static_cast<size_t>(p)]) *
             e[static_cast<size_t>(i - 1)];
    }
    res(p) = acc;
  }
  return res;
}

double BaeSystem::residual_norm(const std::vector<Complex>& roots, double degenerate_tol) const {
  if (static_cast<int>(roots.size()) != m_) {
    throw std::invalid_argument("bae residual norm: expected M roots");
  }
  if (m_ == 0) return 0.0;
  check_distinct(roots, degenerate_tol * root_scale_);
  const int d = op_.order;
  double worst = 0.0;
  std::vector<Complex> u;
  u.reserve(roots.size());
  for (int p = 0; p < m_; ++p) {
    u.clear();
    for (int j = 0; j < m_; ++j) {
      if (j != p) u.push_back(1.0 / (roots[static_cast<size_t>(p)] - roots[static_cast<size_t>(j)]));
    }
    const auto e = elem_sym(u, d - 1);
    const auto e_abs = elem_sym_abs(u, d - 1);
    Complex acc = op_.p[1](roots[static_cast<size_t>(p)]);
    double scale = 1.0 + std::abs(acc);
    double factorial = 1.0;
    for (int i = 2; i <= d; ++i) {
      factorial *= i;
      const Complex pi = op_.p[static_cast<size_t>(i)](roots[static_cast<size_t>(p)]);
      acc += factorial * pi * e[static_cast<size_t>(i - 1)];
      scale += factorial * std::abs(pi) * e_abs[static_cast<size_t>(i - 1)];
    }
    worst = std::max(worst, std::abs(acc) / scale);
  }
  return worst;
}

Eigen::MatrixXcd BaeSystem::jacobian(const std::vector<Complex>& roots,
                                     double degenerate_tol) const {
  if (static_cast<int>(roots.size()) != m_) {
    throw std::invalid_argument("bae jacobian: expected M roots");
  }
  check_distinct(roots, degenerate_tol * root_scale_);
  const int d = op_.order;
  Eigen::MatrixXcd jac = Eigen::MatrixXcd::Zero(m_, m_);
  std::vector<Complex> u;
  std::vector<int> owner;  // root index of each entry in u
  for (int p = 0; p < m_; ++p) {
    const Complex zp = roots[static_cast<size_t>(p)];
    u.clear();
    owner.clear();
    for (int j = 0; j < m_; ++j) {
      if (j == p) continue;
      u.push_back(1.0 / (zp - roots[static_cast<size_t>(j)]));
      owner.push_back(j);
    }
    const auto e = elem_sym(u, d - 1);

    Complex diag = op_.p[1].derivative()(zp);
    {
      double factorial = 1.0;
      for (int i = 2; i <= d; ++i) {
        factorial *= i;
        diag += factorial * op_.p[static_cast<size_t>(i)].derivative()(zp) *
                e[static_cast<size_t>(i - 1)];
      }
    }
    for (size_t idx = 0; idx < u.size(); ++idx) {
      const Complex uq = u[idx];
      const auto f = elem_sym_without(e, uq, d - 2);
      Complex cross = 0.0;
      double factorial = 1.0;
      for (int i = 2; i <= d; ++i) {
        factorial *= i;
        cross += factorial * op_.p[static_cast<size_t>(i)](zp) * f[static_cast<size_t>(i - 2)];
      }
      jac(p, owner[idx]) = cross * uq * uq;
      diag -= cross * uq * uq;
    }
    jac(p, p) = diag;
  }
  return jac;
}

Eigen::VectorXcd bae_residuals(const std::vector<Complex>& roots, const ModelParams& model,
                               const BlockLabel& label, double degenerate_tol) {
  return BaeSystem(model, label).residuals(roots, degenerate_tol);
}

Eigen::MatrixXcd bae_jacobian(const std::vector<Complex>& roots, const ModelParams& model,
                              const BlockLabel& label, double degenerate_tol) {
  return BaeSystem(model, label).jacobian(roots, degenerate_tol);
}

long long energy_root_prefactor(const ModelParams& model, const BlockLabel& label) {
  validate_label(model, label);
  long long prod = 1;
  for (int j = 1; j <= model.r; ++j) prod *= label.delta2 + j;
  return prod;
}

double energy_from_roots(const std::vector<Complex>& roots, const ModelParams& model,
                         const BlockLabel& label, double imag_tol) {
  validate_label(model, label);
  Complex sum = 0.0;
  for (const Complex& root : roots) sum += root;
  if (std::abs(sum.imag()) > imag_tol * (1.0 + std::abs(sum.real()))) {
    throw InconsistentRootsError("root sum has a non-negligible imaginary part");
  }
  const double a = static_cast<double>(model.s) * label.M + label.delta1;
  const double d2 = label.delta2;
  const double prefactor = static_cast<double>(energy_root_prefactor(model, label));
  return model.w11 * a * a + model.w22 * d2 * d2 + 2.0 * model.w12 * a * d2 + model.w1 * a +
         model.w2 * d2 - model.g * prefactor * sum.real();
}

namespace {

// Pairs roots with their conjugates and replaces each pair by an exact
// conjugate pair (real roots become exactly real). Returns nullopt when the
// set is not conjugation-closed within tolerance.
std::optional<std::vector<Complex>> symmetrize_conjugate_roots(
    const std::vector<Complex>& roots, double conj_tol) {
  std::vector<Complex> symmetrized;
  symmetrized.reserve(roots.size());
  std::vector<bool> used(roots.size(), false);
  for (size_t i = 0; i < roots.size(); ++i) {
    if (used[i]) continue;
    const Complex a = roots[i];
    const double tol = conj_tol * (1.0 + std::abs(a));
    if (std::abs(a.imag()) <= tol) {
      used[i] = true;
      symmetrized.emplace_back(a.real(), 0.0);
      continue;
    }
    size_t best = roots.size();
    double best_dist = std::numeric_limits<double>::infinity();
    for (size_t j = i + 1; j < roots.size(); ++j) {
      if (used[j]) continue;
      const double dist = std::abs(std::conj(a) - roots[j]);
      if (dist < best_dist) {
        best_dist = dist;
        best = j;
      }
    }
    if (best == roots.size() || best_dist > tol) return std::nullopt;
    used[i] = used[best] = true;
    const Complex mean = 0.5 * (a + std::conj(roots[best]));
    symmetrized.push_back(mean);
    symmetrized.push_back(std::conj(mean));
  }
  return sorted_roots(std::move(symmetrized));
}

}  // namespace

Polynomial wavefunction_from_roots(const std::vector<Complex>& roots, double conj_tol) {
  auto symmetrized = symmetrize_conjugate_roots(roots, conj_tol);
  if (!symmetrized) {
    throw std::invalid_argument("wavefunction_from_roots: roots not conjugation-closed");
  }
  return polynomial_from_roots(*symmetrized);
}

namespace {

struct NewtonOutcome {
  std::vector<Complex> roots;
  double residual = 0.0;
};

class NewtonSolver {
 public:
  NewtonSolver(const BaeSystem& sys, const SolverConfig& config)
      : sys_(sys), config_(config) {}

  std::optional<NewtonOutcome> run(std::vector<Complex> roots) const {
    constexpr double kEvalTol = 1e-13;  // loose guard during iteration
    double norm;
    try {
      norm = sys_.residual_norm(roots, kEvalTol);
    } catch (const DegenerateRootsError&) {
      return std::nullopt;
    }
    int kicks = 0;
    for (int iter = 0; iter < config_.max_iters; ++iter) {
      if (norm < config_.tol) return polish(std::move(roots), norm);
      Eigen::VectorXcd res;
      Eigen::MatrixXcd jac;
      try {
        res = sys_.residuals(roots, kEvalTol);
        jac = sys_.jacobian(roots, kEvalTol);
      } catch (const DegenerateRootsError&) {
        return std::nullopt;
      }
      const Eigen::VectorXcd step = jac.partialPivLu().solve(-res);
      if (!step.allFinite()) return std::nullopt;

      double lambda = 1.0;
      bool improved = false;
      std::vector<Complex> trial(roots.size());
      for (int halving = 0; halving <= config_.max_halvings; ++halving) {
        for (size_t k = 0; k < roots.size(); ++k) {
          trial[k] = roots[k] + lambda * step(static_cast<Eigen::Index>(k));
        }
        double trial_norm = std::numeric_limits<double>::infinity();
        try {
          trial_norm = sys_.residual_norm(trial, kEvalTol);
        } catch (const DegenerateRootsError&) {
          trial_norm = std::numeric_limits<double>::infinity();
        }
        if (trial_norm < norm) {
          roots = trial;
          norm = trial_norm;
          improved = true;
          break;
        }
        lambda *= 0.5;
      }
      if (!improved) {
        // Line-search stall: kick off the plateau once or twice, then give up.
        if (kicks >= 2) return std::nullopt;
        ++kicks;
        for (size_t k = 0; k < roots.size(); ++k) {
          const double phase = 2.399963 * static_cast<double>(iter + 3 * k + 1);
          roots[k] *= 1.0 + 0.03 * Complex(std::cos(phase), std::sin(phase));
        }
        try {
          norm = sys_.residual_norm(roots, kEvalTol);
        } catch (const DegenerateRootsError&) {
          return std::nullopt;
        }
        continue;
      }

      double max_abs = 0.0;
      for (const Complex& root : roots) max_abs = std::max(max_abs, std::abs(root));
      if (max_abs > config_.divergence_factor * sys_.root_scale()) return std::nullopt;
    }
    if (norm < config_.tol) return polish(std::move(roots), norm);
    return std::nullopt;
  }

 private:
  // Full Newton steps past the tolerance; quadratic convergence drives the
  // residual to its floor, which matters for ill-scaled outlier-root states
  // whose energies inherit root error amplified by the root sum.
  NewtonOutcome polish(std::vector<Complex> roots, double norm) const {
    constexpr double kEvalTol = 1e-13;
    for (int extra = 0; extra < 4; ++extra) {
      std::vector<Complex> trial(roots.size());
      try {
        const Eigen::VectorXcd res = sys_.residuals(roots, kEvalTol);
        const Eigen::MatrixXcd jac = sys_.jacobian(roots, kEvalTol);
        const Eigen::VectorXcd step = jac.partialPivLu().solve(-res);
        if (!step.allFinite()) break;
        for (size_t k = 0; k < roots.size(); ++k) {
          trial[k] = roots[k] + step(static_cast<Eigen::Index>(k));
        }
        const double trial_norm = sys_.residual_norm(trial, kEvalTol);
        if (trial_norm >= norm) break;
        roots = std::move(trial);
        norm = trial_norm;
      } catch (const DegenerateRootsError&) {
        break;
      }
    }
    return NewtonOutcome{std::move(roots), norm};
  }

 public:

 private:
  const BaeSystem& sys_;
  const SolverConfig& config_;
};

}  // namespace

BetheSolveResult solve_bae(const ModelParams& model, const BlockLabel& label,
                           const SolverConfig& config) {
  validate_label(model, label);
  if (model.g == 0.0) {
    throw std::invalid_argument(
        "solve_bae: g = 0 is exactly solvable diagonally; use the oracle path");
  }
  BetheSolveResult result;
  const int m = label.M;
  if (m == 0) {
    BetheState state;
    state.energy = energy_from_roots({}, model, label);
    state.monomial_coeffs = {1.0};
    result.states.push_back(std::move(state));
    return result;
  }

  const BaeSystem sys(model, label);
  const NewtonSolver newton(sys, config);
  const double scale = sys.root_scale();
  const double dedup_threshold = config.dedup_tol * std::max(1.0, scale);
  const double degenerate_threshold = config.degenerate_tol * scale;
  std::uint64_t rng = mix_seed(config.seed, label);

  int rejected_degenerate = 0;
  int rejected_closure = 0;
  int rejected_eigen = 0;

  // Independent acceptance gate: the wavefunction, mapped back to the
  // orthonormal Fock basis, must satisfy h v = E v. The scaled BAE residual
  // alone can be fooled by near-coincident pole terms, and a monomial-basis
  // check is unreliable because that matrix is non-normal.
  const Eigen::MatrixXd h_sym = build_block_matrices(model, label).h;
  const double h_scale = 1.0 + h_sym.cwiseAbs().maxCoeff();
  std::vector<double> fock_weight(static_cast<size_t>(m) + 1);
  for (int n = 0; n <= m; ++n) {
    const auto [n1, n2] = occupations(model, label, n);
    fock_weight[static_cast<size_t>(n)] =
        std::exp(0.5 * (std::lgamma(static_cast<double>(n1) + 1.0) +
                        std::lgamma(static_cast<double>(n2) + 1.0)));
  }
  auto eigen_gap = [&](const Polynomial& psi, double energy) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(m + 1);
    for (int n = 0; n <= m; ++n) {
      v(n) = psi.coeff(n) * fock_weight[static_cast<size_t>(n)];
    }
    const double norm = v.norm();
    if (norm == 0.0) return std::numeric_limits<double>::infinity();
    return (h_sym * v - energy * v).norm() / (norm * h_scale);
  };

  // Multiset distance; accepted duplicates of one state may present their
  // conjugate pairs in a different index order.
  auto is_duplicate = [&](const std::vector<Complex>& roots) {
    for (const BetheState& st : result.states) {
      if (st.roots.size() != roots.size()) continue;
      std::vector<bool> used(roots.size(), false);
      double worst = 0.0;
      for (const Complex& root : st.roots) {
        double best = std::numeric_limits<double>::infinity();
        size_t best_j = roots.size();
        for (size_t j = 0; j < roots.size(); ++j) {
          if (used[j]) continue;
          const double dist = std::abs(root - roots[j]);
          if (dist < best) {
            best = dist;
            best_j = j;
          }
        }
        used[best_j] = true;
        worst = std::max(worst, best);
      }
      if (worst <= dedup_threshold) return true;
    }
    return false;
  };

  auto try_accept = [&](const NewtonOutcome& outcome) {
    auto symmetrized = symmetrize_conjugate_roots(outcome.roots, 1e-8);
    if (!symmetrized) {
      ++rejected_closure;
      return true;
    }
    std::vector<Complex> roots = std::move(*symmetrized);
    double min_dist = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < roots.size(); ++i) {
      for (size_t j = i + 1; j < roots.size(); ++j) {
        min_dist = std::min(min_dist, std::abs(roots[i] - roots[j]));
      }
    }
    if (m > 1 && min_dist <= degenerate_threshold) return false;  // caller may retry perturbed
    if (is_duplicate(roots)) return true;  // already known; nothing to add

    Polynomial psi;
    double energy;
    try {
      psi = polynomial_from_roots(roots);
      energy = energy_from_roots(roots, model, label);
    } catch (const std::exception&) {
      ++rejected_closure;
      return true;
    }
    if (eigen_gap(psi, energy) > config.eigen_tol) {
      ++rejected_eigen;
      return true;
    }
    BetheState state;
    state.roots = std::move(roots);
    state.energy = energy;
    state.residual_norm = outcome.residual;
    state.monomial_coeffs = psi.coeffs();
    for (const Complex& root : state.roots) {
      if (std::abs(root) < 1e-10 * std::max(1.0, scale)) state.near_zero_root = true;
    }
    result.states.push_back(std::move(state));
    return true;
  };

  // Accepted states seed targeted follow-up starts: spectral neighbours in
  // the interlacing ladder family differ by one root sign flip.
  std::vector<std::vector<Complex>> neighbour_seeds;
  // Complexify the two closest same-sign near-real roots into a conjugate
  // pair; transitions up the tower often form such strings.
  auto pair_morph = [](const std::vector<Complex>& seed) -> std::optional<std::vector<Complex>> {
    double best_gap = std::numeric_limits<double>::infinity();
    size_t bi = seed.size(), bj = seed.size();
    for (size_t i = 0; i < seed.size(); ++i) {
      if (std::abs(seed[i].imag()) > 0.2 * std::abs(seed[i])) continue;
      for (size_t j = i + 1; j < seed.size(); ++j) {
        if (std::abs(seed[j].imag()) > 0.2 * std::abs(seed[j])) continue;
        if ((seed[i].real() < 0.0) != (seed[j].real() < 0.0)) continue;
        const double gap = std::abs(seed[i] - seed[j]);
        if (gap < best_gap) {
          best_gap = gap;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi == seed.size()) return std::nullopt;
    std::vector<Complex> morphed = seed;
    const double center = 0.5 * (seed[bi].real() + seed[bj].real());
    const double offset = std::max(0.6 * std::abs(seed[bi].real() - seed[bj].real()),
                                   0.2 * std::abs(center));
    morphed[bi] = Complex(center, offset);
    morphed[bj] = Complex(center, -offset);
    return morphed;
  };
  auto push_neighbour_seeds = [&](const std::vector<Complex>& roots) {
    for (size_t i = 0; i < roots.size(); ++i) {
      std::vector<Complex> flipped = roots;
      flipped[i] = -flipped[i];
      if (auto morphed = pair_morph(flipped)) neighbour_seeds.push_back(std::move(*morphed));
      neighbour_seeds.push_back(std::move(flipped));
    }
    // Split each conjugate pair back into two reals.
    for (size_t i = 0; i < roots.size(); ++i) {
      if (roots[i].imag() <= 0.05 * std::abs(roots[i])) continue;
      for (size_t j = 0; j < roots.size(); ++j) {
        if (j == i) continue;
        if (std::abs(roots[j] - std::conj(roots[i])) > 1e-9 * (1.0 + std::abs(roots[i]))) continue;
        std::vector<Complex> split = roots;
        const double spread = std::max(std::abs(roots[i].imag()), 0.1 * std::abs(roots[i]));
        split[i] = Complex(roots[i].real() - spread, 0.0);
        split[j] = Complex(roots[i].real() + spread, 0.0);
        neighbour_seeds.push_back(std::move(split));
        break;
      }
    }
    // Promote move: convert the smallest root of the positive group into a
    // geometric extension of the negative ladder (and vice versa). The next
    // state up the tower sits almost exactly there.
    std::vector<double> neg_mags, pos_mags;
    size_t smallest_pos = roots.size(), smallest_neg = roots.size();
    for (size_t i = 0; i < roots.size(); ++i) {
      const double mag = std::abs(roots[i]);
      if (roots[i].real() < 0.0) {
        neg_mags.push_back(mag);
        if (smallest_neg == roots.size() || mag < std::abs(roots[smallest_neg])) smallest_neg = i;
      } else {
        pos_mags.push_back(mag);
        if (smallest_pos == roots.size() || mag < std::abs(roots[smallest_pos])) smallest_pos = i;
      }
    }
    auto ladder_extension = [](std::vector<double> mags) {
      std::sort(mags.begin(), mags.end());
      if (mags.size() >= 2) {
        const double ratio =
            std::pow(mags.back() / mags.front(), 1.0 / static_cast<double>(mags.size() - 1));
        return mags.front() / std::max(ratio, 1.05);
      }
      return mags.front() / 3.0;
    };
    auto ladder_extension_up = [](std::vector<double> mags) {
      std::sort(mags.begin(), mags.end());
      if (mags.size() >= 2) {
        const double ratio =
            std::pow(mags.back() / mags.front(), 1.0 / static_cast<double>(mags.size() - 1));
        return mags.back() * std::max(ratio, 1.05);
      }
      return mags.front() * 3.0;
    };
    auto group_center = [](const std::vector<double>& mags) {
      double log_sum = 0.0;
      for (double mag : mags) log_sum += std::log(mag);
      return std::exp(log_sum / static_cast<double>(mags.size()));
    };
    if (smallest_pos != roots.size()) {
      std::vector<Complex> seed = roots;
      if (!neg_mags.empty()) {
        seed[smallest_pos] = Complex(-ladder_extension(neg_mags), 0.0);
        if (auto morphed = pair_morph(seed)) neighbour_seeds.push_back(std::move(*morphed));
        neighbour_seeds.push_back(seed);
        seed[smallest_pos] = Complex(-group_center(neg_mags), 0.0);
        if (auto morphed = pair_morph(seed)) neighbour_seeds.push_back(std::move(*morphed));
        neighbour_seeds.push_back(seed);
        seed[smallest_pos] = Complex(-ladder_extension_up(neg_mags), 0.0);
        neighbour_seeds.push_back(std::move(seed));
      } else {
        std::sort(pos_mags.begin(), pos_mags.end());
        seed[smallest_pos] = Complex(-1.5 * pos_mags.back(), 0.0);
        neighbour_seeds.push_back(seed);
        seed[smallest_pos] = Complex(-pos_mags.front() / 1.5, 0.0);
        neighbour_seeds.push_back(std::move(seed));
      }
    }
    if (smallest_neg != roots.size() && !pos_mags.empty()) {
      std::vector<Complex> seed = roots;
      seed[smallest_neg] = Complex(ladder_extension(pos_mags), 0.0);
      if (auto morphed = pair_morph(seed)) neighbour_seeds.push_back(std::move(*morphed));
      neighbour_seeds.push_back(seed);
      seed[smallest_neg] = Complex(group_center(pos_mags), 0.0);
      neighbour_seeds.push_back(seed);
      seed[smallest_neg] = Complex(ladder_extension_up(pos_mags), 0.0);
      neighbour_seeds.push_back(std::move(seed));
    }
    // Rescale moves: shift the whole configuration a rung up or down.
    {
      std::vector<Complex> seed = roots;
      for (Complex& z : seed) z *= 3.0;
      neighbour_seeds.push_back(seed);
      for (Complex& z : seed) z /= 9.0;
      neighbour_seeds.push_back(std::move(seed));
    }
    // Interpolation and extrapolation against every other found state; the
    // states' root patterns deform continuously along the tower. Two
    // alignments: as stored (Re, Im) and by magnitude, which pairs ladder
    // rungs across a sign or pair transition.
    auto by_magnitude = [](std::vector<Complex> v) {
      std::sort(v.begin(), v.end(), [](const Complex& a, const Complex& b) {
        return std::norm(a) < std::norm(b);
      });
      return v;
    };
    const std::vector<Complex> roots_mag = by_magnitude(roots);
    for (const BetheState& other : result.states) {
      if (other.roots.size() != roots.size() || other.roots == roots) continue;
      std::vector<Complex> mid(roots.size()), ext(roots.size()), mid_mag(roots.size());
      const std::vector<Complex> other_mag = by_magnitude(other.roots);
      for (size_t k = 0; k < roots.size(); ++k) {
        mid[k] = 0.5 * (roots[k] + other.roots[k]);
        ext[k] = 2.0 * roots[k] - other.roots[k];
        mid_mag[k] = 0.5 * (roots_mag[k] + other_mag[k]);
      }
      neighbour_seeds.push_back(std::move(mid));
      neighbour_seeds.push_back(std::move(ext));
      neighbour_seeds.push_back(std::move(mid_mag));
    }
  };

  auto solve_from = [&](std::vector<Complex> start) {
    auto outcome = newton.run(std::move(start));
    if (!outcome) return;
    // Degenerate-configuration guard: perturb and retry a few times.
    for (int attempt = 0; attempt <= config.perturb_retries; ++attempt) {
      const size_t before = result.states.size();
      const bool settled = try_accept(*outcome);
      if (result.states.size() > before) {
        push_neighbour_seeds(result.states.back().roots);
      }
      if (settled) return;
      ++rejected_degenerate;
      std::vector<Complex> perturbed = outcome->roots;
      for (Complex& root : perturbed) {
        const double angle = 2.0 * M_PI * splitmix64_to_unit(rng);
        root += 10.0 * degenerate_threshold * Complex(std::cos(angle), std::sin(angle));
      }
      outcome = newton.run(std::move(perturbed));
      if (!outcome) return;
    }
  };

  if (config.oracle_seeding) {
    for (const auto& seed : extended_precision_seeds(model, label)) {
      solve_from(seed);
      if (static_cast<int>(result.states.size()) >= m + 1) break;
    }
  }

  // Start portfolio. Block eigenstates carry interlacing real root ladders:
  // the k-th excited state has k negative roots, the smallest magnitudes,
  // with magnitudes spread geometrically over several decades (conjugate
  // pairs appear only occasionally). Random disks alone hit a few basins
  // over and over, so most starts are geometric ladders that cycle the
  // negative-root count; disk and log-radius complex draws cover the rest.
  static constexpr double kRadiusLadder[] = {0.5, 1.0, 3.0, 8.0};
  const double log_lo = std::log(1e-3 * scale);
  const double log_hi = std::log(2e2 * scale);
  const int starts = config.starts < 0 ? 40 * (m + 1) : config.starts;
  for (int attempt = 0; attempt < starts; ++attempt) {
    if (static_cast<int>(result.states.size()) >= m + 1) break;
    // Alternate targeted seeds (newest first, depth-first along the tower)
    // with fresh random starts.
    if (!neighbour_seeds.empty() &&
        (attempt % 2 == 0 || neighbour_seeds.size() > 4 * static_cast<size_t>(m))) {
      std::vector<Complex> seed = std::move(neighbour_seeds.back());
      neighbour_seeds.pop_back();
      solve_from(std::move(seed));
      continue;
    }
    std::vector<Complex> start(static_cast<size_t>(m));
    switch (attempt % 4) {
      case 0:
      case 1: {  // signed geometric ladder cycling the negative-root count
        const int negatives = (attempt / 2) % (m + 1);
        const bool negatives_small = (attempt / (2 * (m + 1))) % 2 == 0;
        const bool complex_jitter = splitmix64_to_unit(rng) < 0.5;
        const double base =
            std::exp(std::log(2e-3 * scale) +
                     (std::log(3.0 * scale) - std::log(2e-3 * scale)) * splitmix64_to_unit(rng));
        const double top =
            std::exp(std::log(2.0 * base) +
                     (std::log(100.0 * scale) - std::log(2.0 * base)) * splitmix64_to_unit(rng));
        const double step = m > 1 ? std::pow(std::max(top / base, 1.5), 1.0 / (m - 1)) : 1.0;
        double mag = base;
        for (int k = 0; k < m; ++k) {
          const double jitter = std::exp(0.5 * (splitmix64_to_unit(rng) - 0.5));
          const bool negative = negatives_small ? k < negatives : k >= m - negatives;
          double im = 0.0;
          if (complex_jitter) im = 0.6 * mag * (splitmix64_to_unit(rng) - 0.5);
          start[static_cast<size_t>(k)] =
              Complex(negative ? -mag * jitter : mag * jitter, im);
          mag *= step;
        }
        break;
      }
      case 2: {  // uniform disk on a radius ladder
        const double rung = kRadiusLadder[(attempt / 4) % 4] * scale;
        for (Complex& z : start) {
          const double radius = rung * std::sqrt(splitmix64_to_unit(rng));
          const double angle = 2.0 * M_PI * splitmix64_to_unit(rng);
          z = radius * Complex(std::cos(angle), std::sin(angle));
        }
        break;
      }
      default:  // complex with log-uniform radii
        for (Complex& z : start) {
          const double radius = std::exp(log_lo + (log_hi - log_lo) * splitmix64_to_unit(rng));
          const double angle = 2.0 * M_PI * splitmix64_to_unit(rng);
          z = radius * Complex(std::cos(angle), std::sin(angle));
        }
    }
    solve_from(std::move(start));
  }

  std::sort(result.states.begin(), result.states.end(),
            [](const BetheState& a, const BetheState& b) { return a.energy < b.energy; });
  if (static_cast<int>(result.states.size()) < m + 1) {
    result.warnings.push_back("incomplete spectrum: found " +
                              std::to_string(result.states.size()) + " of " +
                              std::to_string(m + 1) + " states");
  }
  if (rejected_closure > 0) {
    result.warnings.push_back(std::to_string(rejected_closure) +
                              " converged configurations rejected (not conjugation-closed)");
  }
  if (rejected_eigen > 0) {
    result.warnings.push_back(std::to_string(rejected_eigen) +
                              " converged configurations rejected (eigenvalue equation residual)");
  }
  for (const BetheState& st : result.states) {
    if (st.near_zero_root) {
      result.warnings.push_back("state accepted with a root within 1e-10 of z = 0");
      break;
    }
  }
  return result;
}

PairingReport match_spectrum(const std::vector<double>& bethe_energies,
                             const std::vector<double>& oracle_energies) {
  struct Candidate {
    double de;
    int b;
    int o;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(bethe_energies.size() * oracle_energies.size());
  for (int b = 0; b < static_cast<int>(bethe_energies.size()); ++b) {
    for (int o = 0; o < static_cast<int>(oracle_energies.size()); ++o) {
      candidates.push_back({std::abs(bethe_energies[static_cast<size_t>(b)] -
                                     oracle_energies[static_cast<size_t>(o)]),
                            b, o});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& x, const Candidate& y) {
    if (x.de != y.de) return x.de < y.de;
    if (x.o != y.o) return x.o < y.o;
    return x.b < y.b;
  });
  std::vector<bool> b_used(bethe_energies.size(), false);
  std::vector<bool> o_used(oracle_energies.size(), false);
  PairingReport report;
  for (const Candidate& c : candidates) {
    if (b_used[static_cast<size_t>(c.b)] || o_used[static_cast<size_t>(c.o)]) continue;
    b_used[static_cast<size_t>(c.b)] = true;
    o_used[static_cast<size_t>(c.o)] = true;
    report.pairs.push_back({c.b, c.o, c.de});
    report.max_abs_de = std::max(report.max_abs_de, c.de);
  }
  std::sort(report.pairs.begin(), report.pairs.end(),
            [](const PairingReport::Pair& x, const PairingReport::Pair& y) {
              return x.oracle_index < y.oracle_index;
            });
  for (int b = 0; b < static_cast<int>(bethe_energies.size()); ++b) {
    if (!b_used[static_cast<size_t>(b)]) report.unmatched_bethe.push_back(b);
  }
  for (int o = 0; o < static_cast<int>(oracle_energies.size()); ++o) {
    if (!o_used[static_cast<size_t>(o)]) report.unmatched_oracle.push_back(o);
  }
  return report;
}

}  // namespace tmb
