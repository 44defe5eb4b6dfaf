#include "tmboson/qes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace tmb {

NormalForm normal_form(const DiffOperator& op) {
  if (op.order != 2) {
    throw UnsupportedCaseError("normal form requires a second-order operator (max{s,r} <= 2)");
  }
  NormalForm nf;
  nf.P = op.p[2];
  nf.Q = op.p[1] - 0.5 * op.p[2].derivative();
  nf.R = op.p[0];
  return nf;
}

std::string to_string(PotentialCase c) {
  switch (c) {
    case PotentialCase::kCoshI: return "I";
    case PotentialCase::kHyperbolicII: return "II";
    case PotentialCase::kSexticII: return "II-sextic";
    case PotentialCase::kWeierstrassIII: return "III";
    case PotentialCase::kGeneric: return "generic";
  }
  return "generic";
}

PotentialMap::PotentialMap(const ModelParams& model, const BlockLabel& label, int sign)
    : sign_(sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("branch sign must be +1 or -1");
  nf_ = normal_form(build_diff_operator(model, label));
  classify(model, label);
}

void PotentialMap::classify(const ModelParams& model, const BlockLabel& label) {
  g_ = model.g;
  l_ = to_double(l_of(model, label));
  q1_ = to_double(q1_of(model, label));
  case_ = PotentialCase::kGeneric;

  const double coupling_scale =
      std::max({1.0, std::abs(model.w1), std::abs(model.w2), std::abs(model.w11),
                std::abs(model.w22), std::abs(model.w12), std::abs(model.g)});
  const double tiny = 1e-12 * coupling_scale;

  if (model.s == 1 && model.r == 1) {
    const CaseCoefficients t = case_coefficients(model, label);
    const double a = t.at("A11"), b = t.at("B11"), d = t.at("D11");
    if (a > tiny) {
      case_ = PotentialCase::kCoshI;
      constants_ = t.values;
      constants_["sqrt_a"] = std::sqrt(a);
      constants_["cosh2_coeff"] = g_ * g_ / (2.0 * a);
      constants_["sinh_coeff"] = g_ * (2.0 - b / a);
      constants_["exp_coeff"] = -(2.0 * l_ - 1.0) * g_;
      constants_["v_const"] = -d + ((a - b) * (a - b) - 2.0 * g_ * g_) / (4.0 * a);
    }
  } else if (model.s == 2 && model.r == 1) {
    const CaseCoefficients t = case_coefficients(model, label);
    const double a = t.at("A21"), b = t.at("B21"), d = t.at("D21");
    if (std::abs(a) <= tiny && std::abs(g_) > 0.0) {
      case_ = PotentialCase::kSexticII;
      constants_ = t.values;
      constants_["x6"] = std::pow(g_, 4) / 16.0;
      constants_["x4"] = -g_ * g_ * b / 8.0;
      constants_["x2"] = (b * b + 8.0 * g_ * g_ * (1.0 - 4.0 * l_)) / 16.0;
      constants_["v_const"] = q1_ * b - d;
    } else if (a > tiny) {
      case_ = PotentialCase::kHyperbolicII;
      constants_ = t.values;
      constants_["sqrt_a"] = std::sqrt(a);
    }
  } else if (model.s == 2 && model.r == 2 && std::abs(g_) > 0.0) {
    const CaseCoefficients t = case_coefficients(model, label);
    case_ = PotentialCase::kWeierstrassIII;
    constants_ = t.values;
    const double a = t.at("A22");
    const double cbrt_g = std::cbrt(g_);
    constants_["g2"] = (4.0 / 3.0) * cbrt_g * cbrt_g * (a * a / (g_ * g_) - 3.0);
    constants_["g3"] = (4.0 / 27.0) * a * (9.0 - 2.0 * a * a / (g_ * g_));
  }
}

std::optional<std::pair<double, double>> PotentialMap::weierstrass_invariants() const {
  if (case_ != PotentialCase::kWeierstrassIII) return std::nullopt;
  return std::make_pair(constants_.at("g2"), constants_.at("g3"));
}

void PotentialMap::set_anchor(double z_anchor) const { anchor_ = z_anchor; }

double PotentialMap::x_of_z(double z) const {
  switch (case_) {
    case PotentialCase::kCoshI: {
      if (z <= 0.0) throw std::domain_error("case I map needs z > 0");
      return sign_ * std::log(z) / constants_.at("sqrt_a");
    }
    case PotentialCase::kHyperbolicII: {
      const double arg = 1.0 + constants_.at("A21") * z / (2.0 * g_);
      if (arg < 1.0) throw std::domain_error("case II map needs A21 z / (2g) >= 0");
      return sign_ * std::acosh(arg) / constants_.at("sqrt_a");
    }
    case PotentialCase::kSexticII: {
      const double t = z / g_;
      if (t < 0.0) throw std::domain_error("sextic map needs z/g >= 0");
      return sign_ * std::sqrt(t);
    }
    default: {
      if (!anchor_) throw std::logic_error("x_of_z: quadrature anchor not set");
      const Polynomial& p = nf_.P;
      auto integrand = [&p](double y) {
        const double v = p(y);
        if (v <= 0.0) throw std::domain_error("P(z) <= 0 inside the mapped interval");
        return 1.0 / std::sqrt(v);
      };
      return sign_ * integrate(integrand, *anchor_, z);
    }
  }
}

double PotentialMap::w_of_z(double z) const {
  // Convention: psi_tilde = exp(-W) psi solves the Schroedinger equation, so
  // dW/dz = -Q/(2P).
  switch (case_) {
    case PotentialCase::kCoshI: {
      if (z <= 0.0) throw std::domain_error("case I map needs z > 0");
      const double a = constants_.at("A11"), b = constants_.at("B11");
      return (g_ * z - (b - a) * std::log(z) + g_ / z) / (2.0 * a);
    }
    case PotentialCase::kSexticII: {
      if (z <= 0.0) throw std::domain_error("sextic gauge needs z > 0");
      const double b = constants_.at("B21");
      return z * z / 16.0 - b * z / (8.0 * g_) - (4.0 * q1_ - 1.0) / 4.0 * std::log(z);
    }
    default: {
      if (!anchor_) throw std::logic_error("w_of_z: quadrature anchor not set");
      const Polynomial& p = nf_.P;
      const Polynomial& q = nf_.Q;
      auto integrand = [&p, &q](double y) {
        const double pv = p(y);
        if (pv <= 0.0) throw std::domain_error("P(z) <= 0 inside the mapped interval");
        return -q(y) / (2.0 * pv);
      };
      return integrate(integrand, *anchor_, z);
    }
  }
}

double PotentialMap::v_of_z(double z) const {
  const double p = nf_.P(z);
  if (p <= 0.0) throw std::domain_error("V(z): P(z) <= 0 at a sampled point");
  const double q = nf_.Q(z);
  const double dq = nf_.Q.derivative()(z);
  const double dp = nf_.P.derivative()(z);
  return -nf_.R(z) + 0.5 * dq - q * (dp - q) / (4.0 * p);
}

bool PotentialMap::has_closed_inverse() const {
  return case_ == PotentialCase::kCoshI || case_ == PotentialCase::kHyperbolicII ||
         case_ == PotentialCase::kSexticII;
}

double PotentialMap::z_of_x(double x) const {
  const double t = sign_ * x;
  switch (case_) {
    case PotentialCase::kCoshI:
      return std::exp(constants_.at("sqrt_a") * t);
    case PotentialCase::kHyperbolicII:
      return 2.0 * g_ / constants_.at("A21") * (std::cosh(constants_.at("sqrt_a") * t) - 1.0);
    case PotentialCase::kSexticII:
      return g_ * t * t;
    default:
      throw UnsupportedCaseError("no closed-form inverse for this case");
  }
}

bool PotentialMap::has_closed_form_v() const {
  return case_ == PotentialCase::kCoshI || case_ == PotentialCase::kHyperbolicII ||
         case_ == PotentialCase::kSexticII;
}

double PotentialMap::closed_form_v(double x) const {
  const double t = sign_ * x;
  switch (case_) {
    case PotentialCase::kCoshI: {
      const double w = constants_.at("sqrt_a") * t;
      return constants_.at("cosh2_coeff") * std::cosh(2.0 * w) +
             constants_.at("sinh_coeff") * std::sinh(w) +
             constants_.at("exp_coeff") * std::exp(w) + constants_.at("v_const");
    }
    case PotentialCase::kHyperbolicII: {
      const double a = constants_.at("A21"), b = constants_.at("B21"), d = constants_.at("D21");
      const double u = 0.5 * constants_.at("sqrt_a") * t;
      const double sh = std::sinh(u), ch = std::cosh(u), th = sh / ch;
      const double sh2 = sh * sh, th2 = th * th;
      return g_ * g_ / (a * a) * th2 * sh2 * (4.0 * g_ * g_ / a * sh2 + 2.0 * (2.0 * a - b)) +
             ((a - b) * (3.0 * a - b) + 8.0 * g_ * g_ * (1.0 - 2.0 * q1_)) / (4.0 * a) * th2 -
             4.0 * (2.0 * l_ - q1_) * g_ * g_ / a * sh2 +
             ((3.0 - 8.0 * q1_) * a + (4.0 * q1_ - 2.0) * b) / (4.0 * ch * ch) +
             (b - a) / 2.0 - d;
    }
    case PotentialCase::kSexticII: {
      const double x2 = t * t;
      return ((constants_.at("x6") * x2 + constants_.at("x4")) * x2 + constants_.at("x2")) * x2 +
             constants_.at("v_const");
    }
    default:
      throw UnsupportedCaseError("no closed-form potential for this case");
  }
}

namespace {

double simpson_rule(double fa, double fm, double fb, double a, double b) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double fa, double b,
                        double fb, double m, double fm, double whole, double tol, int depth) {
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = simpson_rule(fa, flm, fm, a, m);
  const double right = simpson_rule(fm, frm, fb, m, b);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_simpson(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  if (a == b) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double m = 0.5 * (a + b);
  const double fm = f(m);
  const double whole = simpson_rule(fa, fm, fb, a, b);
  return adaptive_simpson(f, a, fa, b, fb, m, fm, whole, tol, 48);
}

std::vector<double> change_of_variable(const PotentialMap& map, double z_lo, double z_hi,
                                       int n_samples) {
  if (!(z_lo < z_hi)) throw std::invalid_argument("change_of_variable: need z_lo < z_hi");
  if (n_samples < 2) throw std::invalid_argument("change_of_variable: need >= 2 samples");
  if (!map.has_closed_inverse() && !map.has_anchor()) {
    map.set_anchor(0.5 * (z_lo + z_hi));
  }
  std::vector<double> x(static_cast<size_t>(n_samples));
  const double step = (z_hi - z_lo) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    x[static_cast<size_t>(i)] = map.x_of_z(z_lo + step * i);
  }
  return x;
}

SampledPotential gauge_and_potential(const PotentialMap& map, double z_lo, double z_hi,
                                     int n_samples) {
  if (!(z_lo < z_hi)) throw std::invalid_argument("gauge_and_potential: need z_lo < z_hi");
  if (n_samples < 2) throw std::invalid_argument("gauge_and_potential: need >= 2 samples");
  if (!map.has_closed_inverse() && !map.has_anchor()) {
    map.set_anchor(0.5 * (z_lo + z_hi));
  }
  SampledPotential pot;
  pot.case_tag = to_string(map.potential_case());
  pot.sign = map.sign();
  pot.closed_form_constants = map.constants();
  pot.weierstrass_invariants = map.weierstrass_invariants();
  pot.z.resize(static_cast<size_t>(n_samples));
  pot.x.resize(static_cast<size_t>(n_samples));
  pot.v.resize(static_cast<size_t>(n_samples));
  pot.w.resize(static_cast<size_t>(n_samples));
  const double step = (z_hi - z_lo) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double z = z_lo + step * i;
    pot.z[static_cast<size_t>(i)] = z;
    pot.x[static_cast<size_t>(i)] = map.x_of_z(z);
    pot.v[static_cast<size_t>(i)] = map.v_of_z(z);
    pot.w[static_cast<size_t>(i)] = map.w_of_z(z);
    if (!std::isfinite(pot.v[static_cast<size_t>(i)])) {
      throw std::domain_error("gauge_and_potential: V not finite at z = " + std::to_string(z));
    }
  }
  const double dir = pot.x[1] - pot.x[0];
  for (int i = 0; i + 1 < n_samples; ++i) {
    const double dx = pot.x[static_cast<size_t>(i) + 1] - pot.x[static_cast<size_t>(i)];
    if (dx * dir <= 0.0) {
      throw std::domain_error("gauge_and_potential: x(z) is not strictly monotone");
    }
  }
  return pot;
}

std::vector<double> psi_tilde_values(const PotentialMap& map, const Polynomial& psi,
                                     const std::vector<double>& z_grid) {
  std::vector<double> out(z_grid.size());
  for (size_t i = 0; i < z_grid.size(); ++i) {
    out[i] = std::exp(-map.w_of_z(z_grid[i])) * psi(z_grid[i]);
  }
  return out;
}

namespace {

struct FdMatrix {
  std::vector<double> diag;
  double off2 = 0.0;  // square of the off-diagonal entry
};

FdMatrix fd_matrix(const std::function<double(double)>& potential, double L, int n) {
  const double h = 2.0 * L / (n + 1);
  FdMatrix m;
  m.diag.resize(static_cast<size_t>(n));
  const double kinetic = 2.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    m.diag[static_cast<size_t>(i)] = kinetic + potential(-L + h * (i + 1));
  }
  m.off2 = 1.0 / (h * h * h * h);
  return m;
}

// Sturm count: eigenvalues of the tridiagonal matrix strictly below lambda.
int count_below(const FdMatrix& m, double lambda) {
  int count = 0;
  const double pivot_floor = std::sqrt(m.off2) * 1e-15;
  double q = m.diag[0] - lambda;
  if (q < 0.0) ++count;
  for (size_t i = 1; i < m.diag.size(); ++i) {
    if (q == 0.0) q = pivot_floor;
    q = m.diag[i] - lambda - m.off2 / q;
    if (q < 0.0) ++count;
  }
  return count;
}

double kth_eigenvalue(const FdMatrix& m, int k, double lo, double hi) {
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(lo) + std::abs(hi));
       ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(m, mid) >= k) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> spectrum_bounds(const FdMatrix& m) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  const double off = 2.0 * std::sqrt(m.off2);
  for (double d : m.diag) {
    lo = std::min(lo, d - off);
    hi = std::max(hi, d + off);
  }
  return {lo - 1.0, hi + 1.0};
}

}  // namespace

std::vector<double> fd_eigenvalues(const std::function<double(double)>& potential, double L,
                                   int N, int count) {
  if (N < 3) throw std::invalid_argument("fd_eigenvalues: need N >= 3 interior points");
  const FdMatrix m = fd_matrix(potential, L, N);
  const auto [lo, hi] = spectrum_bounds(m);
  std::vector<double> evs;
  evs.reserve(static_cast<size_t>(count));
  for (int k = 1; k <= std::min(count, N); ++k) {
    evs.push_back(kth_eigenvalue(m, k, lo, hi));
  }
  return evs;
}

std::vector<double> fd_eigenvalues_between(const std::function<double(double)>& potential,
                                           double L, int N, double lo, double hi) {
  if (N < 3) throw std::invalid_argument("fd_eigenvalues_between: need N >= 3 interior points");
  const FdMatrix m = fd_matrix(potential, L, N);
  const int k_lo = count_below(m, lo) + 1;
  const int k_hi = count_below(m, hi);
  std::vector<double> evs;
  for (int k = k_lo; k <= k_hi; ++k) {
    evs.push_back(kth_eigenvalue(m, k, lo, hi));
  }
  return evs;
}

SpectralEquivalenceReport verify_spectral_equivalence(
    const std::function<double(double)>& potential, const std::vector<double>& energies,
    const FdGridConfig& grid) {
  SpectralEquivalenceReport report;
  report.grid_n = grid.N;
  if (energies.empty()) {
    report.note = "no block energies supplied";
    return report;
  }
  double target_lo = std::numeric_limits<double>::infinity();
  double target_hi = -std::numeric_limits<double>::infinity();
  double energy_peak = 0.0;
  for (double e : energies) {
    target_lo = std::min(target_lo, -e);
    target_hi = std::max(target_hi, -e);
    energy_peak = std::max(energy_peak, std::abs(e));
  }
  const double wall = energy_peak + grid.margin;

  // Dirichlet truncation error decays with the WKB action between the outer
  // turning point and the box end; demand a comfortable exponent on both
  // sides, not just V(end) above the wall.
  auto tail_action = [&](double sign, double L) {
    constexpr int kSteps = 96;
    double action = 0.0;
    double prev = 0.0;
    for (int i = 0; i <= kSteps; ++i) {
      const double x = sign * L * i / kSteps;
      const double barrier = potential(x) - target_hi;
      const double f = barrier > 0.0 ? std::sqrt(barrier) : 0.0;
      if (i > 0) action += 0.5 * (prev + f) * (L / kSteps);
      prev = f;
    }
    return action;
  };

  double L = grid.L;
  if (L <= 0.0) {
    L = 1.0;
    while (L < 1e4 && (potential(-L) < wall || potential(L) < wall ||
                       tail_action(-1.0, L) < 18.0 || tail_action(+1.0, L) < 18.0)) {
      L *= 1.2;
    }
  }
  report.grid_l = L;
  if (potential(-L) < wall || potential(L) < wall) {
    report.note = "potential is not confining on the truncated domain";
    return report;
  }
  report.checkable = true;

  const double window = 1.0 + 0.01 * std::max({1.0, std::abs(target_lo), std::abs(target_hi)});
  const auto evs =
      fd_eigenvalues_between(potential, L, grid.N, target_lo - window, target_hi + window);

  for (double e : energies) {
    SpectralEquivalenceReport::Entry entry;
    entry.block_energy = e;
    entry.target = -e;
    if (evs.empty()) {
      entry.rel_error = std::numeric_limits<double>::infinity();
    } else {
      double best = evs.front();
      for (double ev : evs) {
        if (std::abs(ev - entry.target) < std::abs(best - entry.target)) best = ev;
      }
      entry.nearest_fd = best;
      entry.rel_error = std::abs(best - entry.target) / (1.0 + std::abs(e));
      entry.matched = entry.rel_error <= grid.tol;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.rel_error);
    report.entries.push_back(entry);
  }
  report.all_matched = std::all_of(report.entries.begin(), report.entries.end(),
                                   [](const auto& e) { return e.matched; });
  return report;
}

SpectralEquivalenceReport verify_spectral_equivalence(const SampledPotential& pot,
                                                      const std::vector<double>& energies,
                                                      const FdGridConfig& grid) {
  std::vector<std::pair<double, double>> table;
  table.reserve(pot.x.size());
  for (size_t i = 0; i < pot.x.size(); ++i) table.emplace_back(pot.x[i], pot.v[i]);
  std::sort(table.begin(), table.end());

  FdGridConfig local = grid;
  const double reach = std::min(-table.front().first, table.back().first);
  if (local.L <= 0.0 || local.L > reach) local.L = reach;
  if (!(local.L > 0.0)) {
    SpectralEquivalenceReport report;
    report.note = "sampled x grid does not straddle x = 0; cannot build a symmetric box";
    report.grid_n = grid.N;
    return report;
  }

  auto interp = [table](double x) {
    if (x <= table.front().first) return table.front().second;
    if (x >= table.back().first) return table.back().second;
    auto it = std::lower_bound(table.begin(), table.end(), std::make_pair(x, 0.0));
    if (it == table.begin()) return it->second;
    const auto prev = it - 1;
    const double t = (x - prev->first) / (it->first - prev->first);
    return prev->second + t * (it->second - prev->second);
  };
  return verify_spectral_equivalence(interp, energies, local);
}

double schrodinger_residual(const PotentialMap& map, const Polynomial& psi, double energy,
                            double x_lo, double x_hi, int n) {
  if (n < 3) throw std::invalid_argument("schrodinger_residual: need >= 3 grid points");
  if (!map.has_closed_inverse()) {
    throw UnsupportedCaseError("schrodinger_residual needs a closed-form z(x)");
  }
  const double h = (x_hi - x_lo) / (n - 1);
  std::vector<double> tilde(static_cast<size_t>(n));
  std::vector<double> v(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    const double z = map.z_of_x(x_lo + h * i);
    tilde[static_cast<size_t>(i)] = std::exp(-map.w_of_z(z)) * psi(z);
    v[static_cast<size_t>(i)] = map.v_of_z(z);
  }
  double peak = 0.0;
  for (double t : tilde) peak = std::max(peak, std::abs(t));
  if (peak == 0.0) return 0.0;
  double worst = 0.0;
  for (int i = 1; i + 1 < n; ++i) {
    const size_t k = static_cast<size_t>(i);
    const double second = (tilde[k + 1] - 2.0 * tilde[k] + tilde[k - 1]) / (h * h);
    const double res = -second + (v[k] + energy) * tilde[k];
    worst = std::max(worst, std::abs(res));
  }
  return worst / peak;
}

}  // namespace tmb
