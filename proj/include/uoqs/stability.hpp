#pragma once

#include <algorithm>
#include <array>
#include <complex>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "uoqs/dynamics.hpp"
#include "uoqs/matrix.hpp"
#include "uoqs/model.hpp"
#include "uoqs/thresholds.hpp"

namespace uoqs {

// ---------------------------------------------------------------------------
// equilibria

struct Equilibrium {
  std::string label;
  StateVector state;
  bool biologically_relevant = true;
  bool family_member = false;  ///< representative of a one-parameter family
};

/// All-offender fixed point (0, N, 0) of the basic model.
inline StateVector offender_only_state(const ModelParams& p) {
  p.validate();
  if (p.kind != ModelKind::Basic)
    throw std::domain_error("offender_only_state: only the basic model has this fixed point");
  return StateVector{0.0, p.N, 0.0, 0.0, 0};
}

/// Member of the offender-free family (U, 0, 0, N-U); a fixed point of both
/// maps for every U in [0, N].
inline StateVector offender_free_state(const ModelParams& p, double u) {
  p.validate();
  if (!std::isfinite(u) || u < 0.0 || u > p.N)
    throw std::invalid_argument("offender_free_state: U must lie in [0, N]");
  return StateVector{u, 0.0, 0.0, p.N - u, 0};
}

/// The quarantine model's second fixed-point family,
/// (0, lambda(mu-1)Q/(lambda-1), Q, N ln(lambda)/k). Its stifler count is
/// negative for lambda < 1, so it is labeled irrelevant and excluded from
/// stability verdicts. Undefined for lambda in {0, 1}.
inline std::optional<StateVector> quarantine_irrelevant_state(const ModelParams& p, double q) {
  p.validate();
  if (p.kind != ModelKind::Quarantine || p.lambda <= 0.0 || p.lambda >= 1.0) return std::nullopt;
  StateVector s;
  s.U = 0.0;
  s.O = p.lambda * (p.mu - 1.0) * q / (p.lambda - 1.0);
  s.Q = q;
  s.S = std::log(p.lambda) * p.N / p.k;
  return s;
}

/// Fixed points of the selected model. The offender-free family is returned
/// through representatives at U = 0 and U = N/2; use offender_free_state for
/// other members.
inline std::vector<Equilibrium> equilibria(const ModelParams& p) {
  p.validate();
  std::vector<Equilibrium> out;
  if (p.kind == ModelKind::Basic)
    out.push_back({"offender-only", offender_only_state(p), true, false});
  for (double u : {0.0, p.N / 2.0})
    out.push_back({"offender-free", offender_free_state(p, u), true, true});
  if (p.kind == ModelKind::Quarantine) {
    if (auto s = quarantine_irrelevant_state(p, p.N / 100.0))
      out.push_back({"biologically-irrelevant", *s, false, true});
  }
  return out;
}

/// Max compartment change under one raw application of the map, relative to
/// N. Zero (to rounding) at a fixed point. Works for out-of-domain states
/// such as the irrelevant quarantine fixed point.
inline double fixed_point_residual(const StateVector& s, const ModelParams& p) {
  p.validate();
  const StateVector n = detail::apply(s, p);
  double r = 0.0;
  r = std::max(r, std::abs(n.U - s.U));
  r = std::max(r, std::abs(n.O - s.O));
  r = std::max(r, std::abs(n.Q - s.Q));
  r = std::max(r, std::abs(n.S - s.S));
  return r / p.N;
}

// ---------------------------------------------------------------------------
// Jacobians

namespace detail {

inline void require_finite_state(const StateVector& s, const char* where) {
  for (double x : {s.U, s.O, s.Q, s.S})
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(where) + ": non-finite state");
}

}  // namespace detail

/// Jacobian of the basic map in state order (U, O, S).
inline SquareMatrix jacobian_basic(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_finite_state(s, "jacobian_basic");
  const double kn = p.k / p.N;
  const double g1 = detail::g1_raw(s.O, p);
  const double g2 = detail::g2_raw(s.S, p);
  SquareMatrix j(3);
  j.at(0, 0) = g1;
  j.at(0, 1) = -kn * g1 * s.U;
  j.at(0, 2) = 0.0;
  j.at(1, 0) = (1.0 - p.alpha) * (1.0 - g1);
  j.at(1, 1) = kn * (1.0 - p.alpha) * g1 * s.U + g2;
  j.at(1, 2) = -kn * g2 * s.O;
  j.at(2, 0) = p.alpha * (1.0 - g1);
  j.at(2, 1) = kn * p.alpha * g1 * s.U + (1.0 - g2);
  j.at(2, 2) = 1.0 + kn * g2 * s.O;
  return j;
}

/// Jacobian of the quarantine map in state order (U, O, Q, S).
inline SquareMatrix jacobian_quarantine(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_finite_state(s, "jacobian_quarantine");
  const double kn = p.k / p.N;
  const double g1 = detail::g1_raw(s.O, p);
  const double g2 = detail::g2_raw(s.S, p);
  SquareMatrix j(4);
  j.at(0, 0) = g1;
  j.at(0, 1) = -kn * g1 * s.U;
  j.at(1, 0) = (1.0 - p.alpha) * (1.0 - g1);
  j.at(1, 1) = kn * (1.0 - p.alpha) * g1 * s.U + p.lambda * g2;
  j.at(1, 3) = -kn * p.lambda * g2 * s.O;
  j.at(2, 1) = (1.0 - p.lambda) * g2;
  j.at(2, 2) = p.mu;
  j.at(2, 3) = -kn * (1.0 - p.lambda) * g2 * s.O;
  j.at(3, 0) = p.alpha * (1.0 - g1);
  j.at(3, 1) = kn * p.alpha * g1 * s.U + (1.0 - g2);
  j.at(3, 2) = 1.0 - p.mu;
  j.at(3, 3) = 1.0 + kn * g2 * s.O;
  return j;
}

inline SquareMatrix jacobian(const StateVector& s, const ModelParams& p) {
  return p.kind == ModelKind::Basic ? jacobian_basic(s, p) : jacobian_quarantine(s, p);
}

/// Jacobian of the basic map with S eliminated through U+O+S = N;
/// state order (U, O).
inline SquareMatrix jacobian_basic_reduced(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_finite_state(s, "jacobian_basic_reduced");
  const double kn = p.k / p.N;
  const double g1 = detail::g1_raw(s.O, p);
  const double g2 = detail::g2_raw(s.S, p);
  SquareMatrix j(2);
  j.at(0, 0) = g1;
  j.at(0, 1) = -kn * g1 * s.U;
  j.at(1, 0) = (1.0 - p.alpha) * (1.0 - g1) + kn * g2 * s.O;
  j.at(1, 1) = kn * (1.0 - p.alpha) * g1 * s.U + g2 + kn * g2 * s.O;
  return j;
}

/// Jacobian of the quarantine map with S eliminated through U+O+Q+S = N;
/// state order (U, O, Q).
inline SquareMatrix jacobian_quarantine_reduced(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_finite_state(s, "jacobian_quarantine_reduced");
  const double kn = p.k / p.N;
  const double g1 = detail::g1_raw(s.O, p);
  const double g2 = detail::g2_raw(s.S, p);
  const double og2 = kn * g2 * s.O;
  SquareMatrix j(3);
  j.at(0, 0) = g1;
  j.at(0, 1) = -kn * g1 * s.U;
  j.at(1, 0) = (1.0 - p.alpha) * (1.0 - g1) + p.lambda * og2;
  j.at(1, 1) = kn * (1.0 - p.alpha) * g1 * s.U + p.lambda * g2 + p.lambda * og2;
  j.at(1, 2) = p.lambda * og2;
  j.at(2, 0) = (1.0 - p.lambda) * og2;
  j.at(2, 1) = (1.0 - p.lambda) * g2 + (1.0 - p.lambda) * og2;
  j.at(2, 2) = p.mu + (1.0 - p.lambda) * og2;
  return j;
}

inline SquareMatrix jacobian_reduced(const StateVector& s, const ModelParams& p) {
  return p.kind == ModelKind::Basic ? jacobian_basic_reduced(s, p)
                                    : jacobian_quarantine_reduced(s, p);
}

// ---------------------------------------------------------------------------
// closed-form eigenvalues

/// Eigenvalues of the basic Jacobian at the all-offender point (0, N, 0):
/// {1, e^-k, k+1}. The growth eigenvalue k+1 exceeds 1 for every k > 0, so
/// this fixed point is never stable.
struct OoeEigenvalues {
  double unit = 1.0;
  double contact_decay = 0.0;  ///< e^-k
  double growth = 0.0;         ///< k+1

  bool unstable() const { return growth > 1.0; }
};

inline OoeEigenvalues eigenvalues_ooe_analytic(const ModelParams& p) {
  p.validate();
  if (p.kind != ModelKind::Basic)
    throw std::domain_error("eigenvalues_ooe_analytic: basic model only");
  return OoeEigenvalues{1.0, std::exp(-p.k), p.k + 1.0};
}

namespace detail {

inline void require_offender_free(const StateVector& s, const char* where) {
  if (s.O != 0.0 || s.Q != 0.0)
    throw std::domain_error(std::string(where) + ": state must be offender-free (O = Q = 0)");
}

}  // namespace detail

/// Closed-form eigenvalue list at an offender-free state (U, 0, 0, S).
/// Basic model: {(k/N)(1-alpha)U + G2, 1, 1}; dropping one unit eigenvalue
/// gives the constraint-reduced list. Quarantine model: the closed forms are
/// {1, 1, mu, mu + lambda*G2 + (k/N)(1-alpha)U}; the leading entry's additive
/// mu term disagrees with the Jacobian's actual spectrum whenever mu > 0 (see
/// ofe_leading_eigenvalue), so reports compare the two rather than trust
/// either blindly.
inline std::vector<double> eigenvalues_ofe_analytic(const StateVector& s, const ModelParams& p,
                                                    bool reduced = false) {
  p.validate();
  detail::require_offender_free(s, "eigenvalues_ofe_analytic");
  const double g2 = detail::g2_raw(s.S, p);
  const double drive = (p.k / p.N) * (1.0 - p.alpha) * s.U;
  if (p.kind == ModelKind::Basic) {
    const double lead = drive + g2;
    if (reduced) return {lead, 1.0};
    return {lead, 1.0, 1.0};
  }
  const double lead = p.mu + p.lambda * g2 + drive;
  if (reduced) return {1.0, p.mu, lead};
  return {1.0, 1.0, p.mu, lead};
}

/// The offender-direction eigenvalue of the Jacobian at an offender-free
/// state: (k/N)(1-alpha)U + G2 for the basic model and
/// (k/N)(1-alpha)U + lambda*G2 for the quarantine model.
inline double ofe_leading_eigenvalue(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_offender_free(s, "ofe_leading_eigenvalue");
  const double g2 = detail::g2_raw(s.S, p);
  const double lam = p.kind == ModelKind::Basic ? 1.0 : p.lambda;
  return (p.k / p.N) * (1.0 - p.alpha) * s.U + lam * g2;
}

// ---------------------------------------------------------------------------
// Jury precondition

/// D(1) = det(I - m), the monic characteristic polynomial at 1. The Jury
/// stability test requires D(1) > 0 before it can be applied at all; a unit
/// eigenvalue forces D(1) = 0 and leaves stability undecided by this route.
inline double jury_d1(const SquareMatrix& m) { return det(identity(m.order()) - m); }

inline bool jury_precondition(const SquareMatrix& m) { return jury_d1(m) > 0.0; }

// ---------------------------------------------------------------------------
// next generation matrix

/// Blocks of the offender-free Jacobian reordered infected-first:
/// (O | U, S) for the basic model, (O, Q | U, S) with quarantine. The top-left
/// block splits as F (new-offender inflow) + T (within-infected transitions);
/// C is the uninfected block and equals the identity here, which is why the
/// spectral radius of F(I-T)^-1 is used only as a threshold, not a
/// reproduction number.
struct NgmDecomposition {
  SquareMatrix reordered;        ///< permuted Jacobian, infected classes first
  SquareMatrix f;                ///< inflow of new offenders
  SquareMatrix t;                ///< transitions among infected classes
  SquareMatrix a;                ///< uninfected rows, infected columns
  SquareMatrix c;                ///< uninfected block
  SquareMatrix next_generation;  ///< F (I - T)^-1
};

inline NgmDecomposition ngm_decomposition(const StateVector& s, const ModelParams& p) {
  p.validate();
  detail::require_offender_free(s, "ngm_decomposition");
  const double g2 = detail::g2_raw(s.S, p);
  const double drive = (p.k / p.N) * (1.0 - p.alpha) * s.U;

  const bool basic = p.kind == ModelKind::Basic;
  const int m = basic ? 1 : 2;  // infected classes
  const int n = basic ? 3 : 4;

  const SquareMatrix full = jacobian(s, p);
  // infected-first permutation of the (U,O,[Q],S) ordering
  const std::array<int, 4> perm = basic ? std::array<int, 4>{1, 0, 2, 0}
                                        : std::array<int, 4>{1, 2, 0, 3};
  SquareMatrix reordered(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) reordered.at(i, j) = full.at(perm[static_cast<std::size_t>(i)],
                                                              perm[static_cast<std::size_t>(j)]);

  SquareMatrix f(m), t(m), a(n - m), c(n - m);
  if (basic) {
    f.at(0, 0) = drive;
    t.at(0, 0) = g2;
  } else {
    f.at(0, 0) = drive;
    f.at(1, 0) = (1.0 - p.lambda) * g2;
    t.at(0, 0) = p.lambda * g2;
    t.at(1, 1) = p.mu;
  }
  // a and c read off the permuted Jacobian. a is carried for completeness
  // only, zero-padded to square; it never enters the threshold.
  for (int i = 0; i < n - m; ++i) {
    for (int j = 0; j < n - m; ++j) c.at(i, j) = reordered.at(m + i, m + j);
    for (int j = 0; j < std::min(m, n - m); ++j) a.at(i, j) = reordered.at(m + i, j);
  }

  // F (I - T)^-1 column by column; T is diagonal in both models. A zero
  // column of F stays zero even where 1 - T_jj vanishes (mu = 1).
  SquareMatrix ngm(m);
  for (int j = 0; j < m; ++j) {
    bool col_zero = true;
    for (int i = 0; i < m; ++i) col_zero = col_zero && f.at(i, j) == 0.0;
    if (col_zero) continue;
    const double denom = 1.0 - t.at(j, j);
    if (denom == 0.0)
      throw std::domain_error("ngm_decomposition: threshold undefined, 1 - T is singular");
    for (int i = 0; i < m; ++i) ngm.at(i, j) = f.at(i, j) / denom;
  }

  return NgmDecomposition{reordered, f, t, a, c, ngm};
}

/// Spectral radius of F(I-T)^-1 at an offender-free state. Cross-checked
/// against the corresponding state threshold; a mismatch beyond 1e-12
/// relative indicates an internal inconsistency and throws.
inline double ngm_spectral_radius(const StateVector& s, const ModelParams& p) {
  const NgmDecomposition d = ngm_decomposition(s, p);
  const double radius = spectral_radius(d.next_generation);
  const std::optional<double> z = z_state(s, p);
  if (!z.has_value())
    throw std::domain_error("ngm_spectral_radius: state threshold undefined here");
  if (std::abs(radius - *z) > 1e-12 * std::max(1e-300, std::abs(*z)))
    throw std::logic_error("ngm_spectral_radius: disagrees with the state threshold");
  return radius;
}

// ---------------------------------------------------------------------------
// reports

/// Distance between two eigenvalue multisets: sort by (re, im), pair up, take
/// the max pairwise modulus of difference. Infinity on size mismatch.
inline double eigenvalue_multiset_gap(std::vector<std::complex<double>> a,
                                      std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  auto by_re_im = [](const std::complex<double>& x, const std::complex<double>& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  };
  std::sort(a.begin(), a.end(), by_re_im);
  std::sort(b.begin(), b.end(), by_re_im);
  double gap = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) gap = std::max(gap, std::abs(a[i] - b[i]));
  return gap;
}

struct EquilibriumAnalysis {
  Equilibrium equilibrium;
  bool evaluated = true;  ///< false for the disregarded irrelevant point
  std::optional<SquareMatrix> jacobian;
  std::optional<SquareMatrix> jacobian_reduced;
  std::vector<std::complex<double>> eigenvalues;          ///< numeric, full system
  std::vector<std::complex<double>> eigenvalues_reduced;  ///< numeric, reduced system
  std::vector<double> analytic_eigenvalues;               ///< closed forms where known
  bool analytic_matches_numeric = true;
  double analytic_numeric_gap = 0.0;
  bool jury_applicable = false;  ///< D(1) > 0 on the reduced Jacobian
  std::optional<double> ngm_radius;
  double fixed_point_residual = 0.0;
  std::string verdict;
};

struct StabilityReport {
  ModelParams params;
  std::vector<EquilibriumAnalysis> entries;
};

/// Full stability work-up: equilibria (with the offender-free family sampled
/// additionally at U = ofe_u), Jacobians, numeric and closed-form
/// eigenvalues, Jury precondition, and the NGM threshold. Verdicts follow the
/// surviving unit eigenvalue: the offender-free family stays indeterminate.
inline StabilityReport build_stability_report(const ModelParams& p, double ofe_u) {
  p.validate();
  StabilityReport report;
  report.params = p;

  std::vector<Equilibrium> points = equilibria(p);
  points.push_back({"offender-free", offender_free_state(p, ofe_u), true, true});

  constexpr double kAnalyticTol = 1e-8;
  for (const Equilibrium& eq : points) {
    EquilibriumAnalysis entry;
    entry.equilibrium = eq;
    entry.fixed_point_residual = fixed_point_residual(eq.state, p);
    if (!eq.biologically_relevant) {
      entry.evaluated = false;
      entry.verdict = "disregarded";
      report.entries.push_back(std::move(entry));
      continue;
    }

    entry.jacobian = jacobian(eq.state, p);
    entry.jacobian_reduced = jacobian_reduced(eq.state, p);
    entry.eigenvalues = eigenvalues_numeric(*entry.jacobian);
    entry.eigenvalues_reduced = eigenvalues_numeric(*entry.jacobian_reduced);
    entry.jury_applicable = jury_precondition(*entry.jacobian_reduced);

    const bool offender_free = eq.state.O == 0.0 && eq.state.Q == 0.0;
    if (offender_free) {
      entry.analytic_eigenvalues = eigenvalues_ofe_analytic(eq.state, p);
      if (z_state(eq.state, p).has_value()) entry.ngm_radius = ngm_spectral_radius(eq.state, p);
      entry.verdict = "indeterminate";  // a unit eigenvalue survives reduction
    } else if (p.kind == ModelKind::Basic) {
      const OoeEigenvalues ooe = eigenvalues_ooe_analytic(p);
      entry.analytic_eigenvalues = {ooe.unit, ooe.contact_decay, ooe.growth};
      entry.verdict = ooe.unstable() ? "unstable" : "indeterminate";
    }

    if (!entry.analytic_eigenvalues.empty()) {
      std::vector<std::complex<double>> analytic(entry.analytic_eigenvalues.begin(),
                                                 entry.analytic_eigenvalues.end());
      entry.analytic_numeric_gap = eigenvalue_multiset_gap(analytic, entry.eigenvalues);
      entry.analytic_matches_numeric = entry.analytic_numeric_gap <= kAnalyticTol;
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace uoqs
