#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>

#include "uoqs/dynamics.hpp"
#include "uoqs/model.hpp"

namespace uoqs {

/// State-dependent decline threshold of the basic model,
/// Z = k(1-alpha)U / (N(1-G2)). Z < 1 with O > 0 forces O' < O.
/// Undefined (nullopt) when S == 0: G2 == 1 and the bound is vacuous.
inline std::optional<double> z_basic(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (!std::isfinite(s.U) || !std::isfinite(s.S) || s.U < 0.0 || s.S < 0.0)
    throw std::invalid_argument("z_basic: U and S must be finite and >= 0");
  if (s.S == 0.0) return std::nullopt;
  const double g2 = detail::g2_raw(s.S, p);
  return p.k * (1.0 - p.alpha) * s.U / (p.N * (1.0 - g2));
}

/// State-dependent decline threshold of the quarantine model,
/// Z = k(1-alpha)U / (N(1-lambda*G2)). Undefined only when lambda == 1
/// and S == 0 (where it coincides with the basic-model case).
inline std::optional<double> z_quarantine(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (!std::isfinite(s.U) || !std::isfinite(s.S) || s.U < 0.0 || s.S < 0.0)
    throw std::invalid_argument("z_quarantine: U and S must be finite and >= 0");
  const double g2 = detail::g2_raw(s.S, p);
  const double denom = 1.0 - p.lambda * g2;
  if (denom == 0.0) return std::nullopt;
  return p.k * (1.0 - p.alpha) * s.U / (p.N * denom);
}

/// State-dependent threshold for the model selected by params.kind.
inline std::optional<double> z_state(const StateVector& s, const ModelParams& p) {
  return p.kind == ModelKind::Basic ? z_basic(s, p) : z_quarantine(s, p);
}

/// State-independent bound Z = k(1-alpha)/(1-lambda); below 1 it forces
/// offender decline from every state of the quarantine model. Undefined when
/// lambda == 1 (no quarantine, the bound is vacuous).
inline std::optional<double> z_global(const ModelParams& p) {
  p.validate();
  const double lambda = p.kind == ModelKind::Basic ? 1.0 : p.lambda;
  if (lambda == 1.0) return std::nullopt;
  return p.k * (1.0 - p.alpha) / (1.0 - lambda);
}

/// Largest lambda guaranteed to force offender decline at the next step:
/// lambda* = 1 - k(1-alpha), defined only when k(1-alpha) < 1.
inline std::optional<double> lambda_critical(const ModelParams& p) {
  p.validate();
  const double spread = p.k * (1.0 - p.alpha);
  if (spread >= 1.0) return std::nullopt;
  return 1.0 - spread;
}

/// Threshold quantities evaluated at one state.
struct ThresholdReport {
  std::optional<double> z_state;          ///< model-specific state threshold
  std::optional<double> z_global;         ///< state-independent bound
  std::optional<double> lambda_critical;  ///< nullopt when infeasible
  bool predicts_decline = false;          ///< z_state defined and strictly < 1
  bool decline_guaranteed = false;        ///< lambda <= lambda* under quarantine
};

inline ThresholdReport threshold_report(const StateVector& s, const ModelParams& p) {
  ThresholdReport r;
  r.z_state = z_state(s, p);
  r.z_global = z_global(p);
  r.lambda_critical = lambda_critical(p);
  r.predicts_decline = r.z_state.has_value() && *r.z_state < 1.0;
  r.decline_guaranteed = p.kind == ModelKind::Quarantine && r.lambda_critical.has_value() &&
                         p.lambda <= *r.lambda_critical;
  return r;
}

}  // namespace uoqs
