#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace uoqs {

/// Which one-step update map drives the dynamics.
enum class ModelKind { Basic, Quarantine };

inline const char* to_string(ModelKind kind) {
  return kind == ModelKind::Basic ? "basic" : "quarantine";
}

/// Constants of the dynamics. `lambda` and `mu` are read only by the
/// quarantine map; the basic map behaves as if lambda == 1.
struct ModelParams {
  double N = 1e7;        ///< population size (users), >= 1
  double k = 10.0;       ///< average network degree, > 0
  double alpha = 0.999;  ///< P(uninformed user stifles after seeing the message)
  double lambda = 1.0;   ///< P(offender is NOT quarantined in a step)
  double mu = 1.0;       ///< P(quarantined user remains quarantined in a step)
  ModelKind kind = ModelKind::Basic;

  void validate() const;
};

/// Compartment populations at one time step. Real-valued (mean-field);
/// Q is identically zero under the basic model.
struct StateVector {
  double U = 0.0;  ///< uninformed
  double O = 0.0;  ///< offenders
  double Q = 0.0;  ///< quarantined
  double S = 0.0;  ///< stiflers
  long t = 0;      ///< time index

  double total() const { return U + O + Q + S; }
};

/// Relative tolerance for the conserved population sum.
inline constexpr double kConservationTol = 1e-9;

inline void ModelParams::validate() const {
  auto in_unit = [](double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; };
  if (!std::isfinite(N) || N < 1.0)
    throw std::invalid_argument("ModelParams: N must be finite and >= 1");
  if (!std::isfinite(k) || k <= 0.0)
    throw std::invalid_argument("ModelParams: k must be finite and > 0");
  if (!in_unit(alpha)) throw std::invalid_argument("ModelParams: alpha must be in [0,1]");
  if (!in_unit(lambda)) throw std::invalid_argument("ModelParams: lambda must be in [0,1]");
  if (!in_unit(mu)) throw std::invalid_argument("ModelParams: mu must be in [0,1]");
}

/// |U+O+Q+S - N| / N.
inline double conservation_drift(const StateVector& s, const ModelParams& p) {
  return std::abs(s.total() - p.N) / p.N;
}

/// Throws std::invalid_argument unless `s` is a valid state for `p`:
/// finite, non-negative, conserved sum, and Q == 0 under the basic model.
inline void validate_state(const StateVector& s, const ModelParams& p) {
  for (double x : {s.U, s.O, s.Q, s.S}) {
    if (!std::isfinite(x)) throw std::invalid_argument("StateVector: non-finite compartment");
    if (x < 0.0) throw std::invalid_argument("StateVector: negative compartment");
  }
  if (p.kind == ModelKind::Basic && s.Q != 0.0)
    throw std::invalid_argument("StateVector: Q must be 0 under the basic model");
  if (conservation_drift(s, p) > kConservationTol)
    throw std::invalid_argument("StateVector: compartments do not sum to N");
}

}  // namespace uoqs
