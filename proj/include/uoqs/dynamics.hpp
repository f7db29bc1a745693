#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "uoqs/model.hpp"

namespace uoqs {

namespace detail {

inline double g1_raw(double o, const ModelParams& p) { return std::exp(-(p.k / p.N) * o); }
inline double g2_raw(double s, const ModelParams& p) { return std::exp(-(p.k / p.N) * s); }

// One step of the basic map, no input validation. The compartment flows are
// grouped so that each outflow reappears verbatim as an inflow; the summed
// rounding error per step stays within a few ulp of N.
inline StateVector apply_basic(const StateVector& s, const ModelParams& p) {
  const double g1 = g1_raw(s.O, p);
  const double g2 = g2_raw(s.S, p);
  const double from_u = (1.0 - g1) * s.U;  // uninformed users who saw the message
  const double o_kept = g2 * s.O;
  const double o_stifled = (1.0 - g2) * s.O;
  StateVector next;
  next.U = s.U * g1;
  next.O = (1.0 - p.alpha) * from_u + o_kept;
  next.Q = 0.0;
  next.S = s.S + p.alpha * from_u + o_stifled;
  next.t = s.t + 1;
  return next;
}

// One step of the quarantine map, no input validation. Reduces exactly to
// apply_basic when lambda == 1 and Q == 0.
inline StateVector apply_quarantine(const StateVector& s, const ModelParams& p) {
  const double g1 = g1_raw(s.O, p);
  const double g2 = g2_raw(s.S, p);
  const double from_u = (1.0 - g1) * s.U;
  const double o_kept = g2 * s.O;
  const double o_stifled = (1.0 - g2) * s.O;
  StateVector next;
  next.U = s.U * g1;
  next.O = (1.0 - p.alpha) * from_u + p.lambda * o_kept;
  next.Q = (1.0 - p.lambda) * o_kept + p.mu * s.Q;
  next.S = s.S + p.alpha * from_u + o_stifled + (1.0 - p.mu) * s.Q;
  next.t = s.t + 1;
  return next;
}

inline StateVector apply(const StateVector& s, const ModelParams& p) {
  return p.kind == ModelKind::Basic ? apply_basic(s, p) : apply_quarantine(s, p);
}

}  // namespace detail

/// Probability that an uninformed user does NOT see the message this step:
/// exp(-k*O/N). Equals 1 iff O == 0.
inline double g1(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (!std::isfinite(s.O) || s.O < 0.0)
    throw std::invalid_argument("g1: O must be finite and >= 0");
  return detail::g1_raw(s.O, p);
}

/// Probability that an offender does NOT become a stifler this step:
/// exp(-k*S/N). Equals 1 iff S == 0.
inline double g2(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (!std::isfinite(s.S) || s.S < 0.0)
    throw std::invalid_argument("g2: S must be finite and >= 0");
  return detail::g2_raw(s.S, p);
}

/// New offenders produced from the uninformed pool this step:
/// (1-alpha)*(1-G1)*U.
inline double offender_inflow(const StateVector& s, const ModelParams& p) {
  return (1.0 - p.alpha) * (1.0 - detail::g1_raw(s.O, p)) * s.U;
}

/// One step of the basic model (U,O,S). Requires Q == 0.
inline StateVector step_basic(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (p.kind != ModelKind::Basic)
    throw std::invalid_argument("step_basic: params.kind must be Basic");
  validate_state(s, p);
  return detail::apply_basic(s, p);
}

/// One step of the quarantine model (U,O,Q,S).
inline StateVector step_quarantine(const StateVector& s, const ModelParams& p) {
  p.validate();
  if (p.kind != ModelKind::Quarantine)
    throw std::invalid_argument("step_quarantine: params.kind must be Quarantine");
  validate_state(s, p);
  return detail::apply_quarantine(s, p);
}

/// Dispatch on params.kind.
inline StateVector step(const StateVector& s, const ModelParams& p) {
  return p.kind == ModelKind::Basic ? step_basic(s, p) : step_quarantine(s, p);
}

/// Stops a simulation once the actively spreading population is negligible.
struct StopRule {
  double extinction_threshold = 0.5;  ///< users; fires when O + Q drops below

  bool fires(const StateVector& s) const { return s.O + s.Q < extinction_threshold; }
};

/// An iterated run of one of the step maps, plus the per-transition
/// contact probabilities and offender inflow.
struct Trajectory {
  ModelParams params;
  std::vector<StateVector> states;             ///< states[i].t == i
  std::vector<double> g1_series;               ///< G1 at states[i], i < steps()
  std::vector<double> g2_series;               ///< G2 at states[i], i < steps()
  std::vector<double> offender_inflow_series;  ///< (1-alpha)(1-G1)U at states[i]

  std::size_t steps() const { return states.size() - 1; }
  const StateVector& initial() const { return states.front(); }
  const StateVector& final_state() const { return states.back(); }
};

/// Iterates the step map from `initial` until `horizon` steps have been taken
/// or `stop` fires (checked on every state, including the initial one).
/// Conservation and non-negativity are asserted on every produced state,
/// never repaired.
inline Trajectory simulate(const StateVector& initial, const ModelParams& p, long horizon = 10000,
                           StopRule stop = {}) {
  p.validate();
  if (horizon < 1) throw std::invalid_argument("simulate: horizon must be >= 1");
  validate_state(initial, p);

  Trajectory traj;
  traj.params = p;
  traj.states.reserve(16);
  traj.states.push_back(initial);
  traj.states.back().t = 0;

  for (long t = 0; t < horizon; ++t) {
    const StateVector& cur = traj.states.back();
    if (stop.fires(cur)) break;
    traj.g1_series.push_back(detail::g1_raw(cur.O, p));
    traj.g2_series.push_back(detail::g2_raw(cur.S, p));
    traj.offender_inflow_series.push_back(offender_inflow(cur, p));
    StateVector next = detail::apply(cur, p);
    if (conservation_drift(next, p) > kConservationTol)
      throw std::logic_error("simulate: conservation violated at t=" + std::to_string(next.t));
    if (next.U < 0.0 || next.O < 0.0 || next.Q < 0.0 || next.S < 0.0)
      throw std::logic_error("simulate: negative compartment at t=" + std::to_string(next.t));
    traj.states.push_back(next);
  }
  return traj;
}

}  // namespace uoqs
