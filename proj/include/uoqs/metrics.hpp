#pragma once

#include <algorithm>
#include <stdexcept>

#include "uoqs/dynamics.hpp"

namespace uoqs {

/// Model prediction for retweets per original tweet. An offender re-posts the
/// message each step they stay active, so the retweet count is the offender
/// activity accumulated after seeding: sum of O_t over t >= 1, per seed
/// offender. The trajectory must run to (near-)extinction for the sum to be
/// meaningful; see kMetricStopThreshold.
inline double retweets_per_tweet(const Trajectory& traj) {
  const double o0 = traj.initial().O;
  if (o0 <= 0.0) throw std::invalid_argument("retweets_per_tweet: needs a seeded run (O_0 > 0)");
  double total = 0.0;
  for (std::size_t i = 1; i < traj.states.size(); ++i) total += traj.states[i].O;
  return total / o0;
}

/// Cumulative inflow into the offender class per seed offender: how many
/// users ever retweeted, rather than how many retweet events occurred.
inline double new_offenders_per_seed(const Trajectory& traj) {
  const double o0 = traj.initial().O;
  if (o0 <= 0.0) throw std::invalid_argument("new_offenders_per_seed: needs a seeded run (O_0 > 0)");
  double total = 0.0;
  for (double inflow : traj.offender_inflow_series) total += inflow;
  return total / o0;
}

/// Stop threshold for metric runs. The half-user extinction rule truncates
/// the activity sum badly when O_0 is a single user, so metric simulations
/// run until the active population is numerically gone.
inline constexpr double kMetricStopThreshold = 1e-9;

/// First step at which O + Q drops below `threshold`; the number of recorded
/// steps when it never does within the trajectory.
inline long extinction_time(const Trajectory& traj, double threshold = 0.5) {
  for (const StateVector& s : traj.states)
    if (s.O + s.Q < threshold) return s.t;
  return static_cast<long>(traj.steps());
}

inline double peak_offenders(const Trajectory& traj) {
  double peak = 0.0;
  for (const StateVector& s : traj.states) peak = std::max(peak, s.O);
  return peak;
}

inline double peak_quarantined(const Trajectory& traj) {
  double peak = 0.0;
  for (const StateVector& s : traj.states) peak = std::max(peak, s.Q);
  return peak;
}

}  // namespace uoqs
