#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "uoqs/csv.hpp"
#include "uoqs/dynamics.hpp"
#include "uoqs/metrics.hpp"
#include "uoqs/model.hpp"

namespace uoqs {

/// One row of a tweet-corpus CSV.
struct TweetRecord {
  std::string tweet_id;
  std::string created_at;  ///< ISO-8601 UTC, e.g. 2013-07-06T12:34:56Z
  std::string screen_name;
  std::int64_t follower_count = 0;
  std::int64_t friend_count = 0;
  bool is_retweet = false;
  std::string original_id;  ///< nonempty iff is_retweet
};

/// Aggregates a calibration needs from a corpus.
struct CorpusStats {
  std::int64_t total_tweets = 0;
  std::int64_t original_tweets = 0;
  std::int64_t retweet_count = 0;
  std::int64_t originals_retweeted_at_least_once = 0;
  /// friend_count summed over distinct original tweeters (first row wins
  /// per screen name)
  std::int64_t friends_of_offenders_sum = 0;

  /// Retweets per retweeted original; the primary duplication convention.
  std::optional<double> mean_duplication() const {
    if (originals_retweeted_at_least_once == 0) return std::nullopt;
    return static_cast<double>(retweet_count) /
           static_cast<double>(originals_retweeted_at_least_once);
  }
  /// Copies per original counting the original itself:
  /// total / originals. The alternative duplication convention.
  std::optional<double> mean_copies_per_original() const {
    if (original_tweets == 0) return std::nullopt;
    return static_cast<double>(total_tweets) / static_cast<double>(original_tweets);
  }
};

struct RowError {
  std::size_t line = 0;
  std::string message;
};

/// Stats plus the rows that could not be used. Malformed rows are reported,
/// never silently dropped.
struct IngestReport {
  CorpusStats stats;
  std::vector<RowError> errors;
};

namespace detail {

inline bool parse_timestamp_utc(const std::string& s) {
  // strict YYYY-MM-DDTHH:MM:SSZ
  if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' ||
      s[16] != ':' || s[19] != 'Z')
    return false;
  auto num = [&](int from, int len) -> int {
    int v = 0;
    for (int i = from; i < from + len; ++i) {
      if (s[static_cast<std::size_t>(i)] < '0' || s[static_cast<std::size_t>(i)] > '9') return -1;
      v = v * 10 + (s[static_cast<std::size_t>(i)] - '0');
    }
    return v;
  };
  const int year = num(0, 4), month = num(5, 2), day = num(8, 2);
  const int hour = num(11, 2), minute = num(14, 2), second = num(17, 2);
  return year >= 0 && month >= 1 && month <= 12 && day >= 1 && day <= 31 && hour >= 0 &&
         hour <= 23 && minute >= 0 && minute <= 59 && second >= 0 && second <= 60;
}

}  // namespace detail

inline const std::vector<std::string>& corpus_header() {
  static const std::vector<std::string> header = {
      "tweet_id",     "created_at",   "screen_name", "follower_count",
      "friend_count", "is_retweet",   "original_id"};
  return header;
}

/// Single-pass aggregation of a corpus CSV. Throws std::invalid_argument on a
/// missing or wrong header; per-row problems are collected with their line
/// numbers and the rows skipped.
inline IngestReport ingest_csv(std::istream& in) {
  csv::Reader reader(in);
  std::optional<csv::Record> header = reader.next();
  if (!header.has_value()) throw std::invalid_argument("ingest_csv: empty input, header required");
  if (header->fields != corpus_header())
    throw std::invalid_argument(
        "ingest_csv: header must be "
        "tweet_id,created_at,screen_name,follower_count,friend_count,is_retweet,original_id");

  IngestReport report;
  std::unordered_set<std::string> original_ids;
  std::unordered_set<std::string> original_tweeters;
  std::unordered_set<std::string> retweeted_ids;

  while (std::optional<csv::Record> rec = reader.next()) {
    auto fail = [&](const std::string& msg) { report.errors.push_back({rec->line, msg}); };
    if (rec->fields.size() == 1 && rec->fields[0].empty()) continue;  // blank line
    if (rec->fields.size() != corpus_header().size()) {
      fail("expected 7 fields, got " + std::to_string(rec->fields.size()));
      continue;
    }
    TweetRecord row;
    row.tweet_id = rec->fields[0];
    row.created_at = rec->fields[1];
    row.screen_name = rec->fields[2];
    const std::optional<std::int64_t> followers = csv::parse_int(rec->fields[3]);
    const std::optional<std::int64_t> friends = csv::parse_int(rec->fields[4]);
    if (!detail::parse_timestamp_utc(row.created_at)) {
      fail("created_at is not an ISO-8601 UTC timestamp: " + row.created_at);
      continue;
    }
    if (!followers.has_value() || *followers < 0) {
      fail("follower_count is not a non-negative integer: " + rec->fields[3]);
      continue;
    }
    if (!friends.has_value() || *friends < 0) {
      fail("friend_count is not a non-negative integer: " + rec->fields[4]);
      continue;
    }
    row.follower_count = *followers;
    row.friend_count = *friends;
    if (rec->fields[5] == "true") {
      row.is_retweet = true;
    } else if (rec->fields[5] == "false") {
      row.is_retweet = false;
    } else {
      fail("is_retweet must be true or false: " + rec->fields[5]);
      continue;
    }
    row.original_id = rec->fields[6];
    if (row.is_retweet && row.original_id.empty()) {
      fail("retweet row without original_id");
      continue;
    }

    ++report.stats.total_tweets;
    if (row.is_retweet) {
      ++report.stats.retweet_count;
      retweeted_ids.insert(row.original_id);
    } else {
      ++report.stats.original_tweets;
      original_ids.insert(row.tweet_id);
      if (original_tweeters.insert(row.screen_name).second)
        report.stats.friends_of_offenders_sum += row.friend_count;
    }
  }

  for (const std::string& id : retweeted_ids)
    if (original_ids.contains(id)) ++report.stats.originals_retweeted_at_least_once;
  return report;
}

/// Numerator choice for the retweet-probability estimate. The published
/// figure divides the original-tweet count by the friend total; the literal
/// reading divides the retweet count instead. Both are exposed because the
/// two disagree on real corpora.
enum class AlphaNumerator { OriginalTweets, Retweets };

/// alpha = 1 - numerator / friends_of_offenders_sum. Throws when the friend
/// total is zero or the numerator exceeds it.
inline double estimate_alpha(const CorpusStats& stats,
                             AlphaNumerator numerator = AlphaNumerator::OriginalTweets) {
  const std::int64_t num = numerator == AlphaNumerator::OriginalTweets ? stats.original_tweets
                                                                       : stats.retweet_count;
  if (stats.friends_of_offenders_sum <= 0)
    throw std::invalid_argument("estimate_alpha: no friends of original tweeters counted");
  if (num > stats.friends_of_offenders_sum)
    throw std::invalid_argument("estimate_alpha: numerator exceeds the friend total");
  return 1.0 - static_cast<double>(num) / static_cast<double>(stats.friends_of_offenders_sum);
}

/// Mean degree E[m] of the truncated power law P(m) ~ m^-gamma on
/// m = 1..m_max. The cutoff keeps the gamma <= 2 mean finite.
inline double mean_degree_powerlaw(double gamma, std::int64_t m_max) {
  if (!std::isfinite(gamma) || gamma <= 1.0)
    throw std::invalid_argument("mean_degree_powerlaw: gamma must be > 1");
  if (m_max < 1) throw std::invalid_argument("mean_degree_powerlaw: m_max must be >= 1");
  double num = 0.0, den = 0.0;
  for (std::int64_t m = 1; m <= m_max; ++m) {
    const double w = std::pow(static_cast<double>(m), -gamma);
    num += static_cast<double>(m) * w;
    den += w;
  }
  return num / den;
}

struct FitGrid {
  double start = 0.01;
  double stop = 1.0;
  double step = 0.01;
};

struct FitResult {
  double s0_frac = 0.0;    ///< best grid point
  double predicted = 0.0;  ///< retweets per tweet at the best point
  double target = 0.0;
  std::vector<std::pair<double, double>> grid;  ///< (S0/N, predicted) rows
};

struct FitOptions {
  double o0 = 1.0;  ///< seed offenders
  long horizon = 10000;
  double stop_threshold = kMetricStopThreshold;
};

/// Grid search over the initial stifler share S0/N: simulate the basic model
/// from (N - S0 - O0, O0, 0, S0) to extinction and keep the grid point whose
/// retweets-per-tweet lands closest to `target`. Ties break toward the
/// smaller share. Deterministic: the same inputs always select the same
/// point.
inline FitResult fit_s0(const ModelParams& params, double target, FitGrid grid = {},
                        FitOptions opt = {}) {
  params.validate();
  if (params.kind != ModelKind::Basic)
    throw std::invalid_argument("fit_s0: the fit scenario uses the basic model");
  if (!std::isfinite(target) || target < 0.0)
    throw std::invalid_argument("fit_s0: target must be finite and >= 0");
  if (!(grid.step > 0.0) || grid.stop < grid.start)
    throw std::invalid_argument("fit_s0: empty grid");

  FitResult result;
  result.target = target;
  double best_gap = std::numeric_limits<double>::infinity();
  const long points = static_cast<long>((grid.stop - grid.start) / grid.step + 1.5);
  for (long i = 0; i < points; ++i) {
    const double frac = grid.start + static_cast<double>(i) * grid.step;
    if (frac > grid.stop + grid.step / 2.0) break;
    double s0 = frac * params.N;
    double u0 = params.N - s0 - opt.o0;
    if (u0 < 0.0) {  // the seed is carved out of the stifler pool at the top of the grid
      u0 = 0.0;
      s0 = params.N - opt.o0;
    }
    const Trajectory traj = simulate(StateVector{u0, opt.o0, 0.0, s0}, params, opt.horizon,
                                     StopRule{opt.stop_threshold});
    const double predicted = retweets_per_tweet(traj);
    result.grid.emplace_back(frac, predicted);
    const double gap = std::abs(predicted - target);
    if (gap < best_gap) {
      best_gap = gap;
      result.s0_frac = frac;
      result.predicted = predicted;
    }
  }
  if (result.grid.empty()) throw std::invalid_argument("fit_s0: empty grid");
  return result;
}

}  // namespace uoqs
