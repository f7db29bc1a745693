#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "uoqs/calibration.hpp"

using namespace uoqs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

const char* kHeader =
    "tweet_id,created_at,screen_name,follower_count,friend_count,is_retweet,original_id\n";

IngestReport ingest_string(const std::string& body) {
  std::istringstream in(std::string(kHeader) + body);
  return ingest_csv(in);
}

}  // namespace

TEST_CASE("bundled corpus reproduces the reference aggregates") {
  std::ifstream in(UOQS_DATA_DIR "/sample_corpus.csv");
  REQUIRE(in.good());
  IngestReport report = ingest_csv(in);
  CHECK(report.errors.empty());
  CHECK(report.stats.total_tweets == 884);
  CHECK(report.stats.original_tweets == 478);
  CHECK(report.stats.retweet_count == 406);
  CHECK(report.stats.originals_retweeted_at_least_once == 100);
  CHECK(report.stats.friends_of_offenders_sum == 275960);
  CHECK_THAT(report.stats.mean_duplication().value(), WithinAbs(4.06, 1e-12));
  CHECK_THAT(report.stats.mean_copies_per_original().value(),
             WithinAbs(1.8493723849372385, 1e-12));
  CHECK_THAT(estimate_alpha(report.stats), WithinAbs(1.0 - 478.0 / 275960.0, 1e-15));
}

TEST_CASE("ingest") {
  SECTION("empty file with header gives all-zero stats") {
    IngestReport r = ingest_string("");
    CHECK(r.stats.total_tweets == 0);
    CHECK(r.stats.original_tweets == 0);
    CHECK(r.stats.retweet_count == 0);
    CHECK(r.stats.friends_of_offenders_sum == 0);
    CHECK_FALSE(r.stats.mean_duplication().has_value());
    CHECK(r.errors.empty());
  }
  SECTION("missing header is a hard error") {
    std::istringstream in("t1,2013-07-06T00:00:00Z,alice,1,2,false,\n");
    CHECK_THROWS_AS(ingest_csv(in), std::invalid_argument);
    std::istringstream empty("");
    CHECK_THROWS_AS(ingest_csv(empty), std::invalid_argument);
  }
  SECTION("three originals, one retweeted twice") {
    IngestReport r = ingest_string(
        "t1,2013-07-06T10:00:00Z,alice,5,100,false,\n"
        "t2,2013-07-06T11:00:00Z,bob,5,200,false,\n"
        "t3,2013-07-06T12:00:00Z,carol,5,300,false,\n"
        "t4,2013-07-06T13:00:00Z,dan,5,50,true,t2\n"
        "t5,2013-07-06T14:00:00Z,eve,5,60,true,t2\n");
    CHECK(r.stats.total_tweets == 5);
    CHECK(r.stats.original_tweets == 3);
    CHECK(r.stats.retweet_count == 2);
    CHECK(r.stats.originals_retweeted_at_least_once == 1);
    CHECK(r.stats.friends_of_offenders_sum == 600);
    CHECK(r.stats.mean_duplication().value() == 2.0);
  }
  SECTION("duplicate tweeters count friends once") {
    IngestReport r = ingest_string(
        "t1,2013-07-06T10:00:00Z,alice,5,100,false,\n"
        "t2,2013-07-06T11:00:00Z,alice,5,100,false,\n");
    CHECK(r.stats.original_tweets == 2);
    CHECK(r.stats.friends_of_offenders_sum == 100);
  }
  SECTION("malformed rows are reported with line numbers and skipped") {
    IngestReport r = ingest_string(
        "t1,2013-07-06T10:00:00Z,alice,5,100,false,\n"
        "t2,not-a-time,bob,5,200,false,\n"
        "t3,2013-07-06T12:00:00Z,carol,5,-1,false,\n"
        "t4,2013-07-06T13:00:00Z,dan,x,50,true,t1\n"
        "t5,2013-07-06T14:00:00Z,eve,5,60,maybe,t1\n"
        "t6,2013-07-06T15:00:00Z,frank,5,60,true,\n"
        "t7,2013-07-06T16:00:00Z,gina,5,60\n"
        "t8,2013-07-06T17:00:00Z,hugo,5,60,true,t1\n");
    CHECK(r.stats.total_tweets == 2);  // t1 and t8 survive
    CHECK(r.stats.retweet_count == 1);
    REQUIRE(r.errors.size() == 6);
    std::vector<std::size_t> lines;
    for (const RowError& e : r.errors) lines.push_back(e.line);
    CHECK(lines == std::vector<std::size_t>{3, 4, 5, 6, 7, 8});
  }
  SECTION("quoted fields with embedded commas") {
    IngestReport r = ingest_string(
        "t1,2013-07-06T10:00:00Z,\"alice, the brave\",5,100,false,\n"
        "t2,2013-07-06T11:00:00Z,\"bob \"\"b\"\"\",5,200,false,\n");
    CHECK(r.stats.original_tweets == 2);
    CHECK(r.stats.friends_of_offenders_sum == 300);
    CHECK(r.errors.empty());
  }
  SECTION("aggregates are permutation invariant") {
    std::vector<std::string> rows = {
        "t1,2013-07-06T10:00:00Z,alice,5,100,false,\n",
        "t2,2013-07-06T11:00:00Z,bob,5,200,false,\n",
        "t3,2013-07-06T12:00:00Z,carol,5,300,false,\n",
        "t4,2013-07-06T13:00:00Z,dan,5,50,true,t2\n",
        "t5,2013-07-06T14:00:00Z,eve,5,60,true,t3\n",
    };
    std::mt19937_64 rng(1234);
    for (int trial = 0; trial < 10; ++trial) {
      std::shuffle(rows.begin(), rows.end(), rng);
      std::string body;
      for (const std::string& row : rows) body += row;
      IngestReport r = ingest_string(body);
      CHECK(r.stats.total_tweets == 5);
      CHECK(r.stats.original_tweets == 3);
      CHECK(r.stats.originals_retweeted_at_least_once == 2);
      CHECK(r.stats.friends_of_offenders_sum == 600);
    }
  }
}

TEST_CASE("alpha estimate") {
  SECTION("one original, one retweet, a thousand friends") {
    IngestReport r = ingest_string(
        "t1,2013-07-06T10:00:00Z,alice,5,1000,false,\n"
        "t2,2013-07-06T11:00:00Z,bob,5,10,true,t1\n");
    CHECK_THAT(estimate_alpha(r.stats), WithinAbs(0.999, 1e-15));
    CHECK_THAT(estimate_alpha(r.stats, AlphaNumerator::Retweets), WithinAbs(0.999, 1e-15));
  }
  SECTION("nothing retweeted gives alpha 1 under the retweet numerator") {
    IngestReport r = ingest_string("t1,2013-07-06T10:00:00Z,alice,5,1000,false,\n");
    CHECK(estimate_alpha(r.stats, AlphaNumerator::Retweets) == 1.0);
  }
  SECTION("numerator equal to the denominator gives alpha 0") {
    CorpusStats s;
    s.total_tweets = 10;
    s.original_tweets = 10;
    s.friends_of_offenders_sum = 10;
    CHECK(estimate_alpha(s) == 0.0);
  }
  SECTION("errors") {
    CorpusStats zero;
    CHECK_THROWS_AS(estimate_alpha(zero), std::invalid_argument);
    CorpusStats over;
    over.original_tweets = 11;
    over.friends_of_offenders_sum = 10;
    CHECK_THROWS_AS(estimate_alpha(over), std::invalid_argument);
  }
}

TEST_CASE("mean degree of the truncated power law") {
  SECTION("frozen direct-summation values") {
    CHECK_THAT(mean_degree_powerlaw(3.0, 20), WithinRel(1.329174775227488, 1e-12));
    CHECK_THAT(mean_degree_powerlaw(2.0, 20), WithinRel(2.253992297381662, 1e-12));
  }
  SECTION("single-point cutoff") {
    CHECK(mean_degree_powerlaw(2.5, 1) == 1.0);
  }
  SECTION("monotone against a long-double oracle over a grid") {
    auto oracle = [](double gamma, std::int64_t mm) {
      long double num = 0.0L, den = 0.0L;
      for (std::int64_t m = mm; m >= 1; --m) {  // reverse order, extended precision
        const long double w = powl(static_cast<long double>(m), static_cast<long double>(-gamma));
        num += static_cast<long double>(m) * w;
        den += w;
      }
      return static_cast<double>(num / den);
    };
    double prev = std::numeric_limits<double>::infinity();
    for (double gamma : {1.5, 2.0, 2.25, 2.5, 2.75, 3.0, 4.0}) {
      const double got = mean_degree_powerlaw(gamma, 50);
      CHECK_THAT(got, WithinRel(oracle(gamma, 50), 1e-12));
      CHECK(got < prev);  // strictly decreasing in gamma
      prev = got;
    }
    for (std::int64_t mm : {2, 5, 10, 20, 100}) {
      CHECK(mean_degree_powerlaw(2.5, mm) > mean_degree_powerlaw(2.5, mm - 1));
    }
  }
  SECTION("domain errors") {
    CHECK_THROWS_AS(mean_degree_powerlaw(1.0, 20), std::invalid_argument);
    CHECK_THROWS_AS(mean_degree_powerlaw(2.0, 0), std::invalid_argument);
  }
}

TEST_CASE("stifler-share fit") {
  ModelParams p;  // reference scenario: N = 1e7, k = 10, alpha = 0.999, basic
  SECTION("reference scenario lands on 0.07 with the one-retweet target") {
    FitResult fit = fit_s0(p, 1.0);
    CHECK_THAT(fit.s0_frac, WithinAbs(0.07, 1e-12));
    CHECK_THAT(fit.predicted, WithinRel(1.0238080233731028, 1e-9));
    CHECK(fit.grid.size() == 100);
  }
  SECTION("zero target maximizes the stifler seed") {
    FitResult fit = fit_s0(p, 0.0);
    CHECK_THAT(fit.s0_frac, WithinAbs(1.0, 1e-12));
  }
  SECTION("single-point grid returns that point") {
    FitResult fit = fit_s0(p, 123.0, FitGrid{0.25, 0.25, 0.01});
    CHECK_THAT(fit.s0_frac, WithinAbs(0.25, 1e-12));
    CHECK(fit.grid.size() == 1);
  }
  SECTION("prediction is non-increasing in the stifler share") {
    FitResult fit = fit_s0(p, 1.0);
    for (std::size_t i = 1; i < fit.grid.size(); ++i)
      CHECK(fit.grid[i].second <= fit.grid[i - 1].second);
    // and across a few other parameter settings
    for (double alpha : {0.9, 0.99, 0.9999}) {
      for (double k : {2.0, 10.0, 25.0}) {
        ModelParams q = p;
        q.alpha = alpha;
        q.k = k;
        FitResult f = fit_s0(q, 1.0, FitGrid{0.05, 1.0, 0.05});
        for (std::size_t i = 1; i < f.grid.size(); ++i)
          CHECK(f.grid[i].second <= f.grid[i - 1].second * (1.0 + 1e-12));
      }
    }
  }
  SECTION("rerunning reproduces the identical grid point and values") {
    FitResult a = fit_s0(p, 1.0);
    FitResult b = fit_s0(p, 1.0);
    CHECK(a.s0_frac == b.s0_frac);
    REQUIRE(a.grid.size() == b.grid.size());
    for (std::size_t i = 0; i < a.grid.size(); ++i) {
      CHECK(a.grid[i].first == b.grid[i].first);
      CHECK(a.grid[i].second == b.grid[i].second);
    }
  }
  SECTION("errors") {
    CHECK_THROWS_AS(fit_s0(p, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(fit_s0(p, 1.0, FitGrid{0.5, 0.4, 0.01}), std::invalid_argument);
    ModelParams q = p;
    q.kind = ModelKind::Quarantine;
    CHECK_THROWS_AS(fit_s0(q, 1.0), std::invalid_argument);
  }
}
