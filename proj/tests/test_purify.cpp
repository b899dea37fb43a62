#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "plltk/errors.hpp"
#include "plltk/purify.hpp"
#include "support/fixtures.hpp"

using namespace pll;

namespace {

Eigen::MatrixXd one_row(std::initializer_list<double> values) {
  Eigen::MatrixXd m(1, static_cast<int>(values.size()));
  int j = 0;
  for (double v : values) m(0, j++) = v;
  return m;
}

PurificationSchedule schedule_with(double e0, double e_end, double step,
                                   double eps) {
  PurificationSchedule s;
  s.initial_threshold = e0;
  s.end_threshold = e_end;
  s.step = step;
  s.epsilon = eps;
  return s;
}

}  // namespace

TEST_CASE("gaps at or above threshold plus epsilon are removed") {
  Eigen::MatrixXd p = one_row({0.7, 0.2, 0.1});
  std::vector<CandidateSet> sets{CandidateSet::full(3)};
  std::vector<RemovalEvent> events;
  int removals = purify_round(p, sets, 0.35, 0.05, &events);  // gap 0.4
  CHECK(removals == 2);
  CHECK(sets[0].labels() == std::vector<int>{0});
  REQUIRE(events.size() == 2);
  CHECK(events[0].label == 1);
  CHECK(events[1].label == 2);
}

TEST_CASE("a gap requirement of 1 never removes anything") {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const int c = 2 + rng.below(4);
    Eigen::VectorXd z(c);
    for (int j = 0; j < c; ++j) z[j] = 5.0 * rng.normal();
    Eigen::MatrixXd p = softmax(z).transpose();
    std::vector<CandidateSet> sets{testing::random_candidate_set(rng, c)};
    auto before = sets[0];
    CHECK(purify_round(p, sets, 0.95, 0.05, nullptr) == 0);
    CHECK(sets[0] == before);
  }
}

TEST_CASE("uniform probabilities produce no removals") {
  const int c = 4;
  Eigen::MatrixXd p = Eigen::MatrixXd::Constant(2, c, 1.0 / c);
  std::vector<CandidateSet> sets{CandidateSet::full(c),
                                 CandidateSet::from_labels(c, {1, 3})};
  CHECK(purify_round(p, sets, 0.0, 1e-9, nullptr) == 0);
  CHECK(sets[0].count() == c);
  CHECK(sets[1].count() == 2);
}

TEST_CASE("the in-set reference label is never removed") {
  // the global argmax (label 0) is not a candidate; the in-set argmax
  // (label 1) anchors the rule and must survive
  Eigen::MatrixXd p = one_row({0.9, 0.08, 0.02});
  std::vector<CandidateSet> sets{CandidateSet::from_labels(3, {1, 2})};
  int removals = purify_round(p, sets, 0.04, 0.01, nullptr);  // gap 0.05
  CHECK(removals == 1);
  CHECK(sets[0].labels() == std::vector<int>{1});
}

TEST_CASE("ties in the snapshot resolve to the lowest index") {
  Eigen::MatrixXd p = one_row({0.45, 0.45, 0.1});
  std::vector<CandidateSet> sets{CandidateSet::full(3)};
  purify_round(p, sets, 0.3, 0.05, nullptr);
  CHECK(sets[0].contains(0));       // reference
  CHECK(sets[0].contains(1));       // gap 0 to the reference
  CHECK_FALSE(sets[0].contains(2)); // gap 0.35
}

TEST_CASE("threshold updates follow the idle-round rule") {
  PurificationSchedule s = schedule_with(0.9, 0.1, 0.05, 0.05);
  CHECK(update_threshold(0.5, 0, s) == doctest::Approx(0.45));
  CHECK(update_threshold(0.5, 3, s) == 0.5);
  CHECK(update_threshold(0.12, 0, s) == 0.12);  // floor would be crossed
  CHECK(update_threshold(0.15, 0, s) == doctest::Approx(0.10));
  CHECK(update_threshold(0.1, 0, s) == 0.1);
}

TEST_CASE("removals are computed from one snapshot, not example order") {
  Rng rng(2);
  const int n = 60, c = 5;
  Eigen::MatrixXd p(n, c);
  std::vector<CandidateSet> sets;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd z(c);
    for (int j = 0; j < c; ++j) z[j] = 3.0 * rng.normal();
    p.row(i) = softmax(z).transpose();
    sets.push_back(testing::random_candidate_set(rng, c));
  }
  std::vector<CandidateSet> forward = sets;
  purify_round(p, forward, 0.2, 0.05, nullptr);

  // reversed example order
  Eigen::MatrixXd rp(n, c);
  std::vector<CandidateSet> reversed;
  for (int i = 0; i < n; ++i) {
    rp.row(i) = p.row(n - 1 - i);
    reversed.push_back(sets[n - 1 - i]);
  }
  purify_round(rp, reversed, 0.2, 0.05, nullptr);
  for (int i = 0; i < n; ++i) CHECK(forward[i] == reversed[n - 1 - i]);
}

TEST_CASE("repeated rounds never regrow candidate sets") {
  Rng rng(3);
  const int n = 40, c = 4;
  std::vector<CandidateSet> sets = testing::random_candidate_sets(rng, n, c);
  std::vector<int> last_counts;
  for (const auto& s : sets) last_counts.push_back(s.count());
  double threshold = 0.6;
  PurificationSchedule s = schedule_with(0.6, 0.05, 0.05, 0.02);
  for (int round = 0; round < 30; ++round) {
    Eigen::MatrixXd p(n, c);
    for (int i = 0; i < n; ++i) {
      Eigen::VectorXd z(c);
      for (int j = 0; j < c; ++j) z[j] = 2.0 * rng.normal();
      p.row(i) = softmax(z).transpose();
    }
    int removals = purify_round(p, sets, threshold, s.epsilon, nullptr);
    threshold = update_threshold(threshold, removals, s);
    CHECK(threshold >= s.end_threshold);
    for (int i = 0; i < n; ++i) {
      CHECK(sets[i].count() >= 1);
      CHECK(sets[i].count() <= last_counts[i]);
      last_counts[i] = sets[i].count();
    }
  }
}

TEST_CASE("schedule validation catches bad inputs") {
  CHECK_THROWS_AS(schedule_with(0.0, 0.1, 0.1, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(schedule_with(0.5, 0.6, 0.1, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(schedule_with(0.5, 0.1, 0.0, 0.1).validate(), ConfigError);
  CHECK_THROWS_AS(schedule_with(0.5, 0.1, 0.1, 0.0).validate(), ConfigError);
  CHECK_NOTHROW(schedule_with(0.9, 0.05, 0.05, 0.05).validate());
}

TEST_CASE("mismatched snapshot shape is rejected") {
  Eigen::MatrixXd p = one_row({0.5, 0.5});
  std::vector<CandidateSet> sets{CandidateSet::full(2), CandidateSet::full(2)};
  CHECK_THROWS_AS(purify_round(p, sets, 0.5, 0.05, nullptr), DataError);
}
