#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "rpe/estimator.hpp"
#include "rpe/quad.hpp"

using namespace rpe;

namespace {

// Explicit enumeration of all N candidates.
std::vector<double> enumerate(const CandidateSet& set) {
  std::vector<double> out;
  for (std::uint64_t n = 0; n < set.length(); ++n) {
    out.push_back((set.base().radians() + kTwoPi * static_cast<double>(n)) /
                  static_cast<double>(set.length()));
  }
  return out;
}

double brute_dist(double theta, const CandidateSet& set) {
  double best = INFINITY;
  for (double c : enumerate(set)) best = std::min(best, dist(Angle(theta), Angle(c)));
  return best;
}

double brute_nearest(double theta, const CandidateSet& set) {
  double best = INFINITY, arg = 0.0;
  for (double c : enumerate(set)) {
    const double d = dist(Angle(theta), Angle(c));
    if (d < best) {
      best = d;
      arg = c;
    }
  }
  return arg;
}

CandidateSet ideal_set(double theta, std::uint64_t n) {
  return candidate_set((1 + std::cos(n * theta)) / 2, (1 + std::sin(n * theta)) / 2, n);
}

}  // namespace

TEST(GenerationSequence, Validation) {
  EXPECT_THROW(GenerationSequence({1, 1}), std::invalid_argument);
  EXPECT_THROW(GenerationSequence({2, 1}), std::invalid_argument);
  EXPECT_THROW(GenerationSequence({0, 1}), std::invalid_argument);
  EXPECT_TRUE(GenerationSequence({1, 3, 9}).starts_at_one());
  EXPECT_FALSE(GenerationSequence({2, 3}).starts_at_one());
}

TEST(GenerationSequence, Builders) {
  const GenerationSequence p = GenerationSequence::powers_of_two(45);
  ASSERT_EQ(p.size(), 46u);
  EXPECT_EQ(p[45], std::uint64_t{1} << 45);

  const GenerationSequence s = GenerationSequence::bootstrapped_thirds(46);
  ASSERT_EQ(s.size(), 47u);
  EXPECT_EQ(s[0], 1u);
  EXPECT_EQ(s[1], 2u);
  EXPECT_EQ(s[2], 3u);
  EXPECT_EQ(s[3], 6u);
  EXPECT_EQ(s[4], 12u);
  for (std::size_t k = 0; k < p.size(); ++k) EXPECT_LT(p[k], s[k + 1]);
}

TEST(Probabilities, Examples) {
  ProbabilityPair p = probabilities({1, {500, 1000}, {750, 1000}});
  EXPECT_EQ(p.cosine, 0.5);
  EXPECT_EQ(p.sine, 0.75);
  EXPECT_EQ(probabilities({1, {1000, 1000}, {0, 1000}}).cosine, 1.0);
  EXPECT_EQ(probabilities({1, {0, 1000}, {0, 1000}}).cosine, 0.0);
  // Separate trial counts per circuit are fine.
  EXPECT_EQ(probabilities({1, {3, 4}, {1, 10}}).sine, 0.1);
  EXPECT_THROW(probabilities({1, {0, 0}, {0, 10}}), std::invalid_argument);
  EXPECT_THROW(probabilities({1, {11, 10}, {0, 10}}), std::invalid_argument);
}

TEST(CandidateSet, Examples) {
  CandidateSet s = candidate_set(1.0, 0.5, 1);
  EXPECT_EQ(s.base().radians(), 0.0);
  EXPECT_EQ(enumerate(s), std::vector<double>{0.0});

  s = candidate_set(0.5, 1.0, 2);
  EXPECT_NEAR(s.base().radians(), kPi / 2, 1e-15);
  const std::vector<double> c = enumerate(s);
  ASSERT_EQ(c.size(), 2u);
  EXPECT_NEAR(c[0], kPi / 4, 1e-15);
  EXPECT_NEAR(c[1], kPi / 4 + kPi, 1e-15);
}

TEST(CandidateSet, ContainsTrueAngleForIdealProbabilities) {
  const CandidateSet s = ideal_set(1.6, 2);
  const std::vector<double> c = enumerate(s);
  const bool found = std::any_of(c.begin(), c.end(),
                                 [](double x) { return dist(Angle(x), Angle(1.6)) < 1e-12; });
  EXPECT_TRUE(found);
  EXPECT_NEAR(candidate_dist(Angle(1.6), s), 0.0, 1e-12);
}

TEST(CandidateSet, Degenerate) {
  EXPECT_THROW(candidate_set(0.5, 0.5, 4), DegenerateCandidates);
  EXPECT_NO_THROW(candidate_set(0.5, 0.501, 4));
  EXPECT_THROW(candidate_set(1.5, 0.5, 4), std::invalid_argument);
}

TEST(CandidateSet, CandidateAccessorMatchesEnumeration) {
  const CandidateSet s(8, Angle(0.7));
  const std::vector<double> c = enumerate(s);
  for (std::uint64_t n = 0; n < 8; ++n) EXPECT_NEAR(s.candidate(n).radians(), c[n], 1e-14);
}

TEST(CandidateDist, Examples) {
  for (std::uint64_t n : {1u, 3u, 7u, 64u}) {
    const CandidateSet s(n, Angle(1.3));
    EXPECT_NEAR(candidate_dist(Angle(1.3 / n), s), 0.0, 1e-13);
  }
  const CandidateSet one(1, Angle(2.0));
  EXPECT_NEAR(candidate_dist(Angle(5.0), one), dist(Angle(5.0), Angle(2.0)), 1e-14);
}

TEST(CandidateDist, MatchesEnumerationAndIsBounded) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::uniform_int_distribution<std::uint64_t> len(1, 64);
  for (int i = 0; i < 5000; ++i) {
    const CandidateSet s(len(rng), Angle(u(rng)));
    const double theta = u(rng);
    const double d = candidate_dist(Angle(theta), s);
    ASSERT_NEAR(d, brute_dist(theta, s), 1e-12);
    ASSERT_LE(d, kPi / static_cast<double>(s.length()) + 1e-15);
  }
}

TEST(CandidateNearest, Examples) {
  const CandidateSet s(4, Angle(1.0));
  const Angle member = s.candidate(2);
  EXPECT_NEAR(dist(candidate_nearest(member, s).angle, member), 0.0, 1e-14);
  EXPECT_NEAR(candidate_nearest(Angle(0.1), CandidateSet(2, Angle(0.0))).angle.radians(), 0.0,
              1e-15);
}

TEST(CandidateNearest, MatchesEnumeration) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::uniform_int_distribution<std::uint64_t> len(1, 64);
  for (int i = 0; i < 5000; ++i) {
    const CandidateSet s(len(rng), Angle(u(rng)));
    const double theta = u(rng);
    const NearestCandidate got = candidate_nearest(Angle(theta), s);
    ASSERT_FALSE(got.tie);
    ASSERT_NEAR(dist(got.angle, Angle(brute_nearest(theta, s))), 0.0, 1e-12);
    ASSERT_NEAR(dist(got.angle, Angle(theta)), candidate_dist(Angle(theta), s), 1e-12);
  }
}

TEST(CandidateNearest, MidpointTiePicksCounterclockwise) {
  // Candidates at 0 and π; θ = π/2 is exactly between them.
  const NearestCandidate t = candidate_nearest(Angle(kPi / 2), CandidateSet(2, Angle(0.0)));
  EXPECT_TRUE(t.tie);
  EXPECT_NEAR(t.angle.radians(), kPi, 1e-15);
}

TEST(RunRpe, SingleGeneration) {
  const CandidateSet s(1, Angle(2.5));
  const RpeEstimates e = run_rpe(std::span<const CandidateSet>(&s, 1));
  ASSERT_EQ(e.estimates.size(), 1u);
  EXPECT_EQ(e.estimates[0].radians(), 2.5);
}

TEST(RunRpe, Preconditions) {
  std::vector<CandidateSet> bad{CandidateSet(2, Angle(0.0))};
  EXPECT_THROW(run_rpe(bad), std::invalid_argument);
  std::vector<CandidateSet> order{CandidateSet(1, Angle(0.0)), CandidateSet(4, Angle(0.0)),
                                  CandidateSet(4, Angle(0.0))};
  EXPECT_THROW(run_rpe(order), std::invalid_argument);
}

TEST(RunRpe, NoiselessRunStaysWithinHalfSpacing) {
  std::vector<CandidateSet> sets;
  for (int k = 0; k <= 10; ++k) sets.push_back(ideal_set(1.0, std::uint64_t{1} << k));
  const RpeEstimates e = run_rpe(sets);
  for (int k = 0; k <= 10; ++k) {
    EXPECT_LT(dist(e.estimates[k], Angle(1.0)), kPi / std::ldexp(1.0, k)) << k;
  }
}

TEST(RunRpe, NoiselessRandomAnglesTwentyGenerations) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  for (int trial = 0; trial < 100; ++trial) {
    const double theta = u(rng);
    std::vector<GenerationData> data;
    std::vector<CandidateSet> sets;
    std::vector<std::uint64_t> lengths;
    for (int k = 0; k <= 20; ++k) {
      const std::uint64_t n = std::uint64_t{1} << k;
      lengths.push_back(n);
      sets.push_back(CandidateSet(n, Angle(scaled_phase(n, theta))));
    }
    const RpeEstimates e = run_rpe(sets);
    EXPECT_FALSE(actual_failure_generation(e.estimates, Angle(theta), lengths).has_value());
  }
}

TEST(RunRpe, MisplacedEstimateSelectsWrongCandidate) {
  // θ = 1.0. θ̂_1 sits just past the midpoint between the Θ_2 candidates
  // 1.0 and 1.0 + π/2, so the chain picks the wrong one.
  const double theta = 1.0;
  const double misplaced = theta + kPi / 4 + 0.05;
  std::vector<CandidateSet> sets{CandidateSet(1, Angle(scaled_phase(1, theta))),
                                 CandidateSet(2, Angle(scaled_phase(2, misplaced))),
                                 CandidateSet(4, Angle(scaled_phase(4, theta)))};
  // By enumeration the Θ_2 candidate nearest to θ̂_1 is 1 + π/2.
  EXPECT_NEAR(brute_nearest(misplaced, sets[2]), theta + kPi / 2, 1e-12);

  const RpeEstimates e = run_rpe(sets);
  EXPECT_NEAR(dist(e.estimates[1], Angle(misplaced)), 0.0, 1e-12);
  EXPECT_NEAR(dist(e.estimates[2], Angle(theta + kPi / 2)), 0.0, 1e-12);
  EXPECT_EQ(actual_failure_generation(e.estimates, Angle(theta), std::vector<std::uint64_t>{1, 2, 4}),
            std::optional<std::size_t>(2));
}

TEST(RunRpe, EstimatesAreMembersAndStepsAreBounded) {
  std::mt19937_64 rng(24);
  std::uniform_real_distribution<double> u(0.0, kTwoPi);
  std::uniform_int_distribution<std::uint64_t> step(1, 5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<CandidateSet> sets{CandidateSet(1, Angle(u(rng)))};
    for (int k = 1; k < 15; ++k) {
      sets.emplace_back(sets.back().length() + step(rng), Angle(u(rng)));
    }
    const RpeEstimates e = run_rpe(sets);
    for (std::size_t k = 0; k < sets.size(); ++k) {
      ASSERT_NEAR(candidate_dist(e.estimates[k], sets[k]), 0.0, 1e-11);
      if (k > 0) {
        ASSERT_LE(dist(e.estimates[k], e.estimates[k - 1]),
                  kPi / static_cast<double>(sets[k].length()) + 1e-12);
      }
    }
  }
}

TEST(Analyze, TruncatesAtDegenerateGeneration) {
  std::vector<GenerationData> data{{1, {900, 1000}, {500, 1000}},
                                   {2, {500, 1000}, {500, 1000}},
                                   {4, {900, 1000}, {500, 1000}}};
  const RpeRun run = analyze(data);
  EXPECT_EQ(run.size(), 1u);
  EXPECT_EQ(run.lengths.size(), 3u);
  EXPECT_EQ(run.degenerate_at, std::optional<std::size_t>(1));
  EXPECT_EQ(run.k_max(), 2u);
}

TEST(Analyze, RequiresStrictlyIncreasingLengths) {
  std::vector<GenerationData> data{{1, {900, 1000}, {500, 1000}},
                                   {1, {900, 1000}, {500, 1000}}};
  EXPECT_THROW(analyze(data), std::invalid_argument);
}

TEST(RpeRun, WithoutPrefixShiftsIndices) {
  std::vector<std::uint64_t> lengths{1, 2, 3, 6};
  std::vector<Angle> est{Angle(0.1), Angle(0.2), Angle(0.3), Angle(0.4)};
  const RpeRun run = RpeRun::from_estimates(lengths, est);
  const RpeRun tail = run.without_prefix(1);
  EXPECT_EQ(tail.lengths, (std::vector<std::uint64_t>{2, 3, 6}));
  EXPECT_EQ(tail.estimates.size(), 3u);
  EXPECT_EQ(tail.estimates[0], Angle(0.2));
}

TEST(PolarReparam, Examples) {
  PolarForm p = polar_reparam(1.0, 0.5);
  EXPECT_NEAR(p.radius, 1.0, 1e-15);
  ASSERT_TRUE(p.phase);
  EXPECT_NEAR(p.phase->radians(), 0.0, 1e-15);

  p = polar_reparam(0.5, 0.5);
  EXPECT_EQ(p.radius, 0.0);
  EXPECT_FALSE(p.phase);

  EXPECT_LE(polar_reparam(1.0, 1.0).radius, std::sqrt(2.0) + 1e-15);
  EXPECT_THROW(polar_reparam(-0.1, 0.5), std::invalid_argument);
}

TEST(ActualFailure, Examples) {
  const std::vector<std::uint64_t> lengths{1, 2, 4, 8};
  std::vector<Angle> est(4, Angle(1.6));
  EXPECT_FALSE(actual_failure_generation(est, Angle(1.6), lengths));

  est[2] = Angle(1.6 + kPi / 4 + 0.01);
  EXPECT_EQ(actual_failure_generation(est, Angle(1.6), lengths), std::optional<std::size_t>(2));

  // Exactly π/N counts as failure.
  est[2] = Angle(1.6);
  est[1] = Angle(1.6 + kPi / 2 + 1e-12);
  EXPECT_EQ(actual_failure_generation(est, Angle(1.6), lengths), std::optional<std::size_t>(1));
}
