#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "impact/identification.hpp"
#include "test_util.hpp"

using namespace impact;
using impact::testing::rel_diff;

namespace {

const ContactModel kTruth{ContactFamily::viscoelastic, 6.5e5, 3.7e7, 3.8};

ForceProfile two_lobes() {
  ForceProfile p;
  for (int i = 0; i < 60; ++i) {
    p.time.push_back(i / p.sample_rate_hz);
    const double lobe = i < 30 ? std::sin(std::numbers::pi * i / 25.0) : 0.4 * std::sin(std::numbers::pi * (i - 35) / 15.0);
    p.force.push_back(std::max(0.0, lobe) * 50.0);
  }
  return p;
}

}  // namespace

TEST(Identification, TrimKeepsSingleLobeInterior) {
  const ForceProfile p = synthesize_profile(kTruth, -0.1);
  const ForceProfile t = trim_first_impact(p, 0.0);
  ASSERT_EQ(t.size(), p.size() - 1);  // only the zero sample at onset goes
  for (std::size_t i = 0; i < t.size(); ++i) {
    EXPECT_EQ(t.force[i], p.force[i + 1]);
    EXPECT_EQ(t.time[i], p.time[i + 1]);
  }
}

TEST(Identification, TrimKeepsFirstLobeOnly) {
  const ForceProfile p = two_lobes();
  const ForceProfile t = trim_first_impact(p, 1.0);
  EXPECT_GT(t.size(), 10u);
  EXPECT_LT(t.time.back(), 25.0 / p.sample_rate_hz);
  for (double f : t.force) EXPECT_GT(f, 1.0);
  const ForceProfile again = trim_first_impact(t, 1.0);
  EXPECT_EQ(again.time, t.time);
  EXPECT_EQ(again.force, t.force);
}

TEST(Identification, TrimWithoutImpactThrows) {
  ForceProfile zeros;
  zeros.time = {0.0, 4e-5, 8e-5};
  zeros.force = {0.0, 0.0, 0.0};
  EXPECT_THROW(trim_first_impact(zeros, 0.0), NoImpactFound);
}

TEST(Identification, Smoothing) {
  const ForceProfile p = two_lobes();
  EXPECT_EQ(smooth_profile(p, 1).force, p.force);
  EXPECT_THROW(smooth_profile(p, 2), OutOfRange);
  EXPECT_THROW(smooth_profile(p, 0), OutOfRange);
  const ForceProfile s = smooth_profile(p, 3);
  EXPECT_EQ(s.force.front(), p.force.front());
  EXPECT_NEAR(s.force[5], (p.force[4] + p.force[5] + p.force[6]) / 3.0, 1e-12);
}

TEST(Identification, NoiselessViscoelasticRecovery) {
  for (double v : {-0.0755, -0.1755}) {
    const ForceProfile p = synthesize_profile(kTruth, v);
    const FitResult r = fit_viscoelastic(p, kTruth.m_star, v);
    EXPECT_LT(rel_diff(r.k, kTruth.k), 0.02);
    EXPECT_LT(rel_diff(r.c, kTruth.c), 0.02);
    const double peak = *std::max_element(p.force.begin(), p.force.end());
    EXPECT_LT(r.rms, 1e-6 * peak);
    EXPECT_EQ(r.cor, -(r.k / r.c) / v);
    EXPECT_TRUE(r.cor_in_range);
    EXPECT_EQ(r.family, ContactFamily::viscoelastic);
  }
}

TEST(Identification, NoisyViscoelasticRecovery) {
  std::mt19937_64 rng(41);
  double k = 0.0, c = 0.0;
  const int repeats = 10;
  for (int i = 0; i < repeats; ++i) {
    const ForceProfile p = synthesize_profile(kTruth, -0.12, 25000.0, 0.01, &rng);
    const FitResult r = fit_viscoelastic(p, kTruth.m_star, -0.12);
    k += r.k / repeats;
    c += r.c / repeats;
  }
  EXPECT_LT(rel_diff(k, kTruth.k), 0.10);
  EXPECT_LT(rel_diff(c, kTruth.c), 0.10);
}

TEST(Identification, FittedCorFallsWithSpeed) {
  double previous = 2.0;
  for (double v : {-0.0755, -0.1154, -0.1755}) {
    const FitResult r = fit_viscoelastic(synthesize_profile(kTruth, v), kTruth.m_star, v);
    EXPECT_LT(r.cor, previous);
    previous = r.cor;
  }
}

TEST(Identification, NoiselessMaxwellRecovery) {
  const ContactModel truth{ContactFamily::maxwell, 2e5, 2500.0, 3.8};
  const ForceProfile p = synthesize_profile(truth, -0.12);
  const FitResult r = fit_maxwell(p, truth.m_star, -0.12);
  EXPECT_LT(rel_diff(r.k, truth.k), 0.02);
  EXPECT_LT(rel_diff(r.c, truth.c), 0.02);
  EXPECT_LT(rel_diff(r.cor, predicted_cor(truth, -0.12)), 0.02);
}

TEST(Identification, MaxwellModelCannotFollowFallingCor) {
  // One Maxwell fit predicts the same COR at every speed, while the data it
  // was fitted to loses restitution as the speed grows.
  const double fit_speed = -0.1154;
  const FitResult r = fit_maxwell(synthesize_profile(kTruth, fit_speed), kTruth.m_star, fit_speed);
  const ContactModel fitted{ContactFamily::maxwell, r.k, r.c, kTruth.m_star};
  const double reference = predicted_cor(fitted, fit_speed);
  for (double v : {-0.0755, -0.0955, -0.1455, -0.1755}) {
    EXPECT_LT(rel_diff(predicted_cor(fitted, v), reference), 1e-6);
  }
  EXPECT_GT(simulate(kTruth, -0.0755).cor() - simulate(kTruth, -0.1755).cor(), 0.1);
}

TEST(Identification, FlatProfileDiverges) {
  ForceProfile flat;
  for (int i = 0; i < 50; ++i) {
    flat.time.push_back(i / flat.sample_rate_hz);
    flat.force.push_back(0.0);
  }
  EXPECT_THROW(fit_viscoelastic(flat, 3.8, -0.1), FitDiverged);
  try {
    fit_maxwell(flat, 3.8, -0.1);
    ADD_FAILURE() << "expected FitDiverged";
  } catch (const FitDiverged& e) {
    EXPECT_FALSE(e.best().converged);
  }
  EXPECT_THROW(fit_profile(ContactFamily::spring, two_lobes(), 3.8, -0.1), InvalidModel);
}

TEST(Identification, CorFromImpulse) {
  const ContactModel spring{ContactFamily::spring, 6.5e5, 0.0, 3.8};
  const CorEstimate s = estimate_cor_from_profile(synthesize_profile(spring, -0.15), 3.8, -0.15);
  EXPECT_NEAR(s.cor, 1.0, 1e-3);

  const CorEstimate inelastic = cor_from_impulse(3.8 * 0.1754, 3.8, -0.1754);
  EXPECT_NEAR(inelastic.cor, 0.0, 1e-15);
  EXPECT_TRUE(inelastic.in_range);

  // Measured-scale impulse: nearly inelastic, just below zero.
  const CorEstimate measured = cor_from_impulse(0.6662, 3.80, -0.1754);
  EXPECT_NEAR(measured.cor, 0.0, 1e-3);
  EXPECT_NEAR(measured.cor, 0.6662 / (3.80 * 0.1754) - 1.0, 1e-15);
  EXPECT_FALSE(measured.in_range);

  ForceProfile zero;
  zero.time = {0.0, 4e-5, 8e-5};
  zero.force = {0.0, 0.0, 0.0};
  EXPECT_THROW(estimate_cor_from_profile(zero, 3.8, -0.1), MalformedProfile);
}

TEST(Identification, SynthesizedProfileIsUniform) {
  std::mt19937_64 rng(42);
  const ForceProfile p = synthesize_profile(kTruth, -0.1, 10000.0, 0.01, &rng, "x");
  EXPECT_NO_THROW(p.validate());
  EXPECT_EQ(p.sample_rate_hz, 10000.0);
  EXPECT_EQ(p.v_pre, -0.1);
  EXPECT_EQ(p.label, "x");
  const ForceProfile clean = synthesize_profile(kTruth, -0.1, 10000.0);
  ASSERT_EQ(clean.size(), p.size());
  EXPECT_NE(clean.force[5], p.force[5]);
  EXPECT_NEAR(clean.force[5], p.force[5], 0.06 * clean.force[5]);
}
