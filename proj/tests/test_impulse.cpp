#include <gtest/gtest.h>

#include "impact/chain_dynamics.hpp"
#include "impact/contact.hpp"
#include "impact/impulse.hpp"
#include "test_util.hpp"

using namespace impact;
using namespace impact::testing;

namespace {

InverseInertiaMatrix scalar_iim(double inverse_mass) {
  InverseInertiaMatrix w;
  w.w = Mat3::Identity() * inverse_mass;
  return w;
}

ContactScenario along_z(double mass, double v_n) { return ContactScenario(scalar_iim(1.0 / mass), Vec3::UnitZ(), Vec3(0, 0, v_n)); }

}  // namespace

TEST(Impulse, EffectiveMassExamples) {
  EXPECT_DOUBLE_EQ(effective_mass(ContactScenario(scalar_iim(0.5), Vec3::UnitZ(), Vec3(0, 0, -1))), 2.0);

  const double m = 2.4, l = 0.6;
  const ChainModel rod = pendulum_rod(m, l);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const Vec3 n = contact_normal_in_contact_frame(rod, q);
  EXPECT_LT(rel_diff(effective_mass(ContactScenario(iim_gm(rod, q), n, -0.1 * n)), m / 3), 1e-10);
  EXPECT_LT(rel_diff(effective_mass(ContactScenario(iim_crb(rod, q), n, -0.1 * n)), m / 4), 1e-10);
}

TEST(Impulse, ImpulseForVelocity) {
  const ContactScenario s = along_z(4.0, -0.1754);
  EXPECT_EQ(impulse_for_velocity(s, -0.1754), 0.0);
  EXPECT_NEAR(impulse_for_velocity(s, 0.0), 0.7016, 1e-12);
  EXPECT_THROW(impulse_for_velocity(s, -0.2), InvalidTarget);
  // dp/dv = m*
  EXPECT_NEAR(impulse_for_velocity(s, 0.1) - impulse_for_velocity(s, 0.05), 0.2, 1e-12);
}

TEST(Impulse, CompressionEndImpulse) {
  const ContactScenario s = along_z(2.0, -0.1);
  const double p = compression_end_impulse(s);
  EXPECT_NEAR(p, 0.2, 1e-15);
  EXPECT_DOUBLE_EQ(p, impulse_for_velocity(s, 0.0));
  EXPECT_NEAR(p * s.iim().along(s.normal()), -s.normal_pre_velocity(), 1e-15);
  // Only the normal component of v_pre matters.
  const ContactScenario oblique(scalar_iim(0.5), Vec3::UnitZ(), Vec3(0.3, -0.2, -0.1));
  EXPECT_NEAR(compression_end_impulse(oblique), 0.2, 1e-15);
}

TEST(Impulse, RestitutionEndImpulse) {
  const ContactScenario s = along_z(2.0, -0.1);
  const double p = compression_end_impulse(s);
  EXPECT_DOUBLE_EQ(restitution_end_impulse(s, 0.0), p);
  EXPECT_DOUBLE_EQ(restitution_end_impulse(s, 1.0), 2 * p);
  EXPECT_NEAR(restitution_end_impulse(s, 0.627), 0.3254, 1e-12);
  EXPECT_THROW(restitution_end_impulse(s, 1.01), OutOfRange);
  EXPECT_THROW(restitution_end_impulse(s, -0.01), OutOfRange);
}

TEST(Impulse, ScenarioValidation) {
  EXPECT_THROW(ContactScenario(scalar_iim(1.0), Vec3(0, 0, 2), Vec3(0, 0, -1)), InvalidScenario);
  EXPECT_THROW(ContactScenario(scalar_iim(1.0), Vec3::UnitZ(), Vec3(0, 0, 0.1)), InvalidScenario);
  EXPECT_THROW(ContactScenario(scalar_iim(0.0), Vec3::UnitZ(), Vec3(0, 0, -1)), InvalidScenario);
  EXPECT_THROW(ContactScenario(scalar_iim(-1.0), Vec3::UnitZ(), Vec3(0, 0, -1)), InvalidScenario);
  const ContactScenario touching = along_z(1.0, 0.0);
  EXPECT_EQ(compression_end_impulse(touching), 0.0);
}

TEST(Impulse, ImpulseIsLinearInApproachSpeed) {
  for (double v : {0.05, 0.1, 0.2}) {
    EXPECT_NEAR(compression_end_impulse(along_z(3.8, -2 * v)), 2 * compression_end_impulse(along_z(3.8, -v)), 1e-15);
  }
  // Measured-scale numbers: 0.6662 N s at 0.1754 m/s implies about 3.8 kg.
  EXPECT_NEAR(0.6662 / 0.1754, 3.798, 1e-3);
}

TEST(Impulse, JointVelocityJump) {
  const double m = 1.5, l = 0.8;
  const ChainModel rod = pendulum_rod(m, l);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  EXPECT_EQ(joint_velocity_jump(rod, q, Vec3::Zero()).norm(), 0.0);
  const double p = 0.25;
  EXPECT_LT(rel_diff(joint_velocity_jump(rod, q, Vec3(0, p, 0))(0), 3 * p / (m * l)), 1e-10);
  EXPECT_THROW(joint_velocity_jump(rod, Eigen::VectorXd::Zero(2), Vec3::Zero()), DimensionMismatch);
}

TEST(Impulse, JointJumpReproducesContactVelocityJump) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 3 + trial % 5;
    const ChainModel chain = random_chain(rng, n);
    const Eigen::VectorXd q = random_q(rng, n);
    const Vec3 p = random_vec(rng);
    const Vec3 dv = (body_jacobian(chain, q, ContactTarget{}) * joint_velocity_jump(chain, q, p)).head<3>();
    EXPECT_LT((dv - iim_gm(chain, q).w * p).norm(), 1e-10 * (1 + dv.norm()));
  }
}

TEST(Impulse, CompressionImpulseMatchesSimulation) {
  const double m = 3.8, v = -0.1754;
  const double p = compression_end_impulse(along_z(m, v));
  for (ContactFamily family : {ContactFamily::spring, ContactFamily::viscoelastic, ContactFamily::maxwell}) {
    ContactModel model{family, 6.5e5, family == ContactFamily::maxwell ? 3000.0 : 3.7e7, m};
    const ImpactTrace trace = simulate(model, v);
    ASSERT_TRUE(trace.events.compression_end.has_value());
    EXPECT_LT(rel_diff(trace.events.compression_end->p, p), 1e-6) << to_string(family);
  }
}
