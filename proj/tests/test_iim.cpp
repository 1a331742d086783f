#include <gtest/gtest.h>

#include "impact/chain_dynamics.hpp"
#include "impact/iim.hpp"
#include "test_util.hpp"

using namespace impact;
using namespace impact::testing;

namespace {

// A random articulated chain mounted on six nearly massless carrier joints,
// so the base is effectively unconstrained.
ChainModel floating_chain(std::mt19937_64& rng, int n, double carrier) {
  const ChainModel free = free_body(carrier, Vec3::Zero(), Vec3::UnitZ(), carrier, Mat3::Identity() * carrier * 1e-2);
  const ChainModel arm = random_chain(rng, n);
  std::vector<Link> links = free.links();
  std::vector<Joint> joints = free.joints();
  for (int i = 0; i < n; ++i) {
    Link link = arm.links()[static_cast<std::size_t>(i)];
    link.parent = 5 + i;
    links.push_back(link);
    Joint joint = arm.joints()[static_cast<std::size_t>(i)];
    if (i == 0) joint.origin = joint.origin.relabel(link.name, "body");
    joints.push_back(joint);
  }
  ContactSpec contact = arm.contact();
  contact.link += 6;
  return ChainModel(links, joints, contact, "floating");
}

double relative_identity_residual(const ChainModel& chain, const Eigen::VectorXd& q) {
  const Mat3 gm = iim_gm(chain, q).w;
  const Mat3 sum = iim_crb(chain, q).w + iim_flex_correction(chain, q);
  return (gm - sum).norm() / gm.norm();
}

}  // namespace

TEST(Iim, RodOracles) {
  const double m = 1.9, l = 0.75;
  const ChainModel rod = pendulum_rod(m, l);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  const Vec3 n = contact_normal_in_contact_frame(rod, q);
  const InverseInertiaMatrix gm = iim_gm(rod, q);
  EXPECT_LT(rel_diff(gm.along(n), 3.0 / m), 1e-10);
  EXPECT_LT((gm.w - Mat3(Vec3(0, 3.0 / m, 0).asDiagonal())).norm(), 1e-10 / m);
  EXPECT_LT(rel_diff(iim_crb(rod, q).along(n), 4.0 / m), 1e-10);
  EXPECT_LT(iim_flex_correction(rod, q).norm(), 1e-10);
  EXPECT_LT((iim_crb_flex(rod, q).w - iim_crb(rod, q).w).norm(), 1e-10);
}

TEST(Iim, BlockOracle) {
  const ChainModel block = prismatic_block(3.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  EXPECT_LT(rel_diff(iim_gm(block, q).along(Vec3::UnitZ()), 1.0 / 3.0), 1e-14);
  // Locked rigid body touched at its COM.
  EXPECT_LT((iim_crb(block, q).w - Mat3::Identity() / 3.0).norm(), 1e-14);
}

TEST(Iim, UpperLeftBlockIsTranslational) {
  // Sliding along x with the contact off the axis: only the x entry can be nonzero.
  const Link link{"a", SpatialInertia(2.0, Vec3::Zero(), Mat3::Identity() * 0.1, "a"), -1};
  const Joint joint{"j", JointType::prismatic, Vec3::UnitX(), SpatialTransform::identity(kWorldFrame).relabel("a", kWorldFrame)};
  const ChainModel chain({link}, {joint}, ContactSpec{0, Vec3(0, 0.3, 0.2), Vec3::UnitX()});
  const Mat3 w = iim_gm(chain, Eigen::VectorXd::Zero(1)).w;
  EXPECT_LT((w - Mat3(Vec3(0.5, 0, 0).asDiagonal())).norm(), 1e-14);
}

TEST(Iim, CandidatesAreSymmetricPositiveDefinite) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5;
    const ChainModel chain = random_chain(rng, n);
    const Eigen::VectorXd q = random_q(rng, n);
    const InverseInertiaMatrix gm = iim_gm(chain, q), crb = iim_crb(chain, q);
    EXPECT_TRUE(gm.is_symmetric());
    EXPECT_TRUE(crb.is_symmetric());
    EXPECT_TRUE(crb.is_positive_definite());
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Mat3>(gm.w).eigenvalues().minCoeff(), -1e-12 * gm.w.norm());
    EXPECT_EQ(gm.frame, kContactFrame);
  }
}

TEST(Iim, CrbRoutesAgree) {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial % 5;
    const ChainModel chain = random_chain(rng, n);
    const Eigen::VectorXd q = random_q(rng, n);
    const Mat3 a = iim_crb(chain, q).w, b = iim_crb_spatial(chain, q).w;
    EXPECT_LT((a - b).norm(), 1e-10 * a.norm());
  }
}

TEST(Iim, CrbAtComOfFreeBodyAndRodTip) {
  const double m = 2.0;
  const ChainModel body = free_body(m, Vec3::Zero(), Vec3::UnitZ(), 1e-9);
  const double total = body.total_mass();
  EXPECT_LT((iim_crb(body, Eigen::VectorXd::Zero(6)).w - Mat3::Identity() / total).norm(), 1e-12);
  const ChainModel rod = pendulum_rod(m, 1.2);
  EXPECT_LT(rel_diff(1.0 / iim_crb(rod, Eigen::VectorXd::Zero(1)).along(Vec3::UnitY()), m / 4), 1e-10);
}

TEST(Iim, CrbIgnoresBaseTranslation) {
  std::mt19937_64 rng(23);
  const ChainModel chain = random_chain(rng, 6);
  std::vector<Joint> joints = chain.joints();
  const auto& o = joints[0].origin;
  joints[0].origin = SpatialTransform(o.rotation(), o.translation() + Vec3(-5, 4, 2), o.from_frame(), o.to_frame());
  const ChainModel moved(chain.links(), joints, chain.contact());
  const Eigen::VectorXd q = random_q(rng, 6);
  EXPECT_LT((iim_crb(chain, q).w - iim_crb(moved, q).w).norm(), 1e-10);
  EXPECT_LT((iim_gm(chain, q).w - iim_gm(moved, q).w).norm(), 1e-10);
}

TEST(Iim, FlexCorrectionVanishesForOneLink) {
  std::mt19937_64 rng(24);
  const ChainModel single = random_chain(rng, 1);
  const Eigen::VectorXd q = random_q(rng, 1);
  EXPECT_LT(iim_flex_correction(single, q).norm(), 1e-10);
  EXPECT_LT((iim_crb_flex(single, q).w - iim_crb(single, q).w).norm(), 1e-10);
}

TEST(Iim, IdentityHoldsWhenBaseIsUnconstrained) {
  // With a free base the joint-space route splits exactly into the CRB term
  // and the relative-motion correction; the carriers' residual mass is the
  // only discrepancy.
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 2 + trial % 4;
    const ChainModel chain = floating_chain(rng, n, 1e-9);
    Eigen::VectorXd q = Eigen::VectorXd::Zero(6 + n);
    q.tail(n) = random_q(rng, n);
    q.segment(3, 3) = random_q(rng, 3) * 0.5;
    EXPECT_LT(relative_identity_residual(chain, q), 1e-6) << "trial " << trial;
  }
}

TEST(Iim, EmIsSingularBelowSixJoints) {
  const ChainModel rod = pendulum_rod(1.0, 1.0);
  const Eigen::VectorXd q = Eigen::VectorXd::Zero(1);
  EXPECT_THROW(em_matrix(rod, q), SingularOperationalInertia);
  EXPECT_THROW(compute_iim(IimMethod::em, rod, q), SingularOperationalInertia);
  EmOptions pinv;
  pinv.allow_pseudo_inverse = true;
  const Mat3 em = em_matrix(rod, q, pinv);
  EXPECT_TRUE(em.allFinite());
}

TEST(Iim, EmOfFreeBodyIsItsMass) {
  const double m = 2.0;
  const ChainModel body = free_body(m, Vec3::Zero(), Vec3::UnitZ(), 1e-9);
  const Mat3 em = em_matrix(body, Eigen::VectorXd::Zero(6));
  EXPECT_LT((em - m * Mat3::Identity()).norm(), 1e-6 * m);
  // p = (1 + e) m v
  const Vec3 p = algebraic_impulse(body, Eigen::VectorXd::Zero(6), Vec3(0, 0, -0.1), 1.0);
  EXPECT_LT((p - Vec3(0, 0, -0.4)).norm(), 1e-6);
  EXPECT_EQ(algebraic_impulse(body, Eigen::VectorXd::Zero(6), Vec3::Zero(), 0.5), Vec3::Zero());
  EXPECT_THROW(algebraic_impulse(body, Eigen::VectorXd::Zero(6), Vec3::UnitZ(), 1.2), OutOfRange);
  EXPECT_THROW(algebraic_impulse(body, Eigen::VectorXd::Zero(6), Vec3::UnitZ(), -0.1), OutOfRange);
}

TEST(Iim, EmBoundsEffectiveMassFromBelow) {
  // The operational mass block along n dominates 1 / (n^T W_gm n).
  std::mt19937_64 rng(26);
  for (int trial = 0; trial < 30; ++trial) {
    const ChainModel chain = random_chain(rng, 7);
    const Eigen::VectorXd q = random_q(rng, 7);
    const Vec3 n = contact_normal_in_contact_frame(chain, q);
    const double m_em = n.dot(em_matrix(chain, q) * n);
    const double m_gm = 1.0 / iim_gm(chain, q).along(n);
    EXPECT_GE(m_em, m_gm * (1 - 1e-9)) << "trial " << trial;
  }
}

TEST(Iim, MethodNames) {
  for (IimMethod m : {IimMethod::gm, IimMethod::em, IimMethod::crb, IimMethod::crb_flex}) {
    EXPECT_EQ(iim_method_from_string(to_string(m)), m);
  }
  EXPECT_THROW(iim_method_from_string("lagrange"), InputError);
}
