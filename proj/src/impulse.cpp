#include "impact/impulse.hpp"

#include <cmath>

#include "impact/chain_dynamics.hpp"

namespace impact {

ContactScenario::ContactScenario(InverseInertiaMatrix w, const Vec3& normal, const Vec3& v_pre)
    : w_(std::move(w)), normal_(normal), v_pre_(v_pre) {
  if (!normal_.allFinite() || std::abs(normal_.norm() - 1.0) > 1e-12) {
    throw InvalidScenario("contact normal must have unit norm");
  }
  if (!v_pre_.allFinite() || normal_.dot(v_pre_) > 0.0) {
    throw InvalidScenario("pre-impact velocity must approach the surface (n^T v_pre <= 0)");
  }
  if (!(w_.along(normal_) > 0.0)) {
    throw InvalidScenario(std::string("n^T W n is not positive for the ") + to_string(w_.method) + " IIM");
  }
}

double effective_mass(const ContactScenario& s) {
  return 1.0 / s.iim().along(s.normal());
}

double impulse_for_velocity(const ContactScenario& s, double v_n) {
  const double v_minus = s.normal_pre_velocity();
  if (v_n < v_minus) {
    throw InvalidTarget("target normal velocity is below the pre-impact velocity");
  }
  return effective_mass(s) * (v_n - v_minus);
}

double compression_end_impulse(const ContactScenario& s) {
  return -s.normal_pre_velocity() / s.iim().along(s.normal());
}

double restitution_end_impulse(const ContactScenario& s, double e_r) {
  if (!(e_r >= 0.0 && e_r <= 1.0)) {
    throw OutOfRange("coefficient of restitution must lie in [0, 1]");
  }
  return (1.0 + e_r) * compression_end_impulse(s);
}

Eigen::VectorXd joint_velocity_jump(const ChainModel& model, const Eigen::VectorXd& q, const Vec3& impulse) {
  const Matrix6X j_op = body_jacobian(model, q, ContactTarget{});
  Eigen::LLT<Eigen::MatrixXd> llt(joint_space_inertia(model, q));
  if (llt.info() != Eigen::Success) {
    throw SingularInertia("joint-space inertia is not positive definite");
  }
  Vec6 wrench = Vec6::Zero();
  wrench.head<3>() = impulse;
  return llt.solve(j_op.transpose() * wrench);
}

}  // namespace impact
