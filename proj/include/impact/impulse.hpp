/**
 * @file impulse.hpp
 * @brief Normal impulse along the contact normal under zero tangential impulse.
 *
 * With the impulse restricted to the normal, the normal contact velocity
 * evolves as v_n = v_n^- + (n^T W n) p_n, so every quantity below is a
 * linear function of the pre-impact normal velocity.
 */
#pragma once

#include "impact/chain.hpp"
#include "impact/iim.hpp"

namespace impact {

/// Validated bundle of IIM, normal and pre-impact velocity. All vectors are in
/// the IIM frame.
class ContactScenario {
 public:
  /// Throws InvalidScenario unless |n| = 1, n^T W n > 0 and n^T v_pre <= 0.
  ContactScenario(InverseInertiaMatrix w, const Vec3& normal, const Vec3& v_pre);

  const InverseInertiaMatrix& iim() const { return w_; }
  const Vec3& normal() const { return normal_; }
  const Vec3& v_pre() const { return v_pre_; }
  double normal_pre_velocity() const { return normal_.dot(v_pre_); }

 private:
  InverseInertiaMatrix w_;
  Vec3 normal_;
  Vec3 v_pre_;
};

/// m* = 1 / (n^T W n).
double effective_mass(const ContactScenario& s);

/// p_n = m* (v_n - v_n^-). Throws InvalidTarget when v_n < v_n^-.
double impulse_for_velocity(const ContactScenario& s, double v_n);

/// p_nc = -v_n^- / (n^T W n).
double compression_end_impulse(const ContactScenario& s);

/// (1 + e_r) p_nc. Throws OutOfRange unless 0 <= e_r <= 1.
double restitution_end_impulse(const ContactScenario& s, double e_r);

/// dq = M^-1 J_Op^T [p; 0] for an impulse p in the contact frame.
Eigen::VectorXd joint_velocity_jump(const ChainModel& model, const Eigen::VectorXd& q, const Vec3& impulse);

}  // namespace impact
