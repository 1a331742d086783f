/**
 * @file spatial.hpp
 * @brief Frame-tagged SE(3) transforms, twists, wrenches and spatial inertias.
 *
 * Layout: every 6-vector stores the translational part first.
 *   Twist  = [v; w]   (linear velocity, angular velocity)
 *   Wrench = [f; m]   (force, moment)
 *
 * A SpatialTransform T = (R, t) from frame A to frame B maps coordinates
 * x_B = R x_A + t, i.e. t is the origin of A expressed in B. With this
 * convention:
 *
 *   adjoint_twist:     v_B = R v_A + [t]x R w_A,   w_B = R w_A
 *   coadjoint_wrench:  f_B = R f_A,                m_B = [t]x R f_A + R m_A
 *
 * so that <coadjoint(T, w), v_B> = <w, adjoint(T^-1, v_B)> (power is frame
 * independent). The 6x6 matrices are Ad(T) = [R, [t]x R; 0, R] and
 * Ad*(T) = Ad(T)^-T = [R, 0; [t]x R, R].
 *
 * Frames are plain string identifiers. Every operation checks them and
 * throws FrameError on mismatch; nothing is silently re-expressed.
 */
#pragma once

#include <Eigen/Dense>
#include <string>

#include "impact/errors.hpp"

namespace impact {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;
using FrameId = std::string;

inline constexpr double kSpatialTol = 1e-10;

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

/// Rotation from roll-pitch-yaw (fixed-axis X, then Y, then Z), radians.
Mat3 rotation_from_rpy(const Vec3& rpy);
Vec3 rpy_from_rotation(const Mat3& r);

class SpatialTransform {
 public:
  /// Throws InvalidModel when `rotation` is not a proper rotation (1e-10).
  SpatialTransform(const Mat3& rotation, const Vec3& translation, FrameId from, FrameId to);

  static SpatialTransform identity(const FrameId& frame);
  static SpatialTransform pure_translation(const Vec3& t, FrameId from, FrameId to);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  const FrameId& from_frame() const { return from_; }
  const FrameId& to_frame() const { return to_; }

  SpatialTransform inverse() const;
  Vec3 apply_point(const Vec3& p) const { return rotation_ * p + translation_; }

  Mat6 adjoint_matrix() const;
  Mat6 coadjoint_matrix() const;

  /// Same transform with relabelled frames.
  SpatialTransform relabel(FrameId from, FrameId to) const;

 private:
  Mat3 rotation_;
  Vec3 translation_;
  FrameId from_;
  FrameId to_;
};

/// outer ∘ inner: first `inner` (A->B), then `outer` (B->C). Requires
/// inner.to_frame() == outer.from_frame().
SpatialTransform compose(const SpatialTransform& outer, const SpatialTransform& inner);

struct Twist {
  Vec3 linear = Vec3::Zero();
  Vec3 angular = Vec3::Zero();
  FrameId frame;

  Vec6 vector() const;
  static Twist from_vector(const Vec6& v, FrameId frame);
};

struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 moment = Vec3::Zero();
  FrameId frame;

  Vec6 vector() const;
  static Wrench from_vector(const Vec6& w, FrameId frame);
};

/// Power pairing <w, v>; frames must agree.
double power(const Wrench& w, const Twist& v);

/// Rigid-body inertia: mass, centre of mass and rotational inertia about the
/// centre of mass, all expressed in `frame`. The inertia is stored
/// symmetrized.
class SpatialInertia {
 public:
  /// Validates mass > 0, symmetric positive definite inertia and the triangle
  /// inequality on principal moments. Throws InvalidModel.
  SpatialInertia(double mass, const Vec3& com, const Mat3& inertia_about_com, FrameId frame);

  double mass() const { return mass_; }
  const Vec3& com_offset() const { return com_; }
  const Mat3& rotational_inertia() const { return inertia_; }
  const FrameId& frame() const { return frame_; }

  /// Rotational inertia about the frame origin (parallel-axis theorem).
  Mat3 rotational_inertia_about_origin() const;

  /// 6x6 matrix acting on [v; w] about the frame origin.
  Mat6 matrix() const;

  double kinetic_energy(const Twist& v) const;

 private:
  double mass_;
  Vec3 com_;
  Mat3 inertia_;
  FrameId frame_;
};

Twist adjoint_twist(const SpatialTransform& t, const Twist& v);
Wrench coadjoint_wrench(const SpatialTransform& t, const Wrench& w);
SpatialInertia transform_inertia(const SpatialTransform& t, const SpatialInertia& inertia);

}  // namespace impact
