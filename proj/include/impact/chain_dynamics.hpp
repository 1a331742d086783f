/**
 * @file chain_dynamics.hpp
 * @brief Kinematics and inertia aggregates of a fixed-base serial chain.
 *
 * Link frames are the joint frames after joint motion. The contact frame has
 * its origin at the contact point and the orientation of the contact link.
 * The centroidal frame sits at the whole-body centre of mass and is aligned
 * with the world frame.
 *
 * Jacobians map qdot to body twists ([v; w], expressed in the target frame).
 * The centroidal "Jacobian" is the average-velocity map I_G^-1 A_G, where A_G
 * is the centroidal momentum matrix.
 */
#pragma once

#include <variant>
#include <vector>

#include "impact/chain.hpp"

namespace impact {

using Matrix6X = Eigen::Matrix<double, 6, Eigen::Dynamic>;

struct Kinematics {
  /// Pose of every link frame (from link, to world).
  std::vector<SpatialTransform> links;
  /// Pose of the contact frame (from contact, to world).
  SpatialTransform contact;
};

Kinematics forward_kinematics(const ChainModel& model, const Eigen::VectorXd& q);

/// Contact normal expressed in the contact frame.
Vec3 contact_normal_in_contact_frame(const ChainModel& model, const Eigen::VectorXd& q);

struct LinkTarget {
  int index;
};
struct ContactTarget {};
using JacobianTarget = std::variant<LinkTarget, ContactTarget>;

Matrix6X body_jacobian(const ChainModel& model, const Eigen::VectorXd& q, JacobianTarget target);

/// Joint-space inertia by the composite-rigid-body algorithm.
Eigen::MatrixXd joint_space_inertia(const ChainModel& model, const Eigen::VectorXd& q);

struct CentroidalState {
  /// From world to centroidal (pure translation by -com).
  SpatialTransform com_transform;
  double total_mass;
  Vec3 com;
  /// CRB inertia about the COM, world-aligned axes.
  Mat6 crb_inertia;
  /// Centroidal momentum [linear; angular about the COM].
  Vec6 momentum;
  /// Centroidal momentum matrix A_G, momentum = A_G * qdot.
  Matrix6X momentum_matrix;
};

CentroidalState centroidal_state(const ChainModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot);

/// Average-velocity Jacobian I_G^-1 A_G (twist of the centroidal frame).
Matrix6X centroidal_jacobian(const ChainModel& model, const Eigen::VectorXd& q);

/// Transform from the centroidal frame to the contact frame.
SpatialTransform centroidal_to_contact(const ChainModel& model, const Eigen::VectorXd& q);

/// J_cp = J_Op - Ad(c->p) J_Oc.
Matrix6X relative_contact_jacobian(const ChainModel& model, const Eigen::VectorXd& q);

struct VelocityDecomposition {
  Twist exact;        ///< contact twist J_Op qdot
  Twist approximate;  ///< Ad(c->p) times the centroidal average twist
  Twist relative;     ///< J_cp qdot
  double normal_ratio;  ///< approximate / exact along the contact normal
  double norm_ratio;    ///< |approximate.linear| / |exact.linear|
};

/// Throws DegenerateRatio when the exact normal velocity is below 1e-12.
VelocityDecomposition velocity_decomposition(const ChainModel& model, const Eigen::VectorXd& q,
                                             const Eigen::VectorXd& qdot);

}  // namespace impact
