#include "impact/chain_dynamics.hpp"

#include <cmath>

namespace impact {

namespace {

/// Pose of joint frame i (after motion) in its parent frame.
SpatialTransform local_pose(const ChainModel& model, int i, double qi) {
  const Joint& joint = model.joints()[static_cast<std::size_t>(i)];
  Mat3 rm = Mat3::Identity();
  Vec3 tm = Vec3::Zero();
  if (joint.type == JointType::revolute) {
    rm = Eigen::AngleAxisd(qi, joint.axis).toRotationMatrix();
  } else {
    tm = joint.axis * qi;
  }
  const Mat3& ro = joint.origin.rotation();
  return {ro * rm, ro * tm + joint.origin.translation(), joint.origin.from_frame(), joint.origin.to_frame()};
}

/// Unit twist of joint i in its own link frame.
Vec6 joint_twist(const Joint& joint) {
  Vec6 s = Vec6::Zero();
  if (joint.type == JointType::revolute) {
    s.tail<3>() = joint.axis;
  } else {
    s.head<3>() = joint.axis;
  }
  return s;
}

Matrix6X jacobian_for_pose(const ChainModel& model, const Kinematics& kin, int link, const SpatialTransform& target) {
  const int n = model.dof();
  Matrix6X jac = Matrix6X::Zero(6, n);
  const SpatialTransform world_to_target = target.inverse();
  for (int j = 0; j <= link; ++j) {
    const SpatialTransform j_to_target = compose(world_to_target, kin.links[static_cast<std::size_t>(j)]);
    jac.col(j) = j_to_target.adjoint_matrix() * joint_twist(model.joints()[static_cast<std::size_t>(j)]);
  }
  return jac;
}

SpatialTransform link_to_centroidal(const SpatialTransform& link_pose, const Vec3& com) {
  return compose(SpatialTransform::pure_translation(-com, kWorldFrame, kCentroidalFrame), link_pose);
}

Vec3 center_of_mass(const ChainModel& model, const Kinematics& kin) {
  Vec3 weighted = Vec3::Zero();
  for (std::size_t i = 0; i < model.links().size(); ++i) {
    const SpatialInertia& inertia = model.links()[i].inertia;
    weighted += inertia.mass() * kin.links[i].apply_point(inertia.com_offset());
  }
  return weighted / model.total_mass();
}

struct CentroidalAggregate {
  Vec3 com;
  Mat6 inertia;
  Matrix6X momentum_matrix;
};

CentroidalAggregate aggregate(const ChainModel& model, const Eigen::VectorXd& q) {
  const Kinematics kin = forward_kinematics(model, q);
  CentroidalAggregate out{center_of_mass(model, kin), Mat6::Zero(), Matrix6X::Zero(6, model.dof())};
  for (std::size_t i = 0; i < model.links().size(); ++i) {
    const SpatialTransform to_c = link_to_centroidal(kin.links[i], out.com);
    const Mat6 xf = to_c.coadjoint_matrix();
    const Mat6 inertia = model.links()[i].inertia.matrix();
    out.inertia += xf * inertia * to_c.inverse().adjoint_matrix();
    out.momentum_matrix +=
        xf * inertia * jacobian_for_pose(model, kin, static_cast<int>(i), kin.links[i]);
  }
  out.inertia = 0.5 * (out.inertia + out.inertia.transpose()).eval();
  return out;
}

}  // namespace

Kinematics forward_kinematics(const ChainModel& model, const Eigen::VectorXd& q) {
  model.check_dimension(q);
  std::vector<SpatialTransform> poses;
  poses.reserve(model.links().size());
  for (int i = 0; i < model.dof(); ++i) {
    const SpatialTransform local = local_pose(model, i, q(i));
    poses.push_back(i == 0 ? local : compose(poses.back(), local));
  }
  const ContactSpec& c = model.contact();
  const SpatialTransform in_link = SpatialTransform::pure_translation(
      c.point, kContactFrame, model.links()[static_cast<std::size_t>(c.link)].name);
  SpatialTransform contact = compose(poses[static_cast<std::size_t>(c.link)], in_link);
  return {std::move(poses), std::move(contact)};
}

Vec3 contact_normal_in_contact_frame(const ChainModel& model, const Eigen::VectorXd& q) {
  const Kinematics kin = forward_kinematics(model, q);
  return kin.contact.rotation().transpose() * model.contact().normal;
}

Matrix6X body_jacobian(const ChainModel& model, const Eigen::VectorXd& q, JacobianTarget target) {
  const Kinematics kin = forward_kinematics(model, q);
  if (const auto* link = std::get_if<LinkTarget>(&target)) {
    if (link->index < 0 || link->index >= model.dof()) {
      throw InvalidTarget("body_jacobian: link index " + std::to_string(link->index) + " out of range");
    }
    return jacobian_for_pose(model, kin, link->index, kin.links[static_cast<std::size_t>(link->index)]);
  }
  return jacobian_for_pose(model, kin, model.contact().link, kin.contact);
}

Eigen::MatrixXd joint_space_inertia(const ChainModel& model, const Eigen::VectorXd& q) {
  const Kinematics kin = forward_kinematics(model, q);
  const int n = model.dof();
  // Ad(i -> i+1) for every joint pair.
  std::vector<Mat6> to_child(static_cast<std::size_t>(n));
  for (int i = 0; i + 1 < n; ++i) {
    to_child[static_cast<std::size_t>(i)] =
        compose(kin.links[static_cast<std::size_t>(i) + 1].inverse(), kin.links[static_cast<std::size_t>(i)])
            .adjoint_matrix();
  }
  std::vector<Mat6> composite(static_cast<std::size_t>(n));
  for (int i = n - 1; i >= 0; --i) {
    Mat6& ic = composite[static_cast<std::size_t>(i)];
    ic = model.links()[static_cast<std::size_t>(i)].inertia.matrix();
    if (i + 1 < n) {
      const Mat6& x = to_child[static_cast<std::size_t>(i)];
      ic += x.transpose() * composite[static_cast<std::size_t>(i) + 1] * x;
    }
  }
  Eigen::MatrixXd m(n, n);
  for (int i = 0; i < n; ++i) {
    Vec6 f = composite[static_cast<std::size_t>(i)] * joint_twist(model.joints()[static_cast<std::size_t>(i)]);
    m(i, i) = joint_twist(model.joints()[static_cast<std::size_t>(i)]).dot(f);
    for (int j = i - 1; j >= 0; --j) {
      f = to_child[static_cast<std::size_t>(j)].transpose() * f;
      m(j, i) = joint_twist(model.joints()[static_cast<std::size_t>(j)]).dot(f);
      m(i, j) = m(j, i);
    }
  }
  return m;
}

CentroidalState centroidal_state(const ChainModel& model, const Eigen::VectorXd& q, const Eigen::VectorXd& qdot) {
  model.check_dimension(qdot, "qdot");
  CentroidalAggregate agg = aggregate(model, q);
  return {SpatialTransform::pure_translation(-agg.com, kWorldFrame, kCentroidalFrame),
          model.total_mass(),
          agg.com,
          agg.inertia,
          agg.momentum_matrix * qdot,
          std::move(agg.momentum_matrix)};
}

Matrix6X centroidal_jacobian(const ChainModel& model, const Eigen::VectorXd& q) {
  const CentroidalAggregate agg = aggregate(model, q);
  return agg.inertia.ldlt().solve(agg.momentum_matrix);
}

SpatialTransform centroidal_to_contact(const ChainModel& model, const Eigen::VectorXd& q) {
  const Kinematics kin = forward_kinematics(model, q);
  const Vec3 com = center_of_mass(model, kin);
  const SpatialTransform centroid_pose = SpatialTransform::pure_translation(com, kCentroidalFrame, kWorldFrame);
  return compose(kin.contact.inverse(), centroid_pose);
}

Matrix6X relative_contact_jacobian(const ChainModel& model, const Eigen::VectorXd& q) {
  const Matrix6X j_op = body_jacobian(model, q, ContactTarget{});
  const Matrix6X j_oc = centroidal_jacobian(model, q);
  return j_op - centroidal_to_contact(model, q).adjoint_matrix() * j_oc;
}

VelocityDecomposition velocity_decomposition(const ChainModel& model, const Eigen::VectorXd& q,
                                             const Eigen::VectorXd& qdot) {
  model.check_dimension(qdot, "qdot");
  const Matrix6X j_op = body_jacobian(model, q, ContactTarget{});
  const Matrix6X j_oc = centroidal_jacobian(model, q);
  const Twist centroid = Twist::from_vector(j_oc * qdot, kCentroidalFrame);
  const Twist exact = Twist::from_vector(j_op * qdot, kContactFrame);
  const Twist approx = adjoint_twist(centroidal_to_contact(model, q), centroid);
  const Twist relative = Twist::from_vector(exact.vector() - approx.vector(), kContactFrame);

  const Vec3 n = contact_normal_in_contact_frame(model, q);
  const double exact_n = n.dot(exact.linear);
  if (std::abs(exact_n) < 1e-12) {
    throw DegenerateRatio("velocity_decomposition: exact normal contact velocity is zero");
  }
  const double exact_norm = exact.linear.norm();
  return {exact, approx, relative, n.dot(approx.linear) / exact_n, approx.linear.norm() / exact_norm};
}

}  // namespace impact
