#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "impact/spatial.hpp"

namespace impact {

inline const FrameId kWorldFrame = "world";
inline const FrameId kContactFrame = "contact";
inline const FrameId kCentroidalFrame = "centroidal";

enum class JointType { revolute, prismatic };

const char* to_string(JointType type);

struct Link {
  std::string name;
  /// Expressed in the link frame (frame id == name).
  SpatialInertia inertia;
  /// Index of the parent link, -1 for the fixed base.
  int parent = -1;
};

struct Joint {
  std::string name;
  JointType type = JointType::revolute;
  /// Unit axis in the joint (= child link) frame.
  Vec3 axis = Vec3::UnitZ();
  /// Pose of the joint frame at q = 0 in the parent frame.
  SpatialTransform origin = SpatialTransform::identity(kWorldFrame);
};

struct ContactSpec {
  int link = 0;
  /// Contact point in the link frame (m).
  Vec3 point = Vec3::Zero();
  /// Outward surface normal in the world frame. Approach velocity is along -normal.
  Vec3 normal = Vec3::UnitZ();
};

/// Fixed-base serial chain. Link i is moved by joint i and its parent is
/// link i-1 (or the base for i = 0). Immutable once constructed.
class ChainModel {
 public:
  /// Validates the chain and throws InvalidModel on any violated invariant.
  ChainModel(std::vector<Link> links, std::vector<Joint> joints, ContactSpec contact, std::string name = {});

  int dof() const { return static_cast<int>(joints_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<Joint>& joints() const { return joints_; }
  const ContactSpec& contact() const { return contact_; }
  const std::string& name() const { return name_; }

  double total_mass() const;

  /// Frame id of the parent of link i ("world" for i = 0).
  const FrameId& parent_frame(int i) const;

  /// Throws DimensionMismatch unless q has dof() entries.
  void check_dimension(const Eigen::VectorXd& q, const char* what = "q") const;

 private:
  std::vector<Link> links_;
  std::vector<Joint> joints_;
  ContactSpec contact_;
  std::string name_;
};

struct ChainState {
  Eigen::VectorXd q;
  Eigen::VectorXd qdot;
};

}  // namespace impact
