#include "impact/chain.hpp"

#include <cmath>
#include <set>
#include <sstream>

namespace impact {

const char* to_string(JointType type) {
  switch (type) {
    case JointType::revolute:
      return "revolute";
    case JointType::prismatic:
      return "prismatic";
  }
  return "unknown";
}

ChainModel::ChainModel(std::vector<Link> links, std::vector<Joint> joints, ContactSpec contact, std::string name)
    : links_(std::move(links)), joints_(std::move(joints)), contact_(std::move(contact)), name_(std::move(name)) {
  if (links_.empty()) {
    throw InvalidModel("chain has no links");
  }
  if (links_.size() != joints_.size()) {
    std::ostringstream os;
    os << "chain has " << links_.size() << " links but " << joints_.size() << " joints";
    throw InvalidModel(os.str());
  }
  std::set<std::string> names;
  for (std::size_t i = 0; i < links_.size(); ++i) {
    const Link& link = links_[i];
    if (link.name.empty() || link.name == kWorldFrame || link.name == kContactFrame ||
        link.name == kCentroidalFrame) {
      throw InvalidModel("link " + std::to_string(i) + " has an empty or reserved name");
    }
    if (!names.insert(link.name).second) {
      throw InvalidModel("duplicate link name '" + link.name + "'");
    }
    if (link.parent != static_cast<int>(i) - 1) {
      throw InvalidModel("link '" + link.name + "': only serial chains are supported (parent must be the previous link)");
    }
    if (link.inertia.frame() != link.name) {
      throw InvalidModel("link '" + link.name + "': inertia must be expressed in the link frame");
    }
    const Joint& joint = joints_[i];
    if (std::abs(joint.axis.norm() - 1.0) > 1e-12) {
      throw InvalidModel("joint '" + joint.name + "': axis must have unit norm");
    }
    if (joint.origin.from_frame() != link.name || joint.origin.to_frame() != parent_frame(static_cast<int>(i))) {
      throw InvalidModel("joint '" + joint.name + "': origin must map '" + link.name + "' into '" +
                         parent_frame(static_cast<int>(i)) + "'");
    }
  }
  if (contact_.link < 0 || contact_.link >= static_cast<int>(links_.size())) {
    throw InvalidModel("contact link index out of range");
  }
  if (!contact_.point.allFinite()) {
    throw InvalidModel("contact point is not finite");
  }
  if (std::abs(contact_.normal.norm() - 1.0) > 1e-12) {
    throw InvalidModel("contact normal must have unit norm");
  }
}

double ChainModel::total_mass() const {
  double m = 0.0;
  for (const Link& link : links_) {
    m += link.inertia.mass();
  }
  return m;
}

const FrameId& ChainModel::parent_frame(int i) const {
  return i == 0 ? kWorldFrame : links_[static_cast<std::size_t>(i) - 1].name;
}

void ChainModel::check_dimension(const Eigen::VectorXd& q, const char* what) const {
  if (q.size() != dof()) {
    std::ostringstream os;
    os << what << " has " << q.size() << " entries, chain has " << dof() << " joints";
    throw DimensionMismatch(os.str());
  }
}

}  // namespace impact
