#include "impact/spatial.hpp"

#include <cmath>
#include <sstream>

namespace impact {

namespace {

void require_frame(const FrameId& got, const FrameId& expected, const char* op) {
  if (got != expected) {
    std::ostringstream os;
    os << op << ": operand is in frame '" << got << "' but transform expects '" << expected << "'";
    throw FrameError(os.str());
  }
}

}  // namespace

Mat3 skew(const Vec3& a) {
  Mat3 s;
  s << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return s;
}

Mat3 rotation_from_rpy(const Vec3& rpy) {
  return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
          Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
      .toRotationMatrix();
}

Vec3 rpy_from_rotation(const Mat3& r) {
  const double pitch = std::atan2(-r(2, 0), std::hypot(r(0, 0), r(1, 0)));
  const double roll = std::atan2(r(2, 1), r(2, 2));
  const double yaw = std::atan2(r(1, 0), r(0, 0));
  return {roll, pitch, yaw};
}

SpatialTransform::SpatialTransform(const Mat3& rotation, const Vec3& translation, FrameId from, FrameId to)
    : rotation_(rotation), translation_(translation), from_(std::move(from)), to_(std::move(to)) {
  if (!rotation_.allFinite() || !translation_.allFinite()) {
    throw InvalidModel("SpatialTransform: non-finite entries");
  }
  const double ortho = (rotation_.transpose() * rotation_ - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho > kSpatialTol || std::abs(rotation_.determinant() - 1.0) > kSpatialTol) {
    throw InvalidModel("SpatialTransform: rotation is not orthonormal with det +1");
  }
}

SpatialTransform SpatialTransform::identity(const FrameId& frame) {
  return {Mat3::Identity(), Vec3::Zero(), frame, frame};
}

SpatialTransform SpatialTransform::pure_translation(const Vec3& t, FrameId from, FrameId to) {
  return {Mat3::Identity(), t, std::move(from), std::move(to)};
}

SpatialTransform SpatialTransform::inverse() const {
  const Mat3 rt = rotation_.transpose();
  return {rt, -rt * translation_, to_, from_};
}

Mat6 SpatialTransform::adjoint_matrix() const {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = rotation_;
  ad.topRightCorner<3, 3>() = skew(translation_) * rotation_;
  ad.bottomRightCorner<3, 3>() = rotation_;
  return ad;
}

Mat6 SpatialTransform::coadjoint_matrix() const {
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = rotation_;
  ad.bottomLeftCorner<3, 3>() = skew(translation_) * rotation_;
  ad.bottomRightCorner<3, 3>() = rotation_;
  return ad;
}

SpatialTransform SpatialTransform::relabel(FrameId from, FrameId to) const {
  return {rotation_, translation_, std::move(from), std::move(to)};
}

SpatialTransform compose(const SpatialTransform& outer, const SpatialTransform& inner) {
  require_frame(inner.to_frame(), outer.from_frame(), "compose");
  // Project back onto SO(3) once accumulated drift exceeds 1e-12.
  Mat3 r = outer.rotation() * inner.rotation();
  if ((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-12) {
    Eigen::JacobiSVD<Mat3> svd(r, Eigen::ComputeFullU | Eigen::ComputeFullV);
    r = svd.matrixU() * svd.matrixV().transpose();
  }
  return {r, outer.rotation() * inner.translation() + outer.translation(), inner.from_frame(),
          outer.to_frame()};
}

Vec6 Twist::vector() const {
  Vec6 v;
  v << linear, angular;
  return v;
}

Twist Twist::from_vector(const Vec6& v, FrameId frame) {
  return {v.head<3>(), v.tail<3>(), std::move(frame)};
}

Vec6 Wrench::vector() const {
  Vec6 w;
  w << force, moment;
  return w;
}

Wrench Wrench::from_vector(const Vec6& w, FrameId frame) {
  return {w.head<3>(), w.tail<3>(), std::move(frame)};
}

double power(const Wrench& w, const Twist& v) {
  require_frame(v.frame, w.frame, "power");
  return w.force.dot(v.linear) + w.moment.dot(v.angular);
}

SpatialInertia::SpatialInertia(double mass, const Vec3& com, const Mat3& inertia_about_com, FrameId frame)
    : mass_(mass), com_(com), inertia_(inertia_about_com), frame_(std::move(frame)) {
  if (!(mass_ > 0.0) || !std::isfinite(mass_)) {
    throw InvalidModel("SpatialInertia: mass must be positive");
  }
  if (!com_.allFinite() || !inertia_.allFinite()) {
    throw InvalidModel("SpatialInertia: non-finite entries");
  }
  const double scale = std::max(inertia_.cwiseAbs().maxCoeff(), 1e-300);
  if ((inertia_ - inertia_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw InvalidModel("SpatialInertia: rotational inertia is not symmetric");
  }
  inertia_ = 0.5 * (inertia_ + inertia_.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Mat3> eig(inertia_);
  const Vec3 pm = eig.eigenvalues();
  if (!(pm.minCoeff() > 0.0)) {
    throw InvalidModel("SpatialInertia: rotational inertia is not positive definite");
  }
  const double slack = 1e-10 * pm.sum();
  if (pm(0) + pm(1) < pm(2) - slack || pm(0) + pm(2) < pm(1) - slack || pm(1) + pm(2) < pm(0) - slack) {
    throw InvalidModel("SpatialInertia: principal moments violate the triangle inequality");
  }
}

Mat3 SpatialInertia::rotational_inertia_about_origin() const {
  const Mat3 c = skew(com_);
  return inertia_ - mass_ * c * c;
}

Mat6 SpatialInertia::matrix() const {
  const Mat3 c = skew(com_);
  Mat6 m;
  m.topLeftCorner<3, 3>() = mass_ * Mat3::Identity();
  m.topRightCorner<3, 3>() = -mass_ * c;
  m.bottomLeftCorner<3, 3>() = mass_ * c;
  m.bottomRightCorner<3, 3>() = inertia_ - mass_ * c * c;
  return m;
}

double SpatialInertia::kinetic_energy(const Twist& v) const {
  require_frame(v.frame, frame_, "kinetic_energy");
  const Vec6 x = v.vector();
  return 0.5 * x.dot(matrix() * x);
}

Twist adjoint_twist(const SpatialTransform& t, const Twist& v) {
  require_frame(v.frame, t.from_frame(), "adjoint_twist");
  const Vec3 w = t.rotation() * v.angular;
  return {t.rotation() * v.linear + t.translation().cross(w), w, t.to_frame()};
}

Wrench coadjoint_wrench(const SpatialTransform& t, const Wrench& w) {
  require_frame(w.frame, t.from_frame(), "coadjoint_wrench");
  const Vec3 f = t.rotation() * w.force;
  return {f, t.translation().cross(f) + t.rotation() * w.moment, t.to_frame()};
}

SpatialInertia transform_inertia(const SpatialTransform& t, const SpatialInertia& inertia) {
  require_frame(inertia.frame(), t.from_frame(), "transform_inertia");
  const Mat3& r = t.rotation();
  return {inertia.mass(), t.apply_point(inertia.com_offset()), r * inertia.rotational_inertia() * r.transpose(),
          t.to_frame()};
}

}  // namespace impact
