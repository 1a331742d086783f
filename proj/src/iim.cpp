#include "impact/iim.hpp"

#include <cmath>

#include "impact/chain_dynamics.hpp"

namespace impact {

namespace {

/// M^-1 B via Cholesky; throws SingularInertia if M is not positive definite.
Eigen::MatrixXd solve_joint_inertia(const Eigen::MatrixXd& m, const Eigen::MatrixXd& b) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw SingularInertia("joint-space inertia is not positive definite");
  }
  const Eigen::VectorXd diag = llt.matrixL().toDenseMatrix().diagonal();
  if (diag.minCoeff() <= 1e-12 * diag.maxCoeff()) {
    throw SingularInertia("joint-space inertia is numerically singular");
  }
  return llt.solve(b);
}

Mat6 operational_inverse_inertia(const ChainModel& model, const Eigen::VectorXd& q) {
  const Matrix6X j = body_jacobian(model, q, ContactTarget{});
  const Eigen::MatrixXd minv_jt = solve_joint_inertia(joint_space_inertia(model, q), j.transpose());
  const Mat6 a = j * minv_jt;
  return 0.5 * (a + a.transpose());
}

}  // namespace

const char* to_string(IimMethod method) {
  switch (method) {
    case IimMethod::gm:
      return "gm";
    case IimMethod::em:
      return "em";
    case IimMethod::crb:
      return "crb";
    case IimMethod::crb_flex:
      return "crb_flex";
  }
  return "unknown";
}

IimMethod iim_method_from_string(const std::string& text) {
  if (text == "gm") return IimMethod::gm;
  if (text == "em") return IimMethod::em;
  if (text == "crb") return IimMethod::crb;
  if (text == "crb_flex") return IimMethod::crb_flex;
  throw InputError("unknown IIM method '" + text + "' (expected gm, em, crb or crb_flex)");
}

bool InverseInertiaMatrix::is_symmetric(double tol) const {
  return (w - w.transpose()).cwiseAbs().maxCoeff() <= tol * std::max(1.0, w.cwiseAbs().maxCoeff());
}

bool InverseInertiaMatrix::is_positive_definite() const {
  Eigen::LLT<Mat3> llt(0.5 * (w + w.transpose()));
  return llt.info() == Eigen::Success && is_symmetric();
}

InverseInertiaMatrix iim_gm(const ChainModel& model, const Eigen::VectorXd& q) {
  const Mat6 a = operational_inverse_inertia(model, q);
  return {a.topLeftCorner<3, 3>(), IimMethod::gm, kContactFrame};
}

Mat3 em_matrix(const ChainModel& model, const Eigen::VectorXd& q, const EmOptions& options) {
  const Mat6 a = operational_inverse_inertia(model, q);
  Eigen::SelfAdjointEigenSolver<Mat6> eig(a);
  const auto& ev = eig.eigenvalues();
  const double cutoff = options.rank_tolerance * std::max(ev.maxCoeff(), 1e-300);
  const bool deficient = ev.minCoeff() <= cutoff;
  if (deficient && !options.allow_pseudo_inverse) {
    throw SingularOperationalInertia("J M^-1 J^T is rank deficient (" + std::to_string(model.dof()) +
                                     " joints); em_matrix needs a full-rank 6x6 operational inertia");
  }
  Vec6 inv_ev = Vec6::Zero();
  for (int i = 0; i < 6; ++i) {
    inv_ev(i) = ev(i) > cutoff ? 1.0 / ev(i) : 0.0;
  }
  const Mat6 lambda = eig.eigenvectors() * inv_ev.asDiagonal() * eig.eigenvectors().transpose();
  return lambda.topLeftCorner<3, 3>();
}

Vec3 algebraic_impulse(const ChainModel& model, const Eigen::VectorXd& q, const Vec3& v_pre, double e_r,
                       const EmOptions& options) {
  if (!(e_r >= 0.0 && e_r <= 1.0)) {
    throw OutOfRange("coefficient of restitution must lie in [0, 1]");
  }
  return (1.0 + e_r) * em_matrix(model, q, options) * v_pre;
}

InverseInertiaMatrix iim_crb(const ChainModel& model, const Eigen::VectorXd& q) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.dof());
  const CentroidalState cs = centroidal_state(model, q, zero);
  // Pose of the contact frame in the centroidal frame.
  const SpatialTransform contact_in_c = centroidal_to_contact(model, q).inverse();
  const Mat3& r = contact_in_c.rotation();
  const Mat3 t = skew(contact_in_c.translation());
  const Mat3 rot_inertia = cs.crb_inertia.bottomRightCorner<3, 3>();
  const Mat3 w = Mat3::Identity() / cs.total_mass - r.transpose() * t * rot_inertia.inverse() * t * r;
  return {w, IimMethod::crb, kContactFrame};
}

InverseInertiaMatrix iim_crb_spatial(const ChainModel& model, const Eigen::VectorXd& q) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(model.dof());
  const CentroidalState cs = centroidal_state(model, q, zero);
  const Mat6 ad = centroidal_to_contact(model, q).adjoint_matrix();
  const Mat6 w = ad * cs.crb_inertia.ldlt().solve(ad.transpose());
  return {w.topLeftCorner<3, 3>(), IimMethod::crb, kContactFrame};
}

Mat3 iim_flex_correction(const ChainModel& model, const Eigen::VectorXd& q) {
  const Matrix6X j_op = body_jacobian(model, q, ContactTarget{});
  const Matrix6X j_cp = relative_contact_jacobian(model, q);
  const Eigen::MatrixXd minv_jt = solve_joint_inertia(joint_space_inertia(model, q), j_op.transpose());
  const Mat6 block = j_cp * minv_jt;
  return block.topLeftCorner<3, 3>();
}

InverseInertiaMatrix iim_crb_flex(const ChainModel& model, const Eigen::VectorXd& q) {
  InverseInertiaMatrix out = iim_crb(model, q);
  out.w += iim_flex_correction(model, q);
  out.method = IimMethod::crb_flex;
  return out;
}

InverseInertiaMatrix compute_iim(IimMethod method, const ChainModel& model, const Eigen::VectorXd& q) {
  switch (method) {
    case IimMethod::gm:
      return iim_gm(model, q);
    case IimMethod::em: {
      const Mat3 m = em_matrix(model, q);
      Eigen::LLT<Mat3> llt(m);
      if (llt.info() != Eigen::Success) {
        throw SingularOperationalInertia("em_matrix is not positive definite");
      }
      return {llt.solve(Mat3::Identity()), IimMethod::em, kContactFrame};
    }
    case IimMethod::crb:
      return iim_crb(model, q);
    case IimMethod::crb_flex:
      return iim_crb_flex(model, q);
  }
  throw InputError("unknown IIM method");
}

}  // namespace impact
