/**
 * @file iim.hpp
 * @brief Inverse inertia matrix candidates at the contact point.
 *
 * All matrices are 3x3 and act on impulses expressed in the contact frame
 * (see chain_dynamics.hpp). "Upper-left block" always means the
 * translational block under the [v; w] layout.
 *
 *  gm        UL(J M^-1 J^T)                       joint-space projection
 *  em        UL((J M^-1 J^T)^-1)                  operational-space mass
 *  crb       I/m - R^T [t]x I^-1 [t]x R           locked joints, CRB at the COM
 *  crb_flex  crb + UL(J_cp M^-1 J_Op^T)           locked joints plus relative motion
 */
#pragma once

#include <string>

#include "impact/chain.hpp"

namespace impact {

enum class IimMethod { gm, em, crb, crb_flex };

const char* to_string(IimMethod method);
IimMethod iim_method_from_string(const std::string& text);

struct InverseInertiaMatrix {
  Mat3 w = Mat3::Zero();
  IimMethod method = IimMethod::gm;
  FrameId frame = kContactFrame;

  /// n^T W n along a unit direction in the same frame.
  double along(const Vec3& n) const { return n.dot(w * n); }
  bool is_symmetric(double tol = 1e-10) const;
  bool is_positive_definite() const;
};

InverseInertiaMatrix iim_gm(const ChainModel& model, const Eigen::VectorXd& q);

struct EmOptions {
  /// Fall back to the pseudo-inverse when J M^-1 J^T is rank deficient.
  bool allow_pseudo_inverse = false;
  /// Relative eigenvalue cutoff for declaring J M^-1 J^T singular.
  double rank_tolerance = 1e-10;
};

/// Upper-left block of the operational-space inertia (J M^-1 J^T)^-1.
/// Throws SingularOperationalInertia when rank deficient unless allowed.
Mat3 em_matrix(const ChainModel& model, const Eigen::VectorXd& q, const EmOptions& options = {});

/// p = (1 + e_r) m_em v_pre. Throws OutOfRange unless 0 <= e_r <= 1.
Vec3 algebraic_impulse(const ChainModel& model, const Eigen::VectorXd& q, const Vec3& v_pre, double e_r,
                       const EmOptions& options = {});

/// Closed form from total mass, CRB rotational inertia and the contact pose
/// relative to the centroidal frame.
InverseInertiaMatrix iim_crb(const ChainModel& model, const Eigen::VectorXd& q);

/// Same quantity via UL(Ad(c->p) I_G^-1 Ad(c->p)^T) on the full 6x6 CRB inertia.
InverseInertiaMatrix iim_crb_spatial(const ChainModel& model, const Eigen::VectorXd& q);

/// UL(J_cp M^-1 J_Op^T). Not symmetric in general.
Mat3 iim_flex_correction(const ChainModel& model, const Eigen::VectorXd& q);

InverseInertiaMatrix iim_crb_flex(const ChainModel& model, const Eigen::VectorXd& q);

InverseInertiaMatrix compute_iim(IimMethod method, const ChainModel& model, const Eigen::VectorXd& q);

}  // namespace impact
