#pragma once

#include <string>

#include "hipdyn/time_matrix.hpp"

namespace hipdyn {

/// The five representations a simulation can run in.
///
///   SP_textbook    textbook picture with the Hermitized Hamiltonian
///                  Omega H Omega^-1 acting on mapped states
///   NSP_auxiliary  auxiliary-space picture with a stationary map; the
///                  generator formula H - Sigma reduces to H because the
///                  connection of a constant map vanishes
///   NIP_auxiliary  auxiliary interaction picture: generator H - Sigma,
///                  with Sigma = i Omega^-1 d(Omega)/dt
///   HIP_Kphysical  hybrid picture after peeling off the first map factor:
///                  generator H1 - Sigma2 acting on kets
///   HIP_dual       companion evolution of dual kets under the adjoint of
///                  the hybrid generator
enum class PictureTag {
    SP_textbook,
    NSP_auxiliary,
    NIP_auxiliary,
    HIP_Kphysical,
    HIP_dual,
};

std::string to_string(PictureTag tag);
PictureTag parse_picture_tag(const std::string& name);

/// Factorized time-dependent similarity map Omega(t) = Omega2(t) * Omega1(t).
/// Both factors must be square, nonsingular on the working window, and of
/// equal dimension.
struct DysonFactorization {
    TimeMatrixFn omega1;
    TimeMatrixFn omega2;

    DysonFactorization() = default;
    DysonFactorization(TimeMatrixFn o1, TimeMatrixFn o2);

    std::size_t dim() const { return omega1.dim(); }
};

/// Omega2 * Omega1.
TimeMatrixFn full_dyson(const DysonFactorization& d);

/// Metric induced by a map factor: Omega^H Omega. Hermitian at every t by
/// construction.
TimeMatrixFn metric_of(const TimeMatrixFn& omega);

/// Coriolis-type connection i * Omega^-1 * d(Omega)/dt.
TimeMatrixFn coriolis(const TimeMatrixFn& omega);

/// Omega2 * Omega1 * Omega2^-1, the first factor transported by the second.
TimeMatrixFn omega21(const DysonFactorization& d);

/// A dynamical model: a factorized map, an auxiliary-space Hamiltonian H(t),
/// and a working time window. Derived operators (metrics, connections,
/// generators) are exposed as TimeMatrixFn formula objects; evaluation
/// happens per time with no cross-time caching.
///
/// Construction probes the compatibility residual |H^H Theta - Theta H| on a
/// small grid and records the worst relative value; it does not enforce it.
class PictureModel {
  public:
    PictureModel(DysonFactorization dyson, TimeMatrixFn hamiltonian, double t_min, double t_max);

    std::size_t dim() const { return dyson_.dim(); }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }

    const DysonFactorization& dyson() const { return dyson_; }
    /// Auxiliary-space Hamiltonian H(t).
    const TimeMatrixFn& hamiltonian() const { return h_; }

    /// Omega = Omega2 * Omega1.
    const TimeMatrixFn& omega() const { return omega_; }
    /// Theta = Omega^H Omega.
    const TimeMatrixFn& theta() const { return theta_; }
    /// Theta2 = Omega2^H Omega2.
    const TimeMatrixFn& theta2() const { return theta2_; }
    /// Sigma = i Omega^-1 d(Omega)/dt.
    const TimeMatrixFn& sigma() const { return sigma_; }
    /// Sigma2 = i Omega2^-1 d(Omega2)/dt.
    const TimeMatrixFn& sigma2() const { return sigma2_; }
    /// H1 = Omega1 H Omega1^-1.
    const TimeMatrixFn& h1() const { return h1_; }

    /// Worst relative compatibility residual seen on the construction probe
    /// grid. Recorded, not enforced.
    double quasi_hermiticity_residual() const { return qh_residual_; }

  private:
    DysonFactorization dyson_;
    TimeMatrixFn h_;
    double t_min_, t_max_;
    TimeMatrixFn omega_, theta_, theta2_, sigma_, sigma2_, h1_;
    double qh_residual_ = 0.0;
};

/// Evolution generator for a picture:
///   SP_textbook    Omega H Omega^-1
///   NSP_auxiliary  H - Sigma   (identical to NIP_auxiliary by convention)
///   NIP_auxiliary  H - Sigma
///   HIP_Kphysical  H1 - Sigma2
///   HIP_dual       (H1 - Sigma2)^H
TimeMatrixFn generator(const PictureModel& model, PictureTag tag);

/// First-factor transported Hamiltonian H1 = Omega1 H Omega1^-1.
TimeMatrixFn hamiltonian_h1(const PictureModel& model);

/// Metric weighting physical inner products in each picture: identity for
/// SP_textbook, Theta for the auxiliary pictures, Theta2 for HIP_Kphysical,
/// Theta2^-1 for HIP_dual (so dual kets carry the same physical norm as the
/// kets they shadow).
TimeMatrixFn metric_for(const PictureModel& model, PictureTag tag);

/// Auxiliary-space image of a reference observable: Omega^-1 A Omega.
/// A must be Hermitian within 1e-10 (relative Frobenius), else NotHermitian.
TimeMatrixFn observable_tilde(const PictureModel& model, const CMatrix& a_ref);

/// Hybrid-space image of a reference observable: Omega2^-1 A Omega2.
/// Same Hermiticity precondition as observable_tilde.
TimeMatrixFn observable_hip(const PictureModel& model, const CMatrix& a_ref);

} // namespace hipdyn
