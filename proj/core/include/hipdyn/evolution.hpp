#pragma once

#include <optional>

#include "hipdyn/pictures.hpp"

namespace hipdyn {

/// Integrator selection. RK4_fixed advances with a fixed step (clipped so
/// sample times are hit exactly); DP54_adaptive uses the Dormand-Prince 5(4)
/// embedded pair with a mixed absolute/relative error test in the max norm.
struct IntegratorSpec {
    enum class Method { RK4_fixed, DP54_adaptive };

    Method method = Method::RK4_fixed;
    double step = 1e-3;        ///< RK4_fixed step size
    double rtol = 1e-10;       ///< DP54 relative tolerance
    double atol = 1e-12;       ///< DP54 absolute tolerance
    std::size_t max_steps = 2'000'000;

    static IntegratorSpec rk4(double step, std::size_t max_steps = 2'000'000);
    static IntegratorSpec dp54(double rtol = 1e-10, double atol = 1e-12,
                               std::size_t max_steps = 200'000);

    void validate() const;
};

/// Ket history on the requested sample times. physical_norms carries the
/// picture's metric-weighted norm at each sample; expectations is indexed
/// [observable][sample]. dual_kets is present when the companion dual
/// evolution was requested. max_local_error reports the worst accepted local
/// error estimate in adaptive mode (zero for fixed-step runs).
struct StateTrajectory {
    std::vector<double> times;
    std::vector<std::vector<Complex>> kets;
    std::optional<std::vector<std::vector<Complex>>> dual_kets;
    std::vector<double> physical_norms;
    std::vector<std::vector<Complex>> expectations;
    double max_local_error = 0.0;
};

/// Operator history on the requested sample times.
struct OperatorTrajectory {
    std::vector<double> times;
    std::vector<CMatrix> matrices;
    double max_local_error = 0.0;
};

/// Expectation value together with the recorded gap between the two ways of
/// pairing states: metric-inserted bra pairing versus an independently
/// evolved dual ket. The gap is zero when no dual trajectory is available.
struct Expectation {
    Complex value{};
    double dual_form_gap = 0.0;
};

/// Integrate i d(psi)/dt = G_tag(t) psi from sample_times.front() through
/// sample_times.back(); psi0 is the state at the first sample time.
/// sample_times must be strictly increasing and lie inside the model window.
/// observables are reference (Hermitized-frame) operators whose transported
/// expectation values are recorded per sample. with_dual additionally
/// integrates the companion dual ket (adjoint generator), seeded with
/// Theta2(t0) psi0.
StateTrajectory evolve_ket(const PictureModel& model, PictureTag tag,
                           const std::vector<Complex>& psi0, const IntegratorSpec& spec,
                           const std::vector<double>& sample_times,
                           const std::vector<CMatrix>& observables = {}, bool with_dual = false);

/// Heisenberg-type transport of an observable image:
///   SP_textbook        i dA/dt = [A, K] with K = Omega H Omega^-1
///   NSP/NIP_auxiliary  i dA/dt = [A, K] with K = Sigma, seeded with the
///                      auxiliary image Omega^-1 A_ref Omega at t0
///   HIP pictures       same with K = Sigma2 and the hybrid image
OperatorTrajectory evolve_observable(const PictureModel& model, PictureTag tag,
                                     const CMatrix& a_ref, const IntegratorSpec& spec,
                                     const std::vector<double>& sample_times);

/// Pair a bra trajectory with a ket trajectory at sample time t (both must
/// have sampled exactly that t, else MissingSample) through the picture's
/// pairing rule for reference observable a_ref.
Expectation expectation(const PictureModel& model, PictureTag tag, const StateTrajectory& bra,
                        const CMatrix& a_ref, const StateTrajectory& ket, double t);

/// Propagator U(t1, t0) of the picture generator, integrated column by
/// column from basis kets.
CMatrix propagator(const PictureModel& model, PictureTag tag, const IntegratorSpec& spec,
                   double t0, double t1);

/// Same integrators applied to an arbitrary generator. Exposed so operator
/// families that are not attached to a PictureModel (for instance published
/// closed-form variants) can be propagated for conditioning studies.
std::vector<std::vector<Complex>> evolve_generator(const TimeMatrixFn& gen,
                                                   const std::vector<Complex>& y0,
                                                   const IntegratorSpec& spec,
                                                   const std::vector<double>& sample_times,
                                                   double* max_local_error = nullptr);

CMatrix propagator_of_generator(const TimeMatrixFn& gen, const IntegratorSpec& spec, double t0,
                                double t1);

/// U(t_k, t0) for every sample time in one pass per basis column.
std::vector<CMatrix> propagator_series(const TimeMatrixFn& gen, const IntegratorSpec& spec,
                                       const std::vector<double>& sample_times);

} // namespace hipdyn
