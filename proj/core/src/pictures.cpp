#include "hipdyn/pictures.hpp"

#include <algorithm>
#include <cmath>

namespace hipdyn {

std::string to_string(PictureTag tag) {
    switch (tag) {
        case PictureTag::SP_textbook: return "SP_textbook";
        case PictureTag::NSP_auxiliary: return "NSP_auxiliary";
        case PictureTag::NIP_auxiliary: return "NIP_auxiliary";
        case PictureTag::HIP_Kphysical: return "HIP_Kphysical";
        case PictureTag::HIP_dual: return "HIP_dual";
    }
    throw InvalidArgument("to_string: unknown picture tag");
}

PictureTag parse_picture_tag(const std::string& name) {
    if (name == "SP_textbook") return PictureTag::SP_textbook;
    if (name == "NSP_auxiliary") return PictureTag::NSP_auxiliary;
    if (name == "NIP_auxiliary") return PictureTag::NIP_auxiliary;
    if (name == "HIP_Kphysical") return PictureTag::HIP_Kphysical;
    if (name == "HIP_dual") return PictureTag::HIP_dual;
    throw InvalidArgument("parse_picture_tag: unknown tag '" + name + "'");
}

DysonFactorization::DysonFactorization(TimeMatrixFn o1, TimeMatrixFn o2)
    : omega1(std::move(o1)), omega2(std::move(o2)) {
    if (omega1.dim() != omega2.dim())
        throw DimMismatch("DysonFactorization: factor dimensions disagree");
    if (omega1.dim() == 0) throw InvalidArgument("DysonFactorization: empty factors");
}

TimeMatrixFn full_dyson(const DysonFactorization& d) { return d.omega2 * d.omega1; }

TimeMatrixFn metric_of(const TimeMatrixFn& omega) { return conj_transpose(omega) * omega; }

TimeMatrixFn coriolis(const TimeMatrixFn& omega) {
    return kI * (inverse_fn(omega) * omega.derivative());
}

TimeMatrixFn omega21(const DysonFactorization& d) {
    return d.omega2 * d.omega1 * inverse_fn(d.omega2);
}

PictureModel::PictureModel(DysonFactorization dyson, TimeMatrixFn hamiltonian, double t_min,
                           double t_max)
    : dyson_(std::move(dyson)), h_(std::move(hamiltonian)), t_min_(t_min), t_max_(t_max) {
    if (h_.dim() != dyson_.dim())
        throw DimMismatch("PictureModel: Hamiltonian dimension disagrees with map factors");
    if (!(t_min_ < t_max_)) throw InvalidArgument("PictureModel: empty time window");

    omega_ = full_dyson(dyson_);
    theta_ = metric_of(omega_);
    theta2_ = metric_of(dyson_.omega2);
    sigma_ = coriolis(omega_);
    sigma2_ = coriolis(dyson_.omega2);
    h1_ = dyson_.omega1 * h_ * inverse_fn(dyson_.omega1);

    // Record (never enforce) the compatibility residual on a coarse probe
    // grid across the window.
    constexpr int kProbes = 5;
    double worst = 0.0;
    for (int k = 0; k < kProbes; ++k) {
        const double t = t_min_ + (t_max_ - t_min_) * k / double(kProbes - 1);
        const CMatrix h = h_(t);
        const CMatrix th = theta_(t);
        const CMatrix lhs = conj_transpose(h) * th;
        const CMatrix rhs = th * h;
        const double denom = std::max(fro_norm(rhs), 1e-300);
        worst = std::max(worst, fro_norm(lhs - rhs) / denom);
    }
    qh_residual_ = worst;
}

TimeMatrixFn generator(const PictureModel& model, PictureTag tag) {
    switch (tag) {
        case PictureTag::SP_textbook:
            return model.omega() * model.hamiltonian() * inverse_fn(model.omega());
        case PictureTag::NSP_auxiliary:
        case PictureTag::NIP_auxiliary:
            return model.hamiltonian() - model.sigma();
        case PictureTag::HIP_Kphysical:
            return model.h1() - model.sigma2();
        case PictureTag::HIP_dual:
            return conj_transpose(model.h1() - model.sigma2());
    }
    throw InvalidArgument("generator: unknown picture tag");
}

TimeMatrixFn hamiltonian_h1(const PictureModel& model) { return model.h1(); }

TimeMatrixFn metric_for(const PictureModel& model, PictureTag tag) {
    switch (tag) {
        case PictureTag::SP_textbook:
            return TimeMatrixFn::constant(CMatrix::identity(model.dim()));
        case PictureTag::NSP_auxiliary:
        case PictureTag::NIP_auxiliary:
            return model.theta();
        case PictureTag::HIP_Kphysical:
            return model.theta2();
        case PictureTag::HIP_dual:
            return inverse_fn(model.theta2());
    }
    throw InvalidArgument("metric_for: unknown picture tag");
}

namespace {

void require_hermitian_reference(const CMatrix& a, const char* what) {
    const double res = hermiticity_residual(a);
    if (res > 1e-10 * std::max(1.0, fro_norm(a)))
        throw NotHermitian(std::string(what) + ": reference observable not Hermitian, residual " +
                           std::to_string(res));
}

} // namespace

TimeMatrixFn observable_tilde(const PictureModel& model, const CMatrix& a_ref) {
    if (a_ref.dim() != model.dim()) throw DimMismatch("observable_tilde: dimension mismatch");
    require_hermitian_reference(a_ref, "observable_tilde");
    return inverse_fn(model.omega()) * TimeMatrixFn::constant(a_ref) * model.omega();
}

TimeMatrixFn observable_hip(const PictureModel& model, const CMatrix& a_ref) {
    if (a_ref.dim() != model.dim()) throw DimMismatch("observable_hip: dimension mismatch");
    require_hermitian_reference(a_ref, "observable_hip");
    return inverse_fn(model.dyson().omega2) * TimeMatrixFn::constant(a_ref) * model.dyson().omega2;
}

} // namespace hipdyn
