#include "hipdyn/time_matrix.hpp"

#include <cmath>
#include <utility>

namespace hipdyn {

namespace {

void require_same_dim(const TimeMatrixFn& a, const TimeMatrixFn& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimMismatch(std::string(what) + ": dimensions " + std::to_string(a.dim()) +
                          " and " + std::to_string(b.dim()));
}

} // namespace

TimeMatrixFn TimeMatrixFn::exact(PolyMatrix p) {
    TimeMatrixFn f;
    f.dim_ = p.dim();
    f.poly_ = std::make_shared<const PolyMatrix>(std::move(p));
    return f;
}

TimeMatrixFn TimeMatrixFn::sampled(Fn fn, std::size_t dim, double fixed_step) {
    TimeMatrixFn f;
    f.dim_ = dim;
    f.fn_ = std::move(fn);
    f.fixed_step_ = fixed_step;
    return f;
}

const PolyMatrix& TimeMatrixFn::poly() const {
    if (!poly_) throw InvalidArgument("TimeMatrixFn::poly: not in exact mode");
    return *poly_;
}

CMatrix TimeMatrixFn::operator()(double t) const {
    if (poly_) return poly_->eval(t);
    if (!fn_) throw InvalidArgument("TimeMatrixFn: empty");
    return fn_(t);
}

TimeMatrixFn TimeMatrixFn::derivative() const {
    if (poly_) return exact(poly_->derivative());
    TimeMatrixFn base = *this;
    return sampled([base](double t) { return fd_derivative(base, t); }, dim_, fixed_step_);
}

double TimeMatrixFn::fd_step(double t) const {
    if (fixed_step_ > 0.0) return fixed_step_;
    return 1e-6 * std::max(1.0, std::abs(t));
}

TimeMatrixFn operator+(const TimeMatrixFn& a, const TimeMatrixFn& b) {
    require_same_dim(a, b, "TimeMatrixFn operator+");
    if (a.is_exact() && b.is_exact()) return TimeMatrixFn::exact(a.poly() + b.poly());
    return TimeMatrixFn::sampled([a, b](double t) { return a(t) + b(t); }, a.dim());
}

TimeMatrixFn operator-(const TimeMatrixFn& a, const TimeMatrixFn& b) {
    require_same_dim(a, b, "TimeMatrixFn operator-");
    if (a.is_exact() && b.is_exact()) return TimeMatrixFn::exact(a.poly() - b.poly());
    return TimeMatrixFn::sampled([a, b](double t) { return a(t) - b(t); }, a.dim());
}

TimeMatrixFn operator*(const TimeMatrixFn& a, const TimeMatrixFn& b) {
    require_same_dim(a, b, "TimeMatrixFn operator*");
    if (a.is_exact() && b.is_exact()) return TimeMatrixFn::exact(a.poly() * b.poly());
    return TimeMatrixFn::sampled([a, b](double t) { return a(t) * b(t); }, a.dim());
}

TimeMatrixFn operator*(Complex s, const TimeMatrixFn& a) {
    if (a.is_exact()) return TimeMatrixFn::exact(s * a.poly());
    return TimeMatrixFn::sampled([s, a](double t) { return s * a(t); }, a.dim());
}

TimeMatrixFn conj_transpose(const TimeMatrixFn& f) {
    if (f.is_exact()) return TimeMatrixFn::exact(f.poly().conj_transpose());
    return TimeMatrixFn::sampled([f](double t) { return conj_transpose(f(t)); }, f.dim());
}

TimeMatrixFn inverse_fn(const TimeMatrixFn& f) {
    if (f.is_exact()) {
        const PolyMatrix& p = f.poly();
        if (p.max_degree() <= 0) {
            // Constant matrix: invert once, stay exact.
            return TimeMatrixFn::exact(PolyMatrix::constant(inverse(p.eval(0.0))));
        }
        if (p.dim() == 2) {
            const CPoly det = p(0, 0) * p(1, 1) - p(0, 1) * p(1, 0);
            if (det.degree() == 0) return TimeMatrixFn::exact(poly_inverse_2x2(p));
        }
    }
    return TimeMatrixFn::sampled([f](double t) { return inverse(f(t)); }, f.dim());
}

CMatrix fd_derivative(const TimeMatrixFn& f, double t) {
    const double h = f.fd_step(t);
    const CMatrix lo = f(t - h);
    const CMatrix hi = f(t + h);
    CMatrix r = hi - lo;
    r *= Complex{1.0 / (2.0 * h), 0.0};
    return r;
}

} // namespace hipdyn
