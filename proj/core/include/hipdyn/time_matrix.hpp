#pragma once

#include <functional>
#include <memory>

#include "hipdyn/poly_matrix.hpp"

namespace hipdyn {

/// Time-dependent matrix in one of two modes.
///
/// Exact mode wraps a PolyMatrix: evaluation, differentiation, products,
/// and (where the determinant allows) inversion stay closed-form, so chains
/// of such objects keep coefficient-level accuracy.
///
/// Sampled mode wraps an arbitrary callable t -> CMatrix. Derivatives fall
/// back to central differences with step h = 1e-6 * max(1, |t|) unless a
/// fixed step was supplied.
///
/// Combinators return Exact results whenever every operand is Exact and the
/// operation is closed over polynomials; otherwise they capture the operands
/// inside a Sampled closure.
class TimeMatrixFn {
  public:
    using Fn = std::function<CMatrix(double)>;

    TimeMatrixFn() = default;

    static TimeMatrixFn exact(PolyMatrix p);
    static TimeMatrixFn constant(const CMatrix& m) { return exact(PolyMatrix::constant(m)); }
    /// fixed_step = 0 selects the default finite-difference step rule.
    static TimeMatrixFn sampled(Fn fn, std::size_t dim, double fixed_step = 0.0);

    bool is_exact() const { return poly_ != nullptr; }
    /// Exact mode only.
    const PolyMatrix& poly() const;

    std::size_t dim() const { return dim_; }

    CMatrix operator()(double t) const;

    /// Exact derivative in Exact mode; central-difference closure otherwise.
    TimeMatrixFn derivative() const;

    /// Finite-difference step at time t (Sampled mode rule).
    double fd_step(double t) const;

  private:
    std::size_t dim_ = 0;
    std::shared_ptr<const PolyMatrix> poly_; // set iff exact
    Fn fn_;                                  // set iff sampled
    double fixed_step_ = 0.0;
};

TimeMatrixFn operator+(const TimeMatrixFn& a, const TimeMatrixFn& b);
TimeMatrixFn operator-(const TimeMatrixFn& a, const TimeMatrixFn& b);
TimeMatrixFn operator*(const TimeMatrixFn& a, const TimeMatrixFn& b);
TimeMatrixFn operator*(Complex s, const TimeMatrixFn& a);

TimeMatrixFn conj_transpose(const TimeMatrixFn& f);

/// Pointwise inverse. Stays exact for constant matrices of any dimension and
/// for 2x2 polynomial matrices with constant nonzero determinant; otherwise
/// inverts numerically at each evaluation time.
TimeMatrixFn inverse_fn(const TimeMatrixFn& f);

/// Central-difference derivative of f at t, using f's step rule. This is the
/// numerical probe; TimeMatrixFn::derivative() is the structural one.
CMatrix fd_derivative(const TimeMatrixFn& f, double t);

} // namespace hipdyn
