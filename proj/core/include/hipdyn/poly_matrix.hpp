#pragma once

#include <initializer_list>

#include "hipdyn/poly.hpp"

namespace hipdyn {

/// Square matrix with polynomial entries. Arithmetic stays exact at the
/// coefficient level, so operator identities can be checked coefficientwise
/// instead of through sampled evaluations.
class PolyMatrix {
  public:
    PolyMatrix() : dim_(0) {}
    explicit PolyMatrix(std::size_t dim) : dim_(dim), e_(dim * dim) {}

    static PolyMatrix identity(std::size_t dim);
    static PolyMatrix zero(std::size_t dim) { return PolyMatrix(dim); }
    /// Embeds a constant matrix as degree-0 polynomials.
    static PolyMatrix constant(const CMatrix& m);
    static PolyMatrix from_rows(std::initializer_list<std::initializer_list<CPoly>> rows);

    std::size_t dim() const { return dim_; }

    CPoly& operator()(std::size_t i, std::size_t j) { return e_[i * dim_ + j]; }
    const CPoly& operator()(std::size_t i, std::size_t j) const { return e_[i * dim_ + j]; }

    CMatrix eval(double t) const;
    PolyMatrix derivative() const;
    PolyMatrix conj_transpose() const;

    /// Largest entry degree; -1 for the zero matrix.
    int max_degree() const;

  private:
    std::size_t dim_;
    std::vector<CPoly> e_;
};

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b);
PolyMatrix operator*(const CPoly& s, const PolyMatrix& a);
PolyMatrix operator*(Complex s, const PolyMatrix& a);

/// Substitute t -> q(t) in every entry.
PolyMatrix compose(const PolyMatrix& m, const CPoly& q);

/// det as a polynomial (Leibniz over permutations; intended for small dims).
CPoly det_poly(const PolyMatrix& m);

/// Exact inverse of a 2x2 polynomial matrix whose determinant is a nonzero
/// constant: adjugate divided by that constant. Any other determinant raises
/// NonConstantDeterminant.
PolyMatrix poly_inverse_2x2(const PolyMatrix& m);

/// Largest coefficientwise distance over all entries.
double max_coeff_dist(const PolyMatrix& a, const PolyMatrix& b);

} // namespace hipdyn
