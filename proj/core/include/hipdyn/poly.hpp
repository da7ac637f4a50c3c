#pragma once

#include <vector>

#include "hipdyn/cmatrix.hpp"

namespace hipdyn {

/// Complex polynomial in one real variable, stored dense by ascending power.
/// Canonical form: trailing zero coefficients are trimmed, so the zero
/// polynomial has an empty coefficient vector and degree -1.
class CPoly {
  public:
    CPoly() = default;
    CPoly(double c0) : CPoly(Complex{c0, 0.0}) {}
    CPoly(Complex c0);
    explicit CPoly(std::vector<Complex> coeffs);

    /// -1 for the zero polynomial.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    /// Coefficient of t^k; zero beyond the stored degree.
    Complex coefficient(std::size_t k) const { return k < c_.size() ? c_[k] : Complex{}; }
    const std::vector<Complex>& coefficients() const { return c_; }

    /// Horner evaluation.
    Complex eval(double t) const;

    CPoly derivative() const;

    /// Entrywise complex conjugate of the coefficients. For real t this is
    /// the pointwise conjugate of the polynomial's values.
    CPoly conjugated() const;

    CPoly& operator+=(const CPoly& rhs);
    CPoly& operator-=(const CPoly& rhs);
    CPoly& operator*=(Complex s);

  private:
    void trim();
    std::vector<Complex> c_;
};

CPoly operator+(const CPoly& a, const CPoly& b);
CPoly operator-(const CPoly& a, const CPoly& b);
CPoly operator*(const CPoly& a, const CPoly& b);
CPoly operator*(Complex s, const CPoly& a);

/// p(q(t)) by Horner in the outer polynomial.
CPoly compose(const CPoly& p, const CPoly& q);

/// Largest coefficientwise distance, comparing up to the longer degree.
double max_coeff_dist(const CPoly& a, const CPoly& b);

} // namespace hipdyn
