#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <vector>

#include "hipdyn/errors.hpp"

namespace hipdyn {

using Complex = std::complex<double>;

inline constexpr Complex kI{0.0, 1.0};

/// Dense square complex matrix, row major. Dimensions are fixed at
/// construction; all binary operations require matching dimensions.
class CMatrix {
  public:
    CMatrix() : dim_(0) {}
    explicit CMatrix(std::size_t dim) : dim_(dim), a_(dim * dim) {}

    static CMatrix identity(std::size_t dim);
    static CMatrix zero(std::size_t dim) { return CMatrix(dim); }
    /// Row-by-row construction; every row must have the same length.
    static CMatrix from_rows(std::initializer_list<std::initializer_list<Complex>> rows);

    std::size_t dim() const { return dim_; }

    Complex& operator()(std::size_t i, std::size_t j) { return a_[i * dim_ + j]; }
    const Complex& operator()(std::size_t i, std::size_t j) const { return a_[i * dim_ + j]; }

    const std::vector<Complex>& data() const { return a_; }

    bool all_finite() const;

    CMatrix& operator+=(const CMatrix& rhs);
    CMatrix& operator-=(const CMatrix& rhs);
    CMatrix& operator*=(Complex s);

  private:
    std::size_t dim_;
    std::vector<Complex> a_;
};

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(Complex s, const CMatrix& a);
std::vector<Complex> operator*(const CMatrix& a, const std::vector<Complex>& v);

/// Adjoint (conjugate transpose).
CMatrix conj_transpose(const CMatrix& m);

Complex trace(const CMatrix& m);

/// Determinant by LU with partial pivoting.
Complex determinant(const CMatrix& m);

/// Gauss-Jordan inverse with partial pivoting. A pivot of magnitude below
/// 1e-13 * max|entry| raises SingularMatrix.
CMatrix inverse(const CMatrix& m);

double fro_norm(const CMatrix& m);
double max_abs(const CMatrix& m);

/// Largest singular value estimated by power iteration on m^H m to 1e-6
/// relative accuracy. Deterministic start vector.
double op_norm_estimate(const CMatrix& m);

/// Frobenius norm of m - m^H; zero iff m is Hermitian.
double hermiticity_residual(const CMatrix& m);

/// Eigenvalues sorted lexicographically by (Re, Im).
struct Spectrum {
    std::vector<Complex> eigenvalues;
};

/// Full eigenvalue set. Closed form for dim <= 2; otherwise Householder
/// reduction to Hessenberg form followed by shifted QR iteration with a cap
/// of 100 * dim sweeps (NoConvergence beyond that). A triangular input
/// short-circuits to its diagonal, returned exactly.
Spectrum eigenvalues(const CMatrix& m);

/// Result of the Cholesky-style positivity probe. min_pivot is the smallest
/// diagonal pivot encountered; on failure fail_index names the offending row.
struct Positivity {
    bool positive = false;
    double min_pivot = 0.0;
    std::size_t fail_index = 0;
};

/// Cholesky factorization attempt. The input must be Hermitian within 1e-10
/// (Frobenius, relative); otherwise HermitianityViolated is raised.
Positivity is_positive_definite(const CMatrix& m);

/// Matrix exponential via scaling-and-squaring with diagonal Pade
/// approximants. Relative accuracy about 1e-12 for norms up to about 10.
CMatrix expm(const CMatrix& m);

} // namespace hipdyn
