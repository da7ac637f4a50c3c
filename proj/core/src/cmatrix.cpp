#include "hipdyn/cmatrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace hipdyn {

namespace {

void require_same_dim(const CMatrix& a, const CMatrix& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimMismatch(std::string(what) + ": dimensions " + std::to_string(a.dim()) +
                          " and " + std::to_string(b.dim()));
}

// Shared singularity threshold for pivoted eliminations.
constexpr double kPivotRel = 1e-13;

} // namespace

CMatrix CMatrix::identity(std::size_t dim) {
    CMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = 1.0;
    return m;
}

CMatrix CMatrix::from_rows(std::initializer_list<std::initializer_list<Complex>> rows) {
    const std::size_t n = rows.size();
    CMatrix m(n);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n) throw DimMismatch("from_rows: ragged row");
        std::size_t j = 0;
        for (const Complex& v : row) m(i, j++) = v;
        ++i;
    }
    return m;
}

bool CMatrix::all_finite() const {
    for (const Complex& v : a_)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    return true;
}

CMatrix& CMatrix::operator+=(const CMatrix& rhs) {
    require_same_dim(*this, rhs, "operator+=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] += rhs.a_[k];
    return *this;
}

CMatrix& CMatrix::operator-=(const CMatrix& rhs) {
    require_same_dim(*this, rhs, "operator-=");
    for (std::size_t k = 0; k < a_.size(); ++k) a_[k] -= rhs.a_[k];
    return *this;
}

CMatrix& CMatrix::operator*=(Complex s) {
    for (Complex& v : a_) v *= s;
    return *this;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    CMatrix r = a;
    r += b;
    return r;
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    CMatrix r = a;
    r -= b;
    return r;
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    require_same_dim(a, b, "operator*");
    const std::size_t n = a.dim();
    CMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < n; ++k) {
            const Complex aik = a(i, k);
            if (aik == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

CMatrix operator*(Complex s, const CMatrix& a) {
    CMatrix r = a;
    r *= s;
    return r;
}

std::vector<Complex> operator*(const CMatrix& a, const std::vector<Complex>& v) {
    if (v.size() != a.dim()) throw DimMismatch("matrix-vector product: size mismatch");
    const std::size_t n = a.dim();
    std::vector<Complex> r(n);
    for (std::size_t i = 0; i < n; ++i) {
        Complex acc{};
        for (std::size_t j = 0; j < n; ++j) acc += a(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

CMatrix conj_transpose(const CMatrix& m) {
    const std::size_t n = m.dim();
    CMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) r(i, j) = std::conj(m(j, i));
    return r;
}

Complex trace(const CMatrix& m) {
    Complex t{};
    for (std::size_t i = 0; i < m.dim(); ++i) t += m(i, i);
    return t;
}

Complex determinant(const CMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 0) return 1.0;
    CMatrix a = m;
    Complex det = 1.0;
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) return Complex{};
        if (piv != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(a(piv, j), a(col, j));
            det = -det;
        }
        det *= a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const Complex f = a(r, col) / a(col, col);
            if (f == Complex{}) continue;
            for (std::size_t j = col; j < n; ++j) a(r, j) -= f * a(col, j);
        }
    }
    return det;
}

CMatrix inverse(const CMatrix& m) {
    const std::size_t n = m.dim();
    const double scale = max_abs(m);
    const double threshold = kPivotRel * scale;
    CMatrix a = m;
    CMatrix inv = CMatrix::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(a(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(a(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best < threshold || best == 0.0)
            throw SingularMatrix("inverse: pivot " + std::to_string(col) + " below threshold");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        const Complex d = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= d;
            inv(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = a(r, col);
            if (f == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                a(r, j) -= f * a(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

double fro_norm(const CMatrix& m) {
    double s = 0.0;
    for (const Complex& v : m.data()) s += std::norm(v);
    return std::sqrt(s);
}

double max_abs(const CMatrix& m) {
    double s = 0.0;
    for (const Complex& v : m.data()) s = std::max(s, std::abs(v));
    return s;
}

double op_norm_estimate(const CMatrix& m) {
    const std::size_t n = m.dim();
    if (n == 0) return 0.0;
    const CMatrix mh = conj_transpose(m);
    // Deterministic start with non-uniform phases so it is very unlikely to
    // be orthogonal to the dominant singular direction.
    std::vector<Complex> v(n);
    for (std::size_t k = 0; k < n; ++k)
        v[k] = Complex{1.0 + 0.01 * static_cast<double>(k), 0.001 * static_cast<double>(k + 1)};
    auto normalize = [](std::vector<Complex>& x) {
        double s = 0.0;
        for (const Complex& c : x) s += std::norm(c);
        s = std::sqrt(s);
        if (s > 0.0)
            for (Complex& c : x) c /= s;
        return s;
    };
    normalize(v);
    double lambda = 0.0;
    for (int iter = 0; iter < 1000; ++iter) {
        std::vector<Complex> w = mh * (m * v);
        const double nw = normalize(w);
        if (nw == 0.0) return 0.0; // m annihilates the iterate: norm 0 matrix
        const double prev = lambda;
        lambda = nw;
        v = std::move(w);
        if (iter > 0 && std::abs(lambda - prev) <= 1e-6 * lambda) break;
    }
    return std::sqrt(lambda);
}

double hermiticity_residual(const CMatrix& m) {
    return fro_norm(m - conj_transpose(m));
}

Positivity is_positive_definite(const CMatrix& m) {
    const std::size_t n = m.dim();
    const double h = hermiticity_residual(m);
    if (h > 1e-10 * std::max(1.0, fro_norm(m)))
        throw HermitianityViolated("is_positive_definite: input not Hermitian, residual " +
                                   std::to_string(h));
    // Work on the Hermitian average so the factorization sees an exactly
    // Hermitian operand.
    CMatrix a(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));

    CMatrix l(n);
    Positivity result;
    result.positive = true;
    result.min_pivot = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j).real();
        for (std::size_t k = 0; k < j; ++k) d -= std::norm(l(j, k));
        if (d < result.min_pivot) {
            result.min_pivot = d;
            result.fail_index = j;
        }
        if (!(d > 0.0)) {
            result.positive = false;
            result.fail_index = j;
            result.min_pivot = d;
            return result;
        }
        const double lj = std::sqrt(d);
        l(j, j) = lj;
        for (std::size_t i = j + 1; i < n; ++i) {
            Complex s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * std::conj(l(j, k));
            l(i, j) = s / lj;
        }
    }
    return result;
}

} // namespace hipdyn
