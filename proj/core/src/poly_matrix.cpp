#include "hipdyn/poly_matrix.hpp"

#include <algorithm>

namespace hipdyn {

namespace {

void require_same_dim(const PolyMatrix& a, const PolyMatrix& b, const char* what) {
    if (a.dim() != b.dim())
        throw DimMismatch(std::string(what) + ": dimensions " + std::to_string(a.dim()) +
                          " and " + std::to_string(b.dim()));
}

} // namespace

PolyMatrix PolyMatrix::identity(std::size_t dim) {
    PolyMatrix m(dim);
    for (std::size_t i = 0; i < dim; ++i) m(i, i) = CPoly(1.0);
    return m;
}

PolyMatrix PolyMatrix::constant(const CMatrix& c) {
    PolyMatrix m(c.dim());
    for (std::size_t i = 0; i < c.dim(); ++i)
        for (std::size_t j = 0; j < c.dim(); ++j) m(i, j) = CPoly(c(i, j));
    return m;
}

PolyMatrix PolyMatrix::from_rows(std::initializer_list<std::initializer_list<CPoly>> rows) {
    const std::size_t n = rows.size();
    PolyMatrix m(n);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n) throw DimMismatch("from_rows: ragged row");
        std::size_t j = 0;
        for (const CPoly& p : row) m(i, j++) = p;
        ++i;
    }
    return m;
}

CMatrix PolyMatrix::eval(double t) const {
    CMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j).eval(t);
    return m;
}

PolyMatrix PolyMatrix::derivative() const {
    PolyMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j).derivative();
    return m;
}

PolyMatrix PolyMatrix::conj_transpose() const {
    PolyMatrix m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(j, i).conjugated();
    return m;
}

int PolyMatrix::max_degree() const {
    int d = -1;
    for (const CPoly& p : e_) d = std::max(d, p.degree());
    return d;
}

PolyMatrix operator+(const PolyMatrix& a, const PolyMatrix& b) {
    require_same_dim(a, b, "PolyMatrix operator+");
    PolyMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) + b(i, j);
    return r;
}

PolyMatrix operator-(const PolyMatrix& a, const PolyMatrix& b) {
    require_same_dim(a, b, "PolyMatrix operator-");
    PolyMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = a(i, j) - b(i, j);
    return r;
}

PolyMatrix operator*(const PolyMatrix& a, const PolyMatrix& b) {
    require_same_dim(a, b, "PolyMatrix operator*");
    const std::size_t n = a.dim();
    PolyMatrix r(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            CPoly acc;
            for (std::size_t k = 0; k < n; ++k) acc += a(i, k) * b(k, j);
            r(i, j) = acc;
        }
    return r;
}

PolyMatrix operator*(const CPoly& s, const PolyMatrix& a) {
    PolyMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
    return r;
}

PolyMatrix operator*(Complex s, const PolyMatrix& a) {
    PolyMatrix r(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j) r(i, j) = s * a(i, j);
    return r;
}

PolyMatrix compose(const PolyMatrix& m, const CPoly& q) {
    PolyMatrix r(m.dim());
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = 0; j < m.dim(); ++j) r(i, j) = compose(m(i, j), q);
    return r;
}

namespace {

CPoly det_rec(const PolyMatrix& m, std::vector<std::size_t>& cols, std::size_t row) {
    if (cols.size() == 1) return m(row, cols[0]);
    CPoly acc;
    for (std::size_t k = 0; k < cols.size(); ++k) {
        const std::size_t c = cols[k];
        if (m(row, c).is_zero()) continue;
        std::vector<std::size_t> rest;
        rest.reserve(cols.size() - 1);
        for (std::size_t j = 0; j < cols.size(); ++j)
            if (j != k) rest.push_back(cols[j]);
        CPoly sub = m(row, c) * det_rec(m, rest, row + 1);
        if (k % 2 == 0)
            acc += sub;
        else
            acc -= sub;
    }
    return acc;
}

} // namespace

CPoly det_poly(const PolyMatrix& m) {
    if (m.dim() == 0) return CPoly(1.0);
    std::vector<std::size_t> cols(m.dim());
    for (std::size_t j = 0; j < m.dim(); ++j) cols[j] = j;
    return det_rec(m, cols, 0);
}

PolyMatrix poly_inverse_2x2(const PolyMatrix& m) {
    if (m.dim() != 2) throw DimMismatch("poly_inverse_2x2: dimension must be 2");
    const CPoly det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
    if (det.degree() != 0)
        throw NonConstantDeterminant("poly_inverse_2x2: determinant degree " +
                                     std::to_string(det.degree()));
    const Complex d = det.coefficient(0);
    const Complex inv_d = 1.0 / d;
    PolyMatrix r(2);
    r(0, 0) = inv_d * m(1, 1);
    r(0, 1) = (-inv_d) * m(0, 1);
    r(1, 0) = (-inv_d) * m(1, 0);
    r(1, 1) = inv_d * m(0, 0);
    return r;
}

double max_coeff_dist(const PolyMatrix& a, const PolyMatrix& b) {
    if (a.dim() != b.dim()) throw DimMismatch("max_coeff_dist: dimension mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i)
        for (std::size_t j = 0; j < a.dim(); ++j)
            d = std::max(d, max_coeff_dist(a(i, j), b(i, j)));
    return d;
}

} // namespace hipdyn
