#include "hipdyn/cmatrix.hpp"

#include <array>
#include <cmath>

// Scaling-and-squaring matrix exponential with diagonal Pade approximants of
// orders 3/5/7/9/13 and the standard order-selection thresholds.

namespace hipdyn {

namespace {

double one_norm(const CMatrix& m) {
    const std::size_t n = m.dim();
    double best = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += std::abs(m(i, j));
        best = std::max(best, s);
    }
    return best;
}

// Solve q X = p by Gaussian elimination with partial pivoting.
CMatrix solve(CMatrix q, CMatrix p) {
    const std::size_t n = q.dim();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(q(col, col));
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(q(r, col));
            if (v > best) { best = v; piv = r; }
        }
        if (best == 0.0) throw SingularMatrix("expm: Pade denominator singular");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(q(piv, j), q(col, j));
                std::swap(p(piv, j), p(col, j));
            }
        const Complex d = q(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            q(col, j) /= d;
            p(col, j) /= d;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const Complex f = q(r, col);
            if (f == Complex{}) continue;
            for (std::size_t j = 0; j < n; ++j) {
                q(r, j) -= f * q(col, j);
                p(r, j) -= f * p(col, j);
            }
        }
    }
    return p;
}

// Pade numerator/denominator split: U = A * (odd part), V = even part.
// exp(A) ~ (V - U)^{-1} (V + U).
CMatrix pade_low(const CMatrix& a, const double* b, int m) {
    const std::size_t n = a.dim();
    const CMatrix id = CMatrix::identity(n);
    const CMatrix a2 = a * a;
    std::vector<CMatrix> pows; // even powers: I, A^2, A^4, ...
    pows.push_back(id);
    pows.push_back(a2);
    for (int k = 4; k <= m - 1; k += 2) pows.push_back(pows.back() * a2);

    CMatrix u = CMatrix::zero(n), v = CMatrix::zero(n);
    for (int k = 0; 2 * k + 1 <= m; ++k) u += Complex{b[2 * k + 1], 0.0} * pows[k];
    u = a * u;
    for (int k = 0; 2 * k <= m; ++k) v += Complex{b[2 * k], 0.0} * pows[k];
    return solve(v - u, v + u);
}

CMatrix pade13(const CMatrix& a) {
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
        1187353796428800.0, 129060195264000.0, 10559470521600.0,
        670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
        960960.0, 16380.0, 182.0, 1.0};
    const std::size_t n = a.dim();
    const CMatrix id = CMatrix::identity(n);
    const CMatrix a2 = a * a;
    const CMatrix a4 = a2 * a2;
    const CMatrix a6 = a4 * a2;
    CMatrix u = a6 * (Complex{b[13], 0} * a6 + Complex{b[11], 0} * a4 + Complex{b[9], 0} * a2) +
                Complex{b[7], 0} * a6 + Complex{b[5], 0} * a4 + Complex{b[3], 0} * a2 +
                Complex{b[1], 0} * id;
    u = a * u;
    CMatrix v = a6 * (Complex{b[12], 0} * a6 + Complex{b[10], 0} * a4 + Complex{b[8], 0} * a2) +
                Complex{b[6], 0} * a6 + Complex{b[4], 0} * a4 + Complex{b[2], 0} * a2 +
                Complex{b[0], 0} * id;
    return solve(v - u, v + u);
}

} // namespace

CMatrix expm(const CMatrix& m) {
    static constexpr double theta3 = 1.495585217958292e-2;
    static constexpr double theta5 = 2.539398330063230e-1;
    static constexpr double theta7 = 9.504178996162932e-1;
    static constexpr double theta9 = 2.097847961257068e0;
    static constexpr double theta13 = 5.371920351148152e0;
    static constexpr double b3[] = {120, 60, 12, 1};
    static constexpr double b5[] = {30240, 15120, 3360, 420, 30, 1};
    static constexpr double b7[] = {17297280, 8648640, 1995840, 277200, 25200, 1512, 56, 1};
    static constexpr double b9[] = {17643225600.0, 8821612800.0, 2075673600.0, 302702400.0,
                                    30270240.0, 2162160.0, 110880.0, 3960.0, 90.0, 1.0};

    const double nrm = one_norm(m);
    if (nrm <= theta3) return pade_low(m, b3, 3);
    if (nrm <= theta5) return pade_low(m, b5, 5);
    if (nrm <= theta7) return pade_low(m, b7, 7);
    if (nrm <= theta9) return pade_low(m, b9, 9);

    int s = 0;
    double scaled = nrm;
    while (scaled > theta13) {
        scaled *= 0.5;
        ++s;
    }
    CMatrix a = m;
    a *= Complex{std::ldexp(1.0, -s), 0.0};
    CMatrix e = pade13(a);
    for (int k = 0; k < s; ++k) e = e * e;
    return e;
}

} // namespace hipdyn
