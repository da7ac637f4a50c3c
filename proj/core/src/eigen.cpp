#include "hipdyn/cmatrix.hpp"

#include <algorithm>
#include <cmath>

// Dense complex eigensolver: Householder reduction to upper Hessenberg form,
// then explicitly shifted QR iteration with Wilkinson shifts and deflation.
// Small and triangular cases short-circuit to closed forms.

namespace hipdyn {

namespace {

bool is_upper_triangular(const CMatrix& m) {
    for (std::size_t i = 1; i < m.dim(); ++i)
        for (std::size_t j = 0; j < i; ++j)
            if (m(i, j) != Complex{}) return false;
    return true;
}

bool is_lower_triangular(const CMatrix& m) {
    for (std::size_t i = 0; i < m.dim(); ++i)
        for (std::size_t j = i + 1; j < m.dim(); ++j)
            if (m(i, j) != Complex{}) return false;
    return true;
}

// Roots of z^2 - (a+d) z + (ad - bc), evaluated with the numerically stable
// branch: the larger root by the sign-adjusted quadratic formula, the other
// from the product of roots.
void quadratic_eigen(Complex a, Complex b, Complex c, Complex d, Complex& l0, Complex& l1) {
    const Complex tr = a + d;
    const Complex det = a * d - b * c;
    const Complex half = 0.5 * tr;
    Complex disc = std::sqrt(half * half - det);
    // Align the discriminant with half so the addition does not cancel.
    if (std::real(std::conj(half) * disc) < 0.0) disc = -disc;
    const Complex big = half + disc;
    if (big == Complex{}) {
        l0 = Complex{};
        l1 = tr; // both roots; tr == 0 here unless det == 0
        return;
    }
    l0 = big;
    l1 = det / big;
}

struct LexLess {
    bool operator()(const Complex& x, const Complex& y) const {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    }
};

// Complex Givens rotation zeroing g: [c, s; -conj(s), c] with real c.
void make_givens(Complex f, Complex g, double& c, Complex& s) {
    if (g == Complex{}) {
        c = 1.0;
        s = Complex{};
        return;
    }
    if (f == Complex{}) {
        c = 0.0;
        s = std::conj(g) / std::abs(g);
        return;
    }
    const double af = std::abs(f), ag = std::abs(g);
    const double d = std::hypot(af, ag);
    c = af / d;
    s = (f / af) * std::conj(g) / d;
}

// Wilkinson shift: eigenvalue of the trailing 2x2 closest to its (1,1) entry.
Complex wilkinson_shift(const CMatrix& h, std::size_t hi) {
    const Complex a = h(hi - 1, hi - 1), b = h(hi - 1, hi);
    const Complex c = h(hi, hi - 1), d = h(hi, hi);
    Complex l0, l1;
    quadratic_eigen(a, b, c, d, l0, l1);
    return (std::abs(l0 - d) < std::abs(l1 - d)) ? l0 : l1;
}

void hessenberg_reduce(CMatrix& a) {
    const std::size_t n = a.dim();
    if (n < 3) return;
    for (std::size_t k = 0; k + 2 < n; ++k) {
        // Householder vector for column k below the subdiagonal.
        double colnorm = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) colnorm += std::norm(a(i, k));
        colnorm = std::sqrt(colnorm);
        if (colnorm == 0.0) continue;
        const Complex x0 = a(k + 1, k);
        const Complex phase = (x0 == Complex{}) ? Complex{1.0, 0.0} : x0 / std::abs(x0);
        const Complex alpha = -phase * colnorm;
        std::vector<Complex> v(n, Complex{});
        v[k + 1] = x0 - alpha;
        for (std::size_t i = k + 2; i < n; ++i) v[i] = a(i, k);
        double vnorm2 = 0.0;
        for (std::size_t i = k + 1; i < n; ++i) vnorm2 += std::norm(v[i]);
        if (vnorm2 == 0.0) continue;
        // A <- P A P with P = I - 2 v v^H / (v^H v).
        for (std::size_t j = 0; j < n; ++j) {
            Complex dot{};
            for (std::size_t i = k + 1; i < n; ++i) dot += std::conj(v[i]) * a(i, j);
            dot *= 2.0 / vnorm2;
            for (std::size_t i = k + 1; i < n; ++i) a(i, j) -= dot * v[i];
        }
        for (std::size_t i = 0; i < n; ++i) {
            Complex dot{};
            for (std::size_t j = k + 1; j < n; ++j) dot += a(i, j) * v[j];
            dot *= 2.0 / vnorm2;
            for (std::size_t j = k + 1; j < n; ++j) a(i, j) -= dot * std::conj(v[j]);
        }
        a(k + 1, k) = alpha;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = Complex{};
    }
}

} // namespace

Spectrum eigenvalues(const CMatrix& m) {
    const std::size_t n = m.dim();
    Spectrum sp;
    sp.eigenvalues.reserve(n);
    if (n == 0) return sp;

    // Triangular inputs: the diagonal is the spectrum, returned exactly.
    if (is_upper_triangular(m) || is_lower_triangular(m)) {
        for (std::size_t i = 0; i < n; ++i) sp.eigenvalues.push_back(m(i, i));
        std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), LexLess{});
        return sp;
    }

    if (n == 1) {
        sp.eigenvalues.push_back(m(0, 0));
        return sp;
    }
    if (n == 2) {
        Complex l0, l1;
        quadratic_eigen(m(0, 0), m(0, 1), m(1, 0), m(1, 1), l0, l1);
        sp.eigenvalues = {l0, l1};
        std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), LexLess{});
        return sp;
    }

    CMatrix h = m;
    hessenberg_reduce(h);

    const std::size_t max_sweeps = 100 * n;
    std::size_t sweeps = 0;
    std::size_t hi = n - 1;
    std::size_t stuck = 0; // sweeps spent on the current trailing block

    const double scale = max_abs(h) + 1e-300;

    while (true) {
        // Deflate negligible subdiagonals.
        for (std::size_t i = 0; i + 1 <= hi; ++i) {
            const double off = std::abs(h(i + 1, i));
            const double diag = std::abs(h(i, i)) + std::abs(h(i + 1, i + 1));
            if (off <= 1e-16 * diag || off <= 1e-30 * scale) h(i + 1, i) = Complex{};
        }
        // Shrink the active block from the bottom.
        while (hi > 0 && h(hi, hi - 1) == Complex{}) {
            --hi;
            stuck = 0;
        }
        if (hi == 0) break;
        std::size_t lo = hi;
        while (lo > 0 && h(lo, lo - 1) != Complex{}) --lo;

        if (hi - lo == 1) {
            // 2x2 block: closed form, then deflate.
            Complex l0, l1;
            quadratic_eigen(h(lo, lo), h(lo, hi), h(hi, lo), h(hi, hi), l0, l1);
            h(lo, lo) = l0;
            h(hi, hi) = l1;
            h(hi, lo) = Complex{};
            continue;
        }

        if (++sweeps > max_sweeps)
            throw NoConvergence("eigenvalues: QR iteration cap exceeded");

        Complex mu = wilkinson_shift(h, hi);
        if (++stuck % 16 == 0) {
            // Exceptional shift to break rare limit cycles.
            mu = h(hi, hi) + Complex{std::abs(h(hi, hi - 1)), 0.0};
        }

        // Explicit shifted QR sweep on the active block:
        // H - mu I = Q R (Givens), then H <- R Q + mu I.
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) -= mu;
        std::vector<double> cs(hi - lo);
        std::vector<Complex> sn(hi - lo);
        for (std::size_t i = lo; i < hi; ++i) {
            double c;
            Complex s;
            make_givens(h(i, i), h(i + 1, i), c, s);
            cs[i - lo] = c;
            sn[i - lo] = s;
            for (std::size_t j = i; j <= hi; ++j) {
                const Complex t0 = h(i, j), t1 = h(i + 1, j);
                h(i, j) = c * t0 + s * t1;
                h(i + 1, j) = -std::conj(s) * t0 + c * t1;
            }
        }
        for (std::size_t i = lo; i < hi; ++i) {
            const double c = cs[i - lo];
            const Complex s = sn[i - lo];
            const std::size_t jmax = std::min(hi, i + 2);
            for (std::size_t r = lo; r <= jmax; ++r) {
                const Complex t0 = h(r, i), t1 = h(r, i + 1);
                h(r, i) = c * t0 + std::conj(s) * t1;
                h(r, i + 1) = -s * t0 + c * t1;
            }
        }
        for (std::size_t i = lo; i <= hi; ++i) h(i, i) += mu;
    }

    for (std::size_t i = 0; i < n; ++i) sp.eigenvalues.push_back(h(i, i));
    std::sort(sp.eigenvalues.begin(), sp.eigenvalues.end(), LexLess{});
    return sp;
}

} // namespace hipdyn
