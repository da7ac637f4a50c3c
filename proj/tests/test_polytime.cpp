#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "hipdyn/time_matrix.hpp"

using namespace hipdyn;

namespace {

const CPoly kT = CPoly(std::vector<Complex>{Complex{0.0, 0.0}, Complex{1.0, 0.0}});

CPoly s_poly(double a, double b) {
    return CPoly(std::vector<Complex>{Complex{}, Complex{a, 0.0}, Complex{b / 2.0, 0.0}});
}

PolyMatrix omega2_of(const CPoly& s) {
    PolyMatrix m = PolyMatrix::identity(2);
    m(1, 0) = s;
    return m;
}

PolyMatrix omega1_of(double r) {
    PolyMatrix m = PolyMatrix::identity(2);
    m(0, 1) = CPoly(r);
    return m;
}

CPoly random_dyadic(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> num(-32, 32);
    std::vector<Complex> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (Complex& v : c) v = Complex{num(rng) / 64.0, num(rng) / 64.0};
    return CPoly(std::move(c));
}

} // namespace

TEST_CASE("CPoly canonical form and evaluation") {
    CHECK(CPoly().degree() == -1);
    CHECK(CPoly(std::vector<Complex>{Complex{}, Complex{}}).degree() == -1);
    CHECK(CPoly(2.5).degree() == 0);

    // s(t) at a=1, b=2, t=1 -> 1*1 + 2*1/2 = 2
    CHECK(s_poly(1.0, 2.0).eval(1.0) == Complex{2.0, 0.0});

    const CPoly p(std::vector<Complex>{Complex{1, 0}, Complex{0, 1}, Complex{-2, 0}});
    CHECK(p.eval(0.5) == Complex{1.0 - 0.5, 0.5});
}

TEST_CASE("CPoly derivative") {
    CHECK(CPoly(7.0).derivative().degree() == -1);

    // d/dt (a t + b t^2/2) = a + b t
    const CPoly ds = s_poly(1.0, 0.5).derivative();
    CHECK(ds.coefficient(0) == Complex{1.0, 0.0});
    CHECK(ds.coefficient(1) == Complex{0.5, 0.0});
    CHECK(ds.degree() == 1);

    const CPoly t2 = kT * kT;
    const CPoly d = t2.derivative();
    CHECK(d.coefficient(1) == Complex{2.0, 0.0});
    CHECK(d.degree() == 1);
}

TEST_CASE("CPoly arithmetic and composition") {
    const CPoly p = s_poly(1.0, 2.0);           // t + t^2
    const CPoly q(std::vector<Complex>{Complex{1, 0}, Complex{2, 0}}); // 1 + 2t
    const CPoly prod = p * q;
    for (double t : {0.0, 0.3, 1.7})
        CHECK(std::abs(prod.eval(t) - p.eval(t) * q.eval(t)) <= 1e-14);

    const CPoly comp = compose(p, q); // p(q(t))
    for (double t : {0.0, 0.4, 2.0})
        CHECK(std::abs(comp.eval(t) - p.eval(q.eval(t).real())) <= 1e-12);

    const CPoly z = p - p;
    CHECK(z.degree() == -1);

    const CPoly c = (kI * CPoly(1.0)).conjugated();
    CHECK(c.coefficient(0) == Complex{0.0, -1.0});
}

TEST_CASE("poly_eval reference values") {
    // Theta2 expressed in the drive variable, composed with s(t) at a=1, b=0:
    // s(0) = 0 so the metric collapses to the identity.
    PolyMatrix theta2_in_s(2);
    const CPoly s = kT; // stand-in variable
    theta2_in_s(0, 0) = CPoly(1.0) + s * s;
    theta2_in_s(0, 1) = s;
    theta2_in_s(1, 0) = s;
    theta2_in_s(1, 1) = CPoly(1.0);
    const PolyMatrix theta2_t = compose(theta2_in_s, s_poly(1.0, 0.0));
    CHECK(max_abs(theta2_t.eval(0.0) - CMatrix::identity(2)) == 0.0);

    // eval+mul consistency on the same object
    const CMatrix at_half = theta2_t.eval(0.5);
    CHECK(std::abs(at_half(0, 0) - Complex{1.25, 0.0}) <= 1e-15);
    CHECK(std::abs(at_half(0, 1) - Complex{0.5, 0.0}) <= 1e-15);
}

TEST_CASE("PolyMatrix derivative") {
    const PolyMatrix c = PolyMatrix::constant(CMatrix::identity(3));
    CHECK(c.derivative().max_degree() == -1);

    PolyMatrix t2i(2);
    t2i(0, 0) = kT * kT;
    t2i(1, 1) = kT * kT;
    const PolyMatrix d = t2i.derivative();
    CHECK(d(0, 0).coefficient(1) == Complex{2.0, 0.0});
    CHECK(d(0, 1).degree() == -1);
}

TEST_CASE("PolyMatrix products") {
    std::mt19937_64 rng(3);
    PolyMatrix a(2);
    for (std::size_t i = 0; i < 2; ++i)
        for (std::size_t j = 0; j < 2; ++j) a(i, j) = random_dyadic(rng, 3);

    const PolyMatrix ai = a * PolyMatrix::identity(2);
    CHECK(max_coeff_dist(ai, a) == 0.0);

    // toy factor product: Omega2 * Omega1 = [[1, r], [s, s r + 1]]
    const double r = 0.75;
    const CPoly s = s_poly(1.0, 0.5);
    const PolyMatrix omega = omega2_of(s) * omega1_of(r);
    CHECK(max_coeff_dist(omega(0, 0), CPoly(1.0)) == 0.0);
    CHECK(max_coeff_dist(omega(0, 1), CPoly(r)) == 0.0);
    CHECK(max_coeff_dist(omega(1, 0), s) == 0.0);
    CHECK(max_coeff_dist(omega(1, 1), CPoly(r) * s + CPoly(1.0)) == 0.0);

    PolyMatrix ti(2);
    ti(0, 0) = kT;
    ti(1, 1) = kT;
    const PolyMatrix t2 = ti * ti;
    CHECK(t2(0, 0).coefficient(2) == Complex{1.0, 0.0});
    CHECK(t2(0, 0).degree() == 2);

    CHECK_THROWS_AS((void)(PolyMatrix::identity(2) * PolyMatrix::identity(3)), DimMismatch);
    CHECK_THROWS_AS((void)(PolyMatrix::identity(2) + PolyMatrix::identity(3)), DimMismatch);
}

TEST_CASE("eval of a product equals product of evals") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + trial % 3;
        PolyMatrix a(n), b(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                std::vector<Complex> ca(4), cb(4);
                for (auto& v : ca) v = Complex{u(rng), u(rng)};
                for (auto& v : cb) v = Complex{u(rng), u(rng)};
                a(i, j) = CPoly(ca);
                b(i, j) = CPoly(cb);
            }
        const PolyMatrix ab = a * b;
        for (double t : {0.25, 0.75, 1.0}) {
            const CMatrix lhs = ab.eval(t);
            const CMatrix rhs = a.eval(t) * b.eval(t);
            const double scale = std::max(fro_norm(lhs), 1.0);
            CHECK(fro_norm(lhs - rhs) / scale <= 1e-12);
        }
    }
}

TEST_CASE("Leibniz rule holds coefficientwise, exactly") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 50; ++trial) {
        const CPoly p = random_dyadic(rng, 3);
        const CPoly q = random_dyadic(rng, 3);
        const CPoly lhs = (p * q).derivative();
        const CPoly rhs = p.derivative() * q + p * q.derivative();
        CHECK(max_coeff_dist(lhs, rhs) == 0.0);
    }
}

TEST_CASE("poly_inverse_2x2 reference values") {
    const PolyMatrix id = PolyMatrix::identity(2);
    CHECK(max_coeff_dist(poly_inverse_2x2(id), id) == 0.0);

    const CPoly s = s_poly(1.0, 0.5);
    const PolyMatrix o2 = omega2_of(s);
    const PolyMatrix inv = poly_inverse_2x2(o2);
    CHECK(max_coeff_dist(inv(1, 0), Complex{-1.0, 0.0} * s) == 0.0);
    CHECK(max_coeff_dist(inv(0, 0), CPoly(1.0)) == 0.0);
    CHECK(max_coeff_dist(o2 * inv, id) == 0.0);

    PolyMatrix bad(2);
    bad(0, 0) = kT;
    bad(1, 1) = CPoly(1.0);
    CHECK_THROWS_AS((void)poly_inverse_2x2(bad), NonConstantDeterminant);
}

TEST_CASE("unit-determinant inverses are exact polynomials") {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        PolyMatrix l = PolyMatrix::identity(2);
        l(1, 0) = random_dyadic(rng, 2);
        PolyMatrix u = PolyMatrix::identity(2);
        u(0, 1) = random_dyadic(rng, 2);
        const PolyMatrix m = l * u;
        CHECK(max_coeff_dist(m * poly_inverse_2x2(m), PolyMatrix::identity(2)) == 0.0);
    }
}

TEST_CASE("det_poly") {
    const CPoly s = s_poly(1.0, 0.5);
    const PolyMatrix omega = omega2_of(s) * omega1_of(0.75);
    CHECK(max_coeff_dist(det_poly(omega), CPoly(1.0)) == 0.0);

    PolyMatrix d(2);
    d(0, 0) = kT;
    d(1, 1) = kT;
    const CPoly det = det_poly(d);
    CHECK(det.degree() == 2);
    CHECK(det.coefficient(2) == Complex{1.0, 0.0});
}

TEST_CASE("TimeMatrixFn exactness bookkeeping") {
    const TimeMatrixFn f = TimeMatrixFn::exact(omega2_of(s_poly(1.0, 0.0)));
    CHECK(f.is_exact());
    CHECK(f.dim() == 2);

    const TimeMatrixFn g = TimeMatrixFn::sampled(
        [](double t) {
            CMatrix m = CMatrix::identity(2);
            m(0, 1) = std::sin(t);
            return m;
        },
        2);
    CHECK(!g.is_exact());
    CHECK_THROWS_AS((void)g.poly(), InvalidArgument);

    CHECK((f * g)(0.3).dim() == 2);
    CHECK(!(f * g).is_exact());
    CHECK((f * f).is_exact());
    CHECK((f + f).is_exact());
    CHECK((kI * f).is_exact());
}

TEST_CASE("fd_derivative reference values") {
    const TimeMatrixFn c = TimeMatrixFn::constant(CMatrix::identity(2));
    const TimeMatrixFn cs = TimeMatrixFn::sampled([](double) { return CMatrix::identity(2); }, 2);
    CHECK(max_abs(fd_derivative(cs, 0.5)) <= 1e-12);
    CHECK(max_abs(fd_derivative(c, 0.5)) <= 1e-12);

    // sampled wrapper of the second map factor vs the exact derivative
    const PolyMatrix o2 = omega2_of(s_poly(1.0, 0.5));
    const TimeMatrixFn exact = TimeMatrixFn::exact(o2);
    const TimeMatrixFn sampled =
        TimeMatrixFn::sampled([o2](double t) { return o2.eval(t); }, 2, 1e-5);
    const CMatrix want = o2.derivative().eval(0.3);
    CHECK(max_abs(fd_derivative(sampled, 0.3) - want) <= 1e-8);

    // f(t) = t^2 I at t=1: central difference is exact for quadratics
    const TimeMatrixFn sq = TimeMatrixFn::sampled(
        [](double t) {
            CMatrix m(2);
            m(0, 0) = t * t;
            m(1, 1) = t * t;
            return m;
        },
        2);
    CMatrix two(2);
    two(0, 0) = 2.0;
    two(1, 1) = 2.0;
    CHECK(max_abs(fd_derivative(sq, 1.0) - two) <= 1e-9);
}

TEST_CASE("derivative of a sampled fn uses the recorded step") {
    const TimeMatrixFn sq = TimeMatrixFn::sampled(
        [](double t) {
            CMatrix m(1);
            m(0, 0) = t * t * t;
            return m;
        },
        1, 1e-6);
    const TimeMatrixFn d = sq.derivative();
    CHECK(std::abs(d(2.0)(0, 0) - Complex{12.0, 0.0}) <= 1e-6);
}

TEST_CASE("inverse_fn modes") {
    // constant: exact at any dimension
    CMatrix c = CMatrix::identity(3);
    c(0, 1) = 0.5;
    const TimeMatrixFn inv_c = inverse_fn(TimeMatrixFn::constant(c));
    CHECK(inv_c.is_exact());
    CHECK(max_abs(c * inv_c(0.7) - CMatrix::identity(3)) <= 1e-15);

    // 2x2 with constant determinant: exact polynomial adjugate
    const TimeMatrixFn o2 = TimeMatrixFn::exact(omega2_of(s_poly(1.0, 0.5)));
    const TimeMatrixFn inv = inverse_fn(o2);
    CHECK(inv.is_exact());
    CHECK(max_abs(o2(0.9) * inv(0.9) - CMatrix::identity(2)) <= 1e-15);

    // non-constant determinant falls back to pointwise numerics
    PolyMatrix grow(2);
    grow(0, 0) = CPoly(1.0) + kT;
    grow(1, 1) = CPoly(1.0);
    const TimeMatrixFn invg = inverse_fn(TimeMatrixFn::exact(grow));
    CHECK(!invg.is_exact());
    CHECK(max_abs(grow.eval(0.5) * invg(0.5) - CMatrix::identity(2)) <= 1e-14);
}
