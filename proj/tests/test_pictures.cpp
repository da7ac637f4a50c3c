#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "hipdyn/toy_model.hpp"

using namespace hipdyn;

namespace {

const CPoly kT = CPoly(std::vector<Complex>{Complex{0.0, 0.0}, Complex{1.0, 0.0}});

ToyParams params(double r, double a, double b) {
    ToyParams p;
    p.r = r;
    p.a = a;
    p.b = b;
    return p;
}

double rel(const CMatrix& lhs, const CMatrix& rhs) {
    const double d = fro_norm(lhs - rhs);
    const double s = std::max(fro_norm(lhs), fro_norm(rhs));
    return s > 1e-12 ? d / s : d;
}

PictureModel collapsed_model(const CMatrix& h) {
    DysonFactorization d(TimeMatrixFn::constant(CMatrix::identity(h.dim())),
                         TimeMatrixFn::constant(CMatrix::identity(h.dim())));
    return PictureModel(std::move(d), TimeMatrixFn::constant(h), 0.0, 1.0);
}

} // namespace

TEST_CASE("picture tags round-trip") {
    for (PictureTag tag : {PictureTag::SP_textbook, PictureTag::NSP_auxiliary,
                           PictureTag::NIP_auxiliary, PictureTag::HIP_Kphysical,
                           PictureTag::HIP_dual})
        CHECK(parse_picture_tag(to_string(tag)) == tag);
    CHECK_THROWS_AS((void)parse_picture_tag("bogus"), InvalidArgument);
}

TEST_CASE("full_dyson") {
    const ToyParams p = params(0.75, 1.0, 0.5);
    const DysonFactorization d = toy_dyson(p);

    // Omega1 = I collapses the product to Omega2
    DysonFactorization trivial(TimeMatrixFn::constant(CMatrix::identity(2)), d.omega2);
    CHECK(max_coeff_dist(full_dyson(trivial).poly(), d.omega2.poly()) == 0.0);

    // toy factors: [[1, r], [s, s r + 1]]
    const PolyMatrix omega = full_dyson(d).poly();
    const CPoly s = toy_s(p);
    CHECK(max_coeff_dist(omega(0, 0), CPoly(1.0)) == 0.0);
    CHECK(max_coeff_dist(omega(0, 1), CPoly(p.r)) == 0.0);
    CHECK(max_coeff_dist(omega(1, 0), s) == 0.0);
    CHECK(max_coeff_dist(omega(1, 1), CPoly(p.r) * s + CPoly(1.0)) == 0.0);

    DysonFactorization both(TimeMatrixFn::constant(CMatrix::identity(2)),
                            TimeMatrixFn::constant(CMatrix::identity(2)));
    CHECK(max_abs(full_dyson(both)(0.5) - CMatrix::identity(2)) == 0.0);

    CHECK_THROWS_AS(DysonFactorization(TimeMatrixFn::constant(CMatrix::identity(2)),
                                       TimeMatrixFn::constant(CMatrix::identity(3))),
                    DimMismatch);
}

TEST_CASE("metric_of") {
    CHECK(max_abs(metric_of(TimeMatrixFn::constant(CMatrix::identity(2)))(0.3) -
                  CMatrix::identity(2)) == 0.0);

    // toy second factor: Theta2 = [[1 + s^2, s], [s, 1]]
    const ToyParams p = params(0.5, 1.0, 0.5);
    const CPoly s = toy_s(p);
    const PolyMatrix theta2 = metric_of(toy_dyson(p).omega2).poly();
    CHECK(max_coeff_dist(theta2(0, 0), CPoly(1.0) + s * s) == 0.0);
    CHECK(max_coeff_dist(theta2(0, 1), s) == 0.0);
    CHECK(max_coeff_dist(theta2(1, 0), s) == 0.0);
    CHECK(max_coeff_dist(theta2(1, 1), CPoly(1.0)) == 0.0);

    // full metric against the published closed form
    const PolyMatrix theta = metric_of(full_dyson(toy_dyson(p))).poly();
    CHECK(max_coeff_dist(theta, toy_reference(p).theta) == 0.0);
}

TEST_CASE("coriolis") {
    const TimeMatrixFn constant = TimeMatrixFn::constant(CMatrix::from_rows({{1.0, 0.5}, {0.0, 1.0}}));
    CHECK(max_abs(coriolis(constant)(0.7)) == 0.0);

    // toy second factor: Sigma2 = [[0, 0], [i(a + b t), 0]]
    const ToyParams p = params(2.0, 1.0, 0.5);
    const PolyMatrix sigma2 = coriolis(toy_dyson(p).omega2).poly();
    const CPoly sdot = toy_s(p).derivative();
    CHECK(max_coeff_dist(sigma2(1, 0), kI * sdot) == 0.0);
    CHECK(max_coeff_dist(sigma2(0, 0), CPoly()) == 0.0);
    CHECK(max_coeff_dist(sigma2(0, 1), CPoly()) == 0.0);
    CHECK(max_coeff_dist(sigma2(1, 1), CPoly()) == 0.0);

    // full map: i s'(t) [[-r, -r^2], [1, r]]
    const PolyMatrix sigma = coriolis(full_dyson(toy_dyson(p))).poly();
    CHECK(max_coeff_dist(sigma, toy_sigma_derived(p)) == 0.0);
}

TEST_CASE("generator selection") {
    // constant map: the interaction generator collapses to H itself
    CMatrix h = CMatrix::from_rows({{1.0, 0.25}, {0.25, 2.0}});
    const PictureModel flat = collapsed_model(h);
    CHECK(max_abs(generator(flat, PictureTag::NIP_auxiliary)(0.4) - h) == 0.0);
    CHECK(max_abs(generator(flat, PictureTag::NSP_auxiliary)(0.4) - h) == 0.0);

    // toy hybrid generator, spelled out entry by entry
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const PolyMatrix g1 = generator(model, PictureTag::HIP_Kphysical).poly();

    const CPoly s = toy_s(p);
    const CPoly u = s * (CPoly(1.0) - kT);
    PolyMatrix want(2);
    want(0, 0) = CPoly(1.0) + kT;
    want(1, 0) = u - kI * s.derivative();
    want(1, 1) = CPoly(2.0);
    CHECK(max_coeff_dist(g1, want) == 0.0);

    // its eigenvalues stay {1 + t, 2} at every probe
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Spectrum sp = eigenvalues(generator(model, PictureTag::HIP_Kphysical)(t));
        const Complex lo = t < 1.0 ? Complex{1.0 + t, 0.0} : Complex{2.0, 0.0};
        const Complex hi = Complex{2.0, 0.0};
        CHECK(std::abs(sp.eigenvalues[0] - lo) == 0.0);
        CHECK(std::abs(sp.eigenvalues[1] - hi) == 0.0);
    }

    // dual generator is the adjoint of the hybrid one
    const CMatrix gd = generator(model, PictureTag::HIP_dual)(0.3);
    const CMatrix g = generator(model, PictureTag::HIP_Kphysical)(0.3);
    CHECK(max_abs(gd - conj_transpose(g)) == 0.0);
}

TEST_CASE("hamiltonian_h1") {
    CMatrix h = CMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}});
    const PictureModel flat = collapsed_model(h);
    CHECK(max_abs(hamiltonian_h1(flat)(0.6) - h) == 0.0);

    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const PolyMatrix h1 = model.h1().poly();
    const CPoly s = toy_s(p);
    PolyMatrix want(2);
    want(0, 0) = CPoly(1.0) + kT;
    want(1, 0) = s - kT * s;
    want(1, 1) = CPoly(2.0);
    CHECK(max_coeff_dist(h1, want) == 0.0);

    // isospectral to H at probe times
    for (double t : {0.0, 0.5, 1.0}) {
        const Spectrum sh = eigenvalues(model.hamiltonian()(t));
        const Spectrum sh1 = eigenvalues(model.h1()(t));
        for (std::size_t i = 0; i < 2; ++i)
            CHECK(std::abs(sh.eigenvalues[i] - sh1.eigenvalues[i]) <= 1e-10);
    }
}

TEST_CASE("omega21") {
    const ToyParams p = params(2.0, 1.0, 0.0);
    const DysonFactorization d = toy_dyson(p);

    DysonFactorization trivial(TimeMatrixFn::constant(CMatrix::identity(2)), d.omega2);
    CHECK(max_abs(omega21(trivial)(0.4) - CMatrix::identity(2)) <= 1e-15);

    // forced identity at s(1) = 1, r = 2
    const TimeMatrixFn o21 = omega21(d);
    const CMatrix lhs = o21(1.0) * d.omega2(1.0);
    const CMatrix rhs = d.omega2(1.0) * d.omega1(1.0);
    CHECK(rel(lhs, rhs) <= 1e-12);

    // commuting factors: conjugation does nothing
    const CPoly s = toy_s(params(0.0, 1.0, 0.5));
    PolyMatrix lower = PolyMatrix::identity(2);
    lower(1, 0) = s;
    DysonFactorization same(TimeMatrixFn::exact(lower), TimeMatrixFn::exact(lower));
    CHECK(max_abs(omega21(same)(0.8) - lower.eval(0.8)) <= 1e-14);
}

TEST_CASE("omega21 identity holds as exact polynomials for the toy factors") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const DysonFactorization d = toy_dyson(p);
    const TimeMatrixFn o21 = omega21(d);
    REQUIRE(o21.is_exact());
    CHECK(max_coeff_dist(o21.poly() * d.omega2.poly(), d.omega2.poly() * d.omega1.poly()) ==
          0.0);
}

TEST_CASE("observable_tilde") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);

    CHECK(max_abs(observable_tilde(model, CMatrix::identity(2))(0.3) -
                  CMatrix::identity(2)) <= 1e-15);

    // constant map: the transported image is constant
    CMatrix a0 = CMatrix::from_rows({{1.0, 0.0}, {0.0, 2.0}});
    const PictureModel flat = collapsed_model(CMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}}));
    const TimeMatrixFn at = observable_tilde(flat, a0);
    CHECK(max_abs(at(0.1) - at(0.9)) == 0.0);

    // direct product oracle at t = 0.5
    CMatrix a = CMatrix::zero(2);
    a(0, 0) = 1.0;
    const CMatrix omega_half = model.omega()(0.5);
    const CMatrix want = inverse(omega_half) * a * omega_half;
    const CMatrix got = observable_tilde(model, a)(0.5);
    CHECK(rel(got, want) <= 1e-14);

    // transported image is quasi-Hermitian with respect to the full metric
    const CMatrix th = model.theta()(0.5);
    CHECK(rel(conj_transpose(got) * th, th * got) <= 1e-12);

    CHECK_THROWS_AS((void)observable_tilde(model, CMatrix::from_rows({{0.0, 1.0}, {0.0, 0.0}})),
                    NotHermitian);
}

TEST_CASE("observable_hip") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);

    CHECK(max_abs(observable_hip(model, CMatrix::identity(2))(0.7) - CMatrix::identity(2)) <=
          1e-15);

    // Omega1 = I: hybrid image equals the auxiliary image
    ToyParams p0 = p;
    p0.r = 0.0;
    const PictureModel model0 = make_toy_model(p0);
    CMatrix a = CMatrix::zero(2);
    a(0, 0) = 1.0;
    CHECK(max_abs(observable_hip(model0, a)(0.6) - observable_tilde(model0, a)(0.6)) <= 1e-14);

    // both defining relations, seeded with the Hermitized Hamiltonian at t=0
    const CMatrix a_s = generator(model, PictureTag::SP_textbook)(0.0);
    REQUIRE(hermiticity_residual(a_s) <= 1e-10 * fro_norm(a_s));
    const TimeMatrixFn a1 = observable_hip(model, a_s);
    for (double t : {0.0, 0.5, 1.0}) {
        const CMatrix o2 = model.dyson().omega2(t);
        const CMatrix th2 = model.theta2()(t);
        const CMatrix img = a1(t);
        CHECK(rel(o2 * img, a_s * o2) <= 1e-11);
        CHECK(rel(conj_transpose(img) * th2, th2 * img) <= 1e-11);
    }
}

TEST_CASE("metric_for per picture") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const double t = 0.5;

    CHECK(max_abs(metric_for(model, PictureTag::SP_textbook)(t) - CMatrix::identity(2)) == 0.0);
    CHECK(max_abs(metric_for(model, PictureTag::NIP_auxiliary)(t) - model.theta()(t)) == 0.0);
    CHECK(max_abs(metric_for(model, PictureTag::HIP_Kphysical)(t) - model.theta2()(t)) == 0.0);

    const CMatrix m_dual = metric_for(model, PictureTag::HIP_dual)(t);
    CHECK(rel(m_dual, inverse(model.theta2()(t))) <= 1e-13);
}

TEST_CASE("pipeline identities on the toy model") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);

    for (double t : {0.0, 0.25, 0.5, 1.0}) {
        // metric factorization
        const CMatrix o1 = model.dyson().omega1(t);
        CHECK(rel(model.theta()(t), conj_transpose(o1) * model.theta2()(t) * o1) <= 1e-12);

        // Coriolis composition law
        const CMatrix sigma = model.sigma()(t);
        const CMatrix sigma1 = coriolis(model.dyson().omega1)(t);
        const CMatrix comp = inverse(o1) * model.sigma2()(t) * o1 + sigma1;
        CHECK(rel(sigma, comp) <= 1e-10);

        // metric compatibility
        const CMatrix th2 = model.theta2()(t);
        const CMatrix g1 = generator(model, PictureTag::HIP_Kphysical)(t);
        const CMatrix lhs = kI * model.theta2().derivative()(t);
        CHECK(rel(lhs, conj_transpose(g1) * th2 - th2 * g1) <= 1e-10);

        // quasi-Hermiticity transport
        const CMatrix h1 = model.h1()(t);
        CHECK(rel(conj_transpose(h1) * th2, th2 * h1) <= 1e-10);

        // Hermitized generator
        const CMatrix hs = generator(model, PictureTag::SP_textbook)(t);
        CHECK(rel(hs, conj_transpose(hs)) <= 1e-10);
    }
}

TEST_CASE("construction records the compatibility residual without enforcing it") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel clean = make_toy_model(p);
    CHECK(clean.quasi_hermiticity_residual() <= 1e-12);

    // corrupt the Hamiltonian: construction succeeds, the residual records it
    PolyMatrix h = clean.hamiltonian().poly();
    h(0, 1) += CPoly(0.1);
    const PictureModel broken(toy_dyson(p), TimeMatrixFn::exact(h), p.t_min, p.t_max);
    CHECK(broken.quasi_hermiticity_residual() >= 0.01);
}
