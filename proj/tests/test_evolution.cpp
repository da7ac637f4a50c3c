#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "hipdyn/evolution.hpp"
#include "hipdyn/toy_model.hpp"

using namespace hipdyn;

namespace {

constexpr double kPi = 3.14159265358979323846;

PictureModel flat_model(const CMatrix& h, double t_min, double t_max) {
    DysonFactorization d(TimeMatrixFn::constant(CMatrix::identity(h.dim())),
                         TimeMatrixFn::constant(CMatrix::identity(h.dim())));
    return PictureModel(std::move(d), TimeMatrixFn::constant(h), t_min, t_max);
}

ToyParams params(double r, double a, double b, double t_max = 1.0) {
    ToyParams p;
    p.r = r;
    p.a = a;
    p.b = b;
    p.t_max = t_max;
    return p;
}

double vec_dist(const std::vector<Complex>& x, const std::vector<Complex>& y) {
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) worst = std::max(worst, std::abs(x[i] - y[i]));
    return worst;
}

} // namespace

TEST_CASE("IntegratorSpec validation") {
    CHECK_THROWS_AS(IntegratorSpec::rk4(0.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(IntegratorSpec::rk4(-1e-3).validate(), InvalidArgument);
    CHECK_THROWS_AS(IntegratorSpec::dp54(0.0).validate(), InvalidArgument);
    CHECK_THROWS_AS(IntegratorSpec::rk4(1e-3, 0).validate(), InvalidArgument);
    CHECK_NOTHROW(IntegratorSpec::rk4(1e-3).validate());
    CHECK_NOTHROW(IntegratorSpec::dp54().validate());
}

TEST_CASE("zero generator leaves the state untouched exactly") {
    const TimeMatrixFn zero = TimeMatrixFn::constant(CMatrix::zero(2));
    const std::vector<Complex> y0 = {Complex{1.0, 0.0}, Complex{0.0, 2.0}};
    const auto states =
        evolve_generator(zero, y0, IntegratorSpec::rk4(0.1), {0.0, 0.5, 1.0});
    REQUIRE(states.size() == 3);
    for (const auto& y : states) {
        CHECK(y[0] == y0[0]);
        CHECK(y[1] == y0[1]);
    }
}

TEST_CASE("stationary Hermitian evolution matches the exponential") {
    CMatrix h = CMatrix::zero(2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    const PictureModel model = flat_model(h, 0.0, 4.0);

    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    const auto traj = evolve_ket(model, PictureTag::SP_textbook, psi0, IntegratorSpec::dp54(),
                                 {0.0, kPi});
    // psi(pi) = (exp(-i pi), 0) = (-1, 0)
    CHECK(std::abs(traj.kets.back()[0] - Complex{-1.0, 0.0}) <= 1e-9);
    CHECK(std::abs(traj.kets.back()[1]) <= 1e-12);

    // propagator against the closed-form exponential
    CMatrix hd = CMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}});
    const PictureModel dense = flat_model(hd, 0.0, 2.0);
    const CMatrix u = propagator(dense, PictureTag::SP_textbook, IntegratorSpec::dp54(), 0.0, 1.2);
    const CMatrix want = expm(Complex{0.0, -1.2} * hd);
    CHECK(fro_norm(u - want) <= 1e-8);
}

TEST_CASE("fixed-step error contracts at fourth order between two step sizes") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    const std::vector<double> samples = {0.0, 1.0};

    const auto ref = evolve_ket(model, PictureTag::HIP_Kphysical, psi0,
                                IntegratorSpec::dp54(1e-12, 1e-14), samples);
    const auto coarse =
        evolve_ket(model, PictureTag::HIP_Kphysical, psi0, IntegratorSpec::rk4(1e-2), samples);
    const auto fine =
        evolve_ket(model, PictureTag::HIP_Kphysical, psi0, IntegratorSpec::rk4(5e-3), samples);

    const double ec = vec_dist(coarse.kets.back(), ref.kets.back());
    const double ef = vec_dist(fine.kets.back(), ref.kets.back());
    CHECK(ef <= 1e-8);
    CHECK(ec >= 8.0 * ef); // halving a fourth-order step gains about 16x
}

TEST_CASE("physical norm is conserved in every picture") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.5, 0.5}};
    std::vector<double> samples;
    for (int k = 0; k <= 10; ++k) samples.push_back(0.1 * k);

    for (PictureTag tag : {PictureTag::SP_textbook, PictureTag::NIP_auxiliary,
                           PictureTag::HIP_Kphysical}) {
        const auto traj =
            evolve_ket(model, tag, psi0, IntegratorSpec::dp54(1e-11, 1e-13), samples);
        double lo = traj.physical_norms.front(), hi = lo;
        for (double v : traj.physical_norms) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        CAPTURE(to_string(tag));
        CHECK(hi - lo <= 1e-8 * hi);
    }
}

TEST_CASE("companion dual ket") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    std::vector<double> samples;
    for (int k = 0; k <= 10; ++k) samples.push_back(0.1 * k);

    const auto traj = evolve_ket(model, PictureTag::HIP_Kphysical, psi0,
                                 IntegratorSpec::dp54(1e-11, 1e-13), samples, {}, true);
    REQUIRE(traj.dual_kets.has_value());
    REQUIRE(traj.dual_kets->size() == samples.size());

    // seeded with Theta2(t0) psi0
    const CMatrix th0 = model.theta2()(0.0);
    std::vector<Complex> seed = th0 * psi0;
    CHECK(vec_dist(traj.dual_kets->front(), seed) <= 1e-14);

    // the plain overlap dual^dagger ket is a constant of motion
    Complex first{};
    for (std::size_t k = 0; k < samples.size(); ++k) {
        Complex overlap{};
        for (std::size_t i = 0; i < 2; ++i)
            overlap += std::conj((*traj.dual_kets)[k][i]) * traj.kets[k][i];
        if (k == 0)
            first = overlap;
        else
            CHECK(std::abs(overlap - first) <= 1e-8 * std::abs(first));
    }

    // and the dual ket shadows Theta2(t) psi(t)
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const std::vector<Complex> want = model.theta2()(samples[k]) * traj.kets[k];
        CHECK(vec_dist((*traj.dual_kets)[k], want) <= 1e-7);
    }
}

TEST_CASE("observable transport") {
    // vanishing connection: the image never moves
    CMatrix h = CMatrix::from_rows({{1.0, 0.5}, {0.5, 2.0}});
    const PictureModel flat = flat_model(h, 0.0, 1.0);
    CMatrix a = CMatrix::zero(2);
    a(0, 0) = 1.0;
    const auto still = evolve_observable(flat, PictureTag::NIP_auxiliary, a,
                                         IntegratorSpec::rk4(1e-2), {0.0, 0.5, 1.0});
    for (const CMatrix& m : still.matrices) CHECK(max_abs(m - a) == 0.0);

    // identity is a fixed point of the commutator flow
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const auto fixed = evolve_observable(model, PictureTag::HIP_Kphysical, CMatrix::identity(2),
                                         IntegratorSpec::rk4(1e-2), {0.0, 0.5, 1.0});
    for (const CMatrix& m : fixed.matrices) CHECK(max_abs(m - CMatrix::identity(2)) == 0.0);

    // transported image reproduces the algebraic image along the way
    const std::vector<double> samples = {0.0, 0.25, 0.5, 0.75, 1.0};
    const auto moved = evolve_observable(model, PictureTag::HIP_Kphysical, a,
                                         IntegratorSpec::rk4(1e-3), samples);
    const TimeMatrixFn image = observable_hip(model, a);
    for (std::size_t k = 0; k < samples.size(); ++k)
        CHECK(fro_norm(moved.matrices[k] - image(samples[k])) <= 1e-7);
}

TEST_CASE("expectation pairing") {
    CMatrix h = CMatrix::zero(2);
    h(0, 0) = 1.0;
    h(1, 1) = 2.0;
    const PictureModel flat = flat_model(h, 0.0, 1.0);
    const std::vector<Complex> psi0 = {Complex{0.6, 0.0}, Complex{0.0, 0.8}};
    const std::vector<double> samples = {0.0, 0.5, 1.0};

    const auto traj =
        evolve_ket(flat, PictureTag::SP_textbook, psi0, IntegratorSpec::dp54(), samples);

    // identity observable reads back the squared norm
    const Expectation e =
        expectation(flat, PictureTag::SP_textbook, traj, CMatrix::identity(2), traj, 0.5);
    CHECK(std::abs(e.value.real() - traj.physical_norms[1] * traj.physical_norms[1]) <= 1e-12);
    CHECK(std::abs(e.value.imag()) <= 1e-14);

    // unsampled time is an error, not an interpolation
    CHECK_THROWS_AS((void)expectation(flat, PictureTag::SP_textbook, traj, CMatrix::identity(2),
                                      traj, 0.3),
                    MissingSample);

    // trivial factorization: auxiliary and hybrid pairings agree with SP
    CMatrix a = CMatrix::from_rows({{1.0, 0.25}, {0.25, -1.0}});
    const auto tn = evolve_ket(flat, PictureTag::NIP_auxiliary, psi0, IntegratorSpec::dp54(),
                               samples);
    const auto th = evolve_ket(flat, PictureTag::HIP_Kphysical, psi0, IntegratorSpec::dp54(),
                               samples);
    const Complex vs = expectation(flat, PictureTag::SP_textbook, traj, a, traj, 1.0).value;
    const Complex vn = expectation(flat, PictureTag::NIP_auxiliary, tn, a, tn, 1.0).value;
    const Complex vh = expectation(flat, PictureTag::HIP_Kphysical, th, a, th, 1.0).value;
    CHECK(std::abs(vn - vs) <= 1e-9);
    CHECK(std::abs(vh - vs) <= 1e-9);

    // recorded gap between metric pairing and the evolved dual ket stays small
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const auto td = evolve_ket(model, PictureTag::HIP_Kphysical, psi0,
                               IntegratorSpec::dp54(1e-11, 1e-13), samples, {}, true);
    const Expectation ed = expectation(model, PictureTag::HIP_Kphysical, td, a, td, 1.0);
    CHECK(ed.dual_form_gap <= 1e-7);
    CHECK(ed.dual_form_gap > 0.0);
}

TEST_CASE("expectations recorded along the trajectory match the pairing rule") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const std::vector<Complex> psi0 = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    const std::vector<double> samples = {0.0, 0.5, 1.0};
    CMatrix a = CMatrix::zero(2);
    a(0, 0) = 1.0;

    const auto traj = evolve_ket(model, PictureTag::HIP_Kphysical, psi0,
                                 IntegratorSpec::dp54(1e-11, 1e-13), samples, {a});
    REQUIRE(traj.expectations.size() == 1);
    REQUIRE(traj.expectations[0].size() == samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const Complex via_rule =
            expectation(model, PictureTag::HIP_Kphysical, traj, a, traj, samples[k]).value;
        CHECK(std::abs(traj.expectations[0][k] - via_rule) <= 1e-12);
    }
}

TEST_CASE("propagator") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const IntegratorSpec spec = IntegratorSpec::dp54(1e-11, 1e-13);

    CHECK(max_abs(propagator(model, PictureTag::HIP_Kphysical, spec, 0.3, 0.3) -
                  CMatrix::identity(2)) == 0.0);
    CHECK_THROWS_AS((void)propagator(model, PictureTag::HIP_Kphysical, spec, 0.5, 0.2),
                    InvalidArgument);

    // series endpoint agrees with the single-shot propagator
    const auto series =
        propagator_series(generator(model, PictureTag::HIP_Kphysical), spec, {0.0, 0.5, 1.0});
    const CMatrix u = propagator(model, PictureTag::HIP_Kphysical, spec, 0.0, 1.0);
    REQUIRE(series.size() == 3);
    CHECK(max_abs(series.front() - CMatrix::identity(2)) == 0.0);
    CHECK(fro_norm(series.back() - u) <= 1e-9);
}

TEST_CASE("propagator norms: r = 0 comparison of the connection variants") {
    const ToyParams p = params(0.0, 1.0, 0.0, 2.0);
    const PictureModel model = make_toy_model(p);
    const IntegratorSpec spec = IntegratorSpec::dp54(1e-11, 1e-13);

    const CMatrix u_hip = propagator(model, PictureTag::HIP_Kphysical, spec, 0.0, 2.0);
    const CMatrix u_nip = propagator(model, PictureTag::NIP_auxiliary, spec, 0.0, 2.0);
    // with the first factor trivial the two generators coincide
    CHECK(fro_norm(u_hip - u_nip) <= 1e-9 * fro_norm(u_hip));

    // the reference connection tilts a level off the real axis: the forward
    // propagator loses norm while its inverse blows up, unlike the
    // unit-determinant real-spectrum evolution above
    const PolyMatrix g_ref = toy_hamiltonian_with_s(p.r, toy_s(p)) - toy_reference(p).sigma;
    const CMatrix u_ref = propagator_of_generator(TimeMatrixFn::exact(g_ref), spec, 0.0, 2.0);
    CHECK(fro_norm(u_ref) < fro_norm(u_hip));
    CHECK(fro_norm(inverse(u_ref)) > 2.0 * fro_norm(inverse(u_hip)));
}

TEST_CASE("step budget and error reporting") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);

    CHECK_THROWS_AS((void)evolve_ket(model, PictureTag::HIP_Kphysical,
                                     {Complex{1.0, 0.0}, Complex{0.0, 0.0}},
                                     IntegratorSpec::rk4(1e-4, 10), {0.0, 1.0}),
                    StepLimitExceeded);

    const auto fixed = evolve_ket(model, PictureTag::HIP_Kphysical,
                                  {Complex{1.0, 0.0}, Complex{0.0, 0.0}},
                                  IntegratorSpec::rk4(1e-2), {0.0, 1.0});
    CHECK(fixed.max_local_error == 0.0);

    const auto adaptive = evolve_ket(model, PictureTag::HIP_Kphysical,
                                     {Complex{1.0, 0.0}, Complex{0.0, 0.0}},
                                     IntegratorSpec::dp54(), {0.0, 1.0});
    CHECK(adaptive.max_local_error > 0.0);
    CHECK(vec_dist(fixed.kets.back(), adaptive.kets.back()) <= 1e-7);
}

TEST_CASE("input validation") {
    const ToyParams p = params(0.5, 1.0, 0.5);
    const PictureModel model = make_toy_model(p);
    const IntegratorSpec spec = IntegratorSpec::rk4(1e-2);

    CHECK_THROWS_AS((void)evolve_ket(model, PictureTag::HIP_Kphysical,
                                     {Complex{0.0, 0.0}, Complex{0.0, 0.0}}, spec, {0.0, 1.0}),
                    InvalidArgument);
    CHECK_THROWS_AS((void)evolve_ket(model, PictureTag::HIP_Kphysical, {Complex{1.0, 0.0}}, spec,
                                     {0.0, 1.0}),
                    DimMismatch);
    CHECK_THROWS_AS((void)evolve_ket(model, PictureTag::HIP_Kphysical,
                                     {Complex{1.0, 0.0}, Complex{0.0, 0.0}}, spec, {0.0, 1.5}),
                    InvalidArgument);
    CHECK_THROWS_AS((void)evolve_ket(model, PictureTag::HIP_Kphysical,
                                     {Complex{1.0, 0.0}, Complex{0.0, 0.0}}, spec, {0.5, 0.25}),
                    InvalidArgument);
}
