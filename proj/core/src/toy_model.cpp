#include "hipdyn/toy_model.hpp"

namespace hipdyn {

namespace {

const CPoly kOne{1.0};

CPoly one_plus_t() { return CPoly(std::vector<Complex>{{1.0, 0.0}, {1.0, 0.0}}); }
CPoly one_minus_t() { return CPoly(std::vector<Complex>{{1.0, 0.0}, {-1.0, 0.0}}); }

} // namespace

CPoly toy_s(const ToyParams& p) {
    return CPoly(std::vector<Complex>{Complex{}, {p.a, 0.0}, {0.5 * p.b, 0.0}});
}

DysonFactorization toy_dyson(const ToyParams& p) {
    PolyMatrix o1(2);
    o1(0, 0) = kOne;
    o1(0, 1) = CPoly(p.r);
    o1(1, 1) = kOne;

    PolyMatrix o2(2);
    o2(0, 0) = kOne;
    o2(1, 0) = toy_s(p);
    o2(1, 1) = kOne;

    return DysonFactorization(TimeMatrixFn::exact(o1), TimeMatrixFn::exact(o2));
}

PolyMatrix toy_hamiltonian_with_s(double r, const CPoly& s) {
    // u = s (1 - t); scaled copies are built with the same constant-times-
    // polynomial products the map-factor algebra performs, so conjugation by
    // the constant factor cancels these terms without numerical residue.
    const CPoly u = s * one_minus_t();
    const CPoly ru = CPoly(r) * u;
    const CPoly r2u = CPoly(r) * ru;

    PolyMatrix h(2);
    h(0, 0) = one_plus_t() - ru;
    h(0, 1) = Complex{-1.0, 0.0} * r2u - CPoly(r) * one_minus_t();
    h(1, 0) = u;
    h(1, 1) = ru + CPoly(2.0);
    return h;
}

TimeMatrixFn toy_hamiltonian(const ToyParams& p) {
    return TimeMatrixFn::exact(toy_hamiltonian_with_s(p.r, toy_s(p)));
}

ToyReference toy_reference(const ToyParams& p) {
    const CPoly s = toy_s(p);
    const CPoly sdot = s.derivative();
    const CPoly u = s * one_minus_t();
    const CPoly r{p.r};
    const CPoly s2 = s * s;

    ToyReference ref;

    ref.theta = PolyMatrix(2);
    ref.theta(0, 0) = kOne + s2;
    ref.theta(0, 1) = r * (kOne + s2) + s;
    ref.theta(1, 0) = ref.theta(0, 1).conjugated();
    ref.theta(1, 1) = r * (r * (kOne + s2)) + CPoly(2.0 * p.r) * s + kOne;

    ref.theta2 = PolyMatrix(2);
    ref.theta2(0, 0) = kOne + s2;
    ref.theta2(0, 1) = s;
    ref.theta2(1, 0) = s;
    ref.theta2(1, 1) = kOne;

    ref.h1 = PolyMatrix(2);
    ref.h1(0, 0) = one_plus_t();
    ref.h1(1, 0) = u;
    ref.h1(1, 1) = CPoly(2.0);

    // Published connection; trace i s'(t) (1 - r), so it matches the derived
    // one only at r = 1.
    ref.sigma = PolyMatrix(2);
    ref.sigma(0, 0) = Complex{0.0, -p.r} * sdot;
    ref.sigma(0, 1) = Complex{0.0, -p.r} * sdot;
    ref.sigma(1, 0) = kI * sdot;
    ref.sigma(1, 1) = kI * sdot;

    ref.sigma2 = PolyMatrix(2);
    ref.sigma2(1, 0) = kI * sdot;

    ref.g1 = PolyMatrix(2);
    ref.g1(0, 0) = one_plus_t();
    ref.g1(1, 0) = u - kI * sdot;
    ref.g1(1, 1) = CPoly(2.0);

    ref.g_eigen0 = one_plus_t();
    ref.g_eigen1 = CPoly(2.0) - Complex{0.0, 1.0 - p.r} * sdot;

    return ref;
}

PolyMatrix toy_sigma_derived(const ToyParams& p) {
    const CPoly sdot = toy_s(p).derivative();
    PolyMatrix m(2);
    m(0, 0) = Complex{0.0, -p.r} * sdot;
    m(0, 1) = Complex{0.0, -p.r * p.r} * sdot;
    m(1, 0) = kI * sdot;
    m(1, 1) = Complex{0.0, p.r} * sdot;
    return m;
}

PictureModel make_toy_model(const ToyParams& p) {
    return PictureModel(toy_dyson(p), toy_hamiltonian(p), p.t_min, p.t_max);
}

} // namespace hipdyn
