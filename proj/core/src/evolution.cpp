#include "hipdyn/evolution.hpp"

#include <algorithm>
#include <cmath>

namespace hipdyn {

IntegratorSpec IntegratorSpec::rk4(double step, std::size_t max_steps) {
    IntegratorSpec s;
    s.method = Method::RK4_fixed;
    s.step = step;
    s.max_steps = max_steps;
    return s;
}

IntegratorSpec IntegratorSpec::dp54(double rtol, double atol, std::size_t max_steps) {
    IntegratorSpec s;
    s.method = Method::DP54_adaptive;
    s.rtol = rtol;
    s.atol = atol;
    s.max_steps = max_steps;
    return s;
}

void IntegratorSpec::validate() const {
    if (method == Method::RK4_fixed && !(step > 0.0))
        throw InvalidArgument("IntegratorSpec: RK4 step must be positive");
    if (method == Method::DP54_adaptive && (!(rtol > 0.0) || !(atol >= 0.0)))
        throw InvalidArgument("IntegratorSpec: DP54 tolerances must be positive");
    if (max_steps == 0) throw InvalidArgument("IntegratorSpec: max_steps must be positive");
}

namespace {

using Vec = std::vector<Complex>;

// Right-hand side dy/dt = f(t, y).
using Rhs = std::function<void(double, const Vec&, Vec&)>;

void axpy(Vec& y, double a, const Vec& x) {
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

// Classic fourth-order Runge-Kutta from ta to tb with step clipped so the
// interval divides evenly.
void rk4_span(const Rhs& rhs, Vec& y, double ta, double tb, double step, std::size_t& budget) {
    const double span = tb - ta;
    if (span <= 0.0) return;
    std::size_t n = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
    if (n == 0) n = 1;
    const double h = span / static_cast<double>(n);
    const std::size_t m = y.size();
    Vec k1(m), k2(m), k3(m), k4(m), tmp(m);
    for (std::size_t s = 0; s < n; ++s) {
        if (budget == 0) throw StepLimitExceeded("rk4: step budget exhausted");
        --budget;
        const double t = ta + h * static_cast<double>(s);
        rhs(t, y, k1);
        tmp = y;
        axpy(tmp, 0.5 * h, k1);
        rhs(t + 0.5 * h, tmp, k2);
        tmp = y;
        axpy(tmp, 0.5 * h, k2);
        rhs(t + 0.5 * h, tmp, k3);
        tmp = y;
        axpy(tmp, h, k3);
        rhs(t + h, tmp, k4);
        for (std::size_t i = 0; i < m; ++i)
            y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
}

// Dormand-Prince 5(4) embedded pair (FSAL). Error test:
// max_i |e_i| / (atol + rtol * max(|y_i|, |y_new_i|)) <= 1.
struct Dp54Tableau {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                            a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                            a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    static constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                            e4 = 125.0 / 192 - 393.0 / 640,
                            e5 = -2187.0 / 6784 + 92097.0 / 339200,
                            e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;
};

class Dp54Stepper {
  public:
    Dp54Stepper(const Rhs& rhs, const Vec& y0, double t0, double h0, double rtol, double atol)
        : rhs_(rhs), y_(y0), t_(t0), h_(h0), rtol_(rtol), atol_(atol), k1_(y0.size()) {
        rhs_(t_, y_, k1_); // FSAL seed
    }

    double t() const { return t_; }
    const Vec& y() const { return y_; }
    double max_error() const { return max_err_; }

    // Advance to exactly t_target, adapting the step; consumes budget per
    // attempted step.
    void advance_to(double t_target, std::size_t& budget) {
        using T = Dp54Tableau;
        const std::size_t m = y_.size();
        Vec k2(m), k3(m), k4(m), k5(m), k6(m), k7(m), ytmp(m), ynew(m);
        while (t_ < t_target) {
            if (budget == 0) throw StepLimitExceeded("dp54: step budget exhausted");
            --budget;
            double h = std::min(h_, t_target - t_);
            const bool clipped = h < h_;

            ytmp = y_;
            axpy(ytmp, h * T::a21, k1_);
            rhs_(t_ + T::c2 * h, ytmp, k2);

            ytmp = y_;
            axpy(ytmp, h * T::a31, k1_);
            axpy(ytmp, h * T::a32, k2);
            rhs_(t_ + T::c3 * h, ytmp, k3);

            ytmp = y_;
            axpy(ytmp, h * T::a41, k1_);
            axpy(ytmp, h * T::a42, k2);
            axpy(ytmp, h * T::a43, k3);
            rhs_(t_ + T::c4 * h, ytmp, k4);

            ytmp = y_;
            axpy(ytmp, h * T::a51, k1_);
            axpy(ytmp, h * T::a52, k2);
            axpy(ytmp, h * T::a53, k3);
            axpy(ytmp, h * T::a54, k4);
            rhs_(t_ + T::c5 * h, ytmp, k5);

            ytmp = y_;
            axpy(ytmp, h * T::a61, k1_);
            axpy(ytmp, h * T::a62, k2);
            axpy(ytmp, h * T::a63, k3);
            axpy(ytmp, h * T::a64, k4);
            axpy(ytmp, h * T::a65, k5);
            rhs_(t_ + h, ytmp, k6);

            ynew = y_;
            axpy(ynew, h * T::b1, k1_);
            axpy(ynew, h * T::b3, k3);
            axpy(ynew, h * T::b4, k4);
            axpy(ynew, h * T::b5, k5);
            axpy(ynew, h * T::b6, k6);
            rhs_(t_ + h, ynew, k7);

            double err = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const Complex e = h * (T::e1 * k1_[i] + T::e3 * k3[i] + T::e4 * k4[i] +
                                       T::e5 * k5[i] + T::e6 * k6[i] + T::e7 * k7[i]);
                const double scale =
                    atol_ + rtol_ * std::max(std::abs(y_[i]), std::abs(ynew[i]));
                err = std::max(err, std::abs(e) / scale);
            }

            if (err <= 1.0) {
                t_ += h;
                y_ = ynew;
                k1_ = k7; // FSAL
                max_err_ = std::max(max_err_, err);
                const double grow = (err == 0.0) ? 5.0 : 0.9 * std::pow(err, -0.2);
                const double factor = std::clamp(grow, 0.2, 5.0);
                if (!clipped)
                    h_ = h * factor;
                else
                    h_ = std::max(h_, h * factor);
            } else {
                const double shrink = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
                h_ = h * shrink;
            }
        }
    }

  private:
    const Rhs& rhs_;
    Vec y_;
    double t_;
    double h_;
    double rtol_, atol_;
    Vec k1_;
    double max_err_ = 0.0;
};

// Drive y through the sample times, invoking on_sample(index, y) at each
// (including the initial time).
void integrate_samples(const Rhs& rhs, const Vec& y0, const std::vector<double>& samples,
                       const IntegratorSpec& spec,
                       const std::function<void(std::size_t, const Vec&)>& on_sample,
                       double* max_local_error) {
    spec.validate();
    if (samples.empty()) throw InvalidArgument("integrate: no sample times");
    for (std::size_t k = 1; k < samples.size(); ++k)
        if (!(samples[k] > samples[k - 1]))
            throw InvalidArgument("integrate: sample times must be strictly increasing");

    std::size_t budget = spec.max_steps;
    if (spec.method == IntegratorSpec::Method::RK4_fixed) {
        Vec y = y0;
        on_sample(0, y);
        for (std::size_t k = 1; k < samples.size(); ++k) {
            rk4_span(rhs, y, samples[k - 1], samples[k], spec.step, budget);
            on_sample(k, y);
        }
        if (max_local_error) *max_local_error = 0.0;
        return;
    }

    const double span = samples.back() - samples.front();
    Dp54Stepper stepper(rhs, y0, samples.front(), span / 100.0, spec.rtol, spec.atol);
    on_sample(0, stepper.y());
    for (std::size_t k = 1; k < samples.size(); ++k) {
        stepper.advance_to(samples[k], budget);
        on_sample(k, stepper.y());
    }
    if (max_local_error) *max_local_error = stepper.max_error();
}

Rhs ket_rhs(const TimeMatrixFn& gen) {
    return [gen](double t, const Vec& y, Vec& dy) {
        const CMatrix g = gen(t);
        const std::size_t n = g.dim();
        for (std::size_t i = 0; i < n; ++i) {
            Complex acc{};
            for (std::size_t j = 0; j < n; ++j) acc += g(i, j) * y[j];
            dy[i] = -kI * acc;
        }
    };
}

// i dA/dt = A K - K A, flattened row major.
Rhs commutator_rhs(const TimeMatrixFn& kernel) {
    return [kernel](double t, const Vec& y, Vec& dy) {
        const CMatrix k = kernel(t);
        const std::size_t n = k.dim();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Complex acc{};
                for (std::size_t l = 0; l < n; ++l)
                    acc += y[i * n + l] * k(l, j) - k(i, l) * y[l * n + j];
                dy[i * n + j] = -kI * acc;
            }
    };
}

double vec_norm(const Vec& v) {
    double s = 0.0;
    for (const Complex& c : v) s += std::norm(c);
    return std::sqrt(s);
}

void require_window(const PictureModel& model, const std::vector<double>& samples) {
    if (samples.empty()) throw InvalidArgument("sample times empty");
    if (samples.front() < model.t_min() - 1e-12 || samples.back() > model.t_max() + 1e-12)
        throw InvalidArgument("sample times leave the model window");
}

Complex quad_form(const Vec& x, const CMatrix& m, const Vec& y) {
    const std::size_t n = m.dim();
    Complex acc{};
    for (std::size_t i = 0; i < n; ++i) {
        Complex row{};
        for (std::size_t j = 0; j < n; ++j) row += m(i, j) * y[j];
        acc += std::conj(x[i]) * row;
    }
    return acc;
}

Complex dot(const Vec& x, const Vec& y) {
    Complex acc{};
    for (std::size_t i = 0; i < x.size(); ++i) acc += std::conj(x[i]) * y[i];
    return acc;
}

std::size_t sample_index(const std::vector<double>& times, double t) {
    for (std::size_t i = 0; i < times.size(); ++i)
        if (std::abs(times[i] - t) <= 1e-12 * std::max(1.0, std::abs(t))) return i;
    throw MissingSample("time " + std::to_string(t) + " was not sampled");
}

} // namespace

StateTrajectory evolve_ket(const PictureModel& model, PictureTag tag, const Vec& psi0,
                           const IntegratorSpec& spec, const std::vector<double>& sample_times,
                           const std::vector<CMatrix>& observables, bool with_dual) {
    if (psi0.size() != model.dim()) throw DimMismatch("evolve_ket: state dimension mismatch");
    if (vec_norm(psi0) == 0.0) throw InvalidArgument("evolve_ket: zero initial state");
    require_window(model, sample_times);

    const TimeMatrixFn gen = generator(model, tag);
    const TimeMatrixFn metric = metric_for(model, tag);

    // Observable images transported for expectation readout, one per input.
    std::vector<TimeMatrixFn> images;
    images.reserve(observables.size());
    const bool hip = tag == PictureTag::HIP_Kphysical || tag == PictureTag::HIP_dual;
    for (const CMatrix& a : observables)
        images.push_back(hip ? observable_hip(model, a)
                             : (tag == PictureTag::SP_textbook
                                    ? TimeMatrixFn::constant(a)
                                    : observable_tilde(model, a)));

    StateTrajectory traj;
    traj.times = sample_times;
    traj.kets.resize(sample_times.size());
    traj.physical_norms.resize(sample_times.size());
    traj.expectations.assign(observables.size(), std::vector<Complex>(sample_times.size()));

    const Rhs rhs = ket_rhs(gen);
    integrate_samples(
        rhs, psi0, sample_times, spec,
        [&](std::size_t k, const Vec& y) {
            traj.kets[k] = y;
            const double t = sample_times[k];
            const CMatrix m = metric(t);
            traj.physical_norms[k] = std::sqrt(std::max(0.0, quad_form(y, m, y).real()));
            for (std::size_t o = 0; o < images.size(); ++o) {
                // For HIP_dual the stored state is a dual ket, paired with
                // the ket it shadows through the inverse metric m.
                const CMatrix w =
                    (tag == PictureTag::HIP_dual) ? images[o](t) * m : m * images[o](t);
                traj.expectations[o][k] = quad_form(y, w, y);
            }
        },
        &traj.max_local_error);

    if (with_dual) {
        const TimeMatrixFn dual_gen = (tag == PictureTag::HIP_dual)
                                          ? generator(model, PictureTag::HIP_Kphysical)
                                          : conj_transpose(gen);
        const CMatrix m0 = metric(sample_times.front());
        Vec dual0 = m0 * psi0;
        auto dual = std::vector<std::vector<Complex>>(sample_times.size());
        double dual_err = 0.0;
        integrate_samples(
            ket_rhs(dual_gen), dual0, sample_times, spec,
            [&](std::size_t k, const Vec& y) { dual[k] = y; }, &dual_err);
        traj.dual_kets = std::move(dual);
        traj.max_local_error = std::max(traj.max_local_error, dual_err);
    }
    return traj;
}

OperatorTrajectory evolve_observable(const PictureModel& model, PictureTag tag,
                                     const CMatrix& a_ref, const IntegratorSpec& spec,
                                     const std::vector<double>& sample_times) {
    if (a_ref.dim() != model.dim())
        throw DimMismatch("evolve_observable: observable dimension mismatch");
    require_window(model, sample_times);

    TimeMatrixFn kernel;
    CMatrix a0(model.dim());
    const double t0 = sample_times.front();
    switch (tag) {
        case PictureTag::SP_textbook:
            kernel = generator(model, PictureTag::SP_textbook);
            a0 = a_ref;
            break;
        case PictureTag::NSP_auxiliary:
        case PictureTag::NIP_auxiliary:
            kernel = model.sigma();
            a0 = observable_tilde(model, a_ref)(t0);
            break;
        case PictureTag::HIP_Kphysical:
        case PictureTag::HIP_dual:
            kernel = model.sigma2();
            a0 = observable_hip(model, a_ref)(t0);
            break;
    }

    const std::size_t n = model.dim();
    Vec y0(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) y0[i * n + j] = a0(i, j);

    OperatorTrajectory traj;
    traj.times = sample_times;
    traj.matrices.assign(sample_times.size(), CMatrix(n));
    integrate_samples(
        commutator_rhs(kernel), y0, sample_times, spec,
        [&](std::size_t k, const Vec& y) {
            CMatrix m(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) m(i, j) = y[i * n + j];
            traj.matrices[k] = std::move(m);
        },
        &traj.max_local_error);
    return traj;
}

Expectation expectation(const PictureModel& model, PictureTag tag, const StateTrajectory& bra,
                        const CMatrix& a_ref, const StateTrajectory& ket, double t) {
    const std::size_t bi = sample_index(bra.times, t);
    const std::size_t ki = sample_index(ket.times, t);
    const Vec& x = bra.kets[bi];
    const Vec& y = ket.kets[ki];

    Expectation out;
    switch (tag) {
        case PictureTag::SP_textbook: {
            out.value = quad_form(x, a_ref, y);
            break;
        }
        case PictureTag::NSP_auxiliary:
        case PictureTag::NIP_auxiliary: {
            const CMatrix w = model.theta()(t) * observable_tilde(model, a_ref)(t);
            out.value = quad_form(x, w, y);
            break;
        }
        case PictureTag::HIP_Kphysical:
        case PictureTag::HIP_dual: {
            const CMatrix image = observable_hip(model, a_ref)(t);
            const CMatrix w = model.theta2()(t) * image;
            out.value = quad_form(x, w, y);
            if (bra.dual_kets) {
                // Same value through the independently evolved dual ket.
                const Vec& xd = (*bra.dual_kets)[bi];
                const Complex alt = dot(xd, image * y);
                out.dual_form_gap = std::abs(alt - out.value);
            }
            break;
        }
    }
    return out;
}

CMatrix propagator(const PictureModel& model, PictureTag tag, const IntegratorSpec& spec,
                   double t0, double t1) {
    return propagator_of_generator(generator(model, tag), spec, t0, t1);
}

std::vector<std::vector<Complex>> evolve_generator(const TimeMatrixFn& gen, const Vec& y0,
                                                   const IntegratorSpec& spec,
                                                   const std::vector<double>& sample_times,
                                                   double* max_local_error) {
    if (y0.size() != gen.dim()) throw DimMismatch("evolve_generator: state dimension mismatch");
    std::vector<Vec> out(sample_times.size());
    double err = 0.0;
    integrate_samples(
        ket_rhs(gen), y0, sample_times, spec, [&](std::size_t k, const Vec& y) { out[k] = y; },
        &err);
    if (max_local_error) *max_local_error = err;
    return out;
}

CMatrix propagator_of_generator(const TimeMatrixFn& gen, const IntegratorSpec& spec, double t0,
                                double t1) {
    if (t1 < t0) throw InvalidArgument("propagator: t1 must not precede t0");
    const std::size_t n = gen.dim();
    if (t1 == t0) return CMatrix::identity(n);
    CMatrix u(n);
    const std::vector<double> samples = {t0, t1};
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n);
        e[j] = 1.0;
        const auto states = evolve_generator(gen, e, spec, samples, nullptr);
        for (std::size_t i = 0; i < n; ++i) u(i, j) = states.back()[i];
    }
    return u;
}

std::vector<CMatrix> propagator_series(const TimeMatrixFn& gen, const IntegratorSpec& spec,
                                       const std::vector<double>& sample_times) {
    const std::size_t n = gen.dim();
    std::vector<CMatrix> out(sample_times.size(), CMatrix(n));
    for (std::size_t j = 0; j < n; ++j) {
        Vec e(n);
        e[j] = 1.0;
        const auto states = evolve_generator(gen, e, spec, sample_times, nullptr);
        for (std::size_t k = 0; k < sample_times.size(); ++k)
            for (std::size_t i = 0; i < n; ++i) out[k](i, j) = states[k][i];
    }
    return out;
}

} // namespace hipdyn
