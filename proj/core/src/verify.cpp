#include "hipdyn/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

namespace hipdyn {

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::fail: return "fail";
        case CheckStatus::recorded_discrepancy: return "recorded_discrepancy";
    }
    throw InvalidArgument("to_string: unknown check status");
}

std::size_t VerificationReport::count(CheckStatus s) const {
    std::size_t n = 0;
    for (const CheckResult& c : checks)
        if (c.status == s) ++n;
    return n;
}

double default_tolerance() {
    if (const char* env = std::getenv("HIPDYN_TOL")) {
        char* end = nullptr;
        const double v = std::strtod(env, &end);
        if (end != env && std::isfinite(v) && v > 0.0) return v;
    }
    return 1e-10;
}

const std::vector<std::string>& check_registry() {
    static const std::vector<std::string> names = {
        // matrix kernels
        "conj_transpose_involution",
        "eigenvalues_similarity_invariance",
        "gram_positive_definite",
        "expm_inverse_identity",
        "triangular_eigenvalues_exact",
        // polynomial layer
        "polymatrix_eval_mul_consistency",
        "poly_derivative_leibniz",
        "poly_inverse_2x2_identity",
        // pointwise operator identities
        "quasi_hermiticity",
        "metric_factorization",
        "coriolis_composition",
        "metric_compatibility",
        "quasi_hermiticity_transport",
        "omega21_identity",
        "hs_hermiticity",
        "hip_observable_rule",
        "hip_observable_transport",
        // dynamics
        "physical_norm_conservation",
        "dual_overlap_invariance",
        "dual_ket_consistency",
        "picture_equivalence",
        "rk4_global_order",
        // built-in model closed forms
        "toy_reference_objects",
        "toy_sigma_consistency_point",
        "toy_g1_spectrum_exact",
        "toy_metric_positivity",
    };
    return names;
}

double PipelineResiduals::worst() const {
    return std::max(std::max(metric_factorization, coriolis_composition),
                    std::max(metric_compatibility, quasi_hermiticity_transport));
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Residual relative to the larger operand; absolute when both sides vanish.
double rel_residual(const CMatrix& lhs, const CMatrix& rhs) {
    const double d = fro_norm(lhs - rhs);
    const double scale = std::max(fro_norm(lhs), fro_norm(rhs));
    return scale > 1e-12 ? d / scale : d;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::vector<double> probe_times_for(const PictureModel& model, const VerifyOptions& opts) {
    if (!opts.probe_times.empty()) return opts.probe_times;
    const double lo = model.t_min(), hi = model.t_max();
    return {lo, lo + 0.25 * (hi - lo), lo + 0.5 * (hi - lo), hi};
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k)
        t[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    t.back() = hi;
    return t;
}

// Assembles results; every computation is guarded so a numerical error in
// one check records an infinite-residual fail instead of aborting the suite.
class SuiteBuilder {
  public:
    explicit SuiteBuilder(VerificationReport& report) : report_(report) {}

    void add(const std::string& name, double residual, double tolerance, std::string context) {
        CheckResult r;
        r.name = name;
        r.residual = residual;
        r.tolerance = tolerance;
        r.status = residual <= tolerance ? CheckStatus::pass : CheckStatus::fail;
        r.context = std::move(context);
        report_.checks.push_back(std::move(r));
    }

    // The designated published-vs-derived comparison: a residual above
    // tolerance is an expected finding, not a failure.
    void add_discrepancy_family(const std::string& name, double residual, double tolerance,
                                std::string context) {
        CheckResult r;
        r.name = name;
        r.residual = residual;
        r.tolerance = tolerance;
        r.status =
            residual <= tolerance ? CheckStatus::pass : CheckStatus::recorded_discrepancy;
        r.context = std::move(context);
        report_.checks.push_back(std::move(r));
    }

    template <typename F>
    void add_guarded(const std::string& name, double tolerance, const std::string& context,
                     F&& f) {
        try {
            add(name, f(), tolerance, context);
        } catch (const Error& e) {
            add(name, kInf, tolerance, context + " [error: " + e.what() + "]");
        }
    }

  private:
    VerificationReport& report_;
};

// ---- deterministic random inputs -----------------------------------------

CPoly random_poly(std::mt19937_64& rng, int max_degree, double amp) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_real_distribution<double> coef(-amp, amp);
    std::vector<Complex> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (Complex& v : c) v = Complex{coef(rng), coef(rng)};
    return CPoly(std::move(c));
}

// Coefficients on the lattice k/64, |k| <= 32: small dyadics whose products
// and convolution sums stay exactly representable, so coefficientwise
// identities can be asserted with zero tolerance.
CPoly random_dyadic_poly(std::mt19937_64& rng, int max_degree) {
    std::uniform_int_distribution<int> deg(0, max_degree);
    std::uniform_int_distribution<int> num(-32, 32);
    std::vector<Complex> c(static_cast<std::size_t>(deg(rng)) + 1);
    for (Complex& v : c) v = Complex{num(rng) / 64.0, num(rng) / 64.0};
    return CPoly(std::move(c));
}

CMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double amp) {
    std::uniform_real_distribution<double> coef(-amp, amp);
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = Complex{coef(rng), coef(rng)};
    return m;
}

PolyMatrix random_unit_triangular(std::mt19937_64& rng, std::size_t n, bool upper,
                                  int max_degree, double amp) {
    PolyMatrix m = PolyMatrix::identity(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const bool fill = upper ? (j > i) : (i > j);
            if (fill) m(i, j) = random_poly(rng, max_degree, amp);
        }
    return m;
}

// ---- model-independent property checks ------------------------------------

void matrix_property_checks(SuiteBuilder& out, std::size_t seeds, double base_tol) {
    std::mt19937_64 rng(0xC0FFEE11u);

    {
        double worst = 0.0;
        for (std::size_t k = 0; k < seeds; ++k) {
            const std::size_t n = 2 + k % 5; // 2..6
            const CMatrix m = random_matrix(rng, n, 2.0);
            worst = std::max(worst, max_abs(conj_transpose(conj_transpose(m)) - m));
        }
        out.add("conj_transpose_involution", worst, 0.0, fmt(double(seeds)) + " seeds, n<=6");
    }

    out.add_guarded(
        "eigenvalues_similarity_invariance", 1e-8, std::to_string(seeds) + " seeds, n<=4",
        [&] {
            double worst = 0.0;
            std::uniform_real_distribution<double> u(-0.5, 0.5);
            for (std::size_t k = 0; k < seeds; ++k) {
                const std::size_t n = 2 + k % 3; // 2..4
                CMatrix t(n);
                for (std::size_t i = 0; i < n; ++i) {
                    // Separated diagonal keeps the eigenproblem well posed.
                    t(i, i) = Complex{static_cast<double>(i) + u(rng) * 0.5, u(rng)};
                    for (std::size_t j = i + 1; j < n; ++j) t(i, j) = Complex{u(rng), u(rng)};
                }
                CMatrix p = CMatrix::identity(n);
                for (std::size_t i = 1; i < n; ++i)
                    for (std::size_t j = 0; j < i; ++j) p(i, j) = Complex{u(rng), u(rng)};
                const CMatrix a = p * t * inverse(p);
                const Spectrum sa = eigenvalues(a);
                const Spectrum st = eigenvalues(t);
                for (std::size_t i = 0; i < n; ++i)
                    worst = std::max(worst,
                                     std::abs(sa.eigenvalues[i] - st.eigenvalues[i]));
            }
            return worst;
        });

    out.add_guarded("gram_positive_definite", 0.0, std::to_string(seeds) + " seeds, n<=6", [&] {
        double worst = 0.0;
        std::uniform_real_distribution<double> mag(0.5, 1.5);
        std::uniform_real_distribution<double> ang(0.0, 6.283185307179586);
        for (std::size_t k = 0; k < seeds; ++k) {
            const std::size_t n = 2 + k % 5;
            CMatrix omega = CMatrix::identity(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i != j) omega(i, j) = 0.3 * Complex{mag(rng) - 1.0, mag(rng) - 1.0};
            for (std::size_t i = 0; i < n; ++i)
                omega(i, i) = std::polar(mag(rng), ang(rng));
            const Positivity p = is_positive_definite(conj_transpose(omega) * omega);
            if (!p.positive) worst = std::max(worst, 1.0);
        }
        return worst;
    });

    out.add_guarded("expm_inverse_identity", 1e-10, std::to_string(seeds) + " seeds, |m|<=5",
                    [&] {
                        double worst = 0.0;
                        for (std::size_t k = 0; k < seeds; ++k) {
                            const std::size_t n = 2 + k % 3;
                            CMatrix m = random_matrix(rng, n, 1.0);
                            const double nm = fro_norm(m);
                            if (nm > 5.0) m *= Complex{5.0 / nm, 0.0};
                            const CMatrix prod = expm(m) * expm(Complex{-1.0, 0.0} * m);
                            worst = std::max(worst,
                                             fro_norm(prod - CMatrix::identity(n)));
                        }
                        return worst;
                    });

    {
        double worst = 0.0;
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (std::size_t k = 0; k < seeds; ++k) {
            const std::size_t n = 2 + k % 5;
            const bool upper = k % 2 == 0;
            CMatrix t(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    if (i == j || (upper ? j > i : j < i)) t(i, j) = Complex{u(rng), u(rng)};
            std::vector<Complex> diag(n);
            for (std::size_t i = 0; i < n; ++i) diag[i] = t(i, i);
            std::sort(diag.begin(), diag.end(), [](Complex a, Complex b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
            });
            const Spectrum s = eigenvalues(t);
            for (std::size_t i = 0; i < n; ++i)
                worst = std::max(worst, std::abs(s.eigenvalues[i] - diag[i]));
        }
        out.add("triangular_eigenvalues_exact", worst, 0.0,
                std::to_string(seeds) + " seeds, n<=6");
    }

    (void)base_tol;
}

void poly_property_checks(SuiteBuilder& out, std::size_t seeds) {
    std::mt19937_64 rng(0xC0FFEE22u);

    {
        double worst = 0.0;
        for (std::size_t k = 0; k < seeds; ++k) {
            const std::size_t n = 2 + k % 3;
            PolyMatrix a(n), b(n);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) {
                    a(i, j) = random_poly(rng, 3, 0.5);
                    b(i, j) = random_poly(rng, 3, 0.5);
                }
            const PolyMatrix ab = a * b;
            for (double t : {0.3, 0.7, 1.0}) {
                const CMatrix lhs = ab.eval(t);
                const CMatrix rhs = a.eval(t) * b.eval(t);
                worst = std::max(worst, rel_residual(lhs, rhs));
            }
        }
        out.add("polymatrix_eval_mul_consistency", worst, 1e-12,
                std::to_string(seeds) + " seeds, degree<=3");
    }

    {
        double worst = 0.0;
        for (std::size_t k = 0; k < seeds; ++k) {
            const CPoly p = random_dyadic_poly(rng, 3);
            const CPoly q = random_dyadic_poly(rng, 3);
            const CPoly lhs = (p * q).derivative();
            const CPoly rhs = p.derivative() * q + p * q.derivative();
            worst = std::max(worst, max_coeff_dist(lhs, rhs));
        }
        out.add("poly_derivative_leibniz", worst, 0.0,
                std::to_string(seeds) + " seeds, dyadic lattice coefficients");
    }

    out.add_guarded("poly_inverse_2x2_identity", 0.0,
                    std::to_string(seeds) + " seeds, unit-determinant inputs", [&] {
                        double worst = 0.0;
                        for (std::size_t k = 0; k < seeds; ++k) {
                            PolyMatrix l = PolyMatrix::identity(2);
                            l(1, 0) = random_dyadic_poly(rng, 2);
                            PolyMatrix u = PolyMatrix::identity(2);
                            u(0, 1) = random_dyadic_poly(rng, 2);
                            const PolyMatrix m = l * u;
                            const PolyMatrix prod = m * poly_inverse_2x2(m);
                            worst = std::max(
                                worst, max_coeff_dist(prod, PolyMatrix::identity(2)));
                        }
                        return worst;
                    });
}

// ---- pointwise identity checks on a model ---------------------------------

void pointwise_checks(SuiteBuilder& out, const PictureModel& model, double tol,
                      const std::vector<double>& probes) {
    const TimeMatrixFn sigma1 = coriolis(model.dyson().omega1);
    const TimeMatrixFn omega1_inv = inverse_fn(model.dyson().omega1);
    const TimeMatrixFn theta2_dot = model.theta2().derivative();
    const TimeMatrixFn g1 = generator(model, PictureTag::HIP_Kphysical);
    const TimeMatrixFn hs = generator(model, PictureTag::SP_textbook);
    const TimeMatrixFn o21 = omega21(model.dyson());

    CMatrix a_ref(model.dim());
    a_ref(0, 0) = 1.0;
    const TimeMatrixFn a1 = observable_hip(model, a_ref);

    for (double t : probes) {
        const std::string ctx = "t=" + fmt(t);

        out.add_guarded("quasi_hermiticity", tol, ctx, [&] {
            const CMatrix h = model.hamiltonian()(t);
            const CMatrix th = model.theta()(t);
            return rel_residual(conj_transpose(h) * th, th * h);
        });

        out.add_guarded("metric_factorization", tol, ctx, [&] {
            const CMatrix o1 = model.dyson().omega1(t);
            return rel_residual(model.theta()(t),
                                conj_transpose(o1) * model.theta2()(t) * o1);
        });

        out.add_guarded("coriolis_composition", tol, ctx, [&] {
            const CMatrix o1 = model.dyson().omega1(t);
            const CMatrix lhs = model.sigma()(t);
            const CMatrix rhs = omega1_inv(t) * model.sigma2()(t) * o1 + sigma1(t);
            return rel_residual(lhs, rhs);
        });

        out.add_guarded("metric_compatibility", tol, ctx, [&] {
            const CMatrix th2 = model.theta2()(t);
            const CMatrix g = g1(t);
            const CMatrix lhs = kI * theta2_dot(t);
            const CMatrix rhs = conj_transpose(g) * th2 - th2 * g;
            return rel_residual(lhs, rhs);
        });

        out.add_guarded("quasi_hermiticity_transport", tol, ctx, [&] {
            const CMatrix h1 = model.h1()(t);
            const CMatrix th2 = model.theta2()(t);
            return rel_residual(conj_transpose(h1) * th2, th2 * h1);
        });

        out.add_guarded("omega21_identity", tol, ctx, [&] {
            const CMatrix lhs = o21(t) * model.dyson().omega2(t);
            const CMatrix rhs = model.dyson().omega2(t) * model.dyson().omega1(t);
            return rel_residual(lhs, rhs);
        });

        out.add_guarded("hs_hermiticity", tol, ctx, [&] {
            const CMatrix h = hs(t);
            return rel_residual(h, conj_transpose(h));
        });

        out.add_guarded("hip_observable_rule", tol, ctx, [&] {
            const CMatrix o2 = model.dyson().omega2(t);
            return rel_residual(o2 * a1(t), a_ref * o2);
        });

        out.add_guarded("hip_observable_transport", tol, ctx, [&] {
            const CMatrix th2 = model.theta2()(t);
            const CMatrix a = a1(t);
            return rel_residual(conj_transpose(a) * th2, th2 * a);
        });
    }
}

void random_pipeline_checks(SuiteBuilder& out, std::size_t seeds, const std::string& names_ctx) {
    PipelineResiduals worst;
    for (std::size_t k = 0; k < seeds; ++k) {
        const PictureModel m = make_random_model(k);
        for (double t : {0.25, 0.5, 0.9}) {
            const PipelineResiduals r = pipeline_residuals(m, t);
            worst.metric_factorization =
                std::max(worst.metric_factorization, r.metric_factorization);
            worst.coriolis_composition =
                std::max(worst.coriolis_composition, r.coriolis_composition);
            worst.metric_compatibility =
                std::max(worst.metric_compatibility, r.metric_compatibility);
            worst.quasi_hermiticity_transport =
                std::max(worst.quasi_hermiticity_transport, r.quasi_hermiticity_transport);
        }
    }
    const double tol = 1e-9;
    out.add("metric_factorization", worst.metric_factorization, tol, names_ctx);
    out.add("coriolis_composition", worst.coriolis_composition, tol, names_ctx);
    out.add("metric_compatibility", worst.metric_compatibility, tol, names_ctx);
    out.add("quasi_hermiticity_transport", worst.quasi_hermiticity_transport, tol, names_ctx);
}

// ---- dynamics checks -------------------------------------------------------

double evolution_tolerance(const VerifyOptions& opts) {
    if (opts.integrator.method == IntegratorSpec::Method::DP54_adaptive)
        return 10.0 * std::max(opts.integrator.rtol, opts.integrator.atol);
    return 1e-7;
}

void evolution_checks(SuiteBuilder& out, const PictureModel& model, const VerifyOptions& opts) {
    const double tol = evolution_tolerance(opts);
    const std::vector<double> samples = linspace(model.t_min(), model.t_max(), 11);
    std::vector<Complex> e1(model.dim());
    e1[0] = 1.0;

    out.add_guarded("physical_norm_conservation", tol, "SP/NIP/HIP, basis initial state", [&] {
        double worst = 0.0;
        for (PictureTag tag : {PictureTag::SP_textbook, PictureTag::NIP_auxiliary,
                               PictureTag::HIP_Kphysical}) {
            const StateTrajectory traj =
                evolve_ket(model, tag, e1, opts.integrator, samples);
            const double n0 = traj.physical_norms.front();
            for (double n : traj.physical_norms)
                worst = std::max(worst, std::abs(n - n0) / n0);
        }
        return worst;
    });

    out.add_guarded("dual_overlap_invariance", tol, "HIP ket vs adjoint-evolved dual", [&] {
        const StateTrajectory traj =
            evolve_ket(model, PictureTag::HIP_Kphysical, e1, opts.integrator, samples, {}, true);
        Complex first{};
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            Complex overlap{};
            for (std::size_t i = 0; i < model.dim(); ++i)
                overlap += std::conj((*traj.dual_kets)[k][i]) * traj.kets[k][i];
            if (k == 0)
                first = overlap;
            else
                worst = std::max(worst, std::abs(overlap - first) / std::abs(first));
        }
        return worst;
    });

    out.add_guarded("dual_ket_consistency", tol, "integrated dual vs metric-weighted ket", [&] {
        const StateTrajectory traj =
            evolve_ket(model, PictureTag::HIP_Kphysical, e1, opts.integrator, samples, {}, true);
        double worst = 0.0;
        for (std::size_t k = 0; k < traj.times.size(); ++k) {
            const CMatrix th2 = model.theta2()(traj.times[k]);
            std::vector<Complex> expected = th2 * traj.kets[k];
            double diff = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < model.dim(); ++i) {
                diff += std::norm((*traj.dual_kets)[k][i] - expected[i]);
                scale += std::norm(expected[i]);
            }
            worst = std::max(worst, std::sqrt(diff) / std::max(std::sqrt(scale), 1e-300));
        }
        return worst;
    });

    out.add_guarded("picture_equivalence", tol, "SP vs NIP vs HIP expectation series", [&] {
        CMatrix a_ref(model.dim());
        a_ref(0, 0) = 1.0;
        const double t0 = samples.front();
        // Initial data is given in the hybrid frame and mapped outward.
        const std::vector<Complex> aux0 = inverse(model.dyson().omega1(t0)) * e1;
        const std::vector<Complex> sp0 = model.dyson().omega2(t0) * e1;
        const StateTrajectory sp =
            evolve_ket(model, PictureTag::SP_textbook, sp0, opts.integrator, samples, {a_ref});
        const StateTrajectory nip =
            evolve_ket(model, PictureTag::NIP_auxiliary, aux0, opts.integrator, samples, {a_ref});
        const StateTrajectory hip =
            evolve_ket(model, PictureTag::HIP_Kphysical, e1, opts.integrator, samples, {a_ref});
        double worst = 0.0;
        for (std::size_t k = 0; k < samples.size(); ++k) {
            const Complex base = sp.expectations[0][k];
            const double scale = std::max(1.0, std::abs(base));
            worst = std::max(worst, std::abs(nip.expectations[0][k] - base) / scale);
            worst = std::max(worst, std::abs(hip.expectations[0][k] - base) / scale);
        }
        return worst;
    });

    out.add_guarded("rk4_global_order", 0.3, "step-halving ladder, slope target 4", [&] {
        const double span = model.t_max() - model.t_min();
        const std::vector<double> ends = {model.t_min(), model.t_max()};
        const TimeMatrixFn gen = generator(model, PictureTag::HIP_Kphysical);
        const auto ref_states =
            evolve_generator(gen, e1, IntegratorSpec::dp54(1e-12, 1e-14), ends, nullptr);
        const std::vector<Complex>& ref = ref_states.back();
        std::vector<double> lh, le;
        for (double div : {10.0, 20.0, 40.0, 80.0}) {
            const double h = span / div;
            const auto states =
                evolve_generator(gen, e1, IntegratorSpec::rk4(h), ends, nullptr);
            double err = 0.0;
            for (std::size_t i = 0; i < ref.size(); ++i)
                err += std::norm(states.back()[i] - ref[i]);
            err = std::sqrt(err);
            if (err <= 0.0) continue;
            lh.push_back(std::log(h));
            le.push_back(std::log(err));
        }
        if (lh.size() < 2) throw NoConvergence("rk4_global_order: degenerate error ladder");
        const double n = static_cast<double>(lh.size());
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < lh.size(); ++i) {
            sx += lh[i];
            sy += le[i];
            sxx += lh[i] * lh[i];
            sxy += lh[i] * le[i];
        }
        const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        return std::abs(slope - 4.0);
    });
}

// ---- toy closed-form checks ------------------------------------------------

void toy_checks(SuiteBuilder& out, const PictureModel& model, const ToyParams& p,
                const VerifyOptions& opts, const std::vector<double>& probes) {
    const double tol = opts.tolerance;
    const ToyReference ref = toy_reference(p);
    const std::string pctx = "r=" + fmt(p.r) + " a=" + fmt(p.a) + " b=" + fmt(p.b);

    out.add_guarded("toy_reference_objects", tol, pctx + ", coefficientwise", [&] {
        double worst = 0.0;
        worst = std::max(worst, max_coeff_dist(model.theta().poly(), ref.theta));
        worst = std::max(worst, max_coeff_dist(model.theta2().poly(), ref.theta2));
        worst = std::max(worst, max_coeff_dist(model.h1().poly(), ref.h1));
        worst = std::max(worst, max_coeff_dist(model.sigma2().poly(), ref.sigma2));
        const PolyMatrix g1 = generator(model, PictureTag::HIP_Kphysical).poly();
        worst = std::max(worst, max_coeff_dist(g1, ref.g1));
        return worst;
    });

    {
        // Published connection and the generator doublet that follows from
        // it: agreement is expected only at r=1 (or for a frozen drive).
        double residual = 0.0;
        std::string ctx = pctx + ", published connection vs derived";
        try {
            const PolyMatrix sigma = model.sigma().poly();
            residual = max_coeff_dist(sigma, ref.sigma);
            const PolyMatrix g =
                toy_hamiltonian_with_s(p.r, toy_s(p)) - sigma; // derived interaction generator
            for (double t : probes) {
                Spectrum sp = eigenvalues(g.eval(t));
                std::vector<Complex> expect = {ref.g_eigen0.eval(t), ref.g_eigen1.eval(t)};
                std::sort(expect.begin(), expect.end(), [](Complex a, Complex b) {
                    if (a.real() != b.real()) return a.real() < b.real();
                    return a.imag() < b.imag();
                });
                for (std::size_t i = 0; i < 2; ++i)
                    residual = std::max(residual, std::abs(sp.eigenvalues[i] - expect[i]));
            }
        } catch (const Error& e) {
            residual = kInf;
            ctx += " [error: " + std::string(e.what()) + "]";
        }
        out.add_discrepancy_family("toy_sigma_consistency_point", residual, tol, ctx);
    }

    for (double t : probes) {
        const std::string ctx = pctx + " t=" + fmt(t);

        out.add_guarded("toy_g1_spectrum_exact", tol, ctx, [&] {
            const Spectrum sp = eigenvalues(generator(model, PictureTag::HIP_Kphysical)(t));
            std::vector<Complex> expect = {Complex{1.0 + t, 0.0}, Complex{2.0, 0.0}};
            std::sort(expect.begin(), expect.end(), [](Complex a, Complex b) {
                if (a.real() != b.real()) return a.real() < b.real();
                return a.imag() < b.imag();
            });
            double worst = 0.0;
            for (std::size_t i = 0; i < 2; ++i)
                worst = std::max(worst, std::abs(sp.eigenvalues[i] - expect[i]));
            return worst;
        });

        out.add_guarded("toy_metric_positivity", tol, ctx, [&] {
            const CMatrix th = model.theta()(t);
            const CMatrix th2 = model.theta2()(t);
            double worst = 0.0;
            if (!is_positive_definite(th).positive) worst = 1.0;
            if (!is_positive_definite(th2).positive) worst = 1.0;
            worst = std::max(worst, std::abs(determinant(th) - Complex{1.0, 0.0}));
            return worst;
        });
    }
}

} // namespace

PipelineResiduals pipeline_residuals(const PictureModel& model, double t) {
    PipelineResiduals r;
    const CMatrix o1 = model.dyson().omega1(t);
    const CMatrix th = model.theta()(t);
    const CMatrix th2 = model.theta2()(t);

    r.metric_factorization = rel_residual(th, conj_transpose(o1) * th2 * o1);

    const TimeMatrixFn sigma1 = coriolis(model.dyson().omega1);
    r.coriolis_composition = rel_residual(
        model.sigma()(t), inverse(o1) * model.sigma2()(t) * o1 + sigma1(t));

    const CMatrix g1 = generator(model, PictureTag::HIP_Kphysical)(t);
    r.metric_compatibility = rel_residual(kI * model.theta2().derivative()(t),
                                          conj_transpose(g1) * th2 - th2 * g1);

    const CMatrix h1 = model.h1()(t);
    r.quasi_hermiticity_transport = rel_residual(conj_transpose(h1) * th2, th2 * h1);
    return r;
}

PictureModel make_random_model(std::uint64_t seed) {
    std::mt19937_64 rng(0x9E3779B97F4A7C15ull ^ (seed * 0xBF58476D1CE4E5B9ull + 1));
    const std::size_t n = 2 + static_cast<std::size_t>(rng() % 3); // 2..4

    const PolyMatrix o1 = random_unit_triangular(rng, n, /*upper=*/true, 2, 0.5);
    const PolyMatrix o2 = random_unit_triangular(rng, n, /*upper=*/false, 2, 0.5);
    DysonFactorization dyson(TimeMatrixFn::exact(o1), TimeMatrixFn::exact(o2));

    // H similar to a constant Hermitian matrix, so H is quasi-Hermitian with
    // respect to the induced metric at every time.
    CMatrix h0 = random_matrix(rng, n, 1.0);
    h0 = 0.5 * Complex{1.0, 0.0} * (h0 + conj_transpose(h0));
    const TimeMatrixFn omega = full_dyson(dyson);
    const TimeMatrixFn h = inverse_fn(omega) * TimeMatrixFn::constant(h0) * omega;

    return PictureModel(std::move(dyson), h, 0.0, 1.0);
}

VerificationReport run_identity_suite(const PictureModel& model, const VerifyOptions& opts) {
    VerificationReport report;
    SuiteBuilder out(report);
    if (opts.include_property_checks) {
        matrix_property_checks(out, opts.property_seeds, opts.tolerance);
        poly_property_checks(out, opts.property_seeds);
    }
    const std::vector<double> probes = probe_times_for(model, opts);
    pointwise_checks(out, model, opts.tolerance, probes);
    if (opts.include_property_checks)
        random_pipeline_checks(out, opts.property_seeds,
                               std::to_string(opts.property_seeds) + " random models, n<=4");
    evolution_checks(out, model, opts);
    return report;
}

VerificationReport run_identity_suite(const ToyParams& params, const VerifyOptions& opts) {
    const PictureModel model = make_toy_model(params);
    VerificationReport report = run_identity_suite(model, opts);
    SuiteBuilder out(report);
    toy_checks(out, model, params, opts, probe_times_for(model, opts));
    return report;
}

VerificationReport run_toy_grid_suite(const ToyParamGrid& grid, const VerifyOptions& opts,
                                      std::size_t parallel) {
    if (grid.r.empty() || grid.a.empty() || grid.b.empty() || grid.t.empty())
        throw InvalidArgument("run_toy_grid_suite: empty grid axis");

    struct Tuple {
        double r, a, b;
    };
    std::vector<Tuple> tuples;
    for (double r : grid.r)
        for (double a : grid.a)
            for (double b : grid.b) tuples.push_back({r, a, b});

    double t_lo = grid.t.front(), t_hi = grid.t.front();
    for (double t : grid.t) {
        t_lo = std::min(t_lo, t);
        t_hi = std::max(t_hi, t);
    }
    if (!(t_hi > t_lo)) t_hi = t_lo + 1.0; // keep the model window nondegenerate

    std::vector<double> probes = grid.t;
    std::sort(probes.begin(), probes.end());

    std::vector<VerificationReport> partial(tuples.size());
    std::size_t workers = std::max<std::size_t>(1, std::min(parallel, tuples.size()));

    auto run_tuple = [&](std::size_t idx) {
        const Tuple& tp = tuples[idx];
        ToyParams p;
        p.r = tp.r;
        p.a = tp.a;
        p.b = tp.b;
        p.t_min = t_lo;
        p.t_max = t_hi;
        VerifyOptions o = opts;
        o.probe_times = probes;
        o.include_property_checks = opts.include_property_checks && idx == 0;
        partial[idx] = run_identity_suite(p, o);
    };

    if (workers <= 1) {
        for (std::size_t i = 0; i < tuples.size(); ++i) run_tuple(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::size_t> next{0};
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= tuples.size()) return;
                    run_tuple(i);
                }
            });
        for (std::thread& th : pool) th.join();
    }

    VerificationReport merged;
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        const std::string prefix = "r=" + fmt(tuples[i].r) + " a=" + fmt(tuples[i].a) +
                                   " b=" + fmt(tuples[i].b) + " | ";
        for (CheckResult c : partial[i].checks) {
            if (c.context.rfind(prefix, 0) != 0) c.context = prefix + c.context;
            merged.checks.push_back(std::move(c));
        }
    }
    return merged;
}

const ConditioningSeries* ConditioningReport::find(const std::string& name) const {
    for (const ConditioningSeries& s : series)
        if (s.name == name) return &s;
    return nullptr;
}

double growth_exponent(const std::vector<double>& times, const std::vector<double>& values) {
    if (times.size() != values.size() || times.size() < 2)
        throw InvalidArgument("growth_exponent: need matching series with >= 2 points");
    const double mid = 0.5 * (times.front() + times.back());
    std::vector<double> x, y;
    for (std::size_t k = 0; k < times.size(); ++k)
        if (times[k] >= mid) {
            x.push_back(times[k]);
            y.push_back(std::log(std::max(values[k], 1e-300)));
        }
    if (x.size() < 2) {
        x.assign(times.end() - 2, times.end());
        y.clear();
        for (auto it = values.end() - 2; it != values.end(); ++it)
            y.push_back(std::log(std::max(*it, 1e-300)));
    }
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

ConditioningSeries build_series(const std::string& name, const TimeMatrixFn& gen,
                                const IntegratorSpec& spec, const std::vector<double>& times) {
    ConditioningSeries s;
    s.name = name;
    s.times = times;
    s.spectra.reserve(times.size());
    for (double t : times) {
        Spectrum sp = eigenvalues(gen(t));
        for (const Complex& l : sp.eigenvalues)
            s.max_abs_imag = std::max(s.max_abs_imag, std::abs(l.imag()));
        s.spectra.push_back(std::move(sp));
    }
    const std::vector<CMatrix> props = propagator_series(gen, spec, times);
    s.propagator_fro.reserve(props.size());
    s.propagator_op.reserve(props.size());
    for (const CMatrix& u : props) {
        s.propagator_fro.push_back(fro_norm(u));
        s.propagator_op.push_back(op_norm_estimate(u));
    }
    s.growth_fro = growth_exponent(times, s.propagator_fro);
    s.growth_op = growth_exponent(times, s.propagator_op);
    return s;
}

} // namespace

ConditioningReport conditioning_compare(const PictureModel& model, const IntegratorSpec& spec,
                                        double t0, double t1, std::size_t grid_points,
                                        const std::optional<ToyParams>& toy) {
    if (!(t1 > t0)) throw InvalidArgument("conditioning_compare: window is degenerate");
    if (grid_points < 3) throw InvalidArgument("conditioning_compare: need >= 3 grid points");
    const std::vector<double> times = linspace(t0, t1, grid_points);

    ConditioningReport report;
    report.t0 = t0;
    report.t1 = t1;
    report.series.push_back(
        build_series("HIP_G1", generator(model, PictureTag::HIP_Kphysical), spec, times));
    report.series.push_back(
        build_series("NIP_G", generator(model, PictureTag::NIP_auxiliary), spec, times));
    if (toy) {
        // Variant built from the published connection; its doublet picks up
        // the imaginary part -(a + b t)(1 - r), the exponentially growing
        // branch of the comparison.
        const PolyMatrix g_pub =
            toy_hamiltonian_with_s(toy->r, toy_s(*toy)) - toy_reference(*toy).sigma;
        report.series.push_back(
            build_series("NIP_G_published", TimeMatrixFn::exact(g_pub), spec, times));
    }
    return report;
}

double omega1_distance(const PictureModel& model, double t) {
    return fro_norm(model.dyson().omega1(t) - CMatrix::identity(model.dim()));
}

} // namespace hipdyn
