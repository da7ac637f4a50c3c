#include "hipdyn/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <sstream>

#include "json.hpp"

namespace hipdyn {

using nlohmann::json;

namespace {

[[noreturn]] void bad(const std::string& field, const std::string& why) {
    throw InvalidConfig(field + ": " + why);
}

double as_double(const json& j, const std::string& path) {
    if (!j.is_number()) bad(path, "expected a number");
    return j.get<double>();
}

std::size_t as_count(const json& j, const std::string& path) {
    if (!j.is_number_unsigned()) bad(path, "expected a nonnegative integer");
    return j.get<std::size_t>();
}

std::string as_string(const json& j, const std::string& path) {
    if (!j.is_string()) bad(path, "expected a string");
    return j.get<std::string>();
}

Complex as_complex(const json& j, const std::string& path) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        bad(path, "expected a [re, im] pair");
    return Complex{j[0].get<double>(), j[1].get<double>()};
}

std::vector<double> as_double_list(const json& j, const std::string& path) {
    if (!j.is_array()) bad(path, "expected an array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k)
        out.push_back(as_double(j[k], path + "[" + std::to_string(k) + "]"));
    return out;
}

CMatrix as_cmatrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected a nonempty array of rows");
    const std::size_t n = j.size();
    CMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != n)
            bad(rp, "expected a row of length " + std::to_string(n));
        for (std::size_t c = 0; c < n; ++c)
            m(i, c) = as_complex(row[c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

CPoly as_poly(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected a nonempty coefficient list");
    std::vector<Complex> coeffs;
    coeffs.reserve(j.size());
    for (std::size_t k = 0; k < j.size(); ++k)
        coeffs.push_back(as_complex(j[k], path + "[" + std::to_string(k) + "]"));
    return CPoly(std::move(coeffs));
}

PolyMatrix as_poly_matrix(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty()) bad(path, "expected a nonempty array of rows");
    const std::size_t n = j.size();
    PolyMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) {
        const json& row = j[i];
        const std::string rp = path + "[" + std::to_string(i) + "]";
        if (!row.is_array() || row.size() != n)
            bad(rp, "expected a row of length " + std::to_string(n));
        for (std::size_t c = 0; c < n; ++c)
            m(i, c) = as_poly(row[c], rp + "[" + std::to_string(c) + "]");
    }
    return m;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

json cmatrix_json(const CMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(complex_json(m(i, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

json poly_json(const CPoly& p) {
    json coeffs = json::array();
    const int deg = p.degree();
    if (deg < 0) {
        coeffs.push_back(complex_json(Complex{}));
        return coeffs;
    }
    for (int k = 0; k <= deg; ++k)
        coeffs.push_back(complex_json(p.coefficient(static_cast<std::size_t>(k))));
    return coeffs;
}

json poly_matrix_json(const PolyMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        json row = json::array();
        for (std::size_t c = 0; c < m.dim(); ++c) row.push_back(poly_json(m(i, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

const char* method_name(IntegratorSpec::Method m) {
    return m == IntegratorSpec::Method::RK4_fixed ? "rk4" : "dp54";
}

IntegratorSpec integrator_from_json(const json& j) {
    IntegratorSpec spec;
    if (!j.is_object()) bad("integrator", "expected an object");
    const std::string method = as_string(j.value("method", json("rk4")), "integrator.method");
    if (method == "rk4")
        spec.method = IntegratorSpec::Method::RK4_fixed;
    else if (method == "dp54")
        spec.method = IntegratorSpec::Method::DP54_adaptive;
    else
        bad("integrator.method", "unknown method '" + method + "' (rk4 or dp54)");
    if (j.contains("step")) spec.step = as_double(j["step"], "integrator.step");
    if (j.contains("rtol")) spec.rtol = as_double(j["rtol"], "integrator.rtol");
    if (j.contains("atol")) spec.atol = as_double(j["atol"], "integrator.atol");
    if (j.contains("max_steps"))
        spec.max_steps = as_count(j["max_steps"], "integrator.max_steps");
    return spec;
}

json integrator_to_json(const IntegratorSpec& spec) {
    return json{{"method", method_name(spec.method)},
                {"step", spec.step},
                {"rtol", spec.rtol},
                {"atol", spec.atol},
                {"max_steps", spec.max_steps}};
}

ToyParamGrid grid_from_json(const json& j) {
    if (!j.is_object()) bad("toy_grid", "expected an object");
    ToyParamGrid g;
    if (j.contains("r")) g.r = as_double_list(j["r"], "toy_grid.r");
    if (j.contains("a")) g.a = as_double_list(j["a"], "toy_grid.a");
    if (j.contains("b")) g.b = as_double_list(j["b"], "toy_grid.b");
    if (j.contains("t")) g.t = as_double_list(j["t"], "toy_grid.t");
    return g;
}

json grid_to_json(const ToyParamGrid& g) {
    return json{{"r", g.r}, {"a", g.a}, {"b", g.b}, {"t", g.t}};
}

ScenarioConfig scenario_from_json(const json& j) {
    if (!j.is_object()) bad("config", "expected a JSON object");
    ScenarioConfig c;

    if (!j.contains("model")) bad("model", "missing");
    const json& jm = j["model"];
    if (!jm.is_object()) bad("model", "expected an object");
    if (jm.contains("builtin")) {
        c.model.builtin = true;
        const std::string name = as_string(jm["builtin"], "model.builtin");
        if (name != "toy2") bad("model.builtin", "unknown builtin '" + name + "'");
        if (jm.contains("toy")) {
            const json& jt = jm["toy"];
            if (!jt.is_object()) bad("model.toy", "expected an object");
            if (jt.contains("r")) c.model.toy.r = as_double(jt["r"], "model.toy.r");
            if (jt.contains("a")) c.model.toy.a = as_double(jt["a"], "model.toy.a");
            if (jt.contains("b")) c.model.toy.b = as_double(jt["b"], "model.toy.b");
        }
    } else {
        c.model.builtin = false;
        for (const char* key : {"omega1", "omega2", "hamiltonian"})
            if (!jm.contains(key)) bad(std::string("model.") + key, "missing");
        c.model.omega1 = as_poly_matrix(jm["omega1"], "model.omega1");
        c.model.omega2 = as_poly_matrix(jm["omega2"], "model.omega2");
        c.model.hamiltonian = as_poly_matrix(jm["hamiltonian"], "model.hamiltonian");
    }

    if (j.contains("picture")) {
        const std::string tag = as_string(j["picture"], "picture");
        try {
            c.picture = parse_picture_tag(tag);
        } catch (const InvalidArgument&) {
            bad("picture", "unknown picture tag '" + tag + "'");
        }
    }

    if (j.contains("initial_state")) {
        const json& js = j["initial_state"];
        if (!js.is_array() || js.empty()) bad("initial_state", "expected a nonempty array");
        c.initial_state.clear();
        for (std::size_t k = 0; k < js.size(); ++k)
            c.initial_state.push_back(
                as_complex(js[k], "initial_state[" + std::to_string(k) + "]"));
    }

    if (j.contains("observables")) {
        const json& jo = j["observables"];
        if (!jo.is_array()) bad("observables", "expected an array of matrices");
        for (std::size_t k = 0; k < jo.size(); ++k)
            c.observables.push_back(
                as_cmatrix(jo[k], "observables[" + std::to_string(k) + "]"));
    }

    if (j.contains("window")) {
        const json& jw = j["window"];
        if (!jw.is_object()) bad("window", "expected an object");
        if (jw.contains("t_min")) c.t_min = as_double(jw["t_min"], "window.t_min");
        if (jw.contains("t_max")) c.t_max = as_double(jw["t_max"], "window.t_max");
    }

    if (j.contains("integrator")) c.integrator = integrator_from_json(j["integrator"]);
    if (j.contains("sample_times"))
        c.sample_times = as_double_list(j["sample_times"], "sample_times");
    if (j.contains("toy_grid")) c.toy_grid = grid_from_json(j["toy_grid"]);
    if (j.contains("tolerance")) c.tolerance = as_double(j["tolerance"], "tolerance");
    return c;
}

json scenario_to_json(const ScenarioConfig& c) {
    json j;
    if (c.model.builtin) {
        j["model"] = json{{"builtin", "toy2"},
                          {"toy", json{{"r", c.model.toy.r},
                                       {"a", c.model.toy.a},
                                       {"b", c.model.toy.b}}}};
    } else {
        j["model"] = json{{"omega1", poly_matrix_json(*c.model.omega1)},
                          {"omega2", poly_matrix_json(*c.model.omega2)},
                          {"hamiltonian", poly_matrix_json(*c.model.hamiltonian)}};
    }
    j["picture"] = to_string(c.picture);
    json state = json::array();
    for (const Complex& z : c.initial_state) state.push_back(complex_json(z));
    j["initial_state"] = std::move(state);
    json obs = json::array();
    for (const CMatrix& m : c.observables) obs.push_back(cmatrix_json(m));
    j["observables"] = std::move(obs);
    j["window"] = json{{"t_min", c.t_min}, {"t_max", c.t_max}};
    j["integrator"] = integrator_to_json(c.integrator);
    j["sample_times"] = c.sample_times;
    if (c.toy_grid) j["toy_grid"] = grid_to_json(*c.toy_grid);
    if (c.tolerance) j["tolerance"] = *c.tolerance;
    return j;
}

} // namespace

void ScenarioConfig::validate() const {
    std::size_t dim = 2;
    if (model.builtin) {
        if (!(std::isfinite(model.toy.r) && std::isfinite(model.toy.a) &&
              std::isfinite(model.toy.b)))
            bad("model.toy", "parameters must be finite");
    } else {
        if (!model.omega1 || !model.omega2 || !model.hamiltonian)
            bad("model", "explicit model needs omega1, omega2 and hamiltonian");
        dim = model.omega1->dim();
        if (model.omega2->dim() != dim)
            bad("model.omega2", "dimension " + std::to_string(model.omega2->dim()) +
                                    " does not match omega1 dimension " + std::to_string(dim));
        if (model.hamiltonian->dim() != dim)
            bad("model.hamiltonian",
                "dimension " + std::to_string(model.hamiltonian->dim()) +
                    " does not match omega1 dimension " + std::to_string(dim));
    }

    if (initial_state.empty()) bad("initial_state", "must not be empty");
    if (initial_state.size() != dim)
        bad("initial_state", "dimension " + std::to_string(initial_state.size()) +
                                 " does not match model dimension " + std::to_string(dim));

    for (std::size_t k = 0; k < observables.size(); ++k) {
        const std::string field = "observables[" + std::to_string(k) + "]";
        if (observables[k].dim() != dim)
            bad(field, "dimension " + std::to_string(observables[k].dim()) +
                           " does not match model dimension " + std::to_string(dim));
        const double scale = std::max(1.0, fro_norm(observables[k]));
        if (hermiticity_residual(observables[k]) > 1e-10 * scale)
            bad(field, "matrix is not Hermitian");
    }

    if (!(t_min < t_max)) bad("window", "t_min must be strictly below t_max");

    try {
        integrator.validate();
    } catch (const Error& e) {
        bad("integrator", e.what());
    }

    if (sample_times.empty()) bad("sample_times", "must not be empty");
    for (std::size_t k = 0; k < sample_times.size(); ++k) {
        if (k > 0 && !(sample_times[k] > sample_times[k - 1]))
            bad("sample_times", "must be strictly increasing");
        if (sample_times[k] < t_min - 1e-12 || sample_times[k] > t_max + 1e-12)
            bad("sample_times", "value " + format17(sample_times[k]) +
                                    " lies outside the window");
    }

    if (toy_grid) {
        if (!model.builtin) bad("toy_grid", "only applies to the builtin model");
        if (toy_grid->r.empty()) bad("toy_grid.r", "must not be empty");
        if (toy_grid->a.empty()) bad("toy_grid.a", "must not be empty");
        if (toy_grid->b.empty()) bad("toy_grid.b", "must not be empty");
        if (toy_grid->t.empty()) bad("toy_grid.t", "must not be empty");
    }

    if (tolerance && !(*tolerance > 0.0 && std::isfinite(*tolerance)))
        bad("tolerance", "must be a positive finite number");
}

PictureModel ScenarioConfig::build_model() const {
    if (model.builtin) return make_toy_model(*toy_params());
    DysonFactorization dyson(TimeMatrixFn::exact(*model.omega1),
                             TimeMatrixFn::exact(*model.omega2));
    return PictureModel(std::move(dyson), TimeMatrixFn::exact(*model.hamiltonian), t_min,
                        t_max);
}

std::optional<ToyParams> ScenarioConfig::toy_params() const {
    if (!model.builtin) return std::nullopt;
    ToyParams p = model.toy;
    p.t_min = t_min;
    p.t_max = t_max;
    return p;
}

double ScenarioConfig::effective_tolerance() const {
    return tolerance ? *tolerance : default_tolerance();
}

ScenarioConfig default_scenario(const std::string& name) {
    if (name != "toy2") throw InvalidConfig("unknown default scenario '" + name + "'");
    ScenarioConfig c;
    c.model.builtin = true;
    c.model.toy = ToyParams{};
    c.picture = PictureTag::HIP_Kphysical;
    c.initial_state = {Complex{1.0, 0.0}, Complex{0.0, 0.0}};
    CMatrix a(2);
    a(0, 0) = 1.0;
    c.observables = {a};
    c.t_min = 0.0;
    c.t_max = 1.0;
    c.integrator = IntegratorSpec::rk4(1e-3);
    c.sample_times.clear();
    for (int k = 0; k <= 10; ++k) c.sample_times.push_back(0.1 * k);
    c.sample_times.back() = 1.0;
    c.toy_grid = ToyParamGrid{};
    return c;
}

ScenarioConfig parse_scenario(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw InvalidConfig("JSON parse error at byte " + std::to_string(e.byte) + ": " +
                            e.what());
    }
    ScenarioConfig c = scenario_from_json(j);
    c.validate();
    return c;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidConfig("cannot open config file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string scenario_json(const ScenarioConfig& c) { return scenario_to_json(c).dump(2) + "\n"; }

namespace {

// JSON has no infinity; the suite uses an infinite residual as the "check
// threw" sentinel, clamped here to a large finite marker.
double json_safe(double v) {
    if (std::isnan(v)) return 1e308;
    if (std::isinf(v)) return v > 0 ? 1e308 : -1e308;
    return v;
}

} // namespace

std::string report_json(const VerificationReport& r) {
    json checks = json::array();
    for (const CheckResult& c : r.checks)
        checks.push_back(json{{"name", c.name},
                              {"status", to_string(c.status)},
                              {"residual", json_safe(c.residual)},
                              {"tolerance", c.tolerance},
                              {"context", c.context}});
    json j{{"checks", std::move(checks)},
           {"summary",
            json{{"pass", r.count(CheckStatus::pass)},
                 {"fail", r.count(CheckStatus::fail)},
                 {"recorded_discrepancy", r.count(CheckStatus::recorded_discrepancy)}}}};
    return j.dump(2) + "\n";
}

std::string conditioning_json(const ConditioningReport& r) {
    json series = json::array();
    for (const ConditioningSeries& s : r.series)
        series.push_back(json{{"name", s.name},
                              {"max_abs_imag", json_safe(s.max_abs_imag)},
                              {"growth_fro", json_safe(s.growth_fro)},
                              {"growth_op", json_safe(s.growth_op)}});
    json j{{"t0", r.t0}, {"t1", r.t1}, {"series", std::move(series)}};
    return j.dump(2) + "\n";
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj) {
    const std::size_t dim = traj.kets.empty() ? 0 : traj.kets.front().size();
    const std::size_t n_obs = traj.expectations.size();

    os << "t";
    for (std::size_t i = 0; i < dim; ++i) os << ",re_psi" << i << ",im_psi" << i;
    os << ",physical_norm";
    for (std::size_t o = 0; o < n_obs; ++o) os << ",re_exp" << o << ",im_exp" << o;
    os << "\n";

    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        os << format17(traj.times[k]);
        for (std::size_t i = 0; i < dim; ++i)
            os << "," << format17(traj.kets[k][i].real()) << ","
               << format17(traj.kets[k][i].imag());
        os << "," << format17(traj.physical_norms[k]);
        for (std::size_t o = 0; o < n_obs; ++o)
            os << "," << format17(traj.expectations[o][k].real()) << ","
               << format17(traj.expectations[o][k].imag());
        os << "\n";
    }
}

void write_spectrum_csv(std::ostream& os, const ConditioningReport& r) {
    std::size_t dim = 0;
    for (const ConditioningSeries& s : r.series)
        if (!s.spectra.empty()) dim = std::max(dim, s.spectra.front().eigenvalues.size());
    os << "series,t";
    for (std::size_t i = 0; i < dim; ++i) os << ",re_eig" << i << ",im_eig" << i;
    os << "\n";
    for (const ConditioningSeries& s : r.series)
        for (std::size_t k = 0; k < s.times.size(); ++k) {
            os << s.name << "," << format17(s.times[k]);
            for (const Complex& l : s.spectra[k].eigenvalues)
                os << "," << format17(l.real()) << "," << format17(l.imag());
            os << "\n";
        }
}

void write_norms_csv(std::ostream& os, const ConditioningReport& r) {
    os << "series,t,fro,op\n";
    for (const ConditioningSeries& s : r.series)
        for (std::size_t k = 0; k < s.times.size(); ++k)
            os << s.name << "," << format17(s.times[k]) << ","
               << format17(s.propagator_fro[k]) << "," << format17(s.propagator_op[k])
               << "\n";
}

} // namespace hipdyn
