// Command-line front end: scenario configs in, CSV trajectories and JSON
// verification reports out. Exit codes: 0 ok, 1 verification failed,
// 2 input invalid, 3 runtime/numerical failure.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "hipdyn/scenario.hpp"

namespace {

using namespace hipdyn;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputInvalid = 2;
constexpr int kExitRuntimeFailure = 3;

std::ofstream open_output(const std::string& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open output file '" + path + "'");
    return out;
}

int run_simulate(const std::string& config_path, const std::string& out_dir) {
    const ScenarioConfig cfg = load_scenario_file(config_path);
    const PictureModel model = cfg.build_model();
    const StateTrajectory traj = evolve_ket(model, cfg.picture, cfg.initial_state,
                                            cfg.integrator, cfg.sample_times, cfg.observables);
    std::ofstream out = open_output(out_dir, "trajectory.csv");
    write_trajectory_csv(out, traj);
    std::cout << out_dir << "/trajectory.csv\n";
    return kExitOk;
}

int run_verify(const std::string& config_path, std::size_t parallel,
               const std::string& out_dir) {
    const ScenarioConfig cfg = load_scenario_file(config_path);
    VerifyOptions opts;
    opts.tolerance = cfg.effective_tolerance();
    opts.integrator = cfg.integrator;

    VerificationReport report;
    if (cfg.model.builtin && cfg.toy_grid)
        report = run_toy_grid_suite(*cfg.toy_grid, opts, parallel);
    else if (cfg.model.builtin)
        report = run_identity_suite(*cfg.toy_params(), opts);
    else
        report = run_identity_suite(cfg.build_model(), opts);

    const std::string doc = report_json(report);
    // persist before streaming: a closed stdout pipe must not eat the report
    if (!out_dir.empty()) {
        std::ofstream out = open_output(out_dir, "verify_report.json");
        out << doc;
    }
    std::cout << doc;
    return report.all_passed() ? kExitOk : kExitVerifyFailed;
}

int run_compare(const std::string& config_path, const std::string& out_dir) {
    const ScenarioConfig cfg = load_scenario_file(config_path);
    const PictureModel model = cfg.build_model();
    const std::size_t grid_points = std::max<std::size_t>(cfg.sample_times.size(), 33);
    const ConditioningReport report = conditioning_compare(
        model, cfg.integrator, cfg.t_min, cfg.t_max, grid_points, cfg.toy_params());

    {
        std::ofstream out = open_output(out_dir, "spectra.csv");
        write_spectrum_csv(out, report);
    }
    {
        std::ofstream out = open_output(out_dir, "propagator_norms.csv");
        write_norms_csv(out, report);
    }
    const std::string doc = conditioning_json(report);
    {
        std::ofstream out = open_output(out_dir, "growth.json");
        out << doc;
    }
    std::cout << doc;
    return kExitOk;
}

int run_spectrum(const std::string& config_path, const std::string& operator_name, double t) {
    const ScenarioConfig cfg = load_scenario_file(config_path);
    const PictureModel model = cfg.build_model();

    TimeMatrixFn op;
    if (operator_name == "H")
        op = model.hamiltonian();
    else if (operator_name == "H1")
        op = model.h1();
    else if (operator_name == "G")
        op = generator(model, PictureTag::NIP_auxiliary);
    else if (operator_name == "G1")
        op = generator(model, PictureTag::HIP_Kphysical);
    else if (operator_name == "Sigma")
        op = model.sigma();
    else if (operator_name == "Sigma2")
        op = model.sigma2();
    else if (operator_name == "Theta")
        op = model.theta();
    else if (operator_name == "Theta2")
        op = model.theta2();
    else
        throw InvalidConfig("unknown operator '" + operator_name +
                            "' (H, H1, G, G1, Sigma, Sigma2, Theta, Theta2)");

    const Spectrum s = eigenvalues(op(t));
    for (const Complex& l : s.eigenvalues)
        std::cout << format17(l.real()) << " " << format17(l.imag()) << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Quasi-Hermitian dynamics in factorized pictures"};
    app.require_subcommand(0, 1);

    std::string dump_name;
    app.add_option("--dump-default", dump_name,
                   "Print the named default scenario config (toy2) and exit");

    std::string sim_config, sim_out = ".";
    CLI::App* sim = app.add_subcommand("simulate", "Integrate a scenario, write trajectory.csv");
    sim->add_option("config", sim_config, "Scenario JSON file")->required();
    sim->add_option("-o,--output-dir", sim_out, "Output directory");

    std::string ver_config, ver_out;
    std::size_t ver_parallel = 1;
    CLI::App* ver = app.add_subcommand("verify", "Run the identity suite, print a JSON report");
    ver->add_option("config", ver_config, "Scenario JSON file")->required();
    ver->add_option("-o,--output-dir", ver_out, "Also write verify_report.json here");
    ver->add_option("--parallel", ver_parallel, "Fan grid points across N workers")
        ->check(CLI::PositiveNumber);

    std::string cmp_config, cmp_out = ".";
    CLI::App* cmp = app.add_subcommand(
        "compare", "Spectra, propagator norms and growth fits per picture");
    cmp->add_option("config", cmp_config, "Scenario JSON file")->required();
    cmp->add_option("-o,--output-dir", cmp_out, "Output directory");

    std::string spc_config, spc_operator;
    double spc_t = 0.0;
    CLI::App* spc = app.add_subcommand("spectrum", "Eigenvalues of a derived operator at t");
    spc->add_option("config", spc_config, "Scenario JSON file")->required();
    spc->add_option("operator", spc_operator, "H, H1, G, G1, Sigma, Sigma2, Theta, Theta2")
        ->required();
    spc->add_option("t", spc_t, "Evaluation time")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInputInvalid;
    }

    try {
        if (!dump_name.empty()) {
            std::cout << scenario_json(default_scenario(dump_name));
            return kExitOk;
        }
        if (sim->parsed()) return run_simulate(sim_config, sim_out);
        if (ver->parsed()) return run_verify(ver_config, ver_parallel, ver_out);
        if (cmp->parsed()) return run_compare(cmp_config, cmp_out);
        if (spc->parsed()) return run_spectrum(spc_config, spc_operator, spc_t);
        std::cerr << app.help();
        return kExitInputInvalid;
    } catch (const InvalidConfig& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputInvalid;
    } catch (const InvalidArgument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInputInvalid;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
}
