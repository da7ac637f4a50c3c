#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "hipdyn/verify.hpp"

namespace hipdyn {

/// Model selection: the built-in two-level model with its parameters, or an
/// explicit triple of polynomial matrices (map factors and Hamiltonian).
struct ModelSpec {
    bool builtin = true; ///< when true the name is "toy2" and `toy` applies
    ToyParams toy;
    std::optional<PolyMatrix> omega1;
    std::optional<PolyMatrix> omega2;
    std::optional<PolyMatrix> hamiltonian;
};

/// A complete scenario: model, picture, initial data, observables, window,
/// integrator, and output sample times. JSON encoding: complex numbers are
/// [re, im] pairs; a constant matrix is rows -> entries -> [re, im]; a
/// polynomial matrix is rows -> entries -> coefficient list -> [re, im].
struct ScenarioConfig {
    ModelSpec model;
    PictureTag picture = PictureTag::HIP_Kphysical;
    std::vector<Complex> initial_state;
    std::vector<CMatrix> observables;
    double t_min = 0.0;
    double t_max = 1.0;
    IntegratorSpec integrator;
    std::vector<double> sample_times;
    /// Parameter sweep for verification runs on the built-in model.
    std::optional<ToyParamGrid> toy_grid;
    /// Residual tolerance override; stronger than the HIPDYN_TOL variable.
    std::optional<double> tolerance;

    /// Consistency of every field; throws InvalidConfig naming the offending
    /// field on the first violation.
    void validate() const;

    /// Assembled model over [t_min, t_max].
    PictureModel build_model() const;

    /// Built-in model parameters when applicable (window attached).
    std::optional<ToyParams> toy_params() const;

    /// Precedence: explicit config tolerance, then HIPDYN_TOL, then 1e-10.
    double effective_tolerance() const;
};

/// Named default scenario; the only recognized name is "toy2".
ScenarioConfig default_scenario(const std::string& name);

/// Parse a scenario from JSON text. Parse errors and schema violations raise
/// InvalidConfig; parse errors carry the byte offset reported by the parser.
ScenarioConfig parse_scenario(const std::string& json_text);

/// Load and parse a scenario file.
ScenarioConfig load_scenario_file(const std::string& path);

/// Scenario as pretty-printed JSON. parse_scenario(scenario_json(c)) yields
/// a field-for-field identical scenario.
std::string scenario_json(const ScenarioConfig& c);

/// Verification report as JSON:
///   {checks: [{name, status, residual, tolerance, context}...],
///    summary: {pass, fail, recorded_discrepancy}}
/// Non-finite residuals are clamped to 1e308 so the document stays valid.
std::string report_json(const VerificationReport& r);

/// Conditioning growth-fit summary as JSON.
std::string conditioning_json(const ConditioningReport& r);

/// Shortest decimal form that round-trips a double (17 significant digits).
std::string format17(double v);

/// trajectory.csv: t, Re/Im of each ket component, physical_norm, then
/// Re/Im of each expectation column (omitted when no observables).
void write_trajectory_csv(std::ostream& os, const StateTrajectory& traj);

/// Generator spectra per series: series, t, then Re/Im per eigenvalue.
void write_spectrum_csv(std::ostream& os, const ConditioningReport& r);

/// Propagator norms per series: series, t, fro, op.
void write_norms_csv(std::ostream& os, const ConditioningReport& r);

} // namespace hipdyn
