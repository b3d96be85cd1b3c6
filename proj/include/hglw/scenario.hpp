#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hglw/field.hpp"
#include "hglw/solver.hpp"

// Declarative experiment description parsed from flat key-value configs with
// dotted section prefixes (grammar documented in the README).  Unknown keys
// are errors; every defaulted field is echoed into a resolved config next to
// the outputs.

namespace hglw {

struct InitialSpec {
    std::string kind; // kink|circle|ellipse|planar_wave|vortex|vortex_pair|
                      // rotating_wave|ripples|snapshot
    double speed = 0;
    double offset = 0;
    std::array<double, 3> direction{1, 0, 0};
    double radius = 0.6;
    std::array<double, 2> center{0, 0};
    double semi_axis_a = 0.6, semi_axis_b = 0.3;
    double amplitude = 0.08, wavelength = 0.64; // planar_wave transverse profile
    double omega = 2.0;
    int charge = 1;
    std::vector<int> charges{1, -1};
    double separation = 0.5;
    double relax_time = 0, relax_damping = 5.0;
    double ripple_ratio = 0.2;                 // a / lambda_r
    std::vector<double> ripple_wavelengths;    // lambda_r sequence
    std::string file;                          // snapshot kind
};

struct OutputSpec {
    std::string dir = "out";
    int snapshot_every = 0;
    int diagnostics_every = 10;
    int interface_every = 0;
    int checkpoint_every = 0;
    std::vector<std::string> heatmap_fields; // written for the final snapshot, n = 2
};

struct DiagnosticsSpec {
    double equipartition_theta = 1e-3;
    bool stationarity = false;
    int stationarity_per_axis = 2;
    bool projection = false;
    double projection_tube_cells = 6; // tube radius in units of h
    bool divergence = false;          // per-cadence divergence residual columns
};

struct Scenario {
    std::string name = "run";
    int k = 1;
    double epsilon = 0.05;
    std::vector<double> epsilon_list; // non-empty: convergence mode

    int dim = 1;
    std::array<int, 3> cells{};
    std::array<double, 3> origin{};
    double extent = 0; // uniform per axis; spacing = extent / cells[a] (validated equal)
    Boundary boundary = Boundary::Periodic;

    SolverConfig solver;
    InitialSpec initial;
    std::string reference = "none"; // none|radial|front|graph|exact
    OutputSpec outputs;
    DiagnosticsSpec diagnostics;

    Grid make_grid() const;
    double spacing() const;
};

Scenario parse_config(const std::string& path);
Scenario parse_config_text(const std::string& text, const std::string& origin_hint = "<memory>");

// resolution rule + light-cone distance rule for non-periodic boundaries
void validate_scenario(const Scenario& s, double epsilon);

std::string resolved_config_text(const Scenario& s);

// Sampled initial data for the scenario (relaxation applied for vortex kinds).
FieldState build_initial_state(const Scenario& s, double epsilon);

// Member scenario of a ripples study: initial interface is a circle of radius
// r0 perturbed by a sin(2 pi theta r0 / lambda_r) with a = ratio * lambda_r,
// kink profile across the perturbed curve at rest.
Scenario ripples_scenario(const Scenario& base, double amplitude, double lambda_r, double r0);

// Closed-form field for reference.kind = exact (kink and rotating_wave;
// periodic kinks compare against the kink/antikink composition used for the
// initial data).  Empty function when the scenario has no closed form.
using ExactEval =
    std::function<void(double t, std::span<const double> x, double* u, double* ut)>;
ExactEval exact_field_evaluator(const Scenario& s, double epsilon);

// deterministic FNV-1a hash of the resolved config text (run manifests)
std::uint64_t config_hash(const std::string& text);

} // namespace hglw
