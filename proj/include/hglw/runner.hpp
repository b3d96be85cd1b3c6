#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hglw/diagnostics.hpp"
#include "hglw/scenario.hpp"

namespace hglw {

// Headline metrics of a finished scenario run (also written to disk).
struct RunResult {
    RunStatus status = RunStatus::Completed;
    std::string out_dir;
    double epsilon = 0;
    double dt = 0;
    long steps = 0;

    double energy_first = 0, energy_last = 0, energy_drift = 0; // max |E-E0|/|E0|
    double lagrangian_first = 0;
    double total_w_first = 0;
    std::optional<double> equipartition_first, equipartition_last;
    double identity_e_T00_max = 0, identity_trace_max = 0;
    double divergence_max = 0; // max over cadence points of the residual max-norm
    double hausdorff_max = 0;  // vs reference over all compared times
    double field_linf_max = 0; // vs exact reference
    double stationarity_max = 0;
    std::optional<ProjectionReport> projection;
    // (t, mean interface radius, mean deviation vs reference, rms deviation)
    std::vector<std::array<double, 4>> interface_series;
};

RunResult run_scenario(const Scenario& s, double epsilon_override = 0);

// Resume a checkpointed run; artifacts continue into the same output dir.
RunResult resume_scenario(const Scenario& s, const std::string& checkpoint_path);

struct ConvergenceRow {
    double epsilon = 0;
    RunStatus status = RunStatus::Completed;
    double hausdorff_max = 0;
    double field_linf_max = 0;
    double equipartition = 0;
    double stationarity_max = 0;
    double projection_trace = 0;
    double projection_lambda0 = 0;
    double energy_drift = 0;
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows; // ordered as epsilon_list
    // least-squares slope of log(metric) vs log(eps); 0 when undefined
    double order_hausdorff = 0;
    double order_stationarity = 0;
    bool hausdorff_monotone = false;
    bool stationarity_monotone = false;
    bool equipartition_monotone = false;
};

ConvergenceReport convergence_study(const Scenario& s);

struct RipplesRow {
    double lambda_r = 0;
    double amplitude = 0;
    double max_abs_mean_deviation = 0; // over compared times
    double final_mean_deviation = 0;
    double final_rms_deviation = 0;
    RunStatus status = RunStatus::Completed;
};

struct RipplesReport {
    std::vector<RipplesRow> rows;
};

RipplesReport ripples_study(const Scenario& s);

// `heatmap` verb: render one field of an n=2 snapshot to 16-bit PGM with a
// JSON sidecar recording the scaling.
void emit_heatmap(const std::string& snapshot_path, const std::string& field,
                  const std::string& out_path);

// built-in identity/exact-solution suite; returns the number of failures
int run_verification(std::ostream& os);

} // namespace hglw
