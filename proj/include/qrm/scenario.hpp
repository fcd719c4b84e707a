#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qrm/bands.hpp"
#include "qrm/compare.hpp"
#include "qrm/full_dynamics.hpp"
#include "qrm/series.hpp"
#include "qrm/units.hpp"

namespace qrm {

enum class Model { full, periodic, rabi };

std::string to_string(Model m);
/// Throws ConfigError for unknown names.
Model parse_model(const std::string& name);

/// Initial qubit state by name: "band0" (p = -2), "band1" (p = +2) or "superposition".
QubitAmplitudes parse_initial(const std::string& name);

/// Fock cutoff that holds the largest displacement 2g/w0 with a wide margin.
int automatic_cutoff(double g_over_w0);

/// One propagation of one model.
struct RunRequest {
    Model model = Model::full;
    SystemParams params{0.0, 1.0};
    QubitAmplitudes qubit = QubitAmplitudes::band(1);
    double t_max = 0.0;
    int n_records = 100;
    GridOverrides grid;
    std::optional<int> cutoff;
    std::optional<int> q_points;
    std::vector<double> snapshot_times; ///< full model only
};

struct ModelRun {
    ObservableSeries series;
    GridSpec grid;
    int q_points = 0;
    int cutoff = 0;
    std::vector<MomentumSnapshot> snapshots;
    double energy_offset = 0.0;
};

ModelRun run_model(const RunRequest& request);

/// Largest |E(t) - E(0)| relative to the raw initial energy (offset added back).
double relative_energy_drift(const ObservableSeries& s, double energy_offset);
double norm_drift(const ObservableSeries& s);

struct DynamicsCase {
    std::string label;
    double g_over_w0 = 0.0;
    double wq_over_w0 = 0.0;
    std::string initial = "band1";
};

struct BandScanConfig {
    double v = 2.0;
    int n_bands = 4;
    int q_resolution = 400;
    int n_max = default_plane_wave_cutoff;
};

struct Scenario {
    std::string name;
    std::string kind = "dynamics"; ///< "dynamics" or "bands"
    std::vector<Model> models{Model::full, Model::periodic, Model::rabi};
    std::vector<DynamicsCase> cases;
    double periods = 2.0; ///< trap periods 2 pi / w0
    int records_per_period = 100;
    std::optional<double> t_max; ///< overrides periods
    GridOverrides grid;
    std::optional<int> cutoff;
    std::optional<int> q_points;
    std::vector<double> snapshot_periods;
    double breakdown_threshold = default_breakdown_threshold;
    bool convergence = true;
    bool plots = true;
    BandScanConfig bands;
};

std::vector<std::string> builtin_scenario_names();
/// Throws ConfigError for unknown names.
Scenario builtin_scenario(const std::string& name);

/// Keys mirror the Scenario fields; a "base" key starts from a builtin.
Scenario scenario_from_json(const nlohmann::json& config);
nlohmann::json scenario_to_json(const Scenario& s);

struct CaseResult {
    DynamicsCase spec;
    SystemParams params{0.0, 1.0};
    RabiParams rabi;
    std::map<Model, ModelRun> runs;
    std::vector<ComparisonReport> comparisons;
    /// e.g. "full.dt_halving" -> largest change of any recorded observable.
    std::map<std::string, double> convergence;
    std::vector<std::string> faults;
};

struct ScenarioResult {
    std::string name;
    std::vector<CaseResult> cases;
    std::optional<BandTable> bands;
    nlohmann::json metadata;
    std::vector<std::filesystem::path> files;
    bool complete = true;
};

/// Runs every case and model (independent runs concurrently) and, when
/// out_dir is given, writes CSVs, the JSON sidecar and optional SVGs under
/// out_dir/<name>/.
ScenarioResult run_scenario(const Scenario& s, const std::optional<std::filesystem::path>& out_dir = std::nullopt);

nlohmann::json report_to_json(const ComparisonReport& r);

} // namespace qrm
