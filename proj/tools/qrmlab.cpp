#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qrm/bands.hpp"
#include "qrm/compare.hpp"
#include "qrm/csv.hpp"
#include "qrm/errors.hpp"
#include "qrm/scenario.hpp"
#include "qrm/svg.hpp"

namespace {

using nlohmann::json;

int report_error(const std::string& kind, const std::string& message, std::optional<long> line = std::nullopt)
{
    json j{{"error", kind}, {"message", message}};
    if (line)
        j["line"] = *line;
    std::cerr << j.dump() << '\n';
    return kind == "usage_error" ? 2 : 1;
}

struct Overrides {
    std::optional<double> dt;
    std::optional<int> n_points;
    std::optional<int> cutoff;
    std::optional<double> t_max;

    void attach(CLI::App* app)
    {
        app->add_option("--dt", dt, "time step [hbar/E_r]");
        app->add_option("--n-points", n_points, "position grid points (power of two >= 1024)");
        app->add_option("--cutoff", cutoff, "Fock cutoff N");
        app->add_option("--t-max", t_max, "end time [hbar/E_r]");
    }

    void apply(qrm::Scenario& s) const
    {
        if (dt)
            s.grid.dt = dt;
        if (n_points)
            s.grid.n_points = n_points;
        if (cutoff)
            s.cutoff = cutoff;
        if (t_max)
            s.t_max = t_max;
    }
};

void emit(const qrm::Table& table, const std::optional<std::string>& path)
{
    if (path)
        qrm::write_table(std::filesystem::path(*path), table);
    else
        qrm::write_table(std::cout, table);
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum Rabi model from cold atoms in a trapped lattice"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(QRM_VERSION));

    // bands
    auto* bands = app.add_subcommand("bands", "Bloch band structure");
    double band_v = 2.0;
    int n_bands = 4, q_resolution = 400, n_max = qrm::default_plane_wave_cutoff;
    std::optional<std::string> bands_out;
    bands->add_option("--v", band_v, "lattice depth V/E_r");
    bands->add_option("--n-bands", n_bands, "number of bands");
    bands->add_option("--q-resolution", q_resolution, "quasi-momentum points");
    bands->add_option("--n-max", n_max, "plane-wave cutoff");
    bands->add_option("-o,--output", bands_out, "CSV file (default stdout)");

    // evolve
    auto* evolve = app.add_subcommand("evolve", "Propagate one model and write its observables as CSV");
    std::string model = "full", initial = "band1";
    double g_over_w0 = 5.18, wq_over_w0 = 0.0, periods = 2.0;
    int records_per_period = 100;
    std::optional<int> q_points;
    std::optional<std::string> evolve_out;
    Overrides evolve_overrides;
    evolve->add_option("--model", model, "full, periodic or rabi")->check(CLI::IsMember({"full", "periodic", "rabi"}));
    evolve->add_option("--g-over-w0", g_over_w0, "coupling ratio g/w0");
    evolve->add_option("--wq-over-w0", wq_over_w0, "frequency ratio wq/w0");
    evolve->add_option("--initial", initial, "band0, band1 or superposition");
    evolve->add_option("--periods", periods, "trap periods to simulate");
    evolve->add_option("--records-per-period", records_per_period, "records per trap period");
    evolve->add_option("--q-points", q_points, "quasi-momentum points (periodic model)");
    evolve->add_option("-o,--output", evolve_out, "CSV file (default stdout)");
    evolve_overrides.attach(evolve);

    // compare
    auto* cmp = app.add_subcommand("compare", "Compare two observable CSVs recorded at the same times");
    std::string csv_a, csv_b;
    double threshold = qrm::default_breakdown_threshold;
    cmp->add_option("a", csv_a, "first CSV")->required();
    cmp->add_option("b", csv_b, "second CSV")->required();
    cmp->add_option("--threshold", threshold, "breakdown threshold in units of 2 hbar k0");

    // scenario
    auto* scen = app.add_subcommand("scenario", "Run a builtin or configured scenario");
    std::optional<std::string> scenario_name, config_path;
    std::string out_dir = "out";
    bool no_convergence = false, no_plots = false;
    Overrides scen_overrides;
    scen->add_option("name", scenario_name, "builtin name (fig1..fig4) or 'all'");
    scen->add_option("--config", config_path, "JSON scenario file");
    scen->add_option("--out-dir", out_dir, "output directory");
    scen->add_flag("--no-convergence", no_convergence, "skip dt-halving, grid-doubling and cutoff runs");
    scen->add_flag("--no-plots", no_plots, "skip SVG output");
    scen_overrides.attach(scen);

    // plot
    auto* plot = app.add_subcommand("plot", "Draw SVG line charts from observable CSVs");
    std::vector<std::string> plot_inputs;
    std::string plot_dir = "plots", plot_prefix = "plot";
    std::vector<std::string> plot_columns = qrm::plotted_observables;
    plot->add_option("inputs", plot_inputs, "CSV files")->required();
    plot->add_option("--out-dir", plot_dir, "output directory");
    plot->add_option("--prefix", plot_prefix, "file name prefix");
    plot->add_option("--observables", plot_columns, "columns to draw");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        return report_error("usage_error", e.what());
    }

    try {
        if (*bands) {
            const auto table = qrm::dispersion_scan(band_v, n_bands, q_resolution, n_max);
            qrm::Table out;
            out.header.push_back("q");
            out.columns.emplace_back(table.q_grid.data(), table.q_grid.data() + table.q_grid.size());
            for (Eigen::Index b = 0; b < table.energies.rows(); ++b) {
                out.header.push_back("E" + std::to_string(b));
                Eigen::VectorXd row = table.energies.row(b).transpose();
                out.columns.emplace_back(row.data(), row.data() + row.size());
            }
            emit(out, bands_out);
        } else if (*evolve) {
            qrm::RunRequest r;
            r.model = qrm::parse_model(model);
            r.params = qrm::from_ratios(g_over_w0, wq_over_w0);
            r.qubit = qrm::parse_initial(initial);
            const double period = 2.0 * std::numbers::pi / r.params.w0();
            r.t_max = evolve_overrides.t_max.value_or(periods * period);
            r.n_records = std::max(1, static_cast<int>(std::lround(r.t_max / period * records_per_period)));
            r.grid.dt = evolve_overrides.dt;
            r.grid.n_points = evolve_overrides.n_points;
            r.cutoff = evolve_overrides.cutoff;
            r.q_points = q_points;
            const auto run = qrm::run_model(r);
            emit(qrm::to_table(run.series), evolve_out);
            if (run.series.cutoff_warning)
                std::cerr << json{{"warning", "cutoff"}, {"message", "Fock cutoff population above 1e-8"}}.dump() << '\n';
        } else if (*cmp) {
            const auto a = qrm::read_series(csv_a);
            const auto b = qrm::read_series(csv_b);
            std::cout << qrm::report_to_json(qrm::compare(a, b, threshold)).dump(2) << '\n';
        } else if (*scen) {
            std::vector<qrm::Scenario> scenarios;
            if (config_path) {
                std::ifstream in(*config_path);
                if (!in)
                    throw qrm::UsageError("cannot open config '" + *config_path + "'");
                json j;
                try {
                    j = json::parse(in);
                } catch (const json::parse_error& e) {
                    throw qrm::ConfigError(std::string("config is not valid JSON: ") + e.what());
                }
                scenarios.push_back(qrm::scenario_from_json(j));
            } else if (scenario_name && *scenario_name == "all") {
                for (const auto& n : qrm::builtin_scenario_names())
                    scenarios.push_back(qrm::builtin_scenario(n));
            } else if (scenario_name) {
                scenarios.push_back(qrm::builtin_scenario(*scenario_name));
            } else {
                throw qrm::UsageError("scenario needs a builtin name or --config");
            }
            bool complete = true;
            for (auto& s : scenarios) {
                scen_overrides.apply(s);
                if (no_convergence)
                    s.convergence = false;
                if (no_plots)
                    s.plots = false;
                const auto result = qrm::run_scenario(s, std::filesystem::path(out_dir));
                complete = complete && result.complete;
                std::cout << json{{"scenario", s.name},
                                  {"complete", result.complete},
                                  {"sidecar", (std::filesystem::path(out_dir) / s.name / (s.name + ".json")).string()}}
                                 .dump()
                          << '\n';
            }
            if (!complete)
                return report_error("numerical_fault", "some runs failed; see the sidecar 'faults' entries");
        } else if (*plot) {
            std::vector<qrm::ObservableSeries> series;
            for (const auto& path : plot_inputs)
                series.push_back(qrm::read_series(path));
            for (const auto& f : qrm::emit_plots(series, plot_dir, plot_prefix, plot_columns))
                std::cout << f.string() << '\n';
        }
    } catch (const qrm::ParseError& e) {
        return report_error(e.kind(), e.what(), e.line());
    } catch (const qrm::Error& e) {
        return report_error(e.kind(), e.what());
    } catch (const std::exception& e) {
        return report_error("internal_error", e.what());
    }
    return 0;
}
