#include "qrm/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numbers>
#include <sstream>
#include <string_view>

#include "qrm/csv.hpp"
#include "qrm/errors.hpp"
#include "qrm/periodic_rabi.hpp"
#include "qrm/rabi_fock.hpp"
#include "qrm/svg.hpp"

#ifndef QRM_VERSION
#define QRM_VERSION "dev"
#endif

namespace qrm {

using nlohmann::json;

namespace {

const std::vector<std::string> delta_columns{"x", "p", "q", "sigma_x", "sigma_z", "p_in", "energy", "leakage"};

double t_max_of(const Scenario& s, const SystemParams& params)
{
    return s.t_max.value_or(s.periods * 2.0 * std::numbers::pi / params.w0());
}

int n_records_of(const Scenario& s, const SystemParams& params)
{
    const double periods = t_max_of(s, params) * params.w0() / (2.0 * std::numbers::pi);
    return std::max(1, static_cast<int>(std::lround(periods * s.records_per_period)));
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> allowed, const std::string& where)
{
    if (!j.is_object())
        throw ConfigError(where + " entry must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw ConfigError("unknown " + where + " key '" + key + "'");
}

std::string tag(const std::string& scenario, const DynamicsCase& c)
{
    return c.label.empty() ? scenario : scenario + "_" + c.label;
}

json grid_to_json(const GridOverrides& g)
{
    json j = json::object();
    if (g.n_points)
        j["n_points"] = *g.n_points;
    if (g.dt)
        j["dt"] = *g.dt;
    if (g.x_half_width)
        j["x_half_width"] = *g.x_half_width;
    return j;
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out)
{
    if (!j.contains(key))
        return;
    if (j.at(key).is_null())
        out.reset();
    else
        out = j.at(key).get<T>();
}

Table snapshot_table(const std::vector<MomentumSnapshot>& snaps)
{
    Table t;
    if (snaps.empty())
        return t;
    t.header.push_back("p");
    const auto& p = snaps.front().distribution.p;
    t.columns.emplace_back(p.data(), p.data() + p.size());
    for (const auto& s : snaps) {
        t.header.push_back("t=" + format_number(s.t));
        const auto& w = s.distribution.probability;
        t.columns.emplace_back(w.data(), w.data() + w.size());
    }
    return t;
}

Table band_csv(const BandTable& b)
{
    Table t;
    t.header.push_back("q");
    t.columns.emplace_back(b.q_grid.data(), b.q_grid.data() + b.q_grid.size());
    for (Eigen::Index n = 0; n < b.energies.rows(); ++n) {
        t.header.push_back("E" + std::to_string(n));
        Eigen::VectorXd row = b.energies.row(n).transpose();
        t.columns.emplace_back(row.data(), row.data() + row.size());
    }
    for (Eigen::Index n = 0; n < b.free_energies.rows(); ++n) {
        t.header.push_back("free" + std::to_string(n));
        Eigen::VectorXd row = b.free_energies.row(n).transpose();
        t.columns.emplace_back(row.data(), row.data() + row.size());
    }
    for (int n = 0; n < 2; ++n) {
        t.header.push_back("two_band" + std::to_string(n));
        std::vector<double> col;
        for (Eigen::Index i = 0; i < b.q_grid.size(); ++i)
            col.push_back(two_band_energies(b.q_grid(i), b.v)[n]);
        t.columns.push_back(std::move(col));
    }
    return t;
}

} // namespace

std::string to_string(Model m)
{
    switch (m) {
    case Model::full: return "full";
    case Model::periodic: return "periodic";
    case Model::rabi: return "rabi";
    }
    return "unknown";
}

Model parse_model(const std::string& name)
{
    if (name == "full")
        return Model::full;
    if (name == "periodic")
        return Model::periodic;
    if (name == "rabi")
        return Model::rabi;
    throw ConfigError("unknown model '" + name + "' (expected full, periodic or rabi)");
}

QubitAmplitudes parse_initial(const std::string& name)
{
    if (name == "band0")
        return QubitAmplitudes::band(0);
    if (name == "band1")
        return QubitAmplitudes::band(1);
    if (name == "superposition")
        return QubitAmplitudes::equal_superposition();
    throw ConfigError("unknown initial state '" + name + "' (expected band0, band1 or superposition)");
}

int automatic_cutoff(double g_over_w0)
{
    const double reach = 2.0 * std::abs(g_over_w0) + 6.0;
    return std::max(default_fock_cutoff, static_cast<int>(std::ceil(reach * reach)));
}

double relative_energy_drift(const ObservableSeries& s, double energy_offset)
{
    if (s.energy.empty())
        return 0.0;
    double worst = 0.0;
    for (double e : s.energy)
        worst = std::max(worst, std::abs(e - s.energy.front()));
    const double scale = std::abs(s.energy.front() + energy_offset);
    return scale > 0.0 ? worst / scale : worst;
}

double norm_drift(const ObservableSeries& s)
{
    double worst = 0.0;
    for (double n : s.norm)
        worst = std::max(worst, std::abs(n - 1.0));
    return worst;
}

ModelRun run_model(const RunRequest& r)
{
    const GridSpec grid = plan_grid(r.params, r.t_max, r.n_records, r.grid);
    ModelRun out;
    out.grid = grid;
    const RabiParams rp = to_rabi_params(r.params);

    switch (r.model) {
    case Model::full: {
        EvolveOptions options{r.snapshot_times};
        auto evo = evolve(prepare_initial_state(r.params, grid, r.qubit), r.params, options);
        out.series = std::move(evo.series);
        out.snapshots = std::move(evo.snapshots);
        out.energy_offset = full_energy_offset(r.params);
        break;
    }
    case Model::periodic: {
        out.q_points = r.q_points.value_or(quasi_momentum_points_for(grid.x_half_width));
        const TwoBandState initial = from_grid_state(prepare_initial_state(r.params, grid, r.qubit), out.q_points);
        out.series = evolve_periodic(initial, r.params, TimeStepping::of(grid)).series;
        out.energy_offset = periodic_energy_offset(r.params);
        break;
    }
    case Model::rabi: {
        out.cutoff = r.cutoff.value_or(automatic_cutoff(rp.g_over_w0()));
        std::vector<double> times;
        for (long step = 0; step <= grid.n_steps; step += grid.record_stride)
            times.push_back(step * grid.dt);
        out.series = evolve_fock(fock_initial(r.qubit, out.cutoff), rp, times).series;
        out.energy_offset = 0.5 * rp.w0; // zero-point, only sets the drift scale
        break;
    }
    }
    return out;
}

std::vector<std::string> builtin_scenario_names()
{
    return {"fig1", "fig2", "fig3", "fig4"};
}

Scenario builtin_scenario(const std::string& name)
{
    Scenario s;
    s.name = name;
    if (name == "fig1") {
        s.kind = "bands";
        s.models.clear();
        s.convergence = false;
    } else if (name == "fig2") {
        s.cases = {{"ddsc", 5.18, 28.7, "band1"}, {"dsc", 5.18, 0.0, "band1"}};
    } else if (name == "fig3") {
        s.cases = {{"ddsc", 7.7, 7.7 / 0.43, "band0"}, {"dsc", 10.0, 1.0, "band0"}};
        s.snapshot_periods = {0.0, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    } else if (name == "fig4") {
        s.cases = {{"", 5.18, 0.0, "band1"}};
        s.periods = 6.0;
    } else {
        throw ConfigError("unknown builtin scenario '" + name + "' (expected fig1, fig2, fig3 or fig4)");
    }
    return s;
}

Scenario scenario_from_json(const json& j)
{
    try {
        if (!j.is_object())
            throw ConfigError("scenario config must be a JSON object");
        reject_unknown(j, {"base", "name", "kind", "models", "cases", "periods", "records_per_period", "t_max", "grid",
                           "cutoff", "q_points", "snapshot_periods", "breakdown_threshold", "convergence", "plots",
                           "bands"},
                       "scenario");
        Scenario s;
        if (j.contains("base"))
            s = builtin_scenario(j.at("base").get<std::string>());
        if (j.contains("name"))
            s.name = j.at("name").get<std::string>();
        if (s.name.empty())
            throw ConfigError("scenario needs a name");
        if (j.contains("kind"))
            s.kind = j.at("kind").get<std::string>();
        if (s.kind != "dynamics" && s.kind != "bands")
            throw ConfigError("kind must be 'dynamics' or 'bands'");
        if (j.contains("models")) {
            s.models.clear();
            for (const auto& m : j.at("models"))
                s.models.push_back(parse_model(m.get<std::string>()));
        }
        if (j.contains("cases")) {
            s.cases.clear();
            for (const auto& c : j.at("cases")) {
                reject_unknown(c, {"label", "g_over_w0", "wq_over_w0", "initial"}, "case");
                DynamicsCase dc;
                dc.label = c.value("label", "");
                dc.g_over_w0 = c.at("g_over_w0").get<double>();
                dc.wq_over_w0 = c.at("wq_over_w0").get<double>();
                dc.initial = c.value("initial", "band1");
                parse_initial(dc.initial);
                s.cases.push_back(dc);
            }
        }
        s.periods = j.value("periods", s.periods);
        s.records_per_period = j.value("records_per_period", s.records_per_period);
        read_optional(j, "t_max", s.t_max);
        if (j.contains("grid")) {
            const auto& g = j.at("grid");
            reject_unknown(g, {"n_points", "dt", "x_half_width"}, "grid");
            read_optional(g, "n_points", s.grid.n_points);
            read_optional(g, "dt", s.grid.dt);
            read_optional(g, "x_half_width", s.grid.x_half_width);
        }
        read_optional(j, "cutoff", s.cutoff);
        read_optional(j, "q_points", s.q_points);
        if (j.contains("snapshot_periods"))
            s.snapshot_periods = j.at("snapshot_periods").get<std::vector<double>>();
        s.breakdown_threshold = j.value("breakdown_threshold", s.breakdown_threshold);
        s.convergence = j.value("convergence", s.convergence);
        s.plots = j.value("plots", s.plots);
        if (j.contains("bands")) {
            const auto& b = j.at("bands");
            reject_unknown(b, {"v", "n_bands", "q_resolution", "n_max"}, "bands");
            s.bands.v = b.value("v", s.bands.v);
            s.bands.n_bands = b.value("n_bands", s.bands.n_bands);
            s.bands.q_resolution = b.value("q_resolution", s.bands.q_resolution);
            s.bands.n_max = b.value("n_max", s.bands.n_max);
        }

        if (s.kind == "dynamics" && s.cases.empty())
            throw ConfigError("dynamics scenario '" + s.name + "' has no cases");
        if (s.kind == "dynamics" && s.models.empty())
            throw ConfigError("dynamics scenario '" + s.name + "' has no models");
        if (!(s.periods > 0.0) || (s.t_max && !(*s.t_max > 0.0)))
            throw ConfigError("the time window must be positive");
        if (s.records_per_period < 1)
            throw ConfigError("records_per_period must be >= 1");
        if (!(s.breakdown_threshold > 0.0))
            throw ConfigError("breakdown_threshold must be positive");
        if (s.cutoff && *s.cutoff < 101)
            throw ConfigError("cutoff must be > 100 (the convergence check runs at cutoff - 100)");
        for (const auto& c : s.cases) {
            if (!(c.g_over_w0 > 0.0))
                throw ConfigError("g_over_w0 must be positive");
            if (!(c.wq_over_w0 >= 0.0))
                throw ConfigError("wq_over_w0 must be non-negative");
        }
        return s;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed scenario config: ") + e.what());
    }
}

json scenario_to_json(const Scenario& s)
{
    json j;
    j["name"] = s.name;
    j["kind"] = s.kind;
    j["models"] = json::array();
    for (auto m : s.models)
        j["models"].push_back(to_string(m));
    j["cases"] = json::array();
    for (const auto& c : s.cases)
        j["cases"].push_back(
            {{"label", c.label}, {"g_over_w0", c.g_over_w0}, {"wq_over_w0", c.wq_over_w0}, {"initial", c.initial}});
    j["periods"] = s.periods;
    j["records_per_period"] = s.records_per_period;
    j["t_max"] = s.t_max ? json(*s.t_max) : json(nullptr);
    j["grid"] = grid_to_json(s.grid);
    j["cutoff"] = s.cutoff ? json(*s.cutoff) : json(nullptr);
    j["q_points"] = s.q_points ? json(*s.q_points) : json(nullptr);
    j["snapshot_periods"] = s.snapshot_periods;
    j["breakdown_threshold"] = s.breakdown_threshold;
    j["convergence"] = s.convergence;
    j["plots"] = s.plots;
    j["bands"] = {{"v", s.bands.v},
                  {"n_bands", s.bands.n_bands},
                  {"q_resolution", s.bands.q_resolution},
                  {"n_max", s.bands.n_max}};
    return j;
}

json report_to_json(const ComparisonReport& r)
{
    json j;
    j["models"] = {r.model_a, r.model_b};
    j["window"] = {r.t_begin, r.t_end};
    j["threshold"] = r.threshold;
    j["breakdown_time"] = r.breakdown_time ? json(*r.breakdown_time) : json(nullptr);
    j["max_leakage"] = r.max_leakage();
    for (const auto& d : r.deviations)
        j["deviations"][d.observable] = {{"max", d.max_abs}, {"rms", d.rms}};
    return j;
}

namespace {

struct Job {
    std::size_t case_index;
    Model model;
    std::string variant; ///< "" for the reference run
    RunRequest request;
};

std::vector<Job> plan_jobs(const Scenario& s)
{
    std::vector<Job> jobs;
    for (std::size_t ci = 0; ci < s.cases.size(); ++ci) {
        const auto& c = s.cases[ci];
        const SystemParams params = from_ratios(c.g_over_w0, c.wq_over_w0);
        RunRequest base;
        base.params = params;
        base.qubit = parse_initial(c.initial);
        base.t_max = t_max_of(s, params);
        base.n_records = n_records_of(s, params);
        base.grid = s.grid;
        base.cutoff = s.cutoff;
        base.q_points = s.q_points;
        const GridSpec planned = plan_grid(params, base.t_max, base.n_records, base.grid);

        for (Model m : s.models) {
            RunRequest r = base;
            r.model = m;
            if (m == Model::full)
                for (double f : s.snapshot_periods)
                    r.snapshot_times.push_back(f * 2.0 * std::numbers::pi / params.w0());
            jobs.push_back({ci, m, "", r});
            if (!s.convergence)
                continue;
            if (m != Model::rabi) {
                RunRequest half = r;
                half.snapshot_times.clear();
                half.grid.dt = planned.dt / 2.0;
                jobs.push_back({ci, m, "dt_halving", half});
            }
            if (m == Model::full) {
                RunRequest doubled = r;
                doubled.snapshot_times.clear();
                doubled.grid.n_points = 2 * planned.n_points;
                doubled.grid.x_half_width = planned.x_half_width;
                jobs.push_back({ci, m, "grid_doubling", doubled});
            }
            if (m == Model::rabi) {
                RunRequest smaller = r;
                smaller.cutoff = r.cutoff.value_or(automatic_cutoff(c.g_over_w0)) - 100;
                jobs.push_back({ci, m, "cutoff_reduction", smaller});
            }
        }
    }
    return jobs;
}

void write_json(const std::filesystem::path& path, const json& j)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw UsageError("cannot open '" + path.string() + "' for writing");
    out << j.dump(2) << '\n';
}

ScenarioResult run_bands(const Scenario& s, const std::optional<std::filesystem::path>& out_dir)
{
    ScenarioResult res;
    res.name = s.name;
    const auto& b = s.bands;
    res.bands = dispersion_scan(b.v, b.n_bands, b.q_resolution, b.n_max);
    const auto e0 = band_energies(0.0, b.v, 2, b.n_max);
    const auto two = two_band_energies(0.0, b.v);
    json meta;
    meta["scenario"] = s.name;
    meta["version"] = QRM_VERSION;
    meta["config"] = scenario_to_json(s);
    meta["gap_at_q0"] = {{"converged", e0[1] - e0[0]},
                         {"two_band", two[1] - two[0]},
                         {"converged_over_v", b.v > 0.0 ? (e0[1] - e0[0]) / b.v : 0.0},
                         {"two_band_over_v", b.v > 0.0 ? (two[1] - two[0]) / b.v : 0.0}};
    if (out_dir) {
        const auto dir = *out_dir / s.name;
        std::filesystem::create_directories(dir);
        const auto csv = dir / (s.name + "_bands.csv");
        const Table table = band_csv(*res.bands);
        write_table(csv, table);
        res.files.push_back(csv);
        if (s.plots) {
            LineChart chart{s.name + ": band structure, v = " + format_number(b.v), "q [hbar k0]", "E [E_r]", {}};
            for (std::size_t c = 1; c < table.header.size(); ++c)
                chart.curves.push_back({table.header[c], table.columns[0], table.columns[c]});
            const auto svg = dir / (s.name + "_bands.svg");
            std::ofstream(svg, std::ios::binary) << render_svg(chart);
            res.files.push_back(svg);
        }
        meta["files"] = json::array();
        for (const auto& f : res.files)
            meta["files"].push_back(f.filename().string());
        const auto sidecar = dir / (s.name + ".json");
        write_json(sidecar, meta);
        res.files.push_back(sidecar);
    }
    res.metadata = std::move(meta);
    return res;
}

} // namespace

ScenarioResult run_scenario(const Scenario& s, const std::optional<std::filesystem::path>& out_dir)
{
    if (s.kind == "bands")
        return run_bands(s, out_dir);

    const std::vector<Job> jobs = plan_jobs(s);
    std::vector<std::future<ModelRun>> futures;
    futures.reserve(jobs.size());
    for (const auto& job : jobs)
        futures.push_back(std::async(std::launch::async, run_model, job.request));

    ScenarioResult res;
    res.name = s.name;
    res.cases.resize(s.cases.size());
    for (std::size_t ci = 0; ci < s.cases.size(); ++ci) {
        auto& cr = res.cases[ci];
        cr.spec = s.cases[ci];
        cr.params = from_ratios(cr.spec.g_over_w0, cr.spec.wq_over_w0);
        cr.rabi = to_rabi_params(cr.params);
    }

    std::map<std::pair<std::size_t, Model>, std::map<std::string, ModelRun>> variants;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        const auto& job = jobs[i];
        auto& cr = res.cases[job.case_index];
        try {
            ModelRun run = futures[i].get();
            if (job.variant.empty())
                cr.runs[job.model] = std::move(run);
            else
                variants[{job.case_index, job.model}][job.variant] = std::move(run);
        } catch (const Error& e) {
            cr.faults.push_back(to_string(job.model) + (job.variant.empty() ? "" : "." + job.variant) + ": " +
                                e.kind() + ": " + e.what());
            res.complete = false;
        }
    }

    for (std::size_t ci = 0; ci < res.cases.size(); ++ci) {
        auto& cr = res.cases[ci];
        for (auto& [model, run] : cr.runs) {
            for (auto& [variant, other] : variants[{ci, model}]) {
                try {
                    cr.convergence[to_string(model) + "." + variant] =
                        max_column_delta(run.series, other.series, delta_columns);
                } catch (const Error& e) {
                    cr.faults.push_back(to_string(model) + "." + variant + ": " + e.what());
                    res.complete = false;
                }
            }
        }
        const std::vector<std::pair<Model, Model>> pairs{
            {Model::full, Model::periodic}, {Model::full, Model::rabi}, {Model::periodic, Model::rabi}};
        for (auto [a, b] : pairs)
            if (cr.runs.count(a) && cr.runs.count(b))
                cr.comparisons.push_back(
                    compare(cr.runs.at(a).series, cr.runs.at(b).series, s.breakdown_threshold));
    }

    json meta;
    meta["scenario"] = s.name;
    meta["version"] = QRM_VERSION;
    meta["config"] = scenario_to_json(s);
    meta["complete"] = res.complete;
    meta["cases"] = json::array();

    std::filesystem::path dir;
    if (out_dir) {
        dir = *out_dir / s.name;
        std::filesystem::create_directories(dir);
    }

    for (auto& cr : res.cases) {
        const std::string prefix = tag(s.name, cr.spec);
        json jc;
        jc["label"] = cr.spec.label;
        jc["initial"] = cr.spec.initial;
        jc["ratios"] = {{"g_over_w0", cr.spec.g_over_w0}, {"wq_over_w0", cr.spec.wq_over_w0}};
        jc["params"] = {{"v", cr.params.v()}, {"w0", cr.params.w0()}, {"g", cr.rabi.g}, {"wq", cr.rabi.wq}};
        jc["faults"] = cr.faults;
        jc["convergence"] = cr.convergence;
        jc["comparisons"] = json::array();
        for (const auto& r : cr.comparisons)
            jc["comparisons"].push_back(report_to_json(r));
        jc["files"] = json::array();

        std::vector<ObservableSeries> all;
        for (const auto& [model, run] : cr.runs) {
            const std::string name = to_string(model);
            json jm;
            jm["t_max"] = run.series.t.empty() ? 0.0 : run.series.t.back();
            jm["records"] = run.series.size();
            jm["energy_drift_relative"] = relative_energy_drift(run.series, run.energy_offset);
            jm["norm_drift"] = norm_drift(run.series);
            if (model != Model::rabi) {
                jm["grid"] = {{"n_points", run.grid.n_points},
                              {"x_half_width", run.grid.x_half_width},
                              {"dt", run.grid.dt},
                              {"n_steps", run.grid.n_steps},
                              {"record_stride", run.grid.record_stride}};
                jm["max_leakage"] = run.series.leakage.empty()
                                        ? 0.0
                                        : *std::max_element(run.series.leakage.begin(), run.series.leakage.end());
                if (!run.series.q_tail.empty())
                    jm["max_q_tail"] = *std::max_element(run.series.q_tail.begin(), run.series.q_tail.end());
            }
            if (model == Model::periodic)
                jm["q_points"] = run.q_points;
            if (model == Model::rabi) {
                jm["cutoff"] = run.cutoff;
                jm["cutoff_warning"] = run.series.cutoff_warning;
            }
            jc["models"][name] = jm;
            all.push_back(run.series);

            if (out_dir) {
                const auto csv = dir / (prefix + "_" + name + ".csv");
                write_series(csv, run.series);
                res.files.push_back(csv);
                jc["files"].push_back(csv.filename().string());
                if (!run.snapshots.empty()) {
                    const auto snap = dir / (prefix + "_" + name + "_momentum.csv");
                    write_table(snap, snapshot_table(run.snapshots));
                    res.files.push_back(snap);
                    jc["files"].push_back(snap.filename().string());
                }
            }
        }
        if (out_dir && s.plots && !all.empty()) {
            for (const auto& f : emit_plots(all, dir / "plots", prefix)) {
                res.files.push_back(f);
                jc["files"].push_back(("plots" / f.filename()).string());
            }
        }
        meta["cases"].push_back(jc);
    }

    if (out_dir) {
        const auto sidecar = dir / (s.name + ".json");
        write_json(sidecar, meta);
        res.files.push_back(sidecar);
    }
    res.metadata = std::move(meta);
    return res;
}

} // namespace qrm
