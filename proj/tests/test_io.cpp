#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "qrm/compare.hpp"
#include "qrm/csv.hpp"
#include "qrm/errors.hpp"
#include "qrm/scenario.hpp"
#include "qrm/svg.hpp"

using namespace qrm;
namespace fs = std::filesystem;

namespace {

ObservableSeries ramp(const std::string& model, double shift, int n = 11)
{
    ObservableSeries s;
    s.model = model;
    for (int i = 0; i < n; ++i) {
        Observables o;
        o.x = 0.1 * i + shift;
        o.p = -0.3 * i;
        o.q = 0.2 * i + shift * i;
        o.sigma_x = 1.0;
        o.norm = 1.0;
        o.energy = 1.0 / 3.0;
        s.append(0.5 * i, o, 1.0 - 0.01 * i, 0.0);
    }
    return s;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

fs::path scratch_dir(const std::string& name)
{
    const fs::path dir = fs::path(QRM_TEST_TMP) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("series comparison")
{
    const auto a = ramp("full", 0.0);
    const auto b = ramp("rabi", 0.009);
    const auto r = compare(a, b);
    CHECK(r.model_a == "full");
    CHECK(r.model_b == "rabi");
    CHECK(r.deviation("x").max_abs == doctest::Approx(0.009));
    CHECK(r.deviation("x").rms == doctest::Approx(0.009));
    CHECK(r.deviation("p").max_abs == 0.0);
    // dq = 0.009 i stays below 0.05 * 2 for i <= 10
    CHECK_FALSE(r.breakdown_time.has_value());

    const auto c = ramp("rabi", 0.023);
    const auto r2 = compare(a, c);
    REQUIRE(r2.breakdown_time.has_value());
    CHECK(*r2.breakdown_time == doctest::Approx(0.5 * 5)); // 0.023 i > 0.1 first at i = 5

    const auto windowed = compare(a, c, 0.05, 1.0, 2.0);
    CHECK(windowed.deviation("q").max_abs == doctest::Approx(0.092));

    CHECK(max_column_delta(a, b, {"x", "q"}) == doctest::Approx(0.09));
    CHECK_THROWS_AS(compare(a, ramp("x", 0.0, 5)), UsageError);
    CHECK_THROWS_AS(r.deviation("nonsense"), UsageError);
}

TEST_CASE("CSV round trip is exact")
{
    auto s = ramp("full", 1.0 / 7.0);
    s.x[3] = 1e-300;
    s.p[4] = -std::numeric_limits<double>::denorm_min();
    s.q[5] = 123456789.123456789;
    std::stringstream buffer;
    write_table(buffer, to_table(s));
    const auto back = to_series(read_table(buffer), "full");
    for (auto name : ObservableSeries::csv_columns) {
        const auto& u = s.column(name);
        const auto& v = back.column(name);
        REQUIRE(u.size() == v.size());
        for (std::size_t i = 0; i < u.size(); ++i)
            CHECK(u[i] == v[i]);
    }

    const fs::path dir = scratch_dir("csv");
    write_series(dir / "case_full.csv", s);
    const auto from_file = read_series(dir / "case_full.csv");
    CHECK(from_file.model == "case_full");
    CHECK(from_file.q == s.q);
}

TEST_CASE("CSV errors carry the line number")
{
    std::istringstream short_row("t,x\n0,1\n2\n");
    try {
        read_table(short_row);
        FAIL("accepted a short row");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream bad_number("t,x\n0,1\n1,abc\n");
    try {
        read_table(bad_number);
        FAIL("accepted a non-number");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
    }
    std::istringstream missing_column("t,x\n0,1\n");
    CHECK_THROWS_AS(to_series(read_table(missing_column), "m"), ParseError);
}

TEST_CASE("SVG output is deterministic")
{
    LineChart chart{"sigma_x", "t", "sigma_x", {{"full", {0, 1, 2}, {1, 0.5, -1}}, {"rabi", {0, 1, 2}, {1, 0.4, -0.9}}}};
    const auto a = render_svg(chart);
    CHECK(a == render_svg(chart));
    CHECK(a.find("<svg") == 0);
    CHECK(a.find("full") != std::string::npos);

    const auto empty = render_svg(LineChart{"empty", "t", "y", {}});
    CHECK(empty.find("</svg>") != std::string::npos);

    const fs::path dir = scratch_dir("svg");
    const auto files = emit_plots({ramp("full", 0.0), ramp("rabi", 0.01)}, dir, "demo", {"x", "q"});
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "demo_x.svg");
    CHECK(fs::exists(files[1]));
}

TEST_CASE("scenario configuration")
{
    CHECK(builtin_scenario_names() == std::vector<std::string>{"fig1", "fig2", "fig3", "fig4"});
    CHECK_THROWS_AS(builtin_scenario("fig9"), ConfigError);
    CHECK_THROWS_AS(parse_model("quantum"), ConfigError);
    CHECK(parse_model("rabi") == Model::rabi);

    const auto fig2 = builtin_scenario("fig2");
    REQUIRE(fig2.cases.size() == 2);
    CHECK(fig2.cases[0].g_over_w0 == 5.18);
    CHECK(fig2.cases[0].wq_over_w0 == 28.7);

    const auto derived = scenario_from_json({{"base", "fig4"}, {"name", "short"}, {"periods", 0.5}});
    CHECK(derived.name == "short");
    CHECK(derived.periods == 0.5);
    CHECK(derived.cases.size() == builtin_scenario("fig4").cases.size());

    const auto round = scenario_from_json(scenario_to_json(fig2));
    CHECK(scenario_to_json(round) == scenario_to_json(fig2));

    CHECK_THROWS_AS(scenario_from_json({{"name", "x"}, {"models", {"full", "nonsense"}}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"base", "fig2"}, {"periods", -1.0}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"base", "fig2"}, {"unknown_key", 1}}), ConfigError);
    CHECK_THROWS_AS(scenario_from_json({{"base", "fig2"}, {"cases", {{{"g_over_w0", "five"}}}}}), ConfigError);

    CHECK(automatic_cutoff(5.18) == 600);
    CHECK(automatic_cutoff(10.0) == 676);
}

TEST_CASE("small scenario runs and reproduces bit for bit")
{
    Scenario s;
    s.name = "tiny";
    s.cases = {{"", 5.0, 1.0, "band1"}};
    s.periods = 0.02;
    s.records_per_period = 200;
    s.plots = true;
    const fs::path first = scratch_dir("run1"), second = scratch_dir("run2");
    const auto a = run_scenario(s, first);
    const auto b = run_scenario(s, second);
    REQUIRE(a.complete);
    REQUIRE(b.complete);
    REQUIRE(a.cases.size() == 1);
    CHECK(a.cases[0].runs.size() == 3);
    CHECK(a.cases[0].comparisons.size() == 3);
    CHECK(a.cases[0].convergence.count("full.grid_doubling") == 1);
    for (const char* f : {"tiny_full.csv", "tiny_periodic.csv", "tiny_rabi.csv"}) {
        const auto one = slurp(first / "tiny" / f);
        CHECK_FALSE(one.empty());
        CHECK(one == slurp(second / "tiny" / f));
    }
    CHECK(fs::exists(first / "tiny" / "tiny.json"));
}
