#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "qrm/bands.hpp"
#include "qrm/errors.hpp"
#include "qrm/full_dynamics.hpp"

using namespace qrm;

namespace {

constexpr double pi = std::numbers::pi;

GridSpec small_grid(const SystemParams& p, double t_max = 1.0, int records = 1)
{
    return plan_grid(p, t_max, records);
}

double moment_x2(const GridWavefunction& s)
{
    double acc = 0.0;
    for (int j = 0; j < s.grid.n_points; ++j)
        acc += s.grid.position(j) * s.grid.position(j) * std::norm(s.psi(j));
    return acc * s.grid.dx();
}

} // namespace

TEST_CASE("folding into the first zone")
{
    auto check = [](double p, double q, int band) {
        const auto f = fold_to_bz(p);
        CHECK(f.q == doctest::Approx(q));
        CHECK(f.band == band);
        CHECK(bloch_momentum(f.q, f.band) == doctest::Approx(p));
    };
    check(-2.0, 0.0, 0);
    check(2.0, 0.0, 1);
    check(6.0, 0.0, 2);
    check(0.0, -2.0, 1);
    check(-4.0, -2.0, 0);
    check(3.9, 1.9, 1);
    check(-7.5, -1.5, -1);
}

TEST_CASE("grid planning rules")
{
    const auto p = from_ratios(5.18, 0.0);
    const auto g = plan_grid(p, 10.0, 7);
    CHECK(g.n_points >= 1024);
    CHECK(g.p_nyquist() >= 8.0);
    CHECK(std::fmod(g.x_half_width / (pi / 2), 1.0) == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(g.x_half_width >= 4.0 * classical_amplitude(p.w0()));
    CHECK(g.n_steps == 7L * g.record_stride);
    CHECK(g.dt * g.n_steps == doctest::Approx(10.0));
    CHECK(g.dt <= max_time_step(p) * (1 + 1e-12));

    GridOverrides bad;
    bad.n_points = 1000;
    CHECK_THROWS_AS(plan_grid(p, 1.0, 1, bad), ConfigError);
    bad.n_points = 1024;
    bad.x_half_width = 10.0; // rounded up to whole lattice periods
    CHECK(plan_grid(p, 1.0, 1, bad).x_half_width == doctest::Approx(7 * pi / 2));
    GridSpec odd = g;
    odd.x_half_width = 10.0;
    CHECK_THROWS_AS(odd.validate(), ConfigError);
    bad.x_half_width = 400 * pi / 2; // Nyquist below 8
    CHECK_THROWS_AS(plan_grid(p, 1.0, 1, bad), ConfigError);

    GridOverrides narrow;
    narrow.x_half_width = 4 * pi / 2;
    const auto tiny = plan_grid(p, 1.0, 1, narrow);
    CHECK_THROWS_AS(prepare_initial_state(p, tiny, QubitAmplitudes::band(1)), ConfigError);
}

TEST_CASE("prepared vacuum")
{
    // narrow enough in q that the Gaussian tail at the zone edge is below 1e-30
    const SystemParams p(0.0, 0.1);
    const auto g = small_grid(p);
    const auto s = prepare_initial_state(p, g, QubitAmplitudes::band(1));
    const auto o = observables(s, p);
    CHECK(o.norm == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(std::abs(o.x) < 1e-12);
    CHECK(o.p == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(std::abs(o.q) < 1e-12);
    CHECK(o.sigma_x == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(std::abs(o.sigma_z) < 1e-12);
    CHECK(o.leakage < 1e-10);
    // trap ground state of m w0^2 x^2/2 with m = 1/2: <x^2> = hbar/(2 m w0) = 1/w0
    CHECK(moment_x2(s) == doctest::Approx(1.0 / p.w0()).epsilon(1e-12));

    const auto lower = observables(prepare_initial_state(p, g, QubitAmplitudes::band(0)), p);
    CHECK(lower.sigma_x == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(lower.p == doctest::Approx(-2.0).epsilon(1e-12));

    const auto sup = observables(prepare_initial_state(p, g, QubitAmplitudes::equal_superposition()), p);
    CHECK(std::abs(sup.sigma_x) < 1e-12);
    CHECK(sup.sigma_z == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(sup.p) < 1e-12);
}

TEST_CASE("vacuum uncertainty product")
{
    for (double w0 : {0.04, 0.149, 0.3}) {
        const SystemParams p(0.0, w0);
        const auto s = prepare_initial_state(p, small_grid(p), QubitAmplitudes::band(0));
        const auto dist = momentum_distribution(s);
        double q2 = 0.0;
        for (Eigen::Index i = 0; i < dist.p.size(); ++i) {
            const double q = fold_to_bz(dist.p(i)).q;
            q2 += q * q * dist.probability(i);
        }
        CHECK(std::abs(moment_x2(s) * q2 - 0.25) < 1e-6);
    }
}

TEST_CASE("momentum distribution peaks")
{
    const SystemParams p(0.0, 1.0);
    const auto g = small_grid(p);
    for (int band : {0, 1}) {
        const auto dist = momentum_distribution(prepare_initial_state(p, g, QubitAmplitudes::band(band)));
        CHECK(dist.probability.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(dist.probability.minCoeff() >= 0.0);
        Eigen::Index arg = 0;
        dist.probability.maxCoeff(&arg);
        CHECK(dist.p(arg) == doctest::Approx(band == 0 ? -2.0 : 2.0));
    }
    const auto sup = momentum_distribution(prepare_initial_state(p, g, QubitAmplitudes::equal_superposition()));
    const Eigen::Index n = sup.p.size();
    double asym = 0.0;
    for (Eigen::Index i = 1; i < n; ++i)
        asym = std::max(asym, std::abs(sup.probability(i) - sup.probability(n - i)));
    CHECK(asym < 1e-14);
}

TEST_CASE("fidelity")
{
    const SystemParams p(0.0, 0.5);
    const auto g = small_grid(p);
    const auto a = prepare_initial_state(p, g, QubitAmplitudes::band(0));
    const auto b = prepare_initial_state(p, g, QubitAmplitudes::band(1));
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fidelity(a, b) < 1e-8);
    CHECK(fidelity(a, b) == doctest::Approx(fidelity(b, a)));

    const auto vac = prepare_coherent(p, g, 0.0, 0.0);
    for (auto [x0, p0] : {std::pair{1.5, 0.0}, std::pair{0.0, 0.7}, std::pair{-2.0, 0.4}}) {
        const double beta2 = p.w0() * x0 * x0 / 4.0 + p0 * p0 / p.w0();
        CHECK(std::abs(fidelity(vac, prepare_coherent(p, g, x0, p0)) - std::exp(-beta2)) < 1e-4);
    }

    GridSpec other = g;
    other.n_points *= 2;
    CHECK_THROWS_AS(fidelity(a, prepare_initial_state(p, other, QubitAmplitudes::band(0))), UsageError);
}

TEST_CASE("direct momentum sums invert")
{
    const SystemParams p(0.0, 1.0);
    const auto g = small_grid(p);
    const auto s = prepare_coherent(p, g, 0.8, 1.3);
    const auto phi = momentum_amplitudes(s);
    Eigen::VectorXd ps(g.n_points);
    for (int j = 0; j < g.n_points; ++j)
        ps(j) = g.momentum_index(j) * g.dp();
    CHECK((momentum_amplitudes_at(s, ps) - phi).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((synthesize(g, ps, phi, g.dp()).psi - s.psi).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trap ground state is stationary")
{
    const SystemParams p(0.0, 1.0);
    GridSpec g = small_grid(p);
    g.n_steps = 10000;
    const auto vac = prepare_coherent(p, g, 0.0, 0.0);
    auto s = vac;
    SplitStepPropagator prop(p, g);
    prop.advance(s, g.n_steps);
    CHECK(std::abs(s.norm() - 1.0) < 1e-10);
    CHECK(fidelity(vac, s) > 1.0 - 1e-6);
}

TEST_CASE("Ehrenfest motion in the bare trap")
{
    const SystemParams p(0.0, 0.6);
    const double period = 2 * pi / p.w0();
    GridSpec g = plan_grid(p, period, 40);
    const auto run = evolve(prepare_initial_state(p, g, QubitAmplitudes::band(1)), p);
    double worst = 0.0, drift = 0.0;
    const double e0 = run.series.energy.front();
    for (std::size_t i = 0; i < run.series.size(); ++i) {
        const double t = run.series.t[i];
        worst = std::max(worst, std::abs(run.series.p[i] - 2.0 * std::cos(p.w0() * t)));
        worst = std::max(worst, std::abs(run.series.x[i] - 4.0 / p.w0() * std::sin(p.w0() * t)));
        drift = std::max(drift, std::abs(run.series.energy[i] - e0));
    }
    CHECK(worst < 1e-6);
    CHECK(drift / (e0 + full_energy_offset(p)) < 1e-6);
    CHECK(run.series.norm.back() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("non-finite amplitudes stop the propagation")
{
    const SystemParams p(1.0, 1.0);
    const auto g = small_grid(p);
    auto s = prepare_initial_state(p, g, QubitAmplitudes::band(0));
    s.psi(17) = std::numeric_limits<double>::quiet_NaN();
    SplitStepPropagator prop(p, g);
    try {
        prop.advance(s, 3, 10);
        FAIL("no fault raised");
    } catch (const NumericalFault& f) {
        CHECK(f.step() == 13);
    }
}

TEST_CASE("weak-trap limit precesses like a two-level system")
{
    // v = 2 (wq = 1), w0 = 1e-3: the trap barely acts over a few qubit periods,
    // so each q evolves under the plane-wave Hamiltonian alone
    const SystemParams p(2.0, 1e-3);
    GridOverrides o;
    o.x_half_width = 192 * pi / 2;
    const double t_max = 4 * pi;
    const auto g = plan_grid(p, t_max, 16, o);
    const auto run = evolve(prepare_initial_state(p, g, QubitAmplitudes::band(1)), p);

    // oracle: exp(-i H_P(q) t) on the plane wave n_b = 1, averaged over the
    // vacuum q distribution (variance w0/4)
    const int n_max = 8, nq = 161;
    const double sq = std::sqrt(p.w0() / 4.0);
    std::vector<double> qs, ws;
    std::vector<Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>> solvers;
    double wsum = 0.0;
    for (int k = 0; k < nq; ++k) {
        const double q = -8 * sq + 16 * sq * k / (nq - 1);
        qs.push_back(q);
        ws.push_back(std::exp(-q * q / (2 * sq * sq)));
        wsum += ws.back();
        solvers.emplace_back(hp_matrix(q, p.v(), n_max));
    }
    double worst_x = 0.0, worst_z = 0.0;
    for (std::size_t i = 0; i < run.series.size(); ++i) {
        const double t = run.series.t[i];
        double sx = 0.0, sz = 0.0;
        for (int k = 0; k < nq; ++k) {
            const auto& es = solvers[k];
            Eigen::VectorXcd start = Eigen::VectorXcd::Zero(2 * n_max + 2);
            start(n_max + 1) = 1.0;
            Eigen::VectorXcd phase = (es.eigenvalues().cast<std::complex<double>>() * std::complex<double>(0, -t))
                                         .array()
                                         .exp();
            const Eigen::VectorXcd c = es.eigenvectors() * (phase.asDiagonal() * (es.eigenvectors().transpose() * start));
            sx += ws[k] * (std::norm(c(n_max)) - std::norm(c(n_max + 1)));
            sz += ws[k] * 2.0 * (std::conj(c(n_max)) * c(n_max + 1)).real();
        }
        worst_x = std::max(worst_x, std::abs(run.series.sigma_x[i] - sx / wsum));
        worst_z = std::max(worst_z, std::abs(run.series.sigma_z[i] - sz / wsum));
    }
    CHECK(worst_x < 2e-3);
    CHECK(worst_z < 2e-3);
    // and the precession is close to cos(wq t) with wq = v/2
    const double t_end = run.series.t.back();
    CHECK(std::abs(run.series.sigma_x.back() + std::cos(p.v() / 2 * t_end)) < 0.05);
}
