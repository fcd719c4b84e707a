#include "qrm/full_dynamics.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qrm/errors.hpp"
#include "fold_edges.hpp"

namespace qrm {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double half_period = pi / 2.0; // lattice period of cos(4x)
// Momentum reach of the dynamics: band centre 2 plus the largest
// quasi-momentum excursion 2*sqrt(w0)*g/w0 = 4.
constexpr double momentum_reach = 6.0;
constexpr double edge_tail_limit = 1e-12;

// Highest momentum that repeated lattice scattering from the reach still
// populates with amplitude >= floor (first-order estimate per order).
double scattered_reach(double v, double floor)
{
    double p = momentum_reach, amplitude = 1.0;
    while (v > 0.0) {
        const double next = p + units::reciprocal;
        amplitude *= (v / 4.0) / (next * next - momentum_reach * momentum_reach);
        if (amplitude < floor)
            break;
        p = next;
    }
    return p;
}

int floor_div(int a, int b)
{
    int d = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0)))
        --d;
    return d;
}

double trap_ground_amplitude(double w0, double x)
{
    return std::pow(w0 / (2.0 * pi), 0.25) * std::exp(-w0 * x * x / 4.0);
}

void check_edge_tail(double w0, const GridSpec& grid, double centre)
{
    const double edge = grid.x_half_width - std::abs(centre);
    const double ratio = std::exp(-w0 * edge * edge / 2.0);
    if (!(ratio < edge_tail_limit)) {
        const double needed = std::abs(centre) + std::sqrt(-2.0 * std::log(edge_tail_limit) / w0);
        std::ostringstream msg;
        msg << "initial Gaussian tail at the box edge is " << ratio << " (limit " << edge_tail_limit
            << "); x_half_width must be at least " << needed;
        throw ConfigError(msg.str());
    }
}

Eigen::ArrayXd potential_on(const GridSpec& grid, const SystemParams& params)
{
    Eigen::ArrayXd u(grid.n_points);
    const double trap = params.w0() * params.w0() / 4.0;
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.position(j);
        u(j) = 0.5 * params.v() * std::cos(4.0 * x) + trap * x * x;
    }
    return u;
}

Eigen::ArrayXd kinetic_on(const GridSpec& grid)
{
    Eigen::ArrayXd t(grid.n_points);
    for (int j = 0; j < grid.n_points; ++j) {
        const double p = grid.momentum_index(j) * grid.dp();
        t(j) = p * p;
    }
    return t;
}

Eigen::ArrayXcd phases(const Eigen::ArrayXd& energy, double tau)
{
    return energy.unaryExpr([tau](double e) { return std::polar(1.0, -e * tau); });
}

detail::EdgeJet amplitude_jet(const GridWavefunction& state, double p)
{
    const GridSpec& g = state.grid;
    detail::EdgeJet jet{};
    for (int j = 0; j < g.n_points; ++j) {
        const double x = g.position(j);
        cplx term = state.psi(j) * std::polar(1.0, -p * x);
        for (auto& d : jet) {
            d += term;
            term *= cplx(0.0, -x);
        }
    }
    for (auto& d : jet)
        d *= g.dx() / std::sqrt(2.0 * pi);
    return jet;
}

// Observables from position amplitudes and their continuum momentum amplitudes.
Observables observe_from(const GridWavefunction& state, const Eigen::VectorXcd& phi, const Eigen::ArrayXd& potential,
                         const Eigen::ArrayXd& kinetic)
{
    const GridSpec& g = state.grid;
    const double dx = g.dx();
    const double dp = g.dp();
    const int k4 = g.fold_stride();
    const int n = g.n_points;

    Observables o;
    const Eigen::ArrayXd density = state.psi.array().abs2();
    o.norm = density.sum() * dx;
    double x_mean = 0.0;
    for (int j = 0; j < n; ++j)
        x_mean += g.position(j) * density(j);
    o.x = x_mean * dx;

    const Eigen::ArrayXd prob = phi.array().abs2() * dp;
    double p_mean = 0.0, q_mean = 0.0, band0 = 0.0, band1 = 0.0, other = 0.0, tail = 0.0;
    auto add_band = [&](int band, double w) {
        if (band == 0)
            band0 += w;
        else if (band == 1)
            band1 += w;
        else
            other += w;
    };
    auto tally = [&](int band, double q, double w) {
        q_mean += q * w;
        if (std::abs(q) > zone_tail_threshold)
            tail += w;
        add_band(band, w);
    };
    for (int j = 0; j < n; ++j) {
        const int k = g.momentum_index(j);
        p_mean += k * dp * prob(j);
        const int band = floor_div(k + k4, k4);
        if (k % k4 == 0) {
            // boundary samples are split between q = -2 of their band and
            // q = +2 of the band below (trapezoid rule)
            tally(band, -2.0, 0.5 * prob(j));
            tally(band - 1, 2.0, 0.5 * prob(j));
        } else {
            tally(band, (k + k4 / 2 - band * k4) * dp, prob(j));
        }
    }
    const int k_lo = -(n / 2 / k4) * k4;
    for (int k = k_lo; k < n / 2; k += k4) {
        const double moved = detail::upward_transfer(amplitude_jet(state, k * dp), dp);
        const int band = k / k4 + 1;
        add_band(band, moved);
        add_band(band - 1, -moved);
        q_mean -= 4.0 * moved;
    }
    o.p = p_mean;
    o.q = q_mean;
    o.sigma_x = band0 - band1;
    o.leakage = other;
    o.q_tail = tail;

    // sigma_z = 2 Re sum_q phi*(q - 2) phi(q + 2) over q in [-2, 2]
    auto bin = [n](int k) { return k < 0 ? k + n : k; };
    cplx overlap = 0.5 * (std::conj(phi(bin(-k4))) * phi(bin(0)) + std::conj(phi(bin(0))) * phi(bin(k4)));
    for (int k = -k4 + 1; k < 0; ++k)
        overlap += std::conj(phi(bin(k))) * phi(bin(k + k4));
    const auto jm = amplitude_jet(state, -4.0), j0 = amplitude_jet(state, 0.0), jp = amplitude_jet(state, 4.0);
    o.sigma_z = 2.0 * (overlap * dp + detail::product_end_correction(jm, j0, j0, jp, dp)).real();

    o.energy = (prob * kinetic).sum() + (density * potential).sum() * dx;
    return o;
}

Eigen::VectorXcd continuum_momentum(const GridSpec& g, const Eigen::VectorXcd& transformed)
{
    Eigen::VectorXcd phi = transformed * (g.dx() / std::sqrt(2.0 * pi));
    // x_0 = -L contributes exp(i p_k L) = (-1)^k
    for (int j = 1; j < g.n_points; j += 2)
        phi(j) = -phi(j);
    return phi;
}

} // namespace

int GridSpec::fold_stride() const
{
    return static_cast<int>(std::lround(4.0 / dp()));
}

void GridSpec::validate() const
{
    if (n_points < 1024 || !std::has_single_bit(static_cast<unsigned>(n_points)))
        throw ConfigError("n_points must be a power of two >= 1024, got " + std::to_string(n_points));
    if (!(x_half_width > 0.0))
        throw ConfigError("x_half_width must be positive");
    const double sites = x_half_width / half_period;
    if (std::abs(sites - std::round(sites)) > 1e-9 * sites)
        throw ConfigError("x_half_width must be a multiple of pi/2 (whole lattice periods), got " +
                          std::to_string(x_half_width));
    if (p_nyquist() < 8.0)
        throw ConfigError("momentum grid must span +-8 hbar*k0: need pi*n_points/(2*x_half_width) >= 8, got " +
                          std::to_string(p_nyquist()));
    if (!(dt > 0.0) || !std::isfinite(dt))
        throw ConfigError("dt must be positive");
    if (n_steps < 0)
        throw ConfigError("n_steps must be non-negative");
    if (record_stride < 1)
        throw ConfigError("record_stride must be >= 1");
}

double vacuum_width(double w0)
{
    return std::sqrt(units::hbar / (2.0 * units::mass * w0));
}

double classical_amplitude(double w0)
{
    // beta_max = 2g/w0 = 4/sqrt(w0); x amplitude = beta_max * sqrt(hbar/(2 m w0)).
    const double beta_max = 4.0 / std::sqrt(w0);
    return beta_max * vacuum_width(w0);
}

double max_time_step(const SystemParams& params)
{
    double fastest = 2.0 * pi / params.w0();
    if (params.v() > 0.0)
        fastest = std::min(fastest, 2.0 * pi / params.v());
    const double reach = scattered_reach(params.v(), 1e-3);
    fastest = std::min(fastest, 2.0 * pi / (reach * reach));
    return fastest / 200.0;
}

GridSpec plan_grid(const SystemParams& params, double t_max, int n_records, const GridOverrides& overrides)
{
    if (!(t_max > 0.0))
        throw ConfigError("t_max must be positive");
    if (n_records < 1)
        throw ConfigError("n_records must be >= 1");

    GridSpec grid;
    // lattice-dressed momenta p reach the trap turning radius 2p/w0
    const double turning = 2.0 * scattered_reach(params.v(), 1e-3) / params.w0();
    double half_width = overrides.x_half_width.value_or(
        std::max(turning + 8.0 * vacuum_width(params.w0()), 4.0 * classical_amplitude(params.w0())));
    grid.x_half_width = std::ceil(half_width / half_period - 1e-9) * half_period;

    if (overrides.n_points) {
        grid.n_points = *overrides.n_points;
    } else {
        const double nyquist = std::max(8.0, scattered_reach(params.v(), 1e-10) + 2.0);
        grid.n_points = 1024;
        while (grid.p_nyquist() < nyquist)
            grid.n_points *= 2;
    }

    const double record_dt = t_max / n_records;
    const double dt_limit = overrides.dt.value_or(max_time_step(params));
    if (!(dt_limit > 0.0))
        throw ConfigError("dt must be positive");
    const long per_record = std::max(1L, static_cast<long>(std::ceil(record_dt / dt_limit - 1e-9)));
    grid.record_stride = static_cast<int>(per_record);
    grid.dt = record_dt / static_cast<double>(per_record);
    grid.n_steps = per_record * n_records;
    grid.validate();
    return grid;
}

QubitAmplitudes::QubitAmplitudes(cplx c0, cplx c1)
{
    const double n = std::sqrt(std::norm(c0) + std::norm(c1));
    if (!(n > 0.0) || !std::isfinite(n))
        throw DomainError("qubit amplitudes must not both vanish");
    c0_ = c0 / n;
    c1_ = c1 / n;
}

QubitAmplitudes QubitAmplitudes::band(int n_b)
{
    if (n_b != 0 && n_b != 1)
        throw DomainError("qubit band index must be 0 or 1");
    return n_b == 0 ? QubitAmplitudes(1.0, 0.0) : QubitAmplitudes(0.0, 1.0);
}

QubitAmplitudes QubitAmplitudes::equal_superposition()
{
    return {1.0, 1.0};
}

ZoneFold fold_to_bz(double p)
{
    int band = static_cast<int>(std::floor((p + 4.0) / 4.0));
    double q = p + 2.0 - 4.0 * band;
    // rounding can push q onto the wrong side of the half-open zone
    if (q >= 2.0) {
        q -= 4.0;
        ++band;
    } else if (q < -2.0) {
        q += 4.0;
        --band;
    }
    return {q, band};
}

GridWavefunction prepare_initial_state(const SystemParams& params, const GridSpec& grid, const QubitAmplitudes& qubit)
{
    grid.validate();
    check_edge_tail(params.w0(), grid, 0.0);
    GridWavefunction state{grid, Eigen::VectorXcd(grid.n_points)};
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.position(j);
        const cplx carrier = qubit.c0() * std::polar(1.0, -2.0 * x) + qubit.c1() * std::polar(1.0, 2.0 * x);
        state.psi(j) = carrier * trap_ground_amplitude(params.w0(), x);
    }
    state.psi /= std::sqrt(state.norm());
    return state;
}

GridWavefunction prepare_coherent(const SystemParams& params, const GridSpec& grid, double x0, double p0)
{
    grid.validate();
    check_edge_tail(params.w0(), grid, x0);
    GridWavefunction state{grid, Eigen::VectorXcd(grid.n_points)};
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.position(j);
        state.psi(j) = std::polar(trap_ground_amplitude(params.w0(), x - x0), p0 * x);
    }
    state.psi /= std::sqrt(state.norm());
    return state;
}

Eigen::VectorXcd momentum_amplitudes(const GridWavefunction& state)
{
    Eigen::FFT<double> fft;
    Eigen::VectorXcd transformed;
    transformed.resize(state.grid.n_points);
    fft.fwd(transformed.data(), state.psi.data(), state.grid.n_points);
    return continuum_momentum(state.grid, transformed);
}

Eigen::VectorXcd momentum_amplitudes_at(const GridWavefunction& state, const Eigen::VectorXd& p)
{
    const GridSpec& g = state.grid;
    Eigen::VectorXcd phi(p.size());
    for (Eigen::Index k = 0; k < p.size(); ++k) {
        cplx acc = 0.0;
        for (int j = 0; j < g.n_points; ++j)
            acc += state.psi(j) * std::polar(1.0, -p(k) * g.position(j));
        phi(k) = acc * (g.dx() / std::sqrt(2.0 * pi));
    }
    return phi;
}

GridWavefunction synthesize(const GridSpec& grid, const Eigen::VectorXd& p, const Eigen::VectorXcd& phi, double dp)
{
    GridWavefunction state{grid, Eigen::VectorXcd::Zero(grid.n_points)};
    for (int j = 0; j < grid.n_points; ++j) {
        const double x = grid.position(j);
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < p.size(); ++k)
            acc += phi(k) * std::polar(1.0, p(k) * x);
        state.psi(j) = acc * (dp / std::sqrt(2.0 * pi));
    }
    return state;
}

MomentumDistribution momentum_distribution(const GridWavefunction& state)
{
    const GridSpec& g = state.grid;
    const Eigen::VectorXcd phi = momentum_amplitudes(state);
    MomentumDistribution out{Eigen::VectorXd(g.n_points), Eigen::VectorXd(g.n_points)};
    const int half = g.n_points / 2;
    for (int i = 0; i < g.n_points; ++i) {
        const int k = i - half;
        const int j = k < 0 ? k + g.n_points : k;
        out.p(i) = k * g.dp();
        out.probability(i) = std::norm(phi(j)) * g.dp();
    }
    return out;
}

double full_energy_offset(const SystemParams& params)
{
    return units::band_offset + 0.5 * params.w0();
}

Observables observables(const GridWavefunction& state, const SystemParams& params)
{
    return observe_from(state, momentum_amplitudes(state), potential_on(state.grid, params), kinetic_on(state.grid));
}

double fidelity(const GridWavefunction& a, const GridWavefunction& b)
{
    if (!a.grid.same_space(b.grid))
        throw UsageError("fidelity: states live on different grids");
    return std::norm(a.psi.dot(b.psi) * a.grid.dx());
}

SplitStepPropagator::SplitStepPropagator(const SystemParams& params, const GridSpec& grid)
    : params_(params), grid_(grid)
{
    grid_.validate();
    potential_ = potential_on(grid_, params_);
    kinetic_ = kinetic_on(grid_);
    half_kick_ = phases(potential_, 0.5 * grid_.dt);
    full_kick_ = phases(potential_, grid_.dt);
    drift_ = phases(kinetic_, grid_.dt);
    scratch_.resize(grid_.n_points);
}

void SplitStepPropagator::check_finite(const GridWavefunction& state, long step_index) const
{
    if (!state.psi.allFinite())
        throw NumericalFault("non-finite amplitude in full-model propagation", step_index);
}

void SplitStepPropagator::step(GridWavefunction& state, long step_index)
{
    advance(state, 1, step_index);
}

void SplitStepPropagator::advance(GridWavefunction& state, long n, long first_step_index)
{
    if (!state.grid.same_space(grid_))
        throw UsageError("propagator and state use different grids");
    if (n <= 0)
        return;
    Eigen::VectorXcd& psi = state.psi;
    psi.array() *= half_kick_;
    for (long i = 0; i < n; ++i) {
        fft_.fwd(scratch_.data(), psi.data(), grid_.n_points);
        scratch_.array() *= drift_;
        fft_.inv(psi.data(), scratch_.data(), grid_.n_points);
        psi.array() *= (i + 1 < n) ? full_kick_ : half_kick_;
    }
    check_finite(state, first_step_index + n);
}

Observables SplitStepPropagator::observe(const GridWavefunction& state)
{
    fft_.fwd(scratch_.data(), state.psi.data(), grid_.n_points);
    return observe_from(state, continuum_momentum(grid_, scratch_), potential_, kinetic_);
}

GridWavefunction step(const GridWavefunction& state, const SystemParams& params)
{
    GridSpec one = state.grid;
    SplitStepPropagator propagator(params, one);
    GridWavefunction next = state;
    propagator.step(next);
    return next;
}

GridEvolution evolve(const GridWavefunction& initial, const SystemParams& params, const EvolveOptions& options)
{
    const GridSpec& g = initial.grid;
    SplitStepPropagator propagator(params, g);
    const double offset = full_energy_offset(params);

    GridEvolution out{ObservableSeries{}, {}, initial};
    out.series.model = "full";
    GridWavefunction& state = out.final_state;

    std::vector<double> pending = options.snapshot_times;
    std::sort(pending.begin(), pending.end());
    const double record_dt = g.dt * g.record_stride;

    auto record = [&](long step_index) {
        const double t = step_index * g.dt;
        out.series.append(t, propagator.observe(state), fidelity(initial, state), offset);
        while (!pending.empty() && pending.front() < t + 0.5 * record_dt) {
            out.snapshots.push_back({t, momentum_distribution(state)});
            pending.erase(pending.begin());
        }
    };

    record(0);
    long done = 0;
    while (done + g.record_stride <= g.n_steps) {
        propagator.advance(state, g.record_stride, done);
        done += g.record_stride;
        record(done);
    }
    propagator.advance(state, g.n_steps - done, done);
    return out;
}

} // namespace qrm
