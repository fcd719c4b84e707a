#include "qrm/periodic_rabi.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

#include "qrm/errors.hpp"
#include "fold_edges.hpp"

namespace qrm {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double leakage_limit = 1e-6;

struct BandExponential {
    Eigen::ArrayXcd u00, u01, u11;
};

// exp(-i M(q) tau) for M = [[q^2 - 4q, v/4], [v/4, q^2 + 4q]], which is the
// kinetic energy (q -/+ 2)^2 minus the 4 E_r band offset plus the lattice.
BandExponential band_exponential(int q_points, double v, double tau)
{
    BandExponential e{Eigen::ArrayXcd(q_points), Eigen::ArrayXcd(q_points), Eigen::ArrayXcd(q_points)};
    const double dq = units::reciprocal / q_points;
    const double c = v / 4.0;
    for (int m = 0; m < q_points; ++m) {
        const double q = -units::zone_edge + m * dq;
        const double delta = -4.0 * q; // half the diagonal difference
        const double omega = std::hypot(delta, c);
        const double cos_t = std::cos(omega * tau);
        const double sinc = omega > 0.0 ? std::sin(omega * tau) / omega : tau;
        const cplx global = std::polar(1.0, -q * q * tau);
        e.u00(m) = global * cplx(cos_t, -sinc * delta);
        e.u11(m) = global * cplx(cos_t, sinc * delta);
        e.u01(m) = global * cplx(0.0, -sinc * c);
    }
    return e;
}

void check_resolution(int q_points)
{
    if (q_points < min_quasi_momentum_points || !std::has_single_bit(static_cast<unsigned>(q_points)))
        throw ConfigError("quasi-momentum resolution must be a power of two >= 512, got " + std::to_string(q_points));
}

Eigen::VectorXd circle_momenta(int q_points)
{
    const double dq = units::reciprocal / q_points;
    Eigen::VectorXd p(2 * q_points);
    for (int k = 0; k < 2 * q_points; ++k)
        p(k) = -2.0 * units::zone_edge + k * dq;
    return p;
}

double vacuum_amplitude_q(double w0, double q)
{
    // <q^2> = m hbar w0 / 2 = w0/4
    const double var = w0 / 4.0;
    return std::pow(2.0 * pi * var, -0.25) * std::exp(-q * q / (4.0 * var));
}

} // namespace

int quasi_momentum_points_for(double x_half_width)
{
    int m = min_quasi_momentum_points;
    while (m * pi / 4.0 < x_half_width)
        m *= 2;
    return m;
}

TwoBandState prepare_two_band(const SystemParams& params, int q_points, const QubitAmplitudes& qubit)
{
    check_resolution(q_points);
    TwoBandState s{Eigen::ArrayXXcd(q_points, 2)};
    for (int m = 0; m < q_points; ++m) {
        const double g = vacuum_amplitude_q(params.w0(), s.quasi_momentum(m));
        s.spinor(m, 0) = qubit.c0() * g;
        s.spinor(m, 1) = qubit.c1() * g;
    }
    s.spinor /= std::sqrt(s.norm());
    return s;
}

TwoBandState from_grid_state(const GridWavefunction& psi, int q_points)
{
    check_resolution(q_points);
    const Observables o = observables(psi, SystemParams(0.0, 1.0));
    if (o.leakage > leakage_limit) {
        std::ostringstream msg;
        msg << "state leaks " << o.leakage << " probability outside bands {0,1} (limit " << leakage_limit << ")";
        throw ConversionError(msg.str());
    }
    if (q_points * pi / 4.0 < psi.grid.x_half_width)
        throw ConversionError("quasi-momentum resolution too coarse for the position box");
    const Eigen::VectorXcd phi = momentum_amplitudes_at(psi, circle_momenta(q_points));
    TwoBandState s{Eigen::Map<const Eigen::ArrayXXcd>(phi.data(), q_points, 2)};
    s.spinor /= std::sqrt(s.norm());
    return s;
}

GridWavefunction to_grid_state(const TwoBandState& state, const GridSpec& grid)
{
    const Eigen::VectorXcd phi = Eigen::Map<const Eigen::VectorXcd>(state.spinor.data(), state.spinor.size());
    return synthesize(grid, circle_momenta(state.q_points()), phi, state.dq());
}

double periodic_energy_offset(const SystemParams& params)
{
    return 0.5 * params.w0();
}

PeriodicPropagator::PeriodicPropagator(const SystemParams& params, int q_points, double dt)
    : params_(params), q_points_(q_points), dt_(dt)
{
    check_resolution(q_points);
    if (!(dt > 0.0))
        throw ConfigError("dt must be positive");
    auto band = band_exponential(q_points, params.v(), dt);
    u00_ = std::move(band.u00);
    u01_ = std::move(band.u01);
    u11_ = std::move(band.u11);

    const int n = 2 * q_points;
    x2_.resize(n);
    for (int j = 0; j < n; ++j)
        x2_(j) = position(j) * position(j);
    const double trap = params.w0() * params.w0() / 4.0;
    half_kick_ = (trap * x2_).unaryExpr([dt](double e) { return std::polar(1.0, -0.5 * e * dt); });
    full_kick_ = half_kick_.square();
    scratch_.resize(n);
}

double PeriodicPropagator::position(int j) const
{
    const int n = 2 * q_points_;
    const int signed_j = j < q_points_ ? j : j - n;
    // spacing 2*pi / (circumference 8)
    return signed_j * 2.0 * pi / (2.0 * units::reciprocal);
}

void PeriodicPropagator::band_step(Eigen::ArrayXXcd& spinor) const
{
    const Eigen::ArrayXcd c0 = spinor.col(0);
    spinor.col(0) = u00_ * c0 + u01_ * spinor.col(1);
    spinor.col(1) = u01_ * c0 + u11_ * spinor.col(1);
}

void PeriodicPropagator::advance(TwoBandState& state, long n, long first_step_index)
{
    if (state.q_points() != q_points_)
        throw UsageError("propagator and state use different quasi-momentum grids");
    if (n <= 0)
        return;
    // same ordering as the full model: trap half kicks around the band step
    const Eigen::Index size = 2 * q_points_;
    cplx* circle = state.spinor.data();
    fft_.inv(scratch_.data(), circle, size);
    scratch_.array() *= half_kick_;
    for (long i = 0; i < n; ++i) {
        fft_.fwd(circle, scratch_.data(), size);
        band_step(state.spinor);
        fft_.inv(scratch_.data(), circle, size);
        scratch_.array() *= (i + 1 < n) ? full_kick_ : half_kick_;
    }
    fft_.fwd(circle, scratch_.data(), size);
    if (!state.spinor.allFinite())
        throw NumericalFault("non-finite amplitude in periodic-model propagation", first_step_index + n);
}

Eigen::ArrayXd PeriodicPropagator::position_probabilities(const TwoBandState& state)
{
    fft_.inv(scratch_.data(), state.spinor.data(), 2 * q_points_);
    Eigen::ArrayXd prob = scratch_.array().abs2();
    return prob / prob.sum();
}

detail::EdgeJet PeriodicPropagator::edge_jet(double p) const
{
    // the circle amplitude is sum_j s_j exp(-i x_j (p + 4)) with s in scratch_
    detail::EdgeJet jet{};
    for (Eigen::Index j = 0; j < scratch_.size(); ++j) {
        const double x = position(static_cast<int>(j));
        cplx term = scratch_(j) * std::polar(1.0, -x * (p + units::reciprocal));
        for (auto& d : jet) {
            d += term;
            term *= cplx(0.0, -x);
        }
    }
    return jet;
}

Observables PeriodicPropagator::observe(const TwoBandState& state)
{
    const double dq = state.dq();
    const Eigen::ArrayXd p0 = state.spinor.col(0).abs2() * dq;
    const Eigen::ArrayXd p1 = state.spinor.col(1).abs2() * dq;

    Observables o;
    o.norm = p0.sum() + p1.sum();
    // q_0 = -2 lies on the zone edge: half of each sample belongs to the
    // other band at q = +2, so it cancels in sigma_x and <q>.
    o.sigma_x = p0.sum() - p1.sum() - (p0(0) - p1(0));

    // end corrections at the edges p = 0 (band 0 -> 1) and p = +-4 (1 -> 0)
    const Eigen::ArrayXd px = position_probabilities(state);
    const double up_at_0 = detail::upward_transfer(edge_jet(0.0), dq);
    const double up_at_4 = detail::upward_transfer(edge_jet(-4.0), dq);
    o.sigma_x += 2.0 * (up_at_4 - up_at_0);
    double q_mean = 0.0, p_mean = 0.0, tail = 0.0, band_energy = 0.0;
    cplx overlap = 0.0;
    const double c = params_.v() / 4.0;
    for (int m = 0; m < q_points_; ++m) {
        const double q = state.quasi_momentum(m);
        const double w = p0(m) + p1(m);
        if (m > 0)
            q_mean += q * w;
        p_mean += (q - 2.0) * p0(m) + (q + 2.0) * p1(m);
        if (std::abs(q) > zone_tail_threshold)
            tail += w;
        const cplx cross = std::conj(state.spinor(m, 0)) * state.spinor(m, 1);
        overlap += cross;
        band_energy += (q * q - 4.0 * q) * p0(m) + (q * q + 4.0 * q) * p1(m) + 2.0 * c * cross.real() * dq;
    }
    o.q = q_mean - 4.0 * (up_at_0 + up_at_4);
    o.p = p_mean;
    o.q_tail = tail;
    o.sigma_z = 2.0 * overlap.real() * dq;
    o.leakage = 0.0;

    double x_mean = 0.0;
    for (Eigen::Index j = 0; j < px.size(); ++j)
        x_mean += position(static_cast<int>(j)) * px(j);
    o.x = x_mean;
    o.energy = band_energy + params_.w0() * params_.w0() / 4.0 * (px * x2_).sum() * o.norm;
    return o;
}

Observables observables(const TwoBandState& state, const SystemParams& params)
{
    PeriodicPropagator probe(params, state.q_points(), 1.0);
    return probe.observe(state);
}

double fidelity(const TwoBandState& a, const TwoBandState& b)
{
    if (a.q_points() != b.q_points())
        throw UsageError("fidelity: spinors use different quasi-momentum grids");
    const cplx overlap = (a.spinor.conjugate() * b.spinor).sum() * a.dq();
    return std::norm(overlap);
}

PeriodicEvolution evolve_periodic(const TwoBandState& initial, const SystemParams& params, const TimeStepping& time)
{
    if (time.record_stride < 1 || time.n_steps < 0)
        throw ConfigError("invalid time stepping");
    PeriodicPropagator propagator(params, initial.q_points(), time.dt);
    const double offset = periodic_energy_offset(params);
    PeriodicEvolution out{ObservableSeries{}, initial};
    out.series.model = "periodic";
    TwoBandState& state = out.final_state;

    auto record = [&](long step_index) {
        out.series.append(step_index * time.dt, propagator.observe(state), fidelity(initial, state), offset);
    };
    record(0);
    long done = 0;
    while (done + time.record_stride <= time.n_steps) {
        propagator.advance(state, time.record_stride, done);
        done += time.record_stride;
        record(done);
    }
    propagator.advance(state, time.n_steps - done, done);
    return out;
}

} // namespace qrm
