#include "qrm/rabi_fock.hpp"

#include <cmath>
#include <sstream>

namespace qrm {

namespace {

constexpr double inv_sqrt2 = 0.70710678118654752440;
constexpr double truncation_limit = 1e-10;

cplx i_power(int n)
{
    switch (n & 3) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

double alternating(int n) { return (n & 1) ? -1.0 : 1.0; }

void check_state(const FockState& s)
{
    if (s.cutoff < 1 || s.amplitudes.size() != 2 * s.levels())
        throw UsageError("malformed Fock state");
}

void check_cutoff_holds(const RabiParams& rp, int cutoff)
{
    const double beta_max = 2.0 * rp.g / rp.w0;
    const double kept = coherent_amplitudes(beta_max, cutoff).squaredNorm();
    if (1.0 - kept > truncation_limit) {
        std::ostringstream msg;
        msg << "Fock cutoff " << cutoff << " truncates the coherent state |beta| = " << beta_max << " (lost probability "
            << 1.0 - kept << ")";
        throw DomainError(msg.str());
    }
}

} // namespace

Eigen::VectorXcd apply_hamiltonian(const RabiParams& rp, const FockState& state)
{
    check_state(state);
    const int levels = state.levels();
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(state.amplitudes.size());
    for (int band = 0; band < 2; ++band) {
        const double sx = band == 0 ? 1.0 : -1.0;
        const auto in = state.block(band);
        auto res = out.segment(band * levels, levels);
        const auto other = state.block(1 - band);
        for (int n = 0; n < levels; ++n) {
            cplx acc = rp.w0 * n * in(n) + 0.5 * rp.wq * other(n);
            // i g sx (a^dag - a)
            if (n > 0)
                acc += cplx(0.0, rp.g * sx * std::sqrt(double(n))) * in(n - 1);
            if (n + 1 < levels)
                acc -= cplx(0.0, rp.g * sx * std::sqrt(double(n + 1))) * in(n + 1);
            res(n) = acc;
        }
    }
    return out;
}

FockState fock_initial(const QubitAmplitudes& qubit, int cutoff)
{
    if (cutoff < 1)
        throw DomainError("Fock cutoff must be >= 1");
    FockState s{cutoff, Eigen::VectorXcd::Zero(2 * (cutoff + 1))};
    s.block(0)(0) = qubit.c0();
    s.block(1)(0) = qubit.c1();
    return s;
}

Eigen::VectorXcd coherent_amplitudes(cplx beta, int cutoff)
{
    Eigen::VectorXcd c(cutoff + 1);
    const double r = std::abs(beta);
    const double phase = std::arg(beta);
    const double half_r2 = 0.5 * r * r;
    if (r == 0.0) {
        c.setZero();
        c(0) = 1.0;
        return c;
    }
    const double log_r = std::log(r);
    for (int n = 0; n <= cutoff; ++n) {
        const double log_mag = -half_r2 + n * log_r - 0.5 * std::lgamma(n + 1.0);
        c(n) = std::polar(std::exp(log_mag), n * phase);
    }
    return c;
}

cplx dsc_displacement(double t, const RabiParams& rp)
{
    return cplx(0.0, rp.g / rp.w0) * (std::polar(1.0, -rp.w0 * t) - 1.0);
}

FockState dsc_state(double t, const RabiParams& rp, int band, int cutoff)
{
    if (band != 0 && band != 1)
        throw DomainError("band index must be 0 or 1");
    if (cutoff < 1)
        throw DomainError("Fock cutoff must be >= 1");
    check_cutoff_holds(rp, cutoff);
    const cplx beta = dsc_displacement(t, rp) * alternating(band);
    FockState s{cutoff, Eigen::VectorXcd::Zero(2 * (cutoff + 1))};
    s.block(band) = coherent_amplitudes(beta, cutoff);
    return s;
}

double dsc_fidelity(double t, const RabiParams& rp)
{
    return std::exp(-std::norm(dsc_displacement(t, rp)));
}

FockState cat_state(double t, const RabiParams& rp, int cutoff)
{
    if (cutoff < 1)
        throw DomainError("Fock cutoff must be >= 1");
    check_cutoff_holds(rp, cutoff);
    const cplx beta = dsc_displacement(t, rp);
    FockState s{cutoff, Eigen::VectorXcd(2 * (cutoff + 1))};
    s.block(0) = coherent_amplitudes(beta, cutoff) * inv_sqrt2;
    s.block(1) = coherent_amplitudes(-beta, cutoff) * inv_sqrt2;
    return s;
}

double fidelity(const FockState& a, const FockState& b)
{
    if (a.cutoff != b.cutoff)
        throw UsageError("fidelity: Fock states with different cutoffs");
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

Quadratures quadratures(const FockState& state, const RabiParams& rp)
{
    check_state(state);
    cplx a_mean = 0.0, a2_mean = 0.0;
    double n_mean = 0.0;
    for (int band = 0; band < 2; ++band) {
        const auto c = state.block(band);
        for (int n = 0; n < state.levels(); ++n) {
            n_mean += n * std::norm(c(n));
            if (n + 1 < state.levels())
                a_mean += std::conj(c(n)) * std::sqrt(double(n + 1)) * c(n + 1);
            if (n + 2 < state.levels())
                a2_mean += std::conj(c(n)) * std::sqrt(double(n + 1) * double(n + 2)) * c(n + 2);
        }
    }
    const double norm = state.norm();
    const double s = std::sqrt(rp.w0);
    Quadratures out;
    out.x = -2.0 * a_mean.real() / s;
    out.q = -s * a_mean.imag();
    out.x2 = (2.0 * a2_mean.real() + 2.0 * n_mean + norm) / rp.w0;
    out.q2 = rp.w0 / 4.0 * (2.0 * n_mean + norm - 2.0 * a2_mean.real());
    return out;
}

double cutoff_population(const FockState& state)
{
    const int first = static_cast<int>(std::ceil(0.95 * state.cutoff));
    const int count = state.levels() - first;
    return state.block(0).tail(count).squaredNorm() + state.block(1).tail(count).squaredNorm();
}

Observables observables(const FockState& state, const RabiParams& rp)
{
    const Quadratures quad = quadratures(state, rp);
    Observables o;
    const double p0 = state.block(0).squaredNorm();
    const double p1 = state.block(1).squaredNorm();
    o.norm = p0 + p1;
    o.sigma_x = p0 - p1;
    o.sigma_z = 2.0 * state.block(0).dot(state.block(1)).real();
    o.x = quad.x;
    o.q = quad.q;
    o.p = quad.q - 2.0 * o.sigma_x;
    o.leakage = 0.0;
    o.energy = state.amplitudes.dot(apply_hamiltonian(rp, state)).real();
    o.q_tail = 0.0;
    return o;
}

RabiPropagator::RabiPropagator(const RabiParams& rp, int cutoff) : rp_(rp), cutoff_(cutoff)
{
    if (cutoff < 1)
        throw DomainError("Fock cutoff must be >= 1");
    const int levels = cutoff + 1;
    auto chain = [&](double parity, Eigen::VectorXd& values, Eigen::MatrixXd& vectors) {
        Eigen::VectorXd diag(levels), sub(levels - 1);
        for (int n = 0; n < levels; ++n)
            diag(n) = rp.w0 * n + parity * 0.5 * rp.wq * alternating(n);
        for (int n = 0; n + 1 < levels; ++n)
            sub(n) = rp.g * std::sqrt(double(n + 1));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
        solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        if (solver.info() != Eigen::Success)
            throw NumericalFault("Rabi chain diagonalization failed", -1);
        values = solver.eigenvalues();
        vectors = solver.eigenvectors();
    };
    chain(1.0, plus_values_, plus_vectors_);
    if (rp.wq == 0.0) {
        minus_values_ = plus_values_;
        minus_vectors_ = plus_vectors_;
    } else {
        chain(-1.0, minus_values_, minus_vectors_);
    }
}

RabiPropagator::Expansion RabiPropagator::expand(const FockState& state) const
{
    check_state(state);
    if (state.cutoff != cutoff_)
        throw UsageError("state cutoff differs from propagator cutoff");
    const int levels = state.levels();
    Eigen::VectorXcd plus(levels), minus(levels);
    for (int n = 0; n < levels; ++n) {
        const cplx b0 = state.block(0)(n);
        const cplx b1 = alternating(n) * state.block(1)(n);
        const cplx unphase = std::conj(i_power(n)) * inv_sqrt2;
        plus(n) = (b0 + b1) * unphase;
        minus(n) = (b0 - b1) * unphase;
    }
    return {plus_vectors_.transpose() * plus, minus_vectors_.transpose() * minus};
}

FockState RabiPropagator::at(const Expansion& e, double t) const
{
    const int levels = cutoff_ + 1;
    auto evolve = [t](const Eigen::VectorXd& values, const Eigen::VectorXcd& coeffs) {
        Eigen::VectorXcd out(coeffs.size());
        for (Eigen::Index k = 0; k < coeffs.size(); ++k)
            out(k) = coeffs(k) * std::polar(1.0, -values(k) * t);
        return out;
    };
    const Eigen::VectorXcd plus = plus_vectors_ * evolve(plus_values_, e.plus);
    const Eigen::VectorXcd minus = minus_vectors_ * evolve(minus_values_, e.minus);
    FockState s{cutoff_, Eigen::VectorXcd(2 * levels)};
    for (int n = 0; n < levels; ++n) {
        const cplx rephase = i_power(n) * inv_sqrt2;
        s.block(0)(n) = (plus(n) + minus(n)) * rephase;
        s.block(1)(n) = alternating(n) * (plus(n) - minus(n)) * rephase;
    }
    return s;
}

double RabiPropagator::energy(const Expansion& e) const
{
    return (e.plus.cwiseAbs2().array() * plus_values_.array()).sum() +
           (e.minus.cwiseAbs2().array() * minus_values_.array()).sum();
}

FockEvolution evolve_fock(const FockState& initial, const RabiParams& rp, const std::vector<double>& times)
{
    check_state(initial);
    const RabiPropagator propagator(rp, initial.cutoff);
    const auto expansion = propagator.expand(initial);
    FockEvolution out{ObservableSeries{}, initial};
    out.series.model = "rabi";
    for (double t : times) {
        FockState s = propagator.at(expansion, t);
        Observables o = observables(s, rp);
        const double health = cutoff_population(s);
        if (health > 1e-8)
            out.series.cutoff_warning = true;
        out.series.append(t, o, fidelity(initial, s), 0.0);
        out.series.boson_number.push_back(
            [&] {
                double n_mean = 0.0;
                for (int n = 0; n < s.levels(); ++n)
                    n_mean += n * (std::norm(s.block(0)(n)) + std::norm(s.block(1)(n)));
                return n_mean;
            }());
        out.final_state = std::move(s);
    }
    out.series.q_tail.assign(out.series.size(), 0.0);
    return out;
}

} // namespace qrm
