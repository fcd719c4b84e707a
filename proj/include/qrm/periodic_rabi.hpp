#pragma once

#include <array>
#include <complex>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "qrm/full_dynamics.hpp"
#include "qrm/series.hpp"
#include "qrm/units.hpp"

namespace qrm {

namespace detail {
using EdgeJet = std::array<std::complex<double>, 4>;
}

inline constexpr int min_quasi_momentum_points = 512;

/// Two-band spinor on the uniform grid q_m = -2 + 4m/M, m < M.
///
/// Column b holds band n_b = b, i.e. physical momentum p = q - 2 (b = 0)
/// and p = q + 2 (b = 1). Read as one contiguous column-major array the
/// spinor is a function on the momentum circle p in [-4, 4): crossing the
/// zone edge q = -2 from band 1 continues in band 0 at q = +2 (umklapp),
/// and p = +-4 are identified. The harmonic term acts as -d^2/dp^2 on that
/// circle, so its conjugate position is discrete, x_j = j*pi/4.
struct TwoBandState {
    Eigen::ArrayXXcd spinor; ///< M x 2, sum |c|^2 dq = 1

    int q_points() const { return static_cast<int>(spinor.rows()); }
    double dq() const { return units::reciprocal / q_points(); }
    double quasi_momentum(int m) const { return -units::zone_edge + m * dq(); }
    double norm() const { return spinor.abs2().sum() * dq(); }
};

/// Smallest power-of-two resolution >= 512 whose position period covers [-L, L).
int quasi_momentum_points_for(double x_half_width);

/// c_b times the trap vacuum in q.
TwoBandState prepare_two_band(const SystemParams& params, int q_points, const QubitAmplitudes& qubit);

/// Samples the full-model momentum amplitudes on the two-band circle.
/// Throws ConversionError when more than 1e-6 probability lies outside
/// bands {0, 1}.
TwoBandState from_grid_state(const GridWavefunction& psi, int q_points);
GridWavefunction to_grid_state(const TwoBandState& state, const GridSpec& grid);

/// Rabi-model zero of the periodic model: the zero-point energy w0/2.
double periodic_energy_offset(const SystemParams& params);

/// Strang splitting: half kicks of the harmonic term in the position
/// representation around the exact 2x2 band exponential at each q.
class PeriodicPropagator {
public:
    PeriodicPropagator(const SystemParams& params, int q_points, double dt);

    void advance(TwoBandState& state, long n, long first_step_index = 0);
    Observables observe(const TwoBandState& state);

    /// Position-space probabilities on x_j = j*pi/4 (FFT order).
    Eigen::ArrayXd position_probabilities(const TwoBandState& state);
    double position(int j) const;

private:
    void band_step(Eigen::ArrayXXcd& spinor) const;
    /// Needs scratch_ to hold the position amplitudes of the state.
    detail::EdgeJet edge_jet(double p) const;

    SystemParams params_;
    int q_points_;
    double dt_;
    Eigen::ArrayXcd u00_, u01_, u11_;
    Eigen::ArrayXcd half_kick_, full_kick_;
    Eigen::ArrayXd x2_;
    Eigen::FFT<double> fft_;
    Eigen::VectorXcd scratch_;
};

Observables observables(const TwoBandState& state, const SystemParams& params);

struct TimeStepping {
    double dt = 0.0;
    long n_steps = 0;
    int record_stride = 1;

    static TimeStepping of(const GridSpec& g) { return {g.dt, g.n_steps, g.record_stride}; }
};

struct PeriodicEvolution {
    ObservableSeries series;
    TwoBandState final_state;
};

PeriodicEvolution evolve_periodic(const TwoBandState& initial, const SystemParams& params, const TimeStepping& time);

/// Fidelity |<a|b>|^2 of two spinors on the same q grid.
double fidelity(const TwoBandState& a, const TwoBandState& b);

} // namespace qrm
