#pragma once

#include <complex>
#include <optional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "qrm/series.hpp"
#include "qrm/units.hpp"

namespace qrm {

using cplx = std::complex<double>;

/// Uniform periodic position grid x_j = -L + j*dx on [-L, L) plus the time
/// stepping of a run. L must hold a whole number of half lattice periods
/// (multiple of pi/2) so that the plane waves exp(+-2i x) and the lattice
/// are periodic on the box; momenta p_k = k*pi/L then contain the band
/// centres +-2 and the fold vector 4 exactly.
struct GridSpec {
    int n_points = 4096;
    double x_half_width = 0.0;
    double dt = 0.0;
    long n_steps = 0;
    int record_stride = 1;

    double dx() const { return 2.0 * x_half_width / n_points; }
    double dp() const { return std::numbers::pi / x_half_width; }
    double p_nyquist() const { return std::numbers::pi * n_points / (2.0 * x_half_width); }
    /// Number of momentum samples per reciprocal vector 4 hbar*k0.
    int fold_stride() const;
    double position(int j) const { return -x_half_width + j * dx(); }
    /// Signed momentum index of FFT bin j.
    int momentum_index(int j) const { return j < n_points / 2 ? j : j - n_points; }

    /// Throws ConfigError naming the violated rule.
    void validate() const;

    bool same_space(const GridSpec& other) const
    {
        return n_points == other.n_points && x_half_width == other.x_half_width;
    }
};

struct GridOverrides {
    std::optional<int> n_points;
    std::optional<double> dt;
    std::optional<double> x_half_width;
};

/// Vacuum width sqrt(hbar/(2 m w0)) in 1/k0.
double vacuum_width(double w0);
/// Classical oscillation amplitude implied by the maximal displacement 2g/w0.
double classical_amplitude(double w0);
/// Largest stable time step from the 1/200-of-fastest-period rule.
double max_time_step(const SystemParams& params);

/// Box half width: the larger of 4 classical amplitudes and the trap turning
/// radius 2p/w0 of the highest dressed momentum plus 8 vacuum widths, rounded
/// up to whole lattice periods. The default n_points
/// is the smallest power of two >= 1024 whose Nyquist momentum covers 8 and
/// every lattice scattering order still populated above 1e-10.
/// Records land exactly on t_k = k * t_max / n_records.
GridSpec plan_grid(const SystemParams& params, double t_max, int n_records, const GridOverrides& overrides = {});

struct GridWavefunction {
    GridSpec grid;
    Eigen::VectorXcd psi; ///< psi(x_j), normalised so that sum |psi|^2 dx = 1

    double norm() const { return psi.squaredNorm() * grid.dx(); }
};

/// Weights of the two momentum classes p = -2 (n_b = 0) and p = +2 (n_b = 1).
class QubitAmplitudes {
public:
    /// Normalises; throws DomainError for a zero vector.
    QubitAmplitudes(cplx c0, cplx c1);

    static QubitAmplitudes band(int n_b);
    static QubitAmplitudes equal_superposition();

    cplx c0() const { return c0_; }
    cplx c1() const { return c1_; }

private:
    cplx c0_;
    cplx c1_;
};

struct ZoneFold {
    double q;
    int band;
};

/// p = q + (2 n_b - 1) * 2 with q in [-2, 2).
ZoneFold fold_to_bz(double p);

/// (c0 e^{-2ix} + c1 e^{2ix}) times the trap ground-state Gaussian.
GridWavefunction prepare_initial_state(const SystemParams& params, const GridSpec& grid, const QubitAmplitudes& qubit);

/// Trap coherent state centred at (x0, p0).
GridWavefunction prepare_coherent(const SystemParams& params, const GridSpec& grid, double x0, double p0);

/// Probability per momentum bin, ordered by increasing p.
struct MomentumDistribution {
    Eigen::VectorXd p;
    Eigen::VectorXd probability;
};

/// Continuum-normalised momentum amplitudes phi(p_k), FFT bin order.
Eigen::VectorXcd momentum_amplitudes(const GridWavefunction& state);
/// phi(p) at arbitrary momenta by direct summation.
Eigen::VectorXcd momentum_amplitudes_at(const GridWavefunction& state, const Eigen::VectorXd& p);
/// Inverse of momentum_amplitudes_at for amplitudes sampled with spacing dp.
GridWavefunction synthesize(const GridSpec& grid, const Eigen::VectorXd& p, const Eigen::VectorXcd& phi, double dp);

MomentumDistribution momentum_distribution(const GridWavefunction& state);

Observables observables(const GridWavefunction& state, const SystemParams& params);

/// |<a|b>|^2; throws UsageError when the grids differ.
double fidelity(const GridWavefunction& a, const GridWavefunction& b);

/// Rabi-model zero of the full Hamiltonian: 4 E_r kinetic offset plus w0/2.
double full_energy_offset(const SystemParams& params);

/// Second-order Strang splitting: half potential kick, kinetic step in
/// momentum space, half potential kick. Consecutive half kicks are fused.
/// Owns its FFT plan and scratch, so one instance serves one run at a time.
class SplitStepPropagator {
public:
    SplitStepPropagator(const SystemParams& params, const GridSpec& grid);

    void step(GridWavefunction& state, long step_index = 0);
    /// n Strang steps; throws NumericalFault if the state stops being finite.
    void advance(GridWavefunction& state, long n, long first_step_index = 0);

    Observables observe(const GridWavefunction& state);

    const GridSpec& grid() const { return grid_; }
    const SystemParams& params() const { return params_; }

private:
    void check_finite(const GridWavefunction& state, long step_index) const;

    SystemParams params_;
    GridSpec grid_;
    Eigen::ArrayXd potential_;
    Eigen::ArrayXd kinetic_;
    Eigen::ArrayXcd half_kick_;
    Eigen::ArrayXcd full_kick_;
    Eigen::ArrayXcd drift_;
    Eigen::FFT<double> fft_;
    Eigen::VectorXcd scratch_;
};

/// Single Strang step (convenience; builds a propagator).
GridWavefunction step(const GridWavefunction& state, const SystemParams& params);

struct MomentumSnapshot {
    double t;
    MomentumDistribution distribution;
};

struct EvolveOptions {
    std::vector<double> snapshot_times;
};

struct GridEvolution {
    ObservableSeries series;
    std::vector<MomentumSnapshot> snapshots;
    GridWavefunction final_state;
};

/// Runs grid.n_steps steps recording every grid.record_stride steps
/// (including t = 0). p_in is the fidelity with the initial state.
GridEvolution evolve(const GridWavefunction& initial, const SystemParams& params, const EvolveOptions& options = {});

} // namespace qrm
