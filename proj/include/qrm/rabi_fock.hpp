#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "qrm/errors.hpp"
#include "qrm/full_dynamics.hpp"
#include "qrm/series.hpp"
#include "qrm/units.hpp"

namespace qrm {

inline constexpr int default_fock_cutoff = 600;

/// Amplitudes over {n_b} x {0..N}; index n_b*(N+1) + n.
struct FockState {
    int cutoff = 0;
    Eigen::VectorXcd amplitudes;

    int levels() const { return cutoff + 1; }
    auto block(int band) { return amplitudes.segment(band * levels(), levels()); }
    auto block(int band) const { return amplitudes.segment(band * levels(), levels()); }
    double norm() const { return amplitudes.squaredNorm(); }
};

/// H = w0 a^dag a + (wq/2) sigma_z + i g sigma_x (a^dag - a) with
/// sigma_x = diag(+1, -1) over (n_b = 0, n_b = 1) and sigma_z flipping the
/// band. Dense, dimension 2(N+1).
template <typename Real = double>
Eigen::Matrix<std::complex<Real>, Eigen::Dynamic, Eigen::Dynamic> build_hamiltonian(const RabiParams& rp, int cutoff)
{
    using C = std::complex<Real>;
    if (cutoff < 1)
        throw DomainError("Fock cutoff must be >= 1");
    const int levels = cutoff + 1;
    Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic> h =
        Eigen::Matrix<C, Eigen::Dynamic, Eigen::Dynamic>::Zero(2 * levels, 2 * levels);
    for (int band = 0; band < 2; ++band) {
        const Real sx = band == 0 ? Real(1) : Real(-1);
        const int base = band * levels;
        for (int n = 0; n < levels; ++n) {
            h(base + n, base + n) = C(Real(rp.w0) * Real(n));
            if (n + 1 < levels) {
                const C hop(Real(0), Real(rp.g) * sx * std::sqrt(Real(n + 1)));
                h(base + n + 1, base + n) = hop;
                h(base + n, base + n + 1) = std::conj(hop);
            }
        }
    }
    for (int n = 0; n < levels; ++n) {
        h(n, levels + n) = C(Real(rp.wq) / Real(2));
        h(levels + n, n) = C(Real(rp.wq) / Real(2));
    }
    return h;
}

/// H|psi> without forming the matrix.
Eigen::VectorXcd apply_hamiltonian(const RabiParams& rp, const FockState& state);

/// Vacuum times the qubit state.
FockState fock_initial(const QubitAmplitudes& qubit, int cutoff);

/// Truncated coherent state |beta> on 0..cutoff (log-space amplitudes).
Eigen::VectorXcd coherent_amplitudes(cplx beta, int cutoff);

/// beta(t) = i (g/w0) (exp(-i w0 t) - 1).
cplx dsc_displacement(double t, const RabiParams& rp);

/// Deep-strong-coupling state: coherent state with (-1)^n_b beta(t) in band n_b.
/// Throws DomainError when the cutoff cannot hold |beta| = 2g/w0.
FockState dsc_state(double t, const RabiParams& rp, int band, int cutoff);
double dsc_fidelity(double t, const RabiParams& rp);

/// (D[beta]|0>|n_b=0> + D[-beta]|0>|n_b=1>)/sqrt(2).
FockState cat_state(double t, const RabiParams& rp, int cutoff);

double fidelity(const FockState& a, const FockState& b);

struct Quadratures {
    double x = 0.0;  ///< <x> in 1/k0
    double q = 0.0;  ///< <q> in hbar*k0
    double x2 = 0.0; ///< <x^2>
    double q2 = 0.0; ///< <q^2>
};

/// Quasi-momentum and position in atom units. With this coupling sign and
/// sigma_x = +1 on n_b = 0 the mode operator is a = -(sqrt(w0)/2) x - i q/sqrt(w0),
/// so x = -(a + a^dag)/sqrt(w0) and q = -i (sqrt(w0)/2)(a^dag - a).
Quadratures quadratures(const FockState& state, const RabiParams& rp);

Observables observables(const FockState& state, const RabiParams& rp);

/// Population of the top 5% of Fock levels.
double cutoff_population(const FockState& state);

/// Exact propagator from the eigendecomposition of the two parity chains
/// (sigma_z (-1)^{a^dag a} = +-1). Both chains are real tridiagonal after a
/// diagonal phase change, and at wq = 0 they coincide, which keeps sigma_x
/// and parity conserved to roundoff.
class RabiPropagator {
public:
    RabiPropagator(const RabiParams& rp, int cutoff);

    /// Initial state expanded in the eigenbases of both chains.
    struct Expansion {
        Eigen::VectorXcd plus;
        Eigen::VectorXcd minus;
    };

    Expansion expand(const FockState& state) const;
    FockState at(const Expansion& e, double t) const;
    double energy(const Expansion& e) const;

    const Eigen::VectorXd& plus_energies() const { return plus_values_; }
    const Eigen::VectorXd& minus_energies() const { return minus_values_; }
    int cutoff() const { return cutoff_; }

private:
    RabiParams rp_;
    int cutoff_;
    Eigen::VectorXd plus_values_, minus_values_;
    Eigen::MatrixXd plus_vectors_, minus_vectors_;
};

struct FockEvolution {
    ObservableSeries series;
    FockState final_state;
};

/// Evaluates the state at every requested time (ascending).
FockEvolution evolve_fock(const FockState& initial, const RabiParams& rp, const std::vector<double>& times);

} // namespace qrm
