#pragma once

#include <numbers>

namespace qrm {

// Internal units: energy E_r = hbar^2 k0^2 / 2m, momentum hbar*k0, length 1/k0,
// time hbar/E_r and hbar = 1. In these units m = 1/2, so p^2/2m = p^2 and
// the trap potential m w0^2 x^2 / 2 = (w0^2/4) x^2.
namespace units {
inline constexpr double hbar = 1.0;
inline constexpr double k0 = 1.0;
inline constexpr double mass = 0.5;
inline constexpr double recoil_energy = hbar * hbar * k0 * k0 / (2.0 * mass);
// Lattice reciprocal vector 4*hbar*k0 and the Brillouin-zone half width.
inline constexpr double reciprocal = 4.0;
inline constexpr double zone_edge = 2.0;
// Kinetic energy (2 hbar k0)^2/2m of the band-centre plane waves.
inline constexpr double band_offset = 4.0;
} // namespace units

struct RabiParams {
    double w0 = 0.0; ///< mode frequency
    double wq = 0.0; ///< qubit splitting
    double g = 0.0;  ///< coupling

    double g_over_w0() const { return g / w0; }
    double wq_over_w0() const { return wq / w0; }
    double period() const { return 2.0 * std::numbers::pi / w0; }
};

/// Dimensionless lattice depth v = V/E_r and trap frequency w0 = hbar*omega0/E_r.
class SystemParams {
public:
    /// Throws DomainError unless w0 > 0 and v >= 0.
    SystemParams(double v, double w0);

    double v() const { return v_; }
    double w0() const { return w0_; }

private:
    double v_;
    double w0_;
};

RabiParams to_rabi_params(const SystemParams& p);

/// Inverse of to_rabi_params for the ratio form used in figure captions.
SystemParams from_ratios(double g_over_w0, double wq_over_w0);

struct RatioForm {
    double g_over_w0;
    double wq_over_w0;
};

RatioForm ratios_of(const RabiParams& rp);

} // namespace qrm
