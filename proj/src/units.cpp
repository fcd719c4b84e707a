#include "qrm/units.hpp"

#include <cmath>
#include <string>

#include "qrm/errors.hpp"

namespace qrm {

SystemParams::SystemParams(double v, double w0) : v_(v), w0_(w0)
{
    if (!(w0 > 0.0) || !std::isfinite(w0))
        throw DomainError("trap frequency w0 must be positive, got " + std::to_string(w0));
    if (!(v >= 0.0) || !std::isfinite(v))
        throw DomainError("lattice depth v must be non-negative, got " + std::to_string(v));
}

RabiParams to_rabi_params(const SystemParams& p)
{
    // wq = V/(2 hbar), g = 2 k0 sqrt(hbar w0 / 2m)
    return {p.w0(), p.v() / 2.0, 2.0 * units::k0 * std::sqrt(units::hbar * p.w0() / (2.0 * units::mass))};
}

SystemParams from_ratios(double g_over_w0, double wq_over_w0)
{
    if (!(g_over_w0 > 0.0) || !std::isfinite(g_over_w0))
        throw DomainError("g/w0 must be positive, got " + std::to_string(g_over_w0));
    if (!(wq_over_w0 >= 0.0) || !std::isfinite(wq_over_w0))
        throw DomainError("wq/w0 must be non-negative, got " + std::to_string(wq_over_w0));
    const double w0 = 4.0 / (g_over_w0 * g_over_w0);
    return SystemParams(2.0 * wq_over_w0 * w0, w0);
}

RatioForm ratios_of(const RabiParams& rp)
{
    return {rp.g / rp.w0, rp.wq / rp.w0};
}

} // namespace qrm
