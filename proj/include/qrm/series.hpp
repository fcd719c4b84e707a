#pragma once

#include <array>
#include <string>
#include <string_view>
#include <vector>

namespace qrm {

/// Instantaneous expectation values of one state. Units: x in 1/k0, p and q
/// in hbar*k0, energy in E_r measured in the producing model's own convention.
struct Observables {
    double x = 0.0;
    double p = 0.0;
    double q = 0.0;
    double sigma_x = 0.0;
    double sigma_z = 0.0;
    double leakage = 0.0;
    double norm = 0.0;
    double energy = 0.0;
    /// Probability with |q| > 1.8 hbar*k0 (near the zone edge).
    double q_tail = 0.0;
};

inline constexpr double zone_tail_threshold = 1.8;

/// Time-stamped observables. The energy column is referenced to the Rabi
/// model zero (band offset 4 E_r and zero-point w0/2 removed) so the three
/// models can be compared directly.
struct ObservableSeries {
    std::string model;
    std::vector<double> t, x, p, q, sigma_x, sigma_z, p_in, norm, energy, leakage;
    std::vector<double> q_tail;       ///< grid models only
    std::vector<double> boson_number; ///< Fock model only
    bool cutoff_warning = false;

    static constexpr std::array<std::string_view, 10> csv_columns{
        "t", "x", "p", "q", "sigma_x", "sigma_z", "p_in", "norm", "energy", "leakage"};

    std::size_t size() const { return t.size(); }
    void append(double time, const Observables& o, double p_in_value, double energy_offset);

    /// Column by CSV name; throws UsageError for unknown names.
    const std::vector<double>& column(std::string_view name) const;
    std::vector<double>& column(std::string_view name);
};

} // namespace qrm
