#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "qrm/series.hpp"

namespace qrm {

inline constexpr double default_breakdown_threshold = 0.05;

struct Deviation {
    std::string observable;
    double max_abs = 0.0;
    double rms = 0.0;
};

struct ComparisonReport {
    std::string model_a, model_b;
    double t_begin = 0.0, t_end = 0.0;
    double threshold = default_breakdown_threshold;
    std::vector<Deviation> deviations;
    /// First record where |dq| exceeds threshold * 2 hbar*k0.
    std::optional<double> breakdown_time;
    /// Larger of the two models' leakage at each record in the window.
    std::vector<double> leakage;

    const Deviation& deviation(std::string_view observable) const;
    double max_leakage() const;
};

/// Observables compared by default.
inline const std::vector<std::string> compared_observables{"x", "p", "q", "sigma_x", "sigma_z", "p_in", "energy"};

/// Both series must share record times (no resampling); UsageError otherwise.
/// The window [t_begin, t_end] defaults to the whole run.
ComparisonReport compare(const ObservableSeries& a, const ObservableSeries& b,
                         double threshold = default_breakdown_threshold,
                         std::optional<double> t_begin = std::nullopt, std::optional<double> t_end = std::nullopt);

/// Largest |a_i - b_i| over every column in `columns`; UsageError on mismatched records.
double max_column_delta(const ObservableSeries& a, const ObservableSeries& b, const std::vector<std::string>& columns);

} // namespace qrm
