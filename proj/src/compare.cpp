#include "qrm/compare.hpp"

#include <algorithm>
#include <cmath>

#include "qrm/errors.hpp"

namespace qrm {

namespace {

void check_time_grids(const ObservableSeries& a, const ObservableSeries& b)
{
    if (a.size() != b.size())
        throw UsageError("series have different record counts (" + std::to_string(a.size()) + " vs " +
                         std::to_string(b.size()) + "); runs must share record times");
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({1.0, std::abs(a.t[i]), std::abs(b.t[i])});
        if (std::abs(a.t[i] - b.t[i]) > 1e-9 * scale)
            throw UsageError("record " + std::to_string(i) + " has different times in the two series");
    }
}

} // namespace

const Deviation& ComparisonReport::deviation(std::string_view observable) const
{
    for (const auto& d : deviations)
        if (d.observable == observable)
            return d;
    throw UsageError("observable '" + std::string(observable) + "' was not compared");
}

double ComparisonReport::max_leakage() const
{
    return leakage.empty() ? 0.0 : *std::max_element(leakage.begin(), leakage.end());
}

ComparisonReport compare(const ObservableSeries& a, const ObservableSeries& b, double threshold,
                         std::optional<double> t_begin, std::optional<double> t_end)
{
    check_time_grids(a, b);
    if (!(threshold > 0.0))
        throw UsageError("breakdown threshold must be positive");

    ComparisonReport r;
    r.model_a = a.model;
    r.model_b = b.model;
    r.threshold = threshold;
    std::vector<std::size_t> window;
    for (std::size_t i = 0; i < a.size(); ++i)
        if ((!t_begin || a.t[i] >= *t_begin) && (!t_end || a.t[i] <= *t_end))
            window.push_back(i);
    if (!window.empty()) {
        r.t_begin = a.t[window.front()];
        r.t_end = a.t[window.back()];
    }

    for (const auto& name : compared_observables) {
        const auto& ca = a.column(name);
        const auto& cb = b.column(name);
        Deviation d{name};
        double sum2 = 0.0;
        for (auto i : window) {
            const double delta = std::abs(ca[i] - cb[i]);
            d.max_abs = std::max(d.max_abs, delta);
            sum2 += delta * delta;
        }
        d.rms = window.empty() ? 0.0 : std::sqrt(sum2 / window.size());
        r.deviations.push_back(d);
    }

    for (auto i : window) {
        r.leakage.push_back(std::max(a.leakage[i], b.leakage[i]));
        if (!r.breakdown_time && std::abs(a.q[i] - b.q[i]) > threshold * 2.0)
            r.breakdown_time = a.t[i];
    }
    return r;
}

double max_column_delta(const ObservableSeries& a, const ObservableSeries& b, const std::vector<std::string>& columns)
{
    check_time_grids(a, b);
    double worst = 0.0;
    for (const auto& name : columns) {
        const auto& ca = a.column(name);
        const auto& cb = b.column(name);
        for (std::size_t i = 0; i < ca.size(); ++i)
            worst = std::max(worst, std::abs(ca[i] - cb[i]));
    }
    return worst;
}

} // namespace qrm
