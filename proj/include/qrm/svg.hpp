#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "qrm/series.hpp"

namespace qrm {

struct Curve {
    std::string label;
    std::vector<double> x, y;
};

struct LineChart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Curve> curves;
};

/// Static SVG; identical input gives identical bytes. Charts without data
/// get empty axes on [0, 1].
std::string render_svg(const LineChart& chart);

inline const std::vector<std::string> plotted_observables{"x",    "p",   "q",      "sigma_x", "sigma_z",
                                                          "p_in", "norm", "energy", "leakage"};

/// One SVG per observable, overlaying every series; returns the written files.
std::vector<std::filesystem::path> emit_plots(const std::vector<ObservableSeries>& series,
                                              const std::filesystem::path& out_dir, const std::string& prefix,
                                              const std::vector<std::string>& observables = plotted_observables);

} // namespace qrm
