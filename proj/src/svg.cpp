#include "qrm/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "qrm/errors.hpp"

namespace qrm {

namespace {

constexpr double width = 720, height = 420;
constexpr double left = 80, right = 150, top = 40, bottom = 60;
constexpr const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fixed(double v, int digits = 2)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    std::string s = buf;
    return s == "-0.00" ? "0.00" : s;
}

std::string tick_label(double v)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.4g", std::abs(v) < 1e-14 ? 0.0 : v);
    return buf;
}

std::string escaped(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v)
    {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    void settle()
    {
        if (lo > hi) {
            lo = 0.0;
            hi = 1.0;
        } else if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
            const double pad = std::max(1e-12, 0.5 * std::abs(hi));
            lo -= pad;
            hi += pad;
        }
    }
};

double nice_step(double span)
{
    const double raw = span / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0})
        if (raw <= m * mag)
            return m * mag;
    return 10.0 * mag;
}

} // namespace

std::string render_svg(const LineChart& chart)
{
    Range xr, yr;
    for (const auto& c : chart.curves) {
        for (double v : c.x)
            xr.include(v);
        for (double v : c.y)
            yr.include(v);
    }
    xr.settle();
    yr.settle();

    const double pw = width - left - right, ph = height - top - bottom;
    auto sx = [&](double v) { return left + (v - xr.lo) / (xr.hi - xr.lo) * pw; };
    auto sy = [&](double v) { return top + (yr.hi - v) / (yr.hi - yr.lo) * ph; };

    std::ostringstream o;
    o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed(width, 0) << "\" height=\"" << fixed(height, 0)
      << "\" viewBox=\"0 0 " << fixed(width, 0) << ' ' << fixed(height, 0) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">"
      << escaped(chart.title) << "</text>\n";

    for (int axis = 0; axis < 2; ++axis) {
        const Range& r = axis == 0 ? xr : yr;
        const double step = nice_step(r.hi - r.lo);
        for (double v = std::ceil(r.lo / step - 1e-9) * step; v <= r.hi + 1e-9 * step; v += step) {
            if (axis == 0) {
                o << "<line x1=\"" << fixed(sx(v)) << "\" y1=\"" << fixed(top) << "\" x2=\"" << fixed(sx(v))
                  << "\" y2=\"" << fixed(top + ph) << "\" stroke=\"#e0e0e0\"/>\n";
                o << "<text x=\"" << fixed(sx(v)) << "\" y=\"" << fixed(top + ph + 18)
                  << "\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
            } else {
                o << "<line x1=\"" << fixed(left) << "\" y1=\"" << fixed(sy(v)) << "\" x2=\"" << fixed(left + pw)
                  << "\" y2=\"" << fixed(sy(v)) << "\" stroke=\"#e0e0e0\"/>\n";
                o << "<text x=\"" << fixed(left - 6) << "\" y=\"" << fixed(sy(v) + 4) << "\" text-anchor=\"end\">"
                  << tick_label(v) << "</text>\n";
            }
        }
    }
    o << "<rect x=\"" << fixed(left) << "\" y=\"" << fixed(top) << "\" width=\"" << fixed(pw) << "\" height=\""
      << fixed(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
    o << "<text x=\"" << fixed(left + pw / 2) << "\" y=\"" << fixed(height - 16) << "\" text-anchor=\"middle\">"
      << escaped(chart.x_label) << "</text>\n";
    o << "<text transform=\"translate(20 " << fixed(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escaped(chart.y_label) << "</text>\n";

    for (std::size_t i = 0; i < chart.curves.size(); ++i) {
        const auto& c = chart.curves[i];
        const char* colour = palette[i % std::size(palette)];
        const std::size_t n = std::min(c.x.size(), c.y.size());
        if (n > 0) {
            o << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = 0; k < n; ++k) {
                if (!std::isfinite(c.x[k]) || !std::isfinite(c.y[k]))
                    continue;
                o << (k ? " " : "") << fixed(sx(c.x[k])) << ',' << fixed(sy(c.y[k]));
            }
            o << "\"/>\n";
        }
        const double ly = top + 16 + 18 * static_cast<double>(i);
        o << "<line x1=\"" << fixed(left + pw + 12) << "\" y1=\"" << fixed(ly - 4) << "\" x2=\"" << fixed(left + pw + 32)
          << "\" y2=\"" << fixed(ly - 4) << "\" stroke=\"" << colour << "\" stroke-width=\"2\"/>\n";
        o << "<text x=\"" << fixed(left + pw + 38) << "\" y=\"" << fixed(ly) << "\">" << escaped(c.label) << "</text>\n";
    }
    o << "</svg>\n";
    return o.str();
}

std::vector<std::filesystem::path> emit_plots(const std::vector<ObservableSeries>& series,
                                              const std::filesystem::path& out_dir, const std::string& prefix,
                                              const std::vector<std::string>& observables)
{
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> written;
    for (const auto& name : observables) {
        LineChart chart{prefix + ": " + name, "t [hbar/E_r]", name, {}};
        for (const auto& s : series)
            chart.curves.push_back({s.model, s.t, s.column(name)});
        const auto path = out_dir / (prefix + "_" + name + ".svg");
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw UsageError("cannot open '" + path.string() + "' for writing");
        out << render_svg(chart);
        written.push_back(path);
    }
    return written;
}

} // namespace qrm
