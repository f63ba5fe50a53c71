#include "pmsim/svgplot.hpp"

#include <algorithm>
#include <cmath>

#include "pmsim/textio.hpp"

namespace pmsim {

namespace {

constexpr double kW = 960, kH = 540;
constexpr double kL = 70, kR = 20, kT = 20, kB = 50;  // margins

struct Mapper {
    double tmin, tmax, ymin, ymax;
    double x(double t) const { return kL + (t - tmin) / (tmax - tmin) * (kW - kL - kR); }
    double y(double v) const { return kH - kB - (v - ymin) / (ymax - ymin) * (kH - kT - kB); }
};

std::string fmt_short(double v) {
    // Tick labels: trim float dust so 0.30000000000000004 prints as 0.3.
    const double r = std::round(v * 1e6) / 1e6;
    return format_double(r == 0.0 ? 0.0 : r);
}

std::string polyline(const Mapper& m, const Trace& tr, double TraceRow::*field,
                     const char* style) {
    std::string pts;
    for (const TraceRow& r : tr.rows) {
        pts += format_double(std::round(m.x(r.t) * 100) / 100);
        pts += ",";
        pts += format_double(std::round(m.y(r.*field) * 100) / 100);
        pts += " ";
    }
    return std::string("<polyline fill=\"none\" ") + style + " points=\"" + pts + "\"/>\n";
}

// Round tick spacing to a 1/2/5 decade.
double nice_step(double span) {
    const double raw = span / 8.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double n = raw / mag;
    const double f = n < 1.5 ? 1.0 : n < 3.5 ? 2.0 : n < 7.5 ? 5.0 : 10.0;
    return f * mag;
}

}  // namespace

std::string trace_to_svg(const Trace& tr) {
    Mapper m{0, 1, -1, 1};
    if (!tr.rows.empty()) {
        m.tmin = tr.rows.front().t;
        m.tmax = std::max(tr.rows.back().t, m.tmin + 1e-9);
        double lo = tr.rows.front().y, hi = lo;
        for (const TraceRow& r : tr.rows) {
            for (double v : {r.y, r.posture_target, r.movement_target}) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
        }
        const double pad = std::max(0.05 * (hi - lo), 0.5);
        m.ymin = lo - pad;
        m.ymax = hi + pad;
    }

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt_short(kW) +
           "\" height=\"" + fmt_short(kH) + "\" viewBox=\"0 0 " + fmt_short(kW) + " " +
           fmt_short(kH) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

    // axes
    svg += "<line x1=\"" + fmt_short(kL) + "\" y1=\"" + fmt_short(kH - kB) + "\" x2=\"" +
           fmt_short(kW - kR) + "\" y2=\"" + fmt_short(kH - kB) +
           "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + fmt_short(kL) + "\" y1=\"" + fmt_short(kT) + "\" x2=\"" +
           fmt_short(kL) + "\" y2=\"" + fmt_short(kH - kB) + "\" stroke=\"black\"/>\n";

    const double tstep = nice_step(m.tmax - m.tmin);
    for (double t = std::ceil(m.tmin / tstep) * tstep; t <= m.tmax + 1e-9; t += tstep) {
        const double x = m.x(t);
        svg += "<line x1=\"" + fmt_short(x) + "\" y1=\"" + fmt_short(kH - kB) + "\" x2=\"" +
               fmt_short(x) + "\" y2=\"" + fmt_short(kH - kB + 5) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt_short(x) + "\" y=\"" + fmt_short(kH - kB + 20) +
               "\" font-size=\"12\" text-anchor=\"middle\">" + fmt_short(t) + "</text>\n";
    }
    const double ystep = nice_step(m.ymax - m.ymin);
    for (double v = std::ceil(m.ymin / ystep) * ystep; v <= m.ymax + 1e-9; v += ystep) {
        const double y = m.y(v);
        svg += "<line x1=\"" + fmt_short(kL - 5) + "\" y1=\"" + fmt_short(y) + "\" x2=\"" +
               fmt_short(kL) + "\" y2=\"" + fmt_short(y) + "\" stroke=\"black\"/>\n";
        svg += "<text x=\"" + fmt_short(kL - 8) + "\" y=\"" + fmt_short(y + 4) +
               "\" font-size=\"12\" text-anchor=\"end\">" + fmt_short(v) + "</text>\n";
    }
    svg += "<text x=\"" + fmt_short((kL + kW - kR) / 2) + "\" y=\"" + fmt_short(kH - 10) +
           "\" font-size=\"13\" text-anchor=\"middle\">t [s]</text>\n";

    // inputs dashed in color, result solid black
    svg += polyline(m, tr, &TraceRow::posture_target,
                    "stroke=\"#1f77b4\" stroke-dasharray=\"6 4\"");
    svg += polyline(m, tr, &TraceRow::movement_target,
                    "stroke=\"#d62728\" stroke-dasharray=\"6 4\"");
    svg += polyline(m, tr, &TraceRow::y, "stroke=\"black\" stroke-width=\"1.5\"");

    // legend
    svg += "<text x=\"" + fmt_short(kW - kR - 220) + "\" y=\"" + fmt_short(kT + 16) +
           "\" font-size=\"12\" fill=\"#1f77b4\">posture target (dashed)</text>\n";
    svg += "<text x=\"" + fmt_short(kW - kR - 220) + "\" y=\"" + fmt_short(kT + 32) +
           "\" font-size=\"12\" fill=\"#d62728\">movement target (dashed)</text>\n";
    svg += "<text x=\"" + fmt_short(kW - kR - 220) + "\" y=\"" + fmt_short(kT + 48) +
           "\" font-size=\"12\">y (solid)</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace pmsim
