#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fracfreq/response.hpp"
#include "fracfreq/stability.hpp"

// Minimal static SVG renderings of Bode and Nyquist data: axes, curve
// polylines and the critical-point / crossover annotations.

namespace fracfreq {
namespace detail {

struct Scale {
    double lo, hi;
    double px0, px1;
    double at(double v) const { return px0 + (v - lo) / (hi - lo) * (px1 - px0); }
};

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline void polyline(std::ostream& os, const std::vector<double>& xs,
                     const std::vector<double>& ys, const Scale& sx, const Scale& sy,
                     const char* color) {
    os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (size_t i = 0; i < xs.size(); ++i)
        os << num(sx.at(xs[i])) << ',' << num(sy.at(ys[i])) << ' ';
    os << "\"/>\n";
}

inline void axis_box(std::ostream& os, const Scale& sx, const Scale& sy,
                     const std::string& xlabel, const std::string& ylabel) {
    os << "<rect x=\"" << num(sx.px0) << "\" y=\"" << num(sy.px1) << "\" width=\""
       << num(sx.px1 - sx.px0) << "\" height=\"" << num(sy.px0 - sy.px1)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << num((sx.px0 + sx.px1) / 2) << "\" y=\"" << num(sy.px0 + 32)
       << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel << "</text>\n";
    os << "<text x=\"" << num(sx.px0 - 44) << "\" y=\"" << num((sy.px0 + sy.px1) / 2)
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 "
       << num(sx.px0 - 44) << ' ' << num((sy.px0 + sy.px1) / 2) << ")\">" << ylabel
       << "</text>\n";
    // decade ticks on x, five ticks on y
    for (double d = std::ceil(sx.lo); d <= sx.hi + 1e-9; d += 1.0) {
        os << "<line x1=\"" << num(sx.at(d)) << "\" y1=\"" << num(sy.px0) << "\" x2=\""
           << num(sx.at(d)) << "\" y2=\"" << num(sy.px0 + 4) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(sx.at(d)) << "\" y=\"" << num(sy.px0 + 16)
           << "\" text-anchor=\"middle\" font-size=\"10\">1e" << static_cast<int>(d)
           << "</text>\n";
    }
    for (int i = 0; i <= 4; ++i) {
        const double v = sy.lo + (sy.hi - sy.lo) * i / 4.0;
        os << "<line x1=\"" << num(sx.px0 - 4) << "\" y1=\"" << num(sy.at(v))
           << "\" x2=\"" << num(sx.px0) << "\" y2=\"" << num(sy.at(v))
           << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << num(sx.px0 - 8) << "\" y=\"" << num(sy.at(v) + 3)
           << "\" text-anchor=\"end\" font-size=\"10\">" << num(v) << "</text>\n";
    }
}

inline std::pair<double, double> padded_range(double lo, double hi) {
    if (hi - lo < 1e-12) { lo -= 1.0; hi += 1.0; }
    const double pad = 0.05 * (hi - lo);
    return {lo - pad, hi + pad};
}

}  // namespace detail

/// Two-panel Bode plot (magnitude over phase) with optional crossover lines.
inline void write_bode_svg(const FrequencyResponseSet& r, std::ostream& os,
                           const Margins* m = nullptr) {
    using detail::Scale;
    const double W = 640, H = 620;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" font-family=\"sans-serif\">\n";
    std::vector<double> logw(r.omegas.size());
    for (size_t i = 0; i < logw.size(); ++i) logw[i] = std::log10(r.omegas[i]);
    std::vector<double> phase_deg(r.phase_rad.size());
    for (size_t i = 0; i < phase_deg.size(); ++i)
        phase_deg[i] = r.phase_rad[i] * 180.0 / pi;

    auto span = [](const std::vector<double>& v) {
        return detail::padded_range(*std::min_element(v.begin(), v.end()),
                                    *std::max_element(v.begin(), v.end()));
    };
    const Scale sx{logw.front(), logw.back(), 70, W - 20};
    const auto [mlo, mhi] = span(r.mag_db);
    const Scale sy_mag{mlo, mhi, 280, 30};
    const auto [plo, phi] = span(phase_deg);
    const Scale sy_ph{plo, phi, 580, 330};

    detail::axis_box(os, sx, sy_mag, "omega [rad/s]", "magnitude [dB]");
    detail::polyline(os, logw, r.mag_db, sx, sy_mag, "#1f77b4");
    detail::axis_box(os, sx, sy_ph, "omega [rad/s]", "phase [deg]");
    detail::polyline(os, logw, phase_deg, sx, sy_ph, "#1f77b4");

    auto crossover_line = [&](double w, const Scale& sy, const char* color) {
        const double x = sx.at(std::log10(w));
        os << "<line x1=\"" << detail::num(x) << "\" y1=\"" << detail::num(sy.px0)
           << "\" x2=\"" << detail::num(x) << "\" y2=\"" << detail::num(sy.px1)
           << "\" stroke=\"" << color << "\" stroke-dasharray=\"4 3\"/>\n";
    };
    if (m) {
        if (m->gain_crossover_omega) {
            crossover_line(*m->gain_crossover_omega, sy_mag, "#2ca02c");
            crossover_line(*m->gain_crossover_omega, sy_ph, "#2ca02c");
        }
        if (m->phase_crossover_omega) {
            crossover_line(*m->phase_crossover_omega, sy_mag, "#d62728");
            crossover_line(*m->phase_crossover_omega, sy_ph, "#d62728");
        }
        if (m->phase_margin_deg)
            os << "<text x=\"" << W - 24 << "\" y=\"20\" text-anchor=\"end\" font-size=\"12\">"
               << "PM = " << detail::num(*m->phase_margin_deg) << " deg</text>\n";
        if (m->gain_margin_db)
            os << "<text x=\"" << W - 24 << "\" y=\"36\" text-anchor=\"end\" font-size=\"12\">"
               << "GM = " << detail::num(*m->gain_margin_db) << " dB</text>\n";
    }
    os << "</svg>\n";
}

/// Nyquist curve with the critical point (-1, 0) marked.
inline void write_nyquist_svg(const NyquistCurve& c, std::ostream& os) {
    using detail::Scale;
    const double W = 640, H = 640;
    double re_lo = -1.0, re_hi = -1.0, im_lo = 0.0, im_hi = 0.0;
    for (const auto& p : c.points) {
        re_lo = std::min(re_lo, p.real());
        re_hi = std::max(re_hi, p.real());
        im_lo = std::min(im_lo, p.imag());
        im_hi = std::max(im_hi, p.imag());
    }
    std::tie(re_lo, re_hi) = detail::padded_range(re_lo, re_hi);
    std::tie(im_lo, im_hi) = detail::padded_range(im_lo, im_hi);
    const Scale sx{re_lo, re_hi, 60, W - 20};
    const Scale sy{im_lo, im_hi, H - 50, 20};

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\""
       << H << "\" font-family=\"sans-serif\">\n";
    detail::axis_box(os, sx, sy, "Re", "Im");
    if (re_lo < 0.0 && re_hi > 0.0)
        os << "<line x1=\"" << detail::num(sx.at(0)) << "\" y1=\"" << detail::num(sy.px0)
           << "\" x2=\"" << detail::num(sx.at(0)) << "\" y2=\"" << detail::num(sy.px1)
           << "\" stroke=\"#bbbbbb\"/>\n";
    if (im_lo < 0.0 && im_hi > 0.0)
        os << "<line x1=\"" << detail::num(sx.px0) << "\" y1=\"" << detail::num(sy.at(0))
           << "\" x2=\"" << detail::num(sx.px1) << "\" y2=\"" << detail::num(sy.at(0))
           << "\" stroke=\"#bbbbbb\"/>\n";

    std::vector<double> xs, ys;
    for (const auto& p : c.points) { xs.push_back(p.real()); ys.push_back(p.imag()); }
    detail::polyline(os, xs, ys, sx, sy, "#1f77b4");

    os << "<circle cx=\"" << detail::num(sx.at(-1.0)) << "\" cy=\"" << detail::num(sy.at(0.0))
       << "\" r=\"4\" fill=\"#d62728\"/>\n";
    os << "<text x=\"" << detail::num(sx.at(-1.0) + 8) << "\" y=\""
       << detail::num(sy.at(0.0) - 8) << "\" font-size=\"12\">(-1, 0)</text>\n";
    os << "</svg>\n";
}

}  // namespace fracfreq
