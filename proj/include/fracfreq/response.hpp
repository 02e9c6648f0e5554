#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "fracfreq/model.hpp"

// Frequency sweeps, Bode data and gain/phase margins.

namespace fracfreq {

/// Logarithmic frequency grid. Defaults cover [1e-3, 1e3] rad/s at 64
/// points per decade.
struct FrequencySweep {
    FrequencySweep(double omega_min_ = 1e-3, double omega_max_ = 1e3,
                   int points_per_decade_ = 64)
        : omega_min(omega_min_), omega_max(omega_max_),
          points_per_decade(points_per_decade_) {
        if (!(omega_min > 0.0))
            throw std::invalid_argument("FrequencySweep: omega_min must be > 0");
        if (!(omega_max > omega_min))
            throw std::invalid_argument("FrequencySweep: omega_max must exceed omega_min");
        if (std::log10(omega_max / omega_min) < 1e-6)
            throw std::invalid_argument("FrequencySweep: range must span > 0 decades");
        if (points_per_decade < 8)
            throw std::invalid_argument("FrequencySweep: points_per_decade must be >= 8");
    }

    double omega_min;
    double omega_max;
    int points_per_decade;

    std::vector<double> frequencies() const {
        const double decades = std::log10(omega_max / omega_min);
        const auto n = static_cast<size_t>(std::ceil(decades * points_per_decade)) + 1;
        std::vector<double> w(n);
        for (size_t i = 0; i < n; ++i)
            w[i] = omega_min * std::pow(10.0, decades * static_cast<double>(i) /
                                                  static_cast<double>(n - 1));
        w.back() = omega_max;
        return w;
    }
};

/// Shifts each angle by a multiple of 2*pi so adjacent steps stay within
/// (-pi, pi]; the first sample is the anchor.
inline std::vector<double> unwrap_phase(const std::vector<double>& raw) {
    if (raw.empty())
        throw std::invalid_argument("unwrap_phase: empty input");
    std::vector<double> out(raw.size());
    out[0] = raw[0];
    for (size_t i = 1; i < raw.size(); ++i) {
        double step = raw[i] - raw[i - 1];
        step -= 2.0 * pi * std::round(step / (2.0 * pi));
        out[i] = out[i - 1] + step;
    }
    return out;
}

struct FrequencyResponseSet {
    FractionalTF source;            // model the samples came from
    std::vector<double> omegas;
    std::vector<Complex> values;
    std::vector<double> mag_db;
    std::vector<double> phase_rad;  // unwrapped
    std::vector<double> excluded_omegas;  // singular evaluations, recorded
};

inline FrequencyResponseSet sweep(const FractionalTF& g, const FrequencySweep& s) {
    FrequencyResponseSet r{g, {}, {}, {}, {}, {}};
    std::vector<double> raw_phase;
    for (double w : s.frequencies()) {
        Complex v;
        try {
            v = eval_tf(g, w);
        } catch (const singular_evaluation&) {
            r.excluded_omegas.push_back(w);
            continue;
        }
        r.omegas.push_back(w);
        r.values.push_back(v);
        r.mag_db.push_back(20.0 * std::log10(std::abs(v)));
        raw_phase.push_back(std::arg(v));
    }
    if (!raw_phase.empty()) r.phase_rad = unwrap_phase(raw_phase);
    return r;
}

struct Margins {
    std::optional<double> gain_margin_db;
    std::optional<double> phase_crossover_omega;
    std::optional<double> phase_margin_deg;
    std::optional<double> gain_crossover_omega;
    bool multiple_phase_crossings{false};
    bool multiple_gain_crossings{false};
};

namespace detail {

// Bisection on f over [lo, hi] assuming f(lo) and f(hi) bracket a root.
// Stops at 1e-6 relative width in omega.
template <typename F>
double bisect_omega(F&& f, double lo, double hi) {
    double flo = f(lo);
    for (int it = 0; it < 200 && (hi - lo) > 1e-6 * lo; ++it) {
        const double mid = std::sqrt(lo * hi);
        const double fm = f(mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return std::sqrt(lo * hi);
}

// Unwrapped phase of g at omega, referenced to a nearby sample whose
// unwrapped phase is known.
inline double local_phase(const FractionalTF& g, double omega, double ref_omega,
                          double ref_phase) {
    double step = std::arg(eval_tf(g, omega)) - std::arg(eval_tf(g, ref_omega));
    step -= 2.0 * pi * std::round(step / (2.0 * pi));
    return ref_phase + step;
}

}  // namespace detail

/// Textbook margins from an open-loop response. Crossovers are refined by
/// bisection on the continuous model between bracketing samples; with
/// several crossings the lowest-frequency one is reported and flagged.
inline Margins margins(const FrequencyResponseSet& resp) {
    Margins m;
    const auto& g = resp.source;
    const size_t n = resp.omegas.size();

    // phase crossover: unwrapped phase through -pi
    for (size_t i = 0; i + 1 < n; ++i) {
        const double a = resp.phase_rad[i] + pi;
        const double b = resp.phase_rad[i + 1] + pi;
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
            if (m.phase_crossover_omega) {
                m.multiple_phase_crossings = true;
                break;
            }
            const double wi = resp.omegas[i];
            const double pi_ref = resp.phase_rad[i];
            const double wc = detail::bisect_omega(
                [&](double w) { return detail::local_phase(g, w, wi, pi_ref) + pi; },
                resp.omegas[i], resp.omegas[i + 1]);
            m.phase_crossover_omega = wc;
            m.gain_margin_db = -20.0 * std::log10(std::abs(eval_tf(g, wc)));
        }
    }

    // gain crossover: |G| through 1
    for (size_t i = 0; i + 1 < n; ++i) {
        const double a = resp.mag_db[i];
        const double b = resp.mag_db[i + 1];
        if (a == 0.0 || (a < 0.0) != (b < 0.0)) {
            if (m.gain_crossover_omega) {
                m.multiple_gain_crossings = true;
                break;
            }
            const double wc = detail::bisect_omega(
                [&](double w) { return std::log10(std::abs(eval_tf(g, w))); },
                resp.omegas[i], resp.omegas[i + 1]);
            m.gain_crossover_omega = wc;
            const double ph = detail::local_phase(g, wc, resp.omegas[i], resp.phase_rad[i]);
            m.phase_margin_deg = 180.0 + ph * 180.0 / pi;
        }
    }
    return m;
}

}  // namespace fracfreq
