#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "fracfreq/model.hpp"
#include "fracfreq/response.hpp"

// Closed-loop stability from the open-loop Nyquist curve and the critical
// point (-1, i0).

namespace fracfreq {

inline constexpr double marginal_distance_tol = 1e-6;

struct NyquistCurve {
    std::vector<double> omegas;   // positive branch, ascending
    std::vector<Complex> points;  // positive branch, then conjugates in
                                  // descending omega when mirrored
    bool mirrored{false};
    std::vector<double> excluded_omegas;
};

/// Samples the open-loop curve; with mirror, the conjugate branch is
/// appended in descending omega so the contour closes up to the real axis.
inline NyquistCurve nyquist_curve(const FractionalTF& g_open, const FrequencySweep& s,
                                  bool mirror = true) {
    NyquistCurve c;
    c.mirrored = mirror;
    for (double w : s.frequencies()) {
        try {
            c.points.push_back(eval_tf(g_open, w));
            c.omegas.push_back(w);
        } catch (const singular_evaluation&) {
            c.excluded_omegas.push_back(w);
        }
    }
    if (mirror) {
        const size_t n = c.omegas.size();
        for (size_t i = n; i-- > 0;) c.points.push_back(std::conj(c.points[i]));
    }
    return c;
}

enum class WindingStatus { ok, center_on_curve, undersampled };

struct WindingResult {
    int count{0};
    WindingStatus status{WindingStatus::ok};
    double fractional_residual{0.0};
};

/// Net counter-clockwise encirclements of center: principal-value angle
/// increments summed along the closed contour. A fractional residual above
/// 0.1 turns means the curve is under-sampled.
inline WindingResult winding_number(const NyquistCurve& curve, Complex center) {
    WindingResult r;
    const auto& p = curve.points;
    if (p.size() < 2) return r;
    double total = 0.0;
    for (size_t i = 0; i < p.size(); ++i) {
        const Complex a = p[i] - center;
        const Complex b = p[(i + 1) % p.size()] - center;
        if (std::abs(a) < 1e-9) {
            r.status = WindingStatus::center_on_curve;
            return r;
        }
        total += std::arg(b / a);
    }
    const double turns = total / (2.0 * pi);
    r.count = static_cast<int>(std::lround(turns));
    r.fractional_residual = std::abs(turns - r.count);
    if (r.fractional_residual > 0.1) r.status = WindingStatus::undersampled;
    return r;
}

enum class Verdict { stable, unstable, marginal, indeterminate };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::stable: return "stable";
        case Verdict::unstable: return "unstable";
        case Verdict::marginal: return "marginal";
        case Verdict::indeterminate: return "indeterminate";
    }
    return "indeterminate";
}

struct StabilityVerdict {
    Verdict verdict{Verdict::indeterminate};
    int winding_number{0};
    double min_distance_to_critical{0.0};
    double critical_omega{0.0};
    std::vector<std::string> warnings;
};

namespace detail {

// Golden-section minimization of |G(jw) + 1| between bracketing samples.
inline double refine_min_distance(const FractionalTF& g, double lo, double hi,
                                  double& w_at_min) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = std::log(lo), b = std::log(hi);
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    auto dist = [&](double lw) { return std::abs(eval_tf(g, std::exp(lw)) + 1.0); };
    double fc = dist(c), fd = dist(d);
    while ((b - a) > 1e-9) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = dist(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = dist(d);
        }
    }
    w_at_min = std::exp((a + b) / 2.0);
    return dist((a + b) / 2.0);
}

// Structural limit of |G| at an edge of the sweep: 0, +inf, or a finite
// value set by the dominant terms.
enum class LimitKind { zero, finite, infinite };

inline LimitKind edge_limit(const FractionalTF& g, bool high_end) {
    const auto& nt = high_end ? g.numerator.terms().back() : g.numerator.terms().front();
    const auto& dt = high_end ? g.denominator.terms().back() : g.denominator.terms().front();
    const double rel = nt.exponent - dt.exponent;  // growth of |G| in the limit
    const double tol = FractionalPolynomial::exponent_merge_tol;
    if (std::abs(rel) <= tol) return LimitKind::finite;
    const bool grows = high_end ? (rel > 0.0) : (rel < 0.0);
    return grows ? LimitKind::infinite : LimitKind::zero;
}

}  // namespace detail

/// Critical-point test: stable iff the mirrored contour does not encircle
/// (-1, i0) and stays clear of it. Assumes the open loop has no
/// right-half-plane singularities.
inline StabilityVerdict assess_stability(const FractionalTF& g_open,
                                         const FrequencySweep& s) {
    StabilityVerdict out;
    const NyquistCurve curve = nyquist_curve(g_open, s, /*mirror=*/true);
    if (curve.omegas.size() < 2) {
        out.verdict = Verdict::indeterminate;
        out.warnings.push_back("too few usable samples");
        return out;
    }
    if (!curve.excluded_omegas.empty())
        out.warnings.push_back("singular evaluations excluded from the contour");

    // truncation checks: the contour is only closed when |G| has settled
    // toward its structural limit at both sweep edges
    bool truncated = false;
    const double mag_lo = std::abs(curve.points.front());
    const double mag_hi = std::abs(curve.points[curve.omegas.size() - 1]);
    const auto check_edge = [&](bool high_end, double mag) {
        switch (detail::edge_limit(g_open, high_end)) {
            case detail::LimitKind::finite:
                return;  // contour converges to a finite real point
            case detail::LimitKind::zero:
                if (mag > 0.1) truncated = true;
                return;
            case detail::LimitKind::infinite:
                if (mag < 10.0) truncated = true;
                return;
        }
    };
    check_edge(false, mag_lo);
    check_edge(true, mag_hi);
    if (g_open.numerator.highest_exponent() >
        g_open.denominator.highest_exponent() +
            FractionalPolynomial::exponent_merge_tol) {
        truncated = true;
        out.warnings.push_back("open loop is not proper; no closure at infinity");
    }

    // nearest approach to the critical point, refined between samples
    size_t i_min = 0;
    double best = std::abs(curve.points[0] + 1.0);
    for (size_t i = 1; i < curve.omegas.size(); ++i) {
        const double d = std::abs(curve.points[i] + 1.0);
        if (d < best) { best = d; i_min = i; }
    }
    const double lo = curve.omegas[i_min > 0 ? i_min - 1 : 0];
    const double hi = curve.omegas[std::min(i_min + 1, curve.omegas.size() - 1)];
    double w_min = curve.omegas[i_min];
    double d_min = best;
    if (hi > lo) d_min = detail::refine_min_distance(g_open, lo, hi, w_min);
    if (d_min > best) { d_min = best; w_min = curve.omegas[i_min]; }
    out.min_distance_to_critical = d_min;
    out.critical_omega = w_min;

    const WindingResult wr = winding_number(curve, Complex{-1.0, 0.0});
    out.winding_number = wr.count;

    if (wr.status == WindingStatus::center_on_curve || d_min <= marginal_distance_tol) {
        out.verdict = Verdict::marginal;
        return out;
    }
    if (wr.status == WindingStatus::undersampled) {
        out.verdict = Verdict::indeterminate;
        out.warnings.push_back("winding number did not settle; increase sweep density");
        return out;
    }
    if (truncated) {
        out.verdict = Verdict::indeterminate;
        out.warnings.push_back("sweep range truncates the contour near the critical magnitude");
        return out;
    }
    out.verdict = (wr.count == 0) ? Verdict::stable : Verdict::unstable;
    return out;
}

}  // namespace fracfreq
