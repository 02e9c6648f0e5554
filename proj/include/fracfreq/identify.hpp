#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <sstream>
#include <vector>

#include "fracfreq/model.hpp"

// Frequency-domain identification: weighted least squares against measured
// response data. Coefficients come from an equation-error linearization with
// optional Sanathanan-Koerner reweighting; free exponents are searched by a
// Nelder-Mead simplex.

namespace fracfreq {

struct MeasuredResponse {
    MeasuredResponse(std::vector<double> omegas_, std::vector<Complex> values_,
                     std::vector<double> weights_ = {})
        : omegas(std::move(omegas_)), values(std::move(values_)),
          weights(std::move(weights_)) {
        if (weights.empty()) weights.assign(omegas.size(), 1.0);
        if (omegas.size() != values.size() || omegas.size() != weights.size())
            throw std::invalid_argument("MeasuredResponse: length mismatch");
        if (omegas.empty())
            throw std::invalid_argument("MeasuredResponse: no samples");
        for (size_t i = 0; i < omegas.size(); ++i) {
            if (!(omegas[i] > 0.0))
                throw std::invalid_argument("MeasuredResponse: omegas must be > 0");
            if (i > 0 && !(omegas[i] > omegas[i - 1]))
                throw std::invalid_argument("MeasuredResponse: omegas must ascend");
            if (!(weights[i] >= 0.0))
                throw std::invalid_argument("MeasuredResponse: weights must be >= 0");
        }
        if (std::all_of(weights.begin(), weights.end(),
                        [](double w) { return w == 0.0; }))
            throw std::invalid_argument("MeasuredResponse: all weights are zero");
    }

    std::vector<double> omegas;
    std::vector<Complex> values;
    std::vector<double> weights;
};

enum class Side { numerator, denominator };

struct CoefficientRef {
    Side side{Side::denominator};
    size_t index{0};
};

/// Exponent layout of the model to fit. Exactly one coefficient is pinned
/// to 1 to fix the numerator/denominator scaling gauge; by default the
/// lowest denominator exponent's coefficient.
struct ModelStructure {
    ModelStructure(std::vector<double> num_exps, std::vector<double> den_exps,
                   CoefficientRef pinned_ = {Side::denominator, 0})
        : num_exponents(std::move(num_exps)), den_exponents(std::move(den_exps)),
          num_exponent_free(num_exponents.size(), false),
          den_exponent_free(den_exponents.size(), false), pinned(pinned_) {
        if (num_exponents.empty() || den_exponents.empty())
            throw std::invalid_argument("ModelStructure: empty exponent list");
        auto ascending = [](const std::vector<double>& v) {
            for (size_t i = 1; i < v.size(); ++i)
                if (!(v[i] > v[i - 1])) return false;
            return true;
        };
        if (!ascending(num_exponents) || !ascending(den_exponents))
            throw std::invalid_argument("ModelStructure: exponents must ascend");
        const size_t limit = pinned.side == Side::numerator ? num_exponents.size()
                                                            : den_exponents.size();
        if (pinned.index >= limit)
            throw std::invalid_argument("ModelStructure: pinned coefficient not in structure");
    }

    std::vector<double> num_exponents;
    std::vector<double> den_exponents;
    std::vector<bool> num_exponent_free;
    std::vector<bool> den_exponent_free;
    CoefficientRef pinned;

    size_t free_coefficient_count() const {
        return num_exponents.size() + den_exponents.size() - 1;
    }
};

struct FitResult {
    FractionalTF model;
    double q_value{0.0};
    int iterations{0};
    bool converged{false};
};

/// The quadratic criterion: sum of W^2 |F - G|^2 over all samples.
inline double criterion(const FractionalTF& g, const MeasuredResponse& data) {
    double q = 0.0;
    for (size_t m = 0; m < data.omegas.size(); ++m) {
        const Complex r = data.values[m] - eval_tf(g, data.omegas[m]);
        q += data.weights[m] * data.weights[m] * std::norm(r);
    }
    return q;
}

struct LinearFitOptions {
    bool sk_reweighting{true};
    int max_passes{20};
    double coefficient_tol{1e-10};
};

namespace detail {

// One weighted equation-error solve: min sum w^2 |F*D - N|^2 over the free
// coefficients, the pinned one held at 1.
inline FractionalTF solve_equation_error(const MeasuredResponse& data,
                                         const std::vector<double>& num_exps,
                                         const std::vector<double>& den_exps,
                                         CoefficientRef pinned,
                                         const std::vector<double>& row_weights) {
    const size_t nn = num_exps.size();
    const size_t nd = den_exps.size();
    const size_t nfree = nn + nd - 1;

    size_t rows = 0;
    for (double w : row_weights)
        if (w > 0.0) rows += 2;
    if (rows / 2 < nfree) {
        std::ostringstream msg;
        msg << "fit_linear: " << rows / 2 << " usable samples cannot determine "
            << nfree << " coefficients";
        throw std::runtime_error(msg.str());
    }

    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                              static_cast<Eigen::Index>(nfree));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(rows));

    // column layout: numerator coefficients first, then denominator, with
    // the pinned column removed
    auto column_of = [&](Side side, size_t k) -> long {
        size_t col = side == Side::numerator ? k : nn + k;
        const size_t pin_col =
            pinned.side == Side::numerator ? pinned.index : nn + pinned.index;
        if (col == pin_col) return -1;
        return static_cast<long>(col > pin_col ? col - 1 : col);
    };

    Eigen::Index row = 0;
    for (size_t m = 0; m < data.omegas.size(); ++m) {
        const double w = row_weights[m];
        if (w == 0.0) continue;
        const double omega = data.omegas[m];
        const Complex F = data.values[m];
        Complex pinned_contrib{0.0, 0.0};
        for (size_t k = 0; k < nn; ++k) {
            const Complex basis = -eval_power(omega, num_exps[k]);  // -N side
            const long col = column_of(Side::numerator, k);
            if (col < 0) { pinned_contrib += basis; continue; }
            A(row, col) = w * basis.real();
            A(row + 1, col) = w * basis.imag();
        }
        for (size_t k = 0; k < nd; ++k) {
            const Complex basis = F * eval_power(omega, den_exps[k]);  // +F*D side
            const long col = column_of(Side::denominator, k);
            if (col < 0) { pinned_contrib += basis; continue; }
            A(row, col) = w * basis.real();
            A(row + 1, col) = w * basis.imag();
        }
        rhs(row) = -w * pinned_contrib.real();
        rhs(row + 1) = -w * pinned_contrib.imag();
        row += 2;
    }

    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (static_cast<size_t>(qr.rank()) < nfree) {
        // columns permuted past the rank are the linearly dependent ones
        const auto& perm = qr.colsPermutation().indices();
        std::ostringstream msg;
        msg << "fit_linear: rank-deficient system; collinear exponents:";
        for (Eigen::Index i = qr.rank(); i < perm.size(); ++i) {
            size_t col = static_cast<size_t>(perm(i));
            const size_t pin_col =
                pinned.side == Side::numerator ? pinned.index : nn + pinned.index;
            if (col >= pin_col) ++col;  // undo pinned-column removal
            if (col < nn)
                msg << " num@" << num_exps[col];
            else
                msg << " den@" << den_exps[col - nn];
        }
        throw std::runtime_error(msg.str());
    }
    const Eigen::VectorXd x = qr.solve(rhs);

    std::vector<FractionalTerm> num(nn), den(nd);
    for (size_t k = 0; k < nn; ++k) {
        const long col = column_of(Side::numerator, k);
        num[k] = {col < 0 ? 1.0 : x(col), num_exps[k]};
    }
    for (size_t k = 0; k < nd; ++k) {
        const long col = column_of(Side::denominator, k);
        den[k] = {col < 0 ? 1.0 : x(col), den_exps[k]};
    }
    return FractionalTF(FractionalPolynomial(std::move(num)),
                        FractionalPolynomial(std::move(den)));
}

inline FitResult fit_linear_core(const MeasuredResponse& data,
                                 const std::vector<double>& num_exps,
                                 const std::vector<double>& den_exps,
                                 CoefficientRef pinned,
                                 const LinearFitOptions& opts) {
    std::vector<double> row_weights = data.weights;
    FractionalTF model =
        solve_equation_error(data, num_exps, den_exps, pinned, row_weights);
    int passes = 1;
    bool converged = !opts.sk_reweighting;

    auto coefficients = [](const FractionalTF& g) {
        std::vector<double> c;
        for (const auto& t : g.numerator.terms()) c.push_back(t.coefficient);
        for (const auto& t : g.denominator.terms()) c.push_back(t.coefficient);
        return c;
    };

    while (opts.sk_reweighting && passes < opts.max_passes) {
        for (size_t m = 0; m < data.omegas.size(); ++m) {
            if (data.weights[m] == 0.0) continue;
            const double dmag =
                std::abs(eval_polynomial(model.denominator, data.omegas[m]));
            row_weights[m] = data.weights[m] / std::max(dmag, singular_floor);
        }
        FractionalTF next =
            solve_equation_error(data, num_exps, den_exps, pinned, row_weights);
        ++passes;
        const auto prev_c = coefficients(model);
        const auto next_c = coefficients(next);
        double change = 0.0;
        for (size_t i = 0; i < prev_c.size() && i < next_c.size(); ++i) {
            const double scale = std::max({std::abs(prev_c[i]), std::abs(next_c[i]), 1e-30});
            change = std::max(change, std::abs(next_c[i] - prev_c[i]) / scale);
        }
        model = std::move(next);
        if (change < opts.coefficient_tol || prev_c.size() != next_c.size()) {
            converged = true;
            break;
        }
    }
    const double q = criterion(model, data);
    return FitResult{std::move(model), q, passes, converged || !opts.sk_reweighting};
}

}  // namespace detail

/// Fits coefficients for a structure whose exponents are all fixed.
inline FitResult fit_linear(const MeasuredResponse& data, const ModelStructure& structure,
                            const LinearFitOptions& opts = {}) {
    return detail::fit_linear_core(data, structure.num_exponents,
                                   structure.den_exponents, structure.pinned, opts);
}

struct NonlinearFitOptions {
    double exponent_min{0.0};
    double exponent_max{5.0};
    double simplex_spread{0.25};
    double diameter_tol{1e-6};
    int max_evaluations{2000};
    LinearFitOptions linear{};
};

/// Nelder-Mead search over the structure's free exponents; each trial point
/// solves the linear coefficient fit and is scored by the true criterion.
inline FitResult fit_nonlinear(const MeasuredResponse& data,
                               const ModelStructure& structure,
                               const std::vector<double>& init_exponents,
                               const NonlinearFitOptions& opts = {}) {
    // free exponent slots, numerator first
    std::vector<CoefficientRef> slots;
    for (size_t i = 0; i < structure.num_exponents.size(); ++i)
        if (structure.num_exponent_free[i]) slots.push_back({Side::numerator, i});
    for (size_t i = 0; i < structure.den_exponents.size(); ++i)
        if (structure.den_exponent_free[i]) slots.push_back({Side::denominator, i});
    if (slots.empty())
        throw std::invalid_argument("fit_nonlinear: structure has no free exponents");
    if (init_exponents.size() != slots.size())
        throw std::invalid_argument("fit_nonlinear: init size does not match free exponents");

    const size_t n = slots.size();
    constexpr double failed = 1e100;
    int evaluations = 0;

    auto exponents_at = [&](const std::vector<double>& x) {
        auto num = structure.num_exponents;
        auto den = structure.den_exponents;
        for (size_t i = 0; i < n; ++i) {
            if (slots[i].side == Side::numerator)
                num[slots[i].index] = x[i];
            else
                den[slots[i].index] = x[i];
        }
        return std::pair{num, den};
    };

    auto objective = [&](const std::vector<double>& x) -> double {
        ++evaluations;
        for (double e : x) {
            if (e < opts.exponent_min || e > opts.exponent_max) return failed;
        }
        const auto [num, den] = exponents_at(x);
        try {
            return detail::fit_linear_core(data, num, den, structure.pinned,
                                           opts.linear).q_value;
        } catch (const std::exception&) {
            return failed;
        }
    };

    // initial simplex: init point plus one spread step per coordinate
    std::vector<std::vector<double>> vx(n + 1, init_exponents);
    for (size_t i = 0; i < n; ++i) vx[i + 1][i] += opts.simplex_spread;
    std::vector<double> fv(n + 1);
    for (size_t i = 0; i <= n; ++i) fv[i] = objective(vx[i]);
    if (std::all_of(fv.begin(), fv.end(), [&](double f) { return f >= failed; }))
        throw std::runtime_error("fit_nonlinear: every initial simplex vertex failed");

    auto order = [&] {
        std::vector<size_t> idx(n + 1);
        for (size_t i = 0; i <= n; ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(),
                         [&](size_t a, size_t b) { return fv[a] < fv[b]; });
        std::vector<std::vector<double>> vx2;
        std::vector<double> fv2;
        for (size_t i : idx) { vx2.push_back(vx[i]); fv2.push_back(fv[i]); }
        vx = std::move(vx2);
        fv = std::move(fv2);
    };
    auto diameter = [&] {
        double d = 0.0;
        for (size_t i = 1; i <= n; ++i)
            for (size_t k = 0; k < n; ++k)
                d = std::max(d, std::abs(vx[i][k] - vx[0][k]));
        return d;
    };

    bool converged = false;
    while (evaluations < opts.max_evaluations) {
        order();
        if (diameter() < opts.diameter_tol) { converged = true; break; }

        std::vector<double> centroid(n, 0.0);
        for (size_t i = 0; i < n; ++i)
            for (size_t k = 0; k < n; ++k) centroid[k] += vx[i][k] / static_cast<double>(n);
        auto blend = [&](double t) {
            std::vector<double> p(n);
            for (size_t k = 0; k < n; ++k)
                p[k] = centroid[k] + t * (vx[n][k] - centroid[k]);
            return p;
        };

        const auto reflected = blend(-1.0);
        const double fr = objective(reflected);
        if (fr < fv[0]) {
            const auto expanded = blend(-2.0);
            const double fe = objective(expanded);
            if (fe < fr) { vx[n] = expanded; fv[n] = fe; }
            else { vx[n] = reflected; fv[n] = fr; }
        } else if (fr < fv[n - 1]) {
            vx[n] = reflected;
            fv[n] = fr;
        } else {
            const auto contracted = blend(fr < fv[n] ? -0.5 : 0.5);
            const double fc = objective(contracted);
            if (fc < std::min(fr, fv[n])) {
                vx[n] = contracted;
                fv[n] = fc;
            } else {
                for (size_t i = 1; i <= n; ++i) {  // shrink toward the best
                    for (size_t k = 0; k < n; ++k)
                        vx[i][k] = vx[0][k] + 0.5 * (vx[i][k] - vx[0][k]);
                    fv[i] = objective(vx[i]);
                }
            }
        }
    }
    order();

    const auto [num, den] = exponents_at(vx[0]);
    FitResult best = detail::fit_linear_core(data, num, den, structure.pinned, opts.linear);
    best.iterations = evaluations;
    best.converged = converged;
    return best;
}

}  // namespace fracfreq
