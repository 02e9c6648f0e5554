#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

// Fractional-order transfer functions: sums of c*(jw)^e terms with real
// exponents, evaluated on the positive imaginary axis.

namespace fracfreq {

using Complex = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;

/// Thrown when a denominator magnitude falls below the singularity floor.
class singular_evaluation : public std::runtime_error {
public:
    explicit singular_evaluation(double omega)
        : std::runtime_error("singular evaluation at omega = " + std::to_string(omega)),
          omega_(omega) {}
    double omega() const { return omega_; }

private:
    double omega_;
};

struct FractionalTerm {
    double coefficient{0.0};
    double exponent{0.0};
};

/// Sum of c*(jw)^e terms, kept in canonical form: exponents strictly
/// ascending, duplicates merged by coefficient addition. A zero coefficient
/// survives canonicalization only when it is the sole term.
class FractionalPolynomial {
public:
    static constexpr double exponent_merge_tol = 1e-12;

    explicit FractionalPolynomial(std::vector<FractionalTerm> terms) {
        if (terms.empty())
            throw std::invalid_argument("FractionalPolynomial: no terms");
        for (const auto& t : terms) {
            if (!std::isfinite(t.coefficient) || !std::isfinite(t.exponent))
                throw std::invalid_argument("FractionalPolynomial: non-finite term");
        }
        std::stable_sort(terms.begin(), terms.end(),
                         [](const FractionalTerm& a, const FractionalTerm& b) {
                             return a.exponent < b.exponent;
                         });
        for (const auto& t : terms) {
            if (!terms_.empty() &&
                t.exponent - terms_.back().exponent <= exponent_merge_tol) {
                terms_.back().coefficient += t.coefficient;
            } else {
                terms_.push_back(t);
            }
        }
        // drop merged-to-zero terms unless nothing else remains
        auto nonzero = [](const FractionalTerm& t) { return t.coefficient != 0.0; };
        if (std::any_of(terms_.begin(), terms_.end(), nonzero)) {
            terms_.erase(std::remove_if(terms_.begin(), terms_.end(),
                                        [&](const FractionalTerm& t) { return !nonzero(t); }),
                         terms_.end());
        } else {
            terms_.resize(1);
            terms_[0].coefficient = 0.0;
        }
    }

    const std::vector<FractionalTerm>& terms() const { return terms_; }

    double lowest_exponent() const { return terms_.front().exponent; }
    double highest_exponent() const { return terms_.back().exponent; }

    bool is_zero() const {
        return terms_.size() == 1 && terms_[0].coefficient == 0.0;
    }

    friend bool operator==(const FractionalPolynomial& a, const FractionalPolynomial& b) {
        if (a.terms_.size() != b.terms_.size()) return false;
        for (size_t i = 0; i < a.terms_.size(); ++i) {
            if (a.terms_[i].coefficient != b.terms_[i].coefficient ||
                a.terms_[i].exponent != b.terms_[i].exponent)
                return false;
        }
        return true;
    }

private:
    std::vector<FractionalTerm> terms_;
};

/// Ratio of two fractional polynomials.
struct FractionalTF {
    FractionalTF(FractionalPolynomial num, FractionalPolynomial den)
        : numerator(std::move(num)), denominator(std::move(den)) {
        if (denominator.is_zero())
            throw std::invalid_argument("FractionalTF: zero denominator");
    }

    FractionalPolynomial numerator;
    FractionalPolynomial denominator;

    friend bool operator==(const FractionalTF& a, const FractionalTF& b) {
        return a.numerator == b.numerator && a.denominator == b.denominator;
    }
};

/// K + Ti/(jw)^lambda + Td*(jw)^delta.
struct PilDController {
    PilDController(double K_, double Ti_, double Td_, double lambda_ = 1.0,
                   double delta_ = 1.0)
        : K(K_), Ti(Ti_), Td(Td_), lambda(lambda_), delta(delta_) {
        if (!(std::isfinite(K) && std::isfinite(Ti) && std::isfinite(Td) &&
              std::isfinite(lambda) && std::isfinite(delta)))
            throw std::invalid_argument("PilDController: non-finite parameter");
        if (Ti < 0.0 || Td < 0.0)
            throw std::invalid_argument("PilDController: Ti and Td must be >= 0");
        if (lambda < 0.0 || delta < 0.0)
            throw std::invalid_argument("PilDController: lambda and delta must be >= 0");
    }

    double K;
    double Ti;
    double Td;
    double lambda;
    double delta;
};

/// C*(((jw)/wn)^(delta+lambda) + 2*xi*(jw)^lambda/wn + 1) / (jw)^lambda.
struct FactoredController {
    FactoredController(double C_, double xi_, double omega_n_, double lambda_,
                       double delta_)
        : C(C_), xi(xi_), omega_n(omega_n_), lambda(lambda_), delta(delta_) {
        if (!(std::isfinite(C) && std::isfinite(xi)))
            throw std::invalid_argument("FactoredController: non-finite parameter");
        if (!(omega_n > 0.0))
            throw std::domain_error("FactoredController: omega_n must be > 0");
        if (lambda < 0.0 || delta < 0.0)
            throw std::invalid_argument("FactoredController: lambda and delta must be >= 0");
    }

    double C;
    double xi;
    double omega_n;
    double lambda;
    double delta;
};

/// Principal branch of (jw)^alpha: magnitude w^alpha, phase alpha*pi/2.
inline Complex eval_power(double omega, double alpha) {
    if (!(omega > 0.0))
        throw std::domain_error("eval_power: omega must be > 0");
    const double mag = std::pow(omega, alpha);
    const double phase = alpha * pi / 2.0;
    return {mag * std::cos(phase), mag * std::sin(phase)};
}

inline Complex eval_polynomial(const FractionalPolynomial& p, double omega) {
    Complex sum{0.0, 0.0};
    for (const auto& t : p.terms())
        sum += t.coefficient * eval_power(omega, t.exponent);
    return sum;
}

inline constexpr double singular_floor = 1e-300;

/// Evaluates num/den at jw. Throws singular_evaluation when the denominator
/// magnitude falls below the floor.
inline Complex eval_tf(const FractionalTF& g, double omega) {
    const Complex num = eval_polynomial(g.numerator, omega);
    const Complex den = eval_polynomial(g.denominator, omega);
    if (std::abs(den) < singular_floor)
        throw singular_evaluation(omega);
    return num / den;
}

/// Limit of G(jw) as w -> 0+, from the lowest-exponent terms. Errors when
/// the limit is infinite (denominator vanishes faster than the numerator).
inline double dc_gain(const FractionalTF& g) {
    const auto& nt = g.numerator.terms().front();
    const auto& dt = g.denominator.terms().front();
    const double rel = nt.exponent - dt.exponent;
    if (rel > FractionalPolynomial::exponent_merge_tol) return 0.0;
    if (rel < -FractionalPolynomial::exponent_merge_tol)
        throw std::domain_error("dc_gain: gain diverges as omega -> 0");
    return nt.coefficient / dt.coefficient;
}

/// Rewrites a PI^lambda D^delta controller over the common denominator
/// (jw)^lambda. With Ti = 0 the integrator is dropped entirely.
inline FractionalTF controller_to_tf(const PilDController& c) {
    std::vector<FractionalTerm> num;
    if (c.Ti == 0.0) {
        num.push_back({c.K, 0.0});
        if (c.Td != 0.0) num.push_back({c.Td, c.delta});
        return FractionalTF(FractionalPolynomial(std::move(num)),
                            FractionalPolynomial({{1.0, 0.0}}));
    }
    num.push_back({c.Ti, 0.0});
    if (c.K != 0.0) num.push_back({c.K, c.lambda});
    if (c.Td != 0.0) num.push_back({c.Td, c.delta + c.lambda});
    return FractionalTF(FractionalPolynomial(std::move(num)),
                        FractionalPolynomial({{1.0, c.lambda}}));
}

/// Expands the factored form into the summed form:
/// K = 2*C*xi/wn, Ti = C, Td = C/wn^(delta+lambda).
inline PilDController factored_to_pild(const FactoredController& f) {
    const double K = 2.0 * f.C * f.xi / f.omega_n;
    const double Ti = f.C;
    const double Td = f.C / std::pow(f.omega_n, f.delta + f.lambda);
    return PilDController(K, Ti, Td, f.lambda, f.delta);
}

inline FractionalPolynomial multiply(const FractionalPolynomial& a,
                                     const FractionalPolynomial& b) {
    std::vector<FractionalTerm> prod;
    prod.reserve(a.terms().size() * b.terms().size());
    for (const auto& ta : a.terms())
        for (const auto& tb : b.terms())
            prod.push_back({ta.coefficient * tb.coefficient, ta.exponent + tb.exponent});
    return FractionalPolynomial(std::move(prod));
}

inline FractionalTF multiply(const FractionalTF& a, const FractionalTF& b) {
    return FractionalTF(multiply(a.numerator, b.numerator),
                        multiply(a.denominator, b.denominator));
}

/// Open-loop transfer function: controller in series with the plant.
inline FractionalTF compose_open_loop(const PilDController& c, const FractionalTF& g) {
    return multiply(controller_to_tf(c), g);
}

/// Scales the numerator by k (loop-gain scaling).
inline FractionalTF scale_gain(const FractionalTF& g, double k) {
    std::vector<FractionalTerm> num = g.numerator.terms();
    for (auto& t : num) t.coefficient *= k;
    return FractionalTF(FractionalPolynomial(std::move(num)), g.denominator);
}

}  // namespace fracfreq
