#include <catch_amalgamated.hpp>

#include <random>

#include "fracfreq/model.hpp"

using namespace fracfreq;
using Catch::Approx;

namespace {

// Illustrative plant 1/(0.8 s^2.2 + 0.5 s^0.9 + 1) and PD controller
// 50 + 5.326 s^1.286 used throughout the suite.
FractionalTF example_plant() {
    return FractionalTF(FractionalPolynomial({{1.0, 0.0}}),
                        FractionalPolynomial({{1.0, 0.0}, {0.5, 0.9}, {0.8, 2.2}}));
}

PilDController example_controller() {
    return PilDController(50.0, 0.0, 5.326, 1.0, 1.286);
}

double wrap_pi(double x) { return x - 2.0 * pi * std::round(x / (2.0 * pi)); }

}  // namespace

TEST_CASE("eval_power basics") {
    auto p = eval_power(1.0, 1.0);
    CHECK(p.real() == Approx(0.0).margin(1e-15));
    CHECK(p.imag() == Approx(1.0).epsilon(1e-15));

    p = eval_power(1.0, 0.0);
    CHECK(p.real() == 1.0);
    CHECK(p.imag() == 0.0);

    // reference: 40-digit evaluation of e^{i*1.1*pi}
    p = eval_power(1.0, 2.2);
    CHECK(p.real() == Approx(-0.95105651629515348589).epsilon(1e-14));
    CHECK(p.imag() == Approx(-0.30901699437494768948).epsilon(1e-14));

    CHECK_THROWS_AS(eval_power(0.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(eval_power(-2.0, 1.0), std::domain_error);
}

TEST_CASE("eval_power constant-phase law") {
    std::mt19937 rng(12345);
    std::uniform_real_distribution<double> logw(-3.0, 3.0), alpha(-3.0, 3.0);
    for (int i = 0; i < 500; ++i) {
        const double w = std::pow(10.0, logw(rng));
        const double a = alpha(rng);
        const Complex p = eval_power(w, a);
        CHECK(std::abs(p) == Approx(std::pow(w, a)).epsilon(1e-13));
        CHECK(wrap_pi(std::arg(p) - a * pi / 2.0) == Approx(0.0).margin(1e-13));
    }
}

TEST_CASE("eval_polynomial") {
    const auto den = example_plant().denominator;
    // reference: 40-digit term-by-term sum at omega = 1
    const Complex v = eval_polynomial(den, 1.0);
    CHECK(v.real() == Approx(0.31737201948399257681).epsilon(1e-14));
    CHECK(v.imag() == Approx(0.24663057479761092381).epsilon(1e-14));

    const FractionalPolynomial single({{0.5, 0.9}});
    const Complex s = eval_polynomial(single, 1.0);
    CHECK(s.real() == Approx(0.5 * std::cos(0.45 * pi)).epsilon(1e-15));
    CHECK(s.imag() == Approx(0.5 * std::sin(0.45 * pi)).epsilon(1e-15));
}

TEST_CASE("eval_tf") {
    const auto g = example_plant();
    const Complex v = eval_tf(g, 1.0);
    CHECK(v.real() == Approx(1.9645236724435417554).epsilon(1e-13));
    CHECK(v.imag() == Approx(-1.526636164479842364).epsilon(1e-13));

    const FractionalTF identity(FractionalPolynomial({{1.0, 0.0}}),
                                FractionalPolynomial({{1.0, 0.0}}));
    for (double w : {0.01, 1.0, 250.0}) {
        CHECK(eval_tf(identity, w) == Complex{1.0, 0.0});
    }

    const FractionalTF tiny(FractionalPolynomial({{1.0, 0.0}}),
                            FractionalPolynomial({{1e-310, 0.0}}));
    CHECK_THROWS_AS(eval_tf(tiny, 1.0), singular_evaluation);
}

TEST_CASE("dc_gain") {
    CHECK(dc_gain(example_plant()) == 1.0);
    CHECK(dc_gain(controller_to_tf(example_controller())) == 50.0);
    const FractionalTF integrator(FractionalPolynomial({{1.0, 0.0}}),
                                  FractionalPolynomial({{1.0, 1.0}}));
    CHECK_THROWS_AS(dc_gain(integrator), std::domain_error);
    // zero at dc
    const FractionalTF diff(FractionalPolynomial({{1.0, 1.0}}),
                            FractionalPolynomial({{1.0, 0.0}}));
    CHECK(dc_gain(diff) == 0.0);
}

TEST_CASE("controller_to_tf") {
    SECTION("PD^delta drops the integrator") {
        const auto tf = controller_to_tf(example_controller());
        REQUIRE(tf.numerator.terms().size() == 2);
        CHECK(tf.numerator.terms()[0].coefficient == 50.0);
        CHECK(tf.numerator.terms()[0].exponent == 0.0);
        CHECK(tf.numerator.terms()[1].coefficient == 5.326);
        CHECK(tf.numerator.terms()[1].exponent == 1.286);
        REQUIRE(tf.denominator.terms().size() == 1);
        CHECK(tf.denominator.terms()[0].coefficient == 1.0);
        CHECK(tf.denominator.terms()[0].exponent == 0.0);
    }
    SECTION("classic PID") {
        const auto tf = controller_to_tf(PilDController(1.0, 1.0, 1.0, 1.0, 1.0));
        REQUIRE(tf.numerator.terms().size() == 3);
        CHECK(tf.numerator.terms()[0].exponent == 0.0);
        CHECK(tf.numerator.terms()[1].exponent == 1.0);
        CHECK(tf.numerator.terms()[2].exponent == 2.0);
        REQUIRE(tf.denominator.terms().size() == 1);
        CHECK(tf.denominator.terms()[0].exponent == 1.0);
    }
    SECTION("pure gain") {
        const auto tf = controller_to_tf(PilDController(2.0, 0.0, 0.0, 0.3, 0.7));
        REQUIRE(tf.numerator.terms().size() == 1);
        CHECK(tf.numerator.terms()[0].coefficient == 2.0);
        CHECK(tf.numerator.terms()[0].exponent == 0.0);
        CHECK(tf.denominator.terms()[0].exponent == 0.0);
    }
}

TEST_CASE("factored_to_pild") {
    const auto c1 = factored_to_pild(FactoredController(1.0, 0.5, 1.0, 1.0, 1.0));
    CHECK(c1.K == Approx(1.0));
    CHECK(c1.Ti == Approx(1.0));
    CHECK(c1.Td == Approx(1.0));

    // critical damping doubles the proportional part
    const auto c2 = factored_to_pild(FactoredController(1.0, 1.0, 1.0, 1.0, 1.0));
    CHECK(c2.K == Approx(2.0));

    CHECK_THROWS_AS(FactoredController(1.0, 0.5, 0.0, 1.0, 1.0), std::domain_error);
    CHECK_THROWS_AS(FactoredController(1.0, 0.5, -2.0, 1.0, 1.0), std::domain_error);
}

TEST_CASE("factored form round trip matches direct evaluation") {
    const FactoredController f(3.2, 0.8, 1.7, 0.6, 1.1);
    const auto tf = controller_to_tf(factored_to_pild(f));
    const double w = 0.7;
    const Complex direct =
        f.C *
        (eval_power(w, f.delta + f.lambda) / std::pow(f.omega_n, f.delta + f.lambda) +
         2.0 * f.xi * eval_power(w, f.lambda) / f.omega_n + 1.0) /
        eval_power(w, f.lambda);
    const Complex got = eval_tf(tf, w);
    CHECK(std::abs(got - direct) <= 1e-12 * std::abs(direct));
}

TEST_CASE("compose_open_loop") {
    const auto plant = example_plant();
    SECTION("unit P controller is the identity") {
        const auto open = compose_open_loop(PilDController(1.0, 0.0, 0.0), plant);
        CHECK(open == plant);
    }
    SECTION("worked example composition") {
        const auto open = compose_open_loop(example_controller(), plant);
        REQUIRE(open.numerator.terms().size() == 2);
        CHECK(open.numerator.terms()[0].coefficient == 50.0);
        CHECK(open.numerator.terms()[1].coefficient == 5.326);
        CHECK(open.numerator.terms()[1].exponent == 1.286);
        REQUIRE(open.denominator.terms().size() == 3);
        CHECK(open.denominator.terms()[0].coefficient == 1.0);
        CHECK(open.denominator.terms()[1].coefficient == 0.5);
        CHECK(open.denominator.terms()[2].coefficient == 0.8);
    }
    SECTION("composition homomorphism") {
        const PilDController c(2.0, 0.4, 1.5, 0.8, 1.2);
        const auto open = compose_open_loop(c, plant);
        for (double w : {0.05, 0.7, 2.0, 40.0}) {
            const Complex lhs = eval_tf(open, w);
            const Complex rhs = eval_tf(controller_to_tf(c), w) * eval_tf(plant, w);
            CHECK(std::abs(lhs - rhs) <= 1e-12 * std::abs(rhs));
        }
    }
}

TEST_CASE("polynomial canonicalization") {
    SECTION("duplicates merge, order is ascending") {
        const FractionalPolynomial p({{1.0, 2.0}, {3.0, 0.0}, {2.0, 2.0}});
        REQUIRE(p.terms().size() == 2);
        CHECK(p.terms()[0].coefficient == 3.0);
        CHECK(p.terms()[1].coefficient == 3.0);
        CHECK(p.terms()[1].exponent == 2.0);
    }
    SECTION("idempotence") {
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> coeff(-5.0, 5.0), expo(-2.0, 3.0);
        for (int i = 0; i < 100; ++i) {
            std::vector<FractionalTerm> terms;
            const int n = 1 + static_cast<int>(rng() % 6);
            for (int k = 0; k < n; ++k) terms.push_back({coeff(rng), expo(rng)});
            const FractionalPolynomial once(terms);
            const FractionalPolynomial twice(once.terms());
            CHECK(once == twice);
        }
    }
    SECTION("merged zero survives only as the sole term") {
        const FractionalPolynomial zero({{1.0, 1.0}, {-1.0, 1.0}});
        REQUIRE(zero.terms().size() == 1);
        CHECK(zero.is_zero());
        const FractionalPolynomial mixed({{1.0, 1.0}, {-1.0, 1.0}, {2.0, 0.0}});
        REQUIRE(mixed.terms().size() == 1);
        CHECK(mixed.terms()[0].coefficient == 2.0);
    }
    CHECK_THROWS_AS(FractionalPolynomial({}), std::invalid_argument);
}

TEST_CASE("scaling gauge leaves evaluation unchanged") {
    const auto g = example_plant();
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> scale(0.1, 10.0), logw(-2.0, 2.0);
    for (int i = 0; i < 100; ++i) {
        const double c = scale(rng);
        auto num = g.numerator.terms();
        auto den = g.denominator.terms();
        for (auto& t : num) t.coefficient *= c;
        for (auto& t : den) t.coefficient *= c;
        const FractionalTF scaled{FractionalPolynomial(num), FractionalPolynomial(den)};
        const double w = std::pow(10.0, logw(rng));
        const Complex a = eval_tf(g, w), b = eval_tf(scaled, w);
        CHECK(std::abs(a - b) <= 1e-13 * std::abs(a));
    }
}

TEST_CASE("invalid constructions are rejected") {
    CHECK_THROWS_AS(FractionalTF(FractionalPolynomial({{1.0, 0.0}}),
                                 FractionalPolynomial({{1.0, 1.0}, {-1.0, 1.0}})),
                    std::invalid_argument);
    CHECK_THROWS_AS(PilDController(1.0, -1.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PilDController(1.0, 1.0, 1.0, -0.5, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(FractionalPolynomial({{std::nan(""), 0.0}}), std::invalid_argument);
}
