#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfkit/operator.hpp"

using namespace hopfkit;

namespace {

LinearOperator pure_derivative(int n, double a, double b) {
    std::vector<OraclePtr> zero(n, make_constant_oracle(0.0));
    return LinearOperator(n, std::move(zero), a, b);
}

}  // namespace

TEST_CASE("apply_operator: frozen examples") {
    // third derivative annihilates x^2
    LinearOperator d3 = pure_derivative(3, 0.0, 1.0);
    OraclePtr xsq = make_expr_oracle("x^2", 0.0, 1.0);
    for (double x : {0.1, 0.5, 0.9})
        CHECK(apply_operator(d3, *xsq, x) == 0.0);

    // u''' + u' annihilates sin
    std::vector<OraclePtr> c3 = {make_constant_oracle(0.0), make_constant_oracle(1.0),
                                 make_constant_oracle(0.0)};
    LinearOperator d3p1(3, c3, 0.0, 7.0);
    OraclePtr sinx = make_expr_oracle("sin(x)", 0.0, 7.0);
    for (double x : {0.3, 2.0, 4.7, 6.1})
        CHECK(apply_operator(d3p1, *sinx, x) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));

    // second derivative of x - x^2 is -2
    LinearOperator d2 = pure_derivative(2, 0.0, 1.0);
    OraclePtr u = make_expr_oracle("x - x^2", 0.0, 1.0);
    CHECK(apply_operator(d2, *u, 0.37) == -2.0);
}

TEST_CASE("operator construction guards") {
    CHECK_THROWS_AS(pure_derivative(1, 0.0, 1.0), ArgumentError);
    CHECK_THROWS_AS(pure_derivative(2, 1.0, 1.0), ArgumentError);
    std::vector<OraclePtr> one = {make_constant_oracle(0.0)};
    CHECK_THROWS_AS(LinearOperator(2, one, 0.0, 1.0), ArgumentError);
}

TEST_CASE("coefficient bound covers random samples") {
    std::vector<OraclePtr> coeffs = {
        make_expr_oracle("sin(5*x) - 0.5", 0.0, 2.0),
        make_expr_oracle("1.5*cos(3*x)", 0.0, 2.0),
        make_expr_oracle("x^2/4", 0.0, 2.0),
    };
    LinearOperator op(3, coeffs, 0.0, 2.0);
    CHECK(op.bound() >= 1.5);
    CHECK(op.bound() < 2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> pt(0.0, 2.0);
    for (int i = 0; i < 100000; ++i) {
        const double x = pt(rng);
        for (int k = 0; k < 3; ++k)
            CHECK(std::fabs(op.coeff_value(k, x)) <= op.bound());
    }
}

TEST_CASE("apply_operator is linear in u") {
    std::vector<OraclePtr> coeffs = {
        make_expr_oracle("cos(2*x)", 0.0, 1.0),
        make_expr_oracle("x - 1", 0.0, 1.0),
    };
    LinearOperator op(2, coeffs, 0.0, 1.0);
    OraclePtr u = make_expr_oracle("exp(x)*sin(3*x)", 0.0, 1.0);
    OraclePtr w = make_expr_oracle("1/(1 + x^2)", 0.0, 1.0);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> coef(-2.0, 2.0), pt(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = coef(rng), beta = coef(rng), x = pt(rng);
        OraclePtr combo = make_combination_oracle({alpha, beta}, {u, w});
        const double lhs = apply_operator(op, *combo, x);
        const double rhs =
            alpha * apply_operator(op, *u, x) + beta * apply_operator(op, *w, x);
        CHECK(std::fabs(lhs - rhs) <= 1e-12 * (1.0 + std::fabs(rhs)));
    }
}

TEST_CASE("verify_inequality: frozen examples") {
    LinearOperator d2 = pure_derivative(2, 0.0, 1.0);
    const auto grid = interior_grid(0.0, 1.0, 256);

    OraclePtr good = make_expr_oracle("x - x^2", 0.0, 1.0);
    auto r1 = verify_inequality(d2, *good, grid, 1e-8);
    CHECK(r1.pass);
    CHECK(r1.max_violation == -2.0);

    OraclePtr bad = make_expr_oracle("x^2", 0.0, 1.0);
    auto r2 = verify_inequality(d2, *bad, grid, 1e-8);
    CHECK_FALSE(r2.pass);
    CHECK(r2.max_violation == 2.0);
}

TEST_CASE("endpoint_jet_check: frozen examples") {
    OraclePtr u = make_expr_oracle("x^2 - x^4", 0.0, 1.0);
    auto r = endpoint_jet_check(*u, 0.0, 3, 1e-8);
    REQUIRE(r.pass.size() == 2);
    CHECK(r.pass[0]);
    CHECK(r.pass[1]);
    CHECK(r.all_pass);
    CHECK(r.top == 2.0);  // u''(0)

    OraclePtr s = make_expr_oracle("sin(x)", 0.0, 7.0);
    auto r2 = endpoint_jet_check(*s, 0.0, 2, 1e-8);
    CHECK(r2.pass[0]);
    CHECK(r2.top == 1.0);  // u'(0)

    OraclePtr w = make_expr_oracle("1 + x", 0.0, 1.0);
    auto r3 = endpoint_jet_check(*w, 0.0, 2, 1e-8);
    CHECK_FALSE(r3.all_pass);
}

TEST_CASE("detect_sequence_condition: basic ladders") {
    OraclePtr u = make_expr_oracle("x - x^2", 0.0, 1.0);
    auto scan = detect_sequence_condition(*u, 0.0, Side::Left, +1.0, 1.0);
    CHECK(scan.verdict == SeqVerdict::Pass);
    CHECK(scan.deepest_resolved >= 30);  // resolvable until 2^-j crosses 1e-10
    REQUIRE(scan.witness_x.has_value());
    CHECK(*scan.witness_x > 0.0);
    CHECK(*scan.witness_x < 1e-8);

    // sin at 2*pi from the left is negative: sign -1 passes, +1 fails
    OraclePtr s = make_expr_oracle("sin(x)", 0.0, 2.0 * std::numbers::pi);
    auto neg = detect_sequence_condition(*s, 2.0 * std::numbers::pi, Side::Right,
                                         -1.0, 2.0 * std::numbers::pi);
    CHECK(neg.verdict == SeqVerdict::Pass);
    auto pos = detect_sequence_condition(*s, 2.0 * std::numbers::pi, Side::Right,
                                         +1.0, 2.0 * std::numbers::pi);
    CHECK(pos.verdict == SeqVerdict::Fail);
    CHECK_FALSE(pos.witness_x.has_value());
}

TEST_CASE("detect_sequence_condition: undetermined when nothing resolves") {
    OraclePtr tiny = make_constant_oracle(1e-13);
    auto scan = detect_sequence_condition(*tiny, 0.0, Side::Left, +1.0, 1.0);
    CHECK(scan.verdict == SeqVerdict::Undetermined);
    CHECK(scan.deepest_resolved == 0);
}

TEST_CASE("sequence scan sign symmetry") {
    OraclePtr u = make_expr_oracle("sin(3*x)*exp(-x)", 0.0, 2.0);
    OraclePtr nu = make_combination_oracle({-1.0}, {u});
    for (double sign : {+1.0, -1.0}) {
        auto a = detect_sequence_condition(*u, 0.0, Side::Left, sign, 2.0);
        auto b = detect_sequence_condition(*nu, 0.0, Side::Left, -sign, 2.0);
        CHECK(a.verdict == b.verdict);
        CHECK(a.deepest_resolved == b.deepest_resolved);
    }
}

TEST_CASE("reflected operator matches the substitution identity") {
    // L on (a, b); for even n with u_hat(x) = u(2b - x), and for odd n with
    // the negated reflection, L_bar[reflected u](x) must equal
    // (+/-) L[u](2b - x) so the inequality direction survives.
    for (int n : {2, 3, 4}) {
        CAPTURE(n);
        std::vector<OraclePtr> coeffs;
        for (int i = 0; i < n; ++i)
            coeffs.push_back(make_expr_oracle(
                i % 2 ? "0.3*cos(2*x)" : "sin(x) - 0.2", 0.0, 1.0));
        LinearOperator op(n, coeffs, 0.0, 1.0);
        LinearOperator rop = op.reflected();
        CHECK(rop.a() == 1.0);
        CHECK(rop.b() == 2.0);

        OraclePtr u = make_expr_oracle("exp(x)*sin(3*x) - x^2", 0.0, 1.0);
        // plain reflection contributes (-1)^n, the odd-parity negation
        // another (-1): net +1 in both parities, so lhs equals rhs exactly
        const bool odd = (n % 2) != 0;
        OraclePtr ru = make_reflected_oracle(u, 1.0, odd);
        for (double x : {1.1, 1.5, 1.9}) {
            const double lhs = apply_operator(rop, *ru, x);
            const double rhs = apply_operator(op, *u, 2.0 - x);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }
}

TEST_CASE("interior grid stays strictly inside") {
    auto g = interior_grid(0.0, 1.0, 128);
    CHECK(g.size() == 128);
    CHECK(g.front() > 0.0);
    CHECK(g.back() < 1.0);
    for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
}
