#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hopfkit/barriers.hpp"
#include "hopfkit/errors.hpp"

using namespace hopfkit;

namespace {

// Operator with constant coefficients drawn uniformly from [-1, 1].
LinearOperator random_unit_op(int n, double a, double b, std::mt19937& rng) {
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<OraclePtr> c;
    c.reserve(n);
    for (int i = 0; i < n; ++i) c.push_back(make_constant_oracle(coef(rng)));
    return LinearOperator(n, std::move(c), a, b);
}

}  // namespace

TEST_CASE("small-interval barrier: frozen parameters at C = 1") {
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});

    // root of g^2 - g - 2 is 2 exactly, plus the unit margin
    CHECK(h.param("gamma") == 3.0);
    CHECK(h.param("delta") == 0.9 * std::log(3.0) / 3.0);
    CHECK(h.param("delta") == doctest::Approx(0.3295836866).epsilon(1e-9));
    CHECK(h.param("slack") == 4.0);  // 9 - 3 - 2
    CHECK(h.param("C") == 1.0);
    CHECK(to_string(h.kind) == "small_interval_h");
    CHECK_THROWS_AS((void)h.param("lambda"), ArgumentError);
}

TEST_CASE("small-interval barrier: shape and exact root at delta") {
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});
    double gamma = h.param("gamma");
    double delta = h.param("delta");

    CHECK(h.oracle->lo() == 0.0);
    CHECK(h.oracle->hi() == delta);

    // values match the closed form and vanish exactly at the right end:
    // both sides of the subtraction are exp of the identical double there
    for (double x : {0.0, 0.1, 0.2, delta / 2}) {
        double want = std::exp(gamma * delta) - std::exp(gamma * x);
        CHECK(h.oracle->value(x) == doctest::Approx(want).epsilon(1e-15));
        CHECK(h.oracle->value(x) > 0.0);
    }
    CHECK(h.oracle->value(delta) == 0.0);

    // decreasing: h' = -gamma e^(gamma x) < 0
    CHECK(h.oracle->deriv(0.1, 1) < 0.0);
    CHECK(h.certificate.margin > 0.0);
    CHECK(h.certificate.grid == 4096);
}

TEST_CASE("exp subsolution: frozen parameters at C = 1") {
    auto e = make_barrier(BarrierKind::ExpSubsolution, 1.0, {.a = 0.0, .b = 1.0});

    // root of l^2 - l - 1 is the golden ratio, plus one
    double phi = 0.5 * (1.0 + std::sqrt(5.0));
    CHECK(e.param("lambda") == doctest::Approx(phi + 1.0).epsilon(1e-15));
    CHECK(e.param("lambda") == doctest::Approx(2.6180339887).epsilon(1e-9));
    CHECK(e.param("slack") == doctest::Approx(2.0 * phi).epsilon(1e-14));

    CHECK(e.oracle->value(0.0) == 0.0);  // e^0 - 1
    CHECK(e.oracle->value(1.0) == doctest::Approx(std::exp(phi + 1.0) - 1.0).epsilon(1e-15));
    CHECK(e.certificate.margin > 0.0);
}

TEST_CASE("third-order barrier: frozen parameters at C = 1 on a unit interval") {
    auto m = make_barrier(BarrierKind::ThirdOrderM, 1.0, {.a = 0.0, .b = 1.0});

    // theta^2 - theta - 2 roots at 2, plus one
    CHECK(m.param("theta") == 3.0);
    CHECK(m.param("eta") == 0.9 * std::log(4.0) / 6.0);
    CHECK(m.param("eta") == doctest::Approx(0.2079).epsilon(1e-3));
    CHECK(m.param("slack") == doctest::Approx(27.0 - 9.0 - 6.0).epsilon(1e-12));

    // the ceiling e^(2 theta eta) - 1 < theta (b - a) holds with room
    double eta = m.param("eta");
    CHECK(m.param("slack_eta") == doctest::Approx(3.0 - std::expm1(6.0 * eta)).epsilon(1e-12));
    CHECK(m.param("slack_eta") > 0.0);

    // m is positive on all of [a, a + eta], including the left end
    CHECK(m.oracle->value(0.0) == doctest::Approx(std::exp(3.0 * eta) - 1.0).epsilon(1e-15));
    CHECK(m.oracle->value(0.0) > 0.0);
    CHECK(m.oracle->hi() == eta);
    CHECK(m.certificate.margin > 0.0);

    // increasing with slope theta e^(-theta (x-a)), so theta at the left end
    CHECK(m.oracle->deriv(0.0, 1) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("third-order barrier: eta cap engages on short intervals") {
    double C = 1.0, span = 0.1;
    auto m = make_barrier(BarrierKind::ThirdOrderM, C, {.a = 0.0, .b = span});
    double theta = m.param("theta");
    double eta = m.param("eta");

    CHECK(theta == doctest::Approx(0.5 * (1.0 + std::sqrt(1.0 + 4.4)) + 1.0).epsilon(1e-15));

    // the default 0.9 ln4 / (2 theta) would overshoot theta*span; the cap
    // must bring eta inside both the exponential ceiling and the interval
    CHECK(std::expm1(2.0 * theta * (0.9 * std::log(4.0) / (2.0 * theta))) >= theta * span);
    CHECK(eta == doctest::Approx(0.9 * std::log1p(theta * span) / (2.0 * theta)).epsilon(1e-15));
    CHECK(eta < span);
    CHECK(std::expm1(2.0 * theta * eta) < theta * span);
    CHECK(m.param("slack_eta") > 0.0);
}

TEST_CASE("sine barrier: placement, bracket, and slack") {
    double a = 0.0, x_i = 0.01;
    auto hi = make_barrier(BarrierKind::SineHi, 1.0, {.a = a, .x_i = x_i});
    constexpr double pi = std::numbers::pi;

    CHECK(hi.param("y_i") == 0.005);
    CHECK(hi.param("x_i") == 0.01);
    CHECK(hi.param("floor") == doctest::Approx(std::sin(7.0 * pi / 18.0)).epsilon(1e-15));

    double s = (pi / 9.0) / x_i;
    CHECK(hi.param("slack") ==
          doctest::Approx(s * s * std::sin(7.0 * pi / 18.0) - s - 1.0).epsilon(1e-12));
    CHECK(hi.param("slack") > 0.0);

    // phase runs through [pi/2 - pi/18, pi/2 + pi/18]; endpoints coincide
    CHECK(hi.oracle->value(a) == doctest::Approx(std::sin(pi / 2 - pi / 18)).epsilon(1e-15));
    CHECK(hi.oracle->value(x_i) == doctest::Approx(std::sin(pi / 2 + pi / 18)).epsilon(1e-15));
    CHECK(hi.oracle->value(0.005) == doctest::Approx(1.0).epsilon(1e-15));

    // bracket sin(7 pi/18) <= h_i <= 1 on a 1024-point grid
    double floor = std::sin(7.0 * pi / 18.0);
    for (double x : interior_grid(a, x_i, 1024)) {
        double v = hi.oracle->value(x);
        CHECK(v >= floor - 1e-12);
        CHECK(v <= 1.0 + 1e-12);
    }

    // far sequence points cannot be certified at this bound
    CHECK_THROWS_AS(make_barrier(BarrierKind::SineHi, 1.0, {.a = 0.0, .x_i = 0.5}),
                    ArgumentError);
}

TEST_CASE("make_barrier: degenerate geometry and bad bounds are rejected") {
    CHECK_THROWS_AS(make_barrier(BarrierKind::SmallIntervalH, 0.0, {.a = 0.0}),
                    ArgumentError);
    CHECK_THROWS_AS(make_barrier(BarrierKind::SmallIntervalH, -1.0, {.a = 0.0}),
                    ArgumentError);
    CHECK_THROWS_AS(make_barrier(BarrierKind::ExpSubsolution, 1.0, {.a = 1.0, .b = 1.0}),
                    ArgumentError);
    CHECK_THROWS_AS(make_barrier(BarrierKind::ThirdOrderM, 1.0, {.a = 2.0, .b = 1.0}),
                    ArgumentError);
    CHECK_THROWS_AS(make_barrier(BarrierKind::SineHi, 1.0, {.a = 0.0, .x_i = 0.0}),
                    ArgumentError);
    CHECK_THROWS_AS(make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0}, 1),
                    ArgumentError);
}

TEST_CASE("certify_sign: small-interval barrier beats random bounded operators") {
    std::mt19937 rng(4242);
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});
    for (int trial = 0; trial < 50; ++trial) {
        auto op = random_unit_op(2, 0.0, 0.3, rng);
        auto cert = certify_sign(h, op, 512);
        CAPTURE(trial);
        CHECK(cert.required_sign == -1.0);
        CHECK(cert.pass);
        CHECK(cert.margin >= 1e-10);
    }
}

TEST_CASE("certify_sign: exp subsolution is a strict subsolution on [0, 1]") {
    std::mt19937 rng(512);
    auto e = make_barrier(BarrierKind::ExpSubsolution, 1.0, {.a = 0.0, .b = 1.0});
    for (int trial = 0; trial < 50; ++trial) {
        auto op = random_unit_op(2, 0.0, 1.0, rng);
        auto cert = certify_sign(e, op, 512);
        CAPTURE(trial);
        CHECK(cert.required_sign == 1.0);
        CHECK(cert.pass);
        CHECK(cert.margin >= 1e-10);
    }
}

TEST_CASE("certify_sign: third-order barrier under random third-order operators") {
    std::mt19937 rng(99);
    auto m = make_barrier(BarrierKind::ThirdOrderM, 1.0, {.a = 0.0, .b = 1.0});
    for (int trial = 0; trial < 50; ++trial) {
        auto op = random_unit_op(3, 0.0, 1.0, rng);
        auto cert = certify_sign(m, op, 512);
        CAPTURE(trial);
        CHECK(cert.pass);
        CHECK(cert.margin >= 1e-10);
    }
}

TEST_CASE("certify_sign: sine barrier wins for sequence points near the endpoint") {
    std::mt19937 rng(31337);
    for (double x_i : {0.01, 0.005, 0.002}) {
        auto hi = make_barrier(BarrierKind::SineHi, 1.0, {.a = 0.0, .x_i = x_i});
        for (int trial = 0; trial < 15; ++trial) {
            auto op = random_unit_op(2, 0.0, 1.0, rng);
            auto cert = certify_sign(hi, op, 512);
            CAPTURE(x_i);
            CAPTURE(trial);
            CHECK(cert.required_sign == -1.0);
            CHECK(cert.pass);
            CHECK(cert.margin >= 1e-10);
        }
    }
}

TEST_CASE("certify_sign: analytic margin agrees for the pure second derivative") {
    // With zero coefficients L[h] = -gamma^2 e^(gamma x): the margin is
    // gamma^2 e^(gamma x_min) at the leftmost grid point.
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});
    std::vector<OraclePtr> zero = {make_constant_oracle(0.0), make_constant_oracle(0.0)};
    LinearOperator d2(2, zero, 0.0, 1.0);
    auto cert = certify_sign(h, d2, 256);

    double delta = h.param("delta");
    double x0 = 0.5 * delta / 256.0;  // first cell-midpoint node of the window
    CHECK(cert.pass);
    CHECK(cert.worst_x == doctest::Approx(x0).epsilon(1e-12));
    CHECK(cert.margin == doctest::Approx(9.0 * std::exp(3.0 * x0)).epsilon(1e-12));
}

TEST_CASE("certify_sign: window is the overlap of operator and barrier domains") {
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});
    std::vector<OraclePtr> zero = {make_constant_oracle(0.0), make_constant_oracle(0.0)};

    // operator interval far wider than the barrier: still certifies
    LinearOperator wide(2, zero, 0.0, 5.0);
    CHECK(certify_sign(h, wide).pass);

    // disjoint interval: nothing to certify
    LinearOperator off(2, zero, 1.0, 2.0);
    CHECK_THROWS_AS(certify_sign(h, off), ArgumentError);
}

TEST_CASE("certify_sign: operator order must match the barrier kind") {
    auto h = make_barrier(BarrierKind::SmallIntervalH, 1.0, {.a = 0.0});
    auto m = make_barrier(BarrierKind::ThirdOrderM, 1.0, {.a = 0.0, .b = 1.0});
    std::vector<OraclePtr> z2 = {make_constant_oracle(0.0), make_constant_oracle(0.0)};
    std::vector<OraclePtr> z3 = {make_constant_oracle(0.0), make_constant_oracle(0.0),
                                 make_constant_oracle(0.0)};
    LinearOperator d2(2, z2, 0.0, 0.3);
    LinearOperator d3(3, z3, 0.0, 0.3);

    CHECK_THROWS_AS(certify_sign(h, d3), ArgumentError);
    CHECK_THROWS_AS(certify_sign(m, d2), ArgumentError);
    CHECK(certify_sign(h, d2).pass);
    CHECK(certify_sign(m, d3).pass);
}

TEST_CASE("barriers sit on shifted intervals without special cases") {
    // same constructions around a = 2.5; values must be plain translates
    auto h = make_barrier(BarrierKind::SmallIntervalH, 0.7, {.a = 2.5});
    auto h0 = make_barrier(BarrierKind::SmallIntervalH, 0.7, {.a = 0.0});
    CHECK(h.param("gamma") == h0.param("gamma"));
    CHECK(h.oracle->value(2.5 + 0.1) == doctest::Approx(h0.oracle->value(0.1)).epsilon(1e-15));

    auto m = make_barrier(BarrierKind::ThirdOrderM, 0.7, {.a = 2.5, .b = 4.0});
    auto m0 = make_barrier(BarrierKind::ThirdOrderM, 0.7, {.a = 0.0, .b = 1.5});
    CHECK(m.param("eta") == m0.param("eta"));
    CHECK(m.oracle->value(2.5 + 0.05) == doctest::Approx(m0.oracle->value(0.05)).epsilon(1e-15));

    std::mt19937 rng(7);
    auto op = random_unit_op(2, 2.5, 2.9, rng);
    CHECK(certify_sign(h, op).pass);
}
