#include <cmath>
#include <random>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "hopfkit/errors.hpp"
#include "hopfkit/reduction.hpp"

using namespace hopfkit;

namespace {

LinearOperator pure_derivative(int n, double a, double b) {
    std::vector<OraclePtr> cs(static_cast<std::size_t>(n),
                              make_constant_oracle(0.0));
    return LinearOperator(n, cs, a, b);
}

}  // namespace

TEST_CASE("the b recurrence reproduces the hand-solved order-2 cases") {
    // k = 2 solves to b_1 = a_2 - f and b_0 = a_1 - 2 f' - b_1 f.
    const double fd[2] = {1.0, 0.0};
    const Jet f(0.0, 1, fd);

    const double zero_a[2] = {0.0, 0.0};
    auto b = b_from_f(zero_a, f, 2);
    REQUIRE(b.size() == 2);
    CHECK(b[1] == -1.0);
    CHECK(b[0] == 1.0);

    const double with_a2[2] = {0.0, 3.0};
    b = b_from_f(with_a2, f, 2);
    CHECK(b[1] == 2.0);
    CHECK(b[0] == -2.0);
}

TEST_CASE("zero f and zero coefficients give zero b at any order") {
    for (int k : {2, 3, 5}) {
        const std::vector<double> a(static_cast<std::size_t>(k), 0.0);
        const Jet f(0.5, k - 1);
        for (double bi : b_from_f(a, f, k)) CHECK(bi == 0.0);
    }
}

TEST_CASE("the jet recurrence matches the scalar one and its slope") {
    const int k = 3;
    const double x = 0.3;
    std::vector<OraclePtr> as = {
        make_expr_oracle("sin(2*x)", 0.0, 1.0),
        make_expr_oracle("cos(x) - 0.5", 0.0, 1.0),
        make_expr_oracle("x^2 + 0.25", 0.0, 1.0),
    };
    OraclePtr f = make_expr_oracle("exp(x)*cos(x)", 0.0, 1.0);

    std::vector<Jet> a_jets;
    std::vector<double> a_values;
    for (const auto& a : as) {
        a_jets.push_back(a->jet(x, 1));
        a_values.push_back(a->value(x));
    }
    const std::vector<Jet> bj = b_from_f(a_jets, f->jet(x, k), k);
    const std::vector<double> bv = b_from_f(a_values, f->jet(x, k - 1), k);
    REQUIRE(bj.size() == 3);
    for (int i = 0; i < k; ++i) {
        CHECK(bj[static_cast<std::size_t>(i)][0] ==
              bv[static_cast<std::size_t>(i)]);
    }

    // The order-1 slot is the x-derivative of the order-0 slot.
    const double dx = 1e-6;
    for (int i = 0; i < k; ++i) {
        auto value_at = [&](double p) {
            std::vector<double> av;
            for (const auto& a : as) av.push_back(a->value(p));
            return b_from_f(av, f->jet(p, k - 1), k)[static_cast<std::size_t>(i)];
        };
        const double fd_slope = (value_at(x + dx) - value_at(x - dx)) / (2 * dx);
        CHECK(std::abs(bj[static_cast<std::size_t>(i)][1] - fd_slope) <=
              1e-5 * (1.0 + std::abs(fd_slope)));
    }
}

TEST_CASE("recurrence guards reject malformed inputs") {
    const Jet f(0.0, 1);
    const double a1[1] = {0.0};
    CHECK_THROWS_AS(b_from_f(a1, f, 1), ArgumentError);
    CHECK_THROWS_AS(b_from_f(a1, f, 2), ArgumentError);   // too few a's
    const double a3[3] = {0.0, 0.0, 0.0};
    CHECK_THROWS_AS(b_from_f(a3, f, 3), ArgumentError);   // f jet too short
    const Jet mixed[2] = {Jet(0.0, 1), Jet(0.0, 2)};
    CHECK_THROWS_AS(b_from_f(mixed, Jet(0.0, 3), 2), ArgumentError);
}

TEST_CASE("the solved f matches its closed form along with its b values") {
    // Zero coefficients at order 3: f'' = 3 f f' - f^3, whose solution
    // from f(0) = 1, f'(0) = 0 is (1 - x) / (1 - x + x^2/2).
    ReductionStep step = solve_f_ode(pure_derivative(3, 0.0, 1.0));
    REQUIRE_FALSE(step.f_traj->truncated());
    CHECK(step.reduced.order() == 2);
    CHECK(step.reduced.b() == 1.0);

    CHECK(std::abs(step.f->value(1.0) - 0.0) <= 1e-6);
    CHECK(std::abs(step.f->value(0.5) - 0.8) <= 1e-8);

    CHECK(std::abs(step.b_coeffs[1]->value(0.0) - (-1.0)) <= 1e-9);
    CHECK(std::abs(step.b_coeffs[0]->value(0.0) - 1.0) <= 1e-9);
    for (const auto& b : step.b_coeffs) CHECK(b->trajectory_backed());
}

TEST_CASE("computed b's solve the whole coefficient-matching system") {
    // Reconstructing every a_j from the b's and f's derivatives must give
    // back the source coefficients; the j = 0 line additionally certifies
    // that f satisfies its ODE.
    std::vector<OraclePtr> cs = {
        make_expr_oracle("0.3 - 0.2*x + 0.1*x^2", 0.0, 0.9),
        make_expr_oracle("0.5*x - 0.4", 0.0, 0.9),
        make_expr_oracle("0.2 + 0.3*x", 0.0, 0.9),
        make_expr_oracle("0.1 - 0.5*x^2", 0.0, 0.9),
    };
    LinearOperator source(4, cs, 0.0, 0.9);
    ReductionStep step = solve_f_ode(source);
    const int k = 3;

    std::mt19937 rng(777);
    std::uniform_real_distribution<double> pick(step.reduced.a(),
                                                step.reduced.b());
    for (int trial = 0; trial < 100; ++trial) {
        const double x = pick(rng);
        const Jet fj = step.f_traj->jet_at(x, k);
        std::vector<double> b;
        for (const auto& o : step.b_coeffs) b.push_back(o->value(x));

        for (int j = k; j >= 1; --j) {
            double built = binom(k, j) * fj[k - j] + b[static_cast<std::size_t>(j - 1)];
            for (int m = j; m <= k - 1; ++m)
                built += b[static_cast<std::size_t>(m)] * binom(m, j) * fj[m - j];
            const double aj = source.coeff_value(j, x);
            CHECK(std::abs(built - aj) <= 1e-9 * (1.0 + std::abs(aj)));
        }
        double a0 = fj[k];
        for (int m = 0; m < k; ++m)
            a0 += b[static_cast<std::size_t>(m)] * fj[m];
        const double want = source.coeff_value(0, x);
        CHECK(std::abs(a0 - want) <= 1e-9 * (1.0 + std::abs(want)));
    }
}

TEST_CASE("constant coefficients keep f finite across half a unit") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<OraclePtr> cs = {make_constant_oracle(0.0),
                                     make_constant_oracle(coeff(rng)),
                                     make_constant_oracle(coeff(rng))};
        LinearOperator source(3, cs, 0.0, 0.5);
        ReductionStep coarse = solve_f_ode(source);
        ReductionStep fine = solve_f_ode(source, 0.5 / 8192);
        CAPTURE(trial);
        REQUIRE_FALSE(coarse.f_traj->truncated());
        REQUIRE_FALSE(fine.f_traj->truncated());
        CHECK(std::abs(coarse.f->value(0.5) - fine.f->value(0.5)) <= 1e-8);
    }
}

TEST_CASE("v combines function and slope with simple special cases") {
    OraclePtr u = make_expr_oracle("x^2", -1.0, 1.0);

    OraclePtr v1 = push_v(u, make_constant_oracle(1.0), 2);
    CHECK(v1->value(0.0) == 0.0);   // v = x^2 + 2x
    CHECK(v1->deriv(0.0, 1) == 2.0);
    CHECK(std::abs(v1->value(0.5) - 1.25) <= 1e-15);

    OraclePtr v0 = push_v(u, make_constant_oracle(0.0), 2);
    CHECK(v0->value(1.0) == 2.0);   // v = u'

    CHECK_THROWS_AS(push_v(u, make_constant_oracle(1.0), 15), CapabilityError);
    CHECK_THROWS_AS(push_v(nullptr, make_constant_oracle(1.0), 1),
                    ArgumentError);
}

TEST_CASE("kernel probes leave the reduced operator at zero") {
    // u = x^2 is killed by d^3, so M[v] must vanish identically too.
    ReductionStep step = solve_f_ode(pure_derivative(3, 0.0, 0.9));
    std::vector<OraclePtr> probes = {make_expr_oracle("x^2", 0.0, 0.9)};
    IdentityCheck check = verify_reduction_identity(step, probes, 256, 1e-7);
    CHECK(check.pass);
    CHECK(check.max_residual <= 1e-7);
}

TEST_CASE("the reduction identity holds for random smooth coefficients") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> c(-0.6, 0.6);
    auto poly = [&] {
        std::ostringstream s;
        s << c(rng) << " + " << c(rng) << "*x + " << c(rng) << "*x^2";
        return s.str();
    };
    std::vector<OraclePtr> probes;
    for (const char* src : {"1", "x", "x^2", "sin(x)", "exp(x)"})
        probes.push_back(make_expr_oracle(src, 0.0, 0.8));

    for (int n : {3, 4, 5}) {
        std::vector<OraclePtr> cs;
        for (int i = 0; i < n; ++i)
            cs.push_back(make_expr_oracle(poly(), 0.0, 0.8));
        LinearOperator source(n, cs, 0.0, 0.8);
        ReductionStep step = solve_f_ode(source);
        IdentityCheck check =
            verify_reduction_identity(step, probes, 128, 1e-6);
        CAPTURE(n);
        CAPTURE(check.max_residual);
        CHECK(check.pass);
    }
}

TEST_CASE("a third-order chain ends at order 2 with the curvature as slope") {
    LinearOperator op = pure_derivative(3, 0.0, 0.9);
    OraclePtr u = make_expr_oracle("x^2 - x^4", 0.0, 0.9);
    ReductionChain chain = reduce_chain(op, u);

    REQUIRE(chain.stages.size() == 1);
    CHECK(chain.final_op().order() == 2);
    // u has a zero jet through order 1, so v'(0) inherits u''(0) exactly.
    CHECK(chain.stages[0].v_zero.all_pass);
    CHECK(chain.stages[0].v_zero.top == 2.0);
    CHECK(chain.final_v->deriv(0.0, 1) == 2.0);
    CHECK(chain.stages[0].transfer.verdict == SeqVerdict::Pass);
    CHECK(chain.stages[0].transfer.witness_x.has_value());
}

TEST_CASE("a fourth-order chain runs two stages and keeps the cubic slope") {
    LinearOperator op = pure_derivative(4, 0.0, 0.8);
    OraclePtr u = make_expr_oracle("x^3 - x^5", 0.0, 0.8);
    ReductionChain chain = reduce_chain(op, u);

    REQUIRE(chain.stages.size() == 2);
    CHECK(chain.stages[0].step.reduced.order() == 3);
    CHECK(chain.stages[1].step.reduced.order() == 2);
    // Spans never grow along the chain.
    CHECK(chain.stages[1].step.reduced.b() <= chain.stages[0].step.reduced.b());

    CHECK(chain.stages[0].v_zero.all_pass);
    CHECK(chain.stages[0].v_zero.top == 6.0);  // v1'' (0) = u'''(0)
    CHECK(chain.stages[1].v_zero.all_pass);
    CHECK(chain.stages[1].v_zero.top == 6.0);  // v2'(0) = v1''(0)
    for (const auto& stage : chain.stages) {
        CHECK(stage.transfer.verdict == SeqVerdict::Pass);
    }
    CHECK(chain.final_v->trajectory_backed());
}

TEST_CASE("an identically zero function leaves every witness undetermined") {
    LinearOperator op = pure_derivative(3, 0.0, 0.9);
    OraclePtr u = make_expr_oracle("0", 0.0, 0.9);
    ReductionChain chain = reduce_chain(op, u);
    REQUIRE(chain.stages.size() == 1);
    CHECK(chain.stages[0].v_zero.all_pass);
    CHECK(chain.stages[0].v_zero.top == 0.0);
    CHECK(chain.stages[0].transfer.verdict == SeqVerdict::Undetermined);
    CHECK_FALSE(chain.stages[0].transfer.witness_x.has_value());
}

TEST_CASE("the slope hand-off is exact in jet arithmetic") {
    // v^(k-1)(a) = u^(k)(a) whenever u has a zero jet through k-1 at a,
    // whatever f is; the products in the Leibniz ladder all hit exact
    // zeros. k = 3 here.
    OraclePtr f = make_expr_oracle("exp(x)", -1.0, 1.0);
    OraclePtr u = make_expr_oracle("sin(x)^3", -1.0, 1.0);
    OraclePtr v = push_v(u, f, 3);
    CHECK(v->jet(0.0, 2)[2] == u->jet(0.0, 3)[3]);
}

TEST_CASE("reduction guards refuse undersized problems") {
    CHECK_THROWS_AS(solve_f_ode(pure_derivative(2, 0.0, 1.0)), ReductionError);
    CHECK_THROWS_AS(
        reduce_chain(pure_derivative(2, 0.0, 1.0),
                     make_expr_oracle("x", 0.0, 1.0)),
        ReductionError);
    CHECK_THROWS_AS(
        reduce_chain(pure_derivative(3, 0.0, 1.0), nullptr), ArgumentError);
    ReductionStep step = solve_f_ode(pure_derivative(3, 0.0, 0.9));
    CHECK_THROWS_AS(
        verify_reduction_identity(step, {}, 16, 1e-6), ArgumentError);
}
