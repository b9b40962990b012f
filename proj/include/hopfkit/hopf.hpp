#pragma once

#include <functional>
#include <span>
#include <string>

#include "hopfkit/operator.hpp"
#include "hopfkit/oracle.hpp"
#include "hopfkit/report.hpp"

namespace hopfkit {

enum class Endpoint { Left, Right };
enum class HopfMode { Direct, Chain };

struct HopfTolerances {
    double ineq = 1e-9;      // relative slack for L[u] <= 0
    double zero = 1e-8;      // endpoint zero-jet ceiling
    double margin = 1e-10;   // strict-positivity floor for conclusions
    double residual = 1e-6;  // relative equation residual (nonlinear checks)
    int grid = 512;          // inequality/scan grid count
};

// One endpoint problem: the operator, the candidate function, and which
// end the conclusions are about. u must serve jets to order n one-sided.
struct HopfProblem {
    LinearOperator op;
    OraclePtr u;
    Endpoint endpoint = Endpoint::Left;
    HopfTolerances tol{};
};

// Largest dyadic one-sided radius span * 2^-j (j = 1..j_max) on which
// sign * u stays strictly above `floor` at every sample point. The scan
// stops at the first (largest) radius that passes.
struct RadiusScan {
    bool found = false;
    int j = 0;
    double radius = 0.0;
    double min_value = 0.0;  // min of sign * u on the detected interval
    double worst_x = 0.0;
};

RadiusScan detect_sign_radius(const FunctionOracle& u, double endpoint, Side side,
                              double sign, double span, double floor = 0.0,
                              int samples = 64, int j_max = 40);

// Left-endpoint sequential Hopf check: hypotheses are the operator
// inequality, the zero jet through order n-2, and the sign sequence toward
// a; conclusions are u^(n-1)(a) > 0 and one-sided positivity on a detected
// radius (at least 8 grid cells wide). Chain mode additionally replays the
// order-reduction ladder and the second-order subsolution construction in
// the trace; it never changes the verdict unless the ladder cannot run.
VerdictReport check_hopf_left(const HopfProblem& p, HopfMode mode = HopfMode::Direct);

// Right-endpoint version, run by reflecting the problem across b onto
// (b, 2b - a) and delegating to the left checker; n odd flips the sign of
// the reflected function, so the sequence condition wants u(x_i) > 0 for
// n even and u(x_i) < 0 for n odd. Conclusions map back to u^(n-1)(b) < 0
// and the parity sign of u near b.
VerdictReport check_hopf_right(const HopfProblem& p);

// Equivalent form: full zero jet through order n-1 at the endpoint, and
// the conclusion is a one-sided sign: u <= 0 near a; near b, u <= 0 for
// n even and u >= 0 for n odd.
VerdictReport check_equivalent_form(const HopfProblem& p);

// Second-order maximum principle on a short interval: if length < delta(C)
// from the small-interval barrier, L[g] <= 0 and nonnegative boundary data
// force g >= 0 on [c, d]. Intervals that are too long, or operators of
// order != 2, gate out as NOT_APPLICABLE rather than failing.
VerdictReport small_interval_max_principle(const LinearOperator& op2,
                                           const FunctionOracle& g, double c,
                                           double d, const HopfTolerances& tol = {});

// Third-order Hopf with merely bounded coefficients: requires u >= 0 on
// (a, a + nonneg_nbhd) in place of coefficient continuity. Replays the
// quotient mechanism z = u / m against the third-order barrier m and
// reports the starred second-order problem alongside the direct jet value
// of u''(a).
VerdictReport check_third_order_bounded(const HopfProblem& p, double nonneg_nbhd);

// Autonomous nonlinear right side u^(n) = f(u, u', ..., u^(n-1)).
// f consumes z[0..n-1]; the description feeds reports.
struct NonlinearRhs {
    int n = 0;
    std::function<double(std::span<const double>)> f;
    std::string description;
};

// Binds z1..zn of an expression source; the expression must not mention x.
NonlinearRhs make_rhs_from_expr(const std::string& source, int n);

// Boundary dichotomy for the nonlinear equation: with a zero jet through
// n-2 and u > 0 one-sided, either the (n-1)-th derivative is strictly
// signed at the endpoint (branch 1) or it vanishes and the n-th takes over
// (branch 2); u is strictly monotone on the detected neighborhood. The
// Lipschitz constant of f is sampled over the trajectory's bounding box
// and reported, never assumed.
VerdictReport boundary_dichotomy(const NonlinearRhs& rhs, const OraclePtr& u,
                                 Endpoint endpoint, const HopfTolerances& tol = {});

// Uniqueness probe: a full zero jet with zero forcing must integrate to
// the identically zero function; a control run with top slot eps must
// visibly respond. `span` trims the integration to [a, a + span].
VerdictReport uniqueness_probe(const LinearOperator& op, double span, double h = 0.0,
                               double eps = 1e-3);

// Unique continuation probe: under the left-Hopf hypotheses some
// derivative at a below order n must be nonzero, and the first such order
// is exactly n-1. Orders above n-1 require an expression-backed u.
VerdictReport unique_continuation_probe(const HopfProblem& p, int max_order);

}  // namespace hopfkit
