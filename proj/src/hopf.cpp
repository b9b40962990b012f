#include "hopfkit/hopf.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <vector>

#include "hopfkit/barriers.hpp"
#include "hopfkit/errors.hpp"
#include "hopfkit/expr.hpp"
#include "hopfkit/odeint.hpp"
#include "hopfkit/reduction.hpp"

namespace hopfkit {
namespace {

std::string num(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return ec == std::errc{} ? std::string(buf, end) : std::string("?");
}

// Neighborhood conclusions count only when the detected radius spans at
// least 8 grid cells; anything thinner is treated as unresolved.
double radius_floor(double span, int grid) { return 8.0 * span / grid; }

void add_inequality_hypothesis(VerdictReport& rep, const LinearOperator& op,
                               const FunctionOracle& u, const HopfTolerances& tol) {
    auto grid = interior_grid(op.a(), op.b(), tol.grid);
    auto ineq = verify_inequality(op, u, grid, tol.ineq);
    rep.hypotheses.push_back(CheckItem{"operator inequality L[u] <= 0", ineq.pass,
                                       ineq.max_violation, ineq.worst_x,
                                       "max over " + std::to_string(tol.grid) +
                                           " interior points, scale " + num(ineq.scale)});
}

// Zero jet through `through` (inclusive) at the endpoint; the next
// derivative up is reported by the caller, not judged here.
EndpointCheck add_zero_jet_hypothesis(VerdictReport& rep, const FunctionOracle& u,
                                      double endpoint, int through,
                                      const HopfTolerances& tol) {
    auto jets = endpoint_jet_check(u, endpoint, through + 2, tol.zero);
    double worst = 0.0;
    for (int k = 0; k <= through; ++k) worst = std::max(worst, std::abs(jets.values[k]));
    std::string vals;
    for (int k = 0; k <= through; ++k) vals += (k ? ", " : "") + num(jets.values[k]);
    rep.hypotheses.push_back(CheckItem{"zero jet through order " + std::to_string(through),
                                       jets.all_pass, worst, endpoint,
                                       "values " + vals});
    return jets;
}

// Sequence-condition hypothesis; the unresolved case flags the report
// undetermined instead of failing a hypothesis.
SequenceScan add_sequence_hypothesis(VerdictReport& rep, const FunctionOracle& u,
                                     double endpoint, Side side, double sign,
                                     double span, const std::string& name) {
    auto scan = detect_sequence_condition(u, endpoint, side, sign, span);
    switch (scan.verdict) {
        case SeqVerdict::Pass:
            rep.hypotheses.push_back(CheckItem::ok(
                name, sign * u.value(*scan.witness_x), *scan.witness_x,
                "deepest witness rung j = " + std::to_string(scan.deepest_resolved)));
            break;
        case SeqVerdict::Fail: {
            double x = endpoint;
            for (const auto& r : scan.ladder)
                if (r.j == scan.deepest_resolved) x = r.x;
            rep.hypotheses.push_back(CheckItem::fail(
                name, sign * u.value(x), x,
                "deepest resolvable rung has the wrong sign"));
            break;
        }
        case SeqVerdict::Undetermined:
            rep.undetermined = true;
            rep.trace.push_back(CheckItem::fail(
                name, 0.0, std::nullopt,
                "no rung of the dyadic ladder resolves above tolerance"));
            break;
    }
    return scan;
}

// Sign-neighborhood conclusion shared by the checkers: strict when floor
// is 0, within-tolerance when floor < 0. A radius thinner than 8 cells is
// reported but leaves the verdict undetermined.
void add_radius_conclusion(VerdictReport& rep, const FunctionOracle& u,
                           double endpoint, Side side, double sign, double span,
                           double floor, const HopfTolerances& tol,
                           const std::string& name) {
    auto rad = detect_sign_radius(u, endpoint, side, sign, span, floor);
    double rho_min = radius_floor(span, tol.grid);
    if (!rad.found) {
        rep.conclusions.push_back(CheckItem::fail(name, 0.0, std::nullopt,
                                                  "no dyadic radius holds the sign"));
        return;
    }
    if (rad.radius < rho_min) {
        rep.undetermined = true;
        rep.conclusions.push_back(
            CheckItem::fail(name, rad.radius, endpoint + (side == Side::Left ? rad.radius : -rad.radius),
                            "radius resolved below the 8-cell floor " + num(rho_min)));
        return;
    }
    rep.conclusions.push_back(
        CheckItem::ok(name, rad.radius, endpoint + (side == Side::Left ? rad.radius : -rad.radius),
                      "min of signed u on the interval " + num(rad.min_value)));
}

// Replays the second-order proof: anchor epsilon at a sequence witness
// x_i0, subtract eps * (e^(lambda (x-a)) - 1), and watch the difference
// stay a nonnegative supersolution, forcing g'(a) >= eps * lambda.
void epsilon_subsolution_trace(VerdictReport& rep, const LinearOperator& op2,
                               const OraclePtr& g, const HopfTolerances& tol) {
    const double a = op2.a(), b = op2.b(), span = op2.span();
    auto scan = detect_sequence_condition(*g, a, Side::Left, +1.0, span);
    if (scan.verdict != SeqVerdict::Pass || !scan.witness_x) {
        rep.trace.push_back(CheckItem::fail("subsolution construction", 0.0, std::nullopt,
                                            "no sequence witness to anchor epsilon"));
        return;
    }
    const double C = std::max(op2.bound(), 0.01);
    double delta = make_barrier(BarrierKind::SmallIntervalH, C, {.a = a}).param("delta");
    double x0 = *scan.witness_x;
    if (!(x0 - a < delta)) {
        // witnesses are ordered by depth; the deepest is the closest to a
        rep.trace.push_back(CheckItem::fail(
            "subsolution construction", x0 - a, x0,
            "witness window exceeds the small-interval radius " + num(delta)));
        return;
    }

    auto bar = make_barrier(BarrierKind::ExpSubsolution, C, {.a = a, .b = b});
    double lambda = bar.param("lambda");
    double eps = g->value(x0) / bar.oracle->value(x0);
    rep.trace.push_back(CheckItem::ok("epsilon = u(x_i0) / (e^(lambda (x_i0 - a)) - 1)",
                                      eps, x0, "lambda = " + num(lambda)));

    auto w = make_combination_oracle({1.0, -eps}, {g, bar.oracle});
    auto wgrid = interior_grid(a, x0, 256);
    auto wineq = verify_inequality(op2, *w, wgrid, tol.ineq);
    rep.trace.push_back(CheckItem{"L[g - eps E] <= 0 on (a, x_i0)", wineq.pass,
                                  wineq.max_violation, wineq.worst_x, ""});

    double min_w = std::numeric_limits<double>::infinity(), min_x = a;
    auto probe = [&](double x) {
        double v = w->value(x);
        if (v < min_w) { min_w = v; min_x = x; }
    };
    probe(a);
    probe(x0);
    for (double x : wgrid) probe(x);
    rep.trace.push_back(CheckItem{"g - eps E >= 0 on [a, x_i0]", min_w >= -tol.zero,
                                  min_w, min_x,
                                  "window fits inside delta = " + num(delta)});

    double slope = g->deriv(a, 1);
    rep.trace.push_back(CheckItem{"g'(a) >= eps * lambda", slope + tol.zero >= eps * lambda,
                                  eps * lambda, a, "measured g'(a) = " + num(slope)});
}

const char* seq_label(SeqVerdict v) {
    switch (v) {
        case SeqVerdict::Pass: return "pass";
        case SeqVerdict::Fail: return "fail";
        case SeqVerdict::Undetermined: return "undetermined";
    }
    return "?";
}

// Order-reduction replay for chain mode: one trace row per stage with the
// exact slope hand-off value, then the subsolution construction on the
// terminal second-order problem.
void run_chain_trace(VerdictReport& rep, const HopfProblem& p) {
    try {
        if (p.op.order() == 2) {
            epsilon_subsolution_trace(rep, p.op, p.u, p.tol);
            return;
        }
        ReductionChain chain = reduce_chain(p.op, p.u);
        for (std::size_t i = 0; i < chain.stages.size(); ++i) {
            const auto& st = chain.stages[i];
            rep.trace.push_back(CheckItem::ok(
                "chain stage " + std::to_string(i + 1) + ": v^(k-1)(a) at k = " +
                    std::to_string(st.step.source.order()),
                st.v_zero.top, st.step.source.a(),
                std::string("transfer scan ") + seq_label(st.transfer.verdict)));
        }
        epsilon_subsolution_trace(rep, chain.final_op(), chain.final_v, p.tol);
    } catch (const ReductionError& e) {
        rep.undetermined = true;
        rep.trace.push_back(CheckItem::fail("chain replay", 0.0, std::nullopt, e.what()));
    } catch (const CapabilityError& e) {
        rep.undetermined = true;
        rep.trace.push_back(CheckItem::fail("chain replay", 0.0, std::nullopt, e.what()));
    }
}

// Max |f(p) - f(q)| / |p - q|_inf over pairs in (a padded copy of) the
// trajectory's jet bounding box. Alternates global pairs, local
// perturbations, and pairs shrinking geometrically toward the origin jet;
// the origin is where the dichotomy proof actually spends the constant,
// and where a merely Holder right side gives itself away.
double sampled_lipschitz(const NonlinearRhs& rhs, const FunctionOracle& u,
                         double a, double b) {
    const int n = rhs.n;
    std::vector<double> lo(n, std::numeric_limits<double>::infinity());
    std::vector<double> hi(n, -std::numeric_limits<double>::infinity());
    for (double x : interior_grid(a, b, 256)) {
        Jet j = u.jet(x, n - 1);
        for (int k = 0; k < n; ++k) {
            lo[k] = std::min(lo[k], j[k]);
            hi[k] = std::max(hi[k], j[k]);
        }
    }
    std::vector<double> width(n), mag(n);
    for (int k = 0; k < n; ++k) {
        double pad = 0.1 * (hi[k] - lo[k]) + 1e-3;
        lo[k] -= pad;
        hi[k] += pad;
        width[k] = hi[k] - lo[k];
        mag[k] = std::max({std::abs(lo[k]), std::abs(hi[k]), 1.0});
    }

    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_real_distribution<double> dir(-1.0, 1.0);
    std::vector<double> p(n), q(n);
    double best = 0.0;
    for (int trial = 0; trial < 10000; ++trial) {
        switch (trial % 3) {
            case 0:
                for (int k = 0; k < n; ++k) {
                    p[k] = lo[k] + width[k] * unit(rng);
                    q[k] = lo[k] + width[k] * unit(rng);
                }
                break;
            case 1:
                for (int k = 0; k < n; ++k) {
                    p[k] = lo[k] + width[k] * unit(rng);
                    q[k] = p[k] + 1e-6 * width[k] * dir(rng);
                }
                break;
            default: {
                double scale = std::pow(10.0, -16.0 * unit(rng));
                for (int k = 0; k < n; ++k) {
                    p[k] = dir(rng) * scale * mag[k];
                    q[k] = dir(rng) * scale * mag[k];
                }
                break;
            }
        }
        double dist = 0.0;
        for (int k = 0; k < n; ++k) dist = std::max(dist, std::abs(p[k] - q[k]));
        if (dist == 0.0) continue;
        double ratio = std::abs(rhs.f(p) - rhs.f(q)) / dist;
        if (std::isfinite(ratio)) best = std::max(best, ratio);
    }
    return best;
}

double factorial(int n) {
    double r = 1.0;
    for (int k = 2; k <= n; ++k) r *= k;
    return r;
}

}  // namespace

RadiusScan detect_sign_radius(const FunctionOracle& u, double endpoint, Side side,
                              double sign, double span, double floor, int samples,
                              int j_max) {
    if (!(span > 0.0)) throw ArgumentError("sign radius scan needs a positive span");
    if (samples < 2 || j_max < 1)
        throw ArgumentError("sign radius scan needs samples >= 2 and j_max >= 1");

    RadiusScan scan;
    double r = span;
    for (int j = 1; j <= j_max; ++j) {
        r *= 0.5;
        double lo = side == Side::Left ? endpoint : endpoint - r;
        double hi = side == Side::Left ? endpoint + r : endpoint;
        double min_v = std::numeric_limits<double>::infinity();
        double worst = lo;
        auto probe = [&](double x) {
            double v = sign * u.value(x);
            if (v < min_v) { min_v = v; worst = x; }
        };
        for (double x : interior_grid(lo, hi, samples)) probe(x);
        probe(side == Side::Left ? hi : lo);  // the outer end is included
        if (min_v > floor) {
            scan.found = true;
            scan.j = j;
            scan.radius = r;
            scan.min_value = min_v;
            scan.worst_x = worst;
            return scan;
        }
    }
    return scan;
}

VerdictReport check_hopf_left(const HopfProblem& p, HopfMode mode) {
    if (p.endpoint != Endpoint::Left)
        throw ArgumentError("check_hopf_left expects a left-endpoint problem");
    const int n = p.op.order();
    const double a = p.op.a(), span = p.op.span();

    VerdictReport rep;
    rep.checker = "hopf_left";

    add_inequality_hypothesis(rep, p.op, *p.u, p.tol);
    auto jets = add_zero_jet_hypothesis(rep, *p.u, a, n - 2, p.tol);
    add_sequence_hypothesis(rep, *p.u, a, Side::Left, +1.0, span,
                            "sequence condition u(x_i) > 0, x_i -> a");

    rep.conclusions.push_back(CheckItem{"u^(n-1)(a) > 0", jets.top >= p.tol.margin,
                                        jets.top, a, ""});
    add_radius_conclusion(rep, *p.u, a, Side::Left, +1.0, span, 0.0, p.tol,
                          "u > 0 on (a, a + rho]");

    if (mode == HopfMode::Chain) run_chain_trace(rep, p);

    rep.finalize();
    return rep;
}

VerdictReport check_hopf_right(const HopfProblem& p) {
    if (p.endpoint != Endpoint::Right)
        throw ArgumentError("check_hopf_right expects a right-endpoint problem");
    const int n = p.op.order();
    const double b = p.op.b(), span = p.op.span();
    const bool odd = n % 2 == 1;

    // (1.6)/(1.7): reflect across b, flipping the sign when n is odd, and
    // hand the left checker a problem it recognizes.
    HopfProblem q{p.op.reflected(), make_reflected_oracle(p.u, b, odd),
                  Endpoint::Left, p.tol};
    VerdictReport left = check_hopf_left(q);

    VerdictReport rep;
    rep.checker = "hopf_right";
    rep.undetermined = left.undetermined;
    rep.hypotheses = std::move(left.hypotheses);
    for (auto& h : rep.hypotheses) {
        if (h.name.rfind("sequence", 0) == 0)
            h.name = odd ? "sequence condition u(x_i) < 0, x_i -> b"
                         : "sequence condition u(x_i) > 0, x_i -> b";
        else
            h.note += (h.note.empty() ? "" : "; ") + std::string("checked on the reflection across b");
        if (h.witness_x) h.witness_x = 2.0 * b - *h.witness_x;
    }

    double top = p.u->deriv(b, n - 1);
    rep.conclusions.push_back(CheckItem{"u^(n-1)(b) < 0", top <= -p.tol.margin, top, b, ""});
    add_radius_conclusion(rep, *p.u, b, Side::Right, odd ? -1.0 : +1.0, span, 0.0,
                          p.tol, odd ? "u < 0 on [b - rho, b)" : "u > 0 on [b - rho, b)");

    for (auto& c : left.conclusions) {
        c.name = "reflected: " + c.name;
        rep.trace.push_back(std::move(c));
    }
    for (auto& t : left.trace) rep.trace.push_back(std::move(t));

    rep.finalize();
    return rep;
}

VerdictReport check_equivalent_form(const HopfProblem& p) {
    const int n = p.op.order();
    const bool left = p.endpoint == Endpoint::Left;
    const double e = left ? p.op.a() : p.op.b();
    const double span = p.op.span();

    VerdictReport rep;
    rep.checker = "equivalent_form";

    add_inequality_hypothesis(rep, p.op, *p.u, p.tol);
    add_zero_jet_hypothesis(rep, *p.u, e, n - 1, p.tol);

    // u <= 0 near a; near b the sign alternates with parity
    double sign = left ? -1.0 : (n % 2 == 1 ? +1.0 : -1.0);
    std::string name = sign < 0 ? "u <= 0 on the detected neighborhood"
                                : "u >= 0 on the detected neighborhood";
    add_radius_conclusion(rep, *p.u, e, left ? Side::Left : Side::Right, sign, span,
                          -p.tol.zero, p.tol, name);

    rep.finalize();
    return rep;
}

VerdictReport small_interval_max_principle(const LinearOperator& op2,
                                           const FunctionOracle& g, double c,
                                           double d, const HopfTolerances& tol) {
    VerdictReport rep;
    rep.checker = "max_principle";
    if (op2.order() != 2) {
        rep.not_applicable =
            "the small-interval principle is second-order only; for order >= 3 "
            "it fails outright (see the g_i gallery family)";
        rep.finalize();
        return rep;
    }
    if (!(c < d)) throw ArgumentError("max principle needs c < d");
    double slack = 1e-12 * (1.0 + std::abs(c) + std::abs(d));
    if (c < op2.a() - slack || d > op2.b() + slack)
        throw ArgumentError("window [c, d] must sit inside the operator interval");

    const double C = std::max(op2.bound(), 0.01);
    double delta = make_barrier(BarrierKind::SmallIntervalH, C, {.a = c}).param("delta");
    rep.trace.push_back(CheckItem::ok("delta(C)", delta, std::nullopt, "C = " + num(C)));
    if (!(d - c < delta)) {
        rep.not_applicable = "interval length " + num(d - c) +
                             " is not below delta(C) = " + num(delta);
        rep.finalize();
        return rep;
    }

    auto grid = interior_grid(c, d, tol.grid);
    auto ineq = verify_inequality(op2, g, grid, tol.ineq);
    rep.hypotheses.push_back(CheckItem{"L[g] <= 0 on (c, d)", ineq.pass,
                                       ineq.max_violation, ineq.worst_x, ""});
    double gc = g.value(c), gd = g.value(d);
    rep.hypotheses.push_back(CheckItem{"g(c) >= 0", gc >= -tol.zero, gc, c, ""});
    rep.hypotheses.push_back(CheckItem{"g(d) >= 0", gd >= -tol.zero, gd, d, ""});

    double min_g = std::min(gc, gd), min_x = gc <= gd ? c : d;
    for (double x : grid) {
        double v = g.value(x);
        if (v < min_g) { min_g = v; min_x = x; }
    }
    rep.conclusions.push_back(CheckItem{"min g >= 0 on [c, d]", min_g >= -tol.zero,
                                        min_g, min_x, ""});
    rep.finalize();
    return rep;
}

VerdictReport check_third_order_bounded(const HopfProblem& p, double nonneg_nbhd) {
    if (p.op.order() != 3)
        throw ArgumentError("the bounded-coefficient check is third-order only");
    if (p.endpoint != Endpoint::Left)
        throw ArgumentError("the bounded-coefficient check works at the left endpoint");
    if (!(nonneg_nbhd > 0.0))
        throw ArgumentError("the nonnegativity neighborhood must be positive");

    const double a = p.op.a(), b = p.op.b(), span = p.op.span();
    VerdictReport rep;
    rep.checker = "third_order_bounded";

    add_inequality_hypothesis(rep, p.op, *p.u, p.tol);

    double r = std::min(nonneg_nbhd, span);
    double min_u = std::numeric_limits<double>::infinity(), min_x = a;
    auto probe = [&](double x) {
        double v = p.u->value(x);
        if (v < min_u) { min_u = v; min_x = x; }
    };
    for (double x : interior_grid(a, a + r, 256)) probe(x);
    probe(a + r);
    rep.hypotheses.push_back(CheckItem{"u >= 0 on (a, a + " + num(r) + ")",
                                       min_u >= -p.tol.zero, min_u, min_x, ""});

    auto jets = add_zero_jet_hypothesis(rep, *p.u, a, 1, p.tol);
    add_sequence_hypothesis(rep, *p.u, a, Side::Left, +1.0, span,
                            "sequence condition u(x_i) > 0, x_i -> a");

    const double C = std::max(p.op.bound(), 0.01);
    auto m = make_barrier(BarrierKind::ThirdOrderM, C, {.a = a, .b = b});
    const double eta = m.param("eta");
    rep.trace.push_back(CheckItem::ok("barrier m: theta", m.param("theta"), std::nullopt,
                                      "C floored at 0.01, actual bound " + num(p.op.bound())));
    rep.trace.push_back(CheckItem::ok("barrier m: eta", eta, std::nullopt, ""));

    // quotient mechanism: z = u / m on [a, a + eta]
    auto z = make_quotient_oracle(p.u, m.oracle);
    Jet zj = z->jet(a, 2);
    rep.trace.push_back(CheckItem{"z(a) = 0 from the jet quotient",
                                  std::abs(zj[0]) <= p.tol.zero, zj[0], a, ""});
    rep.trace.push_back(CheckItem{"z'(a) = 0 from the jet quotient",
                                  std::abs(zj[1]) <= p.tol.zero, zj[1], a, ""});

    double direct = jets.top;  // u''(a), judged below
    double mech = m.oracle->value(a) * zj[2];
    rep.trace.push_back(CheckItem{"u''(a) = m(a) z''(a)",
                                  std::abs(mech - direct) <= 1e-8 * (1.0 + std::abs(direct)),
                                  mech, a, "direct jet value " + num(direct)});

    // starred coefficients of the problem z inherits: a2* = 3m'/m + a2,
    // a1* = (3m'' + 2 a2 m' + a1 m)/m, and a0* = L[m]/m, which the barrier
    // certificate keeps strictly positive.
    OraclePtr m_oracle = m.oracle;
    const LinearOperator op3 = p.op;  // owned copy: the lambdas outlive this frame
    auto star2 = make_lambda_oracle(
        [m_oracle, op3](double x, int) {
            Jet mj = m_oracle->jet(x, 1);
            Jet r0(x, 0);
            r0[0] = 3.0 * mj[1] / mj[0] + op3.coeff_value(2, x);
            return r0;
        },
        a, a + eta, 0, "a2* of the quotient mechanism");
    auto star1 = make_lambda_oracle(
        [m_oracle, op3](double x, int) {
            Jet mj = m_oracle->jet(x, 2);
            Jet r0(x, 0);
            r0[0] = (3.0 * mj[2] + 2.0 * op3.coeff_value(2, x) * mj[1]) / mj[0] +
                    op3.coeff_value(1, x);
            return r0;
        },
        a, a + eta, 0, "a1* of the quotient mechanism");

    double hi_star = a + std::min(eta, r);
    auto star_grid = interior_grid(a, hi_star, 256);
    double min_a0 = std::numeric_limits<double>::infinity(), a0_x = a;
    for (double x : star_grid) {
        double v = apply_operator(p.op, *m.oracle, x) / m.oracle->value(x);
        if (v < min_a0) { min_a0 = v; a0_x = x; }
    }
    rep.hypotheses.push_back(CheckItem{"mechanism: a0* = L[m]/m > 0 on the grid",
                                       min_a0 > 0.0, min_a0, a0_x, ""});

    LinearOperator m2(2, {star1, star2}, a, hi_star);
    auto v = make_derivative_oracle(z);
    auto vineq = verify_inequality(m2, *v, star_grid, p.tol.ineq);
    rep.trace.push_back(CheckItem{"M2[z'] <= 0 where z >= 0", vineq.pass,
                                  vineq.max_violation, vineq.worst_x,
                                  "second-order problem for v = z'"});

    rep.conclusions.push_back(CheckItem{"u''(a) > 0", direct >= p.tol.margin, direct, a,
                                        "mechanism value " + num(mech)});
    rep.finalize();
    return rep;
}

NonlinearRhs make_rhs_from_expr(const std::string& source, int n) {
    if (n < 1) throw ArgumentError("the right side needs order n >= 1");
    Expr e = Expr::parse(source);
    for (const auto& v : e.variables()) {
        if (v == "x")
            throw ArgumentError("autonomous right side cannot reference x");
        int slot = std::stoi(v.substr(1));
        if (slot < 1 || slot > n)
            throw ArgumentError("right side references " + v + " beyond order " +
                                std::to_string(n));
    }
    NonlinearRhs r;
    r.n = n;
    r.description = e.str();
    r.f = [e, n](std::span<const double> z) {
        if (static_cast<int>(z.size()) != n)
            throw ArgumentError("right side expects exactly n arguments");
        std::map<std::string, double> bind;
        for (int k = 0; k < n; ++k) bind["z" + std::to_string(k + 1)] = z[k];
        return e.eval_value(bind);
    };
    return r;
}

VerdictReport boundary_dichotomy(const NonlinearRhs& rhs, const OraclePtr& u,
                                 Endpoint endpoint, const HopfTolerances& tol) {
    if (rhs.n < 1 || !rhs.f) throw ArgumentError("nonlinear right side is incomplete");
    if (!u) throw ArgumentError("boundary dichotomy needs a function");
    const int n = rhs.n;
    if (u->max_order() < n)
        throw CapabilityError("the function cannot serve order-" + std::to_string(n) +
                              " jets");
    const double a = u->lo(), b = u->hi();
    if (!(a < b)) throw ArgumentError("degenerate domain");
    const double span = b - a;
    const bool left = endpoint == Endpoint::Left;
    const double e = left ? a : b;
    const Side side = left ? Side::Left : Side::Right;

    VerdictReport rep;
    rep.checker = "boundary_dichotomy";

    // the equation itself, on an interior grid
    double worst = 0.0, worst_x = a, top_mag = 0.0;
    std::vector<double> zbuf(n);
    for (double x : interior_grid(a, b, 256)) {
        Jet j = u->jet(x, n);
        for (int k = 0; k < n; ++k) zbuf[k] = j[k];
        double res = std::abs(j[n] - rhs.f(zbuf));
        top_mag = std::max(top_mag, std::abs(j[n]));
        if (res > worst) { worst = res; worst_x = x; }
    }
    double rtol = tol.residual * (1.0 + top_mag);
    rep.hypotheses.push_back(CheckItem{"u^(n) = f(u, ..., u^(n-1)) on the grid",
                                       worst <= rtol, worst, worst_x,
                                       "tolerance " + num(rtol)});

    add_zero_jet_hypothesis(rep, *u, e, n - 2, tol);

    auto rad = detect_sign_radius(*u, e, side, +1.0, span);
    rep.hypotheses.push_back(CheckItem{
        "u > 0 one-sided", rad.found, rad.found ? rad.radius : 0.0,
        rad.found ? std::optional<double>(rad.worst_x) : std::nullopt,
        rad.found ? "detected radius" : "no dyadic radius holds the sign"});

    // the proof's case split, for the record
    std::vector<double> origin(n, 0.0);
    double f0 = rhs.f(origin);
    rep.trace.push_back(CheckItem::ok(
        "f(0, ..., 0)", f0, std::nullopt,
        f0 <= 0.0 ? "case 1: the segment-linearized problem keeps L[u] <= 0"
                  : "case 2: a vanishing top jet forces u^(n) = f(0, ..., 0) > 0"));

    double ratio = sampled_lipschitz(rhs, *u, a, b);
    rep.trace.push_back(CheckItem{"sampled lipschitz ratio of f", ratio <= 1e6, ratio,
                                  std::nullopt,
                                  ratio <= 1e6
                                      ? "finite-difference ratios over 10^4 pairs"
                                      : "ratios diverge toward the origin jet; the "
                                        "lipschitz hypothesis looks violated"});

    // the dichotomy: derivative n-1 strictly signed, or zero with
    // derivative n taking over
    double t = u->deriv(e, n - 1);
    double s = u->jet(e, n)[n];
    double b1 = left ? t : (n % 2 == 1 ? t : -t);
    double b2 = left ? s : (n % 2 == 1 ? -s : s);
    int branch = 0;
    if (b1 >= tol.margin)
        branch = 1;
    else if (std::abs(t) <= tol.zero && b2 >= tol.margin)
        branch = 2;
    rep.conclusions.push_back(CheckItem{
        "dichotomy branch", branch != 0, static_cast<double>(branch), e,
        "u^(n-1) = " + num(t) + ", u^(n) = " + num(s) +
            (branch == 0 ? "; neither branch is strictly signed" : "")});

    // strict monotonicity near the endpoint: increasing at a, decreasing at b
    auto du = make_derivative_oracle(u);
    auto mono = detect_sign_radius(*du, e, side, left ? +1.0 : -1.0, span);
    double rho_min = radius_floor(span, tol.grid);
    rep.conclusions.push_back(CheckItem{
        left ? "u strictly increasing near a" : "u strictly decreasing near b",
        mono.found && mono.radius >= rho_min, mono.found ? mono.radius : 0.0,
        mono.found ? std::optional<double>(mono.worst_x) : std::nullopt,
        "sign radius of u'"});

    rep.finalize();
    return rep;
}

VerdictReport uniqueness_probe(const LinearOperator& op, double span, double h,
                               double eps) {
    if (!(span > 0.0) || span > op.span() * (1.0 + 1e-12))
        throw ArgumentError("probe span must lie inside the operator interval");
    if (eps == 0.0 || !std::isfinite(eps))
        throw ArgumentError("control offset must be nonzero and finite");
    const int n = op.order();
    const double a = op.a();

    VerdictReport rep;
    rep.checker = "uniqueness_probe";
    auto zero = make_constant_oracle(0.0);

    auto sup_on_span = [&](const Trajectory& t) {
        double sup = 0.0, at = a;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t.x_at(i) > a + span + 1e-12 * (1.0 + std::abs(span))) break;
            double v = std::abs(t.state_at(i)[0]);
            if (v > sup) { sup = v; at = t.x_at(i); }
        }
        return std::pair(sup, at);
    };

    std::vector<double> init(n, 0.0);
    Trajectory base = integrate_linear_ivp(op, zero, init, h);
    auto [sup0, at0] = sup_on_span(base);
    rep.conclusions.push_back(CheckItem{"zero data integrates to zero", sup0 <= 1e-12,
                                        sup0, at0, "sup |u| over [a, a + span]"});

    init.back() = eps;
    Trajectory ctrl = integrate_linear_ivp(op, zero, init, h);
    if (ctrl.truncated()) {
        rep.undetermined = true;
        rep.trace.push_back(CheckItem::fail("control run", 0.0, std::nullopt,
                                            "control trajectory left the finite range"));
    } else {
        auto [sup1, at1] = sup_on_span(ctrl);
        double threshold = std::abs(eps) * std::pow(span, n - 1) / (2.0 * factorial(n - 1));
        rep.conclusions.push_back(CheckItem{"control run responds", sup1 >= threshold,
                                            sup1, at1,
                                            "threshold eps span^(n-1) / (2 (n-1)!) = " +
                                                num(threshold)});
    }
    rep.finalize();
    return rep;
}

VerdictReport unique_continuation_probe(const HopfProblem& p, int max_order) {
    if (p.endpoint != Endpoint::Left)
        throw ArgumentError("the continuation probe works at the left endpoint");
    const int n = p.op.order();
    if (max_order < n - 1)
        throw ArgumentError("max_order must reach n - 1");
    if (p.u->trajectory_backed() && max_order > n - 1)
        throw CapabilityError(
            "derivative orders beyond n - 1 need an expression-backed function");

    const double a = p.op.a(), span = p.op.span();
    VerdictReport rep;
    rep.checker = "unique_continuation";

    add_inequality_hypothesis(rep, p.op, *p.u, p.tol);
    add_zero_jet_hypothesis(rep, *p.u, a, n - 2, p.tol);
    add_sequence_hypothesis(rep, *p.u, a, Side::Left, +1.0, span,
                            "sequence condition u(x_i) > 0, x_i -> a");

    Jet j = p.u->jet(a, max_order);
    int first = -1;
    for (int k = 0; k <= max_order; ++k) {
        rep.trace.push_back(CheckItem::ok("u^(" + std::to_string(k) + ")(a)", j[k], a, ""));
        if (first < 0 && std::abs(j[k]) > p.tol.margin) first = k;
    }
    rep.conclusions.push_back(CheckItem{
        "some derivative through order n-1 is nonzero", first >= 0 && first <= n - 1,
        static_cast<double>(first), a,
        first < 0 ? "all sampled derivatives vanish" : "first nonvanishing order"});
    rep.conclusions.push_back(CheckItem{
        "first nonvanishing order is n-1", first == n - 1, static_cast<double>(first),
        a, first >= 0 ? "value " + num(j[first]) : "none found through " +
                                                       std::to_string(max_order)});
    rep.finalize();
    return rep;
}

}  // namespace hopfkit
