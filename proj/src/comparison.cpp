#include "hopfkit/comparison.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <random>

#include "hopfkit/errors.hpp"
#include "hopfkit/hopf.hpp"

namespace hopfkit {

namespace {

// 16-node Gauss-Legendre rule mapped to [0,1]; exact for polynomial
// integrands of degree <= 31. Nodes ascend; weights sum to 1.
constexpr int kNodes = 16;
constexpr double kGlNode[kNodes] = {
    0.0052995325041750337, 0.0277124884633837119, 0.0671843988060841281,
    0.1222977958224984831, 0.1910618777986781258, 0.2709916111713863068,
    0.3591982246103705434, 0.4524937450811812799, 0.5475062549188187201,
    0.6408017753896294566, 0.7290083888286136932, 0.8089381222013218742,
    0.8777022041775015169, 0.9328156011939158719, 0.9722875115366162880,
    0.9947004674958249663};
constexpr double kGlWeight[kNodes] = {
    0.0135762297058770474, 0.0311267619693239468, 0.0475792558412463924,
    0.0623144856277669360, 0.0747979944082883660, 0.0845782596975012691,
    0.0913017075224617944, 0.0947253052275342481, 0.0947253052275342481,
    0.0913017075224617944, 0.0845782596975012691, 0.0747979944082883660,
    0.0623144856277669360, 0.0475792558412463924, 0.0311267619693239468,
    0.0135762297058770474};

std::string slot_name(int slot) { return "z" + std::to_string(slot); }

std::string format_number(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, end);
}

}  // namespace

NonlinearOperator::NonlinearOperator(int order, Expr source)
    : n_(order), k_(std::move(source)), uses_(order >= 0 ? order + 1 : 0, false) {
    if (n_ < 1) throw ArgumentError("nonlinear operator needs order >= 1");
    for (const std::string& name : k_.variables()) {
        if (name == "x") continue;
        int slot = 0;
        if (name.size() > 1 && name[0] == 'z') slot = std::stoi(name.substr(1));
        if (slot < 1 || slot > n_ + 2)
            throw ArgumentError("operator expression references " + name +
                                ", outside x and z1..z" + std::to_string(n_ + 2));
        if (slot >= 2) uses_[slot - 2] = true;
    }
    if (!uses_[n_])
        throw ArgumentError("operator expression never references the top slot " +
                            slot_name(n_ + 2));
}

NonlinearOperator::NonlinearOperator(int order, const std::string& source)
    : NonlinearOperator(order, Expr::parse(source)) {}

bool NonlinearOperator::uses_slot(int slot) const {
    if (slot < 0 || slot > n_) return false;
    return uses_[static_cast<std::size_t>(slot)];
}

double NonlinearOperator::apply(const FunctionOracle& u, double x) const {
    return apply(x, u.jet(x, n_));
}

double NonlinearOperator::apply(double x, const Jet& jet) const {
    if (jet.order() < n_)
        throw ArgumentError("operator of order " + std::to_string(n_) +
                            " applied to a jet of order " +
                            std::to_string(jet.order()));
    std::map<std::string, double> bindings;
    bindings["x"] = x;
    bindings["z1"] = x;
    for (int k = 0; k <= n_; ++k) bindings[slot_name(k + 2)] = jet[k];
    return k_.eval_value(bindings);
}

Linearization linearize(const NonlinearOperator& K, const FunctionOracle& u,
                        const FunctionOracle& v, double x) {
    const int n = K.order();
    const Jet ju = u.jet(x, n);
    const Jet jv = v.jet(x, n);

    Linearization out;
    out.x = x;
    out.c.assign(static_cast<std::size_t>(n) + 1, 0.0);

    std::map<std::string, Jet> bindings;
    bindings.emplace("x", Jet::constant(x, 1, x));
    bindings.emplace("z1", Jet::constant(x, 1, x));

    for (int node = 0; node < kNodes; ++node) {
        const double t = kGlNode[node];
        std::vector<double> seg(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) seg[k] = t * ju[k] + (1.0 - t) * jv[k];

        for (int i = 0; i <= n; ++i) {
            if (!K.uses_slot(i)) continue;  // partial is identically zero
            for (int k = 0; k <= n; ++k) {
                const double d[2] = {seg[k], k == i ? 1.0 : 0.0};
                bindings.insert_or_assign(slot_name(k + 2), Jet(x, 1, d));
            }
            const double partial = K.expression().eval(bindings, 1)[1];
            if (i == n && !(partial > 0.0))
                throw MonotonicityError(
                    "dK/d" + slot_name(n + 2) + " = " + format_number(partial) +
                    " at x = " + format_number(x) + ", t = " + format_number(t) +
                    "; the top slot must be strictly increasing");
            out.c[i] += kGlWeight[node] * partial;
        }
    }
    return out;
}

namespace {

// Sampled Lipschitz constant of K over the box spanned by the jets of u and
// v on the window, padded outward. Reported, never verified.
double sampled_lipschitz_constant(const NonlinearOperator& K,
                                  const FunctionOracle& u,
                                  const FunctionOracle& v, double lo,
                                  double hi) {
    const int n = K.order();
    const std::size_t dims = static_cast<std::size_t>(n) + 2;  // x, u..u^(n)
    std::vector<double> box_lo(dims, 0.0), box_hi(dims, 0.0);
    box_lo[0] = lo;
    box_hi[0] = hi;
    bool first = true;
    for (double x : interior_grid(lo, hi, 64)) {
        const Jet ju = u.jet(x, n);
        const Jet jv = v.jet(x, n);
        for (int k = 0; k <= n; ++k) {
            const double a = std::min(ju[k], jv[k]);
            const double b = std::max(ju[k], jv[k]);
            if (first) {
                box_lo[k + 1] = a;
                box_hi[k + 1] = b;
            } else {
                box_lo[k + 1] = std::min(box_lo[k + 1], a);
                box_hi[k + 1] = std::max(box_hi[k + 1], b);
            }
        }
        first = false;
    }
    for (std::size_t d = 1; d < dims; ++d) {
        const double pad = 0.1 * (box_hi[d] - box_lo[d]) + 1e-3;
        box_lo[d] -= pad;
        box_hi[d] += pad;
    }

    const auto eval = [&](const std::vector<double>& p) {
        std::map<std::string, double> b;
        b["x"] = p[0];
        b["z1"] = p[0];
        for (int k = 0; k <= n; ++k) b[slot_name(k + 2)] = p[k + 1];
        return K.expression().eval_value(b);
    };

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto draw = [&](std::vector<double>& p) {
        for (std::size_t d = 0; d < dims; ++d)
            p[d] = box_lo[d] + unit(rng) * (box_hi[d] - box_lo[d]);
    };

    double ratio = 0.0;
    std::vector<double> p(dims), q(dims);
    for (int trial = 0; trial < 2000; ++trial) {
        draw(p);
        q = p;
        if (trial % 2 == 0) {
            draw(q);
        } else {
            // close pair, to catch steep local variation
            for (std::size_t d = 0; d < dims; ++d)
                q[d] += (unit(rng) - 0.5) * 1e-6 * (box_hi[d] - box_lo[d] + 1.0);
        }
        double dist = 0.0;
        for (std::size_t d = 0; d < dims; ++d)
            dist = std::max(dist, std::abs(p[d] - q[d]));
        if (dist == 0.0) continue;
        const double r = std::abs(eval(p) - eval(q)) / dist;
        if (std::isfinite(r)) ratio = std::max(ratio, r);
    }
    return ratio;
}

}  // namespace

SignPatternReport compare_contact(const NonlinearOperator& K, OraclePtr u,
                                  OraclePtr v, double x0, double h,
                                  ContactTolerances tol) {
    if (!u || !v) throw ArgumentError("compare_contact needs both functions");
    const int n = K.order();
    const double lo = std::max(u->lo(), v->lo());
    const double hi = std::min(u->hi(), v->hi());
    if (!(lo < hi))
        throw ArgumentError("the two functions share no interval");
    if (!(x0 > lo && x0 < hi))
        throw ArgumentError("contact point must be interior to the shared interval");
    if (u->max_order() < n || v->max_order() < n)
        throw CapabilityError("both functions must serve order-" +
                              std::to_string(n) + " jets");
    if (!(h >= 0.0) || !std::isfinite(h))
        throw ArgumentError("grid step must be a finite nonnegative number");
    if (tol.grid < 2) throw ArgumentError("inequality grid needs >= 2 cells");

    SignPatternReport out;
    out.parity = n % 2;
    out.left_relation = (n % 2 == 1) ? "u >= v" : "u <= v";
    out.right_relation = "u <= v";

    VerdictReport& rep = out.report;
    rep.checker = "compare_contact";

    // K[u] <= K[v] sampled over the shared interval
    int cells = tol.grid;
    if (h > 0.0)
        cells = std::max(2, static_cast<int>(std::llround((hi - lo) / h)));
    double worst = -std::numeric_limits<double>::infinity();
    double worst_x = lo;
    double magnitude = 0.0;
    for (double x : interior_grid(lo, hi, cells)) {
        const double ku = K.apply(*u, x);
        const double kv = K.apply(*v, x);
        magnitude = std::max({magnitude, std::abs(ku), std::abs(kv)});
        if (ku - kv > worst) {
            worst = ku - kv;
            worst_x = x;
        }
    }
    const double scale = 1.0 + magnitude;
    {
        CheckItem item = (worst <= tol.ineq * scale)
                             ? CheckItem::ok("operator inequality K[u] <= K[v]",
                                             worst, worst_x)
                             : CheckItem::fail("operator inequality K[u] <= K[v]",
                                               worst, worst_x);
        item.note = "max K[u] - K[v] over " + std::to_string(cells) +
                    " cells, scale " + format_number(scale);
        rep.hypotheses.push_back(std::move(item));
    }

    // contact: w = u - v flat through order n-1 at x0
    const Jet ju = u->jet(x0, n);
    const Jet jv = v->jet(x0, n);
    double worst_jet = 0.0;
    std::string jet_note = "w-jet at the contact:";
    for (int k = 0; k < n; ++k) {
        const double wk = ju[k] - jv[k];
        worst_jet = std::max(worst_jet, std::abs(wk));
        jet_note += " " + format_number(wk);
    }
    {
        const std::string name =
            "contact: zero jet of u - v through order " + std::to_string(n - 1);
        CheckItem item = (worst_jet <= tol.zero)
                             ? CheckItem::ok(name, worst_jet, x0)
                             : CheckItem::fail(name, worst_jet, x0);
        item.note = jet_note;
        rep.hypotheses.push_back(std::move(item));
    }

    // linearization along the segment; throws on a monotonicity violation
    Linearization lin = linearize(K, *u, *v, x0);
    out.c = lin.c;
    {
        CheckItem item = CheckItem::ok("c_n at the contact", lin.c.back(), x0);
        std::string cs = "c_0..c_n:";
        for (double ci : lin.c) cs += " " + format_number(ci);
        item.note = cs + "; 16-node Gauss-Legendre";
        rep.trace.push_back(std::move(item));
    }

    OraclePtr w = make_combination_oracle({1.0, -1.0}, {u, v});

    // consistency of the linearization: sum c_i w^(i) against K[u] - K[v]
    {
        double residual = 0.0;
        double residual_x = lo;
        for (double x : interior_grid(lo, hi, 32)) {
            const Linearization at = linearize(K, *u, *v, x);
            const Jet jw = w->jet(x, n);
            double combo = 0.0;
            for (int i = 0; i <= n; ++i) combo += at.c[i] * jw[i];
            const double diff = K.apply(*u, x) - K.apply(*v, x);
            const double r = std::abs(combo - diff) / (1.0 + std::abs(diff));
            if (r > residual) {
                residual = r;
                residual_x = x;
            }
        }
        CheckItem item = (residual <= 1e-8)
                             ? CheckItem::ok("fundamental theorem residual",
                                             residual, residual_x)
                             : CheckItem::fail("fundamental theorem residual",
                                               residual, residual_x);
        item.note = "sum c_i w^(i) vs K[u] - K[v], relative, 32 cells";
        rep.trace.push_back(std::move(item));
    }

    {
        const double lip = sampled_lipschitz_constant(K, *u, *v, lo, hi);
        CheckItem item = CheckItem::ok("sampled lipschitz constant of K", lip);
        item.pass = std::isfinite(lip);
        item.note = "max slope over random pairs in the padded jet box";
        rep.trace.push_back(std::move(item));
    }

    // parity sign pattern on dyadic neighborhoods; the doubled span makes
    // the first rung the full one-sided span, so delta can reach it
    OraclePtr w = make_combination_oracle({1.0, -1.0}, {u, v});
    const double left_sign = (n % 2 == 1) ? +1.0 : -1.0;
    const RadiusScan left = detect_sign_radius(*w, x0, Side::Right, left_sign,
                                               2.0 * (x0 - lo), -tol.zero);
    const RadiusScan right = detect_sign_radius(*w, x0, Side::Left, -1.0,
                                                2.0 * (hi - x0), -tol.zero);
    {
        const std::string name = "left of x0: " + out.left_relation;
        CheckItem item = left.found
                             ? CheckItem::ok(name, left.min_value, left.worst_x)
                             : CheckItem::fail(name, left.min_value, left.worst_x);
        if (left.found)
            item.note = "holds on radius " + format_number(left.radius);
        else
            item.note = "no dyadic radius holds the relation";
        rep.conclusions.push_back(std::move(item));
    }
    {
        const std::string name = "right of x0: " + out.right_relation;
        CheckItem item = right.found
                             ? CheckItem::ok(name, right.min_value, right.worst_x)
                             : CheckItem::fail(name, right.min_value, right.worst_x);
        if (right.found)
            item.note = "holds on radius " + format_number(right.radius);
        else
            item.note = "no dyadic radius holds the relation";
        rep.conclusions.push_back(std::move(item));
    }

    if (left.found && right.found) {
        out.delta = std::min(left.radius, right.radius);
        out.induced = induced_operator(K, u, v, x0 - out.delta, x0 + out.delta);
        CheckItem item = CheckItem::ok("detected delta", out.delta);
        item.note = "largest symmetric dyadic radius; induced operator built "
                    "on this window";
        rep.trace.push_back(std::move(item));
    }

    rep.finalize();
    return out;
}

LinearOperator induced_operator(const NonlinearOperator& K, OraclePtr u,
                                OraclePtr v, double lo, double hi,
                                int bound_grid) {
    if (!u || !v) throw ArgumentError("induced operator needs both functions");
    if (!(lo < hi)) throw ArgumentError("induced operator needs lo < hi");
    const int n = K.order();
    std::vector<OraclePtr> coeffs;
    coeffs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        // each lambda owns its inputs; division by c_n is safe because
        // linearize has already rejected a nonpositive top partial
        auto fn = [K, u, v, i](double x, int order) {
            const Linearization at = linearize(K, *u, *v, x);
            return Jet::constant(x, order, at.c[i] / at.c.back());
        };
        coeffs.push_back(make_lambda_oracle(
            fn, lo, hi, 0, "c_" + std::to_string(i) + "(x) / c_n(x)"));
    }
    return LinearOperator(n, std::move(coeffs), lo, hi, bound_grid);
}

}  // namespace hopfkit
