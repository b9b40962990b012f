#include "hopfkit/operator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hopfkit {

LinearOperator::LinearOperator(int order, std::vector<OraclePtr> coeffs, double a,
                               double b, int bound_grid)
    : n_(order), coeffs_(std::move(coeffs)), a_(a), b_(b), bound_grid_(bound_grid) {
    if (n_ < 2) throw ArgumentError("operator order must be >= 2");
    if (!(a_ < b_)) throw ArgumentError("operator interval is degenerate");
    if (static_cast<int>(coeffs_.size()) != n_)
        throw ArgumentError("operator of order " + std::to_string(n_) + " needs " +
                            std::to_string(n_) + " coefficients, got " +
                            std::to_string(coeffs_.size()));
    if (bound_grid_ < 2) throw ArgumentError("bound sampling grid too small");
    for (const auto& c : coeffs_)
        if (!c) throw ArgumentError("null coefficient oracle");

    double m = 0.0;
    const double h = (b_ - a_) / (bound_grid_ - 1);
    for (int g = 0; g < bound_grid_; ++g) {
        const double x = (g == bound_grid_ - 1) ? b_ : a_ + g * h;
        for (const auto& c : coeffs_) m = std::max(m, std::fabs(c->value(x)));
    }
    if (!std::isfinite(m)) throw ArgumentError("coefficient bound is not finite");
    bound_ = m * (1.0 + 1e-6) + 1e-9;
}

const OraclePtr& LinearOperator::coeff(int i) const {
    if (i < 0 || i >= n_)
        throw ArgumentError("coefficient index " + std::to_string(i) +
                            " outside [0, " + std::to_string(n_ - 1) + "]");
    return coeffs_[i];
}

LinearOperator LinearOperator::reflected() const {
    std::vector<OraclePtr> rc;
    rc.reserve(coeffs_.size());
    for (int i = 0; i < n_; ++i) {
        // a_i(2b - x) picks up the sign the substitution x -> 2b - x puts
        // on the i-th derivative relative to the n-th: (-1)^(n-i).
        const bool negate = ((n_ - i) % 2) != 0;
        rc.push_back(make_reflected_oracle(coeffs_[i], b_, negate));
    }
    return LinearOperator(n_, std::move(rc), b_, 2.0 * b_ - a_, bound_grid_);
}

double apply_operator(const LinearOperator& op, const FunctionOracle& u, double x) {
    const int n = op.order();
    const Jet ju = u.jet(x, n);
    double s = ju[n];
    for (int i = 0; i < n; ++i) s += op.coeff_value(i, x) * ju[i];
    return s;
}

InequalityCheck verify_inequality(const LinearOperator& op, const FunctionOracle& u,
                                  std::span<const double> grid, double tol) {
    if (grid.empty()) throw ArgumentError("empty verification grid");
    double worst = -std::numeric_limits<double>::infinity();
    double worst_x = grid.front();
    double amax = 0.0;
    for (const double x : grid) {
        const double v = apply_operator(op, u, x);
        amax = std::max(amax, std::fabs(v));
        if (v > worst) {  // strict: first (smallest) x wins ties
            worst = v;
            worst_x = x;
        }
    }
    const double scale = 1.0 + amax;
    return {worst, worst_x, scale, worst <= tol * scale};
}

EndpointCheck endpoint_jet_check(const FunctionOracle& u, double endpoint, int n,
                                 double tol) {
    if (n < 2) throw ArgumentError("endpoint check needs order >= 2");
    const Jet j = u.jet(endpoint, n - 1);
    EndpointCheck r;
    r.values.resize(n);
    r.pass.resize(n - 1);
    r.all_pass = true;
    for (int k = 0; k <= n - 1; ++k) r.values[k] = j[k];
    for (int k = 0; k <= n - 2; ++k) {
        r.pass[k] = std::fabs(j[k]) <= tol;
        r.all_pass = r.all_pass && r.pass[k];
    }
    r.top = j[n - 1];
    return r;
}

SequenceScan detect_sequence_condition(const FunctionOracle& u, double endpoint,
                                       Side side, double sign, double span,
                                       double tol_pos, int j_max) {
    if (!(span > 0.0)) throw ArgumentError("sequence scan needs positive span");
    if (sign != 1.0 && sign != -1.0)
        throw ArgumentError("sequence sign must be +1 or -1");
    SequenceScan scan;
    scan.ladder.reserve(j_max);
    const double dir = (side == Side::Left) ? 1.0 : -1.0;
    for (int j = 1; j <= j_max; ++j) {
        const double offset = std::ldexp(span, -j);  // span * 2^-j
        const double x = endpoint + dir * offset;
        if (x == endpoint) break;  // offset underflowed the float grid
        double v;
        try {
            v = u.value(x);
        } catch (const Error&) {
            continue;  // point fell off the oracle's domain; deeper rungs won't
        }
        SequenceScan::Rung r;
        r.j = j;
        r.x = x;
        r.value = v;
        r.resolvable = std::fabs(v) > tol_pos;
        r.witness = sign * v > tol_pos;
        scan.ladder.push_back(r);
        if (r.resolvable) scan.deepest_resolved = j;
        if (r.witness) {
            scan.witness_x = x;
            if (!scan.shallow_witness) scan.shallow_witness = x;
        }
    }
    if (scan.deepest_resolved == 0) {
        scan.verdict = SeqVerdict::Undetermined;
        return scan;
    }
    // the deepest resolvable rung decides: witnesses must exist arbitrarily
    // close to the endpoint, and below this rung the scan is blind
    const auto deepest = std::find_if(scan.ladder.begin(), scan.ladder.end(),
                                      [&](const SequenceScan::Rung& r) {
                                          return r.j == scan.deepest_resolved;
                                      });
    scan.verdict = deepest->witness ? SeqVerdict::Pass : SeqVerdict::Fail;
    if (scan.verdict == SeqVerdict::Fail) {
        // witnesses shallower than the deciding rung are not evidence of
        // the limit behavior; drop them so reports do not mislead
        scan.witness_x.reset();
        scan.shallow_witness.reset();
    }
    return scan;
}

std::vector<double> interior_grid(double a, double b, int count) {
    if (!(b > a)) throw ArgumentError("degenerate grid interval");
    if (count < 1) throw ArgumentError("grid needs at least one point");
    std::vector<double> g(count);
    const double h = (b - a) / count;
    for (int i = 0; i < count; ++i) g[i] = a + (i + 0.5) * h;
    return g;
}

}  // namespace hopfkit
