#include "hopfkit/barriers.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "hopfkit/errors.hpp"

namespace hopfkit {
namespace {

// Shortest round-trip literal, so the stored expression evaluates to the
// exact double the construction computed.
std::string lit(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw ArgumentError("unformattable parameter value");
    return std::string(buf, end);
}

void check_common(double C) {
    if (!(C > 0.0) || !std::isfinite(C))
        throw ArgumentError("barrier bound C must be positive and finite");
}

double positive_quadratic_root(double b, double c) {
    // Larger root of t^2 - b t - c with b, c > 0.
    return 0.5 * (b + std::sqrt(b * b + 4.0 * c));
}

BarrierCertificate certify_positivity(const FunctionOracle& f, int grid) {
    if (grid < 2) throw ArgumentError("certificate grid needs at least 2 points");
    double margin = std::numeric_limits<double>::infinity();
    for (double x : interior_grid(f.lo(), f.hi(), grid))
        margin = std::min(margin, f.value(x));
    if (!(margin > 0.0))
        throw ArgumentError("barrier failed its own positivity certificate");
    return BarrierCertificate{grid, margin};
}

CertifiedBarrier make_small_interval_h(double C, double a, int grid) {
    // Want gamma^2 - C gamma - 2C > 0, then any delta < ln(3)/gamma keeps
    // e^(gamma delta) - 1 < 2, which is what defeats the zeroth-order term.
    double gamma = positive_quadratic_root(C, 2.0 * C) + 1.0;
    double delta = 0.9 * std::log(3.0) / gamma;
    double slack = gamma * gamma - C * gamma - 2.0 * C;

    std::string src = "exp(" + lit(gamma * delta) + ") - exp(" + lit(gamma) +
                      "*(x - " + lit(a) + "))";
    auto oracle = make_expr_oracle(src, a, a + delta);

    CertifiedBarrier b;
    b.kind = BarrierKind::SmallIntervalH;
    b.params = {{"C", C}, {"gamma", gamma}, {"delta", delta}, {"slack", slack}};
    b.oracle = oracle;
    b.certificate = certify_positivity(*oracle, grid);
    return b;
}

CertifiedBarrier make_exp_subsolution(double C, double a, double bb, int grid) {
    if (!(bb > a)) throw ArgumentError("exp subsolution needs b > a");
    // lambda^2 - C lambda - C > 0 makes e^(lambda (x-a)) - 1 a strict
    // subsolution whatever the coefficients do below the bound.
    double lambda = positive_quadratic_root(C, C) + 1.0;
    double slack = lambda * lambda - C * lambda - C;

    std::string src = "exp(" + lit(lambda) + "*(x - " + lit(a) + ")) - 1";
    auto oracle = make_expr_oracle(src, a, bb);

    CertifiedBarrier b;
    b.kind = BarrierKind::ExpSubsolution;
    b.params = {{"C", C}, {"lambda", lambda}, {"slack", slack}};
    b.oracle = oracle;
    b.certificate = certify_positivity(*oracle, grid);
    return b;
}

CertifiedBarrier make_third_order_m(double C, double a, double bb, int grid) {
    if (!(bb > a)) throw ArgumentError("third order barrier needs b > a");
    double span = bb - a;
    // theta^3 - C theta^2 - (1 + b - a) C theta > 0; the cubic factors, so
    // take the quadratic's positive root plus one.
    double theta = positive_quadratic_root(C, (1.0 + span) * C) + 1.0;
    double slack_theta =
        theta * theta * theta - C * theta * theta - (1.0 + span) * C * theta;

    // eta must keep e^(2 theta eta) - 1 below theta (b - a); prefer the
    // fixed ceiling ln(4)/(2 theta) when it already fits.
    double eta = 0.9 * std::log(4.0) / (2.0 * theta);
    if (std::expm1(2.0 * theta * eta) >= theta * span)
        eta = 0.9 * std::log1p(theta * span) / (2.0 * theta);
    double slack_eta = theta * span - std::expm1(2.0 * theta * eta);

    std::string src = "exp(" + lit(theta * eta) + ") - exp(-" + lit(theta) +
                      "*(x - " + lit(a) + "))";
    auto oracle = make_expr_oracle(src, a, a + eta);

    CertifiedBarrier b;
    b.kind = BarrierKind::ThirdOrderM;
    b.params = {{"C", C},
                {"theta", theta},
                {"eta", eta},
                {"slack", slack_theta},
                {"slack_eta", slack_eta}};
    b.oracle = oracle;
    b.certificate = certify_positivity(*oracle, grid);
    return b;
}

CertifiedBarrier make_sine_hi(double C, double a, double x_i, int grid) {
    if (!(x_i > a)) throw ArgumentError("sine barrier needs x_i > a");
    double w = x_i - a;
    double y_i = 0.5 * (x_i + a);
    // The second-derivative term wins when (pi/9 / w)^2 sin(7 pi/18)
    // exceeds C (pi/9 / w) + C, which pins how close x_i must sit to a.
    double s = (std::numbers::pi / 9.0) / w;
    double floor = std::sin(7.0 * std::numbers::pi / 18.0);
    double slack = s * s * floor - C * s - C;
    if (!(slack > 0.0))
        throw ArgumentError("sine barrier point x_i is too far from a for this bound");

    std::string src = "sin(pi/2 + pi/9*(x - " + lit(y_i) + ")/" + lit(w) + ")";
    auto oracle = make_expr_oracle(src, a, x_i);

    CertifiedBarrier b;
    b.kind = BarrierKind::SineHi;
    b.params = {{"C", C},
                {"x_i", x_i},
                {"y_i", y_i},
                {"floor", floor},
                {"slack", slack}};
    b.oracle = oracle;
    b.certificate = certify_positivity(*oracle, grid);
    return b;
}

int required_operator_order(BarrierKind kind) {
    return kind == BarrierKind::ThirdOrderM ? 3 : 2;
}

double required_operator_sign(BarrierKind kind) {
    switch (kind) {
        case BarrierKind::SmallIntervalH:
        case BarrierKind::SineHi:
            return -1.0;  // strict supersolutions
        case BarrierKind::ExpSubsolution:
        case BarrierKind::ThirdOrderM:
            return +1.0;  // strict subsolutions
    }
    throw ArgumentError("unknown barrier kind");
}

}  // namespace

std::string to_string(BarrierKind kind) {
    switch (kind) {
        case BarrierKind::SmallIntervalH: return "small_interval_h";
        case BarrierKind::ExpSubsolution: return "exp_subsolution";
        case BarrierKind::ThirdOrderM: return "third_order_m";
        case BarrierKind::SineHi: return "sine_hi";
    }
    throw ArgumentError("unknown barrier kind");
}

double CertifiedBarrier::param(std::string_view name) const {
    for (const auto& p : params)
        if (p.name == name) return p.value;
    throw ArgumentError("barrier has no parameter named '" + std::string(name) + "'");
}

CertifiedBarrier make_barrier(BarrierKind kind, double C,
                              const BarrierGeometry& geometry, int grid) {
    check_common(C);
    switch (kind) {
        case BarrierKind::SmallIntervalH:
            return make_small_interval_h(C, geometry.a, grid);
        case BarrierKind::ExpSubsolution:
            return make_exp_subsolution(C, geometry.a, geometry.b, grid);
        case BarrierKind::ThirdOrderM:
            return make_third_order_m(C, geometry.a, geometry.b, grid);
        case BarrierKind::SineHi:
            return make_sine_hi(C, geometry.a, geometry.x_i, grid);
    }
    throw ArgumentError("unknown barrier kind");
}

SignCertificate certify_sign(const CertifiedBarrier& barrier,
                             const LinearOperator& op, int grid,
                             double min_margin) {
    if (grid < 2) throw ArgumentError("sign certificate grid needs at least 2 points");
    if (op.order() != required_operator_order(barrier.kind))
        throw ArgumentError("operator order " + std::to_string(op.order()) +
                            " does not fit a " + to_string(barrier.kind) +
                            " barrier");

    double lo = std::max(op.a(), barrier.oracle->lo());
    double hi = std::min(op.b(), barrier.oracle->hi());
    if (!(lo < hi))
        throw ArgumentError("operator interval does not overlap the barrier domain");

    SignCertificate cert;
    cert.required_sign = required_operator_sign(barrier.kind);
    cert.margin = std::numeric_limits<double>::infinity();
    cert.worst_x = lo;
    for (double x : interior_grid(lo, hi, grid)) {
        double v = cert.required_sign * apply_operator(op, *barrier.oracle, x);
        if (v < cert.margin) {
            cert.margin = v;
            cert.worst_x = x;
        }
    }
    cert.pass = cert.margin >= min_margin;
    return cert;
}

}  // namespace hopfkit
