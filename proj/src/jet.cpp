#include "hopfkit/jet.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

namespace hopfkit {

namespace {

struct PascalTable {
    double c[kMaxJetOrder + 1][kMaxJetOrder + 1];
    PascalTable() {
        for (int n = 0; n <= kMaxJetOrder; ++n) {
            c[n][0] = 1.0;
            for (int k = 1; k <= n; ++k)
                c[n][k] = (k == n) ? 1.0 : c[n - 1][k - 1] + c[n - 1][k];
            for (int k = n + 1; k <= kMaxJetOrder; ++k) c[n][k] = 0.0;
        }
    }
};

const PascalTable kPascal;

// k! for k <= 12; 12! = 479001600 is exact in double.
struct FactorialTable {
    double f[kMaxJetOrder + 1];
    FactorialTable() {
        f[0] = 1.0;
        for (int k = 1; k <= kMaxJetOrder; ++k) f[k] = f[k - 1] * k;
    }
};

const FactorialTable kFactorial;

void check_order(int order) {
    if (order < 0 || order > kMaxJetOrder)
        throw ArgumentError("jet order " + std::to_string(order) +
                            " outside [0, " + std::to_string(kMaxJetOrder) + "]");
}

// Same-point check with slack: points reached by different arithmetic
// (e.g. reflection 2b - x) may differ in the last few ulps.
void check_compatible(const Jet& a, const Jet& b) {
    if (a.order() != b.order())
        throw ArgumentError("jet order mismatch: " + std::to_string(a.order()) +
                            " vs " + std::to_string(b.order()));
    const double scale = std::max({1.0, std::fabs(a.point()), std::fabs(b.point())});
    if (std::fabs(a.point() - b.point()) > 1e-9 * scale)
        throw ArgumentError("jet point mismatch");
}

// Derivative values -> Taylor coefficients (divide by k!) and back.
void to_taylor(const Jet& a, double* c) {
    for (int k = 0; k <= a.order(); ++k) c[k] = a[k] / kFactorial.f[k];
}

Jet from_taylor(double point, int order, const double* c) {
    Jet r(point, order);
    for (int k = 0; k <= order; ++k) r[k] = c[k] * kFactorial.f[k];
    return r;
}

bool is_small_integer(double r) {
    return std::rint(r) == r && std::fabs(r) <= 100.0;
}

// Integer power by repeated squaring; works at any base value.
Jet ipow(Jet base, long n) {
    Jet acc = Jet::constant(base.point(), base.order(), 1.0);
    while (n > 0) {
        if (n & 1) acc = acc * base;
        n >>= 1;
        if (n) base = base * base;
    }
    return acc;
}

}  // namespace

double binom(int n, int k) {
    if (n < 0 || n > kMaxJetOrder || k < 0 || k > n) return 0.0;
    return kPascal.c[n][k];
}

Jet::Jet(double point, int order) : point_(point), order_(order) {
    check_order(order);
    d_.fill(0.0);
}

Jet::Jet(double point, int order, std::span<const double> derivs)
    : point_(point), order_(order) {
    check_order(order);
    if (derivs.size() != static_cast<std::size_t>(order) + 1)
        throw ArgumentError("jet initializer size " + std::to_string(derivs.size()) +
                            " does not match order " + std::to_string(order));
    d_.fill(0.0);
    for (int k = 0; k <= order; ++k) d_[k] = derivs[k];
}

Jet Jet::constant(double point, int order, double c) {
    Jet r(point, order);
    r.d_[0] = c;
    return r;
}

Jet Jet::variable(double point, int order) {
    Jet r(point, order);
    r.d_[0] = point;
    if (order >= 1) r.d_[1] = 1.0;
    return r;
}

double Jet::operator[](int k) const {
    if (k < 0 || k > order_)
        throw ArgumentError("derivative index " + std::to_string(k) +
                            " outside jet order " + std::to_string(order_));
    return d_[k];
}

double& Jet::operator[](int k) {
    if (k < 0 || k > order_)
        throw ArgumentError("derivative index " + std::to_string(k) +
                            " outside jet order " + std::to_string(order_));
    return d_[k];
}

std::string Jet::str() const {
    std::string s = "jet(x=";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", point_);
    s += buf;
    s += ", [";
    for (int k = 0; k <= order_; ++k) {
        std::snprintf(buf, sizeof buf, "%.17g", d_[k]);
        s += buf;
        if (k < order_) s += ", ";
    }
    s += "])";
    return s;
}

Jet operator+(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r(a.point(), a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] + b[k];
    return r;
}

Jet operator-(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r(a.point(), a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] - b[k];
    return r;
}

Jet operator-(const Jet& a) {
    Jet r(a.point(), a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = -a[k];
    return r;
}

Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    Jet r(a.point(), a.order());
    // (fg)^(k) = sum_j C(k,j) f^(j) g^(k-j)
    for (int k = 0; k <= a.order(); ++k) {
        double s = 0.0;
        for (int j = 0; j <= k; ++j) s += binom(k, j) * a[j] * b[k - j];
        r[k] = s;
    }
    return r;
}

Jet operator/(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    if (b.value() == 0.0) throw SingularityError("jet division by zero value");
    Jet q(a.point(), a.order());
    // Solve a^(k) = sum_j C(k,j) q^(j) b^(k-j) for q^(k), top term j = k.
    for (int k = 0; k <= a.order(); ++k) {
        double s = a[k];
        for (int j = 0; j < k; ++j) s -= binom(k, j) * q[j] * b[k - j];
        q[k] = s / b.value();
    }
    return q;
}

Jet operator+(const Jet& a, double c) {
    Jet r = a;
    r[0] += c;
    return r;
}
Jet operator+(double c, const Jet& a) { return a + c; }
Jet operator-(const Jet& a, double c) { return a + (-c); }
Jet operator-(double c, const Jet& a) { return (-a) + c; }

Jet operator*(const Jet& a, double c) {
    Jet r(a.point(), a.order());
    for (int k = 0; k <= a.order(); ++k) r[k] = a[k] * c;
    return r;
}
Jet operator*(double c, const Jet& a) { return a * c; }
Jet operator/(const Jet& a, double c) {
    if (c == 0.0) throw SingularityError("jet division by zero scalar");
    return a * (1.0 / c);
}
Jet operator/(double c, const Jet& a) {
    return Jet::constant(a.point(), a.order(), c) / a;
}

Jet jet_exp(const Jet& a) {
    const int m = a.order();
    double ac[kMaxJetOrder + 1], ec[kMaxJetOrder + 1];
    to_taylor(a, ac);
    ec[0] = std::exp(ac[0]);
    // e' = a' e  =>  k e_k = sum_{j=1..k} j a_j e_{k-j}
    for (int k = 1; k <= m; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += j * ac[j] * ec[k - j];
        ec[k] = s / k;
    }
    return from_taylor(a.point(), m, ec);
}

namespace {
// sin and cos propagate as a coupled pair: s' = a' c, c' = -a' s.
void sincos_taylor(const Jet& a, double* sc, double* cc) {
    const int m = a.order();
    double ac[kMaxJetOrder + 1];
    to_taylor(a, ac);
    sc[0] = std::sin(ac[0]);
    cc[0] = std::cos(ac[0]);
    for (int k = 1; k <= m; ++k) {
        double ss = 0.0, cs = 0.0;
        for (int j = 1; j <= k; ++j) {
            ss += j * ac[j] * cc[k - j];
            cs += j * ac[j] * sc[k - j];
        }
        sc[k] = ss / k;
        cc[k] = -cs / k;
    }
}
}  // namespace

Jet jet_sin(const Jet& a) {
    double sc[kMaxJetOrder + 1], cc[kMaxJetOrder + 1];
    sincos_taylor(a, sc, cc);
    return from_taylor(a.point(), a.order(), sc);
}

Jet jet_cos(const Jet& a) {
    double sc[kMaxJetOrder + 1], cc[kMaxJetOrder + 1];
    sincos_taylor(a, sc, cc);
    return from_taylor(a.point(), a.order(), cc);
}

Jet jet_log(const Jet& a) {
    if (!(a.value() > 0.0))
        throw DomainError("log of nonpositive value " + std::to_string(a.value()));
    const int m = a.order();
    double ac[kMaxJetOrder + 1], lc[kMaxJetOrder + 1];
    to_taylor(a, ac);
    lc[0] = std::log(ac[0]);
    // a l' = a'  =>  k a_0 l_k = k a_k - sum_{j=1..k-1} j l_j a_{k-j}
    for (int k = 1; k <= m; ++k) {
        double s = k * ac[k];
        for (int j = 1; j < k; ++j) s -= j * lc[j] * ac[k - j];
        lc[k] = s / (k * ac[0]);
    }
    return from_taylor(a.point(), m, lc);
}

Jet jet_abs(const Jet& a) {
    if (a.value() > 0.0) return a;
    if (a.value() < 0.0) return -a;
    if (a.order() == 0) return Jet::constant(a.point(), 0, 0.0);
    throw NonDifferentiableError("abs is not differentiable at value 0");
}

Jet jet_pow(const Jet& a, double r) {
    const int m = a.order();
    if (is_small_integer(r)) {
        const long n = static_cast<long>(std::rint(r));
        if (n >= 0) return ipow(a, n);
        if (a.value() == 0.0)
            throw SingularityError("negative power of zero value");
        return Jet::constant(a.point(), m, 1.0) / ipow(a, -n);
    }
    if (a.value() == 0.0) {
        if (m == 0 && r > 0.0) return Jet::constant(a.point(), 0, 0.0);
        throw NonDifferentiableError(
            "fractional power is not differentiable at value 0");
    }
    if (a.value() < 0.0)
        throw DomainError("fractional power of negative value " +
                          std::to_string(a.value()));
    double ac[kMaxJetOrder + 1], pc[kMaxJetOrder + 1];
    to_taylor(a, ac);
    pc[0] = std::pow(ac[0], r);
    // a p' = r p a'  =>  k a_0 p_k = sum_{j=1..k} ((r+1) j - k) a_j p_{k-j}
    for (int k = 1; k <= m; ++k) {
        double s = 0.0;
        for (int j = 1; j <= k; ++j) s += ((r + 1.0) * j - k) * ac[j] * pc[k - j];
        pc[k] = s / (k * ac[0]);
    }
    return from_taylor(a.point(), m, pc);
}

Jet truncated(const Jet& a, int order) {
    if (order < 0 || order > a.order())
        throw ArgumentError("truncation order " + std::to_string(order) +
                            " outside [0, " + std::to_string(a.order()) + "]");
    Jet r(a.point(), order);
    for (int k = 0; k <= order; ++k) r[k] = a[k];
    return r;
}

Jet derivative_shift(const Jet& a) {
    if (a.order() < 1)
        throw ArgumentError("cannot take the derivative of an order-0 jet");
    Jet r(a.point(), a.order() - 1);
    for (int k = 0; k < a.order(); ++k) r[k] = a[k + 1];
    return r;
}

}  // namespace hopfkit
