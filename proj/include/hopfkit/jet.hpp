#pragma once

#include <array>
#include <span>
#include <string>

#include "hopfkit/errors.hpp"

namespace hopfkit {

// Highest derivative order a jet can carry. 12 keeps every factorial and
// binomial in the recurrences exactly representable and is far above the
// operator orders the checkers use.
inline constexpr int kMaxJetOrder = 12;

// C(n, k) from a precomputed Pascal table, n, k in [0, kMaxJetOrder].
double binom(int n, int k);

// Truncated jet of a scalar function at a point: stores the derivative
// values u(x), u'(x), ..., u^(m)(x) themselves, not Taylor coefficients.
// Value semantics, fixed-capacity storage.
class Jet {
public:
    Jet() : point_(0.0), order_(0) { d_.fill(0.0); }

    // Zero-filled jet of the given order.
    Jet(double point, int order);

    // Jet with explicit derivative values d[0..order].
    Jet(double point, int order, std::span<const double> derivs);

    // Jet of the constant function c: [c, 0, ..., 0].
    static Jet constant(double point, int order, double c);

    // Jet of the identity function at the point: [x, 1, 0, ..., 0].
    static Jet variable(double point, int order);

    double point() const noexcept { return point_; }
    int order() const noexcept { return order_; }
    double value() const noexcept { return d_[0]; }

    double operator[](int k) const;
    double& operator[](int k);

    // d[0..order], read-only.
    std::span<const double> derivs() const noexcept {
        return {d_.data(), static_cast<std::size_t>(order_) + 1};
    }

    std::string str() const;

private:
    double point_;
    int order_;
    std::array<double, kMaxJetOrder + 1> d_;
};

// Arithmetic; both operands must sit at the same point with the same order.
Jet operator+(const Jet& a, const Jet& b);
Jet operator-(const Jet& a, const Jet& b);
Jet operator-(const Jet& a);
Jet operator*(const Jet& a, const Jet& b);  // Leibniz rule
Jet operator/(const Jet& a, const Jet& b);  // throws SingularityError if b.value() == 0

Jet operator+(const Jet& a, double c);
Jet operator+(double c, const Jet& a);
Jet operator-(const Jet& a, double c);
Jet operator-(double c, const Jet& a);
Jet operator*(const Jet& a, double c);
Jet operator*(double c, const Jet& a);
Jet operator/(const Jet& a, double c);
Jet operator/(double c, const Jet& a);

// Elementary functions through the jet, exact derivative propagation via
// Taylor-coefficient recurrences.
Jet jet_exp(const Jet& a);
Jet jet_sin(const Jet& a);
Jet jet_cos(const Jet& a);
Jet jet_log(const Jet& a);  // DomainError unless a.value() > 0
Jet jet_abs(const Jet& a);  // NonDifferentiableError at 0 for order >= 1
// Real exponent. Integer exponents work at any base value (including 0);
// fractional exponents need a positive base, except value 0 at order 0 with
// r > 0 which is the plain limit 0.
Jet jet_pow(const Jet& a, double r);

// Copy of the jet lowered to the given order (order <= a.order()).
Jet truncated(const Jet& a, int order);

// Jet of the derivative function u' at the same point, one order lower.
// ArgumentError on an order-0 jet.
Jet derivative_shift(const Jet& a);

}  // namespace hopfkit
