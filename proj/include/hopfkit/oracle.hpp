#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "hopfkit/expr.hpp"
#include "hopfkit/jet.hpp"

namespace hopfkit {

// A function of x on an interval, queryable for jets up to some order.
// Implementations: expression-backed, trajectory-backed (odeint module),
// and the combinators below. All implementations are immutable after
// construction and safe to query concurrently.
class FunctionOracle {
public:
    virtual ~FunctionOracle() = default;

    // Jet of the function at x carried to the given order. Throws
    // CapabilityError for x outside [lo, hi] or order beyond max_order();
    // domain errors from the underlying arithmetic propagate.
    virtual Jet jet(double x, int order) const = 0;

    virtual double lo() const = 0;
    virtual double hi() const = 0;
    virtual int max_order() const = 0;

    // One line for reports, e.g. the source expression.
    virtual std::string describe() const = 0;

    // True when values come from a numerically integrated trajectory
    // (derivative orders above the ODE order are not available).
    virtual bool trajectory_backed() const { return false; }

    double value(double x) const { return jet(x, 0).value(); }
    double deriv(double x, int k) const { return jet(x, k)[k]; }

protected:
    // Shared precondition check for implementations.
    void require(double x, int order) const;
};

using OraclePtr = std::shared_ptr<const FunctionOracle>;

// Univariate expression in x. The expression may reference only x.
OraclePtr make_expr_oracle(const Expr& e, double lo, double hi);
OraclePtr make_expr_oracle(const std::string& source, double lo, double hi);

// Constant function on the whole line.
OraclePtr make_constant_oracle(double c);

// g(x) = f(2*mirror - x), optionally negated. Derivatives pick up (-1)^k.
// Domain maps to [2*mirror - f.hi, 2*mirror - f.lo].
OraclePtr make_reflected_oracle(OraclePtr f, double mirror, bool negate);

// sum_i c_i * f_i on the intersection of domains.
OraclePtr make_combination_oracle(std::vector<double> coeffs,
                                  std::vector<OraclePtr> terms);

// num / den; SingularityError where den vanishes.
OraclePtr make_quotient_oracle(OraclePtr num, OraclePtr den);

// num * den pointwise product.
OraclePtr make_product_oracle(OraclePtr f, OraclePtr g);

// Derivative function f'; one jet order shallower than f.
OraclePtr make_derivative_oracle(OraclePtr f);

// x < split serves from left, x >= split from right.
OraclePtr make_piecewise_oracle(OraclePtr left, OraclePtr right, double split);

// Escape hatch for closed-form jets that are not expressions (derived
// coefficients, special functions with branch logic).
OraclePtr make_lambda_oracle(std::function<Jet(double, int)> fn, double lo,
                             double hi, int max_order, std::string description);

}  // namespace hopfkit
