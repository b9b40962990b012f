#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hopfkit/expr.hpp"
#include "hopfkit/operator.hpp"
#include "hopfkit/oracle.hpp"
#include "hopfkit/report.hpp"

namespace hopfkit {

// Nonlinear operator K(x, u, u', ..., u^(n)) supplied as an expression over
// x and the slots z1..z_{n+2}. Slot z1 rebinds the independent variable, z2
// carries u, and z_{k+2} carries u^(k). The top slot z_{n+2} is the monotone
// one: linearize demands a strictly positive partial there at every
// quadrature node.
class NonlinearOperator {
public:
    NonlinearOperator(int order, Expr source);
    NonlinearOperator(int order, const std::string& source);

    int order() const noexcept { return n_; }
    int monotone_slot() const noexcept { return n_ + 2; }
    const Expr& expression() const noexcept { return k_; }

    // True when the expression references z_{slot+2}, i.e. u^(slot).
    bool uses_slot(int slot) const;

    // K along the order-n jet of u at x.
    double apply(const FunctionOracle& u, double x) const;
    double apply(double x, const Jet& jet) const;

private:
    int n_;
    Expr k_;
    std::vector<bool> uses_;  // slot k <-> u^(k), k = 0..n
};

// Segment linearization at one x: c_i = integral over t in [0,1] of
// dK/dz_{i+2} along t*jet(u) + (1-t)*jet(v), by 16-node Gauss-Legendre.
// Partials come from a first-order dual perturbation of the slot binding,
// so they are exact for the implemented elementary functions.
struct Linearization {
    double x = 0.0;
    std::vector<double> c;  // c_0 .. c_n
};

// Throws MonotonicityError when the sampled dK/dz_{n+2} fails to be
// strictly positive at some quadrature node.
Linearization linearize(const NonlinearOperator& K, const FunctionOracle& u,
                        const FunctionOracle& v, double x);

struct ContactTolerances {
    double ineq = 1e-9;  // grid slack for K[u] <= K[v], relative
    double zero = 1e-8;  // contact jet tolerance and weak-sign floor
    int grid = 512;      // inequality grid resolution when no step is given
};

// Outcome of the contact comparison. The sign pattern is parity-dependent:
// w = u - v keeps the sign of w^(n) times (x - x0)^n near the contact, so
// an even order forces u <= v on both sides while an odd order forces
// u >= v on the left and u <= v on the right.
struct SignPatternReport {
    VerdictReport report;
    int parity = 0;              // order mod 2
    std::string left_relation;   // "u >= v" (odd) or "u <= v" (even)
    std::string right_relation;  // always "u <= v"
    double delta = 0.0;          // largest symmetric dyadic radius that holds
    std::vector<double> c;       // linearization at the contact point
    // Linear problem induced by the segment coefficients (c_i / c_n) on the
    // detected window, for cross-checking w with the linear checkers.
    std::optional<LinearOperator> induced;
};

// Verifies the contact comparison at an interior point x0: K[u] <= K[v] on
// the grid (step h, or tol.grid cells when h = 0), u - v flat through order
// n-1 at x0, then scans dyadic neighborhoods for the parity sign pattern.
// Throws MonotonicityError from the linearization.
SignPatternReport compare_contact(const NonlinearOperator& K, OraclePtr u,
                                  OraclePtr v, double x0, double h = 0.0,
                                  ContactTolerances tol = {});

// Coefficient-oracle view of the segment linearization on [lo, hi]:
// coefficient i of the result is c_i(x) / c_n(x). The construction samples
// the coefficients for the operator bound, so a monotonicity violation
// anywhere on the sampling grid surfaces here.
LinearOperator induced_operator(const NonlinearOperator& K, OraclePtr u,
                                OraclePtr v, double lo, double hi,
                                int bound_grid = 256);

}  // namespace hopfkit
