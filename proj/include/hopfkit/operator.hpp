#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hopfkit/oracle.hpp"

namespace hopfkit {

// u^(n) + a_{n-1} u^(n-1) + ... + a_1 u' + a_0 u on an interval (a, b),
// with a sampled coefficient bound C = sup |a_i| used by the barrier
// constructions. Immutable after construction.
class LinearOperator {
public:
    // coeffs[i] is a_i, i = 0..n-1. Requires n >= 2 (n = 1 has no Hopf
    // content) and a < b. The bound is the maximum of |a_i| over a uniform
    // sample, inflated by a hair to cover between-sample wiggle; barriers
    // only need *an* upper bound, so erring high is sound.
    LinearOperator(int order, std::vector<OraclePtr> coeffs, double a, double b,
                   int bound_grid = 4096);

    int order() const noexcept { return n_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    double span() const noexcept { return b_ - a_; }
    double bound() const noexcept { return bound_; }
    int bound_grid() const noexcept { return bound_grid_; }

    const OraclePtr& coeff(int i) const;
    double coeff_value(int i, double x) const { return coeff(i)->value(x); }

    // The operator with the same coefficient magnitudes viewed from the
    // other endpoint: coefficients a_i(2b - x) * (-1)^(n-i) on (b, 2b - a).
    // Composing a right-endpoint function check with this operator turns a
    // right-endpoint problem into a left-endpoint one.
    LinearOperator reflected() const;

private:
    int n_;
    std::vector<OraclePtr> coeffs_;
    double a_, b_;
    double bound_ = 0.0;
    int bound_grid_;
};

// L[u](x) evaluated through jets: exact derivative propagation, no FD.
double apply_operator(const LinearOperator& op, const FunctionOracle& u, double x);

struct InequalityCheck {
    double max_violation;  // max of L[u] over the grid (negative = satisfied)
    double worst_x;        // where the max is attained (smallest such x)
    double scale;          // 1 + max |L[u]| over the grid
    bool pass;             // max_violation <= tol * scale
};

// Verifies L[u] <= 0 on a grid inside (a, b).
InequalityCheck verify_inequality(const LinearOperator& op, const FunctionOracle& u,
                                  std::span<const double> grid, double tol);

struct EndpointCheck {
    std::vector<double> values;  // u(p), u'(p), ..., u^(n-1)(p)
    std::vector<bool> pass;      // |u^(k)(p)| <= tol for k = 0..n-2
    bool all_pass;
    double top;  // u^(n-1)(p), reported, not judged
};

// Zero-jet condition through order n-2 at an endpoint, one-sided.
EndpointCheck endpoint_jet_check(const FunctionOracle& u, double endpoint, int n,
                                 double tol);

enum class Side { Left, Right };

enum class SeqVerdict { Pass, Fail, Undetermined };

struct SequenceScan {
    struct Rung {
        int j;
        double x;
        double value;
        bool resolvable;  // |value| > tol_pos
        bool witness;     // sign * value > tol_pos
    };
    SeqVerdict verdict;
    std::vector<Rung> ladder;
    int deepest_resolved = 0;              // 0 when nothing resolved
    std::optional<double> witness_x;       // deepest witness rung
    std::optional<double> shallow_witness; // shallowest witness rung
};

// Finite surrogate for "a sequence x_i -> endpoint with sign*u(x_i) > 0":
// probes the dyadic ladder endpoint +/- span*2^-j for j = 1..j_max and lets
// the deepest rung with |u| above tol_pos decide. If no rung resolves, the
// scan is UNDETERMINED (distinct from FAIL: an identically tiny function is
// not evidence either way).
SequenceScan detect_sequence_condition(const FunctionOracle& u, double endpoint,
                                       Side side, double sign, double span,
                                       double tol_pos = 1e-10, int j_max = 40);

// count points strictly inside (a, b), offset by half a cell.
std::vector<double> interior_grid(double a, double b, int count);

}  // namespace hopfkit
