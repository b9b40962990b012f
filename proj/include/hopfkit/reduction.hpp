#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "hopfkit/odeint.hpp"
#include "hopfkit/operator.hpp"
#include "hopfkit/oracle.hpp"

namespace hopfkit {

// Substituting v = f u + u' turns an order-(k+1) operator with coefficients
// a_0..a_k into an order-k operator with coefficients b_0..b_{k-1}, provided
// the b's solve the coefficient-matching system. The first k equations solve
// explicitly by the downward recurrence
//
//   b_{j-1} = a_j - C(k,j) f^(k-j) - sum_{m=j..k-1} b_m C(m,j) f^(m-j)
//
// for j = k down to 1; the leftover equation is the ODE f must satisfy.
// a_values holds a_1..a_k (a_0 enters only that ODE); f_jet must carry f
// through f^(k-1). Returns b_0..b_{k-1} by subscript.
std::vector<double> b_from_f(std::span<const double> a_values, const Jet& f_jet,
                             int k);

// Same recurrence in jet arithmetic: a_jets (a_1..a_k) at a common order q,
// f_jet at order >= k-1+q; the b jets come back at order q.
std::vector<Jet> b_from_f(std::span<const Jet> a_jets, const Jet& f_jet, int k);

// One reduction: an order-(k+1) operator on [a, b] down to order k on the
// span where the f-equation's solution survives.
struct ReductionStep {
    LinearOperator source;          // order k+1
    TrajectoryPtr f_traj;           // states f .. f^(k-1), closed by f^(k)
    OraclePtr f;                    // oracle view of f_traj
    std::vector<OraclePtr> b_coeffs;  // b_0..b_{k-1} on the surviving span
    LinearOperator reduced;         // order k on [a, f_traj->b()]
};

// Integrates the f-equation f^(k) = a_0 - sum b_m(f-state) f^(m) from
// f(a) = 1, f'(a) = ... = f^(k-1)(a) = 0 across the source interval,
// truncating at blow-up. Throws ReductionError when the source has order
// < 3 or fewer than 8 steps survive.
ReductionStep solve_f_ode(const LinearOperator& source, double h = 0.0);

// v = f u + u', able to serve jets to the given order (which needs
// order+1 jets of u and order jets of f; CapabilityError otherwise).
OraclePtr push_v(const OraclePtr& u, const OraclePtr& f, int order);

struct IdentityCheck {
    double max_residual;  // max |L[u] - M[v]| / (1 + |L[u]|)
    double argmax_x;
    std::size_t probe;    // index of the probe attaining the max
    bool pass;            // max_residual <= tol
};

// Checks the defining identity L[u](x) = M[v](x) of a reduction step
// against a list of probe functions on an interior grid of the surviving
// span. Probes must serve jets of the source order.
IdentityCheck verify_reduction_identity(const ReductionStep& step,
                                        std::span<const OraclePtr> probes,
                                        int grid_count = 256,
                                        double tol = 1e-6);

struct ChainStage {
    ReductionStep step;
    OraclePtr v;              // unknown of the reduced problem
    EndpointCheck v_zero;     // v(a) .. v^(k-2)(a) against zero; top = v^(k-1)(a)
    SequenceScan transfer;    // positivity of v on the dyadic ladder at a
};

struct ReductionChain {
    std::vector<ChainStage> stages;  // orders n, n-1, ..., 3
    OraclePtr final_v;               // unknown of the terminal order-2 problem

    const LinearOperator& final_op() const { return stages.back().step.reduced; }
};

// Runs reductions until order 2, rebasing the unknown at every stage and
// recording the zero-endpoint checks and the positivity-transfer scan that
// the induction argument needs. Spans shrink monotonically as f-equations
// truncate; a span below 16 steps aborts with ReductionError.
ReductionChain reduce_chain(const LinearOperator& op, const OraclePtr& u,
                            double h = 0.0, double zero_tol = 1e-8);

}  // namespace hopfkit
