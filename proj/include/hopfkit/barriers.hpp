#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "hopfkit/operator.hpp"
#include "hopfkit/oracle.hpp"

namespace hopfkit {

// The four comparison functions the proofs lean on, with parameters picked
// deterministically: "sufficiently large" becomes the relevant root plus
// one, "sufficiently small" a factor of 0.9 off the allowed ceiling.
enum class BarrierKind {
    SmallIntervalH,  // h = e^(gamma delta) - e^(gamma (x-a)) on [a, a+delta]
    ExpSubsolution,  // e^(lambda (x-a)) - 1 on [a, b]
    ThirdOrderM,     // m = e^(theta eta) - e^(-theta (x-a)) on [a, a+eta]
    SineHi,          // h_i = sin(pi/2 + pi/9 (x-y_i)/(x_i-a)) on [a, x_i]
};

std::string to_string(BarrierKind kind);

// Interval data per kind: all use a; b is the operator interval's right
// end (ExpSubsolution, ThirdOrderM); x_i the sequence point (SineHi).
struct BarrierGeometry {
    double a = 0.0;
    double b = 0.0;
    double x_i = 0.0;
};

struct BarrierParameter {
    std::string name;
    double value;
};

// Sampled positivity of the barrier itself over its domain.
struct BarrierCertificate {
    int grid;       // sample count
    double margin;  // min barrier value seen; must be > 0
};

struct CertifiedBarrier {
    BarrierKind kind;
    std::vector<BarrierParameter> params;  // ordered for reports
    OraclePtr oracle;                      // expression-backed
    BarrierCertificate certificate;

    // Parameter lookup by name; ArgumentError when absent.
    double param(std::string_view name) const;
};

// Builds the barrier for a coefficient bound C > 0, picking parameters by
// the root-plus-one / times-0.9 rules and certifying positivity on an
// interior grid. Every recorded "slack" entry is strictly positive, or
// the construction refuses (for SineHi that means x_i is too far from a
// for this C). Degenerate geometry is an ArgumentError.
CertifiedBarrier make_barrier(BarrierKind kind, double C,
                              const BarrierGeometry& geometry,
                              int grid = 4096);

struct SignCertificate {
    double required_sign;  // +1: L[barrier] must be positive, -1: negative
    double margin;         // min of required_sign * L[barrier] on the grid
    double worst_x;
    bool pass;             // margin >= min_margin
};

// Samples L[barrier] on the overlap of the operator interval and the
// barrier domain and checks it keeps the sign the barrier's proof role
// demands. The operator order must match the kind (2 everywhere except
// ThirdOrderM's 3).
SignCertificate certify_sign(const CertifiedBarrier& barrier,
                             const LinearOperator& op, int grid = 4096,
                             double min_margin = 1e-10);

}  // namespace hopfkit
