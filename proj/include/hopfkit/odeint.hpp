#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "hopfkit/operator.hpp"
#include "hopfkit/oracle.hpp"

namespace hopfkit {

// Right-hand side of the top derivative: u^(n) = rhs(x, (u, u', ..., u^(n-1))).
using OdeRhs = std::function<double(double, std::span<const double>)>;

// Numerically integrated solution on a uniform grid. Each grid point stores
// the state (u, u', ..., u^(n-1)); the stored right-hand side recovers u^(n).
// Immutable once returned by an integrator.
class Trajectory {
public:
    // states is row-major with one state of size `order` per grid point.
    // truncated marks a run that stopped early because the state left the
    // finite range; the grid then ends at the last valid point.
    Trajectory(double a, double h, int order, std::vector<double> states,
               OdeRhs rhs, bool truncated);

    double a() const { return a_; }
    double b() const { return a_ + h_ * static_cast<double>(size_ - 1); }
    double h() const { return h_; }

    // Order n of the underlying ODE; states carry derivatives 0 .. n-1.
    int order() const { return order_; }

    std::size_t size() const { return size_; }
    bool truncated() const { return truncated_; }

    double x_at(std::size_t i) const;
    std::span<const double> state_at(std::size_t i) const;

    // u^(n) at grid point i, via the stored right-hand side.
    double top_at(std::size_t i) const;

    // State at arbitrary x: exact at grid points, linear interpolation
    // between them. Throws DomainError off the grid's span.
    std::vector<double> state(double x) const;

    // Jet of u at x up to `order` <= n. The top slot comes from the
    // right-hand side applied to the (possibly interpolated) state.
    Jet jet_at(double x, int order) const;

    double value(double x) const { return jet_at(x, 0).value(); }

    // Columns x, u, u1, ..., un where uk is the k-th derivative.
    void write_csv(std::ostream& out) const;

private:
    std::size_t locate(double x) const;

    double a_;
    double h_;
    int order_;
    std::size_t size_;
    std::vector<double> states_;
    OdeRhs rhs_;
    bool truncated_;
};

using TrajectoryPtr = std::shared_ptr<const Trajectory>;

// Classical fixed-step 4th-order Runge-Kutta on the companion first-order
// system. The step is shrunk as needed so an integer number of steps lands
// exactly on the right endpoint; pass h = 0 for the default span/4096.
// Integration stops early (truncated trajectory) once any state component
// leaves [-1e12, 1e12] or turns non-finite.
Trajectory integrate_nonlinear_ivp(OdeRhs rhs, std::span<const double> init,
                                   double x0, double x1, double h = 0.0);

// Solves L[u] = -forcing as an IVP from x = op.a() with the given initial
// state (u, u', ..., u^(n-1)), i.e. u^(n) = -sum a_i u^(i) - forcing.
Trajectory integrate_linear_ivp(const LinearOperator& op,
                                const OraclePtr& forcing,
                                std::span<const double> init, double h = 0.0);

// Two-point boundary value problem for an order-2 operator: find u with
// L[u] = -forcing, u(a) = alpha, u(b) = beta, by shooting on the initial
// slope (secant, bisection fallback) until the far-end residual satisfies
// |u(b) - beta| <= 1e-10 * (1 + |beta|). Throws ShootingError when the
// slope cannot be bracketed or 200 iterations pass without convergence.
Trajectory solve_second_order_bvp(const LinearOperator& op,
                                  const OraclePtr& forcing, double alpha,
                                  double beta, double h = 0.0);

// Oracle view of a trajectory: jets up to the ODE order, flagged as
// trajectory-backed so capability-sensitive checks can refuse it.
OraclePtr make_trajectory_oracle(TrajectoryPtr traj, std::string description);

// Integrates u^(n) = rhs(x, (u, ..., u^(n-1))) on [lo, hi] from data
// prescribed at an interior point x0: forward on [x0, hi] directly, and on
// [lo, x0] through the substitution s = 2 x0 - x (state components pick up
// alternating signs), glued as a piecewise oracle. The jet at x0 itself is
// served from the right half, so it reproduces init exactly.
OraclePtr integrate_two_sided_ivp(int order, OdeRhs rhs,
                                  std::span<const double> init, double lo,
                                  double x0, double hi, double h = 0.0);

}  // namespace hopfkit
