#include "hopfkit/odeint.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <utility>

#include "hopfkit/errors.hpp"

namespace hopfkit {

namespace {

constexpr double kBlowupThreshold = 1e12;

bool state_ok(std::span<const double> y) {
    for (double v : y) {
        if (!std::isfinite(v) || std::abs(v) > kBlowupThreshold) return false;
    }
    return true;
}

// Shortest round-trip decimal, matching the expression printer's habits.
std::string csv_number(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, end);
}

struct StepWorkspace {
    std::vector<double> k1, k2, k3, k4, scratch;

    explicit StepWorkspace(std::size_t n)
        : k1(n), k2(n), k3(n), k4(n), scratch(n) {}
};

// Companion-system derivative: shifts the state left and closes the top
// slot with the scalar right-hand side.
void companion_deriv(const OdeRhs& rhs, double x, std::span<const double> y,
                     std::vector<double>& dy) {
    const std::size_t n = y.size();
    for (std::size_t i = 0; i + 1 < n; ++i) dy[i] = y[i + 1];
    dy[n - 1] = rhs(x, y);
}

// One classical RK4 step from (x, y) with step h, written into y.
void rk4_step(const OdeRhs& rhs, double x, double h, std::vector<double>& y,
              StepWorkspace& w) {
    const std::size_t n = y.size();
    companion_deriv(rhs, x, y, w.k1);
    for (std::size_t i = 0; i < n; ++i) w.scratch[i] = y[i] + 0.5 * h * w.k1[i];
    companion_deriv(rhs, x + 0.5 * h, w.scratch, w.k2);
    for (std::size_t i = 0; i < n; ++i) w.scratch[i] = y[i] + 0.5 * h * w.k2[i];
    companion_deriv(rhs, x + 0.5 * h, w.scratch, w.k3);
    for (std::size_t i = 0; i < n; ++i) w.scratch[i] = y[i] + h * w.k3[i];
    companion_deriv(rhs, x + h, w.scratch, w.k4);
    for (std::size_t i = 0; i < n; ++i) {
        y[i] += h / 6.0 * (w.k1[i] + 2.0 * w.k2[i] + 2.0 * w.k3[i] + w.k4[i]);
    }
}

class TrajectoryOracle final : public FunctionOracle {
public:
    TrajectoryOracle(TrajectoryPtr traj, std::string description)
        : traj_(std::move(traj)), description_(std::move(description)) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        return traj_->jet_at(std::clamp(x, traj_->a(), traj_->b()), order);
    }

    double lo() const override { return traj_->a(); }
    double hi() const override { return traj_->b(); }
    int max_order() const override { return traj_->order(); }
    std::string describe() const override { return description_; }
    bool trajectory_backed() const override { return true; }

private:
    TrajectoryPtr traj_;
    std::string description_;
};

}  // namespace

Trajectory::Trajectory(double a, double h, int order,
                       std::vector<double> states, OdeRhs rhs, bool truncated)
    : a_(a),
      h_(h),
      order_(order),
      size_(0),
      states_(std::move(states)),
      rhs_(std::move(rhs)),
      truncated_(truncated) {
    if (order_ < 1) throw ArgumentError("trajectory order must be >= 1");
    if (!(h_ > 0.0)) throw ArgumentError("trajectory step must be positive");
    if (states_.empty() || states_.size() % static_cast<std::size_t>(order_) != 0)
        throw ArgumentError("trajectory states must hold whole state vectors");
    if (!rhs_) throw ArgumentError("trajectory needs a right-hand side");
    size_ = states_.size() / static_cast<std::size_t>(order_);
}

double Trajectory::x_at(std::size_t i) const {
    if (i >= size_) throw ArgumentError("trajectory index out of range");
    return a_ + h_ * static_cast<double>(i);
}

std::span<const double> Trajectory::state_at(std::size_t i) const {
    if (i >= size_) throw ArgumentError("trajectory index out of range");
    const auto n = static_cast<std::size_t>(order_);
    return std::span<const double>(states_.data() + i * n, n);
}

double Trajectory::top_at(std::size_t i) const {
    return rhs_(x_at(i), state_at(i));
}

std::size_t Trajectory::locate(double x) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(x));
    if (x < a_ - slack || x > b() + slack)
        throw DomainError("x outside the trajectory span");
    const double t = (x - a_) / h_;
    const auto nearest =
        static_cast<std::size_t>(std::clamp(std::llround(t), 0LL,
                                            static_cast<long long>(size_ - 1)));
    if (std::abs(x - x_at(nearest)) <= 1e-12 * std::max(1.0, std::abs(x)))
        return nearest;  // snapped onto the grid, serve the stored state
    return size_;        // sentinel: interpolate
}

std::vector<double> Trajectory::state(double x) const {
    const auto n = static_cast<std::size_t>(order_);
    const std::size_t snap = locate(x);
    if (snap < size_) {
        auto s = state_at(snap);
        return std::vector<double>(s.begin(), s.end());
    }
    const double t = (x - a_) / h_;
    auto i = static_cast<std::size_t>(
        std::clamp(static_cast<long long>(std::floor(t)), 0LL,
                   static_cast<long long>(size_ - 2)));
    const double w = (x - x_at(i)) / h_;
    auto left = state_at(i);
    auto right = state_at(i + 1);
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = (1.0 - w) * left[k] + w * right[k];
    return out;
}

Jet Trajectory::jet_at(double x, int order) const {
    if (order < 0 || order > order_)
        throw CapabilityError("trajectory jets stop at the ODE order");
    std::vector<double> y = state(x);
    Jet j(x, order);
    const int kept = std::min(order, order_ - 1);
    for (int k = 0; k <= kept; ++k) j[k] = y[static_cast<std::size_t>(k)];
    if (order == order_) j[order_] = rhs_(x, y);
    return j;
}

void Trajectory::write_csv(std::ostream& out) const {
    out << "x,u";
    for (int k = 1; k <= order_; ++k) out << ",u" << k;
    out << '\n';
    for (std::size_t i = 0; i < size_; ++i) {
        out << csv_number(x_at(i));
        for (double v : state_at(i)) out << ',' << csv_number(v);
        out << ',' << csv_number(top_at(i)) << '\n';
    }
}

Trajectory integrate_nonlinear_ivp(OdeRhs rhs, std::span<const double> init,
                                   double x0, double x1, double h) {
    if (!rhs) throw ArgumentError("integration needs a right-hand side");
    if (init.empty()) throw ArgumentError("initial state must be nonempty");
    if (!(x1 > x0)) throw ArgumentError("integration span must be increasing");
    const double span = x1 - x0;
    if (h == 0.0) h = span / 4096.0;
    if (!(h > 0.0)) throw ArgumentError("step must be positive");
    // Land exactly on x1: shrink the step to the nearest integer division.
    const auto steps = static_cast<std::size_t>(
        std::max(1.0, std::ceil(span / h - 1e-9)));
    h = span / static_cast<double>(steps);

    const std::size_t n = init.size();
    std::vector<double> y(init.begin(), init.end());
    if (!state_ok(y))
        throw ArgumentError("initial state is outside the finite range");
    std::vector<double> states;
    states.reserve((steps + 1) * n);
    states.insert(states.end(), y.begin(), y.end());
    bool truncated = false;

    StepWorkspace w(n);
    for (std::size_t i = 0; i < steps; ++i) {
        const double x = x0 + h * static_cast<double>(i);
        rk4_step(rhs, x, h, y, w);
        if (!state_ok(y)) {
            truncated = true;
            break;
        }
        states.insert(states.end(), y.begin(), y.end());
    }
    return Trajectory(x0, h, static_cast<int>(n), std::move(states),
                      std::move(rhs), truncated);
}

Trajectory integrate_linear_ivp(const LinearOperator& op,
                                const OraclePtr& forcing,
                                std::span<const double> init, double h) {
    if (!forcing) throw ArgumentError("forcing oracle must be non-null");
    if (init.size() != static_cast<std::size_t>(op.order()))
        throw ArgumentError("initial state size must match the operator order");
    const int n = op.order();
    OdeRhs rhs = [op, forcing, n](double x, std::span<const double> y) {
        double acc = -forcing->value(x);
        for (int i = 0; i < n; ++i)
            acc -= op.coeff_value(i, x) * y[static_cast<std::size_t>(i)];
        return acc;
    };
    return integrate_nonlinear_ivp(std::move(rhs), init, op.a(), op.b(), h);
}

Trajectory solve_second_order_bvp(const LinearOperator& op,
                                  const OraclePtr& forcing, double alpha,
                                  double beta, double h) {
    if (op.order() != 2)
        throw ArgumentError("boundary value solver handles order 2 only");
    const double tol = 1e-10 * (1.0 + std::abs(beta));

    auto shoot = [&](double slope) {
        const double init[2] = {alpha, slope};
        return integrate_linear_ivp(op, forcing, init, h);
    };
    auto residual = [&](const Trajectory& t) -> double {
        if (t.truncated())
            throw ShootingError("integration blew up while shooting");
        return t.state_at(t.size() - 1)[0] - beta;
    };

    // The residual is affine in the slope, so one secant step normally
    // lands on the answer; the bracket/bisection path is insurance
    // against rounding noise and degenerate secant denominators.
    std::optional<double> below, above;  // slopes with negative/positive residual
    auto record = [&](double s, double r) {
        (r < 0.0 ? below : above) = s;
    };
    auto bracketed = [&] { return below.has_value() && above.has_value(); };

    double s0 = (beta - alpha) / (op.b() - op.a());
    double s1 = s0 + 1.0;
    Trajectory t0 = shoot(s0);
    double r0 = residual(t0);
    if (std::abs(r0) <= tol) return t0;
    record(s0, r0);
    Trajectory t1 = shoot(s1);
    double r1 = residual(t1);
    record(s1, r1);

    for (int iter = 0; iter < 200; ++iter) {
        if (std::abs(r1) <= tol) return t1;
        double next;
        const double denom = r1 - r0;
        if (denom != 0.0 && std::isfinite(denom)) {
            next = s1 - r1 * (s1 - s0) / denom;
        } else if (bracketed()) {
            next = 0.5 * (*below + *above);
        } else {
            // Flat residual without a bracket: widen the probe.
            next = s1 + std::ldexp(std::max(1.0, std::abs(s1)), iter);
        }
        if (bracketed()) {
            const double lo = std::min(*below, *above);
            const double hi = std::max(*below, *above);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        }
        // A slope orders of magnitude past the chord slope means the
        // secant denominator was pure rounding noise (an eigenvalue-like
        // problem where the far end ignores the slope).
        if (std::abs(next) > 1e8 * (1.0 + std::abs(s0)) || !std::isfinite(next))
            throw ShootingError(
                "far-end value does not respond to the shooting slope");
        Trajectory tn = shoot(next);
        const double rn = residual(tn);
        record(next, rn);
        s0 = s1;
        r0 = r1;
        s1 = next;
        r1 = rn;
        t1 = std::move(tn);
    }
    throw ShootingError("no convergence after 200 shooting iterations");
}

OraclePtr make_trajectory_oracle(TrajectoryPtr traj, std::string description) {
    if (!traj) throw ArgumentError("trajectory oracle needs a trajectory");
    return std::make_shared<TrajectoryOracle>(std::move(traj),
                                              std::move(description));
}

OraclePtr integrate_two_sided_ivp(int order, OdeRhs rhs,
                                  std::span<const double> init, double lo,
                                  double x0, double hi, double h) {
    if (order < 1) throw ArgumentError("two-sided IVP needs order >= 1");
    if (!rhs) throw ArgumentError("two-sided IVP needs a right-hand side");
    if (init.size() != static_cast<std::size_t>(order))
        throw ArgumentError("initial state must carry exactly `order` values");
    if (!(lo < x0 && x0 < hi))
        throw ArgumentError("the data point must lie strictly inside [lo, hi]");

    auto right = std::make_shared<Trajectory>(
        integrate_nonlinear_ivp(rhs, init, x0, hi, h));

    // Left half via s = 2 x0 - x: with w(s) = u(2 x0 - s) the state seen by
    // the original right-hand side is ((-1)^k w^(k)) and the top derivative
    // gains (-1)^order.
    const double top_sign = (order % 2 == 0) ? 1.0 : -1.0;
    OdeRhs mirrored = [rhs, x0, top_sign](double s, std::span<const double> w) {
        std::vector<double> orig(w.size());
        for (std::size_t k = 0; k < w.size(); ++k)
            orig[k] = (k % 2 == 0) ? w[k] : -w[k];
        return top_sign * rhs(2.0 * x0 - s, orig);
    };
    std::vector<double> flipped(init.begin(), init.end());
    for (std::size_t k = 1; k < flipped.size(); k += 2) flipped[k] = -flipped[k];
    auto mirror = std::make_shared<Trajectory>(
        integrate_nonlinear_ivp(mirrored, flipped, x0, 2.0 * x0 - lo, h));

    OraclePtr left = make_reflected_oracle(
        make_trajectory_oracle(mirror, "mirrored half"), x0, false);
    return make_piecewise_oracle(
        left, make_trajectory_oracle(right, "forward half"), x0);
}

}  // namespace hopfkit
