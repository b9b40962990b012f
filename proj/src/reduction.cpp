#include "hopfkit/reduction.hpp"

#include <cmath>
#include <string>
#include <utility>

#include "hopfkit/errors.hpp"

namespace hopfkit {

namespace {

// The recurrence is identical for doubles and jets; fd(i) supplies f^(i)
// in whichever arithmetic T is.
template <typename T, typename FD>
std::vector<T> b_recurrence(std::span<const T> a, FD&& fd, int k) {
    std::vector<T> b(static_cast<std::size_t>(k), a[0]);
    for (int j = k; j >= 1; --j) {
        T acc = a[static_cast<std::size_t>(j - 1)] - fd(k - j) * binom(k, j);
        for (int m = j; m <= k - 1; ++m) {
            acc = acc -
                  b[static_cast<std::size_t>(m)] * fd(m - j) * binom(m, j);
        }
        b[static_cast<std::size_t>(j - 1)] = acc;
    }
    return b;
}

void check_b_args(std::size_t a_count, int f_order, int k, int needed) {
    if (k < 2) throw ArgumentError("reduction needs k >= 2");
    if (a_count != static_cast<std::size_t>(k))
        throw ArgumentError("expected the k coefficients a_1..a_k");
    if (f_order < needed)
        throw ArgumentError("f jet carries too few derivatives for order " +
                            std::to_string(k));
}

// Coefficient b_i of a reduction step, evaluated on demand from the stored
// f-trajectory and the source coefficients. Jets stop at order 1: f's
// derivatives beyond the ODE order are not available, and nothing
// downstream needs more (operator application and the next level's
// recurrence consume values only).
class BOracle final : public FunctionOracle {
public:
    BOracle(LinearOperator source, TrajectoryPtr f, int index)
        : source_(std::move(source)), f_(std::move(f)), index_(index) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        const int k = f_->order();
        std::vector<Jet> a_jets;
        a_jets.reserve(static_cast<std::size_t>(k));
        for (int j = 1; j <= k; ++j)
            a_jets.push_back(source_.coeff(j)->jet(x, order));
        const Jet fj = f_->jet_at(x, k - 1 + order);
        return b_from_f(a_jets, fj, k)[static_cast<std::size_t>(index_)];
    }

    double lo() const override { return f_->a(); }
    double hi() const override { return f_->b(); }
    int max_order() const override { return 1; }
    bool trajectory_backed() const override { return true; }

    std::string describe() const override {
        return "b" + std::to_string(index_) + " of the order-" +
               std::to_string(source_.order()) + " reduction";
    }

private:
    LinearOperator source_;
    TrajectoryPtr f_;
    int index_;
};

}  // namespace

std::vector<double> b_from_f(std::span<const double> a_values,
                             const Jet& f_jet, int k) {
    check_b_args(a_values.size(), f_jet.order(), k, k - 1);
    return b_recurrence<double>(a_values, [&](int i) { return f_jet[i]; }, k);
}

std::vector<Jet> b_from_f(std::span<const Jet> a_jets, const Jet& f_jet,
                          int k) {
    if (a_jets.empty()) throw ArgumentError("expected the k coefficients a_1..a_k");
    const int q = a_jets[0].order();
    for (const Jet& a : a_jets) {
        if (a.order() != q)
            throw ArgumentError("coefficient jets must share one order");
    }
    check_b_args(a_jets.size(), f_jet.order(), k, k - 1 + q);
    std::vector<Jet> fd;
    fd.reserve(static_cast<std::size_t>(k));
    Jet cur = f_jet;
    for (int i = 0; i < k; ++i) {
        fd.push_back(truncated(cur, q));
        if (i + 1 < k) cur = derivative_shift(cur);
    }
    return b_recurrence<Jet>(a_jets, [&](int i) { return fd[static_cast<std::size_t>(i)]; }, k);
}

ReductionStep solve_f_ode(const LinearOperator& source, double h) {
    if (source.order() < 3)
        throw ReductionError("nothing to reduce below order 3");
    const int k = source.order() - 1;

    OdeRhs rhs = [source, k](double x, std::span<const double> y) {
        std::vector<double> av(static_cast<std::size_t>(k));
        for (int j = 1; j <= k; ++j)
            av[static_cast<std::size_t>(j - 1)] = source.coeff_value(j, x);
        const Jet fj(x, k - 1, y);
        const std::vector<double> b = b_from_f(av, fj, k);
        double top = source.coeff_value(0, x);
        for (int m = 0; m < k; ++m)
            top -= b[static_cast<std::size_t>(m)] * y[static_cast<std::size_t>(m)];
        return top;
    };

    std::vector<double> init(static_cast<std::size_t>(k), 0.0);
    init[0] = 1.0;
    auto traj = std::make_shared<Trajectory>(
        integrate_nonlinear_ivp(rhs, init, source.a(), source.b(), h));
    if (traj->b() - traj->a() < 8.0 * traj->h())
        throw ReductionError("f-equation blew up immediately");

    std::vector<OraclePtr> b_coeffs;
    b_coeffs.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        b_coeffs.push_back(std::make_shared<BOracle>(source, traj, i));

    LinearOperator reduced(k, b_coeffs, traj->a(), traj->b());
    OraclePtr f = make_trajectory_oracle(
        traj, "f of the order-" + std::to_string(source.order()) + " reduction");
    return ReductionStep{source, traj, std::move(f), std::move(b_coeffs),
                         std::move(reduced)};
}

OraclePtr push_v(const OraclePtr& u, const OraclePtr& f, int order) {
    if (!u || !f) throw ArgumentError("v needs both u and f");
    OraclePtr v = make_combination_oracle(
        {1.0, 1.0}, {make_product_oracle(f, u), make_derivative_oracle(u)});
    if (v->max_order() < order)
        throw CapabilityError("operands cannot carry v to order " +
                              std::to_string(order));
    return v;
}

IdentityCheck verify_reduction_identity(const ReductionStep& step,
                                        std::span<const OraclePtr> probes,
                                        int grid_count, double tol) {
    if (probes.empty()) throw ArgumentError("need at least one probe");
    const int k = step.reduced.order();
    IdentityCheck out{0.0, step.reduced.a(), 0, true};
    const std::vector<double> grid =
        interior_grid(step.reduced.a(), step.reduced.b(), grid_count);
    for (std::size_t p = 0; p < probes.size(); ++p) {
        if (!probes[p]) throw ArgumentError("probe oracle must be non-null");
        const OraclePtr v = push_v(probes[p], step.f, k);
        for (double x : grid) {
            const double lhs = apply_operator(step.source, *probes[p], x);
            const double rhs = apply_operator(step.reduced, *v, x);
            const double res = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
            if (res > out.max_residual) {
                out.max_residual = res;
                out.argmax_x = x;
                out.probe = p;
            }
        }
    }
    out.pass = out.max_residual <= tol;
    return out;
}

ReductionChain reduce_chain(const LinearOperator& op, const OraclePtr& u,
                            double h, double zero_tol) {
    if (op.order() < 3)
        throw ReductionError("chains start at order 3");
    if (!u) throw ArgumentError("chain needs the function under test");

    ReductionChain chain;
    LinearOperator current = op;
    OraclePtr w = u;
    while (current.order() > 2) {
        ReductionStep step = solve_f_ode(current, h);
        if (step.reduced.span() < 16.0 * step.f_traj->h())
            throw ReductionError("surviving span collapsed at order " +
                                 std::to_string(current.order()));
        const int k = step.reduced.order();
        OraclePtr v = push_v(w, step.f, k);
        EndpointCheck v_zero = endpoint_jet_check(*v, current.a(), k, zero_tol);
        SequenceScan transfer = detect_sequence_condition(
            *v, current.a(), Side::Left, +1.0, step.reduced.span());
        LinearOperator next = step.reduced;
        chain.stages.push_back(ChainStage{std::move(step), v,
                                          std::move(v_zero),
                                          std::move(transfer)});
        current = std::move(next);
        w = std::move(v);
    }
    chain.final_v = std::move(w);
    return chain;
}

}  // namespace hopfkit
