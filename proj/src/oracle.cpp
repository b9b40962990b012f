#include "hopfkit/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace hopfkit {

namespace {

// Interval membership with ulp-scale slack: reflected points and grid
// arithmetic land within a few ulps of the nominal endpoints.
bool inside(double x, double lo, double hi) {
    const double slack = 1e-12 * std::max({1.0, std::fabs(lo), std::fabs(hi)});
    return x >= lo - slack && x <= hi + slack;
}

}  // namespace

void FunctionOracle::require(double x, int order) const {
    if (order < 0 || order > max_order())
        throw CapabilityError("jet order " + std::to_string(order) +
                              " beyond oracle capability " +
                              std::to_string(max_order()) + " (" + describe() + ")");
    if (!inside(x, lo(), hi()))
        throw CapabilityError("point " + std::to_string(x) +
                              " outside oracle domain [" + std::to_string(lo()) +
                              ", " + std::to_string(hi()) + "] (" + describe() + ")");
}

namespace {

class ExprOracle final : public FunctionOracle {
public:
    ExprOracle(Expr e, double lo, double hi) : e_(std::move(e)), lo_(lo), hi_(hi) {
        if (!(lo < hi)) throw ArgumentError("oracle interval is degenerate");
        for (const auto& v : e_.variables())
            if (v != "x")
                throw ArgumentError("function of x may not reference '" + v + "'");
    }

    Jet jet(double x, int order) const override {
        require(x, order);
        return e_.eval({{"x", Jet::variable(x, order)}}, order);
    }

    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    int max_order() const override { return kMaxJetOrder; }
    std::string describe() const override { return e_.str(); }

private:
    Expr e_;
    double lo_, hi_;
};

class ConstantOracle final : public FunctionOracle {
public:
    explicit ConstantOracle(double c) : c_(c) {}
    Jet jet(double x, int order) const override {
        require(x, order);
        return Jet::constant(x, order, c_);
    }
    double lo() const override { return -std::numeric_limits<double>::infinity(); }
    double hi() const override { return std::numeric_limits<double>::infinity(); }
    int max_order() const override { return kMaxJetOrder; }
    std::string describe() const override {
        return detail_format(c_);
    }

private:
    static std::string detail_format(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%g", v);
        return buf;
    }
    double c_;
};

class ReflectedOracle final : public FunctionOracle {
public:
    ReflectedOracle(OraclePtr f, double mirror, bool negate)
        : f_(std::move(f)), mirror_(mirror), negate_(negate) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        Jet inner = f_->jet(2.0 * mirror_ - x, order);
        Jet r(x, order);
        double sign = negate_ ? -1.0 : 1.0;
        for (int k = 0; k <= order; ++k) {
            r[k] = sign * inner[k];
            sign = -sign;  // chain rule factor (-1)^k, on top of the negation
        }
        return r;
    }

    double lo() const override { return 2.0 * mirror_ - f_->hi(); }
    double hi() const override { return 2.0 * mirror_ - f_->lo(); }
    int max_order() const override { return f_->max_order(); }
    bool trajectory_backed() const override { return f_->trajectory_backed(); }
    std::string describe() const override {
        return std::string(negate_ ? "-" : "") + "reflect(" + f_->describe() + ")";
    }

private:
    OraclePtr f_;
    double mirror_;
    bool negate_;
};

class CombinationOracle final : public FunctionOracle {
public:
    CombinationOracle(std::vector<double> coeffs, std::vector<OraclePtr> terms)
        : c_(std::move(coeffs)), f_(std::move(terms)) {
        if (c_.size() != f_.size() || f_.empty())
            throw ArgumentError("combination needs matching coefficients and terms");
        lo_ = -std::numeric_limits<double>::infinity();
        hi_ = std::numeric_limits<double>::infinity();
        max_order_ = kMaxJetOrder;
        bool traj = false;
        for (const auto& t : f_) {
            lo_ = std::max(lo_, t->lo());
            hi_ = std::min(hi_, t->hi());
            max_order_ = std::min(max_order_, t->max_order());
            traj = traj || t->trajectory_backed();
        }
        traj_ = traj;
    }

    Jet jet(double x, int order) const override {
        require(x, order);
        Jet acc = c_[0] * f_[0]->jet(x, order);
        for (std::size_t i = 1; i < f_.size(); ++i)
            acc = acc + c_[i] * f_[i]->jet(x, order);
        return acc;
    }

    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    int max_order() const override { return max_order_; }
    bool trajectory_backed() const override { return traj_; }
    std::string describe() const override {
        std::string s = "combo(";
        for (std::size_t i = 0; i < f_.size(); ++i) {
            if (i) s += ", ";
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g*", c_[i]);
            s += buf;
            s += f_[i]->describe();
        }
        return s + ")";
    }

private:
    std::vector<double> c_;
    std::vector<OraclePtr> f_;
    double lo_, hi_;
    int max_order_;
    bool traj_;
};

class QuotientOracle final : public FunctionOracle {
public:
    QuotientOracle(OraclePtr num, OraclePtr den)
        : num_(std::move(num)), den_(std::move(den)) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        return num_->jet(x, order) / den_->jet(x, order);
    }
    double lo() const override { return std::max(num_->lo(), den_->lo()); }
    double hi() const override { return std::min(num_->hi(), den_->hi()); }
    int max_order() const override {
        return std::min(num_->max_order(), den_->max_order());
    }
    bool trajectory_backed() const override {
        return num_->trajectory_backed() || den_->trajectory_backed();
    }
    std::string describe() const override {
        return "(" + num_->describe() + ")/(" + den_->describe() + ")";
    }

private:
    OraclePtr num_, den_;
};

class ProductOracle final : public FunctionOracle {
public:
    ProductOracle(OraclePtr f, OraclePtr g) : f_(std::move(f)), g_(std::move(g)) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        return f_->jet(x, order) * g_->jet(x, order);
    }
    double lo() const override { return std::max(f_->lo(), g_->lo()); }
    double hi() const override { return std::min(f_->hi(), g_->hi()); }
    int max_order() const override {
        return std::min(f_->max_order(), g_->max_order());
    }
    bool trajectory_backed() const override {
        return f_->trajectory_backed() || g_->trajectory_backed();
    }
    std::string describe() const override {
        return "(" + f_->describe() + ")*(" + g_->describe() + ")";
    }

private:
    OraclePtr f_, g_;
};

class DerivativeOracle final : public FunctionOracle {
public:
    explicit DerivativeOracle(OraclePtr f) : f_(std::move(f)) {
        if (f_->max_order() < 1)
            throw ArgumentError("cannot differentiate an order-0 oracle");
    }

    Jet jet(double x, int order) const override {
        require(x, order);
        return derivative_shift(f_->jet(x, order + 1));
    }
    double lo() const override { return f_->lo(); }
    double hi() const override { return f_->hi(); }
    int max_order() const override { return f_->max_order() - 1; }
    bool trajectory_backed() const override { return f_->trajectory_backed(); }
    std::string describe() const override {
        return "d/dx(" + f_->describe() + ")";
    }

private:
    OraclePtr f_;
};

class PiecewiseOracle final : public FunctionOracle {
public:
    PiecewiseOracle(OraclePtr left, OraclePtr right, double split)
        : l_(std::move(left)), r_(std::move(right)), split_(split) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        return (x < split_) ? l_->jet(x, order) : r_->jet(x, order);
    }
    double lo() const override { return l_->lo(); }
    double hi() const override { return r_->hi(); }
    int max_order() const override {
        return std::min(l_->max_order(), r_->max_order());
    }
    bool trajectory_backed() const override {
        return l_->trajectory_backed() || r_->trajectory_backed();
    }
    std::string describe() const override {
        return "piecewise(" + l_->describe() + " | " + r_->describe() + ")";
    }

private:
    OraclePtr l_, r_;
    double split_;
};

class LambdaOracle final : public FunctionOracle {
public:
    LambdaOracle(std::function<Jet(double, int)> fn, double lo, double hi,
                 int max_order, std::string description)
        : fn_(std::move(fn)), lo_(lo), hi_(hi), max_order_(max_order),
          desc_(std::move(description)) {}

    Jet jet(double x, int order) const override {
        require(x, order);
        return fn_(x, order);
    }
    double lo() const override { return lo_; }
    double hi() const override { return hi_; }
    int max_order() const override { return max_order_; }
    std::string describe() const override { return desc_; }

private:
    std::function<Jet(double, int)> fn_;
    double lo_, hi_;
    int max_order_;
    std::string desc_;
};

}  // namespace

OraclePtr make_expr_oracle(const Expr& e, double lo, double hi) {
    return std::make_shared<ExprOracle>(e, lo, hi);
}

OraclePtr make_expr_oracle(const std::string& source, double lo, double hi) {
    return std::make_shared<ExprOracle>(Expr::parse(source), lo, hi);
}

OraclePtr make_constant_oracle(double c) {
    return std::make_shared<ConstantOracle>(c);
}

OraclePtr make_reflected_oracle(OraclePtr f, double mirror, bool negate) {
    return std::make_shared<ReflectedOracle>(std::move(f), mirror, negate);
}

OraclePtr make_combination_oracle(std::vector<double> coeffs,
                                  std::vector<OraclePtr> terms) {
    return std::make_shared<CombinationOracle>(std::move(coeffs), std::move(terms));
}

OraclePtr make_quotient_oracle(OraclePtr num, OraclePtr den) {
    return std::make_shared<QuotientOracle>(std::move(num), std::move(den));
}

OraclePtr make_product_oracle(OraclePtr f, OraclePtr g) {
    return std::make_shared<ProductOracle>(std::move(f), std::move(g));
}

OraclePtr make_derivative_oracle(OraclePtr f) {
    return std::make_shared<DerivativeOracle>(std::move(f));
}

OraclePtr make_piecewise_oracle(OraclePtr left, OraclePtr right, double split) {
    return std::make_shared<PiecewiseOracle>(std::move(left), std::move(right), split);
}

OraclePtr make_lambda_oracle(std::function<Jet(double, int)> fn, double lo,
                             double hi, int max_order, std::string description) {
    return std::make_shared<LambdaOracle>(std::move(fn), lo, hi, max_order,
                                          std::move(description));
}

}  // namespace hopfkit
