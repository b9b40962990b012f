#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>

#include "hopfkit/jet.hpp"

namespace hopfkit {

// Grammar version announced in every report. Bump only with the grammar.
inline constexpr const char* kExprVersion = "expr-v1";

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

// Immutable parsed expression over the variables {x, z1..zN} with + - * / ^,
// unary minus, exp/sin/cos/log/abs/pow(e,r), and the constants pi, e.
// What a z-variable denotes (a derivative slot, a state component) is up to
// the checker that evaluates the expression; this class only does algebra.
class Expr {
public:
    Expr() = default;

    // Throws ParseError with a 0-based byte position on any lexical or
    // syntactic defect, including unknown identifiers and wrong arity.
    // No implicit multiplication: "2x" is an error.
    static Expr parse(std::string_view source);

    bool empty() const noexcept { return !root_; }

    // Canonical form: parse(str()) reproduces the same tree and str() is
    // then a fixed point. Numbers print in shortest round-trip form.
    std::string str() const;

    // Names of the variables referenced, e.g. {"x", "z2"}.
    const std::set<std::string>& variables() const { return vars_; }

    // Evaluate to a jet of the given order. Every referenced variable must
    // be bound at a common point with order >= the requested order.
    // Differentiation is with respect to x only: z bindings carry the jets
    // of whatever functions stand in those slots.
    Jet eval(const std::map<std::string, Jet>& bindings, int order) const;

    // Order-0 convenience.
    double eval_value(const std::map<std::string, double>& bindings) const;

private:
    detail::NodePtr root_;
    std::set<std::string> vars_;
};

}  // namespace hopfkit
