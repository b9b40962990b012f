#include "hopfkit/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <vector>

namespace hopfkit {

namespace detail {

enum class Kind { Number, Const, Var, Neg, Add, Sub, Mul, Div, Pow, Call };

struct ExprNode {
    Kind kind;
    double number = 0.0;       // Kind::Number
    std::string name;          // Kind::Const, Var, Call
    NodePtr lhs, rhs;          // binary; unary and 1-ary calls use lhs only
};

namespace {

std::shared_ptr<ExprNode> node(Kind k, NodePtr l = nullptr, NodePtr r = nullptr) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

bool is_call_name(const std::string& s) {
    return s == "exp" || s == "sin" || s == "cos" || s == "log" ||
           s == "abs" || s == "pow";
}

bool is_variable_name(const std::string& s) {
    if (s == "x") return true;
    if (s.size() < 2 || s[0] != 'z') return false;
    if (s[1] == '0') return false;  // z0, z01 are not slot names
    for (std::size_t i = 1; i < s.size(); ++i)
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
    return true;
}

// --- lexer -----------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
    Tok kind;
    std::size_t pos;
    double number = 0.0;
    std::string text;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        while (i_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (i_ >= src_.size()) return {Tok::End, src_.size()};
        const std::size_t start = i_;
        const char c = src_[i_];
        switch (c) {
            case '+': ++i_; return {Tok::Plus, start};
            case '-': ++i_; return {Tok::Minus, start};
            case '*': ++i_; return {Tok::Star, start};
            case '/': ++i_; return {Tok::Slash, start};
            case '^': ++i_; return {Tok::Caret, start};
            case '(': ++i_; return {Tok::LParen, start};
            case ')': ++i_; return {Tok::RParen, start};
            case ',': ++i_; return {Tok::Comma, start};
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return lex_number(start);
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[i_])) || src_[i_] == '_'))
                ++i_;
            Token t{Tok::Ident, start};
            t.text = std::string(src_.substr(start, i_ - start));
            return t;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", start);
    }

private:
    Token lex_number(std::size_t start) {
        while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        if (i_ < src_.size() && src_[i_] == '.') {
            ++i_;
            while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
        }
        if (i_ < src_.size() && (src_[i_] == 'e' || src_[i_] == 'E')) {
            std::size_t mark = i_;
            ++i_;
            if (i_ < src_.size() && (src_[i_] == '+' || src_[i_] == '-')) ++i_;
            if (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) {
                while (i_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[i_]))) ++i_;
            } else {
                i_ = mark;  // "2e" is the number 2 followed by identifier e? No:
                // a bare exponent marker is malformed, reject at its position.
                throw ParseError("malformed exponent in number literal", mark);
            }
        }
        const std::string text(src_.substr(start, i_ - start));
        if (text == ".") throw ParseError("malformed number literal", start);
        double v = 0.0;
        auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || p != text.data() + text.size())
            throw ParseError("malformed number literal '" + text + "'", start);
        Token t{Tok::Number, start};
        t.number = v;
        return t;
    }

    std::string_view src_;
    std::size_t i_ = 0;
};

// --- parser ----------------------------------------------------------
//
//   additive       := multiplicative (('+'|'-') multiplicative)*
//   multiplicative := unary (('*'|'/') unary)*
//   unary          := '-' unary | power
//   power          := primary ('^' unary)?          (right-associative)
//   primary        := number | constant | variable | call '(' args ')' | '(' additive ')'

class Parser {
public:
    explicit Parser(std::string_view src) : lex_(src) { advance(); }

    NodePtr parse_all() {
        NodePtr e = additive();
        if (cur_.kind != Tok::End)
            throw ParseError("unexpected trailing input", cur_.pos);
        return e;
    }

private:
    void advance() { cur_ = lex_.next(); }

    bool accept(Tok k) {
        if (cur_.kind != k) return false;
        advance();
        return true;
    }

    void expect(Tok k, const char* what) {
        if (cur_.kind != k)
            throw ParseError(std::string("expected ") + what, cur_.pos);
        advance();
    }

    NodePtr additive() {
        NodePtr e = multiplicative();
        for (;;) {
            if (accept(Tok::Plus)) e = node(Kind::Add, e, multiplicative());
            else if (accept(Tok::Minus)) e = node(Kind::Sub, e, multiplicative());
            else return e;
        }
    }

    NodePtr multiplicative() {
        NodePtr e = unary();
        for (;;) {
            if (accept(Tok::Star)) e = node(Kind::Mul, e, unary());
            else if (accept(Tok::Slash)) e = node(Kind::Div, e, unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (accept(Tok::Minus)) return node(Kind::Neg, unary());
        return power();
    }

    NodePtr power() {
        NodePtr base = primary();
        if (accept(Tok::Caret)) {
            // right-associative, and -x binds looser: x^-2 is x^(-2)
            return node(Kind::Pow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        if (cur_.kind == Tok::Number) {
            auto n = node(Kind::Number);
            n->number = cur_.number;
            advance();
            return n;
        }
        if (accept(Tok::LParen)) {
            NodePtr e = additive();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (cur_.kind == Tok::Ident) {
            const Token id = cur_;
            advance();
            if (cur_.kind == Tok::LParen) {
                if (!is_call_name(id.text))
                    throw ParseError("unknown function '" + id.text + "'", id.pos);
                advance();
                std::vector<NodePtr> args;
                if (cur_.kind != Tok::RParen) {
                    args.push_back(additive());
                    while (accept(Tok::Comma)) args.push_back(additive());
                }
                expect(Tok::RParen, "')'");
                const std::size_t want = (id.text == "pow") ? 2 : 1;
                if (args.size() != want)
                    throw ParseError("function '" + id.text + "' takes " +
                                         std::to_string(want) + " argument" +
                                         (want == 1 ? "" : "s") + ", got " +
                                         std::to_string(args.size()),
                                     id.pos);
                auto n = node(Kind::Call, args[0], want == 2 ? args[1] : nullptr);
                n->name = id.text;
                return n;
            }
            if (id.text == "pi" || id.text == "e") {
                auto n = node(Kind::Const);
                n->name = id.text;
                return n;
            }
            if (is_variable_name(id.text)) {
                auto n = node(Kind::Var);
                n->name = id.text;
                return n;
            }
            throw ParseError("unknown identifier '" + id.text + "'", id.pos);
        }
        throw ParseError("expected an expression", cur_.pos);
    }

    Lexer lex_;
    Token cur_;
};

// --- printing --------------------------------------------------------

int precedence(Kind k) {
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;  // atoms and calls never need parentheses
    }
}

std::string format_number(double v) {
    if (v == static_cast<long long>(v) && std::fabs(v) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(v));
        return buf;
    }
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, p);
}

void print(const ExprNode& n, std::string& out) {
    auto child = [&out](const NodePtr& c, int parent_prec, bool parenthesize_equal) {
        const bool wrap = precedence(c->kind) < parent_prec ||
                          (parenthesize_equal && precedence(c->kind) == parent_prec);
        if (wrap) out += '(';
        print(*c, out);
        if (wrap) out += ')';
    };
    switch (n.kind) {
        case Kind::Number:
            if (n.number < 0.0) {
                // never emit a bare negative literal; it would reparse as Neg
                out += '-';
                out += format_number(-n.number);
            } else {
                out += format_number(n.number);
            }
            return;
        case Kind::Const:
        case Kind::Var: out += n.name; return;
        case Kind::Neg:
            out += '-';
            child(n.lhs, precedence(Kind::Neg), false);
            return;
        case Kind::Add:
            child(n.lhs, 1, false);
            out += " + ";
            child(n.rhs, 1, true);  // a - (b + c) must keep its parens
            return;
        case Kind::Sub:
            child(n.lhs, 1, false);
            out += " - ";
            child(n.rhs, 1, true);
            return;
        case Kind::Mul:
            child(n.lhs, 2, false);
            out += "*";
            child(n.rhs, 2, true);
            return;
        case Kind::Div:
            child(n.lhs, 2, false);
            out += "/";
            child(n.rhs, 2, true);
            return;
        case Kind::Pow:
            // left operand of ^ needs parens even at equal precedence
            // (right-associativity), and unary minus under it always wraps.
            child(n.lhs, precedence(Kind::Pow) + 1, false);
            out += "^";
            child(n.rhs, precedence(Kind::Pow), false);
            return;
        case Kind::Call:
            out += n.name;
            out += '(';
            print(*n.lhs, out);
            if (n.rhs) {
                out += ", ";
                print(*n.rhs, out);
            }
            out += ')';
            return;
    }
}

void collect_vars(const ExprNode& n, std::set<std::string>& vars) {
    if (n.kind == Kind::Var) vars.insert(n.name);
    if (n.lhs) collect_vars(*n.lhs, vars);
    if (n.rhs) collect_vars(*n.rhs, vars);
}

bool is_constant_subtree(const ExprNode& n) {
    if (n.kind == Kind::Var) return false;
    if (n.lhs && !is_constant_subtree(*n.lhs)) return false;
    if (n.rhs && !is_constant_subtree(*n.rhs)) return false;
    return true;
}

struct EvalCtx {
    const std::map<std::string, Jet>* bindings;
    double point;
    int order;
};

Jet eval_node(const ExprNode& n, const EvalCtx& ctx);

// Evaluate a constant subtree to a plain number (for exponents).
double eval_constant(const ExprNode& n) {
    EvalCtx c{nullptr, 0.0, 0};
    return eval_node(n, c).value();
}

Jet eval_node(const ExprNode& n, const EvalCtx& ctx) {
    switch (n.kind) {
        case Kind::Number: return Jet::constant(ctx.point, ctx.order, n.number);
        case Kind::Const:
            return Jet::constant(ctx.point, ctx.order,
                                 n.name == "pi" ? std::numbers::pi : std::numbers::e);
        case Kind::Var: {
            if (!ctx.bindings)
                throw EvalError("variable '" + n.name + "' in a constant context");
            auto it = ctx.bindings->find(n.name);
            if (it == ctx.bindings->end())
                throw EvalError("unbound variable '" + n.name + "'");
            const Jet& j = it->second;
            if (j.order() < ctx.order)
                throw CapabilityError("binding for '" + n.name + "' has order " +
                                      std::to_string(j.order()) + ", need " +
                                      std::to_string(ctx.order));
            return truncated(j, ctx.order);
        }
        case Kind::Neg: return -eval_node(*n.lhs, ctx);
        case Kind::Add: return eval_node(*n.lhs, ctx) + eval_node(*n.rhs, ctx);
        case Kind::Sub: return eval_node(*n.lhs, ctx) - eval_node(*n.rhs, ctx);
        case Kind::Mul: return eval_node(*n.lhs, ctx) * eval_node(*n.rhs, ctx);
        case Kind::Div: return eval_node(*n.lhs, ctx) / eval_node(*n.rhs, ctx);
        case Kind::Pow: {
            if (is_constant_subtree(*n.rhs))
                return jet_pow(eval_node(*n.lhs, ctx), eval_constant(*n.rhs));
            // variable exponent: a^b = exp(b log a), domain errors propagate
            return jet_exp(eval_node(*n.rhs, ctx) * jet_log(eval_node(*n.lhs, ctx)));
        }
        case Kind::Call: {
            if (n.name == "pow") {
                if (is_constant_subtree(*n.rhs))
                    return jet_pow(eval_node(*n.lhs, ctx), eval_constant(*n.rhs));
                return jet_exp(eval_node(*n.rhs, ctx) * jet_log(eval_node(*n.lhs, ctx)));
            }
            Jet a = eval_node(*n.lhs, ctx);
            if (n.name == "exp") return jet_exp(a);
            if (n.name == "sin") return jet_sin(a);
            if (n.name == "cos") return jet_cos(a);
            if (n.name == "log") return jet_log(a);
            if (n.name == "abs") return jet_abs(a);
            throw EvalError("unknown function '" + n.name + "'");
        }
    }
    throw EvalError("corrupt expression tree");
}

}  // namespace
}  // namespace detail

Expr Expr::parse(std::string_view source) {
    if (source.empty()) throw ParseError("empty expression", 0);
    detail::Parser p(source);
    Expr e;
    e.root_ = p.parse_all();
    detail::collect_vars(*e.root_, e.vars_);
    return e;
}

std::string Expr::str() const {
    if (!root_) return "";
    std::string out;
    detail::print(*root_, out);
    return out;
}

Jet Expr::eval(const std::map<std::string, Jet>& bindings, int order) const {
    if (!root_) throw EvalError("evaluating an empty expression");
    for (const auto& name : vars_)
        if (!bindings.contains(name))
            throw EvalError("unbound variable '" + name + "'");
    // Constant subexpressions must land at the same point as the bound
    // jets, so take the point from the bindings even when no variable is
    // referenced (a constant coefficient still evaluates "at x").
    const double point = bindings.empty() ? 0.0 : bindings.begin()->second.point();
    detail::EvalCtx ctx{&bindings, point, order};
    return detail::eval_node(*root_, ctx);
}

double Expr::eval_value(const std::map<std::string, double>& bindings) const {
    // At order 0 the nominal point never enters the arithmetic; pin it to 0
    // so jets from different variables are compatible.
    std::map<std::string, Jet> jets;
    for (const auto& [name, v] : bindings)
        jets.emplace(name, Jet::constant(0.0, 0, v));
    return eval(jets, 0).value();
}

}  // namespace hopfkit
