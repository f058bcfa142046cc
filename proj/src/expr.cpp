#include "igkit/expr.hpp"

#include "igkit/errors.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace igkit {

struct Expression::Node {
    enum class Op {
        Literal, VarX, VarW,
        Add, Sub, Mul, Div, Pow, Neg,
        Exp, Log, Sqrt, Cosh, Abs
    };
    Op op = Op::Literal;
    double value = 0.0; ///< Literal
    int index = 0;      ///< 1-based for VarX / VarW
    std::shared_ptr<const Node> a, b;
};

namespace {

using Node = Expression::Node;
using NodePtr = std::shared_ptr<const Node>;
using Op = Node::Op;

NodePtr mk(Op op, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<Node>();
    n->op = op;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

struct Parser {
    const std::string& s;
    std::size_t pos = 0;

    explicit Parser(const std::string& text) : s(text) {}

    void skip() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }
    bool eat(char c) {
        skip();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }
    char peek() {
        skip();
        return pos < s.size() ? s[pos] : '\0';
    }

    [[noreturn]] void fail(const std::string& msg) { throw SyntaxError(msg, pos); }

    // expr := term (('+'|'-') term)*
    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (eat('+'))
                lhs = mk(Op::Add, lhs, term());
            else if (eat('-'))
                lhs = mk(Op::Sub, lhs, term());
            else
                return lhs;
        }
    }

    // term := unary (('*'|'/') unary)*
    NodePtr term() {
        NodePtr lhs = unary();
        for (;;) {
            if (eat('*'))
                lhs = mk(Op::Mul, lhs, unary());
            else if (eat('/'))
                lhs = mk(Op::Div, lhs, unary());
            else
                return lhs;
        }
    }

    // unary := '-' unary | power      (so -a^b parses as -(a^b))
    NodePtr unary() {
        if (eat('-')) return mk(Op::Neg, unary());
        return power();
    }

    // power := primary ('^' unary)?   (right associative)
    NodePtr power() {
        NodePtr base = primary();
        if (eat('^')) return mk(Op::Pow, base, unary());
        return base;
    }

    NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
        if (c == '(') {
            ++pos;
            NodePtr inner = expr();
            if (!eat(')')) fail("expected ')'");
            return inner;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        std::size_t start = pos;
        while (pos < s.size() &&
               (std::isdigit(static_cast<unsigned char>(s[pos])) || s[pos] == '.' ||
                s[pos] == 'e' || s[pos] == 'E' ||
                ((s[pos] == '+' || s[pos] == '-') && pos > start &&
                 (s[pos - 1] == 'e' || s[pos - 1] == 'E'))))
            ++pos;
        try {
            std::size_t used = 0;
            double v = std::stod(s.substr(start, pos - start), &used);
            if (used != pos - start) fail("malformed number");
            auto n = std::make_shared<Node>();
            n->op = Op::Literal;
            n->value = v;
            return n;
        } catch (const std::exception&) {
            pos = start;
            fail("malformed number");
        }
    }

    NodePtr identifier() {
        std::size_t start = pos;
        while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) ||
                                  s[pos] == '_'))
            ++pos;
        std::string name = s.substr(start, pos - start);

        if ((name[0] == 'x' || name[0] == 'w') && name.size() > 1 &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            int idx = std::stoi(name.substr(1));
            if (idx < 1) fail("variable index must be >= 1");
            if (name[0] == 'w' && idx > 2)
                throw UnknownIdentifier("sample variable " + name);
            auto n = std::make_shared<Node>();
            n->op = name[0] == 'x' ? Op::VarX : Op::VarW;
            n->index = idx;
            return n;
        }

        auto unary_fn = [&](Op op) {
            if (!eat('(')) fail("expected '(' after " + name);
            NodePtr arg = expr();
            if (eat(',')) throw ArityError(name + " takes one argument");
            if (!eat(')')) fail("expected ')'");
            return mk(op, arg);
        };
        if (name == "exp") return unary_fn(Op::Exp);
        if (name == "log") return unary_fn(Op::Log);
        if (name == "sqrt") return unary_fn(Op::Sqrt);
        if (name == "cosh") return unary_fn(Op::Cosh);
        if (name == "abs") return unary_fn(Op::Abs);
        if (name == "pow") {
            if (!eat('(')) fail("expected '(' after pow");
            NodePtr a = expr();
            if (!eat(',')) throw ArityError("pow takes two arguments");
            NodePtr b = expr();
            if (!eat(')')) fail("expected ')'");
            return mk(Op::Pow, a, b);
        }
        throw UnknownIdentifier(name);
    }
};

int max_index(const NodePtr& n, Op which) {
    if (!n) return 0;
    int m = n->op == which ? n->index : 0;
    return std::max({m, max_index(n->a, which), max_index(n->b, which)});
}

double eval_node(const Node& n, std::span<const double> x, const Point& w) {
    auto finite = [](double v) {
        if (!std::isfinite(v)) throw NonFinite("expression value is not finite");
        return v;
    };
    switch (n.op) {
        case Op::Literal: return n.value;
        case Op::VarX:
            if (n.index > static_cast<int>(x.size()))
                throw DomainError("parameter x" + std::to_string(n.index) +
                                  " beyond supplied dimension");
            return x[n.index - 1];
        case Op::VarW:
            if (n.index > w.arity)
                throw DomainError("sample variable w" + std::to_string(n.index) +
                                  " on a non-product point");
            return w.w(n.index - 1);
        case Op::Add: return finite(eval_node(*n.a, x, w) + eval_node(*n.b, x, w));
        case Op::Sub: return finite(eval_node(*n.a, x, w) - eval_node(*n.b, x, w));
        case Op::Mul: return finite(eval_node(*n.a, x, w) * eval_node(*n.b, x, w));
        case Op::Div: {
            double d = eval_node(*n.b, x, w);
            if (d == 0.0) throw DomainError("division by zero");
            return finite(eval_node(*n.a, x, w) / d);
        }
        case Op::Pow: {
            double base = eval_node(*n.a, x, w);
            double expn = eval_node(*n.b, x, w);
            if (base < 0.0 && expn != std::floor(expn))
                throw DomainError("fractional power of a negative base");
            if (base == 0.0 && expn < 0.0) throw DomainError("zero to a negative power");
            return finite(std::pow(base, expn));
        }
        case Op::Neg: return -eval_node(*n.a, x, w);
        case Op::Exp: return finite(std::exp(eval_node(*n.a, x, w)));
        case Op::Log: {
            double v = eval_node(*n.a, x, w);
            if (v <= 0.0) throw DomainError("log of a non-positive value");
            return std::log(v);
        }
        case Op::Sqrt: {
            double v = eval_node(*n.a, x, w);
            if (v < 0.0) throw DomainError("sqrt of a negative value");
            return std::sqrt(v);
        }
        case Op::Cosh: return finite(std::cosh(eval_node(*n.a, x, w)));
        case Op::Abs: return std::abs(eval_node(*n.a, x, w));
    }
    throw NonFinite("unreachable");
}

void print_node(const Node& n, std::ostringstream& out) {
    auto paren = [&](const Node& child) {
        out << '(';
        print_node(child, out);
        out << ')';
    };
    switch (n.op) {
        case Op::Literal: out << n.value; return;
        case Op::VarX: out << 'x' << n.index; return;
        case Op::VarW: out << 'w' << n.index; return;
        case Op::Add: paren(*n.a); out << " + "; paren(*n.b); return;
        case Op::Sub: paren(*n.a); out << " - "; paren(*n.b); return;
        case Op::Mul: paren(*n.a); out << " * "; paren(*n.b); return;
        case Op::Div: paren(*n.a); out << " / "; paren(*n.b); return;
        case Op::Pow: paren(*n.a); out << " ^ "; paren(*n.b); return;
        case Op::Neg: out << "-"; paren(*n.a); return;
        case Op::Exp: out << "exp"; paren(*n.a); return;
        case Op::Log: out << "log"; paren(*n.a); return;
        case Op::Sqrt: out << "sqrt"; paren(*n.a); return;
        case Op::Cosh: out << "cosh"; paren(*n.a); return;
        case Op::Abs: out << "abs"; paren(*n.a); return;
    }
}

bool same_node(const NodePtr& a, const NodePtr& b) {
    if (!a || !b) return a == b;
    if (a->op != b->op || a->value != b->value || a->index != b->index) return false;
    return same_node(a->a, b->a) && same_node(a->b, b->b);
}

} // namespace

Expression Expression::parse(const std::string& text) {
    Parser p(text);
    NodePtr root = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    Expression e;
    e.root_ = std::move(root);
    return e;
}

std::string Expression::print() const {
    std::ostringstream out;
    out.precision(17);
    print_node(*root_, out);
    return out.str();
}

int Expression::param_dim() const { return max_index(root_, Op::VarX); }
int Expression::sample_arity() const { return max_index(root_, Op::VarW); }

double Expression::eval(std::span<const double> x, const Point& w) const {
    return eval_node(*root_, x, w);
}

bool Expression::same_tree(const Expression& other) const {
    return same_node(root_, other.root_);
}

double dlog_dv(const Expression& e, std::span<const double> x,
               std::span<const double> v, const Point& w, const DiffConfig& cfg) {
    bool zero = true;
    for (double vi : v)
        if (vi != 0.0) zero = false;
    if (zero) return 0.0;

    double xmax = 1.0;
    for (double xi : x) xmax = std::max(xmax, std::abs(xi));
    double h = cfg.step_scale * xmax;
    if (!cfg.step_override.empty()) h = cfg.step_override.front();

    std::vector<double> plus(x.begin(), x.end()), minus(x.begin(), x.end());
    for (std::size_t i = 0; i < x.size(); ++i) {
        plus[i] += h * v[i];
        minus[i] -= h * v[i];
    }
    double fp = e.eval(plus, w);
    double fm = e.eval(minus, w);
    if (fp <= 0.0 || fm <= 0.0)
        throw DomainError("density not positive on the difference stencil");
    return (std::log(fp) - std::log(fm)) / (2.0 * h);
}

} // namespace igkit
