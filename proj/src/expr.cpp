#include "ktorus/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <map>
#include <sstream>
#include <tuple>
#include <unordered_map>

#include "ktorus/elliptic.hpp"
#include "ktorus/errors.hpp"

namespace ktorus {

struct Pool {
    std::vector<Node> nodes;
    std::map<std::tuple<int, int, int, double>, int> index;
    std::unordered_map<int, int> dmemo;

    bool is_const(int i) const { return nodes[i].op == Op::Const; }
    bool is_value(int i, double v) const { return is_const(i) && nodes[i].value == v; }

    int intern(Node n) {
        auto key = std::make_tuple(static_cast<int>(n.op), n.a, n.b, n.value);
        auto it = index.find(key);
        if (it != index.end()) {
            return it->second;
        }
        int id = static_cast<int>(nodes.size());
        nodes.push_back(n);
        index.emplace(key, id);
        return id;
    }

    int cnst(double v) { return intern({Op::Const, -1, -1, v == 0.0 ? 0.0 : v}); }
    int var() { return intern({Op::Var, -1, -1, 0.0}); }

    int unary(Op op, int a, double m = 0.0);
    int binary(Op op, int a, int b);

    int add(int a, int b) { return binary(Op::Add, a, b); }
    int sub(int a, int b) { return binary(Op::Sub, a, b); }
    int mul(int a, int b) { return binary(Op::Mul, a, b); }
    int div(int a, int b) { return binary(Op::Div, a, b); }
    int neg(int a) { return unary(Op::Neg, a); }

    int diff(int id);
    bool depends(int id) const;
};

namespace {

double apply_unary(Op op, double a, double m) {
    switch (op) {
        case Op::Neg: return -a;
        case Op::Sin: return std::sin(a);
        case Op::Cos: return std::cos(a);
        case Op::Exp: return std::exp(a);
        case Op::Ln:
            if (!(a > 0.0)) {
                throw Error(ErrorKind::Domain, "ln of non-positive argument");
            }
            return std::log(a);
        case Op::Sqrt:
            if (a < 0.0) {
                throw Error(ErrorKind::Domain, "sqrt of negative argument");
            }
            return std::sqrt(a);
        case Op::Sn: return sncndn(a, m).sn;
        case Op::Cn: return sncndn(a, m).cn;
        case Op::Dn: return sncndn(a, m).dn;
        default: break;
    }
    throw Error(ErrorKind::Numeric, "bad unary op");
}

double apply_binary(Op op, double a, double b) {
    switch (op) {
        case Op::Add: return a + b;
        case Op::Sub: return a - b;
        case Op::Mul: return a * b;
        case Op::Div:
            if (b == 0.0) {
                throw Error(ErrorKind::Domain, "division by zero");
            }
            return a / b;
        case Op::Pow: {
            double r = std::pow(a, b);
            if (!std::isfinite(r)) {
                throw Error(ErrorKind::Domain, "pow out of domain");
            }
            return r;
        }
        default: break;
    }
    throw Error(ErrorKind::Numeric, "bad binary op");
}

}  // namespace

int Pool::unary(Op op, int a, double m) {
    if (is_const(a)) {
        return cnst(apply_unary(op, nodes[a].value, m));
    }
    if (op == Op::Neg && nodes[a].op == Op::Neg) {
        return nodes[a].a;
    }
    return intern({op, a, -1, m});
}

int Pool::binary(Op op, int a, int b) {
    if (is_const(a) && is_const(b)) {
        return cnst(apply_binary(op, nodes[a].value, nodes[b].value));
    }
    switch (op) {
        case Op::Add:
            if (is_value(a, 0.0)) return b;
            if (is_value(b, 0.0)) return a;
            if (nodes[b].op == Op::Neg) return sub(a, nodes[b].a);
            break;
        case Op::Sub:
            if (is_value(b, 0.0)) return a;
            if (is_value(a, 0.0)) return neg(b);
            if (a == b) return cnst(0.0);
            if (nodes[b].op == Op::Neg) return add(a, nodes[b].a);
            break;
        case Op::Mul:
            if (is_value(a, 0.0) || is_value(b, 0.0)) return cnst(0.0);
            if (is_value(a, 1.0)) return b;
            if (is_value(b, 1.0)) return a;
            if (is_value(a, -1.0)) return neg(b);
            if (is_value(b, -1.0)) return neg(a);
            if (is_const(b)) std::swap(a, b);
            break;
        case Op::Div:
            if (is_value(a, 0.0)) return cnst(0.0);
            if (is_value(b, 1.0)) return a;
            break;
        case Op::Pow:
            if (is_value(b, 1.0)) return a;
            if (is_value(b, 0.0)) return cnst(1.0);
            break;
        default: break;
    }
    return intern({op, a, b, 0.0});
}

bool Pool::depends(int id) const {
    const Node& n = nodes[id];
    if (n.op == Op::Var) return true;
    if (n.op == Op::Const) return false;
    return (n.a >= 0 && depends(n.a)) || (n.b >= 0 && depends(n.b));
}

int Pool::diff(int id) {
    auto it = dmemo.find(id);
    if (it != dmemo.end()) {
        return it->second;
    }
    const Node n = nodes[id];
    int r = -1;
    switch (n.op) {
        case Op::Const: r = cnst(0.0); break;
        case Op::Var: r = cnst(1.0); break;
        case Op::Add: r = add(diff(n.a), diff(n.b)); break;
        case Op::Sub: r = sub(diff(n.a), diff(n.b)); break;
        case Op::Neg: r = neg(diff(n.a)); break;
        case Op::Mul: r = add(mul(diff(n.a), n.b), mul(n.a, diff(n.b))); break;
        case Op::Div:
            r = div(sub(diff(n.a), mul(id, diff(n.b))), n.b);
            break;
        case Op::Pow:
            if (is_const(n.b)) {
                double c = nodes[n.b].value;
                r = mul(mul(cnst(c), binary(Op::Pow, n.a, cnst(c - 1.0))), diff(n.a));
            } else {
                r = mul(id, add(mul(diff(n.b), unary(Op::Ln, n.a)),
                                div(mul(n.b, diff(n.a)), n.a)));
            }
            break;
        case Op::Sin: r = mul(unary(Op::Cos, n.a), diff(n.a)); break;
        case Op::Cos: r = neg(mul(unary(Op::Sin, n.a), diff(n.a))); break;
        case Op::Ln: r = div(diff(n.a), n.a); break;
        case Op::Exp: r = mul(id, diff(n.a)); break;
        case Op::Sqrt: r = div(diff(n.a), mul(cnst(2.0), id)); break;
        case Op::Sn:
            r = mul(mul(unary(Op::Cn, n.a, n.value), unary(Op::Dn, n.a, n.value)), diff(n.a));
            break;
        case Op::Cn:
            r = neg(mul(mul(unary(Op::Sn, n.a, n.value), unary(Op::Dn, n.a, n.value)), diff(n.a)));
            break;
        case Op::Dn:
            r = neg(mul(mul(cnst(n.value),
                            mul(unary(Op::Sn, n.a, n.value), unary(Op::Cn, n.a, n.value))),
                        diff(n.a)));
            break;
    }
    dmemo[id] = r;
    return r;
}

namespace {

// ---------------------------------------------------------------- parser

class Parser {
public:
    Parser(const std::string& src, Pool& pool) : src_(src), pool_(pool) {}

    int parse_all() {
        skip();
        if (pos_ >= src_.size()) {
            fail("empty expression", pos_, 1);
        }
        int r = expr();
        skip();
        if (pos_ < src_.size()) {
            fail("unexpected input", pos_, src_.size() - pos_);
        }
        return r;
    }

private:
    [[noreturn]] void fail(const std::string& msg, std::size_t pos, std::size_t len) {
        throw ParseError(msg, src_, pos, len == 0 ? 1 : len);
    }

    void skip() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }

    bool accept(char c) {
        skip();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'", pos_, 1);
        }
    }

    int expr() {
        int lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = pool_.add(lhs, term());
            } else if (accept('-')) {
                lhs = pool_.sub(lhs, term());
            } else {
                return lhs;
            }
        }
    }

    int term() {
        int lhs = unary();
        for (;;) {
            if (accept('*')) {
                lhs = pool_.mul(lhs, unary());
            } else if (accept('/')) {
                std::size_t at = pos_;
                int rhs = unary();
                if (pool_.is_value(rhs, 0.0)) {
                    fail("division by constant zero", at, pos_ - at);
                }
                lhs = pool_.div(lhs, rhs);
            } else {
                return lhs;
            }
        }
    }

    int unary() {
        if (accept('-')) {
            return pool_.neg(unary());
        }
        if (accept('+')) {
            return unary();
        }
        int base = primary();
        if (accept('^')) {
            return pool_.binary(Op::Pow, base, unary());
        }
        return base;
    }

    int number() {
        const char* begin = src_.c_str() + pos_;
        char* end = nullptr;
        double v = std::strtod(begin, &end);
        if (end == begin) {
            fail("bad number", pos_, 1);
        }
        pos_ += static_cast<std::size_t>(end - begin);
        return pool_.cnst(v);
    }

    int primary() {
        skip();
        if (pos_ >= src_.size()) {
            fail("unexpected end of expression", pos_, 1);
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (c == '(') {
            ++pos_;
            int r = expr();
            expect(')');
            return r;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                ++pos_;
            }
            std::string name = src_.substr(start, pos_ - start);
            if (name == "x") return pool_.var();
            if (name == "pi") return pool_.cnst(M_PI);
            return call(name, start);
        }
        fail(std::string("unexpected character '") + c + "'", pos_, 1);
    }

    double const_arg(int id, std::size_t at, const char* what) {
        if (!pool_.is_const(id)) {
            fail(std::string(what) + " must be a constant", at, pos_ - at);
        }
        return pool_.nodes[id].value;
    }

    int call(const std::string& name, std::size_t start) {
        skip();
        if (!accept('(')) {
            fail("unknown identifier '" + name + "'", start, name.size());
        }
        std::vector<int> args;
        std::vector<std::size_t> at;
        if (!accept(')')) {
            do {
                skip();
                at.push_back(pos_);
                args.push_back(expr());
            } while (accept(','));
            expect(')');
        }
        auto arity = [&](std::size_t n) {
            if (args.size() != n) {
                fail(name + " expects " + std::to_string(n) + " argument(s)", start,
                     pos_ - start);
            }
        };
        auto param = [&]() {
            double m = const_arg(args[1], at[1], "jacobi parameter");
            if (m < 0.0 || m > 1.0) {
                fail("jacobi parameter must lie in [0,1]", at[1], 1);
            }
            return m;
        };
        if (name == "sin") { arity(1); return pool_.unary(Op::Sin, args[0]); }
        if (name == "cos") { arity(1); return pool_.unary(Op::Cos, args[0]); }
        if (name == "exp") { arity(1); return pool_.unary(Op::Exp, args[0]); }
        if (name == "ln" || name == "log") { arity(1); return pool_.unary(Op::Ln, args[0]); }
        if (name == "sqrt") { arity(1); return pool_.unary(Op::Sqrt, args[0]); }
        if (name == "pow") { arity(2); return pool_.binary(Op::Pow, args[0], args[1]); }
        if (name == "jacobi_sn") { arity(2); return pool_.unary(Op::Sn, args[0], param()); }
        if (name == "jacobi_cn") { arity(2); return pool_.unary(Op::Cn, args[0], param()); }
        if (name == "jacobi_dn") { arity(2); return pool_.unary(Op::Dn, args[0], param()); }
        if (name == "jacobi_sd") {
            arity(2);
            double m = param();
            return pool_.div(pool_.unary(Op::Sn, args[0], m), pool_.unary(Op::Dn, args[0], m));
        }
        if (name == "ellipk") {
            arity(1);
            double m = const_arg(args[0], at[0], "ellipk argument");
            if (m < 0.0 || m >= 1.0) {
                fail("ellipk needs 0 <= m < 1", at[0], 1);
            }
            return pool_.cnst(ellipk(m));
        }
        fail("unknown function '" + name + "'", start, name.size());
    }

    const std::string& src_;
    Pool& pool_;
    std::size_t pos_ = 0;
};

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string render_node(const Pool& p, int id) {
    const Node& n = p.nodes[id];
    auto r = [&](int k) { return render_node(p, k); };
    switch (n.op) {
        case Op::Const: return n.value < 0 ? "(" + fmt_num(n.value) + ")" : fmt_num(n.value);
        case Op::Var: return "x";
        case Op::Add: return "(" + r(n.a) + " + " + r(n.b) + ")";
        case Op::Sub: return "(" + r(n.a) + " - " + r(n.b) + ")";
        case Op::Mul: return "(" + r(n.a) + " * " + r(n.b) + ")";
        case Op::Div: return "(" + r(n.a) + " / " + r(n.b) + ")";
        case Op::Pow: return "(" + r(n.a) + ")^(" + r(n.b) + ")";
        case Op::Neg: return "(-" + r(n.a) + ")";
        case Op::Sin: return "sin(" + r(n.a) + ")";
        case Op::Cos: return "cos(" + r(n.a) + ")";
        case Op::Ln: return "ln(" + r(n.a) + ")";
        case Op::Exp: return "exp(" + r(n.a) + ")";
        case Op::Sqrt: return "sqrt(" + r(n.a) + ")";
        case Op::Sn: return "jacobi_sn(" + r(n.a) + ", " + fmt_num(n.value) + ")";
        case Op::Cn: return "jacobi_cn(" + r(n.a) + ", " + fmt_num(n.value) + ")";
        case Op::Dn: return "jacobi_dn(" + r(n.a) + ", " + fmt_num(n.value) + ")";
    }
    return "?";
}

void collect(const Pool& p, int id, std::vector<char>& seen) {
    if (seen[id]) return;
    seen[id] = 1;
    const Node& n = p.nodes[id];
    if (n.a >= 0) collect(p, n.a, seen);
    if (n.b >= 0) collect(p, n.b, seen);
}

thread_local std::vector<double> tl_scratch;

}  // namespace

ParseError::ParseError(const std::string& msg, std::string source, std::size_t pos,
                       std::size_t len)
    : Error(ErrorKind::Parse, msg + " at column " + std::to_string(pos + 1)),
      source_(std::move(source)),
      pos_(pos),
      len_(len) {}

std::string ParseError::pretty() const {
    std::string caret(pos_, ' ');
    caret += std::string(len_, '^');
    return std::string(what()) + "\n  " + source_ + "\n  " + caret;
}

const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::Parse: return "ParseError";
        case ErrorKind::Domain: return "DomainError";
        case ErrorKind::NonPeriodic: return "NonPeriodic";
        case ErrorKind::DegenerateZero: return "DegenerateZero";
        case ErrorKind::OutOfBand: return "OutOfBand";
        case ErrorKind::NoTangency: return "NoTangency";
        case ErrorKind::HorizonExceeded: return "HorizonExceeded";
        case ErrorKind::BranchSingular: return "BranchSingular";
        case ErrorKind::SpanExhausted: return "SpanExhausted";
        case ErrorKind::NotPeriodic: return "NotPeriodic";
        case ErrorKind::NotApplicable: return "NotApplicable";
        case ErrorKind::QuadratureSingular: return "QuadratureSingular";
        case ErrorKind::Config: return "ConfigError";
        case ErrorKind::Numeric: return "NumericFailure";
    }
    return "Unknown";
}

// ---------------------------------------------------------------- Expression

Expression Expression::parse(const std::string& source) {
    auto pool = std::make_shared<Pool>();
    Parser parser(source, *pool);
    int root = parser.parse_all();
    Expression e;
    e.roots_[0] = root;
    for (int k = 1; k <= kMaxOrder; ++k) {
        e.roots_[k] = pool->diff(e.roots_[k - 1]);
    }
    for (int k = 0; k <= kMaxOrder; ++k) {
        std::vector<char> seen(pool->nodes.size(), 0);
        for (int j = 0; j <= k; ++j) {
            collect(*pool, e.roots_[j], seen);
        }
        for (int i = 0; i < static_cast<int>(seen.size()); ++i) {
            if (seen[i]) e.programs_[k].push_back(i);
        }
    }
    pool->dmemo.clear();
    pool->index.clear();
    e.pool_ = std::move(pool);
    e.source_ = source;
    return e;
}

Expression Expression::constant(double c) {
    return parse(fmt_num(c));
}

bool Expression::depends_on_x() const { return pool_->depends(roots_[0]); }

std::size_t Expression::node_count() const { return pool_->nodes.size(); }

std::string Expression::render(int order) const {
    return render_node(*pool_, roots_.at(static_cast<std::size_t>(order)));
}

std::array<double, 4> Expression::eval_derivs(double x, int order) const {
    if (order < 0 || order > kMaxOrder) {
        throw Error(ErrorKind::Numeric, "derivative order out of range");
    }
    const auto& nodes = pool_->nodes;
    std::vector<double>& v = tl_scratch;
    if (v.size() < nodes.size()) {
        v.resize(nodes.size());
    }
    for (int id : programs_[static_cast<std::size_t>(order)]) {
        const Node& n = nodes[id];
        switch (n.op) {
            case Op::Const: v[id] = n.value; break;
            case Op::Var: v[id] = x; break;
            case Op::Add: v[id] = v[n.a] + v[n.b]; break;
            case Op::Sub: v[id] = v[n.a] - v[n.b]; break;
            case Op::Mul: v[id] = v[n.a] * v[n.b]; break;
            case Op::Div: case Op::Pow: v[id] = apply_binary(n.op, v[n.a], v[n.b]); break;
            default: v[id] = apply_unary(n.op, v[n.a], n.value); break;
        }
    }
    std::array<double, 4> out{0.0, 0.0, 0.0, 0.0};
    for (int k = 0; k <= order; ++k) {
        out[k] = v[roots_[k]];
    }
    return out;
}

double Expression::eval(double x) const { return eval_derivs(x, 0)[0]; }

}  // namespace ktorus
