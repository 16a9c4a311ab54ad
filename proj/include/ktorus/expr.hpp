#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

namespace ktorus {

enum class Op : unsigned char {
    Const, Var, Add, Sub, Mul, Div, Neg, Pow,
    Sin, Cos, Ln, Exp, Sqrt,
    Sn, Cn, Dn,  // Jacobi sn/cn/dn, parameter stored in the node
};

struct Node {
    Op op;
    int a = -1;
    int b = -1;
    double value = 0.0;  // constant value, or Jacobi parameter m
};

struct Pool;

// Closed-form expression in one variable x with exact derivatives to order 3.
// Derivative trees are built once by rule on the hash-consed node pool and
// evaluated as one straight-line program, so shared subterms run once.
class Expression {
public:
    static constexpr int kMaxOrder = 3;

    // Parses the DSL: + - * / ^, unary minus, numbers, x, pi, and the calls
    // sin cos exp ln log sqrt pow jacobi_sn jacobi_cn jacobi_dn jacobi_sd ellipk.
    static Expression parse(const std::string& source);
    static Expression constant(double c);

    double eval(double x) const;
    // out[k] = f^(k)(x) for k <= order; entries above order are left 0.
    std::array<double, 4> eval_derivs(double x, int order = kMaxOrder) const;

    const std::string& source() const { return source_; }
    bool depends_on_x() const;
    bool is_constant() const { return !depends_on_x(); }
    std::size_t node_count() const;
    // DSL rendering of the k-th derivative tree (reparseable).
    std::string render(int order = 0) const;

private:
    std::shared_ptr<const Pool> pool_;
    std::array<int, kMaxOrder + 1> roots_{};
    std::array<std::vector<int>, kMaxOrder + 1> programs_;
    std::string source_;
};

}  // namespace ktorus
