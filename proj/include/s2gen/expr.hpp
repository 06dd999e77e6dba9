#ifndef S2GEN_EXPR_HPP
#define S2GEN_EXPR_HPP

#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "s2gen/common.hpp"
#include "s2gen/rng.hpp"

namespace s2gen {

enum class UnaryOp {
    Inv,
    Abs,
    Pow2,
    Pow3,
    Sqrt,
    Sin,
    Cos,
    Tan,
    Arctan,
    Log,
    Exp,
};
inline constexpr int kUnaryOpCount = 11;

enum class BinaryOp { Add, Sub, Mul };
inline constexpr int kBinaryOpCount = 3;

const char* unary_op_name(UnaryOp op);
const char* binary_op_name(BinaryOp op);

/// Expression tree node. Var indices are 1-based (x1, x2, ...).
struct Expr {
    struct Var {
        int index;
    };
    struct Const {
        double value;
    };
    struct Unary {
        UnaryOp op;
        std::unique_ptr<Expr> child;
    };
    struct Binary {
        BinaryOp op;
        std::unique_ptr<Expr> left;
        std::unique_ptr<Expr> right;
    };

    std::variant<Var, Const, Unary, Binary> node;

    Expr() : node(Var{1}) {}
    explicit Expr(Var v) : node(v) {}
    explicit Expr(Const c) : node(c) {}
    explicit Expr(Unary u) : node(std::move(u)) {}
    explicit Expr(Binary b) : node(std::move(b)) {}

    static Expr var(int index) { return Expr(Var{index}); }
    static Expr constant(double value) { return Expr(Const{value}); }
    static Expr unary(UnaryOp op, Expr child) {
        return Expr(Unary{op, std::make_unique<Expr>(std::move(child))});
    }
    static Expr binary(BinaryOp op, Expr left, Expr right) {
        return Expr(Binary{op, std::make_unique<Expr>(std::move(left)),
                           std::make_unique<Expr>(std::move(right))});
    }

    Expr clone() const;

    /// Structural equality; constants compare as exact doubles.
    bool equals(const Expr& other) const;

    int count_binary() const;
    int count_leaves() const;
    int count_unary() const;
    int max_var_index() const;
};

/// One expression per output channel, all over the same M input variables.
struct ExprSet {
    int input_dim = 0;
    std::vector<Expr> exprs;
};

struct ExprSamplerParams {
    int b_min = 1;
    int b_max = -1;  // -1: resolved to M + 5 at sampling time
    int u_min = 0;
    int u_max = 5;
    double affine_prob_leaf = 1.0;
    double affine_prob_unary = 0.5;
    double const_log_mag_lo = -2.0;
    double const_log_mag_hi = 2.0;
    int const_sig_digits = 3;
};

/// Round to `sig_digits` significant (decimal) digits and return the double
/// nearest that decimal. Constants produced this way survive the text
/// round-trip bit-for-bit.
double round_sig_digits(double v, int sig_digits);

ExprSet sample_expr_set(int input_dim, int output_dim,
                        const ExprSamplerParams& params, Rng& rng);

struct EvalResult {
    std::vector<double> values;
    /// valid[t] is false when any intermediate at time t left the operator's
    /// domain or overflowed (inv(0), sqrt(<0), log(<=0), non-finite values).
    std::vector<bool> valid;

    bool all_valid() const {
        for (bool v : valid)
            if (!v) return false;
        return true;
    }
};

EvalResult evaluate(const Expr& e, const Matrix& inputs);

/// Expression body without the "y<k> = " prefix.
std::string serialize_body(const Expr& e, int sig_digits = 3);

/// Full line: "y<out_index> = <body>".
std::string serialize(const Expr& e, int out_index, int sig_digits = 3);

struct ParsedExpr {
    int out_index;
    Expr expr;
};

/// Inverse of serialize. Whitespace-tolerant; throws ParseError with the
/// byte offset on syntax errors, unknown operators and malformed "**k".
ParsedExpr parse(const std::string& text);

}  // namespace s2gen

#endif
