#include "s2gen/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <limits>

namespace s2gen {

const char* unary_op_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Inv: return "inv";
        case UnaryOp::Abs: return "abs";
        case UnaryOp::Pow2: return "pow2";
        case UnaryOp::Pow3: return "pow3";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Sin: return "sin";
        case UnaryOp::Cos: return "cos";
        case UnaryOp::Tan: return "tan";
        case UnaryOp::Arctan: return "arctan";
        case UnaryOp::Log: return "log";
        case UnaryOp::Exp: return "exp";
    }
    return "?";
}

const char* binary_op_name(BinaryOp op) {
    switch (op) {
        case BinaryOp::Add: return "add";
        case BinaryOp::Sub: return "sub";
        case BinaryOp::Mul: return "mul";
    }
    return "?";
}

Expr Expr::clone() const {
    if (const auto* v = std::get_if<Var>(&node)) return Expr(*v);
    if (const auto* c = std::get_if<Const>(&node)) return Expr(*c);
    if (const auto* u = std::get_if<Unary>(&node))
        return unary(u->op, u->child->clone());
    const auto& b = std::get<Binary>(node);
    return binary(b.op, b.left->clone(), b.right->clone());
}

bool Expr::equals(const Expr& other) const {
    if (node.index() != other.node.index()) return false;
    if (const auto* v = std::get_if<Var>(&node))
        return v->index == std::get<Var>(other.node).index;
    if (const auto* c = std::get_if<Const>(&node))
        return c->value == std::get<Const>(other.node).value;
    if (const auto* u = std::get_if<Unary>(&node)) {
        const auto& ou = std::get<Unary>(other.node);
        return u->op == ou.op && u->child->equals(*ou.child);
    }
    const auto& b = std::get<Binary>(node);
    const auto& ob = std::get<Binary>(other.node);
    return b.op == ob.op && b.left->equals(*ob.left) && b.right->equals(*ob.right);
}

int Expr::count_binary() const {
    if (const auto* b = std::get_if<Binary>(&node))
        return 1 + b->left->count_binary() + b->right->count_binary();
    if (const auto* u = std::get_if<Unary>(&node)) return u->child->count_binary();
    return 0;
}

int Expr::count_leaves() const {
    if (const auto* b = std::get_if<Binary>(&node))
        return b->left->count_leaves() + b->right->count_leaves();
    if (const auto* u = std::get_if<Unary>(&node)) return u->child->count_leaves();
    return 1;
}

int Expr::count_unary() const {
    if (const auto* b = std::get_if<Binary>(&node))
        return b->left->count_unary() + b->right->count_unary();
    if (const auto* u = std::get_if<Unary>(&node)) return 1 + u->child->count_unary();
    return 0;
}

int Expr::max_var_index() const {
    if (const auto* v = std::get_if<Var>(&node)) return v->index;
    if (std::get_if<Const>(&node)) return 0;
    if (const auto* u = std::get_if<Unary>(&node)) return u->child->max_var_index();
    const auto& b = std::get<Binary>(node);
    return std::max(b.left->max_var_index(), b.right->max_var_index());
}

double round_sig_digits(double v, int sig_digits) {
    if (v == 0.0 || !std::isfinite(v)) return v;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig_digits, v);
    return std::strtod(buf, nullptr);
}

// ---------------------------------------------------------------------------
// Sampling
// ---------------------------------------------------------------------------

namespace {

BinaryOp draw_binary_op(Rng& rng) {
    return static_cast<BinaryOp>(rng.uniform_int(kBinaryOpCount));
}

UnaryOp draw_unary_op(Rng& rng) {
    return static_cast<UnaryOp>(rng.uniform_int(kUnaryOpCount));
}

double draw_affine_const(const ExprSamplerParams& p, Rng& rng) {
    const double sign = rng.uniform_int(2) == 0 ? 1.0 : -1.0;
    const double mag =
        std::pow(10.0, rng.uniform(p.const_log_mag_lo, p.const_log_mag_hi));
    return round_sig_digits(sign * mag, p.const_sig_digits);
}

void collect_leaves(Expr* e, std::vector<Expr*>& out) {
    if (std::get_if<Expr::Var>(&e->node) || std::get_if<Expr::Const>(&e->node)) {
        out.push_back(e);
        return;
    }
    if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
        collect_leaves(u->child.get(), out);
        return;
    }
    auto& b = std::get<Expr::Binary>(e->node);
    collect_leaves(b.left.get(), out);
    collect_leaves(b.right.get(), out);
}

void collect_nodes_preorder(Expr* e, std::vector<Expr*>& out) {
    out.push_back(e);
    if (auto* u = std::get_if<Expr::Unary>(&e->node)) {
        collect_nodes_preorder(u->child.get(), out);
    } else if (auto* b = std::get_if<Expr::Binary>(&e->node)) {
        collect_nodes_preorder(b->left.get(), out);
        collect_nodes_preorder(b->right.get(), out);
    }
}

// Wraps *slot in place: slot becomes op(old_subtree).
void wrap_unary_in_place(Expr* slot, UnaryOp op) {
    Expr old(std::move(*slot));
    *slot = Expr::unary(op, std::move(old));
}

// Wraps *slot in place: slot becomes (b add (a mul old_subtree)).
void wrap_affine_in_place(Expr* slot, double a, double b) {
    Expr old(std::move(*slot));
    Expr scaled = Expr::binary(BinaryOp::Mul, Expr::constant(a), std::move(old));
    *slot = Expr::binary(BinaryOp::Add, Expr::constant(b), std::move(scaled));
}

Expr sample_one(int input_dim, const ExprSamplerParams& params, Rng& rng) {
    const int b_max = params.b_max >= 0 ? params.b_max : input_dim + 5;
    const int b = static_cast<int>(rng.uniform_range(params.b_min, b_max));

    // Skeleton: grow b binary nodes by expanding a uniformly chosen leaf.
    Expr root = Expr::var(1);
    for (int step = 0; step < b; ++step) {
        std::vector<Expr*> leaves;
        collect_leaves(&root, leaves);
        Expr* leaf = leaves[rng.uniform_int(leaves.size())];
        const BinaryOp op = draw_binary_op(rng);
        *leaf = Expr::binary(op, Expr::var(1), Expr::var(1));
    }

    // Assign variable indices left to right.
    {
        std::vector<Expr*> leaves;
        collect_leaves(&root, leaves);
        for (Expr* leaf : leaves)
            *leaf = Expr::var(1 + static_cast<int>(rng.uniform_int(input_dim)));
    }

    // Unary insertion: each site is either the root slot or the edge above a
    // non-root node; preorder index 0 is the root slot.
    const int u = static_cast<int>(rng.uniform_range(params.u_min, params.u_max));
    for (int step = 0; step < u; ++step) {
        std::vector<Expr*> nodes;
        collect_nodes_preorder(&root, nodes);
        Expr* site = nodes[rng.uniform_int(nodes.size())];
        wrap_unary_in_place(site, draw_unary_op(rng));
    }

    // Affine transforms on the variables and unary nodes present now.
    std::vector<Expr*> nodes;
    collect_nodes_preorder(&root, nodes);
    for (Expr* node : nodes) {
        const bool is_var = std::get_if<Expr::Var>(&node->node) != nullptr;
        const bool is_unary = std::get_if<Expr::Unary>(&node->node) != nullptr;
        if (!is_var && !is_unary) continue;
        const double prob =
            is_var ? params.affine_prob_leaf : params.affine_prob_unary;
        if (!rng.bernoulli(prob)) continue;
        const double a = draw_affine_const(params, rng);
        const double bb = draw_affine_const(params, rng);
        wrap_affine_in_place(node, a, bb);
    }
    return root;
}

}  // namespace

ExprSet sample_expr_set(int input_dim, int output_dim,
                        const ExprSamplerParams& params, Rng& rng) {
    if (input_dim < 1 || output_dim < 1)
        throw std::invalid_argument("sample_expr_set: dims must be >= 1");
    if (params.b_min < 1 || params.u_min < 0 ||
        (params.b_max >= 0 && params.b_max < params.b_min) ||
        params.u_max < params.u_min)
        throw std::invalid_argument("sample_expr_set: invalid operator bounds");
    ExprSet set;
    set.input_dim = input_dim;
    set.exprs.reserve(output_dim);
    for (int i = 0; i < output_dim; ++i)
        set.exprs.push_back(sample_one(input_dim, params, rng));
    return set;
}

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

namespace {

void eval_rec(const Expr& e, const Matrix& x, std::vector<double>& out,
              std::vector<bool>& valid) {
    const std::size_t n = x.cols;
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        const double* row = x.row(static_cast<std::size_t>(v->index - 1));
        out.assign(row, row + n);
        return;
    }
    if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
        out.assign(n, c->value);
        return;
    }
    if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        eval_rec(*u->child, x, out, valid);
        for (std::size_t t = 0; t < n; ++t) {
            double z = out[t];
            switch (u->op) {
                case UnaryOp::Inv: z = 1.0 / z; break;
                case UnaryOp::Abs: z = std::fabs(z); break;
                case UnaryOp::Pow2: z = z * z; break;
                case UnaryOp::Pow3: z = z * z * z; break;
                case UnaryOp::Sqrt: z = std::sqrt(z); break;
                case UnaryOp::Sin: z = std::sin(z); break;
                case UnaryOp::Cos: z = std::cos(z); break;
                case UnaryOp::Tan: z = std::tan(z); break;
                case UnaryOp::Arctan: z = std::atan(z); break;
                case UnaryOp::Log: z = std::log(z); break;
                case UnaryOp::Exp: z = std::exp(z); break;
            }
            out[t] = z;
            if (!std::isfinite(z)) valid[t] = false;
        }
        return;
    }
    const auto& b = std::get<Expr::Binary>(e.node);
    std::vector<double> rhs;
    eval_rec(*b.left, x, out, valid);
    eval_rec(*b.right, x, rhs, valid);
    for (std::size_t t = 0; t < n; ++t) {
        double z;
        switch (b.op) {
            case BinaryOp::Add: z = out[t] + rhs[t]; break;
            case BinaryOp::Sub: z = out[t] - rhs[t]; break;
            default: z = out[t] * rhs[t]; break;
        }
        out[t] = z;
        if (!std::isfinite(z)) valid[t] = false;
    }
}

}  // namespace

EvalResult evaluate(const Expr& e, const Matrix& inputs) {
    const int max_var = e.max_var_index();
    if (static_cast<std::size_t>(max_var) > inputs.rows)
        throw std::invalid_argument(
            "evaluate: expression uses x" + std::to_string(max_var) + " but input has " +
            std::to_string(inputs.rows) + " channels");
    EvalResult res;
    res.valid.assign(inputs.cols, true);
    eval_rec(e, inputs, res.values, res.valid);
    // Domain violations that round back to finite values (e.g. exp(-inf))
    // are already caught per node; a non-finite survivor is caught here too.
    for (std::size_t t = 0; t < inputs.cols; ++t)
        if (!std::isfinite(res.values[t])) res.valid[t] = false;
    return res;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

namespace {

void format_const(std::string& out, double v, int sig_digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", sig_digits, v);
    out += buf;
}

void serialize_rec(const Expr& e, std::string& out, int sig_digits) {
    if (const auto* v = std::get_if<Expr::Var>(&e.node)) {
        out += 'x';
        out += std::to_string(v->index);
        return;
    }
    if (const auto* c = std::get_if<Expr::Const>(&e.node)) {
        format_const(out, c->value, sig_digits);
        return;
    }
    if (const auto* u = std::get_if<Expr::Unary>(&e.node)) {
        if (u->op == UnaryOp::Pow2 || u->op == UnaryOp::Pow3) {
            out += '(';
            serialize_rec(*u->child, out, sig_digits);
            out += u->op == UnaryOp::Pow2 ? ")**2" : ")**3";
        } else {
            out += unary_op_name(u->op);
            out += '(';
            serialize_rec(*u->child, out, sig_digits);
            out += ')';
        }
        return;
    }
    const auto& b = std::get<Expr::Binary>(e.node);
    out += '(';
    serialize_rec(*b.left, out, sig_digits);
    out += ' ';
    out += binary_op_name(b.op);
    out += ' ';
    serialize_rec(*b.right, out, sig_digits);
    out += ')';
}

}  // namespace

std::string serialize_body(const Expr& e, int sig_digits) {
    std::string out;
    serialize_rec(e, out, sig_digits);
    return out;
}

std::string serialize(const Expr& e, int out_index, int sig_digits) {
    std::string out = "y" + std::to_string(out_index) + " = ";
    serialize_rec(e, out, sig_digits);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

struct Lexer {
    const std::string& text;
    std::size_t pos = 0;

    explicit Lexer(const std::string& t) : text(t) {}

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos])))
            ++pos;
    }

    bool eof() {
        skip_ws();
        return pos >= text.size();
    }

    char peek() {
        skip_ws();
        return pos < text.size() ? text[pos] : '\0';
    }

    bool accept(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) throw ParseError(std::string("expected '") + c + "' (" + what + ")", pos);
    }

    bool accept_power() {
        skip_ws();
        if (pos + 1 < text.size() && text[pos] == '*' && text[pos + 1] == '*') {
            pos += 2;
            return true;
        }
        return false;
    }

    // A name token: [A-Za-z][A-Za-z0-9]*
    std::string read_name() {
        skip_ws();
        std::size_t start = pos;
        if (pos >= text.size() || !std::isalpha(static_cast<unsigned char>(text[pos])))
            throw ParseError("expected a name", pos);
        while (pos < text.size() &&
               (std::isalnum(static_cast<unsigned char>(text[pos]))))
            ++pos;
        return text.substr(start, pos - start);
    }

    bool looks_like_number() {
        skip_ws();
        if (pos >= text.size()) return false;
        const char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return true;
        if ((c == '-' || c == '+') && pos + 1 < text.size()) {
            const char n = text[pos + 1];
            return std::isdigit(static_cast<unsigned char>(n)) || n == '.';
        }
        return false;
    }

    double read_number() {
        skip_ws();
        const char* begin = text.c_str() + pos;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw ParseError("expected a number", pos);
        pos += static_cast<std::size_t>(end - begin);
        if (!std::isfinite(v)) throw ParseError("numeric literal out of range", pos);
        return v;
    }
};

bool is_binary_name(const std::string& name, BinaryOp& op) {
    if (name == "add") op = BinaryOp::Add;
    else if (name == "sub") op = BinaryOp::Sub;
    else if (name == "mul") op = BinaryOp::Mul;
    else return false;
    return true;
}

bool is_unary_name(const std::string& name, UnaryOp& op) {
    if (name == "inv") op = UnaryOp::Inv;
    else if (name == "abs") op = UnaryOp::Abs;
    else if (name == "sqrt") op = UnaryOp::Sqrt;
    else if (name == "sin") op = UnaryOp::Sin;
    else if (name == "cos") op = UnaryOp::Cos;
    else if (name == "tan") op = UnaryOp::Tan;
    else if (name == "arctan") op = UnaryOp::Arctan;
    else if (name == "log") op = UnaryOp::Log;
    else if (name == "exp") op = UnaryOp::Exp;
    else return false;
    return true;
}

int parse_var_index(const std::string& name) {
    // name starts with 'x'; the rest must be a positive integer
    if (name.size() < 2) return -1;
    int idx = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(name[i]))) return -1;
        idx = idx * 10 + (name[i] - '0');
        if (idx > 1000000) return -1;
    }
    return idx >= 1 ? idx : -1;
}

Expr parse_node(Lexer& lx);

// Contents of a parenthesized group: a single node or "L op R".
Expr parse_inner(Lexer& lx) {
    Expr left = parse_node(lx);
    lx.skip_ws();
    if (lx.pos < lx.text.size() &&
        std::isalpha(static_cast<unsigned char>(lx.text[lx.pos]))) {
        const std::size_t name_at = lx.pos;
        const std::string name = lx.read_name();
        BinaryOp op;
        if (!is_binary_name(name, op))
            throw ParseError("unknown binary operator '" + name + "'", name_at);
        Expr right = parse_node(lx);
        return Expr::binary(op, std::move(left), std::move(right));
    }
    return left;
}

Expr maybe_power_suffix(Lexer& lx, Expr base) {
    if (!lx.accept_power()) return base;
    const std::size_t at = lx.pos;
    if (!lx.looks_like_number()) throw ParseError("expected exponent after '**'", at);
    const double k = lx.read_number();
    if (k == 2.0) return Expr::unary(UnaryOp::Pow2, std::move(base));
    if (k == 3.0) return Expr::unary(UnaryOp::Pow3, std::move(base));
    throw ParseError("unsupported exponent (only **2 and **3)", at);
}

Expr parse_node(Lexer& lx) {
    if (lx.looks_like_number()) return Expr::constant(lx.read_number());
    if (lx.accept('(')) {
        Expr inner = parse_inner(lx);
        lx.expect(')', "to close group");
        return maybe_power_suffix(lx, std::move(inner));
    }
    const std::size_t name_at = lx.pos;
    const std::string name = lx.read_name();
    if (name[0] == 'x') {
        const int idx = parse_var_index(name);
        if (idx > 0) return Expr::var(idx);
    }
    UnaryOp uop;
    if (is_unary_name(name, uop)) {
        lx.expect('(', "unary operator argument");
        Expr child = parse_inner(lx);
        lx.expect(')', "to close unary argument");
        return Expr::unary(uop, std::move(child));
    }
    BinaryOp bop;
    if (is_binary_name(name, bop))
        throw ParseError("binary operator '" + name + "' without left operand", name_at);
    throw ParseError("unknown operator '" + name + "'", name_at);
}

}  // namespace

ParsedExpr parse(const std::string& text) {
    Lexer lx(text);
    const std::size_t head_at = lx.pos;
    const std::string head = lx.read_name();
    if (head.size() < 2 || head[0] != 'y')
        throw ParseError("expected output label 'y<k>'", head_at);
    int out_index = 0;
    for (std::size_t i = 1; i < head.size(); ++i) {
        if (!std::isdigit(static_cast<unsigned char>(head[i])))
            throw ParseError("expected output label 'y<k>'", head_at + i);
        out_index = out_index * 10 + (head[i] - '0');
    }
    lx.expect('=', "after output label");
    Expr body = parse_node(lx);
    if (!lx.eof()) throw ParseError("trailing input after expression", lx.pos);
    return ParsedExpr{out_index, std::move(body)};
}

}  // namespace s2gen
