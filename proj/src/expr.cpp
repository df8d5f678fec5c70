#include "jetflow/expr.hpp"

#include <cmath>
#include <cstdio>
#include <unordered_map>

namespace jetflow {

namespace {

ExprPtr make(ExprOp op, ExprPtr a = nullptr, ExprPtr b = nullptr) {
    auto e = std::make_shared<Expr>();
    e->op = op;
    e->a = std::move(a);
    e->b = std::move(b);
    return e;
}

bool is_const(const ExprPtr& e) { return e->op == ExprOp::Const; }

double finite_or_throw(double x, const char* what) {
    if (!std::isfinite(x)) throw DomainError(std::string("non-finite result in ") + what);
    return x;
}

}  // namespace

std::string to_string(const Sym& s) {
    switch (s.kind) {
        case SymKind::Time: return "t";
        case SymKind::Coord: return "q" + std::to_string(s.index);
        case SymKind::Vel: return "v" + std::to_string(s.index);
        case SymKind::VelTime: return "xdot0";
    }
    return "?";
}

Point to_point(const JetPoint& p) { return Point{p.t, p.q, p.v, 1.0}; }

Point to_point(const TangentPoint& p) {
    Point out;
    out.t = p.x.at(0);
    out.q.assign(p.x.begin() + 1, p.x.end());
    out.vt = p.xdot.at(0);
    out.v.assign(p.xdot.begin() + 1, p.xdot.end());
    return out;
}

TangentPoint lift_point(const JetPoint& p) {
    TangentPoint tp;
    tp.x.reserve(p.q.size() + 1);
    tp.xdot.reserve(p.q.size() + 1);
    tp.x.push_back(p.t);
    tp.x.insert(tp.x.end(), p.q.begin(), p.q.end());
    tp.xdot.push_back(1.0);
    tp.xdot.insert(tp.xdot.end(), p.v.begin(), p.v.end());
    return tp;
}

// ============================================================================
// Smart constructors
// ============================================================================

ExprPtr constant(double c) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Const;
    e->value = c;
    return e;
}

ExprPtr variable(Sym s) {
    auto e = std::make_shared<Expr>();
    e->op = ExprOp::Var;
    e->sym = s;
    return e;
}

bool is_constant(const ExprPtr& e, double c) {
    return e && e->op == ExprOp::Const && e->value == c;
}

bool is_zero(const ExprPtr& e) { return is_constant(e, 0.0); }

ExprPtr add(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    if (is_zero(a)) return b;
    if (is_zero(b)) return a;
    return make(ExprOp::Add, std::move(a), std::move(b));
}

ExprPtr sub(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    if (is_zero(b)) return a;
    if (is_zero(a)) return neg(std::move(b));
    // x - x -> 0 only for leaves, where no domain behaviour can be lost
    if (a->op == ExprOp::Var && b->op == ExprOp::Var && a->sym == b->sym) return constant(0.0);
    return make(ExprOp::Sub, std::move(a), std::move(b));
}

ExprPtr mul(ExprPtr a, ExprPtr b) {
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    if (is_zero(a) || is_zero(b)) return constant(0.0);
    if (is_constant(a, 1.0)) return b;
    if (is_constant(b, 1.0)) return a;
    if (is_constant(a, -1.0)) return neg(std::move(b));
    if (is_constant(b, -1.0)) return neg(std::move(a));
    return make(ExprOp::Mul, std::move(a), std::move(b));
}

ExprPtr div(ExprPtr a, ExprPtr b) {
    if (is_const(b)) {
        if (b->value == 0.0) return make(ExprOp::Div, std::move(a), std::move(b));
        if (is_const(a)) return constant(a->value / b->value);
        if (b->value == 1.0) return a;
    }
    if (is_zero(a)) return constant(0.0);
    return make(ExprOp::Div, std::move(a), std::move(b));
}

ExprPtr pow(ExprPtr base, ExprPtr exponent) {
    if (is_constant(exponent, 0.0)) return constant(1.0);
    if (is_constant(exponent, 1.0)) return base;
    if (is_const(base) && is_const(exponent)) {
        double r = std::pow(base->value, exponent->value);
        if (std::isfinite(r)) return constant(r);
    }
    return make(ExprOp::Pow, std::move(base), std::move(exponent));
}

ExprPtr neg(ExprPtr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->op == ExprOp::Neg) return a->a;
    return make(ExprOp::Neg, std::move(a));
}

ExprPtr sin(ExprPtr a) {
    if (is_const(a)) return constant(std::sin(a->value));
    return make(ExprOp::Sin, std::move(a));
}

ExprPtr cos(ExprPtr a) {
    if (is_const(a)) return constant(std::cos(a->value));
    return make(ExprOp::Cos, std::move(a));
}

ExprPtr exp(ExprPtr a) {
    if (is_const(a)) {
        double r = std::exp(a->value);
        if (std::isfinite(r)) return constant(r);
    }
    return make(ExprOp::Exp, std::move(a));
}

ExprPtr log(ExprPtr a) {
    if (is_const(a) && a->value > 0.0) return constant(std::log(a->value));
    return make(ExprOp::Log, std::move(a));
}

ExprPtr sqrt(ExprPtr a) {
    if (is_const(a) && a->value >= 0.0) return constant(std::sqrt(a->value));
    return make(ExprOp::Sqrt, std::move(a));
}

ExprPtr atan(ExprPtr a) {
    if (is_const(a)) return constant(std::atan(a->value));
    return make(ExprOp::Atan, std::move(a));
}

// ============================================================================
// Evaluation
// ============================================================================

namespace {

double lookup(const Sym& s, const Point& p) {
    switch (s.kind) {
        case SymKind::Time: return p.t;
        case SymKind::Coord:
            if (s.index < 1 || s.index > p.dim())
                throw DimensionMismatch("coordinate index out of range: " + to_string(s));
            return p.q[s.index - 1];
        case SymKind::Vel:
            if (s.index < 1 || s.index > static_cast<int>(p.v.size()))
                throw DimensionMismatch("velocity index out of range: " + to_string(s));
            return p.v[s.index - 1];
        case SymKind::VelTime: return p.vt;
    }
    throw DimensionMismatch("bad symbol");
}

double eval_rec(const Expr& e, const Point& p) {
    switch (e.op) {
        case ExprOp::Const: return e.value;
        case ExprOp::Var: return lookup(e.sym, p);
        case ExprOp::Add: return finite_or_throw(eval_rec(*e.a, p) + eval_rec(*e.b, p), "+");
        case ExprOp::Sub: return finite_or_throw(eval_rec(*e.a, p) - eval_rec(*e.b, p), "-");
        case ExprOp::Mul: return finite_or_throw(eval_rec(*e.a, p) * eval_rec(*e.b, p), "*");
        case ExprOp::Div: {
            double num = eval_rec(*e.a, p);
            double den = eval_rec(*e.b, p);
            if (den == 0.0) throw DomainError("division by zero");
            return finite_or_throw(num / den, "/");
        }
        case ExprOp::Pow: {
            double base = eval_rec(*e.a, p);
            double expo = eval_rec(*e.b, p);
            double r = std::pow(base, expo);
            if (!std::isfinite(r)) throw DomainError("pow outside real domain");
            return r;
        }
        case ExprOp::Neg: return -eval_rec(*e.a, p);
        case ExprOp::Sin: return std::sin(eval_rec(*e.a, p));
        case ExprOp::Cos: return std::cos(eval_rec(*e.a, p));
        case ExprOp::Exp: return finite_or_throw(std::exp(eval_rec(*e.a, p)), "exp");
        case ExprOp::Log: {
            double x = eval_rec(*e.a, p);
            if (x <= 0.0) throw DomainError("log of non-positive argument");
            return std::log(x);
        }
        case ExprOp::Sqrt: {
            double x = eval_rec(*e.a, p);
            if (x < 0.0) throw DomainError("sqrt of negative argument");
            return std::sqrt(x);
        }
        case ExprOp::Atan: return std::atan(eval_rec(*e.a, p));
    }
    throw DomainError("corrupt expression");
}

}  // namespace

double eval(const ExprPtr& e, const Point& p) { return eval_rec(*e, p); }

// ============================================================================
// Differentiation
// ============================================================================

namespace {

ExprPtr diff_rec(const ExprPtr& e, const Sym& s,
                 std::unordered_map<const Expr*, ExprPtr>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;

    ExprPtr out;
    switch (e->op) {
        case ExprOp::Const: out = constant(0.0); break;
        case ExprOp::Var: out = constant(e->sym == s ? 1.0 : 0.0); break;
        case ExprOp::Add: out = add(diff_rec(e->a, s, memo), diff_rec(e->b, s, memo)); break;
        case ExprOp::Sub: out = sub(diff_rec(e->a, s, memo), diff_rec(e->b, s, memo)); break;
        case ExprOp::Mul:
            out = add(mul(diff_rec(e->a, s, memo), e->b), mul(e->a, diff_rec(e->b, s, memo)));
            break;
        case ExprOp::Div: {
            ExprPtr da = diff_rec(e->a, s, memo);
            ExprPtr db = diff_rec(e->b, s, memo);
            out = div(sub(mul(da, e->b), mul(e->a, db)), mul(e->b, e->b));
            break;
        }
        case ExprOp::Pow: {
            ExprPtr da = diff_rec(e->a, s, memo);
            if (is_const(e->b)) {
                double c = e->b->value;
                out = mul(mul(constant(c), pow(e->a, constant(c - 1.0))), da);
            } else {
                ExprPtr db = diff_rec(e->b, s, memo);
                // d(f^g) = f^g (g' log f + g f'/f)
                ExprPtr term = add(mul(db, log(e->a)), div(mul(e->b, da), e->a));
                out = mul(pow(e->a, e->b), term);
            }
            break;
        }
        case ExprOp::Neg: out = neg(diff_rec(e->a, s, memo)); break;
        case ExprOp::Sin: out = mul(cos(e->a), diff_rec(e->a, s, memo)); break;
        case ExprOp::Cos: out = neg(mul(sin(e->a), diff_rec(e->a, s, memo))); break;
        case ExprOp::Exp: out = mul(exp(e->a), diff_rec(e->a, s, memo)); break;
        case ExprOp::Log: out = div(diff_rec(e->a, s, memo), e->a); break;
        case ExprOp::Sqrt:
            out = div(diff_rec(e->a, s, memo), mul(constant(2.0), sqrt(e->a)));
            break;
        case ExprOp::Atan:
            out = div(diff_rec(e->a, s, memo),
                      add(constant(1.0), mul(e->a, e->a)));
            break;
    }
    memo.emplace(e.get(), out);
    return out;
}

}  // namespace

ExprPtr diff(const ExprPtr& e, Sym s) {
    std::unordered_map<const Expr*, ExprPtr> memo;
    return diff_rec(e, s, memo);
}

// ============================================================================
// Substitution and variable queries
// ============================================================================

namespace {

ExprPtr subst_rec(const ExprPtr& e, const SubstitutionMap& subs,
                  std::unordered_map<const Expr*, ExprPtr>& memo) {
    auto it = memo.find(e.get());
    if (it != memo.end()) return it->second;

    ExprPtr out;
    switch (e->op) {
        case ExprOp::Const: out = e; break;
        case ExprOp::Var: {
            auto found = subs.find(e->sym);
            out = (found == subs.end()) ? e : found->second;
            break;
        }
        case ExprOp::Add: out = add(subst_rec(e->a, subs, memo), subst_rec(e->b, subs, memo)); break;
        case ExprOp::Sub: out = sub(subst_rec(e->a, subs, memo), subst_rec(e->b, subs, memo)); break;
        case ExprOp::Mul: out = mul(subst_rec(e->a, subs, memo), subst_rec(e->b, subs, memo)); break;
        case ExprOp::Div: out = div(subst_rec(e->a, subs, memo), subst_rec(e->b, subs, memo)); break;
        case ExprOp::Pow: out = pow(subst_rec(e->a, subs, memo), subst_rec(e->b, subs, memo)); break;
        case ExprOp::Neg: out = neg(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Sin: out = sin(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Cos: out = cos(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Exp: out = exp(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Log: out = log(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Sqrt: out = sqrt(subst_rec(e->a, subs, memo)); break;
        case ExprOp::Atan: out = atan(subst_rec(e->a, subs, memo)); break;
    }
    memo.emplace(e.get(), out);
    return out;
}

void collect_vars(const Expr& e, std::vector<Sym>& out) {
    if (e.op == ExprOp::Var) {
        for (const auto& s : out)
            if (s == e.sym) return;
        out.push_back(e.sym);
        return;
    }
    if (e.a) collect_vars(*e.a, out);
    if (e.b) collect_vars(*e.b, out);
}

bool depends_rec(const Expr& e, SymKind kind) {
    if (e.op == ExprOp::Var) return e.sym.kind == kind;
    if (e.a && depends_rec(*e.a, kind)) return true;
    if (e.b && depends_rec(*e.b, kind)) return true;
    return false;
}

}  // namespace

ExprPtr substitute(const ExprPtr& e, const SubstitutionMap& subs) {
    if (subs.empty()) return e;
    std::unordered_map<const Expr*, ExprPtr> memo;
    return subst_rec(e, subs, memo);
}

bool depends_on(const ExprPtr& e, SymKind kind) { return depends_rec(*e, kind); }

std::vector<Sym> variables_of(const ExprPtr& e) {
    std::vector<Sym> out;
    collect_vars(*e, out);
    return out;
}

// ============================================================================
// Printing
// ============================================================================

namespace {

// Precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
int precedence(ExprOp op) {
    switch (op) {
        case ExprOp::Add:
        case ExprOp::Sub: return 1;
        case ExprOp::Mul:
        case ExprOp::Div: return 2;
        case ExprOp::Neg: return 3;
        case ExprOp::Pow: return 4;
        default: return 5;
    }
}

std::string fmt_const(double c) {
    if (c == static_cast<long long>(c) && std::abs(c) < 1e15) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%lld", static_cast<long long>(c));
        return buf;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", c);
    return buf;
}

std::string print_rec(const Expr& e, int parent_prec) {
    std::string body;
    int prec = precedence(e.op);
    switch (e.op) {
        case ExprOp::Const:
            body = fmt_const(e.value);
            if (e.value < 0.0) prec = 3;
            break;
        case ExprOp::Var: body = to_string(e.sym); break;
        case ExprOp::Add: body = print_rec(*e.a, 1) + " + " + print_rec(*e.b, 2); break;
        case ExprOp::Sub: body = print_rec(*e.a, 1) + " - " + print_rec(*e.b, 2); break;
        case ExprOp::Mul: body = print_rec(*e.a, 2) + "*" + print_rec(*e.b, 3); break;
        case ExprOp::Div: body = print_rec(*e.a, 2) + "/" + print_rec(*e.b, 3); break;
        case ExprOp::Pow: body = print_rec(*e.a, 5) + "^" + print_rec(*e.b, 4); break;
        case ExprOp::Neg: body = "-" + print_rec(*e.a, 3); break;
        case ExprOp::Sin: body = "sin(" + print_rec(*e.a, 0) + ")"; break;
        case ExprOp::Cos: body = "cos(" + print_rec(*e.a, 0) + ")"; break;
        case ExprOp::Exp: body = "exp(" + print_rec(*e.a, 0) + ")"; break;
        case ExprOp::Log: body = "log(" + print_rec(*e.a, 0) + ")"; break;
        case ExprOp::Sqrt: body = "sqrt(" + print_rec(*e.a, 0) + ")"; break;
        case ExprOp::Atan: body = "atan(" + print_rec(*e.a, 0) + ")"; break;
    }
    if (prec < parent_prec) return "(" + body + ")";
    return body;
}

}  // namespace

std::string to_string(const ExprPtr& e) { return print_rec(*e, 0); }

// ============================================================================
// ScalarField
// ============================================================================

ScalarField::ScalarField(int dim, ExprPtr ast) : dim_(dim), ast_(std::move(ast)) {
    if (dim_ < 1) throw DimensionMismatch("fibre dimension must be positive");
    for (const auto& s : variables_of(ast_)) {
        if ((s.kind == SymKind::Coord || s.kind == SymKind::Vel) &&
            (s.index < 1 || s.index > dim_))
            throw UnknownSymbol("symbol " + to_string(s) + " outside chart of dimension " +
                                std::to_string(dim_));
    }
}

ScalarField ScalarField::constant(int dim, double c) {
    return ScalarField(dim, jetflow::constant(c));
}
ScalarField ScalarField::time(int dim) { return ScalarField(dim, variable(sym_t())); }
ScalarField ScalarField::coord(int dim, int i) { return ScalarField(dim, variable(sym_q(i))); }
ScalarField ScalarField::velocity(int dim, int i) { return ScalarField(dim, variable(sym_v(i))); }
ScalarField ScalarField::velocity_time(int dim) { return ScalarField(dim, variable(sym_vt())); }

double ScalarField::eval(const Point& p) const {
    if (p.dim() != dim_) throw DimensionMismatch("point/field dimension mismatch");
    return jetflow::eval(ast_, p);
}
double ScalarField::eval(const JetPoint& p) const { return eval(to_point(p)); }
double ScalarField::eval(const TangentPoint& p) const { return eval(to_point(p)); }

ScalarField ScalarField::partial(Sym s) const { return ScalarField(dim_, diff(ast_, s)); }

ScalarField ScalarField::substitute(const SubstitutionMap& subs) const {
    return ScalarField(dim_, jetflow::substitute(ast_, subs));
}

#define JETFLOW_FIELD_BINOP(OP, FN)                                             \
    ScalarField operator OP(const ScalarField& a, const ScalarField& b) {       \
        if (a.dim_ != b.dim_) throw DimensionMismatch("field dimension mismatch"); \
        return ScalarField(a.dim_, FN(a.ast_, b.ast_));                         \
    }

JETFLOW_FIELD_BINOP(+, add)
JETFLOW_FIELD_BINOP(-, sub)
JETFLOW_FIELD_BINOP(*, mul)
JETFLOW_FIELD_BINOP(/, div)
#undef JETFLOW_FIELD_BINOP

ScalarField operator-(const ScalarField& a) { return ScalarField(a.dim_, neg(a.ast_)); }
ScalarField operator+(const ScalarField& a, double c) {
    return ScalarField(a.dim_, add(a.ast_, constant(c)));
}
ScalarField operator+(double c, const ScalarField& a) { return a + c; }
ScalarField operator-(const ScalarField& a, double c) {
    return ScalarField(a.dim_, sub(a.ast_, constant(c)));
}
ScalarField operator-(double c, const ScalarField& a) {
    return ScalarField(a.dim_, sub(constant(c), a.ast_));
}
ScalarField operator*(const ScalarField& a, double c) {
    return ScalarField(a.dim_, mul(a.ast_, constant(c)));
}
ScalarField operator*(double c, const ScalarField& a) { return a * c; }
ScalarField operator/(const ScalarField& a, double c) {
    return ScalarField(a.dim_, div(a.ast_, constant(c)));
}

ScalarField total_time_derivative(const ScalarField& f) {
    if (f.depends_on(SymKind::Vel) || f.depends_on(SymKind::VelTime))
        throw DimensionMismatch("total time derivative of a velocity-dependent field");
    ExprPtr out = diff(f.ast(), sym_t());
    for (int j = 1; j <= f.dim(); ++j)
        out = add(out, mul(variable(sym_v(j)), diff(f.ast(), sym_q(j))));
    return ScalarField(f.dim(), out);
}

ScalarField vertical_partial(const ScalarField& f, int i) { return f.partial(sym_v(i)); }

}  // namespace jetflow
