#ifndef JETFLOW_EXPR_HPP
#define JETFLOW_EXPR_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "jetflow/errors.hpp"

namespace jetflow {

// ============================================================================
// Symbols
// ============================================================================

// Chart variables. A field on the velocity phase space depends on
// (t, q1..qm, v1..vm). Fields living on the full tangent bundle additionally
// see the extra velocity slot VelTime = xdot0; on the affine jet slice that
// slot is pinned to 1.
enum class SymKind : std::uint8_t { Time, Coord, Vel, VelTime };

struct Sym {
    SymKind kind = SymKind::Time;
    int index = 0;  // 1-based for Coord/Vel, 0 otherwise

    friend bool operator==(const Sym& a, const Sym& b) {
        return a.kind == b.kind && a.index == b.index;
    }
    friend bool operator<(const Sym& a, const Sym& b) {
        if (a.kind != b.kind) return a.kind < b.kind;
        return a.index < b.index;
    }
};

inline Sym sym_t() { return {SymKind::Time, 0}; }
inline Sym sym_q(int i) { return {SymKind::Coord, i}; }
inline Sym sym_v(int i) { return {SymKind::Vel, i}; }
inline Sym sym_vt() { return {SymKind::VelTime, 0}; }

std::string to_string(const Sym& s);

// ============================================================================
// Evaluation points
// ============================================================================

// A point of the velocity phase space: (t, q^i, q^i_t).
struct JetPoint {
    double t = 0.0;
    std::vector<double> q;
    std::vector<double> v;

    int dim() const { return static_cast<int>(q.size()); }
};

// A point of the tangent bundle: x = (x^0, x^i), xdot = (xdot^0, xdot^i),
// with x^0 the time coordinate.
struct TangentPoint {
    std::vector<double> x;
    std::vector<double> xdot;

    int dim() const { return static_cast<int>(x.size()) - 1; }
};

// Shared evaluation context. vt carries xdot^0; jet points sit on the
// canonical slice vt = 1.
struct Point {
    double t = 0.0;
    std::vector<double> q;
    std::vector<double> v;
    double vt = 1.0;

    int dim() const { return static_cast<int>(q.size()); }
};

Point to_point(const JetPoint& p);
Point to_point(const TangentPoint& p);

// Canonical imbedding of the jet space into the tangent bundle:
// (t, q, v) -> (x = (t, q), xdot = (1, v)).
TangentPoint lift_point(const JetPoint& p);

// ============================================================================
// Expression tree
// ============================================================================

enum class ExprOp : std::uint8_t {
    Const,
    Var,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Neg,
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Atan,
};

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

// Immutable expression node. Nodes are shared freely; all algorithms treat
// the tree as a DAG.
struct Expr {
    ExprOp op;
    double value = 0.0;  // Const
    Sym sym{};           // Var
    ExprPtr a;
    ExprPtr b;
};

// --- constructors (with constant folding and 0/1 identities) ---------------

ExprPtr constant(double c);
ExprPtr variable(Sym s);
ExprPtr add(ExprPtr a, ExprPtr b);
ExprPtr sub(ExprPtr a, ExprPtr b);
ExprPtr mul(ExprPtr a, ExprPtr b);
ExprPtr div(ExprPtr a, ExprPtr b);
ExprPtr pow(ExprPtr base, ExprPtr exponent);
ExprPtr neg(ExprPtr a);
ExprPtr sin(ExprPtr a);
ExprPtr cos(ExprPtr a);
ExprPtr exp(ExprPtr a);
ExprPtr log(ExprPtr a);
ExprPtr sqrt(ExprPtr a);
ExprPtr atan(ExprPtr a);

bool is_constant(const ExprPtr& e, double c);
bool is_zero(const ExprPtr& e);

// --- core algorithms --------------------------------------------------------

// Evaluates the expression; throws DomainError on log/sqrt of a non-positive
// argument, division by zero, or a non-finite result.
double eval(const ExprPtr& e, const Point& p);

// Exact partial derivative with respect to one chart variable.
ExprPtr diff(const ExprPtr& e, Sym s);

// Simultaneous substitution of expressions for variables.
using SubstitutionMap = std::map<Sym, ExprPtr>;
ExprPtr substitute(const ExprPtr& e, const SubstitutionMap& subs);

// Set of variables the expression actually mentions.
bool depends_on(const ExprPtr& e, SymKind kind);
std::vector<Sym> variables_of(const ExprPtr& e);

// Infix rendering with the CLI grammar's names (t, q1.., v1.., xdot0).
std::string to_string(const ExprPtr& e);

// ============================================================================
// ScalarField
// ============================================================================

// A differentiable scalar field over a chart of fibre dimension m. This is
// the atom every geometric object in the library is built from.
class ScalarField {
public:
    ScalarField() = default;
    ScalarField(int dim, ExprPtr ast);

    static ScalarField constant(int dim, double c);
    static ScalarField time(int dim);
    static ScalarField coord(int dim, int i);
    static ScalarField velocity(int dim, int i);
    static ScalarField velocity_time(int dim);

    int dim() const { return dim_; }
    const ExprPtr& ast() const { return ast_; }

    double eval(const Point& p) const;
    double eval(const JetPoint& p) const;
    double eval(const TangentPoint& p) const;

    ScalarField partial(Sym s) const;
    ScalarField substitute(const SubstitutionMap& subs) const;
    bool depends_on(SymKind kind) const { return jetflow::depends_on(ast_, kind); }

    std::string str() const { return to_string(ast_); }

    friend ScalarField operator+(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator*(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator/(const ScalarField& a, const ScalarField& b);
    friend ScalarField operator-(const ScalarField& a);
    friend ScalarField operator+(const ScalarField& a, double c);
    friend ScalarField operator+(double c, const ScalarField& a);
    friend ScalarField operator-(const ScalarField& a, double c);
    friend ScalarField operator-(double c, const ScalarField& a);
    friend ScalarField operator*(const ScalarField& a, double c);
    friend ScalarField operator*(double c, const ScalarField& a);
    friend ScalarField operator/(const ScalarField& a, double c);

private:
    int dim_ = 0;
    ExprPtr ast_;
};

// Total time derivative d_t F = dF/dt + v^j dF/dq^j of a field independent of
// the velocities. Throws DimensionMismatch when F has velocity dependence,
// since d_t of such a field would need accelerations.
ScalarField total_time_derivative(const ScalarField& f);

// Exact partial with respect to the i-th velocity (the vertical derivative).
ScalarField vertical_partial(const ScalarField& f, int i);

}  // namespace jetflow

#endif
