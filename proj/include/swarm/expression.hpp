#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace swarm {

enum class BinaryOp { Add, Sub, Mul, Div, Pow };

enum class Function { Exp, Log, Sin, Cos, Tan, Tanh, Sqrt, Abs, Pow, Min, Max, Sigmoid };

struct FunctionInfo {
    Function function;
    std::string_view name;
    int arity;
};

/// Lookup by source name; nullopt for anything that is not a builtin.
std::optional<FunctionInfo> find_function(std::string_view name);
FunctionInfo function_info(Function f);

/// Names that user identifiers may not take: the predefined constants and builtin function names.
bool is_reserved_name(std::string_view name);
bool is_identifier(std::string_view name);

/// Immutable expression tree. Nodes are shared, so copying an Expr is cheap.
class Expr {
public:
    enum class Kind { Number, Variable, Negate, Binary, Call };

    struct Node;

    Expr() = default;

    static Expr number(double value);
    static Expr variable(std::string name);
    static Expr negate(Expr operand);
    static Expr binary(BinaryOp op, Expr lhs, Expr rhs);
    static Expr call(Function f, std::vector<Expr> args);

    bool empty() const noexcept { return node_ == nullptr; }
    Kind kind() const;
    double value() const;
    const std::string& name() const;
    BinaryOp op() const;
    Function function() const;
    /// Operands: one for Negate, two for Binary, the argument list for Call.
    const std::vector<Expr>& children() const;

    friend bool operator==(const Expr& a, const Expr& b);

private:
    explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

    std::shared_ptr<const Node> node_;
};

struct Expr::Node {
    Kind kind;
    double value = 0.0;
    std::string name;
    BinaryOp op = BinaryOp::Add;
    Function function = Function::Exp;
    std::vector<Expr> children;
};

/// Parses an expression. `pi` and `e` become numeric literals.
/// Throws SyntaxError (carrying the offending offset) on malformed input,
/// unknown function names, and wrong call arity.
Expr parse(std::string_view text);

/// Re-serializes with the minimum parentheses needed for parse(print(e)) == e.
std::string print(const Expr& expr);

std::set<std::string> free_identifiers(const Expr& expr);

using Bindings = std::map<std::string, double, std::less<>>;

/// Double-precision evaluation with IEEE semantics (division by zero gives inf, log(-1) NaN).
/// Throws UnboundIdentifier.
double eval(const Expr& expr, const Bindings& bindings);

/// Logistic function, 1 / (1 + exp(-u)).
double sigmoid(double u);
double apply(Function f, double a, double b = 0.0);

}  // namespace swarm
