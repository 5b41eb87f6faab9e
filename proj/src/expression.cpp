#include "swarm/expression.hpp"

#include <array>
#include <bit>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <system_error>

#include "swarm/error.hpp"

namespace swarm {

namespace {

constexpr std::array<FunctionInfo, 12> kFunctions{{
    {Function::Exp, "exp", 1},
    {Function::Log, "log", 1},
    {Function::Sin, "sin", 1},
    {Function::Cos, "cos", 1},
    {Function::Tan, "tan", 1},
    {Function::Tanh, "tanh", 1},
    {Function::Sqrt, "sqrt", 1},
    {Function::Abs, "abs", 1},
    {Function::Pow, "pow", 2},
    {Function::Min, "min", 2},
    {Function::Max, "max", 2},
    {Function::Sigmoid, "sigmoid", 1},
}};

std::optional<double> constant_value(std::string_view name) {
    if (name == "pi") return std::numbers::pi;
    if (name == "e") return std::numbers::e;
    return std::nullopt;
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse_all() {
        Expr result = parse_expr();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected '" + std::string(1, text_[pos_]) + "'");
        }
        return result;
    }

private:
    [[noreturn]] void fail(const std::string& what) const { throw SyntaxError(what, pos_); }
    [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
        throw SyntaxError(what, at);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) {
            if (pos_ >= text_.size()) fail(std::string("expected '") + c + "', found end of input");
            fail(std::string("expected '") + c + "'");
        }
    }

    Expr parse_expr() {
        Expr lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                lhs = Expr::binary(BinaryOp::Add, lhs, parse_term());
            } else if (accept('-')) {
                lhs = Expr::binary(BinaryOp::Sub, lhs, parse_term());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_term() {
        Expr lhs = parse_factor();
        for (;;) {
            if (accept('*')) {
                lhs = Expr::binary(BinaryOp::Mul, lhs, parse_factor());
            } else if (accept('/')) {
                lhs = Expr::binary(BinaryOp::Div, lhs, parse_factor());
            } else {
                return lhs;
            }
        }
    }

    Expr parse_factor() {
        if (accept('-')) return Expr::negate(parse_factor());
        return parse_power();
    }

    Expr parse_power() {
        Expr base = parse_atom();
        if (accept('^')) return Expr::binary(BinaryOp::Pow, base, parse_factor());
        return base;
    }

    Expr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (is_digit(c) || (c == '.' && pos_ + 1 < text_.size() && is_digit(text_[pos_ + 1]))) {
            return parse_number();
        }
        if (is_ident_start(c)) return parse_identifier();
        if (accept('(')) {
            Expr inner = parse_expr();
            expect(')');
            return inner;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    Expr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t look = pos_ + 1;
            if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
            if (look < text_.size() && is_digit(text_[look])) {
                pos_ = look;
                while (pos_ < text_.size() && is_digit(text_[pos_])) ++pos_;
            }
        }
        double value = 0.0;
        const char* first = text_.data() + start;
        const char* last = text_.data() + pos_;
        auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec == std::errc::result_out_of_range) fail_at("numeric literal out of range", start);
        if (ec != std::errc() || ptr != last) fail_at("malformed number", start);
        return Expr::number(value);
    }

    Expr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && is_ident_char(text_[pos_])) ++pos_;
        std::string name(text_.substr(start, pos_ - start));
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == '(') {
            auto info = find_function(name);
            if (!info) fail_at("unknown function " + name, start);
            ++pos_;
            std::vector<Expr> args;
            args.push_back(parse_expr());
            while (accept(',')) args.push_back(parse_expr());
            expect(')');
            if (static_cast<int>(args.size()) != info->arity) {
                fail_at(name + " expects " + std::to_string(info->arity) + " argument(s), got " +
                            std::to_string(args.size()),
                        start);
            }
            return Expr::call(info->function, std::move(args));
        }
        if (auto c = constant_value(name)) return Expr::number(*c);
        return Expr::variable(std::move(name));
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

// Binding strength used by the printer: higher binds tighter.
enum Level { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int level_of(const Expr& e) {
    switch (e.kind()) {
        case Expr::Kind::Number:
            return e.value() < 0 || std::signbit(e.value()) ? kUnary : kAtom;
        case Expr::Kind::Variable:
        case Expr::Kind::Call:
            return kAtom;
        case Expr::Kind::Negate:
            return kUnary;
        case Expr::Kind::Binary:
            switch (e.op()) {
                case BinaryOp::Add:
                case BinaryOp::Sub:
                    return kSum;
                case BinaryOp::Mul:
                case BinaryOp::Div:
                    return kProduct;
                case BinaryOp::Pow:
                    return kPower;
            }
    }
    return kAtom;
}

std::string format_number(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

void print_into(const Expr& e, std::string& out);

void print_wrapped(const Expr& e, bool parens, std::string& out) {
    if (parens) out += '(';
    print_into(e, out);
    if (parens) out += ')';
}

void print_into(const Expr& e, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Number:
            out += format_number(e.value());
            return;
        case Expr::Kind::Variable:
            out += e.name();
            return;
        case Expr::Kind::Negate:
            out += '-';
            print_wrapped(e.children()[0], level_of(e.children()[0]) < kUnary, out);
            return;
        case Expr::Kind::Call: {
            out += function_info(e.function()).name;
            out += '(';
            bool first = true;
            for (const Expr& arg : e.children()) {
                if (!first) out += ", ";
                first = false;
                print_into(arg, out);
            }
            out += ')';
            return;
        }
        case Expr::Kind::Binary: {
            const Expr& lhs = e.children()[0];
            const Expr& rhs = e.children()[1];
            if (e.op() == BinaryOp::Pow) {
                print_wrapped(lhs, level_of(lhs) < kAtom, out);
                out += '^';
                print_wrapped(rhs, level_of(rhs) < kUnary, out);
                return;
            }
            const int level = level_of(e);
            print_wrapped(lhs, level_of(lhs) < level, out);
            switch (e.op()) {
                case BinaryOp::Add: out += " + "; break;
                case BinaryOp::Sub: out += " - "; break;
                case BinaryOp::Mul: out += '*'; break;
                case BinaryOp::Div: out += '/'; break;
                case BinaryOp::Pow: break;
            }
            print_wrapped(rhs, level_of(rhs) <= level, out);
            return;
        }
    }
}

void collect(const Expr& e, std::set<std::string>& names) {
    if (e.kind() == Expr::Kind::Variable) {
        names.insert(e.name());
        return;
    }
    if (e.kind() == Expr::Kind::Number) return;
    for (const Expr& c : e.children()) collect(c, names);
}

}  // namespace

std::optional<FunctionInfo> find_function(std::string_view name) {
    for (const auto& f : kFunctions) {
        if (f.name == name) return f;
    }
    return std::nullopt;
}

FunctionInfo function_info(Function f) {
    for (const auto& info : kFunctions) {
        if (info.function == f) return info;
    }
    return kFunctions[0];
}

bool is_reserved_name(std::string_view name) {
    return constant_value(name).has_value() || find_function(name).has_value();
}

bool is_identifier(std::string_view name) {
    if (name.empty() || !is_ident_start(name.front())) return false;
    for (char c : name) {
        if (!is_ident_char(c)) return false;
    }
    return true;
}

Expr Expr::number(double value) {
    return Expr(std::make_shared<const Node>(Node{Kind::Number, value, {}, BinaryOp::Add, Function::Exp, {}}));
}

Expr Expr::variable(std::string name) {
    return Expr(std::make_shared<const Node>(
        Node{Kind::Variable, 0.0, std::move(name), BinaryOp::Add, Function::Exp, {}}));
}

Expr Expr::negate(Expr operand) {
    return Expr(std::make_shared<const Node>(
        Node{Kind::Negate, 0.0, {}, BinaryOp::Add, Function::Exp, {std::move(operand)}}));
}

Expr Expr::binary(BinaryOp op, Expr lhs, Expr rhs) {
    return Expr(std::make_shared<const Node>(
        Node{Kind::Binary, 0.0, {}, op, Function::Exp, {std::move(lhs), std::move(rhs)}}));
}

Expr Expr::call(Function f, std::vector<Expr> args) {
    return Expr(std::make_shared<const Node>(Node{Kind::Call, 0.0, {}, BinaryOp::Add, f, std::move(args)}));
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
BinaryOp Expr::op() const { return node_->op; }
Function Expr::function() const { return node_->function; }
const std::vector<Expr>& Expr::children() const { return node_->children; }

bool operator==(const Expr& a, const Expr& b) {
    if (a.node_ == b.node_) return true;
    if (!a.node_ || !b.node_) return false;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
        case Expr::Kind::Number:
            // Bitwise, so that 0.0 and -0.0 differ and NaN equals itself.
            return std::bit_cast<std::uint64_t>(a.value()) == std::bit_cast<std::uint64_t>(b.value());
        case Expr::Kind::Variable:
            return a.name() == b.name();
        case Expr::Kind::Binary:
            if (a.op() != b.op()) return false;
            break;
        case Expr::Kind::Call:
            if (a.function() != b.function()) return false;
            break;
        case Expr::Kind::Negate:
            break;
    }
    return a.children() == b.children();
}

Expr parse(std::string_view text) { return Parser(text).parse_all(); }

std::string print(const Expr& expr) {
    std::string out;
    print_into(expr, out);
    return out;
}

std::set<std::string> free_identifiers(const Expr& expr) {
    std::set<std::string> names;
    collect(expr, names);
    return names;
}

double sigmoid(double u) { return 1.0 / (1.0 + std::exp(-u)); }

double apply(Function f, double a, double b) {
    switch (f) {
        case Function::Exp: return std::exp(a);
        case Function::Log: return std::log(a);
        case Function::Sin: return std::sin(a);
        case Function::Cos: return std::cos(a);
        case Function::Tan: return std::tan(a);
        case Function::Tanh: return std::tanh(a);
        case Function::Sqrt: return std::sqrt(a);
        case Function::Abs: return std::fabs(a);
        case Function::Pow: return std::pow(a, b);
        case Function::Min: return std::fmin(a, b);
        case Function::Max: return std::fmax(a, b);
        case Function::Sigmoid: return sigmoid(a);
    }
    return std::nan("");
}

double eval(const Expr& expr, const Bindings& bindings) {
    switch (expr.kind()) {
        case Expr::Kind::Number:
            return expr.value();
        case Expr::Kind::Variable: {
            auto it = bindings.find(expr.name());
            if (it == bindings.end()) throw UnboundIdentifier(expr.name());
            return it->second;
        }
        case Expr::Kind::Negate:
            return -eval(expr.children()[0], bindings);
        case Expr::Kind::Binary: {
            const double a = eval(expr.children()[0], bindings);
            const double b = eval(expr.children()[1], bindings);
            switch (expr.op()) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return a / b;
                case BinaryOp::Pow: return std::pow(a, b);
            }
            break;
        }
        case Expr::Kind::Call: {
            const auto& args = expr.children();
            const double a = eval(args[0], bindings);
            const double b = args.size() > 1 ? eval(args[1], bindings) : 0.0;
            return apply(expr.function(), a, b);
        }
    }
    return std::nan("");
}

}  // namespace swarm
