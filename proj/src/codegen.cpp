#include "swarm/codegen.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "swarm/error.hpp"

namespace swarm {

std::string_view to_string(Layout layout) { return layout == Layout::RowMajor ? "row" : "column"; }

Layout parse_layout(std::string_view text) {
    if (text == "row" || text == "row-major") return Layout::RowMajor;
    if (text == "column" || text == "col" || text == "column-major") return Layout::ColumnMajor;
    throw OutOfRange("unknown layout '" + std::string(text) + "' (expected row or column)");
}

namespace {

std::string float_literal(double value) {
    const auto f = static_cast<float>(value);
    if (std::isnan(f)) return "NAN";
    if (std::isinf(f)) return f > 0 ? "INFINITY" : "(-INFINITY)";
    std::array<char, 48> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), std::fabs(f));
    (void)ec;
    std::string text(buf.data(), ptr);
    if (text.find_first_of(".e") == std::string::npos) text += ".0";
    text += 'f';
    return std::signbit(f) ? "(-" + text + ")" : text;
}

std::string_view c_function(Function f) {
    switch (f) {
        case Function::Exp: return "exp";
        case Function::Log: return "log";
        case Function::Sin: return "sin";
        case Function::Cos: return "cos";
        case Function::Tan: return "tan";
        case Function::Tanh: return "tanh";
        case Function::Sqrt: return "sqrt";
        case Function::Abs: return "fabs";
        case Function::Pow: return "pow";
        case Function::Min: return "fmin";
        case Function::Max: return "fmax";
        case Function::Sigmoid: return "swarm_sigmoid";
    }
    return "";
}

void emit(const Expr& e, const SystemDefinition& def, std::string& out) {
    switch (e.kind()) {
        case Expr::Kind::Number:
            out += float_literal(e.value());
            return;
        case Expr::Kind::Variable:
            if (def.find_variable(e.name())) {
                out += "x_" + e.name();
            } else if (def.find_parameter(e.name())) {
                out += "p_" + e.name();
            } else {
                throw Error("codegen: unresolved identifier " + e.name());
            }
            return;
        case Expr::Kind::Negate:
            out += "(-";
            emit(e.children()[0], def, out);
            out += ')';
            return;
        case Expr::Kind::Binary: {
            if (e.op() == BinaryOp::Pow) {
                out += "pow(";
                emit(e.children()[0], def, out);
                out += ", ";
                emit(e.children()[1], def, out);
                out += ')';
                return;
            }
            out += '(';
            emit(e.children()[0], def, out);
            switch (e.op()) {
                case BinaryOp::Add: out += " + "; break;
                case BinaryOp::Sub: out += " - "; break;
                case BinaryOp::Mul: out += " * "; break;
                case BinaryOp::Div: out += " / "; break;
                case BinaryOp::Pow: break;
            }
            emit(e.children()[1], def, out);
            out += ')';
            return;
        }
        case Expr::Kind::Call: {
            out += c_function(e.function());
            out += '(';
            bool first = true;
            for (const Expr& arg : e.children()) {
                if (!first) out += ", ";
                first = false;
                emit(arg, def, out);
            }
            out += ')';
            return;
        }
    }
}

std::string sanitized(std::string_view text) {
    std::string out;
    for (char c : text) out += std::isprint(static_cast<unsigned char>(c)) ? c : '?';
    return out;
}

std::string element(Layout layout, std::size_t n, std::size_t d) {
    if (layout == Layout::RowMajor) {
        return "positions[particle * " + std::to_string(n) + "u + " + std::to_string(d) + "u]";
    }
    return "positions[" + std::to_string(d) + "u * (size_t)stride + particle]";
}

}  // namespace

std::string emit_c_expression(const Expr& expr, const SystemDefinition& def) {
    std::string out;
    emit(expr, def, out);
    return out;
}

KernelSource emit_kernel_source(const SystemDefinition& def, Layout layout, Precision) {
    ValidationReport report = validate_system(def);
    if (!report.ok()) throw ValidationError("cannot generate kernel: " + report.summary());

    const std::size_t n = def.dimension();
    std::string src;
    src += "// swarm kernel: " + sanitized(def.name) + "\n";
    src += "// layout: " + std::string(to_string(layout)) + "-major, " + std::to_string(n) + " state variables, " +
           std::to_string(def.parameters.size()) + " parameters\n\n";

    src += "inline float swarm_sigmoid(float u)\n{\n    return 1.0f / (1.0f + exp(-u));\n}\n\n";

    src += "inline void swarm_derivative(const float* state, __global const float* params, float* out)\n{\n";
    for (std::size_t i = 0; i < n; ++i) {
        src += "    const float x_" + def.state_variables[i].name + " = state[" + std::to_string(i) + "];\n";
    }
    for (std::size_t i = 0; i < def.parameters.size(); ++i) {
        src += "    const float p_" + def.parameters[i].name + " = params[" + std::to_string(i) + "];\n";
    }
    for (std::size_t i = 0; i < n; ++i) {
        src += "    out[" + std::to_string(i) + "] = " + emit_c_expression(parse(def.state_variables[i].rhs), def) +
               ";\n";
    }
    src += "}\n\n";

    src += "__kernel void " + std::string(kKernelEntryPoint) +
           "(__global float* positions, __global const float* params, const float h, const uint offset, "
           "const uint stride)\n{\n";
    src += "    const size_t particle = (size_t)offset + get_global_id(0);\n";
    src += "    const float half_h = h * 0.5f;\n";
    src += "    const float sixth_h = h / 6.0f;\n";
    const std::string dim = std::to_string(n);
    src += "    float x[" + dim + "];\n    float t[" + dim + "];\n";
    src += "    float k1[" + dim + "];\n    float k2[" + dim + "];\n    float k3[" + dim + "];\n    float k4[" + dim +
           "];\n";
    for (std::size_t d = 0; d < n; ++d) {
        src += "    x[" + std::to_string(d) + "] = " + element(layout, n, d) + ";\n";
    }
    auto stage = [&](const char* from, const char* scale) {
        for (std::size_t d = 0; d < n; ++d) {
            const std::string i = std::to_string(d);
            src += "    t[" + i + "] = x[" + i + "] + " + scale + " * " + from + "[" + i + "];\n";
        }
    };
    src += "    swarm_derivative(x, params, k1);\n";
    stage("k1", "half_h");
    src += "    swarm_derivative(t, params, k2);\n";
    stage("k2", "half_h");
    src += "    swarm_derivative(t, params, k3);\n";
    stage("k3", "h");
    src += "    swarm_derivative(t, params, k4);\n";
    for (std::size_t d = 0; d < n; ++d) {
        const std::string i = std::to_string(d);
        src += "    " + element(layout, n, d) + " = x[" + i + "] + sixth_h * (k1[" + i + "] + 2.0f * k2[" + i +
               "] + 2.0f * k3[" + i + "] + k4[" + i + "]);\n";
    }
    src += "}\n";

    return KernelSource{std::move(src), std::string(kKernelEntryPoint), layout};
}

std::vector<std::string> find_branch_constructs(std::string_view source) {
    static const std::set<std::string, std::less<>> keywords{"if",   "else", "for",    "while", "do",
                                                             "switch", "case", "goto", "select", "break"};
    std::vector<std::string> found;
    std::size_t i = 0;
    while (i < source.size()) {
        const char c = source[i];
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '/') {
            while (i < source.size() && source[i] != '\n') ++i;
            continue;
        }
        if (c == '/' && i + 1 < source.size() && source[i + 1] == '*') {
            auto end = source.find("*/", i + 2);
            i = end == std::string_view::npos ? source.size() : end + 2;
            continue;
        }
        if (c == '?') {
            found.emplace_back("?");
            ++i;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < source.size() && (std::isalnum(static_cast<unsigned char>(source[j])) || source[j] == '_')) ++j;
            std::string_view word = source.substr(i, j - i);
            if (keywords.count(word)) found.emplace_back(word);
            i = j;
            continue;
        }
        ++i;
    }
    return found;
}

}  // namespace swarm
