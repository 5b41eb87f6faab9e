#include "swarm/builtins.hpp"

#include <charconv>
#include <string>

#include "swarm/error.hpp"

namespace swarm {

namespace {

constexpr std::size_t kDefaultCount = 10000;

// w / (exp(w) - 1) written as w / (2 tanh(w/2)) - w/2. The tiny shift keeps w off
// the removable singularity at 0 without a branch.
std::string exp_ratio(const std::string& w) {
    const std::string s = "(" + w + " + 1e-6)";
    return s + " / (2*tanh(" + s + " / 2)) - " + s + " / 2";
}

}  // namespace

SystemDefinition builtin_lorenz() {
    SystemDefinition def;
    def.name = "lorenz";
    def.state_variables = {
        {"x", "sigma*(y-x)", {-60.0, 60.0}},
        {"y", "x*(r-z)-y", {-60.0, 60.0}},
        {"z", "x*y-beta*z", {-10.0, 110.0}},
    };
    def.parameters = {
        {"sigma", 10.0, 0.0, 50.0},
        {"beta", 8.0 / 3.0, 0.0, 10.0},
        {"r", 28.0, 0.0, 350.0},
    };
    def.techniques = {{"xyz", Projection::Perspective3D, {"x", "y", "z"}, ColorMode::position()}};
    ParticleGroup g;
    g.count = kDefaultCount;
    g.technique = "xyz";
    g.ic = {{"x", {-10.0, 10.0}}, {"y", {-30.0, 30.0}}, {"z", {0.0, 50.0}}};
    def.groups = {g};
    return def;
}

SystemDefinition builtin_stn_gpe() {
    SystemDefinition def;
    def.name = "stn_gpe";
    def.state_variables = {
        {"x", "(-x + sigmoid(a*(w_ss*x - w_gs*y + I - theta_z))) / tau_s", {0.0, 1.0}},
        {"y", "(-y + sigmoid(a*(w_sg*x - w_gg*y - theta_z))) / tau_g", {0.0, 1.0}},
    };
    // Not published; picked so that w_ss sweeps from a stable focus through
    // oscillation to a high-activity node inside [0, 15].
    def.parameters = {
        {"w_ss", 0.0, 0.0, 15.0},  {"w_gs", 9.7, 0.0, 20.0},   {"w_sg", 4.6, 0.0, 20.0},
        {"w_gg", 1.5, 0.0, 20.0},  {"I", 2.2, -10.0, 10.0},    {"tau_s", 1.0, 0.1, 10.0},
        {"tau_g", 1.5, 0.1, 10.0}, {"a", 8.0, 0.1, 20.0},      {"theta_z", 1.6, -5.0, 5.0},
    };
    def.techniques = {
        {"forward", Projection::Planar2D, {"x", "y"}, ColorMode::fixed(0.2, 0.9, 0.3)},
        {"backward", Projection::Planar2D, {"x", "y"}, ColorMode::fixed(0.9, 0.3, 0.9)},
    };
    ParticleGroup fwd;
    fwd.count = kDefaultCount;
    fwd.technique = "forward";
    ParticleGroup bwd = fwd;
    bwd.technique = "backward";
    bwd.direction = Direction::Backward;
    def.groups = {fwd, bwd};
    return def;
}

SystemDefinition builtin_hh_ring(int n) {
    if (n < 1) throw OutOfRange("hh ring needs at least one neuron, got " + std::to_string(n));
    SystemDefinition def;
    def.name = n == 1 ? "hh" : "hh_ring_" + std::to_string(n);

    ParticleGroup g;
    g.count = kDefaultCount;
    for (int i = 1; i <= n; ++i) {
        const std::string k = "_" + std::to_string(i);
        const std::string prev = "_" + std::to_string(i == 1 ? n : i - 1);
        const std::string V = "V" + k;
        const std::string h = "h" + k, m = "m" + k, nn = "n" + k, s = "s" + k;

        const std::string am = exp_ratio("(25 - " + V + ")/10");
        const std::string bm = "4*exp(-" + V + "/18)";
        const std::string ah = "0.07*exp(-" + V + "/20)";
        const std::string bh = "1/(exp((30 - " + V + ")/10) + 1)";
        const std::string an = "0.1*(" + exp_ratio("(10 - " + V + ")/10") + ")";
        const std::string bn = "0.125*exp(-" + V + "/80)";

        // Integer powers spelled out as products; pow() costs several times more.
        const std::string m3 = m + "*" + m + "*" + m;
        const std::string n4 = nn + "*" + nn + "*" + nn + "*" + nn;
        const std::string dv = "(g_lk*(e_lk - " + V + ") + g_na*" + m3 + "*" + h + "*(e_na - " + V + ") + g_k*" + n4 +
                               "*(e_k - " + V + ") + g_syn*(e_syn - " + V + ")*s" + prev + " + I" + k + ") / C";
        const Interval gate{-0.1, 1.1};
        def.state_variables.push_back({V, dv, {-40.0, 140.0}});
        def.state_variables.push_back({h, ah + "*(1 - " + h + ") - " + bh + "*" + h, gate});
        def.state_variables.push_back({m, "(" + am + ")*(1 - " + m + ") - " + bm + "*" + m, gate});
        def.state_variables.push_back({nn, "(" + an + ")*(1 - " + nn + ") - " + bn + "*" + nn, gate});
        def.state_variables.push_back(
            {s, "sigmoid(sigma*(" + V + " - theta))*(1 - " + s + ")/tau_r - " + s + "/tau_d", gate});
        def.parameters.push_back({"I" + k, 10.0, -20.0, 50.0});

        g.ic[V] = {-20.0, 100.0};
        for (const auto& name : {h, m, nn, s}) g.ic[name] = {0.0, 1.0};
    }
    def.parameters.insert(def.parameters.end(), {
                                                    {"C", 1.0, 0.1, 10.0},
                                                    {"g_na", 120.0, 0.0, 240.0},
                                                    {"g_k", 36.0, 0.0, 72.0},
                                                    {"g_lk", 0.3, 0.0, 3.0},
                                                    {"e_na", 115.0, 50.0, 150.0},
                                                    {"e_k", -12.0, -40.0, 0.0},
                                                    {"e_lk", 10.613, -20.0, 40.0},
                                                    {"g_syn", 0.5, 0.0, 5.0},
                                                    {"e_syn", 10.0, -20.0, 120.0},
                                                    {"tau_r", 0.5, 0.05, 10.0},
                                                    {"tau_d", 3.0, 0.1, 50.0},
                                                    {"sigma", 5.0, 0.1, 20.0},
                                                    {"theta", 20.0, -20.0, 100.0},
                                                });

    RenderTechnique t;
    t.color = ColorMode::position();
    if (n >= 3) {
        t.id = "voltages";
        t.projection = Projection::Perspective3D;
        t.axes = {"V_1", "V_2", "V_3"};
    } else if (n == 2) {
        t.id = "voltages";
        t.projection = Projection::Planar2D;
        t.axes = {"V_1", "V_2"};
    } else {
        t.id = "phase";
        t.projection = Projection::Planar2D;
        t.axes = {"V_1", "n_1"};
    }
    g.technique = t.id;
    def.techniques = {t};
    def.groups = {g};
    return def;
}

std::optional<SystemDefinition> find_builtin(std::string_view name) {
    if (name == "lorenz") return builtin_lorenz();
    if (name == "stn_gpe") return builtin_stn_gpe();
    if (name == "hh") return builtin_hh_ring(1);
    constexpr std::string_view ring = "hh_ring:";
    if (name.substr(0, ring.size()) == ring) {
        const std::string_view digits = name.substr(ring.size());
        int n = 0;
        auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
        if (ec != std::errc() || ptr != digits.data() + digits.size() || digits.empty()) return std::nullopt;
        return builtin_hh_ring(n);
    }
    return std::nullopt;
}

}  // namespace swarm
