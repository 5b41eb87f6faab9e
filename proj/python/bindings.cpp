// Python bindings. Systems cross the boundary as the JSON document format.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "swarm/backend.hpp"
#include "swarm/bench.hpp"
#include "swarm/builtins.hpp"
#include "swarm/codegen.hpp"
#include "swarm/engine.hpp"
#include "swarm/error.hpp"
#include "swarm/expression.hpp"
#include "swarm/reference.hpp"
#include "swarm/system.hpp"

namespace py = pybind11;
using namespace swarm;

namespace {

SystemDefinition builtin_or_throw(const std::string& name) {
    auto def = find_builtin(name);
    if (!def) throw ValidationError("unknown builtin system '" + name + "'");
    return *def;
}

py::array_t<float> as_array(std::vector<float> data, std::size_t rows, std::size_t cols) {
    py::array_t<float> out({rows, cols});
    std::copy(data.begin(), data.end(), out.mutable_data());
    return out;
}

}  // namespace

PYBIND11_MODULE(_swarm, m) {
    m.doc() = "Particle-swarm ODE integration core";

    auto error = py::register_exception<Error>(m, "Error");
    py::register_exception<SyntaxError>(m, "SyntaxError", error);
    py::register_exception<SchemaError>(m, "SchemaError", error);
    py::register_exception<ValidationError>(m, "ValidationError", error);
    py::register_exception<UnknownParameter>(m, "UnknownParameter", error);
    py::register_exception<OutOfRange>(m, "OutOfRange", error);
    py::register_exception<UnboundIdentifier>(m, "UnboundIdentifier", error);
    auto backend_error = py::register_exception<BackendError>(m, "BackendError", error);
    py::register_exception<BackendUnavailable>(m, "BackendUnavailable", backend_error);

    py::class_<Interval>(m, "Interval")
        .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
        .def_readwrite("lo", &Interval::lo)
        .def_readwrite("hi", &Interval::hi)
        .def("__repr__", [](const Interval& i) {
            return "Interval(" + std::to_string(i.lo) + ", " + std::to_string(i.hi) + ")";
        });

    py::class_<SystemDefinition>(m, "System")
        .def_readonly("name", &SystemDefinition::name)
        .def_property_readonly("dimension", &SystemDefinition::dimension)
        .def_property_readonly("particle_count", &SystemDefinition::particle_count)
        .def_property_readonly("variables",
                               [](const SystemDefinition& d) {
                                   std::vector<std::string> out;
                                   for (const auto& v : d.state_variables) out.push_back(v.name);
                                   return out;
                               })
        .def_property_readonly("parameters",
                               [](const SystemDefinition& d) {
                                   py::dict out;
                                   for (const auto& p : d.parameters) {
                                       out[py::str(p.name)] = py::make_tuple(p.default_value, p.min, p.max);
                                   }
                                   return out;
                               })
        .def("rhs", [](const SystemDefinition& d, const std::string& var) {
            const auto* v = d.find_variable(var);
            if (!v) throw ValidationError("unknown state variable '" + var + "'");
            return v->rhs;
        })
        .def("to_json", &save_system)
        .def("__eq__", [](const SystemDefinition& a, const SystemDefinition& b) { return a == b; })
        .def("__repr__", [](const SystemDefinition& d) {
            return "<System " + d.name + " dim=" + std::to_string(d.dimension()) +
                   " particles=" + std::to_string(d.particle_count()) + ">";
        });

    m.def("load_system", [](const std::string& doc) { return load_system(doc); }, py::arg("document"),
          "Parse a system document. Raises SyntaxError, SchemaError or ValidationError.");
    m.def("save_system", &save_system);
    m.def("validate", [](const SystemDefinition& d) { return validate_system(d).errors; },
          "List of validation errors; empty when the system is valid.");
    m.def("builtin", &builtin_or_throw, py::arg("name"), "lorenz, stn_gpe, hh or hh_ring:N");
    m.def("lift_parameter", &lift_parameter, py::arg("system"), py::arg("parameter"), py::arg("ic"),
          py::arg("bounds"));
    m.def("with_particle_count", &with_particle_count);

    m.def("parse_expression", [](const std::string& text) { return print(parse(text)); },
          "Canonical printed form of an expression.");
    m.def("eval_expression",
          [](const std::string& text, const std::map<std::string, double>& vars) {
              Bindings b(vars.begin(), vars.end());
              return eval(parse(text), b);
          },
          py::arg("text"), py::arg("bindings") = std::map<std::string, double>{});
    m.def("reference_step",
          [](const SystemDefinition& d, const std::vector<double>& x, double h) {
              return rk4_step_reference(d, x, default_parameters(d), h);
          },
          "One double-precision RK4 step with default parameters.");

    m.def("emit_kernel_source",
          [](const SystemDefinition& d, const std::string& layout) {
              return emit_kernel_source(d, parse_layout(layout)).source;
          },
          py::arg("system"), py::arg("layout") = "column");
    m.def("find_branch_constructs", [](const std::string& s) { return find_branch_constructs(s); });
    m.def("backend_available", [](const std::string& k) { return backend_available(parse_backend(k)); });

    m.def("bench_json",
          [](const SystemDefinition& d, std::size_t particles, std::size_t steps, std::vector<std::string> backends) {
              BenchOptions o;
              o.particles = particles;
              o.steps = steps;
              o.backends.clear();
              for (const auto& b : backends) o.backends.push_back(parse_backend(b));
              BenchReport r;
              {
                  py::gil_scoped_release release;
                  r = bench(d, o);
              }
              return to_json(r);
          },
          py::arg("system"), py::arg("particles"), py::arg("steps") = 1000,
          py::arg("backends") = std::vector<std::string>{"cpu", "native", "gpu"});

    py::class_<Simulation>(m, "Simulation")
        .def(py::init([](const SystemDefinition& d, double step_size, std::uint64_t seed, const std::string& backend,
                         const std::string& layout, std::size_t reset_batch) {
                 SimulationConfig c;
                 c.step_size = step_size;
                 c.seed = seed;
                 c.layout = parse_layout(layout);
                 c.reset_batch = reset_batch;
                 return std::make_unique<Simulation>(d, c, parse_backend(backend));
             }),
             py::arg("system"), py::arg("step_size") = 0.01, py::arg("seed") = 0, py::arg("backend") = "cpu",
             py::arg("layout") = "column", py::arg("reset_batch") = 0)
        .def_property_readonly("particle_count", &Simulation::particle_count)
        .def_property_readonly("dimension", &Simulation::dimension)
        .def_property_readonly("steps_taken", &Simulation::steps_taken)
        .def_property_readonly("system", &Simulation::system)
        .def("step", &Simulation::step, py::call_guard<py::gil_scoped_release>())
        .def("run", &Simulation::run, py::arg("steps"), py::call_guard<py::gil_scoped_release>())
        .def("scan_and_reset",
             [](Simulation& s) {
                 auto r = s.scan_and_reset();
                 return r.reset_count;
             },
             "Scan the next batch; returns the number of particles reset.")
        .def("set_parameter", &Simulation::set_parameter)
        .def("enqueue_parameter", &Simulation::enqueue_parameter)
        .def("parameter", &Simulation::parameter)
        .def("set_step_size", &Simulation::set_step_size)
        .def("read_back",
             [](Simulation& s) { return as_array(s.read_back(), s.particle_count(), s.dimension()); },
             "Positions as a float32 array of shape (particles, dimension).")
        .def("write_particles",
             [](Simulation& s, std::size_t first, py::array_t<float, py::array::c_style | py::array::forcecast> a) {
                 s.write_particles(first, std::span<const float>(a.data(), static_cast<std::size_t>(a.size())));
             })
        .def("reset_epochs", [](const Simulation& s) {
            auto e = s.reset_epochs();
            return std::vector<std::uint32_t>(e.begin(), e.end());
        });
}
