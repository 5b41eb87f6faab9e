#include <dlfcn.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>

#include "backends.hpp"

#ifndef SWARM_HOST_CXX
#define SWARM_HOST_CXX "c++"
#endif

namespace swarm {

namespace fs = std::filesystem;

namespace {

// Maps the OpenCL C subset the generator emits onto C++ so the same kernel text
// runs on the host. One work item per loop iteration.
constexpr const char* kPrelude = R"(#include <cmath>
#include <cstddef>
#include <cstdint>

namespace swarm_kernel {
using std::exp; using std::log; using std::sin; using std::cos; using std::tan; using std::tanh;
using std::sqrt; using std::fabs; using std::pow; using std::fmin; using std::fmax;
using std::size_t;
typedef std::uint32_t uint;
static size_t swarm_work_item = 0;
static inline size_t get_global_id(int) { return swarm_work_item; }
#define __kernel static
#define __global
)";

constexpr const char* kEpilogue = R"(
}  // namespace swarm_kernel

extern "C" void swarm_host_dispatch(float* positions, const float* params, float h, unsigned offset,
                                    unsigned stride, std::size_t count)
{
    for (std::size_t i = 0; i < count; ++i) {
        swarm_kernel::swarm_work_item = i;
        swarm_kernel::swarm_rk4(positions, params, h, offset, stride);
    }
}
)";

constexpr const char* kFlags = "-std=c++17 -O2 -fPIC -shared";

using DispatchFn = void (*)(float*, const float*, float, unsigned, unsigned, std::size_t);

std::string compiler() {
    if (const char* env = std::getenv("SWARM_CXX"); env && *env) return env;
    return SWARM_HOST_CXX;
}

fs::path cache_dir() {
    if (const char* env = std::getenv("SWARM_KERNEL_CACHE"); env && *env) return env;
    return fs::temp_directory_path() / ("swarm-kernels-" + std::to_string(::getuid()));
}

std::string quoted(const fs::path& p) { return "'" + p.string() + "'"; }

class SharedLibrary {
public:
    explicit SharedLibrary(const fs::path& path) : handle_(::dlopen(path.c_str(), RTLD_NOW | RTLD_LOCAL)) {
        if (!handle_) throw BackendUnavailable(std::string("cannot load native kernel: ") + ::dlerror());
    }
    SharedLibrary(const SharedLibrary&) = delete;
    SharedLibrary& operator=(const SharedLibrary&) = delete;
    ~SharedLibrary() { ::dlclose(handle_); }

    void* symbol(const char* name) const {
        void* s = ::dlsym(handle_, name);
        if (!s) throw BackendUnavailable(std::string("native kernel lacks symbol ") + name);
        return s;
    }

private:
    void* handle_;
};

std::mutex& build_mutex() {
    static std::mutex m;
    return m;
}

/// Compiles (or fetches from the cache) a shared object for the kernel source.
fs::path build_kernel(const std::string& kernel_source) {
    const std::string unit = std::string(kPrelude) + kernel_source + kEpilogue;
    const std::string cxx = compiler();
    const std::size_t key = std::hash<std::string>{}(cxx + '\n' + kFlags + '\n' + unit);
    std::ostringstream name;
    name << std::hex << key;

    std::lock_guard lock(build_mutex());
    const fs::path dir = cache_dir();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw BackendUnavailable("cannot create kernel cache " + dir.string() + ": " + ec.message());

    const fs::path lib = dir / ("k" + name.str() + ".so");
    if (fs::exists(lib)) return lib;

    const std::string stem = "k" + name.str() + "." + std::to_string(::getpid());
    const fs::path src = dir / (stem + ".cpp");
    const fs::path tmp_lib = dir / (stem + ".so");
    const fs::path log = dir / (stem + ".log");
    {
        std::ofstream out(src);
        out << unit;
        if (!out) throw BackendUnavailable("cannot write kernel source to " + src.string());
    }
    const std::string cmd =
        cxx + " " + kFlags + " -o " + quoted(tmp_lib) + " " + quoted(src) + " > " + quoted(log) + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (status != 0) {
        std::ifstream in(log);
        std::stringstream diag;
        diag << in.rdbuf();
        fs::remove(src, ec);
        throw BackendUnavailable("host compiler failed on generated kernel (" + cxx + "): " + diag.str());
    }
    fs::rename(tmp_lib, lib, ec);
    if (ec) throw BackendUnavailable("cannot install compiled kernel: " + ec.message());
    fs::remove(src, ec);
    fs::remove(log, ec);
    return lib;
}

class NativeBackend final : public Backend {
public:
    NativeBackend(const SystemDefinition& def, Layout layout, std::size_t particles)
        : buffer_(layout, particles, def.dimension()),
          params_(std::max<std::size_t>(def.parameters.size(), 1), 0.0f),
          library_(build_kernel(emit_kernel_source(def, layout).source)),
          dispatch_(reinterpret_cast<DispatchFn>(library_.symbol("swarm_host_dispatch"))) {
        if (particles > 0xffffffffu) throw BackendError("particle count exceeds 32-bit kernel indexing");
    }

    BackendKind kind() const override { return BackendKind::Native; }
    std::string device_name() const override { return "host cpu (compiled kernel, " + compiler() + ")"; }
    Layout layout() const override { return buffer_.layout(); }
    std::size_t particle_count() const override { return buffer_.particles(); }
    std::size_t dimension() const override { return buffer_.dimension(); }

    void upload(std::span<const float> positions) override { buffer_.upload(positions); }
    void set_parameters(std::span<const float> values) override {
        if (values.size() > params_.size()) throw BackendError("parameter count mismatch");
        std::copy(values.begin(), values.end(), params_.begin());
    }
    void read(std::size_t first, std::size_t count, std::span<float> out) override { buffer_.read(first, count, out); }
    void write(std::size_t first, std::size_t count, std::span<const float> values) override {
        buffer_.write(first, count, values);
    }

    void dispatch(std::size_t offset, std::size_t count, float h) override {
        if (offset > buffer_.particles() || count > buffer_.particles() - offset) {
            throw BackendError("dispatch range out of bounds");
        }
        dispatch_(buffer_.data().data(), params_.data(), h, static_cast<unsigned>(offset),
                  static_cast<unsigned>(buffer_.particles()), count);
    }

private:
    HostBuffer buffer_;
    std::vector<float> params_;
    SharedLibrary library_;
    DispatchFn dispatch_;
};

}  // namespace

std::unique_ptr<Backend> make_native_backend(const SystemDefinition& def, Layout layout, std::size_t particles) {
    return std::make_unique<NativeBackend>(def, layout, particles);
}

bool native_backend_available() {
    static const bool available = [] {
        try {
            SystemDefinition probe;
            probe.name = "probe";
            probe.state_variables.push_back({"x", "-x", {-1.0, 1.0}});
            NativeBackend backend(probe, Layout::RowMajor, 1);
            return true;
        } catch (const std::exception&) {
            return false;
        }
    }();
    return available;
}

}  // namespace swarm
