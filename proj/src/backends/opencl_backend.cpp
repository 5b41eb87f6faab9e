// OpenCL GPU backend. The runtime is loaded with dlopen so the library builds and runs
// on machines without OpenCL headers or an ICD loader; the backend then reports itself
// unavailable.

#include <dlfcn.h>

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <mutex>

#include "backends.hpp"

namespace swarm {

namespace {

namespace cl {

using Int = std::int32_t;
using Uint = std::uint32_t;
using Bitfield = std::uint64_t;
using PlatformId = struct _cl_platform_id*;
using DeviceId = struct _cl_device_id*;
using Context = struct _cl_context*;
using Queue = struct _cl_command_queue*;
using Mem = struct _cl_mem*;
using ProgramHandle = struct _cl_program*;
using Kernel = struct _cl_kernel*;
using Event = struct _cl_event*;
using ContextProperties = std::intptr_t;

constexpr Int kSuccess = 0;
constexpr Bitfield kDeviceTypeGpu = 1 << 2;
constexpr Bitfield kDeviceTypeAccelerator = 1 << 3;
constexpr Bitfield kDeviceTypeAll = 0xFFFFFFFF;
constexpr Uint kDeviceName = 0x102B;
constexpr Bitfield kMemReadWrite = 1 << 0;
constexpr Bitfield kMemReadOnly = 1 << 2;
constexpr Uint kProgramBuildLog = 0x1183;
constexpr Uint kTrue = 1;

struct Api {
    Int (*GetPlatformIDs)(Uint, PlatformId*, Uint*);
    Int (*GetDeviceIDs)(PlatformId, Bitfield, Uint, DeviceId*, Uint*);
    Int (*GetDeviceInfo)(DeviceId, Uint, std::size_t, void*, std::size_t*);
    Context (*CreateContext)(const ContextProperties*, Uint, const DeviceId*,
                             void (*)(const char*, const void*, std::size_t, void*), void*, Int*);
    Queue (*CreateCommandQueue)(Context, DeviceId, Bitfield, Int*);
    Mem (*CreateBuffer)(Context, Bitfield, std::size_t, void*, Int*);
    ProgramHandle (*CreateProgramWithSource)(Context, Uint, const char**, const std::size_t*, Int*);
    Int (*BuildProgram)(ProgramHandle, Uint, const DeviceId*, const char*, void (*)(ProgramHandle, void*), void*);
    Int (*GetProgramBuildInfo)(ProgramHandle, DeviceId, Uint, std::size_t, void*, std::size_t*);
    Kernel (*CreateKernel)(ProgramHandle, const char*, Int*);
    Int (*SetKernelArg)(Kernel, Uint, std::size_t, const void*);
    Int (*EnqueueNDRangeKernel)(Queue, Kernel, Uint, const std::size_t*, const std::size_t*, const std::size_t*,
                                Uint, const Event*, Event*);
    Int (*EnqueueReadBuffer)(Queue, Mem, Uint, std::size_t, std::size_t, void*, Uint, const Event*, Event*);
    Int (*EnqueueWriteBuffer)(Queue, Mem, Uint, std::size_t, std::size_t, const void*, Uint, const Event*, Event*);
    Int (*Finish)(Queue);
    Int (*ReleaseMemObject)(Mem);
    Int (*ReleaseKernel)(Kernel);
    Int (*ReleaseProgram)(ProgramHandle);
    Int (*ReleaseCommandQueue)(Queue);
    Int (*ReleaseContext)(Context);
};

template <typename Fn>
void bind(void* lib, const char* name, Fn& fn) {
    fn = reinterpret_cast<Fn>(::dlsym(lib, name));
    if (!fn) throw BackendUnavailable(std::string("OpenCL runtime lacks ") + name);
}

/// Loaded once per process; nullptr when no runtime is installed.
const Api* api() {
    static std::once_flag once;
    static Api table{};
    static const Api* loaded = nullptr;
    std::call_once(once, [] {
        const char* override_path = std::getenv("SWARM_OPENCL_LIBRARY");
        void* lib = nullptr;
        for (const char* candidate : {override_path, "libOpenCL.so.1", "libOpenCL.so"}) {
            if (candidate && (lib = ::dlopen(candidate, RTLD_NOW | RTLD_LOCAL))) break;
        }
        if (!lib) return;
        try {
            bind(lib, "clGetPlatformIDs", table.GetPlatformIDs);
            bind(lib, "clGetDeviceIDs", table.GetDeviceIDs);
            bind(lib, "clGetDeviceInfo", table.GetDeviceInfo);
            bind(lib, "clCreateContext", table.CreateContext);
            bind(lib, "clCreateCommandQueue", table.CreateCommandQueue);
            bind(lib, "clCreateBuffer", table.CreateBuffer);
            bind(lib, "clCreateProgramWithSource", table.CreateProgramWithSource);
            bind(lib, "clBuildProgram", table.BuildProgram);
            bind(lib, "clGetProgramBuildInfo", table.GetProgramBuildInfo);
            bind(lib, "clCreateKernel", table.CreateKernel);
            bind(lib, "clSetKernelArg", table.SetKernelArg);
            bind(lib, "clEnqueueNDRangeKernel", table.EnqueueNDRangeKernel);
            bind(lib, "clEnqueueReadBuffer", table.EnqueueReadBuffer);
            bind(lib, "clEnqueueWriteBuffer", table.EnqueueWriteBuffer);
            bind(lib, "clFinish", table.Finish);
            bind(lib, "clReleaseMemObject", table.ReleaseMemObject);
            bind(lib, "clReleaseKernel", table.ReleaseKernel);
            bind(lib, "clReleaseProgram", table.ReleaseProgram);
            bind(lib, "clReleaseCommandQueue", table.ReleaseCommandQueue);
            bind(lib, "clReleaseContext", table.ReleaseContext);
            loaded = &table;
        } catch (const BackendUnavailable&) {
            loaded = nullptr;
        }
    });
    return loaded;
}

void check(Int status, const char* what) {
    if (status != kSuccess) throw BackendError(std::string(what) + " failed with OpenCL error " + std::to_string(status));
}

Bitfield accepted_device_types() {
    const char* any = std::getenv("SWARM_OPENCL_ALLOW_CPU");
    if (any && std::string(any) == "1") return kDeviceTypeAll;
    return kDeviceTypeGpu | kDeviceTypeAccelerator;
}

/// First device of an accepted type across all platforms.
DeviceId pick_device(const Api& a) {
    Uint platform_count = 0;
    if (a.GetPlatformIDs(0, nullptr, &platform_count) != kSuccess || platform_count == 0) return nullptr;
    std::vector<PlatformId> platforms(platform_count);
    if (a.GetPlatformIDs(platform_count, platforms.data(), nullptr) != kSuccess) return nullptr;
    for (PlatformId p : platforms) {
        Uint device_count = 0;
        if (a.GetDeviceIDs(p, accepted_device_types(), 0, nullptr, &device_count) != kSuccess || device_count == 0) {
            continue;
        }
        std::vector<DeviceId> devices(device_count);
        if (a.GetDeviceIDs(p, accepted_device_types(), device_count, devices.data(), nullptr) == kSuccess) {
            return devices.front();
        }
    }
    return nullptr;
}

std::string device_name_of(const Api& a, DeviceId device) {
    std::size_t size = 0;
    if (a.GetDeviceInfo(device, kDeviceName, 0, nullptr, &size) != kSuccess || size == 0) return "opencl device";
    std::string name(size, '\0');
    a.GetDeviceInfo(device, kDeviceName, size, name.data(), nullptr);
    while (!name.empty() && name.back() == '\0') name.pop_back();
    return name;
}

}  // namespace cl

class GpuBackend final : public Backend {
public:
    GpuBackend(const SystemDefinition& def, Layout layout, std::size_t particles)
        : layout_(layout), particles_(particles), dimension_(def.dimension()) {
        try {
            initialize(def);
        } catch (...) {
            release();
            throw;
        }
    }

    GpuBackend(const GpuBackend&) = delete;
    GpuBackend& operator=(const GpuBackend&) = delete;

    ~GpuBackend() override { release(); }

    void initialize(const SystemDefinition& def) {
        api_ = cl::api();
        if (!api_) throw BackendUnavailable("no OpenCL runtime found");
        if (particles_ > 0xffffffffu) throw BackendError("particle count exceeds 32-bit kernel indexing");
        device_ = cl::pick_device(*api_);
        if (!device_) throw BackendUnavailable("no OpenCL GPU device found");
        name_ = cl::device_name_of(*api_, device_);

        cl::Int status = 0;
        context_ = api_->CreateContext(nullptr, 1, &device_, nullptr, nullptr, &status);
        cl::check(status, "clCreateContext");
        queue_ = api_->CreateCommandQueue(context_, device_, 0, &status);
        cl::check(status, "clCreateCommandQueue");

        const std::size_t bytes = std::max<std::size_t>(particles_ * dimension_, 1) * sizeof(float);
        positions_ = api_->CreateBuffer(context_, cl::kMemReadWrite, bytes, nullptr, &status);
        cl::check(status, "clCreateBuffer(positions)");
        params_ = api_->CreateBuffer(context_, cl::kMemReadOnly,
                                     std::max<std::size_t>(def.parameters.size(), 1) * sizeof(float), nullptr,
                                     &status);
        cl::check(status, "clCreateBuffer(params)");

        const KernelSource kernel = emit_kernel_source(def, layout_);
        const char* text = kernel.source.c_str();
        const std::size_t length = kernel.source.size();
        program_ = api_->CreateProgramWithSource(context_, 1, &text, &length, &status);
        cl::check(status, "clCreateProgramWithSource");
        if (api_->BuildProgram(program_, 1, &device_, nullptr, nullptr, nullptr) != cl::kSuccess) {
            std::size_t size = 0;
            api_->GetProgramBuildInfo(program_, device_, cl::kProgramBuildLog, 0, nullptr, &size);
            std::string log(size, '\0');
            api_->GetProgramBuildInfo(program_, device_, cl::kProgramBuildLog, size, log.data(), nullptr);
            throw BackendError("OpenCL kernel build failed: " + log);
        }
        kernel_ = api_->CreateKernel(program_, kernel.entry_point.c_str(), &status);
        cl::check(status, "clCreateKernel");
        cl::check(api_->SetKernelArg(kernel_, 0, sizeof(cl::Mem), &positions_), "clSetKernelArg(positions)");
        cl::check(api_->SetKernelArg(kernel_, 1, sizeof(cl::Mem), &params_), "clSetKernelArg(params)");
    }

    void release() noexcept {
        if (!api_) return;
        if (queue_) api_->Finish(queue_);
        if (kernel_) api_->ReleaseKernel(kernel_);
        if (program_) api_->ReleaseProgram(program_);
        if (params_) api_->ReleaseMemObject(params_);
        if (positions_) api_->ReleaseMemObject(positions_);
        if (queue_) api_->ReleaseCommandQueue(queue_);
        if (context_) api_->ReleaseContext(context_);
    }

    BackendKind kind() const override { return BackendKind::Gpu; }
    std::string device_name() const override { return name_; }
    Layout layout() const override { return layout_; }
    std::size_t particle_count() const override { return particles_; }
    std::size_t dimension() const override { return dimension_; }

    void upload(std::span<const float> positions) override {
        if (positions.size() != particles_ * dimension_) throw BackendError("upload size mismatch");
        write(0, particles_, positions);
    }

    void set_parameters(std::span<const float> values) override {
        if (values.empty()) return;
        cl::check(api_->EnqueueWriteBuffer(queue_, params_, cl::kTrue, 0, values.size_bytes(), values.data(), 0,
                                           nullptr, nullptr),
                  "clEnqueueWriteBuffer(params)");
    }

    void dispatch(std::size_t offset, std::size_t count, float h) override {
        check_range(offset, count);
        if (count == 0) return;
        const auto first = static_cast<cl::Uint>(offset);
        const auto stride = static_cast<cl::Uint>(particles_);
        cl::check(api_->SetKernelArg(kernel_, 2, sizeof(float), &h), "clSetKernelArg(h)");
        cl::check(api_->SetKernelArg(kernel_, 3, sizeof(cl::Uint), &first), "clSetKernelArg(offset)");
        cl::check(api_->SetKernelArg(kernel_, 4, sizeof(cl::Uint), &stride), "clSetKernelArg(stride)");
        const std::size_t global = count;
        cl::check(api_->EnqueueNDRangeKernel(queue_, kernel_, 1, nullptr, &global, nullptr, 0, nullptr, nullptr),
                  "clEnqueueNDRangeKernel");
    }

    void read(std::size_t first, std::size_t count, std::span<float> out) override {
        check_range(first, count);
        if (out.size() != count * dimension_) throw BackendError("read size mismatch");
        if (count == 0) return;
        if (layout_ == Layout::RowMajor) {
            cl::check(api_->EnqueueReadBuffer(queue_, positions_, cl::kTrue, first * dimension_ * sizeof(float),
                                              out.size_bytes(), out.data(), 0, nullptr, nullptr),
                      "clEnqueueReadBuffer");
            return;
        }
        std::vector<float> column(count);
        for (std::size_t d = 0; d < dimension_; ++d) {
            cl::check(api_->EnqueueReadBuffer(queue_, positions_, cl::kTrue, (d * particles_ + first) * sizeof(float),
                                              count * sizeof(float), column.data(), 0, nullptr, nullptr),
                      "clEnqueueReadBuffer");
            for (std::size_t i = 0; i < count; ++i) out[i * dimension_ + d] = column[i];
        }
    }

    void write(std::size_t first, std::size_t count, std::span<const float> values) override {
        check_range(first, count);
        if (values.size() != count * dimension_) throw BackendError("write size mismatch");
        if (count == 0) return;
        if (layout_ == Layout::RowMajor) {
            cl::check(api_->EnqueueWriteBuffer(queue_, positions_, cl::kTrue, first * dimension_ * sizeof(float),
                                               values.size_bytes(), values.data(), 0, nullptr, nullptr),
                      "clEnqueueWriteBuffer");
            return;
        }
        std::vector<float> column(count);
        for (std::size_t d = 0; d < dimension_; ++d) {
            for (std::size_t i = 0; i < count; ++i) column[i] = values[i * dimension_ + d];
            cl::check(api_->EnqueueWriteBuffer(queue_, positions_, cl::kTrue, (d * particles_ + first) * sizeof(float),
                                               count * sizeof(float), column.data(), 0, nullptr, nullptr),
                      "clEnqueueWriteBuffer");
        }
    }

    void finish() override { cl::check(api_->Finish(queue_), "clFinish"); }

private:
    void check_range(std::size_t first, std::size_t count) const {
        if (first > particles_ || count > particles_ - first) throw BackendError("particle range out of bounds");
    }

    const cl::Api* api_ = nullptr;
    Layout layout_;
    std::size_t particles_;
    std::size_t dimension_;
    std::string name_;
    cl::DeviceId device_ = nullptr;
    cl::Context context_ = nullptr;
    cl::Queue queue_ = nullptr;
    cl::Mem positions_ = nullptr;
    cl::Mem params_ = nullptr;
    cl::ProgramHandle program_ = nullptr;
    cl::Kernel kernel_ = nullptr;
};

}  // namespace

std::unique_ptr<Backend> make_gpu_backend(const SystemDefinition& def, Layout layout, std::size_t particles) {
    return std::make_unique<GpuBackend>(def, layout, particles);
}

bool gpu_backend_available() {
    const cl::Api* a = cl::api();
    return a && cl::pick_device(*a) != nullptr;
}

}  // namespace swarm
