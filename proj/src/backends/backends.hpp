#pragma once

#include <memory>

#include "swarm/backend.hpp"
#include "swarm/error.hpp"

namespace swarm {

std::unique_ptr<Backend> make_cpu_backend(const SystemDefinition& def, Layout layout, std::size_t particles);
std::unique_ptr<Backend> make_native_backend(const SystemDefinition& def, Layout layout, std::size_t particles);
std::unique_ptr<Backend> make_gpu_backend(const SystemDefinition& def, Layout layout, std::size_t particles);

bool native_backend_available();
bool gpu_backend_available();

}  // namespace swarm
