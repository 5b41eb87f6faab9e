#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "swarm/codegen.hpp"
#include "swarm/engine.hpp"

namespace swarm {

enum class SnapshotFormat { Csv, Binary };

SnapshotFormat parse_snapshot_format(std::string_view text);

/// "id,group,<vars>" header, one row per particle. Floats are printed with the
/// shortest representation that round-trips.
void write_snapshot_csv(std::ostream& out, const SystemDefinition& def, const std::vector<std::uint32_t>& groups,
                        const std::vector<float>& positions);

/// 16-byte header ("SWRM", u32 particles, u32 dimension, u32 layout) then little-endian
/// floats in the given layout.
void write_snapshot_binary(std::ostream& out, std::size_t particles, std::size_t dimension, Layout layout,
                           const std::vector<float>& positions);

void write_snapshot(std::ostream& out, Simulation& sim, SnapshotFormat format);

struct BinarySnapshot {
    std::uint32_t particles = 0;
    std::uint32_t dimension = 0;
    Layout layout = Layout::RowMajor;
    std::vector<float> values;  // as stored, in `layout`
};

/// Throws SchemaError on a bad magic, unknown layout or truncated payload.
BinarySnapshot read_snapshot_binary(std::string_view bytes);

}  // namespace swarm
