#include "swarm/snapshot.hpp"

#include <bit>
#include <charconv>
#include <cstring>

#include "swarm/error.hpp"

namespace swarm {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                           static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
    out.write(bytes, 4);
}

std::uint32_t get_u32(std::string_view bytes, std::size_t at) {
    std::uint32_t v = 0;
    for (std::size_t i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[at + i])) << (8 * i);
    return v;
}

std::uint32_t narrow(std::size_t n, const char* what) {
    if (n > 0xffffffffu) throw OutOfRange(std::string(what) + " does not fit the snapshot header");
    return static_cast<std::uint32_t>(n);
}

}  // namespace

SnapshotFormat parse_snapshot_format(std::string_view text) {
    if (text == "csv") return SnapshotFormat::Csv;
    if (text == "bin") return SnapshotFormat::Binary;
    throw OutOfRange("unknown snapshot format '" + std::string(text) + "' (expected csv or bin)");
}

void write_snapshot_csv(std::ostream& out, const SystemDefinition& def, const std::vector<std::uint32_t>& groups,
                        const std::vector<float>& positions) {
    const std::size_t n = def.dimension();
    out << "id,group";
    for (const auto& v : def.state_variables) out << ',' << v.name;
    out << '\n';
    char buf[64];
    for (std::size_t p = 0; p < groups.size(); ++p) {
        out << p << ',' << groups[p];
        for (std::size_t d = 0; d < n; ++d) {
            auto [end, ec] = std::to_chars(buf, buf + sizeof buf, positions[p * n + d]);
            out << ',' << std::string_view(buf, static_cast<std::size_t>(end - buf));
        }
        out << '\n';
    }
}

void write_snapshot_binary(std::ostream& out, std::size_t particles, std::size_t dimension, Layout layout,
                           const std::vector<float>& positions) {
    if (positions.size() != particles * dimension) throw OutOfRange("snapshot size mismatch");
    out.write("SWRM", 4);
    put_u32(out, narrow(particles, "particle count"));
    put_u32(out, narrow(dimension, "dimension"));
    put_u32(out, static_cast<std::uint32_t>(layout));
    for (float f : positions) put_u32(out, std::bit_cast<std::uint32_t>(f));
}

void write_snapshot(std::ostream& out, Simulation& sim, SnapshotFormat format) {
    std::vector<float> rows = sim.read_back();
    if (format == SnapshotFormat::Csv) {
        const auto ids = sim.group_ids();
        write_snapshot_csv(out, sim.system(), std::vector<std::uint32_t>(ids.begin(), ids.end()), rows);
        return;
    }
    const std::size_t p = sim.particle_count();
    const std::size_t n = sim.dimension();
    const Layout layout = sim.config().layout;
    if (layout == Layout::ColumnMajor) {
        std::vector<float> cols(rows.size());
        for (std::size_t i = 0; i < p; ++i) {
            for (std::size_t d = 0; d < n; ++d) cols[d * p + i] = rows[i * n + d];
        }
        rows.swap(cols);
    }
    write_snapshot_binary(out, p, n, layout, rows);
}

BinarySnapshot read_snapshot_binary(std::string_view bytes) {
    if (bytes.size() < 16 || bytes.substr(0, 4) != "SWRM") throw SchemaError("not a SWRM snapshot");
    BinarySnapshot s;
    s.particles = get_u32(bytes, 4);
    s.dimension = get_u32(bytes, 8);
    const std::uint32_t layout = get_u32(bytes, 12);
    if (layout > 1) throw SchemaError("unknown snapshot layout " + std::to_string(layout));
    s.layout = static_cast<Layout>(layout);
    const std::size_t count = std::size_t{s.particles} * s.dimension;
    if (bytes.size() != 16 + 4 * count) throw SchemaError("snapshot payload has the wrong length");
    s.values.resize(count);
    for (std::size_t i = 0; i < count; ++i) s.values[i] = std::bit_cast<float>(get_u32(bytes, 16 + 4 * i));
    return s;
}

}  // namespace swarm
