#include "omu/map_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

namespace omu {

namespace {

constexpr char kMagic[4] = {'O', 'M', 'U', '1'};
constexpr uint8_t kVersion = 1;

void put_bytes(std::ostream& out, const void* p, size_t n) {
    out.write(static_cast<const char*>(p), static_cast<std::streamsize>(n));
}

void put_u8(std::ostream& out, uint8_t v) { put_bytes(out, &v, 1); }

void put_u32(std::ostream& out, uint32_t v) {
    const uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                          static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
    put_bytes(out, b, 4);
}

void put_u64(std::ostream& out, uint64_t v) {
    uint8_t b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<uint8_t>(v >> (8 * i));
    put_bytes(out, b, 8);
}

void put_i16(std::ostream& out, int16_t v) {
    const auto u = static_cast<uint16_t>(v);
    const uint8_t b[2] = {static_cast<uint8_t>(u), static_cast<uint8_t>(u >> 8)};
    put_bytes(out, b, 2);
}

void put_f64(std::ostream& out, double v) { put_u64(out, std::bit_cast<uint64_t>(v)); }

void get_bytes(std::istream& in, void* p, size_t n) {
    in.read(static_cast<char*>(p), static_cast<std::streamsize>(n));
    if (in.gcount() != static_cast<std::streamsize>(n))
        throw std::runtime_error("map dump truncated");
}

uint8_t get_u8(std::istream& in) {
    uint8_t v;
    get_bytes(in, &v, 1);
    return v;
}

uint32_t get_u32(std::istream& in) {
    uint8_t b[4];
    get_bytes(in, b, 4);
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

uint64_t get_u64(std::istream& in) {
    uint8_t b[8];
    get_bytes(in, b, 8);
    uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<uint64_t>(b[i]) << (8 * i);
    return v;
}

int16_t get_i16(std::istream& in) {
    uint8_t b[2];
    get_bytes(in, b, 2);
    return static_cast<int16_t>(static_cast<uint16_t>(b[0]) |
                                (static_cast<uint16_t>(b[1]) << 8));
}

double get_f64(std::istream& in) { return std::bit_cast<double>(get_u64(in)); }

}  // namespace

void save_map(const OmuMap& map, std::ostream& out) {
    put_bytes(out, kMagic, 4);
    put_u8(out, kVersion);
    const MapConfig& cfg = map.config();
    put_f64(out, cfg.resolution);
    put_i16(out, cfg.l_hit.raw);
    put_i16(out, cfg.l_miss.raw);
    put_i16(out, cfg.l_min.raw);
    put_i16(out, cfg.l_max.raw);
    put_i16(out, cfg.occ_threshold.raw);
    put_u8(out, static_cast<uint8_t>(cfg.tree_depth));
    put_u32(out, map.options().rows_per_bank);

    for (int i = 0; i < kNumPes; ++i) {
        const PeMemory& mem = map.pe(i).memory();
        put_u64(out, mem.root().encode());
        put_u8(out, static_cast<uint8_t>(mem.root_status()));
        put_u32(out, mem.next_free());
        put_u32(out, static_cast<uint32_t>(mem.prune_stack().size()));
        for (uint32_t b : mem.prune_stack()) put_u32(out, b);
    }
    for (int i = 0; i < kNumPes; ++i) {
        const PeMemory& mem = map.pe(i).memory();
        for (int bank = 0; bank < kNumBanks; ++bank)
            for (uint32_t row = 0; row < mem.next_free(); ++row)
                put_u64(out, mem.row_word(bank, row));
    }
    if (!out) throw std::runtime_error("failed writing map dump");
}

void save_map_file(const OmuMap& map, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open map file for writing: " + path);
    save_map(map, out);
}

OmuMap load_map(std::istream& in) {
    char magic[4];
    get_bytes(in, magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0)
        throw std::runtime_error("not an OMU map dump (bad magic)");
    if (get_u8(in) != kVersion) throw std::runtime_error("unsupported map dump version");

    MapConfig cfg;
    cfg.resolution = get_f64(in);
    cfg.l_hit = LogOdds(get_i16(in));
    cfg.l_miss = LogOdds(get_i16(in));
    cfg.l_min = LogOdds(get_i16(in));
    cfg.l_max = LogOdds(get_i16(in));
    cfg.occ_threshold = LogOdds(get_i16(in));
    cfg.tree_depth = get_u8(in);
    cfg.validate();

    EngineOptions opts;
    opts.rows_per_bank = get_u32(in);

    struct PeImage {
        NodeRecord root;
        NodeTag root_status;
        uint32_t next_free;
        std::vector<uint32_t> stack;
    };
    std::array<PeImage, kNumPes> images;
    for (auto& img : images) {
        img.root = NodeRecord::decode(get_u64(in));
        const uint8_t status = get_u8(in);
        if (status > 3) throw CorruptionError("map dump: invalid root status");
        img.root_status = static_cast<NodeTag>(status);
        img.next_free = get_u32(in);
        if (img.next_free > opts.rows_per_bank)
            throw CorruptionError("map dump: next_free beyond bank capacity");
        const uint32_t depth = get_u32(in);
        if (depth > img.next_free) throw CorruptionError("map dump: stack deeper than next_free");
        img.stack.resize(depth);
        for (auto& b : img.stack) b = get_u32(in);
    }

    OmuMap map(cfg, opts);
    for (int i = 0; i < kNumPes; ++i) {
        auto& img = images[static_cast<size_t>(i)];
        std::vector<std::array<uint64_t, 8>> rows(img.next_free);
        for (int bank = 0; bank < kNumBanks; ++bank)
            for (uint32_t row = 0; row < img.next_free; ++row)
                rows[row][static_cast<size_t>(bank)] = get_u64(in);
        map.pe(i).memory().restore(img.root, img.root_status, img.next_free,
                                   std::move(img.stack), rows);
    }
    return map;
}

OmuMap load_map_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open map file: " + path);
    return load_map(in);
}

}  // namespace omu
