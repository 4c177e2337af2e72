#include "mdcc/oracle.hpp"

#include "mdcc/errors.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace mdcc::oracle {

namespace {

using Coords = std::vector<std::size_t>;

// Advances `c` through the box [0, limit) with the first axis fastest.
bool advance(Coords& c, const Coords& limit) {
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (++c[j] < limit[j]) return true;
        c[j] = 0;
    }
    return false;
}

// i1 + i2*n + ... + id*n^(d-1)
std::size_t cell(const Coords& c, std::size_t n) {
    std::size_t idx = 0;
    for (std::size_t j = c.size(); j-- > 0;) idx = idx * n + c[j];
    return idx;
}

std::uint8_t value_at(const BitArray& a, const Coords& start, const Coords& offset) {
    Coords c(start.size());
    for (std::size_t j = 0; j < c.size(); ++j) c[j] = start[j] + offset[j];
    return a[cell(c, a.grid().n())];
}

// Every start at which `extents` fits.
std::vector<Coords> starts_for(std::size_t n, const Coords& extents) {
    Coords limit(extents.size());
    for (std::size_t j = 0; j < extents.size(); ++j) {
        if (extents[j] > n) return {};
        limit[j] = n - extents[j] + 1;
    }
    std::vector<Coords> out;
    Coords c(extents.size(), 0);
    do {
        out.push_back(c);
    } while (advance(c, limit));
    return out;
}

bool all_zero(const BitArray& a, const Coords& start, const Coords& extents) {
    Coords o(extents.size(), 0);
    do {
        if (value_at(a, start, o)) return false;
    } while (advance(o, extents));
    return true;
}

std::size_t distance(const BitArray& a, const Coords& s1, const Coords& s2, const Coords& extents) {
    std::size_t dist = 0;
    Coords o(extents.size(), 0);
    do {
        dist += value_at(a, s1, o) != value_at(a, s2, o);
    } while (advance(o, extents));
    return dist;
}

bool valid_fixed_zero(const BitArray& a, std::size_t n, const Coords& extents) {
    for (const auto& s : starts_for(n, extents)) {
        if (all_zero(a, s, extents)) return false;
    }
    return true;
}

bool valid_volume_zero(const BitArray& a, std::size_t n, std::size_t d, std::uint64_t bound) {
    Coords extents(d, 1);
    const Coords limit(d, n + 1);
    // Every extent vector in [1, n]^d: iterate [0, n+1)^d and skip zeros.
    Coords raw(d, 0);
    do {
        if (std::find(raw.begin(), raw.end(), 0) != raw.end()) continue;
        std::uint64_t vol = 1;
        for (auto e : raw) vol *= e;
        if (vol < bound) continue;
        if (!valid_fixed_zero(a, n, raw)) return false;
    } while (advance(raw, limit));
    return true;
}

bool valid_pairs(const BitArray& a, std::size_t n, const Coords& extents, std::size_t min_distance) {
    const auto starts = starts_for(n, extents);
    for (std::size_t i = 0; i < starts.size(); ++i) {
        for (std::size_t k = 0; k < starts.size(); ++k) {
            if (i == k) continue;
            if (distance(a, starts[i], starts[k], extents) < min_distance) return false;
        }
    }
    return true;
}

BitArray from_integer(const Grid& grid, std::uint64_t value) {
    Bits bits(grid.cells());
    for (std::size_t i = 0; i < bits.size(); ++i) bits[i] = (value >> i) & 1U;
    return BitArray(grid, std::move(bits));
}

std::uint64_t to_integer(std::span<const std::uint8_t> bits) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) v |= std::uint64_t{bits[i] != 0} << i;
    return v;
}

constexpr std::size_t kMaxExhaustiveBits = 20;

}  // namespace

bool brute_valid(const BitArray& array, const ConstraintConfig& cfg) {
    const std::size_t n = array.grid().n();
    switch (cfg.kind) {
        case ConstraintKind::zrcf: return valid_fixed_zero(array, n, cfg.shape->extents());
        case ConstraintKind::vzrcf: return valid_volume_zero(array, n, array.grid().d(), cfg.volume_bound);
        case ConstraintKind::rf: return valid_pairs(array, n, cfg.shape->extents(), 1);
        case ConstraintKind::hdrf: return valid_pairs(array, n, cfg.shape->extents(), cfg.p);
    }
    return false;
}

std::string bit_string(std::span<const std::uint8_t> bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s += b ? '1' : '0';
    return s;
}

void AuditReport::merge(const AuditReport& other) {
    population += other.population;
    failures.insert(failures.end(), other.failures.begin(), other.failures.end());
    for (const auto& [iters, count] : other.iterations) iterations[iters] += count;
}

std::string AuditReport::to_text() const {
    std::ostringstream out;
    out << "audit " << name << '\n';
    out << "config " << config << '\n';
    out << "population " << population << '\n';
    out << "failures " << failures.size() << '\n';
    if (!iterations.empty()) {
        out << "iterations";
        for (const auto& [iters, count] : iterations) out << ' ' << iters << ':' << count;
        out << '\n';
    }
    for (std::size_t i = 0; i < failures.size() && i < 10; ++i) {
        out << "failure input=" << failures[i].input << " expected=" << failures[i].expected
            << " actual=" << failures[i].actual << '\n';
    }
    out << (passed() ? "PASS" : "FAIL") << '\n';
    return out.str();
}

AuditReport exhaustive_roundtrip(const ConstraintCodec& codec, const RoundtripOptions& options) {
    const auto& cfg = codec.config();
    const std::size_t k = cfg.message_bits();
    AuditReport report;
    report.name = "roundtrip";
    report.config = cfg.to_string();

    if (!options.samples && k > kMaxExhaustiveBits) {
        throw ParameterError("exhaustive roundtrip needs n^d - 1 <= " + std::to_string(kMaxExhaustiveBits));
    }
    const std::size_t total = options.samples ? *options.samples : std::size_t{1} << k;
    BitSource source(options.seed);
    EncodeOptions encode_options;
    encode_options.track_visited = options.track_visited;

    for (std::size_t m = 0; m < total; ++m) {
        Bits message(k);
        if (options.samples) {
            message = source.take(k);
        } else {
            for (std::size_t i = 0; i < k; ++i) message[i] = (m >> i) & 1U;
        }
        ++report.population;
        const auto input = bit_string(message);
        try {
            const auto encoded = encode(codec, message, encode_options);
            ++report.iterations[encoded.iterations];
            if (!brute_valid(encoded.array, cfg)) {
                report.failures.push_back({input, "valid codeword", "invalid " + bit_string(encoded.array.bits())});
                continue;
            }
            const auto decoded = decode(codec, encoded.array);
            if (decoded != message) report.failures.push_back({input, input, bit_string(decoded)});
        } catch (const std::exception& e) {
            report.failures.push_back({input, "roundtrip", std::string("exception: ") + e.what()});
        }
    }
    return report;
}

AuditReport injectivity_audit(const ConstraintCodec& codec) {
    const auto& cfg = codec.config();
    const Grid grid = cfg.grid();
    if (grid.cells() > kMaxExhaustiveBits) {
        throw ParameterError("injectivity audit needs n^d <= " + std::to_string(kMaxExhaustiveBits));
    }
    AuditReport report;
    report.name = "injectivity";
    report.config = cfg.to_string();

    std::unordered_map<std::uint64_t, std::uint64_t> preimage;
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << grid.cells()); ++v) {
        const BitArray array = from_integer(grid, v);
        if (brute_valid(array, cfg)) continue;
        ++report.population;
        const auto input = bit_string(array.bits());
        try {
            const auto image = codec.xi(array);
            const auto key = to_integer(image.bits());
            const auto [it, fresh] = preimage.emplace(key, v);
            if (!fresh) {
                report.failures.push_back(
                    {input, "distinct image", "same image as " + bit_string(from_integer(grid, it->second).bits())});
                continue;
            }
            const auto back = codec.xi_inverse(image);
            if (!(back == array)) report.failures.push_back({input, input, bit_string(back.bits())});
        } catch (const std::exception& e) {
            report.failures.push_back({input, "xi image", std::string("exception: ") + e.what()});
        }
    }
    return report;
}

BitSource::BitSource(std::uint64_t seed) : engine_(seed) {}

std::uint8_t BitSource::next() {
    if (left_ == 0) {
        word_ = engine_();
        left_ = 64;
    }
    const auto bit = static_cast<std::uint8_t>(word_ & 1U);
    word_ >>= 1;
    --left_;
    return bit;
}

Bits BitSource::take(std::size_t count) {
    Bits out(count);
    for (auto& b : out) b = next();
    return out;
}

std::uint64_t BitSource::below(std::uint64_t bound) {
    if (bound == 0) throw ParameterError("empty range");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    for (;;) {
        const std::uint64_t r = engine_();
        if (r < limit) return r % bound;
    }
}

BitArray plant_zero_cuboid(const Grid& grid, const Position& start, const Shape& shape, std::uint64_t seed) {
    if (!grid.fits(start, shape)) {
        throw ParameterError("zero cuboid " + shape.to_string() + " at " + start.to_string() + " does not fit");
    }
    BitSource source(seed);
    BitArray out(grid, source.take(grid.cells()));
    Coords o(grid.d(), 0);
    do {
        Coords c(grid.d());
        for (std::size_t j = 0; j < c.size(); ++j) c[j] = start[j] + o[j];
        out.set(cell(c, grid.n()), false);
    } while (advance(o, shape.extents()));
    return out;
}

BitArray plant_repeat(const Grid& grid, const Position& first, const Position& second, const Shape& shape,
                      std::span<const std::uint8_t> mask, std::uint64_t seed) {
    if (!grid.fits(first, shape) || !grid.fits(second, shape)) {
        throw ParameterError("planted sub-arrays of shape " + shape.to_string() + " do not fit");
    }
    if (first == second) throw ParameterError("planted repeat needs two distinct starts");

    // Offsets in local order (first axis fastest) with their coordinates.
    std::vector<Coords> offsets;
    Coords o(grid.d(), 0);
    do {
        offsets.push_back(o);
    } while (advance(o, shape.extents()));
    if (mask.size() != offsets.size()) throw ParameterError("mask size does not match the shape volume");

    // Cell second+o copies first+o = second+(o+delta); projecting on delta,
    // the source is strictly further along, so fill in decreasing projection.
    std::vector<long long> delta(grid.d());
    for (std::size_t j = 0; j < grid.d(); ++j) {
        delta[j] = static_cast<long long>(first[j]) - static_cast<long long>(second[j]);
    }
    auto projection = [&](const Coords& c) {
        long long p = 0;
        for (std::size_t j = 0; j < c.size(); ++j) p += static_cast<long long>(c[j]) * delta[j];
        return p;
    };
    std::vector<std::size_t> order(offsets.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return projection(offsets[a]) > projection(offsets[b]); });

    BitSource source(seed);
    BitArray out(grid, source.take(grid.cells()));
    const Coords s1 = first.coords();
    const Coords s2 = second.coords();
    for (auto k : order) {
        Coords target(grid.d());
        for (std::size_t j = 0; j < grid.d(); ++j) target[j] = s2[j] + offsets[k][j];
        out.set(cell(target, grid.n()), (value_at(out, s1, offsets[k]) ^ mask[k]) != 0);
    }
    return out;
}

BitArray plant_near_repeat(const Grid& grid, const Position& first, const Position& second, const Shape& shape,
                           std::size_t distance, std::uint64_t seed) {
    const auto vol = static_cast<std::size_t>(volume(shape));
    if (distance > vol) throw ParameterError("distance exceeds the shape volume");
    BitSource source(seed ^ 0x9e3779b97f4a7c15ULL);
    std::vector<std::size_t> pick(vol);
    std::iota(pick.begin(), pick.end(), std::size_t{0});
    for (std::size_t i = 0; i < distance; ++i) {
        std::swap(pick[i], pick[i + static_cast<std::size_t>(source.below(vol - i))]);
    }
    Bits mask(vol, 0);
    for (std::size_t i = 0; i < distance; ++i) mask[pick[i]] = 1;
    return plant_repeat(grid, first, second, shape, mask, seed);
}

}  // namespace mdcc::oracle
