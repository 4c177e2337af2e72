#include "mdcc/codec.hpp"

#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <set>
#include <utility>

namespace mdcc {

namespace {

__extension__ typedef unsigned __int128 u128;

std::string shape_or_none(const ConstraintConfig& cfg) { return cfg.shape ? cfg.shape->to_string() : "-"; }

}  // namespace

std::string_view to_string(ConstraintKind kind) noexcept {
    switch (kind) {
        case ConstraintKind::zrcf: return "zrcf";
        case ConstraintKind::vzrcf: return "vzrcf";
        case ConstraintKind::rf: return "rf";
        case ConstraintKind::hdrf: return "hdrf";
    }
    return "?";
}

std::optional<ConstraintKind> parse_constraint_kind(std::string_view name) noexcept {
    for (auto k : {ConstraintKind::zrcf, ConstraintKind::vzrcf, ConstraintKind::rf, ConstraintKind::hdrf}) {
        if (name == to_string(k)) return k;
    }
    return std::nullopt;
}

ConstraintConfig ConstraintConfig::zrcf(std::size_t n, Shape shape) {
    const auto d = shape.dim();
    return ConstraintConfig{ConstraintKind::zrcf, n, d, std::move(shape), 0, 0};
}

ConstraintConfig ConstraintConfig::vzrcf(std::size_t n, std::size_t d, std::uint64_t volume_bound) {
    return ConstraintConfig{ConstraintKind::vzrcf, n, d, std::nullopt, volume_bound, 0};
}

ConstraintConfig ConstraintConfig::rf(std::size_t n, Shape shape) {
    const auto d = shape.dim();
    return ConstraintConfig{ConstraintKind::rf, n, d, std::move(shape), 0, 0};
}

ConstraintConfig ConstraintConfig::hdrf(std::size_t n, Shape shape, std::size_t p) {
    const auto d = shape.dim();
    return ConstraintConfig{ConstraintKind::hdrf, n, d, std::move(shape), 0, p};
}

void ConstraintConfig::validate() const {
    if (n < 2) throw ParameterError("n must be at least 2, got " + std::to_string(n));
    if (d < 1) throw ParameterError("d must be at least 1");
    const bool shaped = kind != ConstraintKind::vzrcf;
    if (shaped) {
        if (!shape) throw ParameterError(std::string(mdcc::to_string(kind)) + " needs a shape");
        if (shape->dim() != d) {
            throw ParameterError("shape " + shape->to_string() + " does not have dimension " + std::to_string(d));
        }
        for (auto e : shape->extents()) {
            if (e > n) throw ParameterError("shape " + shape->to_string() + " exceeds side n=" + std::to_string(n));
        }
        if (volume_bound != 0) throw ParameterError("V only applies to vzrcf");
    } else {
        if (shape) throw ParameterError("vzrcf takes V, not a shape");
        if (volume_bound < 1) throw ParameterError("vzrcf needs V >= 1");
    }
    if (kind == ConstraintKind::hdrf) {
        if (p < 1) throw ParameterError("hdrf needs p >= 1");
    } else if (p != 0) {
        throw ParameterError("p only applies to hdrf");
    }
}

std::string ConstraintConfig::to_string() const {
    std::string out = std::string(mdcc::to_string(kind)) + " n=" + std::to_string(n) + " d=" + std::to_string(d);
    if (kind == ConstraintKind::vzrcf) {
        out += " V=" + std::to_string(volume_bound);
    } else {
        out += " shape=" + shape_or_none(*this);
    }
    if (kind == ConstraintKind::hdrf) out += " p=" + std::to_string(p);
    return out;
}

std::size_t position_width(std::size_t n, std::size_t d) {
    if (n < 1 || d < 1) throw ParameterError("position width needs n >= 1 and d >= 1");
    // ceil(log2(n^d)) = bit length of n^d - 1.
    u128 cells = 1;
    for (std::size_t j = 0; j < d; ++j) {
        if (cells > (~u128{0} >> 1) / n) throw ParameterError("n^d too large for a position field");
        cells *= n;
    }
    u128 top = cells - 1;
    std::size_t width = 0;
    while (top != 0) {
        ++width;
        top >>= 1;
    }
    return width;
}

std::size_t pair_width(std::size_t n, std::size_t d) {
    if (position_width(n, d) == 0) return 0;
    u128 cells = 1;
    for (std::size_t j = 0; j < d; ++j) cells *= n;
    // Square n^d into four 64-bit limbs, subtract one, take the bit length.
    const std::uint64_t x[2] = {static_cast<std::uint64_t>(cells), static_cast<std::uint64_t>(cells >> 64)};
    std::uint64_t limb[4] = {0, 0, 0, 0};
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            u128 carry = u128{x[i]} * x[j];
            for (int k = i + j; k < 4 && carry != 0; ++k) {
                const u128 sum = u128{limb[k]} + static_cast<std::uint64_t>(carry);
                limb[k] = static_cast<std::uint64_t>(sum);
                carry = (carry >> 64) + (sum >> 64);
            }
        }
    }
    for (int k = 0; k < 4; ++k) {
        if (limb[k]-- != 0) break;
    }
    for (int k = 3; k >= 0; --k) {
        if (limb[k] != 0) return static_cast<std::size_t>(64 * k + std::bit_width(limb[k]));
    }
    return 0;
}

std::size_t offset_width(std::uint64_t volume) { return static_cast<std::size_t>(std::bit_width(volume)); }

std::size_t index_width(std::uint64_t count) {
    if (count == 0) throw ParameterError("index width of an empty set");
    return static_cast<std::size_t>(std::bit_width(count - 1));
}

std::size_t PayloadLayout::total_bits() const noexcept {
    std::size_t total = 0;
    for (const auto& f : fields) total += f.width;
    return total;
}

namespace {

std::uint64_t cell_count_saturating(std::size_t n, std::size_t d) {
    u128 cells = 1;
    for (std::size_t j = 0; j < d; ++j) {
        cells *= n;
        if (cells > UINT64_MAX) return UINT64_MAX;
    }
    return static_cast<std::uint64_t>(cells);
}

}  // namespace

PayloadLayout payload_layout(const ConstraintConfig& cfg) {
    cfg.validate();
    const std::size_t w_pos = position_width(cfg.n, cfg.d);
    const std::uint64_t cells = cell_count_saturating(cfg.n, cfg.d);
    const FieldSpec pos{FieldRole::position, w_pos, cells};

    PayloadLayout layout;
    switch (cfg.kind) {
        case ConstraintKind::zrcf:
            layout.fields = {pos};
            break;
        case ConstraintKind::vzrcf: {
            const auto shapes = minimal_shape_set(cfg.volume_bound, cfg.n, cfg.d);
            layout.fields = {FieldSpec{FieldRole::shape_index, index_width(shapes.size()), shapes.size()}, pos};
            break;
        }
        case ConstraintKind::rf:
            layout.fields = {pos, pos};
            break;
        case ConstraintKind::hdrf: {
            const auto vol = volume(*cfg.shape);
            const u128 pairs = u128{cells} * cells;
            const std::uint64_t limit = cells == UINT64_MAX || pairs > UINT64_MAX ? UINT64_MAX
                                                                                  : static_cast<std::uint64_t>(pairs);
            layout.fields = {FieldSpec{FieldRole::position_pair, pair_width(cfg.n, cfg.d), limit}};
            for (std::size_t j = 1; j < cfg.p; ++j) {
                layout.fields.push_back(FieldSpec{FieldRole::diff_offset, offset_width(vol), vol + 1});
            }
            break;
        }
    }
    return layout;
}

Feasibility check_feasibility(const ConstraintConfig& cfg) {
    cfg.validate();
    Feasibility result;
    if (cfg.kind == ConstraintKind::vzrcf) {
        if (cfg.volume_bound > cell_count_saturating(cfg.n, cfg.d)) {
            result.reason = "V=" + std::to_string(cfg.volume_bound) + " exceeds n^d: no sub-array of volume >= V fits";
            return result;
        }
    }
    const auto layout = payload_layout(cfg);
    result.payload_bits = layout.total_bits();
    if (cfg.kind == ConstraintKind::vzrcf) {
        // Every minimal shape has volume >= V, and often all of them exceed it.
        const auto set = minimal_shape_set(cfg.volume_bound, cfg.n, cfg.d);
        result.min_gap = std::numeric_limits<std::uint64_t>::max();
        for (const auto& s : set.shapes) result.min_gap = std::min<std::uint64_t>(result.min_gap, volume(s));
    } else {
        result.min_gap = volume(*cfg.shape);
    }
    result.ok = result.payload_bits + 1 <= result.min_gap;
    if (!result.ok) {
        std::string lhs;
        switch (cfg.kind) {
            case ConstraintKind::zrcf: lhs = "ceil(d*log2 n) + 1 <= l1*...*ld"; break;
            case ConstraintKind::vzrcf: lhs = "ceil(log2 |S|) + ceil(d*log2 n) + 1 <= min volume over S"; break;
            case ConstraintKind::rf: lhs = "2*ceil(d*log2 n) + 1 <= l1*...*ld"; break;
            case ConstraintKind::hdrf: lhs = "ceil(2d*log2 n) + (p-1)*ceil(log2(l1*...*ld + 1)) + 1 <= l1*...*ld"; break;
        }
        result.reason = lhs + " violated: " + std::to_string(result.payload_bits + 1) + " > " +
                        std::to_string(result.min_gap);
    }
    return result;
}

Bits encode_field(std::uint64_t value, std::size_t width) {
    if (width > 64 || (width < 64 && (value >> width) != 0)) {
        throw BoundsError("value " + std::to_string(value) + " does not fit in " + std::to_string(width) + " bits");
    }
    Bits out(width);
    for (std::size_t i = 0; i < width; ++i) out[i] = (value >> (width - 1 - i)) & 1U;
    return out;
}

std::uint64_t decode_field(std::span<const std::uint8_t> bits) {
    if (bits.size() > 64) throw BoundsError("field wider than 64 bits");
    std::uint64_t value = 0;
    for (auto b : bits) value = (value << 1) | (b != 0);
    return value;
}

AlmostArray::AlmostArray(Grid grid, Bits bits) : grid_(grid), bits_(std::move(bits)) {
    if (bits_.size() + 1 != grid_.cells()) {
        throw ContractViolation("almost array needs " + std::to_string(grid_.cells() - 1) + " bits, got " +
                                std::to_string(bits_.size()));
    }
    for (auto& b : bits_) b = b != 0;
}

AlmostArray AlmostArray::from_partial(const PartialArray& partial) {
    const auto last = partial.grid().cells() - 1;
    if (partial.undefined_count() != 1 || partial.is_defined(last)) {
        throw ContractViolation("almost array must have exactly one empty cell, the last; found " +
                                std::to_string(partial.undefined_count()) + " empty cells");
    }
    Bits bits(last);
    for (std::size_t i = 0; i < last; ++i) bits[i] = partial.value(i);
    return AlmostArray(partial.grid(), std::move(bits));
}

AlmostArray AlmostArray::strip_marker(const BitArray& array) {
    Bits bits(array.bits().begin(), array.bits().end() - 1);
    return AlmostArray(array.grid(), std::move(bits));
}

BitArray AlmostArray::with_marker(bool marker) const {
    Bits bits = bits_;
    bits.push_back(marker);
    return BitArray(grid_, std::move(bits));
}

PartialArray place_payload(const CompactedArray& compacted, const PayloadFields& fields, const PayloadLayout& layout) {
    if (fields.values.size() != layout.fields.size()) {
        throw ContractViolation("payload has " + std::to_string(fields.values.size()) + " fields, layout " +
                                std::to_string(layout.fields.size()));
    }
    const std::size_t total = layout.total_bits();
    if (total + 1 > compacted.gap()) {
        throw ContractViolation("payload of " + std::to_string(total) + " bits plus marker exceeds gap " +
                                std::to_string(compacted.gap()));
    }
    const Grid& grid = compacted.grid();
    PartialArray out(grid);
    for (std::size_t i = 0; i < compacted.survivors().size(); ++i) out.set(i, compacted.survivors()[i] != 0);

    std::size_t at = grid.cells() - 1 - total;
    for (std::size_t f = 0; f < fields.values.size(); ++f) {
        for (auto b : encode_field(fields.values[f], layout.fields[f].width)) out.set(at++, b != 0);
    }
    return out;
}

AlmostArray write_payload(const CompactedArray& compacted, const PayloadFields& fields, const PayloadLayout& layout) {
    PartialArray partial = place_payload(compacted, fields, layout);
    const auto last = partial.grid().cells() - 1;
    for (std::size_t i = compacted.survivors().size(); i < last; ++i) {
        if (!partial.is_defined(i)) partial.set(i, false);
    }
    return AlmostArray::from_partial(partial);
}

PayloadFields read_payload(const AlmostArray& almost, const PayloadLayout& layout) {
    const std::size_t total = layout.total_bits();
    const auto& bits = almost.bits();
    if (total > bits.size()) throw CorruptStream("payload wider than the array");
    PayloadFields out;
    std::size_t at = bits.size() - total;
    for (const auto& spec : layout.fields) {
        const auto value = decode_field(std::span(bits).subspan(at, spec.width));
        at += spec.width;
        if (value >= spec.limit) {
            const char* name = spec.role == FieldRole::position        ? "position index"
                               : spec.role == FieldRole::position_pair ? "position pair"
                               : spec.role == FieldRole::shape_index   ? "shape index"
                                                                       : "difference offset";
            throw CorruptStream(std::string(name) + " " + std::to_string(value) + " >= " + std::to_string(spec.limit));
        }
        out.values.push_back(value);
    }
    return out;
}

CompactedArray survivors_of(const AlmostArray& almost, const Region& region) {
    const Grid& grid = almost.grid();
    grid.require_fits(region.start, region.shape);
    const auto keep = grid.cells() - static_cast<std::size_t>(volume(region.shape));
    Bits survivors(almost.bits().begin(), almost.bits().begin() + static_cast<std::ptrdiff_t>(keep));
    return CompactedArray(grid, std::move(survivors), region);
}

EncodeResult encode(const ConstraintCodec& codec, std::span<const std::uint8_t> message, const EncodeOptions& options) {
    const Grid grid = codec.config().grid();
    if (message.size() != grid.cells() - 1) {
        throw ParameterError("message must have " + std::to_string(grid.cells() - 1) + " bits, got " +
                             std::to_string(message.size()));
    }
    BitArray current = AlmostArray(grid, Bits(message.begin(), message.end())).with_marker(false);
    std::set<Bits> visited;
    if (options.track_visited) visited.insert(current.bits());

    std::size_t iterations = 0;
    while (!codec.is_valid(current)) {
        if (options.max_iterations && iterations >= *options.max_iterations) {
            throw CapExceeded("encoder did not converge within " + std::to_string(*options.max_iterations) +
                              " iterations");
        }
        current = codec.xi(current).with_marker(true);
        ++iterations;
        if (options.track_visited && !visited.insert(current.bits()).second) {
            throw ContractViolation("encoder revisited an array after " + std::to_string(iterations) + " iterations");
        }
    }
    return EncodeResult{std::move(current), iterations};
}

DecodeResult decode_traced(const ConstraintCodec& codec, const BitArray& array, const DecodeOptions& options) {
    if (!(array.grid() == codec.config().grid())) throw ParameterError("array size does not match the codec");
    if (options.strict && !codec.is_valid(array)) throw CorruptStream("input violates the constraint");

    const auto last = array.grid().cells() - 1;
    BitArray current = array;
    // A genuine codeword never revisits a state on the way back; corrupt input might.
    std::set<Bits> seen{current.bits()};
    std::size_t iterations = 0;
    while (current[last] == 1) {
        const auto almost = AlmostArray::strip_marker(current);
        BitArray previous = codec.xi_inverse(almost);
        if (options.strict) {
            if (codec.is_valid(previous) || !(codec.xi(previous) == almost)) {
                throw CorruptStream("array is not an image of xi");
            }
        }
        if (!seen.insert(previous.bits()).second) throw CorruptStream("decoder entered a cycle");
        current = std::move(previous);
        ++iterations;
    }
    return DecodeResult{Bits(current.bits().begin(), current.bits().end() - 1), iterations};
}

Bits decode(const ConstraintCodec& codec, const BitArray& array, const DecodeOptions& options) {
    return decode_traced(codec, array, options).message;
}

}  // namespace mdcc
