#include "mdcc/constraints.hpp"

#include "mdcc/errors.hpp"

#include <algorithm>
#include <string>

namespace mdcc {

namespace {

void require_kind(const ConstraintConfig& cfg, ConstraintKind kind) {
    if (cfg.kind != kind) {
        throw ParameterError("expected a " + std::string(to_string(kind)) + " config, got " + cfg.to_string());
    }
}

void require_feasible(const ConstraintConfig& cfg) {
    (void)cfg.grid();
    const auto f = check_feasibility(cfg);
    if (!f) throw ParameterError(cfg.to_string() + ": " + f.reason);
}

[[noreturn]] void xi_on_valid() { throw ContractViolation("xi applied to an array that satisfies the constraint"); }

Position start_from_field(const Grid& grid, std::uint64_t index, const Shape& shape, const char* name) {
    const Position pos = grid.position(static_cast<std::size_t>(index));
    if (!grid.fits(pos, shape)) {
        throw CorruptStream(std::string(name) + " " + pos.to_string() + " cannot start a sub-array of shape " +
                            shape.to_string());
    }
    return pos;
}

}  // namespace

BitArray reconstruct_repeat(PartialArray partial, const Position& first, const Position& second, const Shape& shape,
                            std::span<const std::uint8_t> mask) {
    const Grid grid = partial.grid();
    grid.require_fits(first, shape);
    grid.require_fits(second, shape);
    if (first == second) throw ContractViolation("repeat reconstruction needs two distinct starts");
    const auto offsets = local_offsets(grid, shape);
    if (mask.size() != offsets.size()) throw ContractViolation("mask size does not match the shape volume");

    const std::size_t s1 = grid.index(first);
    const std::size_t s2 = grid.index(second);
    std::vector<std::size_t> holes;
    holes.reserve(offsets.size());
    for (auto o : offsets) holes.push_back(s2 + o);
    if (partial.undefined_cells() != holes) {
        throw ContractViolation("undefined cells are not exactly the sub-array at " + second.to_string());
    }

    std::size_t remaining = holes.size();
    while (remaining != 0) {
        std::size_t filled = 0;
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            const std::size_t target = s2 + offsets[k];
            const std::size_t source = s1 + offsets[k];
            if (partial.is_defined(target) || !partial.is_defined(source)) continue;
            partial.set(target, (partial.value(source) ^ mask[k]) != 0);
            ++filled;
        }
        if (filled == 0) {
            throw ContractViolation("repeat reconstruction stalled with " + std::to_string(remaining) +
                                    " undefined cells");
        }
        remaining -= filled;
    }
    return partial.complete();
}

// ---- ZRCF --------------------------------------------------------------------

ZrcfCodec::ZrcfCodec(ConstraintConfig cfg) : cfg_(std::move(cfg)) {
    require_kind(cfg_, ConstraintKind::zrcf);
    require_feasible(cfg_);
    layout_ = payload_layout(cfg_);
}

std::optional<Position> ZrcfCodec::violation(const BitArray& array) const {
    return find_zero_cuboid(array, *cfg_.shape);
}

AlmostArray ZrcfCodec::xi(const BitArray& array) const {
    const auto start = violation(array);
    if (!start) xi_on_valid();
    const auto compacted = delete_subarray(array, *start, *cfg_.shape);
    return write_payload(compacted, PayloadFields{{array.grid().index(*start)}}, layout_);
}

BitArray ZrcfCodec::xi_inverse(const AlmostArray& almost) const {
    const auto fields = read_payload(almost, layout_);
    const Shape& shape = *cfg_.shape;
    const Position start = start_from_field(almost.grid(), fields.values[0], shape, "position");
    const Bits zeros(static_cast<std::size_t>(volume(shape)), 0);
    return reinsert_subarray(survivors_of(almost, Region{start, shape}), zeros);
}

// ---- V-ZRCF ------------------------------------------------------------------

VzrcfCodec::VzrcfCodec(ConstraintConfig cfg) : cfg_(std::move(cfg)) {
    require_kind(cfg_, ConstraintKind::vzrcf);
    require_feasible(cfg_);
    shapes_ = minimal_shape_set(cfg_.volume_bound, cfg_.n, cfg_.d);
    layout_ = payload_layout(cfg_);
}

std::optional<ZeroRegionWitness> VzrcfCodec::violation(const BitArray& array) const {
    return find_zero_region(array, shapes_.shapes);
}

AlmostArray VzrcfCodec::xi(const BitArray& array) const {
    const auto witness = violation(array);
    if (!witness) xi_on_valid();
    const auto compacted = delete_subarray(array, witness->start, shapes_.shapes[witness->shape_index]);
    return write_payload(compacted, PayloadFields{{witness->shape_index, array.grid().index(witness->start)}},
                         layout_);
}

BitArray VzrcfCodec::xi_inverse(const AlmostArray& almost) const {
    // read_payload has already bounded the shape index by |S|.
    const auto fields = read_payload(almost, layout_);
    const Shape& shape = shapes_.shapes[static_cast<std::size_t>(fields.values[0])];
    const Position start = start_from_field(almost.grid(), fields.values[1], shape, "position");
    const Bits zeros(static_cast<std::size_t>(volume(shape)), 0);
    return reinsert_subarray(survivors_of(almost, Region{start, shape}), zeros);
}

// ---- RF ----------------------------------------------------------------------

RfCodec::RfCodec(ConstraintConfig cfg) : cfg_(std::move(cfg)) {
    require_kind(cfg_, ConstraintKind::rf);
    require_feasible(cfg_);
    layout_ = payload_layout(cfg_);
}

std::optional<RepeatWitness> RfCodec::violation(const BitArray& array) const {
    return find_repeat(array, *cfg_.shape);
}

AlmostArray RfCodec::xi(const BitArray& array) const {
    const auto witness = violation(array);
    if (!witness) xi_on_valid();
    const Grid& grid = array.grid();
    const auto compacted = delete_subarray(array, witness->second, *cfg_.shape);
    return write_payload(compacted, PayloadFields{{grid.index(witness->first), grid.index(witness->second)}}, layout_);
}

BitArray RfCodec::xi_inverse(const AlmostArray& almost) const {
    const auto fields = read_payload(almost, layout_);
    const Shape& shape = *cfg_.shape;
    const Position first = start_from_field(almost.grid(), fields.values[0], shape, "first position");
    const Position second = start_from_field(almost.grid(), fields.values[1], shape, "second position");
    if (first == second) throw CorruptStream("repeat positions coincide at " + first.to_string());
    auto partial = reinsert_with_holes(survivors_of(almost, Region{second, shape}));
    const Bits mask(static_cast<std::size_t>(volume(shape)), 0);
    return reconstruct_repeat(std::move(partial), first, second, shape, mask);
}

// ---- HDRF --------------------------------------------------------------------

HdrfCodec::HdrfCodec(ConstraintConfig cfg) : cfg_(std::move(cfg)) {
    require_kind(cfg_, ConstraintKind::hdrf);
    require_feasible(cfg_);
    layout_ = payload_layout(cfg_);
}

std::optional<RepeatWitness> HdrfCodec::violation(const BitArray& array) const {
    return find_near_repeat(array, *cfg_.shape, cfg_.p);
}

AlmostArray HdrfCodec::xi(const BitArray& array) const {
    const auto witness = violation(array);
    if (!witness) xi_on_valid();
    if (witness->diff_offsets.size() + 1 > cfg_.p) {
        throw ContractViolation("near-repeat witness has " + std::to_string(witness->diff_offsets.size()) +
                                " differences, p=" + std::to_string(cfg_.p));
    }
    const Grid& grid = array.grid();
    const std::uint64_t cells = grid.cells();
    PayloadFields fields{{grid.index(witness->first) * cells + grid.index(witness->second)}};
    for (auto k : witness->diff_offsets) fields.values.push_back(k + 1);
    fields.values.resize(cfg_.p, 0);
    const auto compacted = delete_subarray(array, witness->second, *cfg_.shape);
    return write_payload(compacted, fields, layout_);
}

BitArray HdrfCodec::xi_inverse(const AlmostArray& almost) const {
    const auto fields = read_payload(almost, layout_);
    const Shape& shape = *cfg_.shape;
    const std::uint64_t cells = almost.grid().cells();
    const Position first = start_from_field(almost.grid(), fields.values[0] / cells, shape, "first position");
    const Position second = start_from_field(almost.grid(), fields.values[0] % cells, shape, "second position");
    if (first == second) throw CorruptStream("repeat positions coincide at " + first.to_string());

    Bits mask(static_cast<std::size_t>(volume(shape)), 0);
    std::uint64_t previous = 0;
    bool dummies = false;
    for (std::size_t f = 1; f < fields.values.size(); ++f) {
        const auto offset = fields.values[f];
        if (offset == 0) {
            dummies = true;
            continue;
        }
        if (dummies) throw CorruptStream("difference offset " + std::to_string(offset) + " follows a dummy");
        if (offset <= previous) throw CorruptStream("difference offsets are not ascending");
        mask[static_cast<std::size_t>(offset - 1)] = 1;
        previous = offset;
    }
    auto partial = reinsert_with_holes(survivors_of(almost, Region{second, shape}));
    return reconstruct_repeat(std::move(partial), first, second, shape, mask);
}

std::unique_ptr<ConstraintCodec> make_codec(const ConstraintConfig& cfg) {
    switch (cfg.kind) {
        case ConstraintKind::zrcf: return std::make_unique<ZrcfCodec>(cfg);
        case ConstraintKind::vzrcf: return std::make_unique<VzrcfCodec>(cfg);
        case ConstraintKind::rf: return std::make_unique<RfCodec>(cfg);
        case ConstraintKind::hdrf: return std::make_unique<HdrfCodec>(cfg);
    }
    throw ParameterError("unknown constraint kind");
}

}  // namespace mdcc
