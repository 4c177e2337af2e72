#pragma once

// The four concrete constraint codecs and the scans behind their indicators.
//
// Witnesses are always the first violation in ascending vectorized order:
// outer loop over the start position (I, or I1 for pair constraints), inner
// loop over the shape index (vzrcf) or the partner I2.

#include "mdcc/array.hpp"
#include "mdcc/codec.hpp"

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mdcc {

/// Shapes of volume >= V with every extent <= n that drop below V when any
/// single extent > 1 is decremented. Sorted lexicographically by extents.
struct MinimalShapeSet {
    std::uint64_t volume_bound = 0;
    std::vector<Shape> shapes;

    std::size_t size() const noexcept { return shapes.size(); }
};

/// Throws ParameterError when V > n^d (nothing fits) or V == 0.
MinimalShapeSet minimal_shape_set(std::uint64_t volume_bound, std::size_t n, std::size_t d);

// ---- indicator scans --------------------------------------------------------

/// First start of an all-zero sub-array of `shape`.
std::optional<Position> find_zero_cuboid(const BitArray& array, const Shape& shape);

struct ZeroRegionWitness {
    std::size_t shape_index = 0;
    Position start;

    friend bool operator==(const ZeroRegionWitness&, const ZeroRegionWitness&) = default;
};

/// First (start, shape index) of an all-zero sub-array whose shape is in `shapes`.
std::optional<ZeroRegionWitness> find_zero_region(const BitArray& array, std::span<const Shape> shapes);

struct RepeatWitness {
    Position first;   ///< I1
    Position second;  ///< I2, the copy that gets deleted
    /// 0-based local offsets (first axis fastest) where the two sub-arrays differ, ascending.
    std::vector<std::size_t> diff_offsets;

    friend bool operator==(const RepeatWitness&, const RepeatWitness&) = default;
};

/// First pair of distinct starts carrying identical sub-arrays. Candidates are
/// bucketed by a rolling hash and verified exactly.
std::optional<RepeatWitness> find_repeat(const BitArray& array, const Shape& shape);

/// First pair of distinct starts whose sub-arrays are at Hamming distance < p.
std::optional<RepeatWitness> find_near_repeat(const BitArray& array, const Shape& shape, std::size_t p);

/// Fills the holes of `partial`, which must be exactly the cells of the
/// sub-array at `second`, from the sub-array at `first`:
///   A[second + o] = A[first + o] XOR mask[o]
/// repeated until no hole remains. When the two sub-arrays overlap, each pass
/// resolves the cells whose source has become defined.
/// Throws ContractViolation if the holes do not match or a pass makes no progress.
BitArray reconstruct_repeat(PartialArray partial, const Position& first, const Position& second, const Shape& shape,
                            std::span<const std::uint8_t> mask);

// ---- codecs ------------------------------------------------------------------

/// Deletes the first all-zero cuboid and records its start.
class ZrcfCodec final : public ConstraintCodec {
public:
    explicit ZrcfCodec(ConstraintConfig cfg);

    const ConstraintConfig& config() const noexcept override { return cfg_; }
    bool is_valid(const BitArray& array) const override { return !violation(array); }
    AlmostArray xi(const BitArray& array) const override;
    BitArray xi_inverse(const AlmostArray& almost) const override;

    std::optional<Position> violation(const BitArray& array) const;
    const PayloadLayout& layout() const noexcept { return layout_; }

private:
    ConstraintConfig cfg_;
    PayloadLayout layout_;
};

/// Deletes the first all-zero sub-array with a shape from the minimal shape
/// set and records [shape index, start].
class VzrcfCodec final : public ConstraintCodec {
public:
    explicit VzrcfCodec(ConstraintConfig cfg);

    const ConstraintConfig& config() const noexcept override { return cfg_; }
    bool is_valid(const BitArray& array) const override { return !violation(array); }
    AlmostArray xi(const BitArray& array) const override;
    BitArray xi_inverse(const AlmostArray& almost) const override;

    std::optional<ZeroRegionWitness> violation(const BitArray& array) const;
    const MinimalShapeSet& shapes() const noexcept { return shapes_; }
    const PayloadLayout& layout() const noexcept { return layout_; }

private:
    ConstraintConfig cfg_;
    MinimalShapeSet shapes_;
    PayloadLayout layout_;
};

/// Deletes the later copy of the first repeated sub-array and records [I1, I2].
class RfCodec final : public ConstraintCodec {
public:
    explicit RfCodec(ConstraintConfig cfg);

    const ConstraintConfig& config() const noexcept override { return cfg_; }
    bool is_valid(const BitArray& array) const override { return !violation(array); }
    AlmostArray xi(const BitArray& array) const override;
    BitArray xi_inverse(const AlmostArray& almost) const override;

    std::optional<RepeatWitness> violation(const BitArray& array) const;
    const PayloadLayout& layout() const noexcept { return layout_; }

private:
    ConstraintConfig cfg_;
    PayloadLayout layout_;
};

/// Like RfCodec for near-repeats: records [I1, I2, P1 .. P(p-1)] where the
/// P_j are the 1-based offsets at which the two sub-arrays differ, ascending,
/// followed by 0 for every unused slot.
class HdrfCodec final : public ConstraintCodec {
public:
    explicit HdrfCodec(ConstraintConfig cfg);

    const ConstraintConfig& config() const noexcept override { return cfg_; }
    bool is_valid(const BitArray& array) const override { return !violation(array); }
    AlmostArray xi(const BitArray& array) const override;
    BitArray xi_inverse(const AlmostArray& almost) const override;

    std::optional<RepeatWitness> violation(const BitArray& array) const;
    const PayloadLayout& layout() const noexcept { return layout_; }

private:
    ConstraintConfig cfg_;
    PayloadLayout layout_;
};

/// Validates feasibility (ParameterError with the violated inequality) and
/// builds the matching codec.
std::unique_ptr<ConstraintCodec> make_codec(const ConstraintConfig& cfg);

}  // namespace mdcc
