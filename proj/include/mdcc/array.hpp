#pragma once

// D-dimensional binary arrays of size n^d.
//
// Every array is stored in vectorized order: the cell at (i1, ..., id) lives
// at index i1 + i2*n + ... + id*n^(d-1), so the first coordinate is the least
// significant. All scans, serializations and "first" selections in the
// library walk this order ascending.

#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace mdcc {

/// One 0/1 value per element. Used for messages, survivors and fields.
using Bits = std::vector<std::uint8_t>;

/// Extents (l1, ..., ld) of an axis-aligned box. Every extent is >= 1.
class Shape {
public:
    Shape() = default;
    explicit Shape(std::vector<std::size_t> extents);
    Shape(std::initializer_list<std::size_t> extents);

    std::size_t dim() const noexcept { return extents_.size(); }
    std::size_t operator[](std::size_t axis) const { return extents_.at(axis); }
    const std::vector<std::size_t>& extents() const noexcept { return extents_; }

    std::string to_string() const;

    friend bool operator==(const Shape&, const Shape&) = default;
    friend auto operator<=>(const Shape&, const Shape&) = default;

private:
    std::vector<std::size_t> extents_;
};

/// Product of the extents.
std::uint64_t volume(const Shape& shape);

/// Coordinates (i1, ..., id), each zero-based.
class Position {
public:
    Position() = default;
    explicit Position(std::vector<std::size_t> coords);
    Position(std::initializer_list<std::size_t> coords);

    std::size_t dim() const noexcept { return coords_.size(); }
    std::size_t operator[](std::size_t axis) const { return coords_.at(axis); }
    const std::vector<std::size_t>& coords() const noexcept { return coords_; }

    std::string to_string() const;

    friend bool operator==(const Position&, const Position&) = default;
    friend auto operator<=>(const Position&, const Position&) = default;

private:
    std::vector<std::size_t> coords_;
};

/// A sub-array: start position plus shape.
struct Region {
    Position start;
    Shape shape;

    friend bool operator==(const Region&, const Region&) = default;
};

/// The ambient index space [0, n)^d together with its vectorization.
class Grid {
public:
    /// Largest supported n^d. Arrays are dense, one byte per cell.
    static constexpr std::size_t kMaxCells = std::size_t{1} << 30;

    Grid(std::size_t n, std::size_t d);

    std::size_t n() const noexcept { return n_; }
    std::size_t d() const noexcept { return d_; }
    std::size_t cells() const noexcept { return cells_; }
    /// n^(axis), the index distance between neighbours along `axis`.
    std::size_t stride(std::size_t axis) const { return strides_.at(axis); }

    std::size_t index(const Position& pos) const;
    Position position(std::size_t index) const;

    bool contains(const Position& pos) const noexcept;
    /// True iff start_j + l_j <= n on every axis.
    bool fits(const Position& start, const Shape& shape) const noexcept;
    void require_fits(const Position& start, const Shape& shape) const;

    friend bool operator==(const Grid& a, const Grid& b) noexcept { return a.n_ == b.n_ && a.d_ == b.d_; }

private:
    std::size_t n_;
    std::size_t d_;
    std::size_t cells_;
    std::vector<std::size_t> strides_;
};

std::size_t vectorize(const Position& pos, std::size_t n, std::size_t d);
Position devectorize(std::size_t index, std::size_t n, std::size_t d);

/// Vectorized indices of every cell of the sub-array, ascending.
std::vector<std::size_t> subarray_cells(const Grid& grid, const Position& start, const Shape& shape);
std::vector<std::size_t> subarray_cells(const Position& start, const Shape& shape, std::size_t n, std::size_t d);

/// Index deltas of the cells of `shape` relative to its start cell, ascending.
/// Entry k is the cell whose local vectorized index (first axis fastest) is k.
std::vector<std::size_t> local_offsets(const Grid& grid, const Shape& shape);

/// Vectorized indices of every start position at which `shape` fits, ascending.
std::vector<std::size_t> start_indices(const Grid& grid, const Shape& shape);

/// A full binary array of n^d cells.
class BitArray {
public:
    explicit BitArray(Grid grid);
    BitArray(Grid grid, Bits bits);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return bits_.size(); }

    std::uint8_t operator[](std::size_t index) const noexcept { return bits_[index]; }
    std::uint8_t at(std::size_t index) const;
    std::uint8_t at(const Position& pos) const { return bits_[grid_.index(pos)]; }
    void set(std::size_t index, bool value);
    void set(const Position& pos, bool value) { set(grid_.index(pos), value); }

    const Bits& bits() const noexcept { return bits_; }

    friend bool operator==(const BitArray&, const BitArray&) = default;

private:
    Grid grid_;
    Bits bits_;
};

/// Bits of the sub-array in ascending cell order.
Bits extract_subarray(const BitArray& array, const Position& start, const Shape& shape);

/// What remains of an array after a sub-array deletion: survivors packed at the
/// front in vectorized order, followed by `gap()` empty trailing slots.
class CompactedArray {
public:
    CompactedArray(Grid grid, Bits survivors, Region deleted);

    const Grid& grid() const noexcept { return grid_; }
    const Bits& survivors() const noexcept { return survivors_; }
    std::size_t gap() const noexcept { return grid_.cells() - survivors_.size(); }
    const Region& deleted_region() const noexcept { return deleted_; }

private:
    Grid grid_;
    Bits survivors_;
    Region deleted_;
};

/// An array in which some cells are undefined.
class PartialArray {
public:
    /// Every cell undefined.
    explicit PartialArray(Grid grid);

    const Grid& grid() const noexcept { return grid_; }
    std::size_t size() const noexcept { return bits_.size(); }

    bool is_defined(std::size_t index) const { return defined_.at(index) != 0; }
    /// Value of a defined cell; throws ContractViolation on a hole.
    std::uint8_t value(std::size_t index) const;
    void set(std::size_t index, bool value);
    std::size_t undefined_count() const noexcept { return undefined_; }
    std::vector<std::size_t> undefined_cells() const;

    /// The completed array; throws ContractViolation while holes remain.
    BitArray complete() const;

private:
    Grid grid_;
    Bits bits_;
    Bits defined_;
    std::size_t undefined_;
};

/// Removes the sub-array and packs the remaining cells at the front.
/// Two linear passes: mark the sub-array cells, then compact.
CompactedArray delete_subarray(const BitArray& array, const Position& start, const Shape& shape);

/// Inverse of delete_subarray. `fill` supplies the sub-array cells in ascending cell order.
BitArray reinsert_subarray(const CompactedArray& compacted, std::span<const std::uint8_t> fill);

/// Inverse of delete_subarray that leaves the sub-array cells undefined.
PartialArray reinsert_with_holes(const CompactedArray& compacted);

}  // namespace mdcc
