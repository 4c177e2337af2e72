#include "mdcc/array.hpp"

#include "mdcc/errors.hpp"

#include <algorithm>
#include <utility>

namespace mdcc {

namespace {

std::string join(const std::vector<std::size_t>& values) {
    std::string out = "(";
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i != 0) out += ',';
        out += std::to_string(values[i]);
    }
    out += ')';
    return out;
}

void require_same_dim(const Grid& grid, std::size_t dim, const char* what) {
    if (dim != grid.d()) {
        throw BoundsError(std::string(what) + " has dimension " + std::to_string(dim) + ", array has " +
                          std::to_string(grid.d()));
    }
}

}  // namespace

Shape::Shape(std::vector<std::size_t> extents) : extents_(std::move(extents)) {
    if (extents_.empty()) throw ParameterError("shape needs at least one extent");
    for (auto e : extents_) {
        if (e == 0) throw ParameterError("shape extents must be positive: " + join(extents_));
    }
}

Shape::Shape(std::initializer_list<std::size_t> extents) : Shape(std::vector<std::size_t>(extents)) {}

std::string Shape::to_string() const { return join(extents_); }

std::uint64_t volume(const Shape& shape) {
    std::uint64_t v = 1;
    for (auto e : shape.extents()) {
        if (e != 0 && v > UINT64_MAX / e) throw ParameterError("shape volume overflows 64 bits");
        v *= e;
    }
    return v;
}

Position::Position(std::vector<std::size_t> coords) : coords_(std::move(coords)) {
    if (coords_.empty()) throw ParameterError("position needs at least one coordinate");
}

Position::Position(std::initializer_list<std::size_t> coords) : Position(std::vector<std::size_t>(coords)) {}

std::string Position::to_string() const { return join(coords_); }

Grid::Grid(std::size_t n, std::size_t d) : n_(n), d_(d), cells_(1) {
    if (n == 0) throw ParameterError("side length n must be positive");
    if (d == 0) throw ParameterError("dimension d must be positive");
    strides_.reserve(d);
    for (std::size_t j = 0; j < d; ++j) {
        strides_.push_back(cells_);
        if (cells_ > kMaxCells / n) {
            throw ParameterError("array of side " + std::to_string(n) + " and dimension " + std::to_string(d) +
                                 " is too large");
        }
        cells_ *= n;
    }
}

std::size_t Grid::index(const Position& pos) const {
    require_same_dim(*this, pos.dim(), "position");
    std::size_t idx = 0;
    for (std::size_t j = 0; j < d_; ++j) {
        if (pos[j] >= n_) throw BoundsError("position " + pos.to_string() + " outside [0," + std::to_string(n_) + ")");
        idx += pos[j] * strides_[j];
    }
    return idx;
}

Position Grid::position(std::size_t index) const {
    if (index >= cells_) {
        throw BoundsError("index " + std::to_string(index) + " outside [0," + std::to_string(cells_) + ")");
    }
    std::vector<std::size_t> coords(d_);
    for (std::size_t j = 0; j < d_; ++j) {
        coords[j] = index % n_;
        index /= n_;
    }
    return Position(std::move(coords));
}

bool Grid::contains(const Position& pos) const noexcept {
    if (pos.dim() != d_) return false;
    return std::all_of(pos.coords().begin(), pos.coords().end(), [&](std::size_t c) { return c < n_; });
}

bool Grid::fits(const Position& start, const Shape& shape) const noexcept {
    if (start.dim() != d_ || shape.dim() != d_) return false;
    for (std::size_t j = 0; j < d_; ++j) {
        if (start[j] >= n_ || shape[j] > n_ - start[j]) return false;
    }
    return true;
}

void Grid::require_fits(const Position& start, const Shape& shape) const {
    require_same_dim(*this, start.dim(), "position");
    require_same_dim(*this, shape.dim(), "shape");
    if (!fits(start, shape)) {
        throw BoundsError("sub-array " + shape.to_string() + " at " + start.to_string() +
                          " exceeds side " + std::to_string(n_));
    }
}

std::size_t vectorize(const Position& pos, std::size_t n, std::size_t d) { return Grid(n, d).index(pos); }

Position devectorize(std::size_t index, std::size_t n, std::size_t d) { return Grid(n, d).position(index); }

std::vector<std::size_t> local_offsets(const Grid& grid, const Shape& shape) {
    require_same_dim(grid, shape.dim(), "shape");
    for (std::size_t j = 0; j < grid.d(); ++j) {
        if (shape[j] > grid.n()) throw BoundsError("shape " + shape.to_string() + " exceeds side " + std::to_string(grid.n()));
    }
    // Build axis by axis: the offsets of the first j axes, repeated l_j times.
    std::vector<std::size_t> offsets{0};
    offsets.reserve(static_cast<std::size_t>(volume(shape)));
    for (std::size_t j = 0; j < grid.d(); ++j) {
        const std::size_t base = offsets.size();
        for (std::size_t k = 1; k < shape[j]; ++k) {
            for (std::size_t b = 0; b < base; ++b) offsets.push_back(offsets[b] + k * grid.stride(j));
        }
    }
    return offsets;
}

std::vector<std::size_t> subarray_cells(const Grid& grid, const Position& start, const Shape& shape) {
    grid.require_fits(start, shape);
    auto cells = local_offsets(grid, shape);
    const std::size_t base = grid.index(start);
    for (auto& c : cells) c += base;
    return cells;
}

std::vector<std::size_t> subarray_cells(const Position& start, const Shape& shape, std::size_t n, std::size_t d) {
    return subarray_cells(Grid(n, d), start, shape);
}

std::vector<std::size_t> start_indices(const Grid& grid, const Shape& shape) {
    require_same_dim(grid, shape.dim(), "shape");
    std::vector<std::size_t> span(grid.d());
    for (std::size_t j = 0; j < grid.d(); ++j) {
        if (shape[j] > grid.n()) return {};
        span[j] = grid.n() - shape[j] + 1;
    }
    return local_offsets(grid, Shape(std::move(span)));
}

BitArray::BitArray(Grid grid) : grid_(grid), bits_(grid.cells(), 0) {}

BitArray::BitArray(Grid grid, Bits bits) : grid_(grid), bits_(std::move(bits)) {
    if (bits_.size() != grid_.cells()) {
        throw ParameterError("bit array needs " + std::to_string(grid_.cells()) + " bits, got " +
                             std::to_string(bits_.size()));
    }
    for (auto& b : bits_) b = b != 0;
}

std::uint8_t BitArray::at(std::size_t index) const {
    if (index >= bits_.size()) throw BoundsError("index " + std::to_string(index) + " out of range");
    return bits_[index];
}

void BitArray::set(std::size_t index, bool value) {
    if (index >= bits_.size()) throw BoundsError("index " + std::to_string(index) + " out of range");
    bits_[index] = value;
}

Bits extract_subarray(const BitArray& array, const Position& start, const Shape& shape) {
    Bits out;
    for (auto idx : subarray_cells(array.grid(), start, shape)) out.push_back(array[idx]);
    return out;
}

CompactedArray::CompactedArray(Grid grid, Bits survivors, Region deleted)
    : grid_(grid), survivors_(std::move(survivors)), deleted_(std::move(deleted)) {
    grid_.require_fits(deleted_.start, deleted_.shape);
    if (survivors_.size() + volume(deleted_.shape) != grid_.cells()) {
        throw ContractViolation("compacted array: " + std::to_string(survivors_.size()) + " survivors plus volume " +
                                std::to_string(volume(deleted_.shape)) + " != " + std::to_string(grid_.cells()));
    }
}

PartialArray::PartialArray(Grid grid)
    : grid_(grid), bits_(grid.cells(), 0), defined_(grid.cells(), 0), undefined_(grid.cells()) {}

std::uint8_t PartialArray::value(std::size_t index) const {
    if (!is_defined(index)) throw ContractViolation("read of undefined cell " + std::to_string(index));
    return bits_[index];
}

void PartialArray::set(std::size_t index, bool value) {
    if (!defined_.at(index)) {
        defined_[index] = 1;
        --undefined_;
    }
    bits_[index] = value;
}

std::vector<std::size_t> PartialArray::undefined_cells() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < defined_.size(); ++i) {
        if (!defined_[i]) out.push_back(i);
    }
    return out;
}

BitArray PartialArray::complete() const {
    if (undefined_ != 0) {
        throw ContractViolation(std::to_string(undefined_) + " cells still undefined");
    }
    return BitArray(grid_, bits_);
}

CompactedArray delete_subarray(const BitArray& array, const Position& start, const Shape& shape) {
    const Grid& grid = array.grid();
    Bits doomed(grid.cells(), 0);
    for (auto idx : subarray_cells(grid, start, shape)) doomed[idx] = 1;

    Bits survivors;
    survivors.reserve(grid.cells() - static_cast<std::size_t>(volume(shape)));
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        if (!doomed[i]) survivors.push_back(array[i]);
    }
    return CompactedArray(grid, std::move(survivors), Region{start, shape});
}

namespace {

// Walks every cell once, routing survivors to cells outside the region and
// calling `hole(k, idx)` for the k-th region cell.
template <typename Put, typename Hole>
void redistribute(const CompactedArray& c, Put put, Hole hole) {
    const auto cells = subarray_cells(c.grid(), c.deleted_region().start, c.deleted_region().shape);
    std::size_t next_hole = 0;
    std::size_t next_survivor = 0;
    for (std::size_t i = 0; i < c.grid().cells(); ++i) {
        if (next_hole < cells.size() && cells[next_hole] == i) {
            hole(next_hole++, i);
        } else {
            put(i, c.survivors()[next_survivor++]);
        }
    }
}

}  // namespace

BitArray reinsert_subarray(const CompactedArray& compacted, std::span<const std::uint8_t> fill) {
    if (fill.size() != compacted.gap()) {
        throw ContractViolation("fill has " + std::to_string(fill.size()) + " bits, gap is " +
                                std::to_string(compacted.gap()));
    }
    Bits bits(compacted.grid().cells(), 0);
    redistribute(
        compacted, [&](std::size_t i, std::uint8_t v) { bits[i] = v; },
        [&](std::size_t k, std::size_t i) { bits[i] = fill[k] != 0; });
    return BitArray(compacted.grid(), std::move(bits));
}

PartialArray reinsert_with_holes(const CompactedArray& compacted) {
    PartialArray out(compacted.grid());
    redistribute(
        compacted, [&](std::size_t i, std::uint8_t v) { out.set(i, v != 0); }, [](std::size_t, std::size_t) {});
    return out;
}

}  // namespace mdcc
