#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

namespace mdcc {

namespace {

// Summed-area table over an (n+1)^d grid: table[x] counts the ones at every
// y with y_j < x_j on all axes. Any box sum is an inclusion-exclusion over
// its 2^d corners.
class BoxSums {
public:
    explicit BoxSums(const BitArray& array) : n_(array.grid().n()), d_(array.grid().d()) {
        const std::size_t side = n_ + 1;
        std::size_t cells = 1;
        for (std::size_t j = 0; j < d_; ++j) {
            strides_.push_back(cells);
            cells *= side;
        }
        table_.assign(cells, 0);
        base_.resize(array.size());
        for (std::size_t i = 0; i < array.size(); ++i) {
            std::size_t rest = i;
            std::size_t at = 0;
            for (std::size_t j = 0; j < d_; ++j) {
                at += (rest % n_) * strides_[j];
                rest /= n_;
            }
            base_[i] = at;
            table_[at + shift_all()] = array[i];
        }
        for (std::size_t j = 0; j < d_; ++j) {
            for (std::size_t x = 0; x < cells; ++x) {
                if ((x / strides_[j]) % side != 0) table_[x] += table_[x - strides_[j]];
            }
        }
    }

    struct Corners {
        std::vector<std::size_t> offsets;
        std::vector<int> signs;
    };

    Corners corners(const Shape& shape) const {
        Corners c;
        for (std::size_t mask = 0; mask < (std::size_t{1} << d_); ++mask) {
            std::size_t off = 0;
            int lows = 0;
            for (std::size_t j = 0; j < d_; ++j) {
                if (mask >> j & 1) {
                    off += shape[j] * strides_[j];
                } else {
                    ++lows;
                }
            }
            c.offsets.push_back(off);
            c.signs.push_back(lows % 2 == 0 ? 1 : -1);
        }
        return c;
    }

    /// Ones in the box whose first cell has vectorized index `start`.
    std::int64_t sum(std::size_t start, const Corners& c) const {
        std::int64_t total = 0;
        const std::size_t at = base_[start];
        for (std::size_t k = 0; k < c.offsets.size(); ++k) total += c.signs[k] * table_[at + c.offsets[k]];
        return total;
    }

private:
    std::size_t shift_all() const {
        std::size_t s = 0;
        for (auto st : strides_) s += st;
        return s;
    }

    std::size_t n_;
    std::size_t d_;
    std::vector<std::size_t> strides_;
    std::vector<std::int64_t> table_;
    std::vector<std::size_t> base_;
};

bool same_content(const BitArray& a, std::size_t s1, std::size_t s2, const std::vector<std::size_t>& offsets) {
    return std::all_of(offsets.begin(), offsets.end(), [&](std::size_t o) { return a[s1 + o] == a[s2 + o]; });
}

constexpr std::uint64_t kMersenne61 = (std::uint64_t{1} << 61) - 1;

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b) {
    __extension__ typedef unsigned __int128 u128;
    const u128 p = static_cast<u128>(a) * b;
    std::uint64_t r = static_cast<std::uint64_t>(p & kMersenne61) + static_cast<std::uint64_t>(p >> 61);
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

std::uint64_t addmod(std::uint64_t a, std::uint64_t b) {
    std::uint64_t r = a + b;
    if (r >= kMersenne61) r -= kMersenne61;
    return r;
}

// Polynomial hash of the sub-array at every start where `shape` fits,
// computed one axis at a time. Entries at other cells are meaningless.
std::vector<std::uint64_t> window_hashes(const BitArray& array, const Shape& shape) {
    static constexpr std::uint64_t kBases[] = {0x1f3a5c7e9b2d4f61ULL % kMersenne61, 0x2c8e4a6f1b3d5e79ULL % kMersenne61,
                                               0x3b5d7f9a2c4e6081ULL % kMersenne61, 0x4e6a8c0b3d5f7193ULL % kMersenne61};
    const Grid& grid = array.grid();
    std::vector<std::uint64_t> h(array.size());
    for (std::size_t i = 0; i < array.size(); ++i) h[i] = array[i] + 1;

    std::vector<std::uint64_t> next(array.size());
    for (std::size_t j = 0; j < grid.d(); ++j) {
        const std::size_t len = shape[j];
        if (len == 1) continue;
        const std::uint64_t base = kBases[j % 4] + j;
        const std::size_t stride = grid.stride(j);
        const std::size_t last_start = grid.n() - len;
        for (std::size_t i = 0; i < array.size(); ++i) {
            if ((i / stride) % grid.n() > last_start) continue;
            std::uint64_t acc = 0;
            for (std::size_t k = len; k-- > 0;) acc = addmod(mulmod(acc, base), h[i + k * stride]);
            next[i] = acc;
        }
        std::swap(h, next);
    }
    return h;
}

}  // namespace

std::optional<Position> find_zero_cuboid(const BitArray& array, const Shape& shape) {
    const auto starts = start_indices(array.grid(), shape);
    if (starts.empty()) return std::nullopt;
    const BoxSums sums(array);
    const auto corners = sums.corners(shape);
    for (auto s : starts) {
        if (sums.sum(s, corners) == 0) return array.grid().position(s);
    }
    return std::nullopt;
}

std::optional<ZeroRegionWitness> find_zero_region(const BitArray& array, std::span<const Shape> shapes) {
    if (shapes.empty()) return std::nullopt;
    const Grid& grid = array.grid();
    const BoxSums sums(array);
    std::vector<BoxSums::Corners> corners;
    for (const auto& s : shapes) {
        if (s.dim() != grid.d()) throw BoundsError("shape " + s.to_string() + " has the wrong dimension");
        corners.push_back(sums.corners(s));
    }
    std::vector<std::size_t> coords(grid.d(), 0);
    for (std::size_t i = 0; i < grid.cells(); ++i) {
        for (std::size_t k = 0; k < shapes.size(); ++k) {
            bool fits = true;
            for (std::size_t j = 0; j < grid.d() && fits; ++j) fits = coords[j] + shapes[k][j] <= grid.n();
            if (fits && sums.sum(i, corners[k]) == 0) return ZeroRegionWitness{k, Position(coords)};
        }
        for (std::size_t j = 0; j < grid.d(); ++j) {
            if (++coords[j] < grid.n()) break;
            coords[j] = 0;
        }
    }
    return std::nullopt;
}

std::optional<RepeatWitness> find_repeat(const BitArray& array, const Shape& shape) {
    const Grid& grid = array.grid();
    const auto starts = start_indices(grid, shape);
    if (starts.size() < 2) return std::nullopt;
    const auto offsets = local_offsets(grid, shape);
    const auto hashes = window_hashes(array, shape);

    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (auto s : starts) buckets[hashes[s]].push_back(s);

    for (auto first : starts) {
        const auto& bucket = buckets[hashes[first]];
        if (bucket.size() < 2) continue;
        for (auto second : bucket) {
            if (second <= first) continue;
            if (same_content(array, first, second, offsets)) {
                return RepeatWitness{grid.position(first), grid.position(second), {}};
            }
        }
    }
    return std::nullopt;
}

std::optional<RepeatWitness> find_near_repeat(const BitArray& array, const Shape& shape, std::size_t p) {
    if (p == 0) return std::nullopt;
    if (p == 1) return find_repeat(array, shape);

    const Grid& grid = array.grid();
    const auto starts = start_indices(grid, shape);
    if (starts.size() < 2) return std::nullopt;
    const auto offsets = local_offsets(grid, shape);
    const std::size_t words = (offsets.size() + 63) / 64;

    std::vector<std::uint64_t> packed(starts.size() * words, 0);
    for (std::size_t s = 0; s < starts.size(); ++s) {
        std::uint64_t* row = &packed[s * words];
        for (std::size_t k = 0; k < offsets.size(); ++k) {
            if (array[starts[s] + offsets[k]]) row[k / 64] |= std::uint64_t{1} << (k % 64);
        }
    }

    for (std::size_t a = 0; a < starts.size(); ++a) {
        const std::uint64_t* ra = &packed[a * words];
        for (std::size_t b = a + 1; b < starts.size(); ++b) {
            const std::uint64_t* rb = &packed[b * words];
            std::size_t dist = 0;
            for (std::size_t w = 0; w < words && dist < p; ++w) dist += std::popcount(ra[w] ^ rb[w]);
            if (dist >= p) continue;

            RepeatWitness witness{grid.position(starts[a]), grid.position(starts[b]), {}};
            for (std::size_t k = 0; k < offsets.size(); ++k) {
                if (((ra[k / 64] ^ rb[k / 64]) >> (k % 64)) & 1) witness.diff_offsets.push_back(k);
            }
            return witness;
        }
    }
    return std::nullopt;
}

}  // namespace mdcc
