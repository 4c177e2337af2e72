#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"

#include <string>

namespace mdcc {

namespace {

__extension__ typedef unsigned __int128 u128;

struct ShapeEnumerator {
    std::uint64_t bound;
    std::size_t n;
    std::size_t d;
    std::vector<std::size_t> extents;
    std::vector<Shape> out;

    void run(std::size_t axis, u128 partial) {
        if (axis + 1 == d) {
            // The last extent is forced: the smallest one reaching the bound.
            u128 last = (bound + partial - 1) / partial;
            if (last == 0) last = 1;
            if (last > n) return;
            extents[axis] = static_cast<std::size_t>(last);
            const u128 vol = partial * last;
            for (std::size_t j = 0; j < d; ++j) {
                if (extents[j] > 1 && vol / extents[j] * (extents[j] - 1) >= bound) return;
            }
            out.emplace_back(extents);
            return;
        }
        for (std::size_t l = 1; l <= n; ++l) {
            // Any completion could lose one unit on this axis and stay >= bound.
            if (partial * (l - 1) >= bound) break;
            extents[axis] = l;
            run(axis + 1, partial * l);
        }
    }
};

}  // namespace

MinimalShapeSet minimal_shape_set(std::uint64_t volume_bound, std::size_t n, std::size_t d) {
    if (volume_bound == 0) throw ParameterError("V must be positive");
    if (n == 0 || d == 0) throw ParameterError("minimal shape set needs n >= 1 and d >= 1");
    u128 cells = 1;
    for (std::size_t j = 0; j < d && cells < volume_bound; ++j) cells *= n;
    if (cells < volume_bound) {
        throw ParameterError("V=" + std::to_string(volume_bound) + " exceeds n^d for n=" + std::to_string(n) +
                             ", d=" + std::to_string(d));
    }
    ShapeEnumerator e{volume_bound, n, d, std::vector<std::size_t>(d, 1), {}};
    e.run(0, 1);
    return MinimalShapeSet{volume_bound, std::move(e.out)};
}

}  // namespace mdcc
