#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/oracle.hpp"

#include <doctest.h>

#include <algorithm>

using namespace mdcc;

namespace {

BitArray ones(const Grid& g) { return BitArray(g, Bits(g.cells(), 1)); }

// Shapes with volume >= V that lose that property when any extent shrinks,
// found by walking the whole box [1, n]^d.
std::vector<Shape> minimal_by_search(std::uint64_t v, std::size_t n, std::size_t d) {
    std::vector<Shape> out;
    std::vector<std::size_t> e(d, 1);
    while (true) {
        std::uint64_t vol = 1;
        for (auto x : e) vol *= x;
        bool minimal = vol >= v;
        for (std::size_t j = 0; j < d && minimal; ++j) {
            if (e[j] > 1 && vol / e[j] * (e[j] - 1) >= v) minimal = false;
        }
        if (minimal) out.emplace_back(e);
        std::size_t j = 0;
        while (j < d && e[j] == n) e[j++] = 1;
        if (j == d) break;
        ++e[j];
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("minimal shape sets") {
    CHECK(minimal_shape_set(4, 4, 2).shapes == std::vector<Shape>{Shape{1, 4}, Shape{2, 2}, Shape{4, 1}});
    CHECK(minimal_shape_set(4, 9, 2).size() == 3);
    CHECK(minimal_shape_set(5, 4, 2).shapes == std::vector<Shape>{Shape{2, 3}, Shape{3, 2}});
    CHECK(minimal_shape_set(7, 9, 1).shapes == std::vector<Shape>{Shape{7}});
    CHECK(minimal_shape_set(16, 4, 2).shapes == std::vector<Shape>{Shape{4, 4}});
    CHECK_THROWS_AS(minimal_shape_set(17, 4, 2), ParameterError);
    CHECK_THROWS_AS(minimal_shape_set(0, 4, 2), ParameterError);
}

TEST_CASE("minimal shape sets match a full search of the shape box") {
    for (std::size_t d = 1; d <= 3; ++d) {
        for (std::size_t n = 2; n <= 7; ++n) {
            std::uint64_t cells = 1;
            for (std::size_t j = 0; j < d; ++j) cells *= n;
            for (std::uint64_t v = 1; v <= cells; ++v) {
                INFO("n=" << n << " d=" << d << " V=" << v);
                REQUIRE(minimal_shape_set(v, n, d).shapes == minimal_by_search(v, n, d));
            }
        }
    }
}

TEST_CASE("zero cuboid scan") {
    const Grid g(4, 2);
    CHECK_FALSE(find_zero_cuboid(ones(g), Shape{2, 3}));
    CHECK(find_zero_cuboid(BitArray(g), Shape{2, 3}) == Position{0, 0});
    BitArray a(g);
    a.set(Position{3, 3}, true);
    CHECK(find_zero_cuboid(a, Shape{2, 3}) == Position{0, 0});
    a.set(Position{0, 0}, true);
    CHECK(find_zero_cuboid(a, Shape{2, 3}) == Position{1, 0});
}

TEST_CASE("zero region scan breaks ties by shape order") {
    const Grid g(4, 2);
    const auto set = minimal_shape_set(5, 4, 2);
    const auto w = find_zero_region(BitArray(g), set.shapes);
    REQUIRE(w);
    CHECK(w->start == Position{0, 0});
    CHECK(w->shape_index == 0);

    // Only a 3x2 block of zeros at (1,1): the (2,3) shape cannot fit there.
    BitArray a = ones(g);
    for (std::size_t i = 1; i < 4; ++i)
        for (std::size_t j = 1; j < 3; ++j) a.set(Position{i, j}, false);
    const auto w2 = find_zero_region(a, set.shapes);
    REQUIRE(w2);
    CHECK(w2->start == Position{1, 1});
    CHECK(set.shapes[w2->shape_index] == Shape{3, 2});
}

TEST_CASE("vzrcf xi on the all-zero array") {
    const auto codec = make_codec(ConstraintConfig::vzrcf(4, 2, 5));
    const auto& v = dynamic_cast<const VzrcfCodec&>(*codec);
    const BitArray zero(Grid(4, 2));
    const auto w = v.violation(zero);
    REQUIRE(w);
    CHECK(w->start == Position{0, 0});
    CHECK(w->shape_index == 0);
    CHECK(v.layout().total_bits() == 5);
    const auto almost = v.xi(zero);
    CHECK(read_payload(almost, v.layout()).values == std::vector<std::uint64_t>{0, 0});
    CHECK(v.xi_inverse(almost) == zero);
}

TEST_CASE("zrcf xi on the all-zero array") {
    const auto codec = make_codec(ConstraintConfig::zrcf(4, Shape{2, 3}));
    const BitArray zero(Grid(4, 2));
    const auto almost = codec->xi(zero);
    CHECK(almost.bits() == Bits(15, 0));
    CHECK(codec->xi_inverse(almost) == zero);
    CHECK_THROWS_AS(codec->xi(ones(Grid(4, 2))), ContractViolation);
}

TEST_CASE("repeat scan") {
    const Grid g(4, 2);
    const auto w = find_repeat(BitArray(g), Shape{3, 3});
    REQUIRE(w);
    CHECK(w->first == Position{0, 0});
    CHECK(w->second == Position{1, 0});
    CHECK(w->diff_offsets.empty());
    CHECK_FALSE(find_repeat(BitArray(Grid(3, 2)), Shape{3, 3}));
}

TEST_CASE("an array with four distinct 3x3 windows is repeat-free") {
    const Grid g(4, 2);
    bool found = false;
    for (std::uint32_t v = 0; v < (1U << 16) && !found; ++v) {
        Bits bits(16);
        for (int i = 0; i < 16; ++i) bits[i] = (v >> i) & 1U;
        const BitArray a(g, bits);
        std::vector<Bits> windows;
        for (auto s : start_indices(g, Shape{3, 3})) windows.push_back(extract_subarray(a, g.position(s), Shape{3, 3}));
        std::sort(windows.begin(), windows.end());
        if (std::adjacent_find(windows.begin(), windows.end()) != windows.end()) continue;
        found = true;
        CHECK_FALSE(find_repeat(a, Shape{3, 3}));
    }
    CHECK(found);
}

TEST_CASE("rf xi on the all-zero array fills the gap exactly") {
    const auto codec = make_codec(ConstraintConfig::rf(4, Shape{3, 3}));
    const auto& rf = dynamic_cast<const RfCodec&>(*codec);
    const BitArray zero(Grid(4, 2));
    const auto almost = rf.xi(zero);
    CHECK(read_payload(almost, rf.layout()).values == std::vector<std::uint64_t>{0, 1});
    CHECK(oracle::bit_string(almost.bits()) == "0000000" "00000001");
    CHECK(rf.xi_inverse(almost) == zero);
}

TEST_CASE("near-repeat scan reports differing offsets") {
    const Grid g(5, 2);
    const Shape s{4, 4};
    const auto a = oracle::plant_near_repeat(g, Position{0, 0}, Position{1, 1}, s, 1, 17);
    const auto w = find_near_repeat(a, s, 2);
    REQUIRE(w);
    // The planted pair is a witness, though an earlier pair may win the scan.
    CHECK(w->diff_offsets.size() <= 1);
    const auto x = extract_subarray(a, w->first, s);
    const auto y = extract_subarray(a, w->second, s);
    std::vector<std::size_t> diff;
    for (std::size_t o = 0; o < x.size(); ++o)
        if (x[o] != y[o]) diff.push_back(o);
    CHECK(diff == w->diff_offsets);

    CHECK(find_near_repeat(a, s, 1) == find_repeat(a, s));
}

TEST_CASE("hdrf payload: dummy zeros and 1-based offsets") {
    const auto codec = make_codec(ConstraintConfig::hdrf(5, Shape{4, 4}, 2));
    const auto& h = dynamic_cast<const HdrfCodec&>(*codec);
    const BitArray zero(Grid(5, 2));
    CHECK(read_payload(h.xi(zero), h.layout()).values == std::vector<std::uint64_t>{0 * 25 + 1, 0});

    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto a = oracle::plant_near_repeat(Grid(5, 2), Position{0, 0}, Position{1, 0}, Shape{4, 4}, 1, seed);
        const auto w = h.violation(a);
        REQUIRE(w);
        const auto fields = read_payload(h.xi(a), h.layout());
        const std::uint64_t expected = w->diff_offsets.empty() ? 0 : w->diff_offsets[0] + 1;
        CHECK(fields.values[0] == 0 * 25 + 1);
        CHECK(fields.values[1] == expected);
        CHECK(h.xi_inverse(h.xi(a)) == a);
    }
}

TEST_CASE("hdrf xi_inverse rejects payloads xi never writes") {
    const auto codec = make_codec(ConstraintConfig::hdrf(32, Shape{24}, 3));
    const auto& h = dynamic_cast<const HdrfCodec&>(*codec);
    REQUIRE(h.layout().total_bits() == 20);
    auto almost_with = [&](std::vector<std::uint64_t> values) {
        Bits bits;
        for (std::size_t f = 0; f < values.size(); ++f) {
            const auto b = encode_field(values[f], h.layout().fields[f].width);
            bits.insert(bits.end(), b.begin(), b.end());
        }
        bits.insert(bits.begin(), 31 - bits.size(), 0);
        return AlmostArray(Grid(32, 1), bits);
    };
    // Pair field is I1*32 + I2.
    CHECK(h.layout().fields[0].width == 10);
    CHECK_NOTHROW(h.xi_inverse(almost_with({1, 3, 5})));
    CHECK_NOTHROW(h.xi_inverse(almost_with({1, 3, 0})));
    CHECK_NOTHROW(h.xi_inverse(almost_with({8 * 32 + 2, 0, 0})));
    CHECK_THROWS_AS(h.xi_inverse(almost_with({1, 5, 3})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({1, 3, 3})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({1, 0, 3})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({2 * 32 + 2, 0, 0})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({9, 0, 0})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({9 * 32, 0, 0})), CorruptStream);
    CHECK_THROWS_AS(h.xi_inverse(almost_with({1, 25, 0})), CorruptStream);
}

TEST_CASE("reconstruction without overlap is a copy") {
    const Grid g(4, 2);
    const Shape s{2, 2};
    const auto a = oracle::plant_repeat(g, Position{0, 0}, Position{2, 2}, s, Bits(4, 0), 2);
    const auto partial = reinsert_with_holes(delete_subarray(a, Position{2, 2}, s));
    CHECK(reconstruct_repeat(partial, Position{0, 0}, Position{2, 2}, s, Bits(4, 0)) == a);
}

TEST_CASE("reconstruction of the overlapping pair (0,0) and (1,0)") {
    const Grid g(4, 2);
    const Shape s{3, 3};
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto a = oracle::plant_repeat(g, Position{0, 0}, Position{1, 0}, s, Bits(9, 0), seed);
        CHECK(extract_subarray(a, Position{0, 0}, s) == extract_subarray(a, Position{1, 0}, s));
        const auto partial = reinsert_with_holes(delete_subarray(a, Position{1, 0}, s));
        CHECK(reconstruct_repeat(partial, Position{0, 0}, Position{1, 0}, s, Bits(9, 0)) == a);

        Bits mask(9, 0);
        mask[seed % 9] = 1;
        const auto b = oracle::plant_repeat(g, Position{0, 0}, Position{1, 0}, s, mask, seed);
        const auto holes = reinsert_with_holes(delete_subarray(b, Position{1, 0}, s));
        CHECK(reconstruct_repeat(holes, Position{0, 0}, Position{1, 0}, s, mask) == b);
    }
}

TEST_CASE("reconstruction refuses holes that do not match the region") {
    const Grid g(4, 2);
    const Shape s{3, 3};
    const auto a = oracle::plant_repeat(g, Position{0, 0}, Position{1, 0}, s, Bits(9, 0), 1);
    const auto partial = reinsert_with_holes(delete_subarray(a, Position{0, 1}, s));
    CHECK_THROWS_AS(reconstruct_repeat(partial, Position{0, 0}, Position{1, 0}, s, Bits(9, 0)), ContractViolation);
}
