#include "mdcc/codec.hpp"
#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/oracle.hpp"

#include <doctest.h>

using namespace mdcc;

namespace {

__extension__ typedef unsigned __int128 u128;

Bits from_string(std::string_view s) {
    Bits out;
    for (char c : s) out.push_back(c == '1');
    return out;
}

}  // namespace

TEST_CASE("field widths") {
    CHECK(position_width(4, 2) == 4);
    CHECK(position_width(5, 2) == 5);
    CHECK(position_width(256, 2) == 16);
    CHECK(position_width(3, 3) == 5);      // 27 cells
    CHECK(position_width(1 << 20, 4) == 80);
    CHECK(position_width(2, 1) == 1);
    CHECK(offset_width(16) == 5);
    CHECK(offset_width(15) == 4);
    CHECK(index_width(1) == 0);
    CHECK(index_width(2) == 1);
    CHECK(index_width(3) == 2);
    CHECK(index_width(4) == 2);
}

TEST_CASE("position width is the smallest w with 2^w >= n^d") {
    for (std::size_t n = 2; n <= 40; ++n) {
        for (std::size_t d = 1; d <= 4; ++d) {
            std::uint64_t cells = 1;
            for (std::size_t j = 0; j < d; ++j) cells *= n;
            std::size_t w = 0;
            while ((std::uint64_t{1} << w) < cells) ++w;
            REQUIRE(position_width(n, d) == w);
        }
    }
}

TEST_CASE("pair width is the smallest w with 2^w >= n^(2d)") {
    for (std::size_t n = 2; n <= 40; ++n) {
        for (std::size_t d = 1; d <= 3; ++d) {
            u128 pairs = 1;
            for (std::size_t j = 0; j < 2 * d; ++j) pairs *= n;
            std::size_t w = 0;
            while ((u128{1} << w) < pairs) ++w;
            REQUIRE(pair_width(n, d) == w);
            CHECK(pair_width(n, d) <= 2 * position_width(n, d));
        }
    }
    CHECK(pair_width(5, 2) == 10);
    CHECK(pair_width(9, 1) == 7);   // position width is 4
    CHECK(pair_width(1 << 20, 4) == 160);
    CHECK(pair_width(3, 1) == 4);
    CHECK(pair_width(std::size_t{1} << 31, 4) == 248);
}

TEST_CASE("feasibility inequalities") {
    auto z = check_feasibility(ConstraintConfig::zrcf(4, Shape{2, 3}));
    CHECK(z.ok);
    CHECK(z.payload_bits == 4);
    CHECK(z.min_gap == 6);

    auto rf = check_feasibility(ConstraintConfig::rf(4, Shape{3, 3}));
    CHECK(rf.ok);
    CHECK(rf.payload_bits + 1 == rf.min_gap);

    auto bad = check_feasibility(ConstraintConfig::rf(4, Shape{2, 3}));
    CHECK_FALSE(bad.ok);
    CHECK(bad.reason.find("9 > 6") != std::string::npos);

    auto h = check_feasibility(ConstraintConfig::hdrf(5, Shape{4, 4}, 2));
    CHECK(h.ok);
    CHECK(h.payload_bits == 15);

    auto v = check_feasibility(ConstraintConfig::vzrcf(4, 2, 5));
    CHECK(v.ok);
    CHECK(v.payload_bits == 5);
    CHECK(v.min_gap == 6);

    CHECK_FALSE(check_feasibility(ConstraintConfig::vzrcf(4, 2, 17)).ok);
    CHECK_FALSE(check_feasibility(ConstraintConfig::rf(8, Shape{1, 1})).ok);
    CHECK_THROWS_AS(check_feasibility(ConstraintConfig::zrcf(4, Shape{5, 1})), ParameterError);
    CHECK_THROWS_AS(make_codec(ConstraintConfig::rf(4, Shape{2, 3})), ParameterError);
}

TEST_CASE("fields are fixed-width big-endian") {
    const Grid g(4, 2);
    CHECK(oracle::bit_string(encode_field(g.index(Position{1, 2}), 4)) == "1001");
    CHECK(oracle::bit_string(encode_field(vectorize(Position{4, 4}, 5, 2), 5)) == "11000");
    CHECK(oracle::bit_string(encode_field(0, 6)) == "000000");
    CHECK(decode_field(from_string("11000")) == 24);
    CHECK_THROWS_AS(encode_field(16, 4), BoundsError);
}

TEST_CASE("payload is right-justified against the marker slot") {
    const Grid g(3, 2);
    const BitArray a(g, from_string("001001111"));
    const auto c = delete_subarray(a, Position{0, 0}, Shape{2, 2});
    REQUIRE(c.gap() == 4);
    PayloadLayout layout{{FieldSpec{FieldRole::position, 3, 8}}};
    const auto almost = write_payload(c, PayloadFields{{5}}, layout);
    CHECK(oracle::bit_string(almost.bits()) == "11111101");
    CHECK(read_payload(almost, layout) == PayloadFields{{5}});

    // Two pad cells between the survivors and a 2-bit payload.
    PayloadLayout narrow{{FieldSpec{FieldRole::position, 1, 2}}};
    const auto padded = write_payload(c, PayloadFields{{1}}, narrow);
    CHECK(oracle::bit_string(padded.bits()) == "11111001");
    const auto partial = place_payload(c, PayloadFields{{1}}, narrow);
    CHECK(partial.undefined_cells() == std::vector<std::size_t>{5, 6, 8});
    CHECK_THROWS_AS(AlmostArray::from_partial(partial), ContractViolation);
}

TEST_CASE("payload that does not leave room for the marker is refused") {
    const Grid g(3, 2);
    const auto c = delete_subarray(BitArray(g), Position{0, 0}, Shape{2, 2});
    PayloadLayout layout{{FieldSpec{FieldRole::position, 4, 9}}};
    CHECK_THROWS_AS(write_payload(c, PayloadFields{{1}}, layout), ContractViolation);
}

TEST_CASE("payload roundtrip for random fields") {
    oracle::BitSource src(3);
    const Grid g(5, 2);
    PayloadLayout layout{{FieldSpec{FieldRole::position, 5, 25}, FieldSpec{FieldRole::position, 5, 25},
                          FieldSpec{FieldRole::diff_offset, 5, 17}}};
    for (int t = 0; t < 500; ++t) {
        const BitArray a(g, src.take(25));
        const auto c = delete_subarray(a, Position{0, 0}, Shape{4, 4});
        PayloadFields f{{src.below(25), src.below(25), src.below(17)}};
        REQUIRE(read_payload(write_payload(c, f, layout), layout) == f);
    }
}

TEST_CASE("read_payload rejects out-of-range fields") {
    const Grid g(3, 2);
    const AlmostArray almost(g, from_string("00001111"));
    PayloadLayout layout{{FieldSpec{FieldRole::position, 4, 9}}};
    CHECK_THROWS_AS(read_payload(almost, layout), CorruptStream);
}

TEST_CASE("rf payload 00000001 names I1=(0,0), I2=(1,0)") {
    const auto codec = make_codec(ConstraintConfig::rf(4, Shape{3, 3}));
    const auto& rf = dynamic_cast<const RfCodec&>(*codec);
    Bits bits(15, 0);
    bits[14] = 1;
    const auto fields = read_payload(AlmostArray(Grid(4, 2), bits), rf.layout());
    CHECK(fields.values == std::vector<std::uint64_t>{0, 1});
    CHECK(devectorize(fields.values[0], 4, 2) == Position{0, 0});
    CHECK(devectorize(fields.values[1], 4, 2) == Position{1, 0});
}

TEST_CASE("encoder leaves valid embeddings alone") {
    const auto codec = make_codec(ConstraintConfig::zrcf(4, Shape{2, 3}));
    const Bits ones(15, 1);
    const auto r = encode(*codec, ones);
    CHECK(r.iterations == 0);
    Bits expected = ones;
    expected.push_back(0);
    CHECK(r.array.bits() == expected);
    CHECK(decode(*codec, r.array) == ones);
}

TEST_CASE("all-zero message under zrcf n=4 (2,3)") {
    const auto codec = make_codec(ConstraintConfig::zrcf(4, Shape{2, 3}));
    const Bits zeros(15, 0);

    const BitArray start = AlmostArray(Grid(4, 2), zeros).with_marker(false);
    const auto first = codec->xi(start);
    CHECK(first.bits() == Bits(15, 0));

    const auto r = encode(*codec, zeros, EncodeOptions{std::nullopt, true});
    CHECK(r.iterations >= 1);
    CHECK(codec->is_valid(r.array));
    CHECK(oracle::brute_valid(r.array, codec->config()));
    CHECK(decode(*codec, r.array) == zeros);
    CHECK(decode(*codec, r.array, DecodeOptions{true}) == zeros);
}

TEST_CASE("encoder cap is diagnostic only") {
    const auto codec = make_codec(ConstraintConfig::zrcf(4, Shape{2, 3}));
    CHECK_THROWS_AS(encode(*codec, Bits(15, 0), EncodeOptions{0, false}), CapExceeded);
    CHECK_THROWS_AS(encode(*codec, Bits(14, 0)), ParameterError);
}

TEST_CASE("decoder with a zero marker returns the prefix") {
    const auto codec = make_codec(ConstraintConfig::rf(4, Shape{3, 3}));
    const auto x = oracle::BitSource(5).take(15);
    const auto a = AlmostArray(Grid(4, 2), x).with_marker(false);
    const auto r = decode_traced(*codec, a);
    CHECK(r.message == x);
    CHECK(r.iterations == 0);
}

TEST_CASE("strict decoding rejects arrays xi cannot produce") {
    const auto codec = make_codec(ConstraintConfig::zrcf(4, Shape{2, 3}));
    // Random valid arrays with marker 1: most are not codewords.
    oracle::BitSource src(9);
    std::size_t rejected = 0;
    for (int t = 0; t < 200; ++t) {
        auto bits = src.take(16);
        bits[15] = 1;
        const BitArray a(Grid(4, 2), bits);
        if (!codec->is_valid(a)) continue;
        try {
            const auto lenient = decode(*codec, a);
            const auto strict = decode(*codec, a, DecodeOptions{true});
            CHECK(strict == lenient);
            CHECK(encode(*codec, strict).array == a);
        } catch (const CorruptStream&) {
            ++rejected;
        }
    }
    CHECK(rejected > 0);
}

TEST_CASE("decoding a non-codeword never loops") {
    // Brute force over every 16-cell array: decode either finishes or throws CorruptStream.
    const auto codec = make_codec(ConstraintConfig::rf(4, Shape{3, 3}));
    for (std::uint32_t v = 0; v < (1U << 16); ++v) {
        Bits bits(16);
        for (int i = 0; i < 16; ++i) bits[i] = (v >> i) & 1U;
        try {
            (void)decode(*codec, BitArray(Grid(4, 2), bits));
        } catch (const CorruptStream&) {
        }
    }
}

TEST_CASE("every codec adds exactly one bit") {
    const ConstraintConfig cfgs[] = {
        ConstraintConfig::zrcf(4, Shape{2, 3}), ConstraintConfig::vzrcf(4, 2, 5),
        ConstraintConfig::rf(4, Shape{3, 3}),   ConstraintConfig::hdrf(5, Shape{4, 4}, 2),
        ConstraintConfig::zrcf(8, Shape{3, 3}), ConstraintConfig::hdrf(16, Shape{13}, 2),
    };
    for (const auto& cfg : cfgs) {
        const auto codec = make_codec(cfg);
        const auto k = cfg.message_bits();
        const auto r = encode(*codec, oracle::BitSource(1).take(k));
        CHECK(r.array.size() == k + 1);
    }
}

TEST_CASE("config strings and parsing") {
    CHECK(ConstraintConfig::hdrf(5, Shape{4, 4}, 2).to_string() == "hdrf n=5 d=2 shape=(4,4) p=2");
    CHECK(ConstraintConfig::vzrcf(4, 2, 5).to_string() == "vzrcf n=4 d=2 V=5");
    CHECK(parse_constraint_kind("rf") == ConstraintKind::rf);
    CHECK_FALSE(parse_constraint_kind("RF").has_value());
    auto bad = ConstraintConfig::zrcf(4, Shape{2, 3});
    bad.p = 2;
    CHECK_THROWS_AS(bad.validate(), ParameterError);
}
