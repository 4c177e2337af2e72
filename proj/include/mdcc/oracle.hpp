#pragma once

// Independent, deliberately naive checks for the codecs.
//
// Nothing here calls the constraint scans: validity is evaluated straight
// from the set definitions, position by position and pair by pair.

#include "mdcc/array.hpp"
#include "mdcc/codec.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace mdcc::oracle {

/// Membership in the constrained set, evaluated from its definition. For
/// vzrcf every shape of volume >= V is tried, not only minimal ones.
bool brute_valid(const BitArray& array, const ConstraintConfig& cfg);

struct AuditFailure {
    std::string input;
    std::string expected;
    std::string actual;
};

struct AuditReport {
    std::string name;
    std::string config;
    std::size_t population = 0;
    std::vector<AuditFailure> failures;
    /// Encoder xi applications -> number of messages (roundtrip audits only).
    std::map<std::size_t, std::size_t> iterations;

    bool passed() const noexcept { return failures.empty(); }
    /// Order-independent: population and histogram add, failures concatenate.
    void merge(const AuditReport& other);
    /// Counts, histogram and the first 10 failures, one item per line.
    std::string to_text() const;
};

struct RoundtripOptions {
    /// Unset: every message (requires n^d - 1 <= 20). Set: that many seeded random messages.
    std::optional<std::size_t> samples;
    std::uint64_t seed = 0;
    bool track_visited = true;
};

/// decode(encode(x)) == x and brute_valid(encode(x)) for every (or sampled) x.
AuditReport exhaustive_roundtrip(const ConstraintCodec& codec, const RoundtripOptions& options = {});

/// Every array the definition rejects must map under xi to a distinct image
/// that xi_inverse maps back. Exhaustive, n^d <= 20.
AuditReport injectivity_audit(const ConstraintCodec& codec);

/// Random array with an all-zero sub-array at `start`.
BitArray plant_zero_cuboid(const Grid& grid, const Position& start, const Shape& shape, std::uint64_t seed);

/// Random array with A[second + o] = A[first + o] XOR mask[o] for every offset
/// o of `shape` (mask indexed first axis fastest). Works for overlapping
/// sub-arrays. Throws ParameterError when first == second or a sub-array does not fit.
BitArray plant_repeat(const Grid& grid, const Position& first, const Position& second, const Shape& shape,
                      std::span<const std::uint8_t> mask, std::uint64_t seed);

/// plant_repeat with a mask of exactly `distance` ones at random offsets.
BitArray plant_near_repeat(const Grid& grid, const Position& first, const Position& second, const Shape& shape,
                           std::size_t distance, std::uint64_t seed);

/// Helper: "0101..." rendering of a bit vector.
std::string bit_string(std::span<const std::uint8_t> bits);

/// Reproducible bit stream built on the raw output of std::mt19937_64, so
/// that sequences match across standard libraries.
class BitSource {
public:
    explicit BitSource(std::uint64_t seed);
    std::uint8_t next();
    Bits take(std::size_t count);
    /// Uniform in [0, bound) by rejection.
    std::uint64_t below(std::uint64_t bound);

private:
    std::mt19937_64 engine_;
    std::uint64_t word_ = 0;
    int left_ = 0;
};

}  // namespace mdcc::oracle
