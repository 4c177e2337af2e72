#pragma once

// Generic single-redundancy-bit encoder and decoder.
//
// A constraint plugs in through ConstraintCodec: an indicator for the valid
// set, and an injective map `xi` from invalid arrays to arrays whose last
// cell (n-1, ..., n-1) is empty. The encoder embeds an (n^d - 1)-bit message
// with a 0 in the last cell and applies `xi` (writing 1 into the last cell)
// until the array is valid. The decoder undoes `xi` while the last cell is 1.

#include "mdcc/array.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace mdcc {

enum class ConstraintKind : std::uint8_t {
    zrcf = 1,   ///< no all-zero sub-array of a fixed shape
    vzrcf = 2,  ///< no all-zero sub-array of volume >= V
    rf = 3,     ///< no two equal sub-arrays of a fixed shape
    hdrf = 4,   ///< every two sub-arrays of a fixed shape at Hamming distance >= p
};

std::string_view to_string(ConstraintKind kind) noexcept;
std::optional<ConstraintKind> parse_constraint_kind(std::string_view name) noexcept;

struct ConstraintConfig {
    ConstraintKind kind = ConstraintKind::zrcf;
    std::size_t n = 0;
    std::size_t d = 0;
    std::optional<Shape> shape;       ///< zrcf, rf, hdrf
    std::uint64_t volume_bound = 0;   ///< V, vzrcf only
    std::size_t p = 0;                ///< hdrf only

    static ConstraintConfig zrcf(std::size_t n, Shape shape);
    static ConstraintConfig vzrcf(std::size_t n, std::size_t d, std::uint64_t volume_bound);
    static ConstraintConfig rf(std::size_t n, Shape shape);
    static ConstraintConfig hdrf(std::size_t n, Shape shape, std::size_t p);

    /// Throws ParameterError on n < 2, d < 1, extents > n, missing or stray parameters.
    void validate() const;
    Grid grid() const { return Grid(n, d); }
    /// Message bits per block: n^d - 1.
    std::size_t message_bits() const { return grid().cells() - 1; }
    std::string to_string() const;

    friend bool operator==(const ConstraintConfig&, const ConstraintConfig&) = default;
};

/// ceil(d * log2(n)): bits for one vectorized position. Exact for every n, d
/// with n^d < 2^127; throws ParameterError beyond that.
std::size_t position_width(std::size_t n, std::size_t d);
/// ceil(2d * log2(n)): bits for an ordered pair of positions packed as I1*n^d + I2.
std::size_t pair_width(std::size_t n, std::size_t d);
/// ceil(log2(volume + 1)): bits for a 1-based offset inside a sub-array, 0 reserved.
std::size_t offset_width(std::uint64_t volume);
/// ceil(log2(count)): bits for an index into `count` alternatives.
std::size_t index_width(std::uint64_t count);

enum class FieldRole : std::uint8_t { shape_index, position, position_pair, diff_offset };

struct FieldSpec {
    FieldRole role;
    std::size_t width;
    std::uint64_t limit;  ///< decoded values must be < limit
};

/// Ordered payload fields written into the emptied cells.
struct PayloadLayout {
    std::vector<FieldSpec> fields;

    std::size_t total_bits() const noexcept;
};

/// zrcf: [I]   vzrcf: [shape index, I]   rf: [I1, I2]   hdrf: [I1*n^d + I2, P1 .. P(p-1)]
PayloadLayout payload_layout(const ConstraintConfig& cfg);

struct Feasibility {
    bool ok = false;
    std::size_t payload_bits = 0;   ///< L
    std::uint64_t min_gap = 0;      ///< smallest number of emptied cells
    std::string reason;             ///< the violated inequality when !ok

    explicit operator bool() const noexcept { return ok; }
};

/// ok iff L + 1 <= the smallest deletable volume. Throws ParameterError when
/// the config is structurally invalid.
Feasibility check_feasibility(const ConstraintConfig& cfg);

/// Fixed-width big-endian binary.
Bits encode_field(std::uint64_t value, std::size_t width);
std::uint64_t decode_field(std::span<const std::uint8_t> bits);

/// An array of n^d cells whose last cell is empty; carries n^d - 1 bits.
class AlmostArray {
public:
    AlmostArray(Grid grid, Bits bits);

    /// Requires exactly one undefined cell, the last one.
    static AlmostArray from_partial(const PartialArray& partial);
    /// Drops the last cell of a full array.
    static AlmostArray strip_marker(const BitArray& array);

    const Grid& grid() const noexcept { return grid_; }
    const Bits& bits() const noexcept { return bits_; }
    BitArray with_marker(bool marker) const;

    friend bool operator==(const AlmostArray&, const AlmostArray&) = default;

private:
    Grid grid_;
    Bits bits_;
};

struct PayloadFields {
    std::vector<std::uint64_t> values;

    friend bool operator==(const PayloadFields&, const PayloadFields&) = default;
};

/// Survivors plus the payload right-justified to end at index n^d - 2. The
/// cells between the survivors and the payload stay undefined, as does the last cell.
PartialArray place_payload(const CompactedArray& compacted, const PayloadFields& fields, const PayloadLayout& layout);

/// place_payload with the leftover cells zero-filled.
AlmostArray write_payload(const CompactedArray& compacted, const PayloadFields& fields, const PayloadLayout& layout);

/// Reads the L payload bits ending at index n^d - 2. Throws CorruptStream
/// when a field is at or above its limit.
PayloadFields read_payload(const AlmostArray& almost, const PayloadLayout& layout);

/// The first n^d - volume(region) bits of `almost`, i.e. the survivors of a deletion of `region`.
CompactedArray survivors_of(const AlmostArray& almost, const Region& region);

/// A constraint as seen by the encoder and decoder.
class ConstraintCodec {
public:
    virtual ~ConstraintCodec() = default;

    virtual const ConstraintConfig& config() const noexcept = 0;
    virtual bool is_valid(const BitArray& array) const = 0;
    /// Defined on invalid arrays only; throws ContractViolation otherwise.
    virtual AlmostArray xi(const BitArray& array) const = 0;
    /// Left inverse of xi. Throws CorruptStream for payloads xi cannot produce.
    virtual BitArray xi_inverse(const AlmostArray& almost) const = 0;
};

struct EncodeOptions {
    /// Diagnostic cap on xi applications; CapExceeded when hit. Off by default.
    std::optional<std::size_t> max_iterations;
    /// Throw ContractViolation if the trajectory revisits an array.
    bool track_visited = false;
};

struct EncodeResult {
    BitArray array;
    std::size_t iterations = 0;
};

/// `message` holds n^d - 1 bits (0/1 values).
EncodeResult encode(const ConstraintCodec& codec, std::span<const std::uint8_t> message,
                    const EncodeOptions& options = {});

struct DecodeOptions {
    /// Also require the input to be valid and every xi_inverse step to be
    /// the exact preimage of its input under xi.
    bool strict = false;
};

struct DecodeResult {
    Bits message;
    std::size_t iterations = 0;  ///< xi_inverse applications
};

DecodeResult decode_traced(const ConstraintCodec& codec, const BitArray& array, const DecodeOptions& options = {});

/// The n^d - 1 message bits behind a codeword.
Bits decode(const ConstraintCodec& codec, const BitArray& array, const DecodeOptions& options = {});

}  // namespace mdcc
