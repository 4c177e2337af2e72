#pragma once

// File container for byte streams encoded as a sequence of constrained arrays.
//
// Layout (multi-byte integers big-endian):
//
//   "MDC1"                 4 bytes
//   version                1 byte, = 1
//   constraint id          1 byte: 1 zrcf, 2 vzrcf, 3 rf, 4 hdrf
//   d                      1 byte
//   n                      4 bytes
//   params                 zrcf/rf: d x 4-byte extents
//                          hdrf:    d x 4-byte extents, 4-byte p
//                          vzrcf:   8-byte V
//   payload_bit_length     8 bytes, length of the original message in bits
//   blocks                 ceil(payload_bit_length / (n^d - 1)) arrays of
//                          n^d bits each, packed MSB-first in vectorized order
//                          and concatenated; the last byte is zero-padded.
//
// The message bit stream is the input bytes MSB-first; its final chunk is
// zero-padded to n^d - 1 bits before encoding.

#include "mdcc/codec.hpp"

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mdcc::container {

using Bytes = std::vector<std::uint8_t>;

inline constexpr char kMagic[4] = {'M', 'D', 'C', '1'};
inline constexpr std::uint8_t kVersion = 1;

struct ContainerHeader {
    ConstraintConfig config;
    std::uint64_t payload_bit_length = 0;

    friend bool operator==(const ContainerHeader&, const ContainerHeader&) = default;
};

Bytes write_header(const ContainerHeader& header);

struct ParsedHeader {
    ContainerHeader header;
    std::size_t size = 0;  ///< bytes consumed
};

/// Throws CorruptStream on bad magic, version, constraint id, truncation or
/// an infeasible declared config.
ParsedHeader read_header(std::span<const std::uint8_t> bytes);

/// MSB-first bit packer.
class BitWriter {
public:
    void put(bool bit);
    void put(std::span<const std::uint8_t> bits);
    std::size_t bit_count() const noexcept { return count_; }
    /// Packed bytes, the last one zero-padded.
    const Bytes& bytes() const noexcept { return bytes_; }

private:
    Bytes bytes_;
    std::size_t count_ = 0;
};

/// MSB-first bit reader over a byte span.
class BitReader {
public:
    explicit BitReader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}
    bool get();
    Bits take(std::size_t count);
    std::size_t remaining() const noexcept { return bytes_.size() * 8 - at_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t at_ = 0;
};

/// Input bytes as an MSB-first bit vector.
Bits unpack_bits(std::span<const std::uint8_t> bytes);
/// MSB-first packing; the last byte is zero-padded.
Bytes pack_bits(std::span<const std::uint8_t> bits);

std::size_t block_count(const ConstraintConfig& cfg, std::uint64_t payload_bits);

/// Throws ParameterError with the violated inequality for an infeasible config.
Bytes encode_file(std::span<const std::uint8_t> input, const ConstraintConfig& cfg, const EncodeOptions& options = {});

/// Throws CorruptStream (tagged with the block index where applicable).
Bytes decode_file(std::span<const std::uint8_t> container, const DecodeOptions& options = {});

struct ContainerView {
    ContainerHeader header;
    std::vector<BitArray> blocks;
};

/// Parses header and block stream without decoding the blocks.
ContainerView read_container(std::span<const std::uint8_t> container);

struct CheckReport {
    std::string config;
    std::size_t blocks = 0;
    std::vector<std::size_t> invalid_blocks;     ///< violate the constraint
    std::vector<std::string> undecodable_blocks; ///< "index: reason"

    bool ok() const noexcept { return invalid_blocks.empty() && undecodable_blocks.empty(); }
    std::string to_text() const;
};

/// Every block must satisfy the constraint (checked from its definition) and decode.
CheckReport check_container(std::span<const std::uint8_t> container);

struct StatsReport {
    std::string config;
    std::size_t blocks = 0;
    std::map<std::size_t, std::size_t> iterations;
    double mean_iterations = 0.0;
    double seconds_per_block = 0.0;

    std::string to_text() const;
};

enum class TrialMessages { random, zeros, ones };

/// Encodes `trials` messages and records how many xi applications each needed.
StatsReport stats_trials(const ConstraintConfig& cfg, std::size_t trials, std::uint64_t seed,
                         TrialMessages messages = TrialMessages::random);

/// Decodes every block of a container and records the xi_inverse count per block.
StatsReport stats_container(std::span<const std::uint8_t> container);

struct BoundResult {
    ConstraintKind kind = ConstraintKind::zrcf;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t p = 0;
    /// Smallest square side l with (l, ..., l) feasible, when one fits in n.
    std::optional<std::size_t> side;
    /// vzrcf: smallest feasible V, when one exists.
    std::optional<std::uint64_t> volume;
    std::size_t payload_bits = 0;

    std::string to_text() const;
};

/// Smallest feasible square shape (or V for vzrcf).
BoundResult minimal_bound(ConstraintKind kind, std::size_t n, std::size_t d, std::size_t p = 0);

}  // namespace mdcc::container
