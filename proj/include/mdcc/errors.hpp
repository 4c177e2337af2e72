#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace mdcc {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A coordinate, index or sub-array lies outside the ambient array.
class BoundsError : public Error {
public:
    using Error::Error;
};

/// Structurally invalid parameters (n < 2, extents larger than n, infeasible layout, ...).
class ParameterError : public Error {
public:
    using Error::Error;
};

/// Input that cannot have been produced by the encoder.
///
/// `block()` is set when the error was raised while decoding one block of a
/// container stream.
class CorruptStream : public Error {
public:
    explicit CorruptStream(const std::string& what, std::optional<std::size_t> block = std::nullopt)
        : Error(block ? "block " + std::to_string(*block) + ": " + what : what), block_(block) {}

    std::optional<std::size_t> block() const noexcept { return block_; }

private:
    std::optional<std::size_t> block_;
};

/// An internal invariant failed. Indicates a bug, not bad input.
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// The optional diagnostic encoder iteration cap was hit. Unreachable for a
/// correct codec; exists only so that a runaway loop is reported distinctly.
class CapExceeded : public Error {
public:
    using Error::Error;
};

}  // namespace mdcc
