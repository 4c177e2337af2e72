#include "mdcc/container.hpp"

#include "mdcc/constraints.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

namespace mdcc::container {

namespace {

void put_be(Bytes& out, std::uint64_t value, std::size_t width) {
    for (std::size_t i = width; i-- > 0;) out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
}

class ByteCursor {
public:
    explicit ByteCursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::uint64_t take_be(std::size_t width, const char* what) {
        if (bytes_.size() - at_ < width) throw CorruptStream(std::string("truncated header: missing ") + what);
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < width; ++i) v = (v << 8) | bytes_[at_++];
        return v;
    }

    std::size_t offset() const noexcept { return at_; }

private:
    std::span<const std::uint8_t> bytes_;
    std::size_t at_ = 0;
};

std::uint64_t checked_u32(std::size_t value, const char* what) {
    if (value > UINT32_MAX) throw ParameterError(std::string(what) + " does not fit in 4 bytes");
    return value;
}

std::string histogram_line(const std::map<std::size_t, std::size_t>& h) {
    std::string s = "iterations";
    for (const auto& [iters, count] : h) s += " " + std::to_string(iters) + ":" + std::to_string(count);
    return s;
}

void finish_stats(StatsReport& r, std::chrono::steady_clock::duration elapsed) {
    std::size_t total = 0;
    for (const auto& [iters, count] : r.iterations) total += iters * count;
    if (r.blocks != 0) {
        r.mean_iterations = static_cast<double>(total) / static_cast<double>(r.blocks);
        r.seconds_per_block = std::chrono::duration<double>(elapsed).count() / static_cast<double>(r.blocks);
    }
}

ConstraintConfig square_config(ConstraintKind kind, std::size_t n, std::size_t d, std::size_t side, std::size_t p) {
    Shape shape(std::vector<std::size_t>(d, side));
    switch (kind) {
        case ConstraintKind::zrcf: return ConstraintConfig::zrcf(n, std::move(shape));
        case ConstraintKind::rf: return ConstraintConfig::rf(n, std::move(shape));
        case ConstraintKind::hdrf: return ConstraintConfig::hdrf(n, std::move(shape), p);
        case ConstraintKind::vzrcf: break;
    }
    throw ParameterError("vzrcf has no square shape");
}

}  // namespace

Bytes write_header(const ContainerHeader& header) {
    const auto& cfg = header.config;
    cfg.validate();
    if (cfg.d > 255) throw ParameterError("d does not fit in one byte");
    Bytes out(kMagic, kMagic + 4);
    out.push_back(kVersion);
    out.push_back(static_cast<std::uint8_t>(cfg.kind));
    out.push_back(static_cast<std::uint8_t>(cfg.d));
    put_be(out, checked_u32(cfg.n, "n"), 4);
    if (cfg.kind == ConstraintKind::vzrcf) {
        put_be(out, cfg.volume_bound, 8);
    } else {
        for (auto e : cfg.shape->extents()) put_be(out, checked_u32(e, "extent"), 4);
        if (cfg.kind == ConstraintKind::hdrf) put_be(out, checked_u32(cfg.p, "p"), 4);
    }
    put_be(out, header.payload_bit_length, 8);
    return out;
}

ParsedHeader read_header(std::span<const std::uint8_t> bytes) {
    if (bytes.size() < 4 || !std::equal(kMagic, kMagic + 4, bytes.begin())) throw CorruptStream("bad magic");
    ByteCursor cur(bytes.subspan(4));
    const auto version = cur.take_be(1, "version");
    if (version != kVersion) throw CorruptStream("unsupported version " + std::to_string(version));
    const auto id = cur.take_be(1, "constraint id");
    if (id < 1 || id > 4) throw CorruptStream("unknown constraint id " + std::to_string(id));

    ConstraintConfig cfg;
    cfg.kind = static_cast<ConstraintKind>(id);
    cfg.d = static_cast<std::size_t>(cur.take_be(1, "d"));
    cfg.n = static_cast<std::size_t>(cur.take_be(4, "n"));
    if (cfg.d == 0) throw CorruptStream("header declares d = 0");
    if (cfg.kind == ConstraintKind::vzrcf) {
        cfg.volume_bound = cur.take_be(8, "V");
    } else {
        std::vector<std::size_t> extents;
        for (std::size_t j = 0; j < cfg.d; ++j) extents.push_back(static_cast<std::size_t>(cur.take_be(4, "extent")));
        if (cfg.kind == ConstraintKind::hdrf) cfg.p = static_cast<std::size_t>(cur.take_be(4, "p"));
        try {
            cfg.shape = Shape(std::move(extents));
        } catch (const ParameterError& e) {
            throw CorruptStream(std::string("header shape: ") + e.what());
        }
    }
    const auto payload_bits = cur.take_be(8, "payload bit length");

    try {
        const auto f = check_feasibility(cfg);
        if (!f) throw CorruptStream("header declares an infeasible config: " + f.reason);
        (void)cfg.grid();
    } catch (const ParameterError& e) {
        throw CorruptStream(std::string("header declares an invalid config: ") + e.what());
    }
    return ParsedHeader{ContainerHeader{cfg, payload_bits}, 4 + cur.offset()};
}

void BitWriter::put(bool bit) {
    if (count_ % 8 == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80U >> (count_ % 8));
    ++count_;
}

void BitWriter::put(std::span<const std::uint8_t> bits) {
    for (auto b : bits) put(b != 0);
}

bool BitReader::get() {
    if (at_ >= bytes_.size() * 8) throw CorruptStream("truncated stream");
    const bool bit = (bytes_[at_ / 8] >> (7 - at_ % 8)) & 1U;
    ++at_;
    return bit;
}

Bits BitReader::take(std::size_t count) {
    if (count > remaining()) throw CorruptStream("truncated stream");
    Bits out(count);
    for (auto& b : out) b = get();
    return out;
}

Bits unpack_bits(std::span<const std::uint8_t> bytes) {
    BitReader reader(bytes);
    return reader.take(bytes.size() * 8);
}

Bytes pack_bits(std::span<const std::uint8_t> bits) {
    BitWriter w;
    w.put(bits);
    return w.bytes();
}

std::size_t block_count(const ConstraintConfig& cfg, std::uint64_t payload_bits) {
    const std::uint64_t k = cfg.message_bits();
    return static_cast<std::size_t>((payload_bits + k - 1) / k);
}

Bytes encode_file(std::span<const std::uint8_t> input, const ConstraintConfig& cfg, const EncodeOptions& options) {
    const auto codec = make_codec(cfg);
    const std::size_t k = cfg.message_bits();
    const Bits message = unpack_bits(input);

    Bytes out = write_header(ContainerHeader{cfg, message.size()});
    BitWriter stream;
    for (std::size_t at = 0; at < message.size(); at += k) {
        Bits chunk(k, 0);
        const std::size_t take = std::min(k, message.size() - at);
        std::copy_n(message.begin() + static_cast<std::ptrdiff_t>(at), take, chunk.begin());
        stream.put(encode(*codec, chunk, options).array.bits());
    }
    out.insert(out.end(), stream.bytes().begin(), stream.bytes().end());
    return out;
}

ContainerView read_container(std::span<const std::uint8_t> container) {
    const auto parsed = read_header(container);
    const auto& cfg = parsed.header.config;
    const Grid grid = cfg.grid();
    const std::size_t blocks = block_count(cfg, parsed.header.payload_bit_length);
    const auto body = container.subspan(parsed.size);

    if (blocks > body.size() * 8 / grid.cells() + 1) {
        throw CorruptStream("truncated stream: header declares " + std::to_string(parsed.header.payload_bit_length) +
                            " payload bits");
    }
    const std::uint64_t stream_bits = static_cast<std::uint64_t>(blocks) * grid.cells();
    const std::uint64_t stream_bytes = (stream_bits + 7) / 8;
    if (body.size() < stream_bytes) {
        throw CorruptStream("truncated stream: " + std::to_string(blocks) + " blocks need " +
                            std::to_string(stream_bytes) + " bytes, found " + std::to_string(body.size()));
    }
    if (body.size() > stream_bytes) {
        throw CorruptStream(std::to_string(body.size() - stream_bytes) + " trailing bytes after the last block");
    }

    ContainerView view{parsed.header, {}};
    view.blocks.reserve(blocks);
    BitReader reader(body);
    for (std::size_t b = 0; b < blocks; ++b) view.blocks.emplace_back(grid, reader.take(grid.cells()));
    while (reader.remaining() != 0) {
        if (reader.get()) throw CorruptStream("nonzero padding after the last block");
    }
    return view;
}

Bytes decode_file(std::span<const std::uint8_t> container, const DecodeOptions& options) {
    const auto view = read_container(container);
    const auto codec = make_codec(view.header.config);
    Bits message;
    message.reserve(view.blocks.size() * view.header.config.message_bits());
    for (std::size_t b = 0; b < view.blocks.size(); ++b) {
        try {
            const auto bits = decode(*codec, view.blocks[b], options);
            message.insert(message.end(), bits.begin(), bits.end());
        } catch (const CorruptStream& e) {
            throw CorruptStream(e.what(), b);
        } catch (const BoundsError& e) {
            throw CorruptStream(e.what(), b);
        }
    }
    message.resize(static_cast<std::size_t>(view.header.payload_bit_length));
    return pack_bits(message);
}

std::string CheckReport::to_text() const {
    std::ostringstream out;
    out << "config " << config << '\n' << "blocks " << blocks << '\n';
    out << "invalid " << invalid_blocks.size();
    for (auto b : invalid_blocks) out << ' ' << b;
    out << '\n' << "undecodable " << undecodable_blocks.size() << '\n';
    for (const auto& u : undecodable_blocks) out << "  " << u << '\n';
    out << (ok() ? "OK" : "FAIL") << '\n';
    return out.str();
}

CheckReport check_container(std::span<const std::uint8_t> container) {
    const auto view = read_container(container);
    const auto& cfg = view.header.config;
    const auto codec = make_codec(cfg);
    CheckReport report;
    report.config = cfg.to_string();
    report.blocks = view.blocks.size();
    for (std::size_t b = 0; b < view.blocks.size(); ++b) {
        if (!oracle::brute_valid(view.blocks[b], cfg)) report.invalid_blocks.push_back(b);
        try {
            (void)decode(*codec, view.blocks[b]);
        } catch (const Error& e) {
            report.undecodable_blocks.push_back(std::to_string(b) + ": " + e.what());
        }
    }
    return report;
}

std::string StatsReport::to_text() const {
    std::ostringstream out;
    out << "config " << config << '\n' << "blocks " << blocks << '\n';
    out << histogram_line(iterations) << '\n';
    out << "mean_iterations " << mean_iterations << '\n';
    out << "seconds_per_block " << seconds_per_block << '\n';
    return out.str();
}

StatsReport stats_trials(const ConstraintConfig& cfg, std::size_t trials, std::uint64_t seed, TrialMessages messages) {
    const auto codec = make_codec(cfg);
    const std::size_t k = cfg.message_bits();
    oracle::BitSource source(seed);
    StatsReport report;
    report.config = cfg.to_string();

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t t = 0; t < trials; ++t) {
        Bits message;
        switch (messages) {
            case TrialMessages::random: message = source.take(k); break;
            case TrialMessages::zeros: message.assign(k, 0); break;
            case TrialMessages::ones: message.assign(k, 1); break;
        }
        ++report.iterations[encode(*codec, message).iterations];
        ++report.blocks;
    }
    finish_stats(report, std::chrono::steady_clock::now() - start);
    return report;
}

StatsReport stats_container(std::span<const std::uint8_t> container) {
    const auto view = read_container(container);
    const auto codec = make_codec(view.header.config);
    StatsReport report;
    report.config = view.header.config.to_string();

    const auto start = std::chrono::steady_clock::now();
    for (std::size_t b = 0; b < view.blocks.size(); ++b) {
        try {
            ++report.iterations[decode_traced(*codec, view.blocks[b]).iterations];
        } catch (const CorruptStream& e) {
            throw CorruptStream(e.what(), b);
        }
        ++report.blocks;
    }
    finish_stats(report, std::chrono::steady_clock::now() - start);
    return report;
}

std::string BoundResult::to_text() const {
    std::ostringstream out;
    out << to_string(kind) << " n=" << n << " d=" << d;
    if (kind == ConstraintKind::hdrf) out << " p=" << p;
    out << '\n';
    if (kind == ConstraintKind::vzrcf) {
        out << "V " << (volume ? std::to_string(*volume) : "none") << '\n';
    } else {
        out << "l " << (side ? std::to_string(*side) : "none") << '\n';
    }
    out << "payload_bits " << payload_bits << '\n';
    return out.str();
}

BoundResult minimal_bound(ConstraintKind kind, std::size_t n, std::size_t d, std::size_t p) {
    if (n < 2) throw ParameterError("n must be at least 2");
    if (d < 1) throw ParameterError("d must be at least 1");
    if (kind == ConstraintKind::hdrf && p < 1) throw ParameterError("hdrf needs p >= 1");

    BoundResult result{kind, n, d, kind == ConstraintKind::hdrf ? p : 0, std::nullopt, std::nullopt, 0};
    const std::size_t w_pos = position_width(n, d);

    if (kind == ConstraintKind::vzrcf) {
        // Minimal shapes may all exceed V, so small V are tried too.
        for (std::uint64_t v = 1;; ++v) {
            MinimalShapeSet shapes;
            try {
                shapes = minimal_shape_set(v, n, d);
            } catch (const ParameterError&) {
                return result;  // V > n^d: nothing fits
            }
            const std::size_t bits = index_width(shapes.size()) + w_pos;
            std::uint64_t smallest = UINT64_MAX;
            for (const auto& s : shapes.shapes) smallest = std::min<std::uint64_t>(smallest, volume(s));
            if (bits + 1 <= smallest) {
                const auto f = check_feasibility(ConstraintConfig::vzrcf(n, d, v));
                if (!f) throw ContractViolation("bound search disagrees with check_feasibility: " + f.reason);
                result.volume = v;
                result.payload_bits = f.payload_bits;
                return result;
            }
        }
    }

    for (std::size_t side = 1; side <= n; ++side) {
        __extension__ typedef unsigned __int128 u128;
        u128 vol = 1;
        for (std::size_t j = 0; j < d && vol <= UINT64_MAX; ++j) vol *= side;
        std::size_t bits = kind == ConstraintKind::rf ? 2 * w_pos : w_pos;
        if (kind == ConstraintKind::hdrf) {
            bits = pair_width(n, d) + (p - 1) * (vol > UINT64_MAX ? 65 : offset_width(static_cast<std::uint64_t>(vol)));
        }
        if (u128{bits} + 1 > vol) continue;
        const auto f = check_feasibility(square_config(kind, n, d, side, p));
        if (!f) throw ContractViolation("bound search disagrees with check_feasibility: " + f.reason);
        result.side = side;
        result.payload_bits = f.payload_bits;
        return result;
    }
    return result;
}

}  // namespace mdcc::container
