// mdcc: encode byte streams into constrained binary arrays and back.
//
// Exit codes: 0 success, 1 usage or parameter error, 2 corrupt stream,
// 3 audit or check failure.

#include "mdcc/constraints.hpp"
#include "mdcc/container.hpp"
#include "mdcc/errors.hpp"
#include "mdcc/oracle.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

namespace {

using mdcc::container::Bytes;

constexpr int kUsage = 1;
constexpr int kCorrupt = 2;
constexpr int kAudit = 3;

struct ConfigFlags {
    std::string constraint;
    std::size_t n = 0;
    std::size_t d = 0;
    std::string shape;
    std::size_t p = 0;
    std::uint64_t volume = 0;

    void attach(CLI::App* app, bool required) {
        auto* c = app->add_option("--constraint", constraint, "zrcf | vzrcf | rf | hdrf");
        auto* nn = app->add_option("--n", n, "array side length");
        if (required) {
            c->required();
            nn->required();
        }
        app->add_option("--d", d, "dimension (implied by --shape)");
        app->add_option("--shape", shape, "comma-separated extents, e.g. 3,3");
        app->add_option("--p", p, "minimum Hamming distance (hdrf)");
        app->add_option("--V", volume, "volume bound (vzrcf)");
    }

    mdcc::ConstraintKind kind() const {
        const auto k = mdcc::parse_constraint_kind(constraint);
        if (!k) throw mdcc::ParameterError("unknown constraint '" + constraint + "'");
        return *k;
    }

    mdcc::ConstraintConfig build() const {
        const auto k = kind();
        if (k == mdcc::ConstraintKind::vzrcf) {
            if (d == 0 || volume == 0) throw mdcc::ParameterError("vzrcf needs --d and --V");
            return mdcc::ConstraintConfig::vzrcf(n, d, volume);
        }
        if (shape.empty()) throw mdcc::ParameterError(constraint + " needs --shape");
        std::vector<std::size_t> extents;
        std::stringstream in(shape);
        for (std::string part; std::getline(in, part, ',');) {
            try {
                extents.push_back(std::stoul(part));
            } catch (const std::exception&) {
                throw mdcc::ParameterError("bad shape extent '" + part + "'");
            }
        }
        mdcc::Shape s(std::move(extents));
        if (d != 0 && d != s.dim()) throw mdcc::ParameterError("--d disagrees with --shape");
        switch (k) {
            case mdcc::ConstraintKind::zrcf: return mdcc::ConstraintConfig::zrcf(n, std::move(s));
            case mdcc::ConstraintKind::rf: return mdcc::ConstraintConfig::rf(n, std::move(s));
            default: return mdcc::ConstraintConfig::hdrf(n, std::move(s), p);
        }
    }
};

Bytes read_input(const std::string& path) {
    if (path == "-") return Bytes(std::istreambuf_iterator<char>(std::cin), {});
    std::ifstream in(path, std::ios::binary);
    if (!in) throw mdcc::ParameterError("cannot open " + path);
    return Bytes(std::istreambuf_iterator<char>(in), {});
}

void write_output(const std::string& path, const Bytes& bytes) {
    if (path == "-") {
        std::cout.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw mdcc::ParameterError("cannot write " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

int selftest() {
    using mdcc::ConstraintConfig;
    using mdcc::Shape;
    std::vector<mdcc::oracle::AuditReport> reports;
    auto roundtrip = [&](const ConstraintConfig& cfg, std::optional<std::size_t> samples) {
        const auto codec = mdcc::make_codec(cfg);
        reports.push_back(mdcc::oracle::exhaustive_roundtrip(*codec, {samples, 1, true}));
    };
    roundtrip(ConstraintConfig::zrcf(4, Shape{2, 3}), std::nullopt);
    roundtrip(ConstraintConfig::vzrcf(4, 2, 5), std::nullopt);
    roundtrip(ConstraintConfig::rf(4, Shape{3, 3}), std::nullopt);
    roundtrip(ConstraintConfig::hdrf(5, Shape{4, 4}, 2), 2000);
    reports.push_back(mdcc::oracle::injectivity_audit(*mdcc::make_codec(ConstraintConfig::zrcf(3, Shape{2, 3}))));

    bool ok = true;
    for (const auto& r : reports) {
        std::cout << r.to_text();
        ok = ok && r.passed();
    }
    return ok ? 0 : kAudit;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Single-redundancy-bit codecs for multidimensional constrained arrays"};
    app.require_subcommand(1);

    std::string input = "-";
    std::string output = "-";
    std::optional<std::size_t> max_iter;
    bool strict = false;

    auto* enc = app.add_subcommand("encode", "encode a byte stream into a container");
    ConfigFlags enc_cfg;
    enc_cfg.attach(enc, true);
    enc->add_option("-i,--input", input, "input file, - for stdin");
    enc->add_option("-o,--output", output, "output file, - for stdout");
    enc->add_option("--max-iter", max_iter, "diagnostic cap on encoder iterations per block");

    auto* dec = app.add_subcommand("decode", "decode a container");
    dec->add_option("-i,--input", input, "container file, - for stdin");
    dec->add_option("-o,--output", output, "output file, - for stdout");
    dec->add_flag("--strict", strict, "verify every decoding step against the encoder");

    auto* chk = app.add_subcommand("check", "verify that every block of a container satisfies its constraint");
    chk->add_option("-i,--input", input, "container file, - for stdin");

    auto* sta = app.add_subcommand("stats", "iteration statistics for random trials or a container");
    ConfigFlags sta_cfg;
    sta_cfg.attach(sta, false);
    std::size_t trials = 10000;
    std::uint64_t seed = 1;
    std::string messages = "random";
    std::string stats_input;
    sta->add_option("-i,--input", stats_input, "container file (instead of random trials)");
    sta->add_option("--trials", trials, "number of messages");
    sta->add_option("--seed", seed, "seed for random messages");
    sta->add_option("--message", messages, "random | zeros | ones")->check(CLI::IsMember({"random", "zeros", "ones"}));

    auto* bnd = app.add_subcommand("bound", "smallest feasible square shape (or V for vzrcf)");
    ConfigFlags bnd_cfg;
    bnd_cfg.attach(bnd, true);

    auto* self = app.add_subcommand("selftest", "run the built-in audits");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsage;
    }

    try {
        if (enc->parsed()) {
            mdcc::EncodeOptions options;
            options.max_iterations = max_iter;
            write_output(output, mdcc::container::encode_file(read_input(input), enc_cfg.build(), options));
        } else if (dec->parsed()) {
            write_output(output, mdcc::container::decode_file(read_input(input), mdcc::DecodeOptions{strict}));
        } else if (chk->parsed()) {
            const auto report = mdcc::container::check_container(read_input(input));
            std::cout << report.to_text();
            return report.ok() ? 0 : kAudit;
        } else if (sta->parsed()) {
            if (!stats_input.empty()) {
                std::cout << mdcc::container::stats_container(read_input(stats_input)).to_text();
            } else {
                if (sta_cfg.constraint.empty()) throw mdcc::ParameterError("stats needs -i or --constraint");
                const auto kind = messages == "zeros"  ? mdcc::container::TrialMessages::zeros
                                  : messages == "ones" ? mdcc::container::TrialMessages::ones
                                                       : mdcc::container::TrialMessages::random;
                std::cout << mdcc::container::stats_trials(sta_cfg.build(), trials, seed, kind).to_text();
            }
        } else if (bnd->parsed()) {
            std::size_t d = bnd_cfg.d;
            if (d == 0) throw mdcc::ParameterError("bound needs --d");
            std::cout << mdcc::container::minimal_bound(bnd_cfg.kind(), bnd_cfg.n, d, bnd_cfg.p).to_text();
        } else if (self->parsed()) {
            return selftest();
        }
    } catch (const mdcc::CorruptStream& e) {
        std::cerr << "corrupt stream: " << e.what() << '\n';
        return kCorrupt;
    } catch (const mdcc::ContractViolation& e) {
        std::cerr << "internal check failed: " << e.what() << '\n';
        return kAudit;
    } catch (const mdcc::CapExceeded& e) {
        std::cerr << "iteration cap exceeded: " << e.what() << '\n';
        return kAudit;
    } catch (const mdcc::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsage;
    }
    return 0;
}
