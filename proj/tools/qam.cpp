// qam: command-line front end for the associative-memory library.
//
// Exit codes: 0 success; 1 ambiguous recognition under --strict; 2 usage
// error; 3 I/O, format, or data error. Diagnostics go to stderr with a
// single-line "error: " prefix; data goes to stdout or the --out file.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "qam/qam.hpp"

namespace {

using nlohmann::json;

struct OutputTarget {
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file.open(path, std::ios::binary | std::ios::trunc);
            if (!file)
                throw qam::IoError("cannot open for writing: " + path);
        }
    }
    std::ostream& stream() { return file.is_open() ? file : std::cout; }
    std::ofstream file;
};

bool is_pgm(const std::filesystem::path& path) {
    const std::string ext = path.extension().string();
    return ext == ".pgm" || ext == ".PGM";
}

std::vector<qam::RawPattern> load_patterns(const std::string& path) {
    if (is_pgm(path)) return {qam::load_pgm(path)};
    return qam::load_csv(path);
}

qam::StatePattern encode_one(const qam::RawPattern& raw, qam::EncodingKind kind,
                             double threshold) {
    switch (kind) {
    case qam::EncodingKind::Amplitude: return qam::amplitude_encode(raw);
    case qam::EncodingKind::Bipolar: return qam::bipolar_encode(raw, threshold);
    case qam::EncodingKind::Phase: return qam::phase_encode(raw);
    }
    throw qam::DomainError("unknown encoding");
}

json complex_pairs(std::span<const qam::Complex> v) {
    json out = json::array();
    for (const qam::Complex& z : v) out.push_back({z.real(), z.imag()});
    return out;
}

json report_json(const qam::OverlapReport& report, const qam::Hologram& holo) {
    json j{{"confidence", report.confidence}, {"margin", report.margin}};
    if (report.winner) {
        j["winner"] = *report.winner;
        const std::string& label = holo.label(*report.winner);
        j["label"] = label.empty() ? json(nullptr) : json(label);
    } else {
        j["winner"] = nullptr;
        j["label"] = nullptr;
    }
    j["coefficients"] = complex_pairs(report.coefficients);
    return j;
}

std::string fmt(double v) { return qam::detail::format_double(v); }

struct CommonEncodingOpts {
    std::string input;
    qam::EncodingKind encoding = qam::EncodingKind::Phase;
    double threshold = 0.5;
};

void add_encoding_flags(CLI::App* cmd, CommonEncodingOpts& opts) {
    static const std::map<std::string, qam::EncodingKind> kinds{
        {"amplitude", qam::EncodingKind::Amplitude},
        {"bipolar", qam::EncodingKind::Bipolar},
        {"phase", qam::EncodingKind::Phase}};
    cmd->add_option("--encoding", opts.encoding, "pattern encoding (default phase)")
        ->transform(CLI::CheckedTransformer(kinds, CLI::ignore_case));
    cmd->add_option("--threshold", opts.threshold,
                    "bipolar threshold (default 0.5)");
}

// config seed < QAM_SEED < --seed flag
qam::ExperimentConfig load_config(const std::string& path,
                                  const std::optional<std::uint64_t>& seed_flag) {
    std::ifstream in(path);
    if (!in)
        throw qam::IoError("cannot open config: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw qam::ParseError(path + ": " + e.what());
    }
    qam::ExperimentConfig cfg;
    try {
        cfg = j.get<qam::ExperimentConfig>();
    } catch (const json::exception& e) {
        throw qam::ParseError(path + ": " + e.what());
    }
    if (seed_flag) {
        cfg.seed = *seed_flag;
    } else if (const char* env = std::getenv("QAM_SEED")) {
        try {
            std::size_t used = 0;
            cfg.seed = std::stoull(env, &used);
            if (used != std::string(env).size()) throw std::invalid_argument(env);
        } catch (const std::exception&) {
            throw qam::DomainError("QAM_SEED must be an unsigned integer, got '" +
                                   std::string(env) + "'");
        }
    }
    return cfg;
}

int cmd_encode(const CommonEncodingOpts& opts, const std::string& out_path,
               bool as_json) {
    const auto raws = load_patterns(opts.input);
    std::vector<qam::StatePattern> states;
    states.reserve(raws.size());
    for (const auto& raw : raws)
        states.push_back(encode_one(raw, opts.encoding, opts.threshold));

    OutputTarget out(out_path);
    if (as_json) {
        json j{{"encoding", qam::to_string(opts.encoding)}, {"states", json::array()}};
        for (const auto& s : states)
            j["states"].push_back(complex_pairs(s.amplitudes));
        out.stream() << j.dump(2) << '\n';
        return 0;
    }
    // real-valued encodings emit one real per component, phase emits re,im pairs
    for (const auto& s : states) {
        bool first = true;
        for (const qam::Complex& z : s.amplitudes) {
            if (!first) out.stream() << ',';
            first = false;
            if (s.kind == qam::EncodingKind::Phase)
                out.stream() << fmt(z.real()) << ',' << fmt(z.imag());
            else
                out.stream() << fmt(z.real());
        }
        out.stream() << '\n';
    }
    return 0;
}

int cmd_build(const CommonEncodingOpts& opts, const std::string& labels_path,
              const std::string& out_path, bool as_json) {
    const auto raws = load_patterns(opts.input);
    std::vector<qam::StatePattern> states;
    states.reserve(raws.size());
    for (const auto& raw : raws)
        states.push_back(encode_one(raw, opts.encoding, opts.threshold));

    std::vector<std::string> labels;
    if (!labels_path.empty()) {
        std::ifstream in(labels_path);
        if (!in)
            throw qam::IoError("cannot open labels: " + labels_path);
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            labels.push_back(line);
        }
        if (labels.size() != states.size())
            throw qam::DomainError("label count " + std::to_string(labels.size()) +
                                   " does not match pattern count " +
                                   std::to_string(states.size()));
    }

    const qam::Hologram holo = qam::Hologram::build(states, std::move(labels));
    holo.save(out_path);
    std::cerr << "stored " << holo.pattern_count() << " pattern(s) of dimension "
              << holo.dimension() << " -> " << out_path << '\n';
    if (as_json) {
        json j{{"N", holo.dimension()},
               {"P", holo.pattern_count()},
               {"trace", holo.trace_real()},
               {"memory", out_path}};
        std::cout << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_recall(const std::string& memory, const CommonEncodingOpts& opts,
               const std::string& method, const std::string& out_path, bool as_json) {
    const qam::Hologram holo = qam::Hologram::load(memory);
    const auto raws = load_patterns(opts.input);
    OutputTarget out(out_path);
    json outputs = json::array();
    for (const auto& raw : raws) {
        const qam::StatePattern probe = encode_one(raw, opts.encoding, opts.threshold);
        const qam::ComplexVec result = method == "lazy"
                                           ? holo.recall_lazy(probe.amplitudes)
                                           : holo.recall_dense(probe.amplitudes);
        const double norm = qam::euclidean_norm(std::span<const qam::Complex>(result));
        if (as_json) {
            outputs.push_back({{"vector", complex_pairs(result)}, {"norm", norm}});
        } else {
            for (const qam::Complex& z : result)
                out.stream() << fmt(z.real()) << ',' << fmt(z.imag()) << ',';
            out.stream() << fmt(norm) << '\n';
        }
    }
    if (as_json) out.stream() << json{{"outputs", outputs}}.dump(2) << '\n';
    return 0;
}

int cmd_recognize(const std::string& memory, const CommonEncodingOpts& opts,
                  double min_confidence, bool strict, const std::string& out_path) {
    const qam::Hologram holo = qam::Hologram::load(memory);
    const auto raws = load_patterns(opts.input);
    OutputTarget out(out_path);
    bool any_ambiguous = false;
    for (std::size_t i = 0; i < raws.size(); ++i) {
        const qam::StatePattern probe =
            encode_one(raws[i], opts.encoding, opts.threshold);
        const qam::Recognition r = holo.recognize(probe.amplitudes, min_confidence);
        any_ambiguous = any_ambiguous || !r.recognized;
        json j = report_json(r.report, holo);
        j["input"] = i;
        j["recognized"] = r.recognized;
        out.stream() << j.dump() << '\n';
    }
    return strict && any_ambiguous ? 1 : 0;
}

int cmd_info(const std::string& memory, bool as_json) {
    const qam::Hologram holo = qam::Hologram::load(memory);
    if (as_json) {
        json j{{"N", holo.dimension()},
               {"P", holo.pattern_count()},
               {"trace", holo.trace_real()},
               {"hermiticity_residual", holo.hermiticity_residual()},
               {"labels", holo.labels()}};
        std::cout << j.dump(2) << '\n';
        return 0;
    }
    std::cout << "dimension:            " << holo.dimension() << '\n'
              << "patterns:             " << holo.pattern_count() << '\n'
              << "trace:                " << fmt(holo.trace_real()) << '\n'
              << "hermiticity residual: " << fmt(holo.hermiticity_residual()) << '\n';
    for (std::size_t k = 0; k < holo.pattern_count(); ++k)
        if (!holo.label(k).empty())
            std::cout << "label[" << k << "]: " << holo.label(k) << '\n';
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"complex-valued Hopfield associative memory toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "qam 1.0.0");

    // encode
    CommonEncodingOpts encode_opts;
    std::string encode_out;
    bool encode_json = false;
    auto* encode_cmd = app.add_subcommand("encode", "encode raw patterns as states");
    encode_cmd->add_option("--input", encode_opts.input, "CSV or PGM input")->required();
    add_encoding_flags(encode_cmd, encode_opts);
    encode_cmd->add_option("--out", encode_out, "write data here instead of stdout");
    encode_cmd->add_flag("--json", encode_json, "emit JSON instead of CSV");

    // build
    CommonEncodingOpts build_opts;
    std::string build_labels, build_out;
    bool build_json = false;
    auto* build_cmd = app.add_subcommand("build", "store patterns in a memory file");
    build_cmd->add_option("--patterns", build_opts.input, "CSV or PGM input")->required();
    add_encoding_flags(build_cmd, build_opts);
    build_cmd->add_option("--labels", build_labels, "optional label file, one per line");
    build_cmd->add_option("--out", build_out, "memory file to write")->required();
    build_cmd->add_flag("--json", build_json, "print a JSON summary to stdout");

    // recall
    CommonEncodingOpts recall_opts;
    std::string recall_memory, recall_method = "dense", recall_out;
    bool recall_json = false;
    auto* recall_cmd = app.add_subcommand("recall", "raw superposition output for probes");
    recall_cmd->add_option("--memory", recall_memory, "memory file")->required();
    recall_cmd->add_option("--input", recall_opts.input, "CSV or PGM probes")->required();
    add_encoding_flags(recall_cmd, recall_opts);
    recall_cmd->add_option("--method", recall_method, "dense or lazy (default dense)")
        ->check(CLI::IsMember({"dense", "lazy"}));
    recall_cmd->add_option("--out", recall_out, "write data here instead of stdout");
    recall_cmd->add_flag("--json", recall_json, "emit JSON instead of CSV");

    // recognize
    CommonEncodingOpts recog_opts;
    std::string recog_memory, recog_out;
    double recog_min_confidence = 0.8;
    bool recog_strict = false;
    auto* recog_cmd = app.add_subcommand("recognize", "classify probes by overlap");
    recog_cmd->add_option("--memory", recog_memory, "memory file")->required();
    recog_cmd->add_option("--input", recog_opts.input, "CSV or PGM probes")->required();
    add_encoding_flags(recog_cmd, recog_opts);
    recog_cmd->add_option("--min-confidence", recog_min_confidence,
                          "recognition threshold (default 0.8)")
        ->check(CLI::Range(0.0, 1.0));
    recog_cmd->add_flag("--strict", recog_strict, "exit 1 if any probe is ambiguous");
    recog_cmd->add_option("--out", recog_out, "write data here instead of stdout");

    // bench family
    struct BenchOpts {
        std::string config, out;
        std::optional<std::uint64_t> seed;
        bool json = false;
    };
    BenchOpts capacity_opts, noise_opts, equiv_opts, timing_opts;
    auto add_bench_flags = [](CLI::App* cmd, BenchOpts& opts, bool with_json) {
        cmd->add_option("--config", opts.config, "experiment config JSON")->required();
        cmd->add_option("--seed", opts.seed, "override the config/env seed");
        cmd->add_option("--out", opts.out, "write data here instead of stdout");
        if (with_json)
            cmd->add_flag("--json", opts.json, "emit the JSON report instead of CSV");
    };
    auto* capacity_cmd = app.add_subcommand(
        "bench-capacity", "recognition accuracy as stored patterns increase");
    add_bench_flags(capacity_cmd, capacity_opts, true);
    auto* noise_cmd = app.add_subcommand(
        "bench-noise", "recognition accuracy under phase jitter");
    add_bench_flags(noise_cmd, noise_opts, true);
    auto* equiv_cmd = app.add_subcommand(
        "check-equivalence", "amplitude vs phase model agreement");
    add_bench_flags(equiv_cmd, equiv_opts, false);
    auto* timing_cmd = app.add_subcommand(
        "bench-timing", "dense vs lazy recall wall times");
    add_bench_flags(timing_cmd, timing_opts, true);

    // info
    std::string info_memory;
    bool info_json = false;
    auto* info_cmd = app.add_subcommand("info", "inspect a memory file");
    info_cmd->add_option("--memory", info_memory, "memory file")->required();
    info_cmd->add_flag("--json", info_json, "emit JSON");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }

    try {
        if (encode_cmd->parsed())
            return cmd_encode(encode_opts, encode_out, encode_json);
        if (build_cmd->parsed())
            return cmd_build(build_opts, build_labels, build_out, build_json);
        if (recall_cmd->parsed())
            return cmd_recall(recall_memory, recall_opts, recall_method, recall_out,
                              recall_json);
        if (recog_cmd->parsed())
            return cmd_recognize(recog_memory, recog_opts, recog_min_confidence,
                                 recog_strict, recog_out);
        if (capacity_cmd->parsed() || noise_cmd->parsed()) {
            const BenchOpts& opts = capacity_cmd->parsed() ? capacity_opts : noise_opts;
            const qam::ExperimentConfig cfg = load_config(opts.config, opts.seed);
            if (noise_cmd->parsed() &&
                cfg.noise_levels == std::vector<double>{0.0})
                std::cerr << "note: bench-noise with only noise level 0; "
                             "set noise_levels in the config\n";
            const qam::ExperimentResult result = qam::run_capacity_sweep(cfg);
            OutputTarget out(opts.out);
            if (opts.json)
                out.stream() << result.to_json().dump(2) << '\n';
            else
                result.write_csv(out.stream());
            return 0;
        }
        if (equiv_cmd->parsed()) {
            const qam::ExperimentConfig cfg = load_config(equiv_opts.config, equiv_opts.seed);
            const qam::EquivalenceReport report = qam::run_equivalence_check(cfg);
            OutputTarget out(equiv_opts.out);
            out.stream() << report.to_json().dump(2) << '\n';
            if (!report.bipolar_exact()) {
                std::cerr << "error: bipolar equivalence violated\n";
                return 1;
            }
            return 0;
        }
        if (timing_cmd->parsed()) {
            const qam::ExperimentConfig cfg = load_config(timing_opts.config, timing_opts.seed);
            const qam::TimingReport report = qam::run_timing(cfg);
            OutputTarget out(timing_opts.out);
            if (timing_opts.json)
                out.stream() << report.to_json().dump(2) << '\n';
            else
                report.write_csv(out.stream());
            return 0;
        }
        if (info_cmd->parsed()) return cmd_info(info_memory, info_json);
    } catch (const qam::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 2;
}
