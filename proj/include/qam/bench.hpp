#pragma once

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "qam/encode.hpp"
#include "qam/errors.hpp"
#include "qam/hologram.hpp"
#include "qam/rng.hpp"
#include "qam/types.hpp"

namespace qam {

inline constexpr std::size_t max_dimension = 1u << 20;
inline constexpr std::size_t max_pattern_count = 4096;

/// One experiment grid: every listed pattern count crossed with every
/// noise level, `trials` independent repetitions per cell. Sweeps read
/// noise levels as phase jitter in radians; the equivalence check reads
/// them as relative data-space perturbation (and, for the bipolar
/// sub-check, as the fraction of units flipped).
struct ExperimentConfig {
    std::uint64_t seed = 0;
    std::size_t dimension = 64;                 // JSON key "N"
    std::vector<std::size_t> pattern_counts;    // JSON key "P_values"
    std::vector<double> noise_levels{0.0};
    std::size_t trials = 1;
    double min_confidence = 0.8;

    void validate() const {
        if (dimension == 0 || dimension > max_dimension)
            throw DomainError("config: N must lie in [1, " + std::to_string(max_dimension) + "]");
        if (pattern_counts.empty())
            throw DomainError("config: P_values must be non-empty");
        for (std::size_t p : pattern_counts)
            if (p == 0 || p > max_pattern_count)
                throw DomainError("config: every P must lie in [1, " +
                                  std::to_string(max_pattern_count) + "]");
        if (noise_levels.empty())
            throw DomainError("config: noise_levels must be non-empty");
        for (double x : noise_levels)
            if (!std::isfinite(x) || x < 0.0)
                throw DomainError("config: noise levels must be finite and non-negative");
        if (trials == 0)
            throw DomainError("config: trials must be >= 1");
        if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
            throw DomainError("config: min_confidence must lie in [0, 1]");
    }
};

inline void to_json(nlohmann::json& j, const ExperimentConfig& cfg) {
    j = nlohmann::json{{"seed", cfg.seed},
                       {"N", cfg.dimension},
                       {"P_values", cfg.pattern_counts},
                       {"noise_levels", cfg.noise_levels},
                       {"trials", cfg.trials},
                       {"min_confidence", cfg.min_confidence}};
}

inline void from_json(const nlohmann::json& j, ExperimentConfig& cfg) {
    cfg = ExperimentConfig{};
    if (j.contains("seed")) j.at("seed").get_to(cfg.seed);
    j.at("N").get_to(cfg.dimension);
    j.at("P_values").get_to(cfg.pattern_counts);
    if (j.contains("noise_levels")) j.at("noise_levels").get_to(cfg.noise_levels);
    j.at("trials").get_to(cfg.trials);
    if (j.contains("min_confidence")) j.at("min_confidence").get_to(cfg.min_confidence);
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

inline std::uint64_t checked_ns(std::chrono::steady_clock::time_point t0,
                                std::chrono::steady_clock::time_point t1) {
    const auto d = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
    return d < 0 ? 0 : static_cast<std::uint64_t>(d);
}

} // namespace detail

/// P random phase patterns with i.i.d. phases uniform on [0, 2*pi) and
/// constant modulus 1/sqrt(N). One Xoshiro256** stream seeded with `seed`;
/// phases are drawn pattern-major, unit-minor, one draw per unit, so the
/// output is reproducible bit for bit from the seed alone.
inline std::vector<StatePattern> gen_random_phase_patterns(std::uint64_t seed,
                                                           std::size_t dimension,
                                                           std::size_t count) {
    if (dimension == 0 || count == 0)
        throw DomainError("gen_random_phase_patterns: N and P must be >= 1");
    Xoshiro256StarStar rng(seed);
    std::vector<StatePattern> patterns;
    patterns.reserve(count);
    std::vector<double> phases(dimension);
    for (std::size_t k = 0; k < count; ++k) {
        for (double& phi : phases) phi = rng.next_phase();
        patterns.push_back(phase_state(phases));
    }
    return patterns;
}

/// Adds i.i.d. uniform jitter on [-jitter, +jitter] to every phase of a
/// unit-modulus (Phase or Bipolar) state and rebuilds it at norm 1. The
/// result is Phase-kind; zero jitter returns the input unchanged.
inline StatePattern perturb_phases(const StatePattern& p, double jitter_radians,
                                   std::uint64_t seed) {
    if (p.kind == EncodingKind::Amplitude)
        throw DomainError("perturb_phases: amplitude-kind states have no phase encoding");
    if (!(jitter_radians >= 0.0) || !std::isfinite(jitter_radians))
        throw DomainError("perturb_phases: jitter must be finite and non-negative");
    if (jitter_radians == 0.0) return p;
    Xoshiro256StarStar rng(seed);
    std::vector<double> phases;
    phases.reserve(p.amplitudes.size());
    for (const Complex& z : p.amplitudes)
        phases.push_back(std::arg(z) + rng.next_symmetric(jitter_radians));
    return phase_state(phases);
}

/// One (P, noise, trial) outcome. `correct` is true only if every stored
/// pattern, probed with the trial's jitter, was recognized under its own
/// index; confidence and margin are means over those P probes. The *_ns
/// fields are wall-clock sums over the trial's probes and are excluded
/// from the determinism contract.
struct TrialRecord {
    std::size_t pattern_count = 0;
    double noise = 0.0;
    std::size_t trial = 0;
    bool correct = false;
    double confidence = 0.0;
    double margin = 0.0;
    std::uint64_t dense_ns = 0;
    std::uint64_t lazy_ns = 0;
};

struct CellSummary {
    std::size_t pattern_count = 0;
    double noise = 0.0;
    std::size_t trials = 0;
    double accuracy = 0.0;
    double mean_confidence = 0.0;
    double mean_margin = 0.0;
    double margin_se = 0.0;
    double wilson_low = 0.0;
    double wilson_high = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::vector<TrialRecord> records;

    std::vector<CellSummary> summary() const {
        std::vector<CellSummary> cells;
        for (std::size_t p : config.pattern_counts) {
            for (double noise : config.noise_levels) {
                CellSummary cell;
                cell.pattern_count = p;
                cell.noise = noise;
                std::vector<double> margins;
                std::size_t correct = 0;
                for (const TrialRecord& r : records) {
                    if (r.pattern_count != p || r.noise != noise) continue;
                    ++cell.trials;
                    correct += r.correct ? 1 : 0;
                    cell.mean_confidence += r.confidence;
                    margins.push_back(r.margin);
                }
                if (cell.trials == 0) continue;
                const auto n = static_cast<double>(cell.trials);
                cell.accuracy = static_cast<double>(correct) / n;
                cell.mean_confidence /= n;
                cell.mean_margin =
                    std::accumulate(margins.begin(), margins.end(), 0.0) / n;
                double var = 0.0;
                for (double m : margins)
                    var += (m - cell.mean_margin) * (m - cell.mean_margin);
                cell.margin_se = cell.trials > 1
                                     ? std::sqrt(var / (n - 1.0) / n)
                                     : 0.0;
                // Wilson 95% interval for the trial-level accuracy
                const double z = 1.959963984540054;
                const double z2 = z * z;
                const double center = (cell.accuracy + z2 / (2.0 * n)) / (1.0 + z2 / n);
                const double half =
                    z *
                    std::sqrt(cell.accuracy * (1.0 - cell.accuracy) / n +
                              z2 / (4.0 * n * n)) /
                    (1.0 + z2 / n);
                cell.wilson_low = std::max(0.0, center - half);
                cell.wilson_high = std::min(1.0, center + half);
                cells.push_back(cell);
            }
        }
        return cells;
    }

    static constexpr const char* csv_header =
        "P,noise,trial,correct,confidence,margin,dense_ns,lazy_ns";

    void write_csv(std::ostream& out) const {
        out << csv_header << '\n';
        for (const TrialRecord& r : records) {
            out << r.pattern_count << ',' << detail::format_double(r.noise) << ','
                << r.trial << ',' << (r.correct ? 1 : 0) << ','
                << detail::format_double(r.confidence) << ','
                << detail::format_double(r.margin) << ',' << r.dense_ns << ','
                << r.lazy_ns << '\n';
        }
    }

    nlohmann::json to_json(bool include_timings = true) const {
        nlohmann::json records_json = nlohmann::json::array();
        for (const TrialRecord& r : records) {
            nlohmann::json jr{{"P", r.pattern_count}, {"noise", r.noise},
                              {"trial", r.trial},     {"correct", r.correct},
                              {"confidence", r.confidence}, {"margin", r.margin}};
            if (include_timings) {
                jr["dense_ns"] = r.dense_ns;
                jr["lazy_ns"] = r.lazy_ns;
            }
            records_json.push_back(std::move(jr));
        }
        nlohmann::json summary_json = nlohmann::json::array();
        for (const CellSummary& c : summary()) {
            summary_json.push_back({{"P", c.pattern_count},
                                    {"noise", c.noise},
                                    {"trials", c.trials},
                                    {"accuracy", c.accuracy},
                                    {"mean_confidence", c.mean_confidence},
                                    {"mean_margin", c.mean_margin},
                                    {"margin_se", c.margin_se},
                                    {"wilson_low", c.wilson_low},
                                    {"wilson_high", c.wilson_high}});
        }
        return {{"config", config}, {"records", std::move(records_json)},
                {"summary", std::move(summary_json)}};
    }
};

// Seed discipline for the sweep, shared with any external re-implementation
// (oracles must reproduce it to match trial for trial):
//   trial_seed          = derive_seed(cfg.seed, p_index, noise_index, trial)
//   pattern generation  = gen_random_phase_patterns(trial_seed, N, P)
//   probe k jitter      = perturb_phases(pattern_k, noise, derive_seed(trial_seed, k + 1))

/// Capacity/noise sweep: per trial, stores P fresh random phase patterns,
/// probes with each stored pattern under the cell's phase jitter, and
/// records whether every probe was recognized under its own index.
inline ExperimentResult run_capacity_sweep(const ExperimentConfig& cfg) {
    cfg.validate();
    ExperimentResult result;
    result.config = cfg;
    result.records.reserve(cfg.pattern_counts.size() * cfg.noise_levels.size() *
                           cfg.trials);
    for (std::size_t pi = 0; pi < cfg.pattern_counts.size(); ++pi) {
        const std::size_t p = cfg.pattern_counts[pi];
        for (std::size_t ni = 0; ni < cfg.noise_levels.size(); ++ni) {
            const double noise = cfg.noise_levels[ni];
            for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
                const std::uint64_t trial_seed = derive_seed(cfg.seed, pi, ni, trial);
                const auto patterns =
                    gen_random_phase_patterns(trial_seed, cfg.dimension, p);
                const Hologram holo = Hologram::build(patterns);

                TrialRecord rec;
                rec.pattern_count = p;
                rec.noise = noise;
                rec.trial = trial;
                rec.correct = true;
                for (std::size_t k = 0; k < p; ++k) {
                    const StatePattern probe = perturb_phases(
                        patterns[k], noise, derive_seed(trial_seed, k + 1));
                    const Recognition r =
                        holo.recognize(probe.amplitudes, cfg.min_confidence);
                    rec.correct = rec.correct && r.recognized && r.report.winner == k;
                    rec.confidence += r.report.confidence;
                    rec.margin += r.report.margin;

                    auto t0 = std::chrono::steady_clock::now();
                    const ComplexVec dense = holo.recall_dense(probe.amplitudes);
                    auto t1 = std::chrono::steady_clock::now();
                    const ComplexVec lazy = holo.recall_lazy(probe.amplitudes);
                    auto t2 = std::chrono::steady_clock::now();
                    rec.dense_ns += detail::checked_ns(t0, t1);
                    rec.lazy_ns += detail::checked_ns(t1, t2);
                    // outputs must be consumed or the timed calls can be elided
                    if (dense.size() != lazy.size())
                        throw Error("recall paths disagree on dimension");
                }
                rec.confidence /= static_cast<double>(p);
                rec.margin /= static_cast<double>(p);
                result.records.push_back(rec);
            }
        }
    }
    return result;
}

struct EquivalenceCell {
    std::size_t pattern_count = 0;
    double noise = 0.0;
    std::size_t probes = 0;
    std::size_t agreed = 0;
    double agreement_rate = 0.0;
};

/// Report of the two encoding-equivalence sub-checks: the bipolar exact
/// identity (amplitude +-1/sqrt(N) versus phases {0, pi} must match bit for
/// bit, files and decisions alike) and the measured winner-agreement rate
/// between the amplitude and sigmoid-phase models on general real data.
struct EquivalenceReport {
    ExperimentConfig config;
    std::size_t bipolar_sets = 0;
    std::size_t bipolar_identical_files = 0;
    std::size_t bipolar_identical_decisions = 0;
    std::vector<EquivalenceCell> general;

    bool bipolar_exact() const {
        return bipolar_identical_files == bipolar_sets &&
               bipolar_identical_decisions == bipolar_sets;
    }

    nlohmann::json to_json() const {
        nlohmann::json cells = nlohmann::json::array();
        for (const EquivalenceCell& c : general) {
            cells.push_back({{"P", c.pattern_count},
                             {"noise", c.noise},
                             {"probes", c.probes},
                             {"agreed", c.agreed},
                             {"agreement_rate", c.agreement_rate}});
        }
        return {{"config", config},
                {"bipolar",
                 {{"sets", bipolar_sets},
                  {"identical_files", bipolar_identical_files},
                  {"identical_decisions", bipolar_identical_decisions},
                  {"exact", bipolar_exact()}}},
                {"general", std::move(cells)}};
    }
};

namespace detail {

inline RawPattern random_bipolar_raw(Xoshiro256StarStar& rng, std::size_t n) {
    RawPattern p;
    p.values.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        p.values.push_back(rng.next_unit() < 0.5 ? -1.0 : 1.0);
    return p;
}

// Flips `flips` distinct units chosen by a partial Fisher-Yates shuffle.
inline RawPattern flip_units(const RawPattern& p, std::size_t flips,
                             Xoshiro256StarStar& rng) {
    RawPattern out = p;
    std::vector<std::size_t> idx(p.values.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < flips && i < idx.size(); ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(rng.next_unit() * static_cast<double>(idx.size() - i));
        std::swap(idx[i], idx[j]);
        out.values[idx[i]] = -out.values[idx[i]];
    }
    return out;
}

} // namespace detail

/// Runs both equivalence sub-checks. Bipolar sub-check: per (P, trial),
/// a random +-1 corpus is encoded as amplitudes and as {0, pi} phases;
/// memory files must be byte-identical and recognize decisions (on stored
/// patterns plus sign-flip noise per noise level, fraction of units
/// flipped) must match exactly. General sub-check: random real corpora
/// are run through the amplitude model and the sigmoid-phase model; the
/// winner-agreement rate per (P, noise) cell is reported as data, with
/// probes perturbed additively by noise * std(pattern) per unit.
inline EquivalenceReport run_equivalence_check(const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.dimension < 2)
        throw DomainError("config: the equivalence check needs N >= 2 "
                          "(single-unit patterns are constant)");
    EquivalenceReport report;
    report.config = cfg;

    // (a) bipolar exact identity
    for (std::size_t pi = 0; pi < cfg.pattern_counts.size(); ++pi) {
        const std::size_t p = cfg.pattern_counts[pi];
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const std::uint64_t set_seed = derive_seed(cfg.seed, 1, pi, trial);
            Xoshiro256StarStar rng(set_seed);
            std::vector<RawPattern> raw;
            raw.reserve(p);
            for (std::size_t k = 0; k < p; ++k)
                raw.push_back(detail::random_bipolar_raw(rng, cfg.dimension));

            std::vector<StatePattern> as_amplitude, as_phase;
            for (const RawPattern& r : raw) {
                as_amplitude.push_back(amplitude_encode(r));
                as_phase.push_back(bipolar_encode(r, 0.0));
            }
            const Hologram holo_a = Hologram::build(as_amplitude);
            const Hologram holo_p = Hologram::build(as_phase);

            ++report.bipolar_sets;
            if (holo_a.to_bytes() == holo_p.to_bytes())
                ++report.bipolar_identical_files;

            bool decisions_equal = true;
            for (std::size_t k = 0; k < p; ++k) {
                for (double noise : cfg.noise_levels) {
                    const auto flips = static_cast<std::size_t>(
                        noise * static_cast<double>(cfg.dimension));
                    const RawPattern probe_raw = detail::flip_units(raw[k], flips, rng);
                    const Recognition ra = holo_a.recognize(
                        amplitude_encode(probe_raw).amplitudes, cfg.min_confidence);
                    const Recognition rp = holo_p.recognize(
                        bipolar_encode(probe_raw, 0.0).amplitudes, cfg.min_confidence);
                    decisions_equal = decisions_equal &&
                                      ra.recognized == rp.recognized &&
                                      ra.report.winner == rp.report.winner;
                }
            }
            if (decisions_equal) ++report.bipolar_identical_decisions;
        }
    }

    // (b) general-data agreement, measured not asserted
    for (std::size_t pi = 0; pi < cfg.pattern_counts.size(); ++pi) {
        const std::size_t p = cfg.pattern_counts[pi];
        for (std::size_t ni = 0; ni < cfg.noise_levels.size(); ++ni) {
            const double noise = cfg.noise_levels[ni];
            EquivalenceCell cell;
            cell.pattern_count = p;
            cell.noise = noise;
            for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
                const std::uint64_t set_seed = derive_seed(cfg.seed, 2 + pi, ni, trial);
                Xoshiro256StarStar rng(set_seed);
                std::vector<RawPattern> raw(p);
                for (RawPattern& r : raw) {
                    r.values.resize(cfg.dimension);
                    for (double& v : r.values) v = rng.next_unit();
                }
                std::vector<StatePattern> as_amplitude, as_phase;
                for (const RawPattern& r : raw) {
                    as_amplitude.push_back(amplitude_encode(r));
                    as_phase.push_back(phase_encode(r));
                }
                const Hologram holo_a = Hologram::build(as_amplitude);
                const Hologram holo_p = Hologram::build(as_phase);

                for (std::size_t k = 0; k < p; ++k) {
                    RawPattern probe = raw[k];
                    const PatternStats stats = pattern_stats(probe);
                    for (double& v : probe.values)
                        v += rng.next_symmetric(noise * stats.std_dev);
                    const OverlapReport oa =
                        holo_a.overlaps(amplitude_encode(probe).amplitudes);
                    const OverlapReport op =
                        holo_p.overlaps(phase_encode(probe).amplitudes);
                    ++cell.probes;
                    if (oa.winner == op.winner) ++cell.agreed;
                }
            }
            cell.agreement_rate = cell.probes == 0
                                      ? 0.0
                                      : static_cast<double>(cell.agreed) /
                                            static_cast<double>(cell.probes);
            report.general.push_back(cell);
        }
    }
    return report;
}

struct TimingRow {
    std::size_t dimension = 0;
    std::size_t pattern_count = 0;
    std::size_t trials = 0;
    std::uint64_t dense_ns_median = 0;
    std::uint64_t lazy_ns_median = 0;
    std::uint64_t dense_values = 0; ///< distinct complex values read: N*N + N
    std::uint64_t lazy_values = 0;  ///< distinct complex values read: P*N + N + P
    double max_rel_diff = 0.0;
};

struct TimingReport {
    ExperimentConfig config;
    std::vector<TimingRow> rows;

    static constexpr const char* csv_header =
        "N,P,trials,dense_ns_median,lazy_ns_median,dense_values,lazy_values,max_rel_diff";

    void write_csv(std::ostream& out) const {
        out << csv_header << '\n';
        for (const TimingRow& r : rows) {
            out << r.dimension << ',' << r.pattern_count << ',' << r.trials << ','
                << r.dense_ns_median << ',' << r.lazy_ns_median << ','
                << r.dense_values << ',' << r.lazy_values << ','
                << detail::format_double(r.max_rel_diff) << '\n';
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json rows_json = nlohmann::json::array();
        for (const TimingRow& r : rows) {
            rows_json.push_back({{"N", r.dimension},
                                 {"P", r.pattern_count},
                                 {"trials", r.trials},
                                 {"dense_ns_median", r.dense_ns_median},
                                 {"lazy_ns_median", r.lazy_ns_median},
                                 {"dense_values", r.dense_values},
                                 {"lazy_values", r.lazy_values},
                                 {"max_rel_diff", r.max_rel_diff}});
        }
        return {{"config", config}, {"rows", std::move(rows_json)}};
    }
};

namespace detail {

inline double componentwise_rel_diff(std::span<const Complex> a,
                                     std::span<const Complex> b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = std::abs(a[i] - b[i]);
        const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
        // near-zero components are compared absolutely to dodge 0/0
        const double rel = diff <= 1e-12 ? 0.0 : diff / scale;
        if (rel > worst) worst = rel;
    }
    return worst;
}

} // namespace detail

/// Times dense versus lazy recall per (N, P) cell and asserts only that
/// the two outputs agree within 1e-10 componentwise relative error; the
/// wall-clock medians and per-path operand counts are reported as data.
inline TimingReport run_timing(const ExperimentConfig& cfg) {
    cfg.validate();
    TimingReport report;
    report.config = cfg;
    for (std::size_t pi = 0; pi < cfg.pattern_counts.size(); ++pi) {
        const std::size_t p = cfg.pattern_counts[pi];
        const std::uint64_t cell_seed = derive_seed(cfg.seed, pi);
        const auto patterns = gen_random_phase_patterns(cell_seed, cfg.dimension, p);
        const Hologram holo = Hologram::build(patterns);

        TimingRow row;
        row.dimension = cfg.dimension;
        row.pattern_count = p;
        row.trials = cfg.trials;
        const auto n64 = static_cast<std::uint64_t>(cfg.dimension);
        const auto p64 = static_cast<std::uint64_t>(p);
        row.dense_values = n64 * n64 + n64;
        row.lazy_values = p64 * n64 + n64 + p64;

        std::vector<std::uint64_t> dense_ns, lazy_ns;
        dense_ns.reserve(cfg.trials);
        lazy_ns.reserve(cfg.trials);
        for (std::size_t trial = 0; trial < cfg.trials; ++trial) {
            const auto probe = gen_random_phase_patterns(
                derive_seed(cell_seed, trial + 1), cfg.dimension, 1);
            const auto& input = probe[0].amplitudes;
            const auto t0 = std::chrono::steady_clock::now();
            const ComplexVec dense = holo.recall_dense(input);
            const auto t1 = std::chrono::steady_clock::now();
            const ComplexVec lazy = holo.recall_lazy(input);
            const auto t2 = std::chrono::steady_clock::now();
            dense_ns.push_back(detail::checked_ns(t0, t1));
            lazy_ns.push_back(detail::checked_ns(t1, t2));
            const double rel = detail::componentwise_rel_diff(dense, lazy);
            if (rel > 1e-10)
                throw Error("recall paths disagree: relative error " +
                            detail::format_double(rel));
            row.max_rel_diff = std::max(row.max_rel_diff, rel);
        }
        std::sort(dense_ns.begin(), dense_ns.end());
        std::sort(lazy_ns.begin(), lazy_ns.end());
        row.dense_ns_median = dense_ns[dense_ns.size() / 2];
        row.lazy_ns_median = lazy_ns[lazy_ns.size() / 2];
        report.rows.push_back(row);
    }
    return report;
}

} // namespace qam
