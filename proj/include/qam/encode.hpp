#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <string>

#include "qam/errors.hpp"
#include "qam/types.hpp"

namespace qam {

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Phases this close to 0 or 2*pi are treated as saturated by decode_phase.
inline constexpr double phase_saturation_tol = 1e-12;

namespace detail {

inline void require_valid(const RawPattern& p, const char* op) {
    if (p.values.empty())
        throw DomainError(std::string(op) + ": empty pattern");
    for (std::size_t j = 0; j < p.values.size(); ++j) {
        if (!std::isfinite(p.values[j]))
            throw DomainError(std::string(op) + ": non-finite value at index " +
                              std::to_string(j));
    }
}

} // namespace detail

/// Unit phasor e^{i*phi}. Exact at phi == 0 and phi == pi, so states built
/// from the phases {0, pi} carry components exactly +-1 and coincide bit for
/// bit with their amplitude-encoded form.
inline Complex unit_phasor(double phi) noexcept {
    if (phi == 0.0) return {1.0, 0.0};
    if (phi == std::numbers::pi) return {-1.0, 0.0};
    return {std::cos(phi), std::sin(phi)};
}

namespace detail {

inline ComplexVec unit_state(std::span<const double> phases) {
    const double root_n = std::sqrt(static_cast<double>(phases.size()));
    ComplexVec amps;
    amps.reserve(phases.size());
    for (double phi : phases) amps.push_back(unit_phasor(phi) / root_n);
    return amps;
}

} // namespace detail

/// Mean and population standard deviation (divide by N) of one pattern.
inline PatternStats pattern_stats(const RawPattern& p) {
    detail::require_valid(p, "pattern_stats");
    const auto n = static_cast<double>(p.values.size());
    double sum = 0.0;
    for (double v : p.values) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : p.values) sq += (v - mean) * (v - mean);
    return {mean, std::sqrt(sq / n)};
}

/// Sigmoidal map from a data value to a phase in (0, 2*pi):
///
///     phi = 2*pi / (1 + exp((mean - v) / std))
///
/// Strictly increasing in v, with phi(mean) == pi. In floating point the
/// map saturates to the interval endpoints once the exponential leaves
/// double range relative to 1 (|v - mean| beyond roughly 37 standard
/// deviations), where decode_phase reports saturation.
inline double sigmoid_phase_map(double v, const PatternStats& stats) {
    if (!(stats.std_dev > 0.0))
        throw DomainError("sigmoid_phase_map: constant pattern (std = 0); "
                          "encode constant patterns with uniform phase pi instead");
    return two_pi / (1.0 + std::exp((stats.mean - v) / stats.std_dev));
}

/// Builds a Phase-kind state e^{i*phi_j} / sqrt(N) from explicit phases.
inline StatePattern phase_state(std::span<const double> phases) {
    if (phases.empty()) throw DomainError("phase_state: empty phase vector");
    return {detail::unit_state(phases), EncodingKind::Phase};
}

/// Sigmoid-phase encoding: phi_j = sigmoid_phase_map(v_j, pattern_stats(p)).
/// Fails on constant patterns (std = 0).
inline StatePattern phase_encode(const RawPattern& p) {
    detail::require_valid(p, "phase_encode");
    const PatternStats stats = pattern_stats(p);
    std::vector<double> phases;
    phases.reserve(p.values.size());
    for (double v : p.values) phases.push_back(sigmoid_phase_map(v, stats));
    return {detail::unit_state(phases), EncodingKind::Phase};
}

/// Amplitude encoding: psi_j = v_j / ||v|| as real-valued complex numbers.
inline StatePattern amplitude_encode(const RawPattern& p) {
    detail::require_valid(p, "amplitude_encode");
    const double norm = euclidean_norm(std::span<const double>(p.values));
    if (norm == 0.0) throw DomainError("amplitude_encode: zero-norm pattern");
    if (!std::isfinite(norm))
        throw DomainError("amplitude_encode: pattern norm overflows");
    StatePattern s;
    s.kind = EncodingKind::Amplitude;
    s.amplitudes.reserve(p.values.size());
    for (double v : p.values) s.amplitudes.emplace_back(v / norm, 0.0);
    return s;
}

/// Thresholding to +-1/sqrt(N): v_j >= threshold maps to phase 0 (+1),
/// v_j < threshold to phase pi (-1). Ties at the threshold map to +1.
inline StatePattern bipolar_encode(const RawPattern& p, double threshold) {
    detail::require_valid(p, "bipolar_encode");
    if (!std::isfinite(threshold))
        throw DomainError("bipolar_encode: non-finite threshold");
    std::vector<double> phases;
    phases.reserve(p.values.size());
    for (double v : p.values)
        phases.push_back(v >= threshold ? 0.0 : std::numbers::pi);
    return {detail::unit_state(phases), EncodingKind::Bipolar};
}

/// Inverts phase_encode given the original pattern's statistics:
///
///     v_j = mean - std * ln(2*pi / phi_j - 1)
///
/// where phi_j = arg(psi_j) folded into (0, 2*pi] by adding 2*pi to
/// non-positive arguments. Phases within phase_saturation_tol of 0 or 2*pi
/// are rejected as saturated. Relative accuracy degrades as phases approach
/// the endpoints (the logarithm amplifies rounding in 2*pi/phi - 1).
inline RawPattern decode_phase(const StatePattern& s, const PatternStats& stats) {
    if (s.kind != EncodingKind::Phase)
        throw DomainError("decode_phase: state is not phase-encoded");
    if (!(stats.std_dev > 0.0))
        throw DomainError("decode_phase: stats with std = 0 cannot be inverted");
    RawPattern out;
    out.values.reserve(s.amplitudes.size());
    for (std::size_t j = 0; j < s.amplitudes.size(); ++j) {
        double phi = std::arg(s.amplitudes[j]);
        if (phi <= 0.0) phi += two_pi;
        if (phi <= phase_saturation_tol || phi >= two_pi - phase_saturation_tol)
            throw DomainError("decode_phase: saturated phase at index " +
                              std::to_string(j));
        out.values.push_back(stats.mean - stats.std_dev * std::log(two_pi / phi - 1.0));
    }
    return out;
}

} // namespace qam
