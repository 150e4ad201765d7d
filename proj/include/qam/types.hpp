#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qam {

using Complex = std::complex<double>;
using ComplexVec = std::vector<Complex>;

/// How a StatePattern was produced from raw data.
enum class EncodingKind {
    Amplitude, ///< real-valued components v / ||v||
    Bipolar,   ///< components +-1/sqrt(N), i.e. phases restricted to {0, pi}
    Phase,     ///< unit-modulus components e^{i phi} / sqrt(N)
};

constexpr const char* to_string(EncodingKind k) noexcept {
    switch (k) {
    case EncodingKind::Amplitude: return "amplitude";
    case EncodingKind::Bipolar: return "bipolar";
    case EncodingKind::Phase: return "phase";
    }
    return "?";
}

/// A vector of real data values, one per unit, before any encoding.
struct RawPattern {
    std::vector<double> values;
    std::optional<std::string> label;

    std::size_t size() const noexcept { return values.size(); }
};

/// Mean and population standard deviation of one pattern's values.
struct PatternStats {
    double mean = 0.0;
    double std_dev = 0.0; ///< sqrt((1/N) sum (v - mean)^2), never negative
};

/// A normalized complex state vector of dimension N.
///
/// Every encoder produces unit Euclidean norm (within 1e-12); Phase and
/// Bipolar states additionally have all component moduli equal to 1/sqrt(N).
struct StatePattern {
    ComplexVec amplitudes;
    EncodingKind kind = EncodingKind::Amplitude;

    std::size_t size() const noexcept { return amplitudes.size(); }
};

inline double euclidean_norm(std::span<const Complex> v) noexcept {
    double sum = 0.0;
    for (const Complex& z : v) sum += std::norm(z);
    return std::sqrt(sum);
}

inline double euclidean_norm(std::span<const double> v) noexcept {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum);
}

} // namespace qam
