#pragma once

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qam/errors.hpp"
#include "qam/types.hpp"

namespace qam {

/// Norm slack accepted on states entering build() and overlaps().
inline constexpr double norm_check_tol = 1e-9;

namespace detail {

// CRC-32 (IEEE 802.3, reflected polynomial 0xEDB88320), table-driven.
// Check value: crc32 of "123456789" is 0xCBF43926.
constexpr std::array<std::uint32_t, 256> make_crc32_table() {
    std::array<std::uint32_t, 256> table{};
    for (std::uint32_t i = 0; i < 256; ++i) {
        std::uint32_t c = i;
        for (int bit = 0; bit < 8; ++bit)
            c = (c & 1u) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
        table[i] = c;
    }
    return table;
}

inline std::uint32_t crc32(std::span<const std::byte> data) {
    static constexpr auto table = make_crc32_table();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::byte b : data)
        crc = table[(crc ^ static_cast<std::uint32_t>(b)) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

inline void put_u32(std::vector<std::byte>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i)
        out.push_back(static_cast<std::byte>((v >> (8 * i)) & 0xFFu));
}

inline void put_f64(std::vector<std::byte>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i)
        out.push_back(static_cast<std::byte>((bits >> (8 * i)) & 0xFFu));
}

// Bounds-checked little-endian cursor over an immutable byte buffer.
class ByteReader {
public:
    explicit ByteReader(std::span<const std::byte> data) : data_(data) {}

    std::size_t remaining() const { return data_.size() - pos_; }

    std::uint32_t u32(const char* what) {
        require(4, what);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 4;
        return v;
    }

    double f64(const char* what) {
        require(8, what);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i)
            bits |= static_cast<std::uint64_t>(data_[pos_ + i]) << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }

    std::string bytes(std::size_t n, const char* what) {
        require(n, what);
        std::string s(reinterpret_cast<const char*>(data_.data() + pos_), n);
        pos_ += n;
        return s;
    }

private:
    void require(std::size_t n, const char* what) const {
        if (remaining() < n)
            throw SerializeError(std::string("truncated file while reading ") + what);
    }

    std::span<const std::byte> data_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Overlap coefficients c^k of an input against every stored pattern,
/// plus the winning index (largest modulus, lowest index on ties), its
/// modulus (confidence), and the gap to the runner-up (margin). With a
/// single stored pattern the margin equals the confidence.
struct OverlapReport {
    ComplexVec coefficients;
    std::optional<std::size_t> winner;
    double confidence = 0.0;
    double margin = 0.0;
};

/// Outcome of a thresholded recognition: either the winner index cleared
/// min_confidence or the overlaps were too mixed to call.
struct Recognition {
    bool recognized = false;
    OverlapReport report;
};

/// Immutable Hebbian memory: the N x N complex propagator
///
///     J_hj = sum_k psi^k_h * conj(psi^k_j)
///
/// over P unit-norm stored patterns, which are retained for the lazy
/// recall path and diagnostics. J is Hermitian by construction (the lower
/// triangle is computed and mirrored; diagonals are accumulated as reals)
/// and trace(J) equals P up to rounding.
class Hologram {
public:
    /// Builds the propagator from P >= 1 same-dimension unit-norm states.
    /// `labels`, when non-empty, must have one entry per pattern; empty
    /// strings mean "no label".
    static Hologram build(std::span<const StatePattern> patterns,
                          std::vector<std::string> labels = {}) {
        if (patterns.empty())
            throw DomainError("build: empty pattern list");
        const std::size_t n = patterns[0].size();
        for (std::size_t k = 0; k < patterns.size(); ++k) {
            if (patterns[k].size() != n)
                throw DomainError("build: pattern " + std::to_string(k) +
                                  " has dimension " + std::to_string(patterns[k].size()) +
                                  ", expected " + std::to_string(n));
            const double norm = euclidean_norm(std::span<const Complex>(patterns[k].amplitudes));
            // negated form so NaN norms fail too
            if (!(std::abs(norm - 1.0) <= norm_check_tol))
                throw DomainError("build: pattern " + std::to_string(k) +
                                  " is not unit-norm (norm = " + std::to_string(norm) + ")");
        }
        if (!labels.empty() && labels.size() != patterns.size())
            throw DomainError("build: " + std::to_string(labels.size()) +
                              " label(s) for " + std::to_string(patterns.size()) +
                              " pattern(s)");

        Hologram h;
        h.n_ = n;
        h.p_ = patterns.size();
        h.labels_ = labels.empty() ? std::vector<std::string>(h.p_) : std::move(labels);
        h.stored_.reserve(h.p_ * n);
        for (const StatePattern& p : patterns)
            h.stored_.insert(h.stored_.end(), p.amplitudes.begin(), p.amplitudes.end());

        h.matrix_.assign(n * n, Complex{});
        for (std::size_t row = 0; row < n; ++row) {
            for (std::size_t col = 0; col < row; ++col) {
                Complex sum{};
                for (std::size_t k = 0; k < h.p_; ++k)
                    sum += h.stored_[k * n + row] * std::conj(h.stored_[k * n + col]);
                h.matrix_[row * n + col] = sum;
                h.matrix_[col * n + row] = std::conj(sum);
            }
            double diag = 0.0;
            for (std::size_t k = 0; k < h.p_; ++k)
                diag += std::norm(h.stored_[k * n + row]);
            h.matrix_[row * n + row] = Complex{diag, 0.0};
        }
        return h;
    }

    std::size_t dimension() const noexcept { return n_; }
    std::size_t pattern_count() const noexcept { return p_; }

    /// Row-major N*N propagator entries.
    const ComplexVec& matrix() const noexcept { return matrix_; }

    Complex entry(std::size_t row, std::size_t col) const {
        return matrix_[row * n_ + col];
    }

    std::span<const Complex> stored(std::size_t k) const {
        return {stored_.data() + k * n_, n_};
    }

    /// Empty string when the pattern is unlabeled.
    const std::string& label(std::size_t k) const { return labels_[k]; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }

    /// Dense recall: output_h = sum_j J_hj input_j. One pass, O(N^2).
    /// The output is the raw superposition sum_k c^k psi^k and is not
    /// renormalized; its norm is the match-quality diagnostic.
    ComplexVec recall_dense(std::span<const Complex> input) const {
        require_dimension(input, "recall_dense");
        ComplexVec out(n_);
        for (std::size_t row = 0; row < n_; ++row) {
            Complex sum{};
            const Complex* m = matrix_.data() + row * n_;
            for (std::size_t col = 0; col < n_; ++col) sum += m[col] * input[col];
            out[row] = sum;
        }
        return out;
    }

    /// Lazy recall: output_h = sum_k c^k psi^k_h with
    /// c^k = sum_j conj(psi^k_j) input_j. Same raw superposition as the
    /// dense path but in O(P*N) time and memory; agrees with recall_dense
    /// within 1e-10 relative error componentwise.
    ComplexVec recall_lazy(std::span<const Complex> input) const {
        require_dimension(input, "recall_lazy");
        const ComplexVec coeffs = raw_coefficients(input);
        ComplexVec out(n_);
        for (std::size_t k = 0; k < p_; ++k) {
            const Complex c = coeffs[k];
            const Complex* pat = stored_.data() + k * n_;
            for (std::size_t j = 0; j < n_; ++j) out[j] += c * pat[j];
        }
        return out;
    }

    /// Overlap coefficients of a unit-norm input against every stored
    /// pattern. Winner ranking uses |c^k| and is global-phase invariant.
    OverlapReport overlaps(std::span<const Complex> input) const {
        require_dimension(input, "overlaps");
        const double norm = euclidean_norm(input);
        if (!(std::abs(norm - 1.0) <= norm_check_tol))
            throw DomainError("overlaps: input is not unit-norm (norm = " +
                              std::to_string(norm) + ")");

        OverlapReport report;
        report.coefficients = raw_coefficients(input);
        std::size_t best = 0;
        double best_sq = -1.0, second_sq = 0.0;
        for (std::size_t k = 0; k < p_; ++k) {
            const double sq = std::norm(report.coefficients[k]);
            if (sq > best_sq) {
                second_sq = best_sq < 0.0 ? 0.0 : best_sq;
                best_sq = sq;
                best = k;
            } else if (sq > second_sq) {
                second_sq = sq;
            }
        }
        report.winner = best;
        report.confidence = std::sqrt(best_sq);
        report.margin = report.confidence - std::sqrt(second_sq);
        return report;
    }

    /// Thresholded recognition: Recognized when the winner's confidence
    /// reaches min_confidence, otherwise Ambiguous with the full report so
    /// callers can inspect the mixed overlaps.
    Recognition recognize(std::span<const Complex> input, double min_confidence) const {
        if (!(min_confidence >= 0.0 && min_confidence <= 1.0))
            throw DomainError("recognize: min_confidence must lie in [0, 1]");
        Recognition result;
        result.report = overlaps(input);
        result.recognized = result.report.confidence >= min_confidence;
        return result;
    }

    double trace_real() const noexcept {
        double t = 0.0;
        for (std::size_t h = 0; h < n_; ++h) t += matrix_[h * n_ + h].real();
        return t;
    }

    /// max_{h,j} |J_hj - conj(J_jh)|; zero by construction after build.
    double hermiticity_residual() const noexcept {
        double worst = 0.0;
        for (std::size_t row = 0; row < n_; ++row)
            for (std::size_t col = 0; col <= row; ++col) {
                const double d =
                    std::abs(matrix_[row * n_ + col] - std::conj(matrix_[col * n_ + row]));
                if (d > worst) worst = d;
            }
        return worst;
    }

    // -- bit-exact file format -------------------------------------------
    //
    //   bytes 0..7   magic "QAMNET1\0"
    //   u32 LE       version (1)
    //   u32 LE       N, then u32 LE P
    //   N*N complex  matrix, row-major, each entry (f64 re, f64 im) LE
    //   P*N complex  stored patterns, same entry layout
    //   P labels     u32 LE byte length + UTF-8 bytes (0 = no label)
    //   u32 LE       CRC-32 of all preceding bytes

    std::vector<std::byte> to_bytes() const {
        std::vector<std::byte> out;
        out.reserve(24 + 16 * (matrix_.size() + stored_.size()) + 4);
        for (char c : magic_bytes) out.push_back(static_cast<std::byte>(c));
        detail::put_u32(out, format_version);
        detail::put_u32(out, static_cast<std::uint32_t>(n_));
        detail::put_u32(out, static_cast<std::uint32_t>(p_));
        for (const Complex& z : matrix_) {
            detail::put_f64(out, z.real());
            detail::put_f64(out, z.imag());
        }
        for (const Complex& z : stored_) {
            detail::put_f64(out, z.real());
            detail::put_f64(out, z.imag());
        }
        for (const std::string& label : labels_) {
            detail::put_u32(out, static_cast<std::uint32_t>(label.size()));
            for (char c : label) out.push_back(static_cast<std::byte>(c));
        }
        detail::put_u32(out, detail::crc32(out));
        return out;
    }

    static Hologram from_bytes(std::span<const std::byte> bytes) {
        if (bytes.size() < magic_bytes.size())
            throw SerializeError("truncated file: shorter than the magic");
        for (std::size_t i = 0; i < magic_bytes.size(); ++i)
            if (static_cast<char>(bytes[i]) != magic_bytes[i])
                throw SerializeError("bad magic: not a memory file");
        if (bytes.size() < magic_bytes.size() + 16)
            throw SerializeError("truncated file: missing header");

        const std::span<const std::byte> body = bytes.first(bytes.size() - 4);
        detail::ByteReader tail(bytes.subspan(bytes.size() - 4));
        const std::uint32_t stated_crc = tail.u32("checksum");
        if (detail::crc32(body) != stated_crc)
            throw SerializeError("checksum mismatch: file is corrupted");

        detail::ByteReader in(body.subspan(magic_bytes.size()));
        const std::uint32_t version = in.u32("version");
        if (version != format_version)
            throw SerializeError("unsupported format version " + std::to_string(version));
        const std::uint32_t n = in.u32("dimension");
        const std::uint32_t p = in.u32("pattern count");
        if (n == 0 || p == 0)
            throw SerializeError("invariant violation: zero dimension or pattern count");
        if (n > max_file_dimension || p > max_file_dimension)
            throw SerializeError("implausible dimensions in header");
        const std::uint64_t payload = std::uint64_t{16} * (std::uint64_t{n} * n + std::uint64_t{p} * n);
        if (in.remaining() < payload)
            throw SerializeError("truncated file: payload shorter than header implies");

        Hologram h;
        h.n_ = n;
        h.p_ = p;
        h.matrix_.reserve(std::size_t{n} * n);
        for (std::size_t i = 0; i < std::size_t{n} * n; ++i) {
            const double re = in.f64("matrix entry");
            const double im = in.f64("matrix entry");
            h.matrix_.emplace_back(re, im);
        }
        h.stored_.reserve(std::size_t{p} * n);
        for (std::size_t i = 0; i < std::size_t{p} * n; ++i) {
            const double re = in.f64("stored pattern");
            const double im = in.f64("stored pattern");
            h.stored_.emplace_back(re, im);
        }
        h.labels_.reserve(p);
        for (std::size_t k = 0; k < p; ++k) {
            const std::uint32_t len = in.u32("label length");
            h.labels_.push_back(in.bytes(len, "label"));
        }
        if (in.remaining() != 0)
            throw SerializeError("trailing bytes after labels");

        const double herm = h.hermiticity_residual();
        if (herm > 1e-12)
            throw SerializeError("invariant violation: Hermiticity residual " +
                                 std::to_string(herm));
        const double trace_err = std::abs(h.trace_real() - static_cast<double>(p));
        if (trace_err > 1e-9)
            throw SerializeError("invariant violation: trace deviates from pattern count by " +
                                 std::to_string(trace_err));
        return h;
    }

    void save(const std::filesystem::path& path) const {
        const std::vector<std::byte> bytes = to_bytes();
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw IoError("cannot open for writing: " + path.string());
        out.write(reinterpret_cast<const char*>(bytes.data()),
                  static_cast<std::streamsize>(bytes.size()));
        if (!out)
            throw IoError("write failure: " + path.string());
    }

    static Hologram load(const std::filesystem::path& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw IoError("cannot open file: " + path.string());
        std::vector<char> data((std::istreambuf_iterator<char>(in)),
                               std::istreambuf_iterator<char>());
        if (in.bad())
            throw IoError("read failure: " + path.string());
        return from_bytes(std::as_bytes(std::span<const char>(data)));
    }

    static constexpr std::string_view magic_bytes{"QAMNET1\0", 8};
    static constexpr std::uint32_t format_version = 1;
    static constexpr std::uint32_t max_file_dimension = 1u << 20;

private:
    Hologram() = default;

    void require_dimension(std::span<const Complex> input, const char* op) const {
        if (input.size() != n_)
            throw DomainError(std::string(op) + ": input dimension " +
                              std::to_string(input.size()) + ", expected " +
                              std::to_string(n_));
    }

    ComplexVec raw_coefficients(std::span<const Complex> input) const {
        ComplexVec coeffs(p_);
        for (std::size_t k = 0; k < p_; ++k) {
            Complex c{};
            const Complex* pat = stored_.data() + k * n_;
            for (std::size_t j = 0; j < n_; ++j) c += std::conj(pat[j]) * input[j];
            coeffs[k] = c;
        }
        return coeffs;
    }

    std::size_t n_ = 0;
    std::size_t p_ = 0;
    ComplexVec matrix_;
    ComplexVec stored_;
    std::vector<std::string> labels_;
};

} // namespace qam
