#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "qam/errors.hpp"
#include "qam/types.hpp"

namespace qam {

namespace detail {

inline std::string read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw IoError("cannot open file: " + path.string());
    std::string data((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    if (in.bad())
        throw IoError("read failure: " + path.string());
    return data;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

} // namespace detail

/// Reads patterns from UTF-8 CSV: one pattern per line, comma-separated
/// decimal reals, no header. All rows must have the same length. Errors
/// carry the offending row/column (1-based).
inline std::vector<RawPattern> load_csv(const std::filesystem::path& path) {
    const std::string data = detail::read_file_bytes(path);
    const std::string name = path.string();

    std::vector<std::string_view> lines;
    std::string_view rest(data);
    while (!rest.empty()) {
        const std::size_t nl = rest.find('\n');
        lines.push_back(rest.substr(0, nl));
        if (nl == std::string_view::npos) break;
        rest.remove_prefix(nl + 1);
    }
    while (!lines.empty() && detail::trim(lines.back()).empty()) lines.pop_back();
    if (lines.empty())
        throw ParseError(name + ": empty file");

    std::vector<RawPattern> patterns;
    std::size_t width = 0;
    for (std::size_t row = 0; row < lines.size(); ++row) {
        const std::string pos = name + ":" + std::to_string(row + 1);
        if (detail::trim(lines[row]).empty())
            throw ParseError(pos + ": blank row");
        RawPattern p;
        std::string_view line = lines[row];
        std::size_t col = 0;
        while (true) {
            ++col;
            const std::size_t comma = line.find(',');
            const std::string_view cell = detail::trim(line.substr(0, comma));
            double value = 0.0;
            const auto [ptr, ec] =
                std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size())
                throw ParseError(pos + ": column " + std::to_string(col) +
                                 ": invalid number '" + std::string(cell) + "'");
            if (!std::isfinite(value))
                throw ParseError(pos + ": column " + std::to_string(col) +
                                 ": non-finite value");
            p.values.push_back(value);
            if (comma == std::string_view::npos) break;
            line.remove_prefix(comma + 1);
        }
        if (row == 0) {
            width = p.values.size();
        } else if (p.values.size() != width) {
            throw ParseError(pos + ": ragged row, " +
                             std::to_string(p.values.size()) + " column(s), expected " +
                             std::to_string(width));
        }
        patterns.push_back(std::move(p));
    }
    return patterns;
}

namespace detail {

// Next whitespace-delimited PGM header token; '#' starts a comment to EOL.
inline std::string_view pgm_token(std::string_view data, std::size_t& pos,
                                  const std::string& name) {
    while (pos < data.size()) {
        const char c = data[pos];
        if (c == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++pos;
        } else {
            break;
        }
    }
    const std::size_t start = pos;
    while (pos < data.size() && !std::isspace(static_cast<unsigned char>(data[pos])))
        ++pos;
    if (start == pos)
        throw ParseError(name + ": truncated header");
    return data.substr(start, pos - start);
}

inline std::uint32_t pgm_uint(std::string_view data, std::size_t& pos,
                              const std::string& name, const char* what) {
    const std::string_view tok = pgm_token(data, pos, name);
    std::uint32_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError(name + ": invalid " + what + " '" + std::string(tok) + "'");
    return value;
}

} // namespace detail

/// Reads a PGM image ("P2" ASCII or "P5" binary, maxval <= 65535, 16-bit
/// samples big-endian) and flattens it row-major into values scaled to
/// [0, 1] by division by maxval.
inline RawPattern load_pgm(const std::filesystem::path& path) {
    const std::string data = detail::read_file_bytes(path);
    const std::string name = path.string();

    std::size_t pos = 0;
    if (data.size() < 2)
        throw ParseError(name + ": truncated header");
    const std::string_view magic(data.data(), 2);
    if (magic != "P2" && magic != "P5")
        throw ParseError(name + ": bad magic '" + std::string(magic) +
                         "', expected P2 or P5");
    pos = 2;

    const std::uint32_t width = detail::pgm_uint(data, pos, name, "width");
    const std::uint32_t height = detail::pgm_uint(data, pos, name, "height");
    const std::uint32_t maxval = detail::pgm_uint(data, pos, name, "maxval");
    if (width == 0 || height == 0)
        throw ParseError(name + ": zero image dimension");
    if (maxval == 0)
        throw ParseError(name + ": maxval is 0");
    if (maxval > 65535)
        throw ParseError(name + ": maxval " + std::to_string(maxval) + " exceeds 65535");

    const std::size_t count = static_cast<std::size_t>(width) * height;
    RawPattern p;
    p.values.reserve(count);
    const double scale = static_cast<double>(maxval);

    if (magic == "P2") {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            try {
                v = detail::pgm_uint(data, pos, name, "sample");
            } catch (const ParseError&) {
                throw ParseError(name + ": truncated raster, got " +
                                 std::to_string(i) + " of " + std::to_string(count) +
                                 " samples");
            }
            if (v > maxval)
                throw ParseError(name + ": sample " + std::to_string(v) +
                                 " exceeds maxval at index " + std::to_string(i));
            p.values.push_back(static_cast<double>(v) / scale);
        }
    } else {
        // exactly one whitespace byte separates maxval from the raster
        if (pos >= data.size())
            throw ParseError(name + ": truncated raster");
        ++pos;
        const std::size_t bytes_per_sample = maxval < 256 ? 1 : 2;
        if (data.size() - pos < count * bytes_per_sample)
            throw ParseError(name + ": truncated raster, " +
                             std::to_string(data.size() - pos) + " byte(s), expected " +
                             std::to_string(count * bytes_per_sample));
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            if (bytes_per_sample == 1) {
                v = static_cast<unsigned char>(data[pos + i]);
            } else {
                v = (static_cast<std::uint32_t>(static_cast<unsigned char>(data[pos + 2 * i])) << 8) |
                    static_cast<unsigned char>(data[pos + 2 * i + 1]);
            }
            if (v > maxval)
                throw ParseError(name + ": sample " + std::to_string(v) +
                                 " exceeds maxval at index " + std::to_string(i));
            p.values.push_back(static_cast<double>(v) / scale);
        }
    }
    return p;
}

} // namespace qam
