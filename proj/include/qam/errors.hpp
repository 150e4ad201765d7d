#pragma once

#include <stdexcept>

namespace qam {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem failures: missing, unreadable, or unwritable files.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed input documents (CSV, PGM, config JSON). Messages carry
/// row/column or byte positions where available.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Contract violations on in-memory data: dimension mismatch, zero-norm
/// or constant patterns, out-of-range parameters.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Memory-file decoding failures: bad magic, unsupported version,
/// checksum mismatch, truncation, or invariant violations after read.
class SerializeError : public Error {
public:
    using Error::Error;
};

} // namespace qam
