#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace langgeo {

/// Base class for every error raised by the toolkit.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Inputs that violate a precondition: shape mismatches, duplicate tags,
/// masked entries where a complete matrix is required.
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Numerical breakdown: singular Hessian, failed eigendecomposition.
class NumericError : public Error {
public:
    using Error::Error;
};

enum class FormatErrorKind {
    bad_magic,
    unsupported_version,
    checksum_mismatch,
    truncated,
    malformed,
};

const char* to_string(FormatErrorKind kind) noexcept;

/// A file or byte stream that does not parse. `offset` is the byte position
/// at which the problem was detected.
class FormatError : public ValidationError {
public:
    FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& what);

    FormatErrorKind kind() const noexcept { return m_kind; }
    std::uint64_t offset() const noexcept { return m_offset; }
    /// The message without the kind and offset prefix.
    const std::string& detail() const noexcept { return m_detail; }

private:
    FormatErrorKind m_kind;
    std::uint64_t m_offset;
    std::string m_detail;
};

} // namespace langgeo
