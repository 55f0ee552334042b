#include "langgeo/error.hpp"

namespace langgeo {

const char* to_string(FormatErrorKind kind) noexcept
{
    switch (kind) {
    case FormatErrorKind::bad_magic: return "bad magic";
    case FormatErrorKind::unsupported_version: return "unsupported version";
    case FormatErrorKind::checksum_mismatch: return "checksum mismatch";
    case FormatErrorKind::truncated: return "truncated";
    case FormatErrorKind::malformed: return "malformed";
    }
    return "unknown";
}

FormatError::FormatError(FormatErrorKind kind, std::uint64_t offset, const std::string& what)
    : ValidationError(std::string(to_string(kind)) + " at byte " + std::to_string(offset) + ": " + what)
    , m_kind(kind)
    , m_offset(offset)
    , m_detail(what)
{
}

} // namespace langgeo
