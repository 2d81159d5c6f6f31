#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace tokentopics {

// Every library failure derives from Error; kind() is a stable machine-readable tag.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
    virtual const char* kind() const noexcept { return "error"; }
};

#define TOKENTOPICS_ERROR(Name, Tag)                                   \
    class Name : public Error {                                        \
    public:                                                            \
        using Error::Error;                                            \
        const char* kind() const noexcept override { return Tag; }     \
    }

TOKENTOPICS_ERROR(IoError, "io");
TOKENTOPICS_ERROR(FormatError, "format");
TOKENTOPICS_ERROR(OrderingError, "ordering");
TOKENTOPICS_ERROR(PolicyError, "policy");
TOKENTOPICS_ERROR(InsufficientDataError, "insufficient-data");
TOKENTOPICS_ERROR(DimensionError, "dimension");
TOKENTOPICS_ERROR(InputError, "input");
TOKENTOPICS_ERROR(IntegrityError, "integrity");
TOKENTOPICS_ERROR(ConfigError, "config");
TOKENTOPICS_ERROR(MetadataError, "metadata");

#undef TOKENTOPICS_ERROR

// Truncated or inconsistent binary payload; carries the byte offset where decoding failed.
class CorruptionError : public Error {
public:
    CorruptionError(const std::string& what, std::uint64_t offset)
        : Error(what + " (at byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
    const char* kind() const noexcept override { return "corruption"; }
    std::uint64_t offset() const noexcept { return offset_; }

private:
    std::uint64_t offset_;
};

}  // namespace tokentopics
