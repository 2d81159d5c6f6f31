#pragma once

#include "tokentopics/errors.hpp"

#include <array>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

namespace tokentopics::detail {

// Little-endian POD writer/reader used by the model file formats.
class BinaryWriter {
public:
    explicit BinaryWriter(const std::filesystem::path& path) : out_(path, std::ios::binary | std::ios::trunc) {
        if (!out_) throw IoError("cannot write " + path.string());
    }
    template <typename T>
    void put(T v) {
        out_.write(reinterpret_cast<const char*>(&v), sizeof(T));
    }
    void put_bytes(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
    void close() {
        out_.close();
        if (!out_) throw IoError("write failed");
    }

private:
    std::ofstream out_;
};

class BinaryReader {
public:
    explicit BinaryReader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path) {
        if (!in_) throw IoError("cannot open " + path.string());
    }
    template <typename T>
    T get() {
        T v;
        in_.read(reinterpret_cast<char*>(&v), sizeof(T));
        if (static_cast<std::size_t>(in_.gcount()) != sizeof(T))
            throw CorruptionError("truncated file " + path_.string(), offset_ + static_cast<std::uint64_t>(in_.gcount()));
        offset_ += sizeof(T);
        return v;
    }
    void expect_magic(const std::array<char, 4>& magic, const char* what) {
        char got[4] = {};
        in_.read(got, 4);
        if (in_.gcount() != 4 || std::memcmp(got, magic.data(), 4) != 0)
            throw FormatError(path_.string() + " is not a " + what + " file");
        offset_ = 4;
    }
    void expect_end() {
        if (in_.peek() != std::char_traits<char>::eof())
            throw CorruptionError("trailing bytes in " + path_.string(), offset_);
    }

private:
    std::ifstream in_;
    std::filesystem::path path_;
    std::uint64_t offset_ = 0;
};

}  // namespace tokentopics::detail
