#pragma once

// Little-endian primitives shared by the CGIX1 and CGEMB1 formats.

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>

#include "citegraph/error.hpp"

namespace citegraph::detail {

template <typename UInt>
void write_le(std::ostream& out, UInt value)
{
    std::array<char, sizeof(UInt)> bytes{};
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        bytes[i] = static_cast<char>((value >> (8 * i)) & 0xFFU);
    }
    out.write(bytes.data(), bytes.size());
}

template <typename UInt>
UInt read_le(std::istream& in, std::string_view what)
{
    std::array<unsigned char, sizeof(UInt)> bytes{};
    in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
    if (in.gcount() != static_cast<std::streamsize>(bytes.size())) {
        throw DataError("truncated input while reading " + std::string(what));
    }
    UInt value = 0;
    for (std::size_t i = 0; i < sizeof(UInt); ++i) {
        value |= static_cast<UInt>(bytes[i]) << (8 * i);
    }
    return value;
}

inline void write_f32(std::ostream& out, float value)
{
    write_le(out, std::bit_cast<std::uint32_t>(value));
}

inline float read_f32(std::istream& in, std::string_view what)
{
    return std::bit_cast<float>(read_le<std::uint32_t>(in, what));
}

inline void write_bytes(std::ostream& out, std::string_view bytes)
{
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

inline std::string read_bytes(std::istream& in, std::size_t n, std::string_view what)
{
    std::string bytes(n, '\0');
    in.read(bytes.data(), static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) {
        throw DataError("truncated input while reading " + std::string(what));
    }
    return bytes;
}

inline void expect_magic(std::istream& in, std::string_view magic, std::string_view format)
{
    std::string got(magic.size(), '\0');
    in.read(got.data(), static_cast<std::streamsize>(magic.size()));
    if (static_cast<std::size_t>(in.gcount()) != magic.size() || got != magic) {
        throw DataError("bad magic: not a " + std::string(format) + " file");
    }
}

inline void expect_eof(std::istream& in, std::string_view format)
{
    if (in.peek() != std::char_traits<char>::eof()) {
        throw DataError("trailing bytes after " + std::string(format) + " payload");
    }
}

}  // namespace citegraph::detail
