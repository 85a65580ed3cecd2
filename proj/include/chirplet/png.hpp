#ifndef CHIRPLET_PNG_HPP
#define CHIRPLET_PNG_HPP

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <zlib.h>

#include "chirplet/errors.hpp"

namespace chirplet {

// Minimal 8-bit grayscale PNG writer: IHDR + one zlib-compressed IDAT + IEND.
inline void write_gray_png(const std::string& path, std::size_t width,
                           std::size_t height,
                           const std::vector<std::uint8_t>& pixels) {
    if (width == 0 || height == 0 || pixels.size() != width * height)
        throw InvalidInputError("write_gray_png: pixel buffer does not match dimensions");

    // scanlines, each preceded by a filter-type byte (0 = none)
    std::vector<std::uint8_t> raw((width + 1) * height);
    for (std::size_t y = 0; y < height; ++y) {
        raw[y * (width + 1)] = 0;
        std::memcpy(&raw[y * (width + 1) + 1], &pixels[y * width], width);
    }

    uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> zdata(zlen);
    if (compress2(zdata.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()),
                  Z_BEST_COMPRESSION) != Z_OK)
        throw IoError("write_gray_png: deflate failed");
    zdata.resize(zlen);

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("write_gray_png: cannot open " + path);

    auto put_be32 = [](std::vector<std::uint8_t>& v, std::uint32_t x) {
        v.push_back(static_cast<std::uint8_t>(x >> 24));
        v.push_back(static_cast<std::uint8_t>(x >> 16));
        v.push_back(static_cast<std::uint8_t>(x >> 8));
        v.push_back(static_cast<std::uint8_t>(x));
    };
    auto chunk = [&](const char* type, const std::vector<std::uint8_t>& data) {
        std::vector<std::uint8_t> buf;
        put_be32(buf, static_cast<std::uint32_t>(data.size()));
        buf.insert(buf.end(), type, type + 4);
        buf.insert(buf.end(), data.begin(), data.end());
        const uLong crc =
            crc32(crc32(0L, reinterpret_cast<const Bytef*>(type), 4),
                  data.data(), static_cast<uInt>(data.size()));
        put_be32(buf, static_cast<std::uint32_t>(crc));
        out.write(reinterpret_cast<const char*>(buf.data()),
                  static_cast<std::streamsize>(buf.size()));
    };

    static constexpr std::array<std::uint8_t, 8> sig{137, 80, 78, 71, 13, 10, 26, 10};
    out.write(reinterpret_cast<const char*>(sig.data()), sig.size());

    std::vector<std::uint8_t> ihdr;
    put_be32(ihdr, static_cast<std::uint32_t>(width));
    put_be32(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);  // bit depth
    ihdr.push_back(0);  // grayscale
    ihdr.push_back(0);  // deflate
    ihdr.push_back(0);  // adaptive filtering
    ihdr.push_back(0);  // no interlace
    chunk("IHDR", ihdr);
    chunk("IDAT", zdata);
    chunk("IEND", {});

    out.flush();
    if (!out) throw IoError("write_gray_png: write failed for " + path);
}

}  // namespace chirplet

#endif  // CHIRPLET_PNG_HPP
