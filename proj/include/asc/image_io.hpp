#pragma once

#include <zlib.h>

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "asc/core.hpp"

namespace asc {

inline std::uint8_t quantize_u8(double v) {
    const long q = std::lround(std::clamp(v, 0.0, 1.0) * 255.0);
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

inline double dequantize_u8(std::uint8_t b) { return b / 255.0; }

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open file: " + path);
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failure: " + path);
    return bytes;
}

inline void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open file for writing: " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failure: " + path);
}

inline void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32_be(const std::uint8_t* p) {
    return (static_cast<std::uint32_t>(p[0]) << 24) | (static_cast<std::uint32_t>(p[1]) << 16) |
           (static_cast<std::uint32_t>(p[2]) << 8) | static_cast<std::uint32_t>(p[3]);
}

inline void png_append_chunk(std::vector<std::uint8_t>& out, const char type[4],
                             const std::vector<std::uint8_t>& payload) {
    put_u32_be(out, static_cast<std::uint32_t>(payload.size()));
    const std::size_t type_at = out.size();
    out.insert(out.end(), type, type + 4);
    out.insert(out.end(), payload.begin(), payload.end());
    uLong crc = crc32(0L, Z_NULL, 0);
    crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + payload.size()));
    put_u32_be(out, static_cast<std::uint32_t>(crc));
}

inline std::vector<std::uint8_t> zlib_deflate(const std::vector<std::uint8_t>& raw) {
    uLongf cap = compressBound(static_cast<uLong>(raw.size()));
    std::vector<std::uint8_t> out(cap);
    if (compress2(out.data(), &cap, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
        throw IoError("zlib compression failed");
    out.resize(cap);
    return out;
}

inline std::vector<std::uint8_t> zlib_inflate(const std::vector<std::uint8_t>& comp,
                                              std::size_t expected_size) {
    std::vector<std::uint8_t> out(expected_size);
    z_stream zs;
    std::memset(&zs, 0, sizeof(zs));
    if (inflateInit(&zs) != Z_OK) throw IoError("zlib init failed");
    zs.next_in = const_cast<Bytef*>(comp.data());
    zs.avail_in = static_cast<uInt>(comp.size());
    zs.next_out = out.data();
    zs.avail_out = static_cast<uInt>(out.size());
    const int rc = inflate(&zs, Z_FINISH);
    inflateEnd(&zs);
    if (rc != Z_STREAM_END || zs.total_out != expected_size)
        throw DecodeError("corrupt or truncated compressed image data");
    return out;
}

inline std::uint8_t paeth(int a, int b, int c) {
    const int p = a + b - c;
    const int pa = std::abs(p - a), pb = std::abs(p - b), pc = std::abs(p - c);
    if (pa <= pb && pa <= pc) return static_cast<std::uint8_t>(a);
    if (pb <= pc) return static_cast<std::uint8_t>(b);
    return static_cast<std::uint8_t>(c);
}

// Encodes 8-bit samples (bpp bytes per pixel) as a PNG file image.
inline std::vector<std::uint8_t> png_encode(const std::vector<std::uint8_t>& samples,
                                            int height, int width, int bpp) {
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    std::vector<std::uint8_t> out(sig, sig + 8);

    std::vector<std::uint8_t> ihdr;
    put_u32_be(ihdr, static_cast<std::uint32_t>(width));
    put_u32_be(ihdr, static_cast<std::uint32_t>(height));
    ihdr.push_back(8);                                 // bit depth
    ihdr.push_back(bpp == 3 ? 2 : 0);                  // color type: RGB or gray
    ihdr.push_back(0);                                 // compression
    ihdr.push_back(0);                                 // filter method
    ihdr.push_back(0);                                 // no interlace
    png_append_chunk(out, "IHDR", ihdr);

    const std::size_t stride = static_cast<std::size_t>(width) * bpp;
    std::vector<std::uint8_t> raw;
    raw.reserve(static_cast<std::size_t>(height) * (stride + 1));
    for (int r = 0; r < height; ++r) {
        raw.push_back(0);  // filter: none
        const std::uint8_t* row = samples.data() + static_cast<std::size_t>(r) * stride;
        raw.insert(raw.end(), row, row + stride);
    }
    png_append_chunk(out, "IDAT", zlib_deflate(raw));
    png_append_chunk(out, "IEND", {});
    return out;
}

struct PngPixels {
    int height = 0;
    int width = 0;
    int bpp = 0;  // 1 = gray, 3 = rgb
    std::vector<std::uint8_t> samples;
};

inline PngPixels png_decode(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    static const std::uint8_t sig[8] = {137, 80, 78, 71, 13, 10, 26, 10};
    if (bytes.size() < 8 || std::memcmp(bytes.data(), sig, 8) != 0)
        throw DecodeError("not a PNG file: " + path);

    PngPixels px;
    std::vector<std::uint8_t> idat;
    bool saw_ihdr = false, saw_iend = false;
    std::size_t at = 8;
    while (at + 12 <= bytes.size()) {
        const std::uint32_t len = get_u32_be(&bytes[at]);
        if (at + 12 + len > bytes.size()) throw DecodeError("truncated PNG chunk: " + path);
        const char* type = reinterpret_cast<const char*>(&bytes[at + 4]);
        const std::uint8_t* payload = &bytes[at + 8];
        uLong crc = crc32(0L, Z_NULL, 0);
        crc = crc32(crc, &bytes[at + 4], 4 + len);
        if (static_cast<std::uint32_t>(crc) != get_u32_be(&bytes[at + 8 + len]))
            throw DecodeError("PNG chunk CRC mismatch: " + path);

        if (std::memcmp(type, "IHDR", 4) == 0) {
            if (len != 13) throw DecodeError("bad IHDR length: " + path);
            px.width = static_cast<int>(get_u32_be(payload));
            px.height = static_cast<int>(get_u32_be(payload + 4));
            const int depth = payload[8], color = payload[9], interlace = payload[12];
            if (px.width < 1 || px.height < 1) throw DecodeError("bad PNG dimensions: " + path);
            if (depth != 8)
                throw UnsupportedError("unsupported PNG bit depth " + std::to_string(depth) +
                                       ": " + path);
            if (color != 0 && color != 2)
                throw UnsupportedError("unsupported PNG color type " + std::to_string(color) +
                                       ": " + path);
            if (interlace != 0) throw UnsupportedError("interlaced PNG not supported: " + path);
            px.bpp = (color == 2) ? 3 : 1;
            saw_ihdr = true;
        } else if (std::memcmp(type, "IDAT", 4) == 0) {
            idat.insert(idat.end(), payload, payload + len);
        } else if (std::memcmp(type, "IEND", 4) == 0) {
            saw_iend = true;
            break;
        }
        at += 12 + len;
    }
    if (!saw_ihdr || !saw_iend || idat.empty())
        throw DecodeError("incomplete PNG stream: " + path);

    const std::size_t stride = static_cast<std::size_t>(px.width) * px.bpp;
    const std::vector<std::uint8_t> raw =
        zlib_inflate(idat, static_cast<std::size_t>(px.height) * (stride + 1));

    px.samples.assign(static_cast<std::size_t>(px.height) * stride, 0);
    std::vector<std::uint8_t> prev(stride, 0);
    for (int r = 0; r < px.height; ++r) {
        const std::uint8_t* src = raw.data() + static_cast<std::size_t>(r) * (stride + 1);
        std::uint8_t* dst = px.samples.data() + static_cast<std::size_t>(r) * stride;
        const int filter = src[0];
        for (std::size_t i = 0; i < stride; ++i) {
            const int x = src[1 + i];
            const int a = (i >= static_cast<std::size_t>(px.bpp)) ? dst[i - px.bpp] : 0;
            const int b = prev[i];
            const int c = (i >= static_cast<std::size_t>(px.bpp)) ? prev[i - px.bpp] : 0;
            int v;
            switch (filter) {
                case 0: v = x; break;
                case 1: v = x + a; break;
                case 2: v = x + b; break;
                case 3: v = x + (a + b) / 2; break;
                case 4: v = x + paeth(a, b, c); break;
                default: throw DecodeError("unknown PNG filter type: " + path);
            }
            dst[i] = static_cast<std::uint8_t>(v & 0xff);
        }
        std::memcpy(prev.data(), dst, stride);
    }
    return px;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() &&
           s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace detail

inline void save_png(const Image& img, const std::string& path) {
    std::vector<std::uint8_t> samples(static_cast<std::size_t>(img.height) * img.width * 3);
    for (std::size_t i = 0; i < img.data.size(); ++i) samples[i] = quantize_u8(img.data[i]);
    detail::write_file_bytes(path, detail::png_encode(samples, img.height, img.width, 3));
}

inline Image load_png(const std::string& path) {
    const detail::PngPixels px = detail::png_decode(detail::read_file_bytes(path), path);
    Image img(px.height, px.width);
    for (int r = 0; r < px.height; ++r) {
        for (int c = 0; c < px.width; ++c) {
            const std::uint8_t* s = px.samples.data() +
                                    (static_cast<std::size_t>(r) * px.width + c) * px.bpp;
            for (int ch = 0; ch < 3; ++ch)
                img.at(r, c, ch) = dequantize_u8(px.bpp == 3 ? s[ch] : s[0]);
        }
    }
    return img;
}

// Masks interchange as single-channel PNG, 0 = background, 255 = selected.
inline void save_mask_png(const Mask& m, const std::string& path) {
    std::vector<std::uint8_t> samples(m.data.size());
    for (std::size_t i = 0; i < m.data.size(); ++i) samples[i] = m.data[i] ? 255 : 0;
    detail::write_file_bytes(path, detail::png_encode(samples, m.height, m.width, 1));
}

inline Mask load_mask_png(const std::string& path) {
    const detail::PngPixels px = detail::png_decode(detail::read_file_bytes(path), path);
    Mask m(px.height, px.width, 0);
    for (int r = 0; r < px.height; ++r)
        for (int c = 0; c < px.width; ++c)
            m.at(r, c) = px.samples[(static_cast<std::size_t>(r) * px.width + c) * px.bpp] >= 128;
    return m;
}

inline void save_ppm(const Image& img, const std::string& path) {
    std::vector<std::uint8_t> out;
    const std::string header =
        "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.insert(out.end(), header.begin(), header.end());
    for (double v : img.data) out.push_back(quantize_u8(v));
    detail::write_file_bytes(path, out);
}

inline Image load_ppm(const std::string& path) {
    const std::vector<std::uint8_t> bytes = detail::read_file_bytes(path);
    std::size_t at = 0;
    auto next_token = [&]() -> std::string {
        while (at < bytes.size()) {
            if (std::isspace(bytes[at])) {
                ++at;
            } else if (bytes[at] == '#') {
                while (at < bytes.size() && bytes[at] != '\n') ++at;
            } else {
                break;
            }
        }
        std::string tok;
        while (at < bytes.size() && !std::isspace(bytes[at])) tok.push_back(bytes[at++]);
        return tok;
    };
    if (next_token() != "P6") throw DecodeError("not a binary PPM file: " + path);
    int width, height, maxval;
    try {
        width = std::stoi(next_token());
        height = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw DecodeError("malformed PPM header: " + path);
    }
    if (width < 1 || height < 1) throw DecodeError("bad PPM dimensions: " + path);
    if (maxval != 255)
        throw UnsupportedError("unsupported PPM maxval " + std::to_string(maxval) + ": " + path);
    ++at;  // single whitespace after maxval
    const std::size_t need = static_cast<std::size_t>(height) * width * 3;
    if (bytes.size() - at < need) throw DecodeError("truncated PPM pixel data: " + path);
    Image img(height, width);
    for (std::size_t i = 0; i < need; ++i) img.data[i] = dequantize_u8(bytes[at + i]);
    return img;
}

inline void save_image(const Image& img, const std::string& path) {
    if (detail::has_suffix(path, ".png"))
        save_png(img, path);
    else if (detail::has_suffix(path, ".ppm"))
        save_ppm(img, path);
    else
        throw UnsupportedError("unsupported image extension: " + path);
}

inline Image load_image(const std::string& path) {
    if (detail::has_suffix(path, ".png")) return load_png(path);
    if (detail::has_suffix(path, ".ppm")) return load_ppm(path);
    throw UnsupportedError("unsupported image extension: " + path);
}

}  // namespace asc
