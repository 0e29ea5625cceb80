#include "csdr/util.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace csdr {

void put_f32le(std::string& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32le(out, bits);
}

void put_f64le(std::string& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64le(out, bits);
}

std::uint32_t ByteReader::u32le() {
    need(4);
    const unsigned char* p = reinterpret_cast<const unsigned char*>(buf.data()) + pos;
    pos += 4;
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) | (std::uint32_t(p[2]) << 16) |
           (std::uint32_t(p[3]) << 24);
}

std::uint64_t ByteReader::u64le() {
    const std::uint64_t lo = u32le();
    const std::uint64_t hi = u32le();
    return lo | (hi << 32);
}

float ByteReader::f32le() {
    const std::uint32_t bits = u32le();
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

double ByteReader::f64le() {
    const std::uint64_t bits = u64le();
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

std::string ByteReader::bytes(std::size_t n) {
    need(n);
    std::string s = buf.substr(pos, n);
    pos += n;
    return s;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path.string());
    std::string s((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
    if (f.bad()) throw IoError("read failed on " + path.string());
    return s;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& contents) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open " + tmp.string() + " for writing");
        f.write(contents.data(), std::streamsize(contents.size()));
        f.flush();
        if (!f) throw IoError("write failed on " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw IoError("rename to " + path.string() + " failed: " + ec.message());
}

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char tmp[64];
    auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
    return std::string(tmp, res.ptr);
}

std::string format_float(float v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char tmp[64];
    auto res = std::to_chars(tmp, tmp + sizeof tmp, v);
    return std::string(tmp, res.ptr);
}

} // namespace csdr
