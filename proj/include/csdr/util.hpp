#pragma once
// Small shared helpers: explicit little-endian (de)serialization, shortest
// round-trip float formatting, atomic file writes.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace csdr {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void put_u32le(std::string& out, std::uint32_t v) {
    out.push_back(char(v & 0xFF));
    out.push_back(char((v >> 8) & 0xFF));
    out.push_back(char((v >> 16) & 0xFF));
    out.push_back(char((v >> 24) & 0xFF));
}

inline void put_u64le(std::string& out, std::uint64_t v) {
    put_u32le(out, std::uint32_t(v & 0xFFFFFFFFu));
    put_u32le(out, std::uint32_t(v >> 32));
}

void put_f32le(std::string& out, float v);
void put_f64le(std::string& out, double v);

// Cursor over an in-memory byte buffer; throws IoError on underrun.
struct ByteReader {
    const std::string& buf;
    std::size_t pos = 0;
    explicit ByteReader(const std::string& b) : buf(b) {}
    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw IoError("truncated file");
    }
    std::uint32_t u32le();
    std::uint64_t u64le();
    float f32le();
    double f64le();
    std::string bytes(std::size_t n);
    bool done() const { return pos == buf.size(); }
};

std::string read_file(const std::filesystem::path& path);

// write to a sibling temp file, then rename over the destination
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

// shortest decimal string that parses back to exactly the same value
std::string format_double(double v);
std::string format_float(float v);

} // namespace csdr
