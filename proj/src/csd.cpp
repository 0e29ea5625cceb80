#include "csdr/csd.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "csdr/util.hpp"

namespace csdr {

namespace {
constexpr char kMagic[4] = {'C', 'S', 'D', '1'};
}

Tensor ChargeStabilityDiagram::as_tensor() const {
    Tensor t(1, height, width);
    std::copy(pixels.begin(), pixels.end(), t.data.begin());
    return t;
}

std::vector<float> normalize(const std::vector<float>& raw) {
    if (raw.empty()) throw std::invalid_argument("normalize: empty input");
    float lo = raw[0], hi = raw[0];
    for (float v : raw) {
        if (!std::isfinite(v)) throw std::invalid_argument("normalize: non-finite input value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    std::vector<float> out(raw.size());
    if (hi > lo) {
        const float scale = 1.0f / (hi - lo);
        for (std::size_t k = 0; k < raw.size(); ++k) out[k] = (raw[k] - lo) * scale;
    } else {
        std::fill(out.begin(), out.end(), 0.5f);
    }
    return out;
}

void save_csdc(const std::filesystem::path& path, const ChargeStabilityDiagram& csd) {
    if (csd.height <= 0 || csd.width <= 0)
        throw std::invalid_argument("save_csdc: empty diagram");
    if (csd.pixels.size() != std::size_t(csd.height) * csd.width)
        throw std::invalid_argument("save_csdc: pixel buffer does not match dimensions");
    for (float v : csd.pixels)
        if (!std::isfinite(v)) throw std::invalid_argument("save_csdc: non-finite pixels");
    std::string buf;
    buf.reserve(32 + csd.pixels.size() * 4);
    buf.append(kMagic, 4);
    put_u32le(buf, std::uint32_t(csd.height));
    put_u32le(buf, std::uint32_t(csd.width));
    put_f64le(buf, csd.window.v1_min);
    put_f64le(buf, csd.window.v1_max);
    put_f64le(buf, csd.window.v2_min);
    put_f64le(buf, csd.window.v2_max);
    for (float v : csd.pixels) put_f32le(buf, v);
    write_file_atomic(path, buf);
}

ChargeStabilityDiagram load_csdc(const std::filesystem::path& path) {
    const std::string buf = read_file(path);
    ByteReader r(buf);
    if (r.bytes(4) != std::string(kMagic, 4)) throw IoError("bad magic in " + path.string());
    ChargeStabilityDiagram csd;
    csd.height = int(r.u32le());
    csd.width = int(r.u32le());
    if (csd.height <= 0 || csd.width <= 0 || std::size_t(csd.height) * csd.width > (1u << 28))
        throw IoError("implausible dimensions in " + path.string());
    csd.window.v1_min = r.f64le();
    csd.window.v1_max = r.f64le();
    csd.window.v2_min = r.f64le();
    csd.window.v2_max = r.f64le();
    const std::size_t n = std::size_t(csd.height) * csd.width;
    csd.pixels.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        csd.pixels[k] = r.f32le();
        if (!std::isfinite(csd.pixels[k])) throw IoError("non-finite pixel in " + path.string());
    }
    if (!r.done()) throw IoError("trailing bytes in " + path.string());
    csd.id = path.stem().string();
    return csd;
}

ChargeStabilityDiagram import_csv(const std::filesystem::path& path, const VoltageWindow& window) {
    const std::string buf = read_file(path);
    std::vector<std::vector<float>> rows;
    std::size_t pos = 0;
    bool header_allowed = true;
    int width = -1;
    while (pos < buf.size()) {
        std::size_t eol = buf.find('\n', pos);
        if (eol == std::string::npos) eol = buf.size();
        std::string_view line(buf.data() + pos, eol - pos);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        pos = eol + 1;
        if (line.empty()) continue;

        std::vector<float> cells;
        bool parse_failed = false;
        std::size_t cp = 0;
        while (cp <= line.size()) {
            std::size_t comma = line.find(',', cp);
            if (comma == std::string_view::npos) comma = line.size();
            std::string_view cell = line.substr(cp, comma - cp);
            while (!cell.empty() && (cell.front() == ' ' || cell.front() == '\t'))
                cell.remove_prefix(1);
            while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t'))
                cell.remove_suffix(1);
            float v = 0;
            auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size()) {
                parse_failed = true;
                break;
            }
            cells.push_back(v);
            if (comma == line.size()) break;
            cp = comma + 1;
        }
        if (parse_failed) {
            if (header_allowed) {
                header_allowed = false;
                continue;
            }
            throw IoError("non-numeric cell in " + path.string());
        }
        header_allowed = false;
        if (width < 0) width = int(cells.size());
        else if (int(cells.size()) != width)
            throw IoError("ragged rows in " + path.string());
        rows.push_back(std::move(cells));
    }
    if (rows.empty() || width <= 0) throw IoError("no data rows in " + path.string());

    ChargeStabilityDiagram csd;
    csd.height = int(rows.size());
    csd.width = width;
    csd.window = window;
    std::vector<float> raw;
    raw.reserve(std::size_t(csd.height) * width);
    for (const auto& r : rows) raw.insert(raw.end(), r.begin(), r.end());
    csd.pixels = normalize(raw);
    csd.id = path.stem().string();
    return csd;
}

} // namespace csdr
