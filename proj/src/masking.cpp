#include "csdr/masking.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace csdr {

std::size_t MeasurementMask::count() const {
    std::size_t n = 0;
    for (auto b : bits) n += b;
    return n;
}

double MeasurementMask::density() const {
    if (bits.empty()) return 0.0;
    return double(count()) / double(bits.size());
}

Tensor MeasurementMask::as_tensor() const {
    Tensor t(1, height, width);
    for (std::size_t k = 0; k < bits.size(); ++k) t.data[k] = float(bits[k]);
    return t;
}

MeasurementMask make_grid_mask(int height, int width, const GridMaskSpec& spec) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("make_grid_mask: empty image");
    if (spec.reduce_factor < 1 || spec.reduce_factor > std::min(height, width))
        throw std::invalid_argument("make_grid_mask: reduce factor out of range");
    MeasurementMask m;
    m.height = height;
    m.width = width;
    m.spec = spec;
    m.bits.assign(std::size_t(height) * width, 0);
    for (int i = 0; i < height; i += spec.reduce_factor)
        for (int j = 0; j < width; j += spec.reduce_factor)
            m.bits[std::size_t(i) * width + j] = 1;
    return m;
}

namespace {

// sweep k of n over an axis of extent len: centered in its partition cell,
// spanning thickness t, clipped to the frame
void mark_band(std::vector<int>& centers, int n, int len, Rng* rng) {
    for (int k = 0; k < n; ++k) {
        int c;
        if (rng) {
            const double cell = double(len) / n;
            c = int(rng->uniform(k * cell, (k + 1) * cell));
            c = std::clamp(c, 0, len - 1);
        } else {
            c = int((k + 0.5) * len / n);
        }
        centers.push_back(c);
    }
}

} // namespace

MeasurementMask make_line_cut_mask(int height, int width, const LineCutSpec& spec, Rng* rng) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("make_line_cut_mask: empty image");
    if (spec.n_h < 0 || spec.n_v < 0 || spec.t_h < 0 || spec.t_v < 0)
        throw std::invalid_argument("make_line_cut_mask: negative sweep parameters");
    if (spec.n_h == 0 && spec.n_v == 0)
        throw std::invalid_argument("make_line_cut_mask: no sweeps requested");
    if (spec.n_h * spec.t_h > height || spec.n_v * spec.t_v > width)
        throw std::invalid_argument("make_line_cut_mask: sweeps exceed frame");
    MeasurementMask m;
    m.height = height;
    m.width = width;
    m.spec = spec;
    m.bits.assign(std::size_t(height) * width, 0);

    std::vector<int> hc, vc;
    mark_band(hc, spec.n_h, height, rng);
    mark_band(vc, spec.n_v, width, rng);
    for (int c : hc) {
        const int start = std::max(0, c - spec.t_h / 2);
        const int stop = std::min(height, start + spec.t_h);
        for (int i = start; i < stop; ++i)
            std::fill_n(m.bits.begin() + std::size_t(i) * width, width, std::uint8_t(1));
    }
    for (int c : vc) {
        const int start = std::max(0, c - spec.t_v / 2);
        const int stop = std::min(width, start + spec.t_v);
        for (int i = 0; i < height; ++i)
            for (int j = start; j < stop; ++j) m.bits[std::size_t(i) * width + j] = 1;
    }
    if (m.count() == 0) throw std::invalid_argument("make_line_cut_mask: mask measures nothing");
    return m;
}

MeasurementMask make_mask(int height, int width, const MaskSpec& spec, Rng* rng) {
    if (std::holds_alternative<GridMaskSpec>(spec))
        return make_grid_mask(height, width, std::get<GridMaskSpec>(spec));
    return make_line_cut_mask(height, width, std::get<LineCutSpec>(spec), rng);
}

Tensor apply_mask(const Tensor& image, const MeasurementMask& mask) {
    if (image.channels != 1 || image.height != mask.height || image.width != mask.width)
        throw std::invalid_argument("apply_mask: shape mismatch");
    Tensor y(1, mask.height, mask.width);
    for (std::size_t k = 0; k < mask.bits.size(); ++k)
        y.data[k] = mask.bits[k] ? image.data[k] : 0.0f;
    return y;
}

Tensor apply_mask(const ChargeStabilityDiagram& csd, const MeasurementMask& mask) {
    return apply_mask(csd.as_tensor(), mask);
}

namespace {
int parse_int(std::string_view s) {
    int v = 0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("mask spec: bad integer '" + std::string(s) + "'");
    return v;
}
} // namespace

MaskSpec parse_mask_spec(const std::string& text) {
    if (text.rfind("grid:", 0) == 0) return GridMaskSpec{parse_int(std::string_view(text).substr(5))};
    if (text.rfind("lc:", 0) == 0) {
        std::string_view rest = std::string_view(text).substr(3);
        std::vector<int> parts;
        std::size_t p = 0;
        while (p <= rest.size()) {
            std::size_t dash = rest.find('-', p);
            if (dash == std::string_view::npos) dash = rest.size();
            parts.push_back(parse_int(rest.substr(p, dash - p)));
            if (dash == rest.size()) break;
            p = dash + 1;
        }
        if (parts.size() != 4)
            throw std::invalid_argument("mask spec: expected lc:nh-nv-th-tv, got '" + text + "'");
        return LineCutSpec{parts[0], parts[1], parts[2], parts[3]};
    }
    throw std::invalid_argument("mask spec: unknown family in '" + text + "'");
}

std::string format_mask_spec(const MaskSpec& spec) {
    if (std::holds_alternative<GridMaskSpec>(spec))
        return "grid:" + std::to_string(std::get<GridMaskSpec>(spec).reduce_factor);
    const auto& lc = std::get<LineCutSpec>(spec);
    return "lc:" + std::to_string(lc.n_h) + "-" + std::to_string(lc.n_v) + "-" +
           std::to_string(lc.t_h) + "-" + std::to_string(lc.t_v);
}

} // namespace csdr
