#include "csdr/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "csdr/edt.hpp"
#include "csdr/rng.hpp"

namespace csdr {
namespace {

struct Vec2 {
    double i = 0.0, j = 0.0;
};

struct Line {
    double slope = 0.0;     // i = slope * j + intercept
    double intercept = 0.0;
    Vec2 normal;            // unit normal (1, -slope)/sqrt(1+slope^2)
};

struct Crossing {
    Vec2 pos;
    Vec2 direction; // unit bisector of the two line normals
};

Line make_line(double slope, double anchor_i, double anchor_j) {
    Line line;
    line.slope = slope;
    line.intercept = anchor_i - slope * anchor_j;
    const double inv = 1.0 / std::sqrt(1.0 + slope * slope);
    line.normal = {inv, -slope * inv};
    return line;
}

// Hyperbolic branch offset: gap/2 at the crossing, ~(gap/2)^2/|u| far away.
double branch_offset(double u, double gap) {
    return 0.5 * (std::hypot(u, gap) - std::abs(u));
}

void raster_point(std::vector<std::uint8_t>& bits, int size, double i, double j) {
    const long ri = std::lround(i);
    const long rj = std::lround(j);
    if (ri < 0 || rj < 0 || ri >= size || rj >= size) return;
    bits[std::size_t(ri) * size + rj] = 1;
}

} // namespace

void validate(const SyntheticConfig& c) {
    auto fail = [](const std::string& what) { throw std::invalid_argument("SyntheticConfig: " + what); };
    if (c.size < 8) fail("size must be >= 8");
    if (c.n_lines_family1 < 1 || c.n_lines_family2 < 1) fail("line counts must be >= 1");
    if (!(std::abs(c.slope1) > 1.0) || !std::isfinite(c.slope1))
        fail("family 1 must be near-vertical (|slope1| > 1)");
    if (!(std::abs(c.slope2) < 1.0)) fail("family 2 must be near-horizontal (|slope2| < 1)");
    if (!(c.line_width >= 1.0)) fail("line_width must be >= 1 px");
    if (!(c.line_contrast > 0.0)) fail("line_contrast must be > 0");
    if (!std::isfinite(c.background_tilt)) fail("background_tilt must be finite");
    if (!(c.noise_sigma >= 0.0)) fail("noise_sigma must be >= 0");
    if (!(c.anticrossing_gap >= 0.0)) fail("anticrossing_gap must be >= 0");
}

SyntheticCSD synthesize_csd(const SyntheticConfig& config) {
    validate(config);
    const int size = config.size;
    const double extent = double(size - 1);
    const double gap = config.anticrossing_gap;
    const double step = 0.25; // along-line sample spacing, px

    // --- line placement: evenly spaced anchors with +-cell/4 jitter ---------
    Rng rng1 = substream(config.seed, "synth-family1");
    Rng rng2 = substream(config.seed, "synth-family2");

    std::vector<Line> family1, family2;
    const double cell1 = double(size) / config.n_lines_family1;
    for (int k = 0; k < config.n_lines_family1; ++k) {
        const double anchor_j = (k + 0.5) * cell1 + rng1.uniform(-cell1 / 4, cell1 / 4);
        family1.push_back(make_line(config.slope1, extent / 2, anchor_j));
    }
    const double cell2 = double(size) / config.n_lines_family2;
    for (int k = 0; k < config.n_lines_family2; ++k) {
        const double anchor_i = (k + 0.5) * cell2 + rng2.uniform(-cell2 / 4, cell2 / 4);
        family2.push_back(make_line(config.slope2, anchor_i, extent / 2));
    }

    // --- pairwise crossings (kept when within the frame plus a gap margin) --
    const double margin = std::max(gap, 2.0);
    std::vector<std::vector<Crossing>> onto1(family1.size()), onto2(family2.size());
    int n_anticrossings = 0;
    for (std::size_t a = 0; a < family1.size(); ++a) {
        for (std::size_t b = 0; b < family2.size(); ++b) {
            const Line& la = family1[a];
            const Line& lb = family2[b];
            const double jx = (lb.intercept - la.intercept) / (la.slope - lb.slope);
            const double ix = la.slope * jx + la.intercept;
            if (ix < -margin || ix > extent + margin || jx < -margin || jx > extent + margin)
                continue;
            Vec2 bis{la.normal.i + lb.normal.i, la.normal.j + lb.normal.j};
            const double norm = std::hypot(bis.i, bis.j);
            bis = {bis.i / norm, bis.j / norm};
            Crossing cr{{ix, jx}, bis};
            onto1[a].push_back(cr);
            onto2[b].push_back(cr);
            ++n_anticrossings;
        }
    }

    // --- sample each entity's displaced centerline -------------------------
    // An entity is one family line (bent near its crossings) or one interdot
    // segment bridging the two branch break points of a crossing.
    std::vector<std::vector<Vec2>> entities;

    auto sample_line = [&](const Line& line, bool steep,
                           const std::vector<Crossing>& crossings) {
        std::vector<Vec2> pts;
        const double arc = steep ? std::sqrt(1.0 + 1.0 / (line.slope * line.slope))
                                 : std::sqrt(1.0 + line.slope * line.slope);
        for (double p = 0.0; p <= extent; p += step) {
            Vec2 pos = steep ? Vec2{p, (p - line.intercept) / line.slope}
                             : Vec2{line.slope * p + line.intercept, p};
            if (!crossings.empty() && gap > 0.0) {
                // nearest crossing by the along-line parameter (i when steep, j else)
                double best_u = 0.0;
                double best_abs = -1.0;
                for (const Crossing& cr : crossings) {
                    const double u = (p - (steep ? cr.pos.i : cr.pos.j)) * arc;
                    if (best_abs < 0.0 || std::abs(u) < best_abs) {
                        best_abs = std::abs(u);
                        best_u = u;
                    }
                }
                const double offset = branch_offset(best_u, gap);
                const double sign = best_u < 0.0 ? 1.0 : -1.0;
                pos.i += sign * offset * line.normal.i;
                pos.j += sign * offset * line.normal.j;
            }
            pts.push_back(pos);
        }
        entities.push_back(std::move(pts));
    };

    for (std::size_t a = 0; a < family1.size(); ++a) sample_line(family1[a], true, onto1[a]);
    for (std::size_t b = 0; b < family2.size(); ++b) sample_line(family2[b], false, onto2[b]);

    if (gap > 0.0) {
        for (const auto& list : onto1) {
            for (const Crossing& cr : list) {
                std::vector<Vec2> pts;
                const int n = std::max(2, int(std::lround(gap / step)) + 1);
                for (int k = 0; k < n; ++k) {
                    const double t = double(k) / (n - 1) - 0.5; // -0.5 .. 0.5
                    pts.push_back({cr.pos.i + t * gap * cr.direction.i,
                                   cr.pos.j + t * gap * cr.direction.j});
                }
                entities.push_back(std::move(pts));
            }
        }
    }

    // --- rasterize and render ----------------------------------------------
    const std::size_t n_px = std::size_t(size) * size;
    std::vector<std::uint8_t> raster(n_px, 0);
    std::vector<double> signal(n_px);
    for (int i = 0; i < size; ++i)
        for (int j = 0; j < size; ++j)
            signal[std::size_t(i) * size + j] =
                config.background_tilt * double(i + j) / (2.0 * extent);

    const double sigma = config.line_width;
    const double cutoff_sq = 36.0 * sigma * sigma; // 6 sigma; tail < 2e-8
    std::vector<std::uint8_t> bits(n_px);
    for (const auto& entity : entities) {
        std::fill(bits.begin(), bits.end(), 0);
        for (const Vec2& p : entity) raster_point(bits, size, p.i, p.j);
        const bool marked =
            std::any_of(bits.begin(), bits.end(), [](std::uint8_t b) { return b != 0; });
        if (!marked) continue; // entity lies fully outside the frame
        for (std::size_t p = 0; p < n_px; ++p)
            if (bits[p]) raster[p] = 1;
        const std::vector<double> dist_sq = squared_edt(bits, size, size);
        for (std::size_t p = 0; p < n_px; ++p)
            if (dist_sq[p] <= cutoff_sq)
                signal[p] += config.line_contrast * std::exp(-dist_sq[p] / (2.0 * sigma * sigma));
    }

    if (config.noise_sigma > 0.0) {
        Rng noise = substream(config.seed, "synth-noise");
        for (std::size_t p = 0; p < n_px; ++p) signal[p] += config.noise_sigma * noise.normal();
    }

    SyntheticCSD out;
    out.n_anticrossings = n_anticrossings;
    out.line_raster = std::move(raster);
    out.csd.id = "synth-" + std::to_string(config.seed);
    out.csd.height = size;
    out.csd.width = size;
    std::vector<float> raw(n_px);
    for (std::size_t p = 0; p < n_px; ++p) raw[p] = float(signal[p]);
    out.csd.pixels = normalize(raw);
    return out;
}

std::vector<SyntheticCSD> synthesize_dataset(const SyntheticConfig& config, int count,
                                             std::uint64_t base_seed) {
    if (count < 1) throw std::invalid_argument("synthesize_dataset: count must be >= 1");
    std::vector<SyntheticCSD> out;
    out.reserve(std::size_t(count));
    for (int k = 0; k < count; ++k) {
        SyntheticConfig c = config;
        c.seed = base_seed + std::uint64_t(k);
        out.push_back(synthesize_csd(c));
    }
    return out;
}

} // namespace csdr
