#pragma once
// Synthetic double-dot charge stability diagrams: two families of transition
// lines (near-vertical and near-horizontal) with avoided crossings, Gaussian
// line profiles over a tilted background, plus white noise. The generator
// also emits the exact 1-px raster of drawn line centers so structure metrics
// can be validated against a known answer.

#include <cstdint>
#include <vector>

#include "csdr/csd.hpp"

namespace csdr {

struct SyntheticConfig {
    int size = 128;              // square image side, px
    int n_lines_family1 = 4;     // near-vertical lines (count >= 1)
    int n_lines_family2 = 4;     // near-horizontal lines (count >= 1)
    double slope1 = -8.0;        // di/dj of family 1; requires |slope1| > 1
    double slope2 = -0.12;       // di/dj of family 2; requires |slope2| < 1
    double line_width = 1.5;     // Gaussian cross-section sigma, px (>= 1)
    double line_contrast = 0.6;  // profile amplitude before normalization (> 0)
    double background_tilt = 0.15; // plane rise across the anti-diagonal
    double noise_sigma = 0.05;   // white-noise std before normalization (>= 0)
    double anticrossing_gap = 3.0; // branch separation at a crossing, px (>= 0)
    std::uint64_t seed = 1;
};

struct SyntheticCSD {
    ChargeStabilityDiagram csd;
    std::vector<std::uint8_t> line_raster; // size*size, 1 = drawn line-center px
    int n_anticrossings = 0;               // crossings given the avoided-crossing shape
};

// Throws std::invalid_argument when a field violates its documented range.
void validate(const SyntheticConfig& config);

SyntheticCSD synthesize_csd(const SyntheticConfig& config);

// count images from config with seeds base_seed+k and ids "synth-<seed>".
std::vector<SyntheticCSD> synthesize_dataset(const SyntheticConfig& config, int count,
                                             std::uint64_t base_seed);

} // namespace csdr
