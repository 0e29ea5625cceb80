#pragma once
// Measurement masks: which pixels of a diagram were actually acquired.
// Two families: regular subsampling grids ("grid:n") and unions of horizontal
// and vertical sweep bands ("lc:nh-nv-th-tv").

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "csdr/csd.hpp"
#include "csdr/rng.hpp"
#include "csdr/tensor.hpp"

namespace csdr {

struct GridMaskSpec {
    int reduce_factor = 5; // keep every n-th row and column
};

struct LineCutSpec {
    int n_h = 8; // horizontal sweep count
    int n_v = 8; // vertical sweep count
    int t_h = 4; // rows per horizontal sweep
    int t_v = 4; // columns per vertical sweep
};

using MaskSpec = std::variant<GridMaskSpec, LineCutSpec>;

struct MeasurementMask {
    int height = 0;
    int width = 0;
    std::vector<std::uint8_t> bits; // 1 = measured
    MaskSpec spec;

    std::size_t count() const;
    double density() const;
    Tensor as_tensor() const;
};

MeasurementMask make_grid_mask(int height, int width, const GridMaskSpec& spec);

// sweeps are centered on an even partition of each axis; when rng is given
// each sweep center is jittered within its partition cell
MeasurementMask make_line_cut_mask(int height, int width, const LineCutSpec& spec,
                                   Rng* rng = nullptr);

MeasurementMask make_mask(int height, int width, const MaskSpec& spec, Rng* rng = nullptr);

// measured pixels keep their value, unmeasured become zero
Tensor apply_mask(const ChargeStabilityDiagram& csd, const MeasurementMask& mask);
Tensor apply_mask(const Tensor& image, const MeasurementMask& mask);

// "grid:5" or "lc:8-8-4-4"
MaskSpec parse_mask_spec(const std::string& text);
std::string format_mask_spec(const MaskSpec& spec);

} // namespace csdr
