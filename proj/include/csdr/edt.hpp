#pragma once
// Exact squared Euclidean distance transform of a binary map
// (Felzenszwalb & Huttenlocher lower-envelope algorithm, two 1-D passes).

#include <cstdint>
#include <vector>

namespace csdr {

// Value placed in every output cell when the map contains no feature pixel.
// Larger than any squared distance on a realistic raster; callers that care
// about emptiness should test the input instead of comparing against this.
inline constexpr double kEdtNoFeature = 1e18;

// bits: height*width row-major, nonzero = feature pixel.
// Returns squared Euclidean pixel distance to the nearest feature pixel
// (0 on feature pixels themselves).
std::vector<double> squared_edt(const std::uint8_t* bits, int height, int width);
std::vector<double> squared_edt(const std::vector<std::uint8_t>& bits, int height,
                                int width);

// Row-major index of the (exactly) nearest feature pixel for every pixel;
// deterministic tie resolution. All -1 when the map has no feature pixel.
std::vector<std::int32_t> nearest_feature(const std::uint8_t* bits, int height, int width);

} // namespace csdr
