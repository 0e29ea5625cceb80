#pragma once
// Charge stability diagram container plus disk formats: a binary image format
// ("CSD1", little-endian, row-major float32) and CSV import for measured maps.

#include <filesystem>
#include <string>
#include <vector>

#include "csdr/tensor.hpp"

namespace csdr {

struct VoltageWindow {
    double v1_min = 0.0, v1_max = 1.0; // slow axis, rows
    double v2_min = 0.0, v2_max = 1.0; // fast axis, columns
};

struct ChargeStabilityDiagram {
    std::string id;
    int height = 0;
    int width = 0;
    VoltageWindow window;
    std::vector<float> pixels; // row-major, normalized to [0,1]

    float at(int i, int j) const { return pixels[std::size_t(i) * width + j]; }
    Tensor as_tensor() const;
};

// min-max normalization to [0,1]; constant input maps to all 0.5
std::vector<float> normalize(const std::vector<float>& raw);

void save_csdc(const std::filesystem::path& path, const ChargeStabilityDiagram& csd);
ChargeStabilityDiagram load_csdc(const std::filesystem::path& path);

// numeric grid, one row per line; a single leading header row is tolerated
ChargeStabilityDiagram import_csv(const std::filesystem::path& path, const VoltageWindow& window);

} // namespace csdr
