#pragma once
// Model checkpoints: "QDDM" magic, format version, diffusion step count,
// architecture knobs, then the flat parameter vector as little-endian f32.

#include <filesystem>

#include "csdr/unet.hpp"

namespace csdr {

struct Checkpoint {
    int T = 0;
    Denoiser net;
};

void save_checkpoint(const std::filesystem::path& path, int T, const Denoiser& net);
Checkpoint load_checkpoint(const std::filesystem::path& path);

} // namespace csdr
