#pragma once
// Reverse diffusion conditioned on sparse measurements. The denoiser predicts
// the clean image; each step forms the posterior mean over x_{t-1} from that
// prediction and adds schedule noise. Measured pixels are pasted back into the
// final image; optionally they are also re-imposed at every step.

#include <functional>

#include "csdr/masking.hpp"
#include "csdr/schedule.hpp"
#include "csdr/unet.hpp"

namespace csdr {

struct SampleOptions {
    bool replace_known = false;
};

// x0_hat(out) <- prediction of the clean image from (x_t, t)
using DenoiseFn = std::function<void(const Tensor& x_t, int t, Tensor& x0_hat)>;

Tensor reverse_diffuse(const DenoiseFn& denoise, const Tensor& y, const MeasurementMask& mask,
                       const NoiseSchedule& sched, Rng& rng, const SampleOptions& opt = {});

// full pipeline for a trained model
Tensor reconstruct_diffusion(const Denoiser& net, const Tensor& y, const MeasurementMask& mask,
                             const NoiseSchedule& sched, Rng& rng, const SampleOptions& opt = {});

} // namespace csdr
