#include "csdr/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csdr {

Tensor reverse_diffuse(const DenoiseFn& denoise, const Tensor& y, const MeasurementMask& mask,
                       const NoiseSchedule& sched, Rng& rng, const SampleOptions& opt) {
    if (y.channels != 1 || y.height != mask.height || y.width != mask.width)
        throw std::invalid_argument("reverse_diffuse: conditioning shape mismatch");
    const int H = y.height, W = y.width;
    const std::size_t n = y.size();

    Tensor x(1, H, W);
    for (auto& v : x.data) v = rng.normal_f();

    Tensor x0_hat(1, H, W);
    for (int t = sched.T - 1; t >= 0; --t) {
        denoise(x, t, x0_hat);
        for (auto& v : x0_hat.data) v = std::clamp(v, 0.0f, 1.0f);

        const double abar = sched.alpha_bar[t];
        const double abar_prev = t > 0 ? sched.alpha_bar[t - 1] : 1.0;
        const float c0 = float(std::sqrt(abar_prev) * sched.beta[t] / (1.0 - abar));
        const float ct = float(std::sqrt(sched.alpha[t]) * (1.0 - abar_prev) / (1.0 - abar));
        const float sigma = t > 0
            ? float(std::sqrt(sched.beta[t] * (1.0 - abar_prev) / (1.0 - abar)))
            : 0.0f;
        for (std::size_t k = 0; k < n; ++k) {
            float v = c0 * x0_hat.data[k] + ct * x.data[k];
            if (sigma > 0.0f) v += sigma * rng.normal_f();
            x.data[k] = v;
        }
        if (opt.replace_known && t > 0) {
            const float a = float(sched.sqrt_alpha_bar[t - 1]);
            const float b = float(sched.sqrt_one_minus_alpha_bar[t - 1]);
            for (std::size_t k = 0; k < n; ++k)
                if (mask.bits[k]) x.data[k] = a * y.data[k] + b * rng.normal_f();
        }
    }

    // measured pixels are authoritative in the output
    for (std::size_t k = 0; k < n; ++k)
        if (mask.bits[k]) x.data[k] = y.data[k];
    return x;
}

Tensor reconstruct_diffusion(const Denoiser& net, const Tensor& y, const MeasurementMask& mask,
                             const NoiseSchedule& sched, Rng& rng, const SampleOptions& opt) {
    const Tensor m = mask.as_tensor();
    UNetWorkspace ws;
    DenoiseFn fn = [&](const Tensor& x_t, int t, Tensor& x0_hat) {
        const Tensor& out = denoiser_forward(net, x_t, y, m, t, ws);
        x0_hat = out;
    };
    return reverse_diffuse(fn, y, mask, sched, rng, opt);
}

} // namespace csdr
