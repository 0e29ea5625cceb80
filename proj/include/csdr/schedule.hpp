#pragma once
// Linear variance schedule for the diffusion process and the closed-form
// forward marginal x_t = sqrt(abar_t) x0 + sqrt(1 - abar_t) eps.

#include <vector>

#include "csdr/rng.hpp"
#include "csdr/tensor.hpp"

namespace csdr {

struct NoiseSchedule {
    int T = 0;
    std::vector<double> beta;           // beta_t
    std::vector<double> alpha;          // 1 - beta_t
    std::vector<double> alpha_bar;      // prod alpha_0..t
    std::vector<double> sqrt_alpha_bar; // cached roots
    std::vector<double> sqrt_one_minus_alpha_bar;
};

// beta ramps linearly from beta_start at t=0 to beta_end at t=T-1
NoiseSchedule build_schedule(int T, double beta_start = 1e-4, double beta_end = 2e-2);

// draws eps fresh from rng when eps is null, otherwise uses the given tensor
Tensor forward_noise(const Tensor& x0, int t, const NoiseSchedule& sched, Rng& rng,
                     const Tensor* eps = nullptr, Tensor* eps_out = nullptr);

} // namespace csdr
