#include "csdr/schedule.hpp"

#include <cmath>
#include <stdexcept>

namespace csdr {

NoiseSchedule build_schedule(int T, double beta_start, double beta_end) {
    if (T < 2) throw std::invalid_argument("build_schedule: T must be at least 2");
    if (!(beta_start > 0.0) || !(beta_end < 1.0) || beta_start > beta_end)
        throw std::invalid_argument("build_schedule: need 0 < beta_start <= beta_end < 1");
    NoiseSchedule s;
    s.T = T;
    s.beta.resize(T);
    s.alpha.resize(T);
    s.alpha_bar.resize(T);
    s.sqrt_alpha_bar.resize(T);
    s.sqrt_one_minus_alpha_bar.resize(T);
    double prod = 1.0;
    for (int t = 0; t < T; ++t) {
        s.beta[t] = beta_start + (beta_end - beta_start) * double(t) / double(T - 1);
        s.alpha[t] = 1.0 - s.beta[t];
        prod *= s.alpha[t];
        s.alpha_bar[t] = prod;
        s.sqrt_alpha_bar[t] = std::sqrt(prod);
        s.sqrt_one_minus_alpha_bar[t] = std::sqrt(1.0 - prod);
    }
    return s;
}

Tensor forward_noise(const Tensor& x0, int t, const NoiseSchedule& sched, Rng& rng,
                     const Tensor* eps, Tensor* eps_out) {
    if (t < 0 || t >= sched.T) throw std::invalid_argument("forward_noise: t out of range");
    if (eps && !eps->same_shape(x0))
        throw std::invalid_argument("forward_noise: eps shape mismatch");
    Tensor xt(x0.channels, x0.height, x0.width);
    if (eps_out) eps_out->reshape(x0.channels, x0.height, x0.width);
    const float a = float(sched.sqrt_alpha_bar[t]);
    const float b = float(sched.sqrt_one_minus_alpha_bar[t]);
    for (std::size_t k = 0; k < x0.size(); ++k) {
        const float e = eps ? eps->data[k] : rng.normal_f();
        xt.data[k] = a * x0.data[k] + b * e;
        if (eps_out) eps_out->data[k] = e;
    }
    return xt;
}

} // namespace csdr
