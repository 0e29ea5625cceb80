#pragma once
// Adam with bias correction. A non-finite gradient aborts the step with
// NumericFault and leaves parameters and moments untouched.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace csdr {

struct NumericFault : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <typename Real>
struct AdamStateT {
    std::uint64_t step = 0;
    std::vector<Real> m, v;
    Real lr = Real(3e-4);
    Real beta1 = Real(0.9);
    Real beta2 = Real(0.999);
    Real eps = Real(1e-8);
};
using AdamState = AdamStateT<float>;

template <typename Real>
void adam_step(std::span<Real> params, std::span<const Real> grads, AdamStateT<Real>& st) {
    const std::size_t n = params.size();
    if (grads.size() != n) throw std::invalid_argument("adam_step: gradient size mismatch");
    if (st.m.empty()) st.m.assign(n, Real(0));
    if (st.v.empty()) st.v.assign(n, Real(0));
    if (st.m.size() != n || st.v.size() != n)
        throw std::invalid_argument("adam_step: moment size mismatch");
    for (std::size_t k = 0; k < n; ++k)
        if (!std::isfinite(double(grads[k])))
            throw NumericFault("adam_step: non-finite gradient at index " + std::to_string(k));

    st.step += 1;
    const double c1 = 1.0 - std::pow(double(st.beta1), double(st.step));
    const double c2 = 1.0 - std::pow(double(st.beta2), double(st.step));
    for (std::size_t k = 0; k < n; ++k) {
        const Real g = grads[k];
        st.m[k] = st.beta1 * st.m[k] + (Real(1) - st.beta1) * g;
        st.v[k] = st.beta2 * st.v[k] + (Real(1) - st.beta2) * g * g;
        const Real mhat = Real(double(st.m[k]) / c1);
        const Real vhat = Real(double(st.v[k]) / c2);
        params[k] -= st.lr * mhat / (std::sqrt(vhat) + st.eps);
    }
}

} // namespace csdr
