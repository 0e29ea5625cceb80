#pragma once
// Differentiable building blocks with hand-written backward passes.
// Conventions:
//   conv3x3        cross-correlation, stride 1, zero padding 1
//   conv weights   [c_out][c_in][3][3] row-major, bias [c_out]
//   dense weights  [out][in] row-major
// Every backward takes the values its forward produced plus the upstream
// gradient and returns exact analytic gradients; the test suite checks them
// against central finite differences in double precision.

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "csdr/tensor.hpp"

namespace csdr {

template <typename Real>
struct LayerGradT {
    TensorT<Real> input_grad;
    std::vector<std::vector<Real>> param_grads; // weight grad, bias grad
};
using LayerGrad = LayerGradT<float>;

namespace detail {

// copies in into a zero-framed (H+2)x(W+2) buffer per channel
template <typename Real>
void zero_pad1(const TensorT<Real>& in, std::vector<Real>& pad) {
    const int C = in.channels, H = in.height, W = in.width, PW = W + 2;
    pad.assign(std::size_t(C) * (H + 2) * PW, Real(0));
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < H; ++i) {
            const Real* src = in.row(c, i);
            Real* dst = pad.data() + (std::size_t(c) * (H + 2) + i + 1) * PW + 1;
            for (int j = 0; j < W; ++j) dst[j] = src[j];
        }
}

// out must be preshaped to (c_out, H, W); pad is scratch
template <typename Real>
void conv3x3_core_generic(const TensorT<Real>& in, const Real* w, const Real* b, int c_out,
                          TensorT<Real>& out, std::vector<Real>& pad) {
    const int C = in.channels, H = in.height, W = in.width, PW = W + 2;
    zero_pad1(in, pad);
    const std::size_t chan_stride = std::size_t(H + 2) * PW;
    for (int i = 0; i < H; ++i) {
        for (int co = 0; co < c_out; ++co) {
            Real* orow = out.row(co, i);
            const Real bias = b ? b[co] : Real(0);
            for (int j = 0; j < W; ++j) orow[j] = bias;
            const Real* wc = w + std::size_t(co) * C * 9;
            for (int ci = 0; ci < C; ++ci) {
                const Real* r0 = pad.data() + std::size_t(ci) * chan_stride + std::size_t(i) * PW;
                const Real* r1 = r0 + PW;
                const Real* r2 = r1 + PW;
                const Real w00 = wc[0], w01 = wc[1], w02 = wc[2];
                const Real w10 = wc[3], w11 = wc[4], w12 = wc[5];
                const Real w20 = wc[6], w21 = wc[7], w22 = wc[8];
#pragma omp simd
                for (int j = 0; j < W; ++j) {
                    Real s = orow[j];
                    s += w00 * r0[j] + w01 * r0[j + 1] + w02 * r0[j + 2];
                    s += w10 * r1[j] + w11 * r1[j + 1] + w12 * r1[j + 2];
                    s += w20 * r2[j] + w21 * r2[j + 1] + w22 * r2[j + 2];
                    orow[j] = s;
                }
                wc += 9;
            }
        }
    }
}

// wg has [c_out][c_in][3][3] layout and must be presized
template <typename Real>
void conv3x3_wgrad_generic(const TensorT<Real>& in, const TensorT<Real>& og, Real* wg) {
    const int C = in.channels, H = in.height, W = in.width, CO = og.channels;
    std::vector<Real> pad;
    zero_pad1(in, pad);
    const int PW = W + 2;
    const std::size_t chan_stride = std::size_t(H + 2) * PW;
    for (int co = 0; co < CO; ++co)
        for (int ci = 0; ci < C; ++ci) {
            Real a00 = 0, a01 = 0, a02 = 0, a10 = 0, a11 = 0, a12 = 0, a20 = 0, a21 = 0, a22 = 0;
            for (int i = 0; i < H; ++i) {
                const Real* grow = og.row(co, i);
                const Real* r0 = pad.data() + std::size_t(ci) * chan_stride + std::size_t(i) * PW;
                const Real* r1 = r0 + PW;
                const Real* r2 = r1 + PW;
                Real s00 = 0, s01 = 0, s02 = 0, s10 = 0, s11 = 0, s12 = 0, s20 = 0, s21 = 0, s22 = 0;
#pragma omp simd reduction(+ : s00, s01, s02, s10, s11, s12, s20, s21, s22)
                for (int j = 0; j < W; ++j) {
                    const Real gv = grow[j];
                    s00 += gv * r0[j];
                    s01 += gv * r0[j + 1];
                    s02 += gv * r0[j + 2];
                    s10 += gv * r1[j];
                    s11 += gv * r1[j + 1];
                    s12 += gv * r1[j + 2];
                    s20 += gv * r2[j];
                    s21 += gv * r2[j + 1];
                    s22 += gv * r2[j + 2];
                }
                a00 += s00; a01 += s01; a02 += s02;
                a10 += s10; a11 += s11; a12 += s12;
                a20 += s20; a21 += s21; a22 += s22;
            }
            Real* wrow = wg + (std::size_t(co) * C + ci) * 9;
            wrow[0] = a00; wrow[1] = a01; wrow[2] = a02;
            wrow[3] = a10; wrow[4] = a11; wrow[5] = a12;
            wrow[6] = a20; wrow[7] = a21; wrow[8] = a22;
        }
}

template <typename Real>
void conv3x3_core(const TensorT<Real>& in, const Real* w, const Real* b, int c_out,
                  TensorT<Real>& out, std::vector<Real>& pad) {
    conv3x3_core_generic(in, w, b, c_out, out, pad);
}

template <typename Real>
void conv3x3_wgrad(const TensorT<Real>& in, const TensorT<Real>& og, Real* wg) {
    conv3x3_wgrad_generic(in, og, wg);
}

// float paths live in conv_kernels.cpp (vectorized where the target allows)
template <>
void conv3x3_core<float>(const TensorT<float>& in, const float* w, const float* b, int c_out,
                         TensorT<float>& out, std::vector<float>& pad);
template <>
void conv3x3_wgrad<float>(const TensorT<float>& in, const TensorT<float>& og, float* wg);

} // namespace detail

template <typename Real>
TensorT<Real> conv3x3(const TensorT<Real>& input, std::span<const Real> weights,
                      std::span<const Real> bias) {
    const int c_out = int(bias.size());
    if (c_out <= 0 || input.channels <= 0)
        throw std::invalid_argument("conv3x3: empty bias or input");
    if (weights.size() != std::size_t(c_out) * input.channels * 9)
        throw std::invalid_argument("conv3x3: channel mismatch between weights, bias and input");
    TensorT<Real> out(c_out, input.height, input.width);
    std::vector<Real> pad;
    detail::conv3x3_core(input, weights.data(), bias.data(), c_out, out, pad);
    return out;
}

template <typename Real>
LayerGradT<Real> conv3x3_backward(const TensorT<Real>& input, std::span<const Real> weights,
                                  std::span<const Real> bias, const TensorT<Real>& output_grad) {
    const int C = input.channels, H = input.height, W = input.width;
    const int c_out = int(bias.size());
    if (weights.size() != std::size_t(c_out) * C * 9)
        throw std::invalid_argument("conv3x3_backward: channel mismatch");
    if (output_grad.channels != c_out || output_grad.height != H || output_grad.width != W)
        throw std::invalid_argument("conv3x3_backward: output_grad shape mismatch");

    LayerGradT<Real> g;
    g.param_grads.resize(2);
    auto& wg = g.param_grads[0];
    auto& bg = g.param_grads[1];
    wg.assign(weights.size(), Real(0));
    bg.assign(std::size_t(c_out), Real(0));

    detail::conv3x3_wgrad(input, output_grad, wg.data());
    for (int co = 0; co < c_out; ++co) {
        Real bsum = 0;
        for (int i = 0; i < H; ++i) {
            const Real* grow = output_grad.row(co, i);
            Real s = 0;
#pragma omp simd reduction(+ : s)
            for (int j = 0; j < W; ++j) s += grow[j];
            bsum += s;
        }
        bg[co] = bsum;
    }

    // input gradient: correlate output_grad with the flipped, transposed kernel
    std::vector<Real> pad;
    std::vector<Real> wt(std::size_t(C) * c_out * 9);
    for (int co = 0; co < c_out; ++co)
        for (int ci = 0; ci < C; ++ci)
            for (int k = 0; k < 9; ++k)
                wt[(std::size_t(ci) * c_out + co) * 9 + (8 - k)] =
                    weights[(std::size_t(co) * C + ci) * 9 + k];
    g.input_grad.reshape(C, H, W);
    detail::conv3x3_core(output_grad, wt.data(), static_cast<const Real*>(nullptr), C,
                         g.input_grad, pad);
    return g;
}

// 2x2 max pooling, stride 2. Ties resolved to the first element in
// top-left, top-right, bottom-left, bottom-right order.
template <typename Real>
std::pair<TensorT<Real>, std::vector<std::uint8_t>> maxpool2x2(const TensorT<Real>& in) {
    if (in.height % 2 != 0 || in.width % 2 != 0)
        throw std::invalid_argument("maxpool2x2: odd input dimensions");
    const int C = in.channels, OH = in.height / 2, OW = in.width / 2;
    TensorT<Real> out(C, OH, OW);
    std::vector<std::uint8_t> argmax(out.size());
    for (int c = 0; c < C; ++c)
        for (int oi = 0; oi < OH; ++oi) {
            const Real* r0 = in.row(c, 2 * oi);
            const Real* r1 = in.row(c, 2 * oi + 1);
            Real* orow = out.row(c, oi);
            std::uint8_t* arow = argmax.data() + (std::size_t(c) * OH + oi) * OW;
            for (int oj = 0; oj < OW; ++oj) {
                Real best = r0[2 * oj];
                std::uint8_t idx = 0;
                if (r0[2 * oj + 1] > best) { best = r0[2 * oj + 1]; idx = 1; }
                if (r1[2 * oj] > best) { best = r1[2 * oj]; idx = 2; }
                if (r1[2 * oj + 1] > best) { best = r1[2 * oj + 1]; idx = 3; }
                orow[oj] = best;
                arow[oj] = idx;
            }
        }
    return {std::move(out), std::move(argmax)};
}

template <typename Real>
TensorT<Real> maxpool2x2_backward(const std::vector<std::uint8_t>& argmax, int in_h, int in_w,
                                  const TensorT<Real>& output_grad) {
    const int C = output_grad.channels, OH = output_grad.height, OW = output_grad.width;
    if (in_h != 2 * OH || in_w != 2 * OW || argmax.size() != output_grad.size())
        throw std::invalid_argument("maxpool2x2_backward: shape mismatch");
    TensorT<Real> ig(C, in_h, in_w);
    for (int c = 0; c < C; ++c)
        for (int oi = 0; oi < OH; ++oi) {
            const Real* grow = output_grad.row(c, oi);
            const std::uint8_t* arow = argmax.data() + (std::size_t(c) * OH + oi) * OW;
            for (int oj = 0; oj < OW; ++oj) {
                const int di = arow[oj] >> 1, dj = arow[oj] & 1;
                ig.at(c, 2 * oi + di, 2 * oj + dj) = grow[oj];
            }
        }
    return ig;
}

namespace detail {
// half-pixel-centered source coordinates with border clamp
inline void bilinear_axis(int out_n, int in_n, std::vector<int>& lo, std::vector<int>& hi,
                          std::vector<double>& frac) {
    lo.resize(out_n);
    hi.resize(out_n);
    frac.resize(out_n);
    for (int i = 0; i < out_n; ++i) {
        double s = (i + 0.5) / 2.0 - 0.5;
        if (s < 0) s = 0;
        if (s > in_n - 1) s = in_n - 1;
        int i0 = int(std::floor(s));
        if (i0 > in_n - 1) i0 = in_n - 1;
        lo[i] = i0;
        hi[i] = (i0 + 1 < in_n) ? i0 + 1 : in_n - 1;
        frac[i] = s - i0;
    }
}
} // namespace detail

template <typename Real>
TensorT<Real> bilinear_upsample2x(const TensorT<Real>& in) {
    const int C = in.channels, H = in.height, W = in.width;
    TensorT<Real> out(C, 2 * H, 2 * W);
    std::vector<int> ilo, ihi, jlo, jhi;
    std::vector<double> ifr, jfr;
    detail::bilinear_axis(2 * H, H, ilo, ihi, ifr);
    detail::bilinear_axis(2 * W, W, jlo, jhi, jfr);
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < 2 * H; ++i) {
            const Real* r0 = in.row(c, ilo[i]);
            const Real* r1 = in.row(c, ihi[i]);
            const Real fi = Real(ifr[i]);
            Real* orow = out.row(c, i);
            for (int j = 0; j < 2 * W; ++j) {
                const Real fj = Real(jfr[j]);
                const Real top = r0[jlo[j]] * (Real(1) - fj) + r0[jhi[j]] * fj;
                const Real bot = r1[jlo[j]] * (Real(1) - fj) + r1[jhi[j]] * fj;
                orow[j] = top * (Real(1) - fi) + bot * fi;
            }
        }
    return out;
}

template <typename Real>
TensorT<Real> bilinear_upsample2x_backward(const TensorT<Real>& output_grad, int in_h, int in_w) {
    const int C = output_grad.channels;
    if (output_grad.height != 2 * in_h || output_grad.width != 2 * in_w)
        throw std::invalid_argument("bilinear_upsample2x_backward: shape mismatch");
    TensorT<Real> ig(C, in_h, in_w);
    std::vector<int> ilo, ihi, jlo, jhi;
    std::vector<double> ifr, jfr;
    detail::bilinear_axis(2 * in_h, in_h, ilo, ihi, ifr);
    detail::bilinear_axis(2 * in_w, in_w, jlo, jhi, jfr);
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < 2 * in_h; ++i) {
            const Real fi = Real(ifr[i]);
            const Real* grow = output_grad.row(c, i);
            Real* r0 = ig.row(c, ilo[i]);
            Real* r1 = ig.row(c, ihi[i]);
            for (int j = 0; j < 2 * in_w; ++j) {
                const Real fj = Real(jfr[j]);
                const Real gv = grow[j];
                r0[jlo[j]] += gv * (Real(1) - fi) * (Real(1) - fj);
                r0[jhi[j]] += gv * (Real(1) - fi) * fj;
                r1[jlo[j]] += gv * fi * (Real(1) - fj);
                r1[jhi[j]] += gv * fi * fj;
            }
        }
    return ig;
}

template <typename Real>
void relu_inplace(TensorT<Real>& t) {
    for (auto& v : t.data)
        if (v < Real(0)) v = Real(0);
}

template <typename Real>
TensorT<Real> relu(const TensorT<Real>& in) {
    TensorT<Real> out = in;
    relu_inplace(out);
    return out;
}

// activation_out is the forward result; gradient at exactly zero is zero
template <typename Real>
TensorT<Real> relu_backward(const TensorT<Real>& activation_out, const TensorT<Real>& output_grad) {
    if (!activation_out.same_shape(output_grad))
        throw std::invalid_argument("relu_backward: shape mismatch");
    TensorT<Real> ig(output_grad.channels, output_grad.height, output_grad.width);
    const std::size_t n = ig.size();
    for (std::size_t k = 0; k < n; ++k)
        ig.data[k] = activation_out.data[k] > Real(0) ? output_grad.data[k] : Real(0);
    return ig;
}

// exact GELU, x * Phi(x)
template <typename Real>
Real gelu_scalar(Real x) {
    return x * Real(0.5) * (Real(1) + Real(std::erf(double(x) * 0.70710678118654752440)));
}

template <typename Real>
std::vector<Real> gelu(std::span<const Real> x) {
    std::vector<Real> out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = gelu_scalar(x[k]);
    return out;
}

template <typename Real>
std::vector<Real> gelu_backward(std::span<const Real> x, std::span<const Real> output_grad) {
    if (x.size() != output_grad.size())
        throw std::invalid_argument("gelu_backward: size mismatch");
    std::vector<Real> ig(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double xv = double(x[k]);
        const double phi = 0.5 * (1.0 + std::erf(xv * 0.70710678118654752440));
        const double pdf = std::exp(-0.5 * xv * xv) * 0.39894228040143267794;
        ig[k] = output_grad[k] * Real(phi + xv * pdf);
    }
    return ig;
}

// y = W x + b, W is [out][in] row-major
template <typename Real>
std::vector<Real> dense(std::span<const Real> x, std::span<const Real> w, std::span<const Real> b) {
    const std::size_t out_n = b.size(), in_n = x.size();
    if (w.size() != out_n * in_n) throw std::invalid_argument("dense: weight size mismatch");
    std::vector<Real> y(out_n);
    for (std::size_t o = 0; o < out_n; ++o) {
        Real s = b[o];
        const Real* wr = w.data() + o * in_n;
        for (std::size_t k = 0; k < in_n; ++k) s += wr[k] * x[k];
        y[o] = s;
    }
    return y;
}

template <typename Real>
struct DenseGradT {
    std::vector<Real> input_grad, weight_grad, bias_grad;
};

template <typename Real>
DenseGradT<Real> dense_backward(std::span<const Real> x, std::span<const Real> w,
                                std::span<const Real> output_grad) {
    const std::size_t out_n = output_grad.size(), in_n = x.size();
    if (w.size() != out_n * in_n) throw std::invalid_argument("dense_backward: weight size mismatch");
    DenseGradT<Real> g;
    g.input_grad.assign(in_n, Real(0));
    g.weight_grad.resize(out_n * in_n);
    g.bias_grad.assign(output_grad.begin(), output_grad.end());
    for (std::size_t o = 0; o < out_n; ++o) {
        const Real gv = output_grad[o];
        const Real* wr = w.data() + o * in_n;
        Real* wg = g.weight_grad.data() + o * in_n;
        for (std::size_t k = 0; k < in_n; ++k) {
            wg[k] = gv * x[k];
            g.input_grad[k] += gv * wr[k];
        }
    }
    return g;
}

template <typename Real>
Real mse(const TensorT<Real>& pred, const TensorT<Real>& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse: shape mismatch");
    if (pred.size() == 0) throw std::invalid_argument("mse: empty tensors");
    double acc = 0;
    for (std::size_t k = 0; k < pred.size(); ++k) {
        const double d = double(pred.data[k]) - double(target.data[k]);
        acc += d * d;
    }
    return Real(acc / double(pred.size()));
}

template <typename Real>
TensorT<Real> mse_backward(const TensorT<Real>& pred, const TensorT<Real>& target) {
    if (!pred.same_shape(target)) throw std::invalid_argument("mse_backward: shape mismatch");
    if (pred.size() == 0) throw std::invalid_argument("mse_backward: empty tensors");
    TensorT<Real> g(pred.channels, pred.height, pred.width);
    const Real scale = Real(2) / Real(pred.size());
    for (std::size_t k = 0; k < pred.size(); ++k)
        g.data[k] = scale * (pred.data[k] - target.data[k]);
    return g;
}

} // namespace csdr
