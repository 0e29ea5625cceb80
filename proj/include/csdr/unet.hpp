#pragma once
// Conditional denoiser: a small U-Net that maps (x_t, y, M, t) to a prediction
// of the clean image x0. Channels 0..2 of the input are x_t, y and the mask;
// the remaining channels broadcast a learned embedding of the timestep.
//
// Parameters live in one flat vector; the layer table fixes their order for
// optimizer state and for serialization.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "csdr/layers.hpp"
#include "csdr/rng.hpp"
#include "csdr/tensor.hpp"

namespace csdr {

struct UNetConfig {
    int in_channels = 19;
    int base_channels = 32;
    int levels = 3;
    int time_dim = 16;
    int out_channels = 1;
    bool bottleneck = true;
};

struct LayerInfo {
    std::string name;
    enum Kind { kConv, kDense } kind = kConv;
    int c_out = 0, c_in = 0;
    std::size_t w_offset = 0, w_count = 0;
    std::size_t b_offset = 0, b_count = 0;
};

std::vector<LayerInfo> make_layout(const UNetConfig& cfg);
std::size_t param_count(const UNetConfig& cfg);

// sinusoid features: pairs (sin(w_k t), cos(w_k t)), w_k = 10000^(-k/8)
template <typename Real>
std::vector<Real> time_embedding(int t, int dim) {
    if (t < 0) throw std::invalid_argument("time_embedding: negative t");
    if (dim <= 0 || dim % 2 != 0) throw std::invalid_argument("time_embedding: dim must be even");
    std::vector<Real> e(dim);
    for (int k = 0; k < dim / 2; ++k) {
        const double w = std::pow(10000.0, -double(k) / double(dim / 2));
        e[2 * k] = Real(std::sin(w * t));
        e[2 * k + 1] = Real(std::cos(w * t));
    }
    return e;
}

template <typename Real>
struct DenoiserT {
    UNetConfig cfg;
    std::vector<LayerInfo> layout;
    std::vector<Real> params;

    explicit DenoiserT(const UNetConfig& c = {}) : cfg(c), layout(make_layout(c)) {
        params.assign(param_count(c), Real(0));
    }

    std::span<const Real> w(std::size_t layer) const {
        return {params.data() + layout[layer].w_offset, layout[layer].w_count};
    }
    std::span<const Real> b(std::size_t layer) const {
        return {params.data() + layout[layer].b_offset, layout[layer].b_count};
    }

    // uniform(-r, r) with r = 1/sqrt(fan_in), biases zero
    void init(Rng& rng) {
        for (const auto& li : layout) {
            const double fan_in = li.kind == LayerInfo::kConv ? double(li.c_in) * 9 : double(li.c_in);
            const double r = 1.0 / std::sqrt(fan_in);
            for (std::size_t k = 0; k < li.w_count; ++k)
                params[li.w_offset + k] = Real(rng.uniform(-r, r));
            for (std::size_t k = 0; k < li.b_count; ++k) params[li.b_offset + k] = Real(0);
        }
    }
};
using Denoiser = DenoiserT<float>;

template <typename Real>
struct UNetWorkspaceT {
    int t = 0;
    std::vector<Real> emb_raw, mlp_pre, mlp_act, emb;
    TensorT<Real> input;
    TensorT<Real> proj_out;
    std::vector<TensorT<Real>> enc_a, enc_b, pooled;
    std::vector<std::vector<std::uint8_t>> pool_arg;
    TensorT<Real> bot_a, bot_b;
    std::vector<TensorT<Real>> up, cat, dec_a, dec_b;
    TensorT<Real> out;
    std::vector<Real> scratch;
};
using UNetWorkspace = UNetWorkspaceT<float>;

namespace detail {

template <typename Real>
void concat_channels(const TensorT<Real>& a, const TensorT<Real>& b, TensorT<Real>& out) {
    out.reshape(a.channels + b.channels, a.height, a.width);
    std::copy(a.data.begin(), a.data.end(), out.data.begin());
    std::copy(b.data.begin(), b.data.end(), out.data.begin() + a.data.size());
}

// zeroes grad lanes where the activation was clipped
template <typename Real>
void relu_mask_inplace(const TensorT<Real>& act, TensorT<Real>& g) {
    for (std::size_t k = 0; k < g.size(); ++k)
        if (!(act.data[k] > Real(0))) g.data[k] = Real(0);
}

} // namespace detail

template <typename Real>
const TensorT<Real>& denoiser_forward(const DenoiserT<Real>& net, const TensorT<Real>& x_t,
                                      const TensorT<Real>& y, const TensorT<Real>& mask, int t,
                                      UNetWorkspaceT<Real>& ws) {
    const auto& cfg = net.cfg;
    const int H = x_t.height, W = x_t.width, B = cfg.base_channels, L = cfg.levels;
    if (x_t.channels != 1 || !x_t.same_shape(y) || !x_t.same_shape(mask))
        throw std::invalid_argument("denoiser_forward: conditioning shape mismatch");
    if (H % (1 << L) != 0 || W % (1 << L) != 0)
        throw std::invalid_argument("denoiser_forward: dimensions not divisible by 2^levels");
    if (cfg.in_channels != 3 + cfg.time_dim)
        throw std::invalid_argument("denoiser_forward: in_channels must equal 3 + time_dim");

    // timestep embedding through the two-layer MLP
    ws.t = t;
    ws.emb_raw = time_embedding<Real>(t, cfg.time_dim);
    const auto& lt = net.layout;
    ws.mlp_pre = dense<Real>(ws.emb_raw, net.w(0), net.b(0));
    ws.mlp_act = gelu<Real>(ws.mlp_pre);
    ws.emb = dense<Real>(ws.mlp_act, net.w(1), net.b(1));

    ws.input.reshape(cfg.in_channels, H, W);
    std::copy(x_t.data.begin(), x_t.data.end(), ws.input.chan(0));
    std::copy(y.data.begin(), y.data.end(), ws.input.chan(1));
    std::copy(mask.data.begin(), mask.data.end(), ws.input.chan(2));
    for (int k = 0; k < cfg.time_dim; ++k)
        std::fill_n(ws.input.chan(3 + k), ws.input.plane(), ws.emb[k]);

    std::size_t li = 2; // next layer index in the layout
    ws.proj_out.reshape(B, H, W);
    detail::conv3x3_core(ws.input, net.w(li).data(), net.b(li).data(), B, ws.proj_out, ws.scratch);
    ++li;

    ws.enc_a.resize(L);
    ws.enc_b.resize(L);
    ws.pooled.resize(L);
    ws.pool_arg.resize(L);
    const TensorT<Real>* cur = &ws.proj_out;
    for (int l = 0; l < L; ++l) {
        ws.enc_a[l].reshape(B, cur->height, cur->width);
        detail::conv3x3_core(*cur, net.w(li).data(), net.b(li).data(), B, ws.enc_a[l], ws.scratch);
        relu_inplace(ws.enc_a[l]);
        ++li;
        ws.enc_b[l].reshape(B, cur->height, cur->width);
        detail::conv3x3_core(ws.enc_a[l], net.w(li).data(), net.b(li).data(), B, ws.enc_b[l],
                             ws.scratch);
        relu_inplace(ws.enc_b[l]);
        ++li;
        auto pooled = maxpool2x2(ws.enc_b[l]);
        ws.pooled[l] = std::move(pooled.first);
        ws.pool_arg[l] = std::move(pooled.second);
        cur = &ws.pooled[l];
    }

    if (cfg.bottleneck) {
        ws.bot_a.reshape(B, cur->height, cur->width);
        detail::conv3x3_core(*cur, net.w(li).data(), net.b(li).data(), B, ws.bot_a, ws.scratch);
        relu_inplace(ws.bot_a);
        ++li;
        ws.bot_b.reshape(B, cur->height, cur->width);
        detail::conv3x3_core(ws.bot_a, net.w(li).data(), net.b(li).data(), B, ws.bot_b, ws.scratch);
        relu_inplace(ws.bot_b);
        ++li;
        cur = &ws.bot_b;
    }

    ws.up.resize(L);
    ws.cat.resize(L);
    ws.dec_a.resize(L);
    ws.dec_b.resize(L);
    for (int l = 0; l < L; ++l) {
        ws.up[l] = bilinear_upsample2x(*cur);
        detail::concat_channels(ws.up[l], ws.enc_b[L - 1 - l], ws.cat[l]);
        ws.dec_a[l].reshape(B, ws.cat[l].height, ws.cat[l].width);
        detail::conv3x3_core(ws.cat[l], net.w(li).data(), net.b(li).data(), B, ws.dec_a[l],
                             ws.scratch);
        relu_inplace(ws.dec_a[l]);
        ++li;
        ws.dec_b[l].reshape(B, ws.cat[l].height, ws.cat[l].width);
        detail::conv3x3_core(ws.dec_a[l], net.w(li).data(), net.b(li).data(), B, ws.dec_b[l],
                             ws.scratch);
        relu_inplace(ws.dec_b[l]);
        ++li;
        cur = &ws.dec_b[l];
    }

    ws.out.reshape(cfg.out_channels, H, W);
    detail::conv3x3_core(*cur, net.w(li).data(), net.b(li).data(), cfg.out_channels, ws.out,
                         ws.scratch);
    ++li;
    if (li != lt.size()) throw std::logic_error("denoiser_forward: layout walk mismatch");
    return ws.out;
}

// convenience wrapper when no workspace is kept
template <typename Real>
TensorT<Real> denoiser_forward(const DenoiserT<Real>& net, const TensorT<Real>& x_t,
                               const TensorT<Real>& y, const TensorT<Real>& mask, int t) {
    UNetWorkspaceT<Real> ws;
    return denoiser_forward(net, x_t, y, mask, t, ws);
}

namespace detail {

template <typename Real>
void conv_backward_into(const TensorT<Real>& input, std::span<const Real> w,
                        const TensorT<Real>& og, Real* wg, Real* bg, TensorT<Real>* ig,
                        std::vector<Real>& scratch) {
    const int C = input.channels, CO = og.channels;
    conv3x3_wgrad(input, og, wg);
    for (int co = 0; co < CO; ++co) {
        Real s = 0;
        const Real* base = og.chan(co);
        const std::size_t n = og.plane();
#pragma omp simd reduction(+ : s)
        for (std::size_t k = 0; k < n; ++k) s += base[k];
        bg[co] = s;
    }
    if (ig) {
        std::vector<Real> wt(std::size_t(C) * CO * 9);
        for (int co = 0; co < CO; ++co)
            for (int ci = 0; ci < C; ++ci)
                for (int k = 0; k < 9; ++k)
                    wt[(std::size_t(ci) * CO + co) * 9 + (8 - k)] =
                        w[(std::size_t(co) * C + ci) * 9 + k];
        ig->reshape(C, og.height, og.width);
        conv3x3_core(og, wt.data(), static_cast<const Real*>(nullptr), C, *ig, scratch);
    }
}

} // namespace detail

// gradient of a scalar loss wrt every parameter, given d loss / d out.
// grad_flat is resized to the parameter count and fully overwritten.
template <typename Real>
void denoiser_backward(const DenoiserT<Real>& net, const UNetWorkspaceT<Real>& ws,
                       const TensorT<Real>& output_grad, std::vector<Real>& grad_flat) {
    const auto& cfg = net.cfg;
    const int B = cfg.base_channels, L = cfg.levels;
    const auto& lt = net.layout;
    grad_flat.assign(net.params.size(), Real(0));
    std::vector<Real> scratch;
    auto wgp = [&](std::size_t li) { return grad_flat.data() + lt[li].w_offset; };
    auto bgp = [&](std::size_t li) { return grad_flat.data() + lt[li].b_offset; };

    std::size_t li = lt.size() - 1;

    // output conv
    TensorT<Real> g;
    detail::conv_backward_into(ws.dec_b[L - 1], net.w(li), output_grad, wgp(li), bgp(li), &g,
                               scratch);
    --li;

    // decoder, deepest level first in the layout so walk backwards
    std::vector<TensorT<Real>> skip_grad(L);
    for (int l = L - 1; l >= 0; --l) {
        detail::relu_mask_inplace(ws.dec_b[l], g);
        TensorT<Real> g2;
        detail::conv_backward_into(ws.dec_a[l], net.w(li), g, wgp(li), bgp(li), &g2, scratch);
        --li;
        detail::relu_mask_inplace(ws.dec_a[l], g2);
        TensorT<Real> gcat;
        detail::conv_backward_into(ws.cat[l], net.w(li), g2, wgp(li), bgp(li), &gcat, scratch);
        --li;
        // split: first B channels feed the upsample, the rest feed the skip
        TensorT<Real> gup(B, gcat.height, gcat.width);
        std::copy(gcat.data.begin(), gcat.data.begin() + gup.size(), gup.data.begin());
        auto& gskip = skip_grad[L - 1 - l];
        gskip.reshape(gcat.channels - B, gcat.height, gcat.width);
        std::copy(gcat.data.begin() + gup.size(), gcat.data.end(), gskip.data.begin());
        g = bilinear_upsample2x_backward(gup, gcat.height / 2, gcat.width / 2);
    }

    if (cfg.bottleneck) {
        detail::relu_mask_inplace(ws.bot_b, g);
        TensorT<Real> g2;
        detail::conv_backward_into(ws.bot_a, net.w(li), g, wgp(li), bgp(li), &g2, scratch);
        --li;
        detail::relu_mask_inplace(ws.bot_a, g2);
        detail::conv_backward_into(ws.pooled[L - 1], net.w(li), g2, wgp(li), bgp(li), &g, scratch);
        --li;
    }

    for (int l = L - 1; l >= 0; --l) {
        TensorT<Real> gb =
            maxpool2x2_backward(ws.pool_arg[l], ws.enc_b[l].height, ws.enc_b[l].width, g);
        for (std::size_t k = 0; k < gb.size(); ++k) gb.data[k] += skip_grad[l].data[k];
        detail::relu_mask_inplace(ws.enc_b[l], gb);
        TensorT<Real> g2;
        detail::conv_backward_into(ws.enc_a[l], net.w(li), gb, wgp(li), bgp(li), &g2, scratch);
        --li;
        detail::relu_mask_inplace(ws.enc_a[l], g2);
        const TensorT<Real>& enc_in = (l == 0) ? ws.proj_out : ws.pooled[l - 1];
        detail::conv_backward_into(enc_in, net.w(li), g2, wgp(li), bgp(li), &g, scratch);
        --li;
    }

    // input projection: parameter grads as usual; of the input channels only
    // the broadcast time embedding carries parameters upstream, and the
    // gradient of a broadcast channel is the plain sum of the incoming
    // gradient over that channel's support, which for a zero-padded 3x3
    // correlation reduces to border-trimmed block sums of g.
    detail::conv_backward_into(ws.input, net.w(li), g, wgp(li), bgp(li),
                               static_cast<TensorT<Real>*>(nullptr), scratch);
    const int H = g.height, W = g.width, CO = g.channels;
    std::vector<Real> demb(cfg.time_dim, Real(0));
    for (int co = 0; co < CO; ++co) {
        Real total = 0, row0 = 0, rowl = 0, col0 = 0, coll = 0;
        for (int i = 0; i < H; ++i) {
            const Real* r = g.row(co, i);
            Real s = 0;
#pragma omp simd reduction(+ : s)
            for (int j = 0; j < W; ++j) s += r[j];
            total += s;
            col0 += r[0];
            coll += r[W - 1];
        }
        for (int j = 0; j < W; ++j) {
            row0 += g.at(co, 0, j);
            rowl += g.at(co, H - 1, j);
        }
        Real S[3][3];
        for (int ky = 0; ky < 3; ++ky)
            for (int kx = 0; kx < 3; ++kx) {
                Real s = total;
                if (ky == 0) s -= row0;
                if (ky == 2) s -= rowl;
                if (kx == 0) s -= col0;
                if (kx == 2) s -= coll;
                if (ky == 0 && kx == 0) s += g.at(co, 0, 0);
                if (ky == 0 && kx == 2) s += g.at(co, 0, W - 1);
                if (ky == 2 && kx == 0) s += g.at(co, H - 1, 0);
                if (ky == 2 && kx == 2) s += g.at(co, H - 1, W - 1);
                S[ky][kx] = s;
            }
        const Real* wco = net.params.data() + lt[li].w_offset +
                          std::size_t(co) * cfg.in_channels * 9;
        for (int k = 0; k < cfg.time_dim; ++k) {
            const Real* wk = wco + std::size_t(3 + k) * 9;
            Real acc = 0;
            for (int ky = 0; ky < 3; ++ky)
                for (int kx = 0; kx < 3; ++kx) acc += wk[3 * ky + kx] * S[ky][kx];
            demb[k] += acc;
        }
    }
    --li;

    // time MLP
    auto d2 = dense_backward<Real>(ws.mlp_act, net.w(1), demb);
    std::copy(d2.weight_grad.begin(), d2.weight_grad.end(), wgp(1));
    std::copy(d2.bias_grad.begin(), d2.bias_grad.end(), bgp(1));
    auto dact = gelu_backward<Real>(ws.mlp_pre, d2.input_grad);
    auto d1 = dense_backward<Real>(ws.emb_raw, net.w(0), dact);
    std::copy(d1.weight_grad.begin(), d1.weight_grad.end(), wgp(0));
    std::copy(d1.bias_grad.begin(), d1.bias_grad.end(), bgp(0));
}

} // namespace csdr
