// AVX-512 fast paths for the float conv3x3 forward and weight-gradient
// kernels. Built only when the target supports AVX-512F; otherwise the float
// specializations fall through to the generic scalar implementation in
// layers.hpp. Results are deterministic for a given build.

#include "csdr/layers.hpp"

#include <cstring>
#include <vector>

#if defined(__AVX512F__)
#include <immintrin.h>
#endif

namespace csdr::detail {

#if defined(__AVX512F__)

namespace {

constexpr int kAlignFloats = 16;
// the forward kernels load full 64-column strips and mask only the stores,
// so reads may run past the last row by up to a strip; keep that much slack
constexpr int kTailFloats = 64;

int round16(int n) { return (n + 15) & ~15; }

float* aligned_base(std::vector<float>& buf, std::size_t floats) {
    buf.assign(floats + kAlignFloats + kTailFloats, 0.0f);
    auto addr = reinterpret_cast<std::uintptr_t>(buf.data());
    const std::uintptr_t aligned = (addr + 63) & ~std::uintptr_t(63);
    return buf.data() + (aligned - addr) / sizeof(float);
}

// zero-framed copy with pitched rows; image pixels start at column 1
float* pad_pitched(const TensorT<float>& in, int pitch, std::vector<float>& buf) {
    const int C = in.channels, H = in.height, W = in.width;
    float* base = aligned_base(buf, std::size_t(C) * (H + 2) * pitch);
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < H; ++i)
            std::memcpy(base + (std::size_t(c) * (H + 2) + i + 1) * pitch + 1, in.row(c, i),
                        std::size_t(W) * sizeof(float));
    return base;
}

// rows copied at column 0, trailing lanes stay zero
float* rows_pitched(const TensorT<float>& t, int pitch, std::vector<float>& buf) {
    const int C = t.channels, H = t.height, W = t.width;
    float* base = aligned_base(buf, std::size_t(C) * H * pitch);
    for (int c = 0; c < C; ++c)
        for (int i = 0; i < H; ++i)
            std::memcpy(base + (std::size_t(c) * H + i) * pitch, t.row(c, i),
                        std::size_t(W) * sizeof(float));
    return base;
}

__mmask16 lane_mask(int count) {
    if (count <= 0) return 0;
    if (count >= 16) return __mmask16(0xFFFF);
    return __mmask16((1u << count) - 1u);
}

// two output channels, four output vectors (64 columns) per strip
void fwd_co_pair(const float* p0, const float* p1, const float* p2, std::size_t chan_stride,
                 int n_ci, const float* wa, const float* wb, float ba, float bb, float* out_a,
                 float* out_b, int j0, int W) {
    __m512 a0 = _mm512_set1_ps(ba), a1 = a0, a2 = a0, a3 = a0;
    __m512 b0 = _mm512_set1_ps(bb), b1 = b0, b2 = b0, b3 = b0;
    for (int ci = 0; ci < n_ci; ++ci) {
        const float* r0 = p0 + std::size_t(ci) * chan_stride + j0;
        const float* r1 = p1 + std::size_t(ci) * chan_stride + j0;
        const float* r2 = p2 + std::size_t(ci) * chan_stride + j0;
        const float* wca = wa + ci * 9;
        const float* wcb = wb + ci * 9;
        for (int k = 0; k < 9; ++k) {
            const float* r = (k < 3) ? r0 : (k < 6) ? r1 : r2;
            const int kx = k % 3;
            const __m512 va = _mm512_set1_ps(wca[k]);
            const __m512 vb = _mm512_set1_ps(wcb[k]);
            __m512 x0 = _mm512_loadu_ps(r + kx);
            __m512 x1 = _mm512_loadu_ps(r + kx + 16);
            __m512 x2 = _mm512_loadu_ps(r + kx + 32);
            __m512 x3 = _mm512_loadu_ps(r + kx + 48);
            a0 = _mm512_fmadd_ps(va, x0, a0);
            b0 = _mm512_fmadd_ps(vb, x0, b0);
            a1 = _mm512_fmadd_ps(va, x1, a1);
            b1 = _mm512_fmadd_ps(vb, x1, b1);
            a2 = _mm512_fmadd_ps(va, x2, a2);
            b2 = _mm512_fmadd_ps(vb, x2, b2);
            a3 = _mm512_fmadd_ps(va, x3, a3);
            b3 = _mm512_fmadd_ps(vb, x3, b3);
        }
    }
    const __m512 accs[2][4] = {{a0, a1, a2, a3}, {b0, b1, b2, b3}};
    float* outs[2] = {out_a, out_b};
    for (int h = 0; h < 2; ++h)
        for (int v = 0; v < 4; ++v) {
            const __mmask16 m = lane_mask(W - (j0 + 16 * v));
            if (m) _mm512_mask_storeu_ps(outs[h] + j0 + 16 * v, m, accs[h][v]);
        }
}

void fwd_co_single(const float* p0, const float* p1, const float* p2, std::size_t chan_stride,
                   int n_ci, const float* wa, float ba, float* out_a, int j0, int W) {
    __m512 a0 = _mm512_set1_ps(ba), a1 = a0, a2 = a0, a3 = a0;
    for (int ci = 0; ci < n_ci; ++ci) {
        const float* r0 = p0 + std::size_t(ci) * chan_stride + j0;
        const float* r1 = p1 + std::size_t(ci) * chan_stride + j0;
        const float* r2 = p2 + std::size_t(ci) * chan_stride + j0;
        const float* wca = wa + ci * 9;
        for (int k = 0; k < 9; ++k) {
            const float* r = (k < 3) ? r0 : (k < 6) ? r1 : r2;
            const int kx = k % 3;
            const __m512 va = _mm512_set1_ps(wca[k]);
            a0 = _mm512_fmadd_ps(va, _mm512_loadu_ps(r + kx), a0);
            a1 = _mm512_fmadd_ps(va, _mm512_loadu_ps(r + kx + 16), a1);
            a2 = _mm512_fmadd_ps(va, _mm512_loadu_ps(r + kx + 32), a2);
            a3 = _mm512_fmadd_ps(va, _mm512_loadu_ps(r + kx + 48), a3);
        }
    }
    const __m512 accs[4] = {a0, a1, a2, a3};
    for (int v = 0; v < 4; ++v) {
        const __mmask16 m = lane_mask(W - (j0 + 16 * v));
        if (m) _mm512_mask_storeu_ps(out_a + j0 + 16 * v, m, accs[v]);
    }
}

} // namespace

template <>
void conv3x3_core<float>(const TensorT<float>& in, const float* w, const float* b, int c_out,
                         TensorT<float>& out, std::vector<float>& pad) {
    const int C = in.channels, H = in.height, W = in.width;
    const int pitch = round16(W + 2) + 16;
    const float* base = pad_pitched(in, pitch, pad);
    const std::size_t chan_stride = std::size_t(H + 2) * pitch;
    for (int j0 = 0; j0 < W; j0 += 64) {
        for (int cb = 0; cb < c_out; cb += 8) {
            const int cend = (cb + 8 < c_out) ? cb + 8 : c_out;
            for (int i = 0; i < H; ++i) {
                const float* p0 = base + std::size_t(i) * pitch;
                const float* p1 = p0 + pitch;
                const float* p2 = p1 + pitch;
                int co = cb;
                for (; co + 1 < cend; co += 2) {
                    const float* wa = w + std::size_t(co) * C * 9;
                    const float* wb = wa + std::size_t(C) * 9;
                    const float ba = b ? b[co] : 0.0f;
                    const float bb = b ? b[co + 1] : 0.0f;
                    fwd_co_pair(p0, p1, p2, chan_stride, C, wa, wb, ba, bb, out.row(co, i),
                                out.row(co + 1, i), j0, W);
                }
                if (co < cend) {
                    const float* wa = w + std::size_t(co) * C * 9;
                    const float ba = b ? b[co] : 0.0f;
                    fwd_co_single(p0, p1, p2, chan_stride, C, wa, ba, out.row(co, i), j0, W);
                }
            }
        }
    }
}

template <>
void conv3x3_wgrad<float>(const TensorT<float>& in, const TensorT<float>& og, float* wg) {
    const int C = in.channels, H = in.height, W = in.width, CO = og.channels;
    const int pitch = round16(W + 2) + 16;
    const int og_pitch = round16(W) + 16;
    std::vector<float> pad_buf, og_buf;
    const float* base = pad_pitched(in, pitch, pad_buf);
    const float* ogb = rows_pitched(og, og_pitch, og_buf);
    const std::size_t chan_stride = std::size_t(H + 2) * pitch;
    const int nv = (W + 15) / 16;

    int co = 0;
    for (; co + 1 < CO; co += 2) {
        for (int ci = 0; ci < C; ++ci) {
            __m512 acc[18];
            for (auto& a : acc) a = _mm512_setzero_ps();
            const float* pc = base + std::size_t(ci) * chan_stride;
            for (int i = 0; i < H; ++i) {
                const float* g0 = ogb + (std::size_t(co) * H + i) * og_pitch;
                const float* g1 = ogb + (std::size_t(co + 1) * H + i) * og_pitch;
                const float* r0 = pc + std::size_t(i) * pitch;
                const float* r1 = r0 + pitch;
                const float* r2 = r1 + pitch;
                for (int v = 0; v < nv; ++v) {
                    const int j = 16 * v;
                    const __m512 ga = _mm512_load_ps(g0 + j);
                    const __m512 gb = _mm512_load_ps(g1 + j);
                    const float* rows[3] = {r0 + j, r1 + j, r2 + j};
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx) {
                            const __m512 x = _mm512_loadu_ps(rows[ky] + kx);
                            acc[3 * ky + kx] = _mm512_fmadd_ps(ga, x, acc[3 * ky + kx]);
                            acc[9 + 3 * ky + kx] = _mm512_fmadd_ps(gb, x, acc[9 + 3 * ky + kx]);
                        }
                }
            }
            float* wa = wg + (std::size_t(co) * C + ci) * 9;
            float* wb = wg + (std::size_t(co + 1) * C + ci) * 9;
            for (int k = 0; k < 9; ++k) {
                wa[k] = _mm512_reduce_add_ps(acc[k]);
                wb[k] = _mm512_reduce_add_ps(acc[9 + k]);
            }
        }
    }
    if (co < CO) {
        for (int ci = 0; ci < C; ++ci) {
            __m512 acc[9];
            for (auto& a : acc) a = _mm512_setzero_ps();
            const float* pc = base + std::size_t(ci) * chan_stride;
            for (int i = 0; i < H; ++i) {
                const float* g0 = ogb + (std::size_t(co) * H + i) * og_pitch;
                const float* r0 = pc + std::size_t(i) * pitch;
                const float* r1 = r0 + pitch;
                const float* r2 = r1 + pitch;
                for (int v = 0; v < nv; ++v) {
                    const int j = 16 * v;
                    const __m512 ga = _mm512_load_ps(g0 + j);
                    const float* rows[3] = {r0 + j, r1 + j, r2 + j};
                    for (int ky = 0; ky < 3; ++ky)
                        for (int kx = 0; kx < 3; ++kx)
                            acc[3 * ky + kx] =
                                _mm512_fmadd_ps(ga, _mm512_loadu_ps(rows[ky] + kx), acc[3 * ky + kx]);
                }
            }
            float* wa = wg + (std::size_t(co) * C + ci) * 9;
            for (int k = 0; k < 9; ++k) wa[k] = _mm512_reduce_add_ps(acc[k]);
        }
    }
}

#else // !__AVX512F__

template <>
void conv3x3_core<float>(const TensorT<float>& in, const float* w, const float* b, int c_out,
                         TensorT<float>& out, std::vector<float>& pad) {
    conv3x3_core_generic(in, w, b, c_out, out, pad);
}

template <>
void conv3x3_wgrad<float>(const TensorT<float>& in, const TensorT<float>& og, float* wg) {
    conv3x3_wgrad_generic(in, og, wg);
}

#endif

} // namespace csdr::detail
