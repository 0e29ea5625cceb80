// Throughput probe for the hot paths: 3x3 convolution forward/backward and a
// full denoiser training step. Prints GMAC/s so kernel regressions are easy
// to spot on any host.

#include <chrono>
#include <cstdio>
#include <vector>

#include "csdr/layers.hpp"
#include "csdr/optim.hpp"
#include "csdr/rng.hpp"
#include "csdr/schedule.hpp"
#include "csdr/training.hpp"
#include "csdr/unet.hpp"

using namespace csdr;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void bench_conv(int c_in, int c_out, int h, int w, int reps) {
    Rng rng(42);
    Tensor in(c_in, h, w);
    for (auto& v : in.data) v = rng.normal_f();
    std::vector<float> weights(std::size_t(c_out) * c_in * 9);
    std::vector<float> bias(std::size_t(c_out), 0.0f);
    for (auto& v : weights) v = rng.normal_f() * 0.05f;
    for (auto& v : bias) v = 0.0f;

    Tensor out = conv3x3<float>(in, weights, bias);
    const double macs = double(c_out) * c_in * 9.0 * h * w;

    auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) out = conv3x3<float>(in, weights, bias);
    const double fwd = seconds_since(t0);

    Tensor og(c_out, h, w);
    for (auto& v : og.data) v = rng.normal_f();
    auto grad = conv3x3_backward<float>(in, weights, bias, og);
    t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) grad = conv3x3_backward<float>(in, weights, bias, og);
    const double bwd = seconds_since(t0);

    std::printf("conv3x3 %3dx%-3d %3dx%-3d  fwd %6.1f GMAC/s   bwd %6.1f GMAC/s\n", c_in, c_out,
                h, w, macs * reps / fwd / 1e9, 3.0 * macs * reps / bwd / 1e9);
}

void bench_training_step(int size, int batch, int reps) {
    Rng rng(7);
    const NoiseSchedule sched = build_schedule(60);
    Denoiser net;
    Rng init_rng = substream(7, "init");
    net.init(init_rng);

    std::vector<TrainItem> items;
    items.resize(std::size_t(batch));
    for (TrainItem& it : items) {
        it.x0.reshape(1, size, size);
        it.y.reshape(1, size, size);
        it.m.reshape(1, size, size);
        for (auto& v : it.x0.data) v = rng.next_float();
        for (std::size_t p = 0; p < it.m.size(); ++p) {
            it.m.data[p] = (p % 5 == 0) ? 1.0f : 0.0f;
            it.y.data[p] = it.x0.data[p] * it.m.data[p];
        }
    }
    std::vector<const TrainItem*> batch_ptrs;
    for (const TrainItem& it : items) batch_ptrs.push_back(&it);

    AdamState opt;
    Rng noise(99);
    training_step(net, opt, sched, batch_ptrs, noise); // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int r = 0; r < reps; ++r) training_step(net, opt, sched, batch_ptrs, noise);
    const double dt = seconds_since(t0) / reps;
    std::printf("training step %dx%d batch %d: %.3f s/step (%.1f items/s)\n", size, size, batch,
                dt, batch / dt);
}

} // namespace

int main(int argc, char** argv) {
    int reps = argc > 1 ? std::atoi(argv[1]) : 20;
    if (reps < 1) reps = 1;
    bench_conv(32, 32, 128, 128, reps);
    bench_conv(64, 64, 32, 32, reps * 4);
    bench_conv(19, 32, 128, 128, reps);
    bench_training_step(128, 16, std::max(1, reps / 10));
    return 0;
}
