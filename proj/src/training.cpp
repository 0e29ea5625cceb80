#include "csdr/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace csdr {

namespace {

struct WorkUnit {
    const TrainItem* item = nullptr;
    int t = 0;
    Tensor eps;
};

// forward + backward for units [first, last) with stride, grads into slots
void run_units(const Denoiser& net, const NoiseSchedule& sched, const std::vector<WorkUnit>& units,
               std::size_t first, std::size_t stride, std::vector<float>& losses,
               std::vector<std::vector<float>>& grad_slots, UNetWorkspace& ws) {
    for (std::size_t u = first; u < units.size(); u += stride) {
        const WorkUnit& wu = units[u];
        const float a = float(sched.sqrt_alpha_bar[wu.t]);
        const float b = float(sched.sqrt_one_minus_alpha_bar[wu.t]);
        Tensor x_t(1, wu.item->x0.height, wu.item->x0.width);
        for (std::size_t k = 0; k < x_t.size(); ++k)
            x_t.data[k] = a * wu.item->x0.data[k] + b * wu.eps.data[k];
        const Tensor& pred = denoiser_forward(net, x_t, wu.item->y, wu.item->m, wu.t, ws);
        losses[u] = mse(pred, wu.item->x0);
        const Tensor g = mse_backward(pred, wu.item->x0);
        denoiser_backward(net, ws, g, grad_slots[u]);
    }
}

float batch_pass(const Denoiser& net, const NoiseSchedule& sched, const std::vector<WorkUnit>& units,
                 int threads, std::vector<float>& grad_out) {
    const std::size_t n = units.size();
    std::vector<float> losses(n, 0.0f);
    std::vector<std::vector<float>> slots(n);
    const int nt = std::max(1, std::min<int>(threads, int(n)));
    if (nt == 1) {
        UNetWorkspace ws;
        run_units(net, sched, units, 0, 1, losses, slots, ws);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(nt);
        for (int tid = 0; tid < nt; ++tid)
            pool.emplace_back([&, tid] {
                UNetWorkspace ws;
                run_units(net, sched, units, std::size_t(tid), std::size_t(nt), losses, slots, ws);
            });
        for (auto& th : pool) th.join();
    }

    // sum in item order so the result does not depend on the thread count
    grad_out.assign(net.params.size(), 0.0f);
    for (std::size_t u = 0; u < n; ++u) {
        const auto& s = slots[u];
        for (std::size_t k = 0; k < grad_out.size(); ++k) grad_out[k] += s[k];
    }
    const float inv = 1.0f / float(n);
    for (auto& v : grad_out) v *= inv;
    float loss = 0.0f;
    for (float l : losses) loss += l;
    return loss * inv;
}

std::vector<WorkUnit> draw_units(const std::vector<const TrainItem*>& batch, int T, Rng& rng) {
    std::vector<WorkUnit> units(batch.size());
    for (std::size_t u = 0; u < batch.size(); ++u) {
        units[u].item = batch[u];
        units[u].t = int(rng.below(std::uint64_t(T)));
        units[u].eps.reshape(1, batch[u]->x0.height, batch[u]->x0.width);
        for (auto& v : units[u].eps.data) v = rng.normal_f();
    }
    return units;
}

} // namespace

float training_step(Denoiser& net, AdamState& opt, const NoiseSchedule& sched,
                    const std::vector<const TrainItem*>& batch, Rng& noise_rng, int threads) {
    if (batch.empty()) throw std::invalid_argument("training_step: empty batch");
    const auto units = draw_units(batch, sched.T, noise_rng);
    std::vector<float> grad;
    const float loss = batch_pass(net, sched, units, threads, grad);
    if (!std::isfinite(loss)) throw NumericFault("training_step: non-finite loss");
    adam_step<float>(net.params, grad, opt);
    return loss;
}

std::vector<int> default_checkpoint_epochs(int epochs) {
    std::vector<int> out;
    if (epochs >= 1) out.push_back(1);
    for (int e = 5; e <= epochs; e += 5) out.push_back(e);
    return out;
}

TrainItem make_train_item(const ChargeStabilityDiagram& csd, const MeasurementMask& mask) {
    TrainItem it;
    it.x0 = csd.as_tensor();
    it.m = mask.as_tensor();
    it.y = apply_mask(it.x0, mask);
    return it;
}

std::vector<EpochStats> train_denoiser(Denoiser& net, const std::vector<TrainItem>& train_items,
                                       const std::vector<TrainItem>& val_items,
                                       const TrainConfig& cfg, const CheckpointSink& sink) {
    if (train_items.empty()) throw std::invalid_argument("train_denoiser: no training items");
    if (cfg.epochs < 1 || cfg.batch_size < 1 || cfg.T < 1)
        throw std::invalid_argument("train_denoiser: bad config");
    const NoiseSchedule sched = build_schedule(cfg.T);
    AdamState opt;
    opt.lr = cfg.lr;

    // fixed validation draws keep the curve comparable across epochs
    std::vector<WorkUnit> val_units;
    {
        Rng vr = substream(cfg.seed, "val-noise");
        val_units.resize(val_items.size());
        for (std::size_t u = 0; u < val_items.size(); ++u) {
            val_units[u].item = &val_items[u];
            val_units[u].t = int(vr.below(std::uint64_t(cfg.T)));
            val_units[u].eps.reshape(1, val_items[u].x0.height, val_items[u].x0.width);
            for (auto& v : val_units[u].eps.data) v = vr.normal_f();
        }
    }

    std::vector<EpochStats> stats;
    std::vector<std::size_t> order(train_items.size());
    std::iota(order.begin(), order.end(), std::size_t(0));
    std::vector<float> grad;

    for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
        Rng shuffle_rng = substream(cfg.seed, "shuffle", std::uint64_t(epoch));
        shuffle(order, shuffle_rng);
        Rng noise_rng = substream(cfg.seed, "train-noise", std::uint64_t(epoch));

        double loss_sum = 0.0;
        std::size_t batches = 0;
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
            const std::size_t stop = std::min(order.size(), start + cfg.batch_size);
            std::vector<const TrainItem*> batch;
            batch.reserve(stop - start);
            for (std::size_t k = start; k < stop; ++k) batch.push_back(&train_items[order[k]]);
            const auto units = draw_units(batch, cfg.T, noise_rng);
            const float loss = batch_pass(net, sched, units, cfg.threads, grad);
            if (!std::isfinite(loss))
                throw NumericFault("train_denoiser: non-finite loss at epoch " +
                                   std::to_string(epoch) + ", batch " + std::to_string(batches));
            adam_step<float>(net.params, grad, opt);
            loss_sum += loss;
            ++batches;
        }

        EpochStats es;
        es.epoch = epoch;
        es.train_loss = loss_sum / double(batches);

        const bool is_ckpt = std::find(cfg.checkpoint_epochs.begin(), cfg.checkpoint_epochs.end(),
                                       epoch) != cfg.checkpoint_epochs.end();
        if (is_ckpt) {
            if (!val_units.empty()) {
                UNetWorkspace ws;
                double vsum = 0.0;
                for (const auto& wu : val_units) {
                    const float a = float(sched.sqrt_alpha_bar[wu.t]);
                    const float b = float(sched.sqrt_one_minus_alpha_bar[wu.t]);
                    Tensor x_t(1, wu.item->x0.height, wu.item->x0.width);
                    for (std::size_t k = 0; k < x_t.size(); ++k)
                        x_t.data[k] = a * wu.item->x0.data[k] + b * wu.eps.data[k];
                    const Tensor& pred = denoiser_forward(net, x_t, wu.item->y, wu.item->m, wu.t, ws);
                    vsum += double(mse(pred, wu.item->x0));
                }
                es.val_loss = vsum / double(val_units.size());
            }
            if (sink) sink(es, net);
        }
        stats.push_back(es);
    }
    return stats;
}

} // namespace csdr
