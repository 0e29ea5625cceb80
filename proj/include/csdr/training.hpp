#pragma once
// Denoiser training: per item draw a timestep and noise realization, predict
// the clean image from the noised one, take the mean MSE over the batch, and
// apply one Adam update. Item noise is drawn up front in item order, so the
// result is identical for any worker-thread count.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "csdr/masking.hpp"
#include "csdr/optim.hpp"
#include "csdr/schedule.hpp"
#include "csdr/unet.hpp"

namespace csdr {

struct TrainItem {
    Tensor x0; // clean image
    Tensor y;  // masked measurements
    Tensor m;  // mask plane
};

struct TrainConfig {
    int T = 60;
    int epochs = 30;
    int batch_size = 16;
    float lr = 3e-4f;
    std::uint64_t seed = 0;
    int threads = 1;
    std::vector<int> checkpoint_epochs = {1, 5, 10, 15, 20, 25, 30};
};

struct EpochStats {
    int epoch = 0;
    double train_loss = 0.0;
    std::optional<double> val_loss;
};

using CheckpointSink = std::function<void(const EpochStats&, const Denoiser&)>;

// one optimizer update over a batch; returns the batch loss
float training_step(Denoiser& net, AdamState& opt, const NoiseSchedule& sched,
                    const std::vector<const TrainItem*>& batch, Rng& noise_rng, int threads = 1);

// full loop; sink fires at each checkpoint epoch after validation
std::vector<EpochStats> train_denoiser(Denoiser& net, const std::vector<TrainItem>& train_items,
                                       const std::vector<TrainItem>& val_items,
                                       const TrainConfig& cfg, const CheckpointSink& sink = {});

TrainItem make_train_item(const ChargeStabilityDiagram& csd, const MeasurementMask& mask);

// epoch 1 plus every fifth epoch up to the horizon
std::vector<int> default_checkpoint_epochs(int epochs);

} // namespace csdr
