#pragma once
// Experiment orchestration: dataset preparation (load or synthesize), one
// trained model per (mask, steps) cell with checkpoint reuse, and an
// evaluation sweep over every (method, mask, steps) cell on the held-out
// test set. Writes metrics.csv (per-image rows plus mean/std aggregates),
// timebudget.csv (the idealized acquisition-time model, deterministic) and
// timings.csv (wall-clock measurements, hardware-dependent), plus per-image
// reconstructions and ridge-overlay rasters in the CSD1 format.
//
// Everything except timings.csv is a pure function of (config, seed): rerun
// with the same config and the output bytes are identical.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "csdr/csd.hpp"
#include "csdr/masking.hpp"
#include "csdr/report.hpp"
#include "csdr/splits.hpp"
#include "csdr/synthesis.hpp"

namespace csdr {

// idealized acquisition + inference time: total = n_p * t_p + t_d
struct TimeBudget {
    int n_p = 0;        // measured pixel count
    double t_p = 0.0;   // seconds per measured pixel
    double t_d = 0.0;   // seconds of reconstruction overhead
    double total = 0.0; // n_p * t_p + t_d
};

TimeBudget time_to_reconstruct(int n_p, double t_p, double t_d);
TimeBudget time_to_reconstruct(const MeasurementMask& mask, double t_p, double t_d);

struct ExperimentConfig {
    // data: when dataset_dir is empty, synthesize `synth_count` diagrams from
    // `synth`; otherwise read every *.csd1 file in the directory
    std::filesystem::path dataset_dir;
    SyntheticConfig synth;
    int synth_count = 1120; // 1000 train + 100 val + 20 test by default
    int n_test = 20;
    int n_val = 100;

    std::vector<MaskSpec> masks;                 // nonempty
    std::vector<int> steps = {60};               // subset of {20, 60, 100, 140}
    std::vector<std::string> methods;            // subset of the known methods
    std::uint64_t seed = 1;

    int epochs = 30;
    int batch_size = 16;
    float lr = 3e-4f;
    int threads = 0; // 0 = hardware concurrency (results identical either way)

    double f1_radius = 1.0;          // tolerance for the structure F1 score
    double t_pixel = 25e-6;          // idealized seconds per measured pixel
    double t_diffusion_ref20 = 0.02; // idealized inference seconds at 20 steps
    bool save_images = true;
    bool replace_known = false;      // re-impose measurements at every step
    std::filesystem::path out_dir = "out";
};

extern const std::vector<std::string> kKnownMethods; // diffusion, linear, idw, biharmonic
extern const std::vector<int> kKnownSteps;           // 20, 60, 100, 140

// throws std::invalid_argument on an invalid configuration
void validate(const ExperimentConfig& config);

struct ExperimentOutcome {
    std::vector<MetricRow> rows; // per-image rows, then aggregates, as written
    std::filesystem::path metrics_csv;
    std::filesystem::path timebudget_csv;
    std::filesystem::path timings_csv;
};

ExperimentOutcome run_experiment(const ExperimentConfig& config);

// dataset preparation exactly as run_experiment does it: synthesize when
// dataset_dir is empty, otherwise load and re-normalize every *.csd1 file
std::vector<ChargeStabilityDiagram> prepare_dataset(const ExperimentConfig& config);

// train (or reuse) the model for one (mask, steps) cell; writes the
// checkpoint under out_dir/checkpoints and the loss log under out_dir/logs,
// and returns the checkpoint path
std::filesystem::path train_cell(const ExperimentConfig& config,
                                 const std::vector<ChargeStabilityDiagram>& images,
                                 const DatasetSplit& split, const MaskSpec& mask_spec, int steps);

// "grid:5" -> "grid_5" (filename-safe cell tags)
std::string sanitize_tag(const std::string& text);

// deterministic per-cell seed derived from the run seed and the cell name
std::uint64_t cell_seed(std::uint64_t seed, const std::string& cell_name);

} // namespace csdr
