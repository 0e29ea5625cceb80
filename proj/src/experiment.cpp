#include "csdr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>
#include <thread>

#include "csdr/baselines.hpp"
#include "csdr/checkpoint.hpp"
#include "csdr/metrics.hpp"
#include "csdr/rng.hpp"
#include "csdr/sampling.hpp"
#include "csdr/splits.hpp"
#include "csdr/training.hpp"
#include "csdr/util.hpp"

namespace fs = std::filesystem;

namespace csdr {

const std::vector<std::string> kKnownMethods = {"diffusion", "linear", "idw", "biharmonic"};
const std::vector<int> kKnownSteps = {20, 60, 100, 140};

TimeBudget time_to_reconstruct(int n_p, double t_p, double t_d) {
    if (n_p < 0) throw std::invalid_argument("time budget: negative pixel count");
    if (t_p < 0.0 || t_d < 0.0) throw std::invalid_argument("time budget: negative time");
    TimeBudget b;
    b.n_p = n_p;
    b.t_p = t_p;
    b.t_d = t_d;
    b.total = double(n_p) * t_p + t_d;
    return b;
}

TimeBudget time_to_reconstruct(const MeasurementMask& mask, double t_p, double t_d) {
    return time_to_reconstruct(int(mask.count()), t_p, t_d);
}

std::string sanitize_tag(const std::string& text) {
    std::string out = text;
    for (char& c : out)
        if (c == ':') c = '_';
    return out;
}

std::uint64_t cell_seed(std::uint64_t seed, const std::string& cell_name) {
    std::uint64_t x = seed ^ (detail::fnv1a64(cell_name) * 0x9E3779B97F4A7C15ULL);
    return detail::splitmix64(x);
}

void validate(const ExperimentConfig& config) {
    if (config.dataset_dir.empty()) {
        validate(config.synth);
        if (config.synth_count < 1)
            throw std::invalid_argument("experiment: synth_count must be >= 1");
    }
    if (config.n_test < 1) throw std::invalid_argument("experiment: n_test must be >= 1");
    if (config.masks.empty()) throw std::invalid_argument("experiment: no mask specs");
    if (config.methods.empty()) throw std::invalid_argument("experiment: no methods");
    for (const std::string& m : config.methods) {
        if (std::find(kKnownMethods.begin(), kKnownMethods.end(), m) == kKnownMethods.end())
            throw std::invalid_argument("experiment: unknown method '" + m + "'");
        if (std::count(config.methods.begin(), config.methods.end(), m) > 1)
            throw std::invalid_argument("experiment: duplicate method '" + m + "'");
    }
    if (config.steps.empty()) throw std::invalid_argument("experiment: no diffusion step counts");
    for (const int t : config.steps) {
        if (std::find(kKnownSteps.begin(), kKnownSteps.end(), t) == kKnownSteps.end())
            throw std::invalid_argument("experiment: diffusion steps must be one of 20/60/100/140");
        if (std::count(config.steps.begin(), config.steps.end(), t) > 1)
            throw std::invalid_argument("experiment: duplicate step count");
    }
    if (config.epochs < 1 || config.batch_size < 1)
        throw std::invalid_argument("experiment: epochs and batch size must be >= 1");
    if (!(config.lr > 0.0f)) throw std::invalid_argument("experiment: learning rate must be > 0");
    if (config.threads < 0) throw std::invalid_argument("experiment: negative thread count");
    if (config.f1_radius < 0.0) throw std::invalid_argument("experiment: negative f1 radius");
    if (config.t_pixel < 0.0 || config.t_diffusion_ref20 < 0.0)
        throw std::invalid_argument("experiment: negative time constants");
    if (config.out_dir.empty()) throw std::invalid_argument("experiment: empty output directory");
}

namespace {

struct EvalCell {
    std::string method;
    int steps = 0; // 0 for the direct baselines
    std::string tag() const {
        return steps > 0 ? method + "-T" + std::to_string(steps) : method;
    }
};

void append_note(MetricRow& row, const std::string& text) {
    if (!row.note.empty()) row.note += "; ";
    row.note += text;
}

ChargeStabilityDiagram tensor_as_csd(const Tensor& t, const std::string& id,
                                     const VoltageWindow& window) {
    ChargeStabilityDiagram csd;
    csd.id = id;
    csd.height = t.height;
    csd.width = t.width;
    csd.window = window;
    csd.pixels = t.data;
    return csd;
}

} // namespace

std::vector<ChargeStabilityDiagram> prepare_dataset(const ExperimentConfig& config) {
    std::vector<ChargeStabilityDiagram> images;
    if (config.dataset_dir.empty()) {
        std::vector<SyntheticCSD> synth =
            synthesize_dataset(config.synth, config.synth_count, config.synth.seed);
        images.reserve(synth.size());
        for (SyntheticCSD& s : synth) images.push_back(std::move(s.csd));
    } else {
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(config.dataset_dir))
            if (entry.is_regular_file() && entry.path().extension() == ".csd1")
                files.push_back(entry.path());
        std::sort(files.begin(), files.end());
        if (files.empty())
            throw std::invalid_argument("experiment: no .csd1 files in " +
                                        config.dataset_dir.string());
        for (const fs::path& f : files) {
            ChargeStabilityDiagram csd = load_csdc(f);
            csd.id = f.stem().string();
            csd.pixels = normalize(csd.pixels); // idempotent for normalized data
            images.push_back(std::move(csd));
        }
    }
    for (const ChargeStabilityDiagram& img : images)
        if (img.height != images[0].height || img.width != images[0].width)
            throw std::invalid_argument("experiment: images have mixed sizes");
    return images;
}

std::filesystem::path train_cell(const ExperimentConfig& config,
                                 const std::vector<ChargeStabilityDiagram>& images,
                                 const DatasetSplit& split, const MaskSpec& mask_spec,
                                 int steps) {
    const std::string mask_str = format_mask_spec(mask_spec);
    const std::string cell = sanitize_tag(mask_str) + "-T" + std::to_string(steps);
    fs::create_directories(config.out_dir / "checkpoints");
    fs::create_directories(config.out_dir / "logs");
    const fs::path ckpt = config.out_dir / "checkpoints" / ("ckpt-" + cell + ".qddm");
    if (fs::exists(ckpt)) {
        const Checkpoint existing = load_checkpoint(ckpt);
        if (existing.T != steps)
            throw IoError("checkpoint " + ckpt.string() + " was trained with T=" +
                          std::to_string(existing.T) + ", run wants T=" + std::to_string(steps));
        return ckpt; // reuse
    }

    std::map<std::string, const ChargeStabilityDiagram*> by_id;
    for (const ChargeStabilityDiagram& img : images) by_id.emplace(img.id, &img);
    const int height = images.at(0).height, width = images.at(0).width;
    const MeasurementMask mask = make_mask(height, width, mask_spec);

    std::vector<TrainItem> train_items, val_items;
    train_items.reserve(split.train.size());
    for (const std::string& id : split.train)
        train_items.push_back(make_train_item(*by_id.at(id), mask));
    val_items.reserve(split.val.size());
    for (const std::string& id : split.val)
        val_items.push_back(make_train_item(*by_id.at(id), mask));

    TrainConfig tc;
    tc.T = steps;
    tc.epochs = config.epochs;
    tc.batch_size = config.batch_size;
    tc.lr = config.lr;
    tc.seed = cell_seed(config.seed, cell);
    tc.threads = config.threads > 0 ? config.threads
                                    : std::max(1, int(std::thread::hardware_concurrency()));
    tc.checkpoint_epochs = default_checkpoint_epochs(config.epochs);

    Denoiser net;
    Rng init_rng = substream(tc.seed, "init");
    net.init(init_rng);

    const CheckpointSink sink = [&](const EpochStats&, const Denoiser& n) {
        save_checkpoint(ckpt, steps, n);
    };
    const std::vector<EpochStats> stats = train_denoiser(net, train_items, val_items, tc, sink);
    save_checkpoint(ckpt, steps, net); // final state, even off the sink epochs

    std::vector<std::string> lines;
    lines.reserve(stats.size());
    for (const EpochStats& es : stats) {
        std::string line = std::to_string(es.epoch) + "," + format_metric(es.train_loss) + ",";
        if (es.val_loss) line += format_metric(*es.val_loss);
        lines.push_back(std::move(line));
    }
    write_csv(config.out_dir / "logs" / ("train-" + cell + ".csv"),
              {"training loss per epoch, cell " + cell, "seed " + std::to_string(config.seed),
               "validation loss computed on checkpoint epochs"},
              "epoch,train_loss,val_loss", lines);
    return ckpt;
}

ExperimentOutcome run_experiment(const ExperimentConfig& config) {
    validate(config);
    const std::vector<ChargeStabilityDiagram> images = prepare_dataset(config);
    const int height = images[0].height, width = images[0].width;

    std::vector<std::string> ids;
    std::map<std::string, const ChargeStabilityDiagram*> by_id;
    for (const ChargeStabilityDiagram& img : images) {
        ids.push_back(img.id);
        if (!by_id.emplace(img.id, &img).second)
            throw std::invalid_argument("experiment: duplicate image id '" + img.id + "'");
    }
    const DatasetSplit split = make_splits(ids, config.seed, config.n_test, config.n_val);

    // spec-mandated runtime assertion: the held-out ids never reach training
    {
        std::set<std::string> test_ids(split.test.begin(), split.test.end());
        for (const std::string& id : split.train)
            if (test_ids.count(id)) throw std::logic_error("dataset/test-set overlap detected");
        for (const std::string& id : split.val)
            if (test_ids.count(id)) throw std::logic_error("dataset/test-set overlap detected");
    }

    const bool want_diffusion = std::find(config.methods.begin(), config.methods.end(),
                                          "diffusion") != config.methods.end();

    fs::create_directories(config.out_dir);

    // ---- training phase: one model per (mask, steps) cell ----------------
    std::map<std::pair<std::string, int>, fs::path> checkpoint_paths;
    if (want_diffusion)
        for (const MaskSpec& spec : config.masks)
            for (const int T : config.steps)
                checkpoint_paths[{format_mask_spec(spec), T}] =
                    train_cell(config, images, split, spec, T);

    // ---- evaluation phase -------------------------------------------------
    std::vector<EvalCell> cells;
    for (const std::string& method : config.methods) {
        if (method == "diffusion")
            for (const int T : config.steps) cells.push_back({method, T});
        else
            cells.push_back({method, 0});
    }

    std::vector<MetricRow> rows;
    std::vector<std::string> budget_lines, timing_lines;
    std::map<std::string, std::pair<BinaryFeatureMap, BinaryFeatureMap>> truth_maps;

    const SampleOptions sample_opt{config.replace_known};
    for (const MaskSpec& spec : config.masks) {
        const std::string mask_str = format_mask_spec(spec);
        const std::string mask_tag = sanitize_tag(mask_str);
        const MeasurementMask mask = make_mask(height, width, spec);
        const int n_measured = int(mask.count());

        for (const EvalCell& cell : cells) {
            const bool is_diffusion = cell.method == "diffusion";
            Checkpoint model;
            NoiseSchedule sched;
            if (is_diffusion) {
                const auto it = checkpoint_paths.find({mask_str, cell.steps});
                if (it == checkpoint_paths.end() || !fs::exists(it->second))
                    throw IoError("missing checkpoint for mask " + mask_str + " at T=" +
                                  std::to_string(cell.steps));
                model = load_checkpoint(it->second);
                sched = build_schedule(cell.steps);
            }

            const double t_d =
                is_diffusion ? config.t_diffusion_ref20 * double(cell.steps) / 20.0 : 0.0;
            const TimeBudget budget = time_to_reconstruct(mask, config.t_pixel, t_d);
            budget_lines.push_back(cell.method + "," + mask_str + "," +
                                   std::to_string(cell.steps) + "," + std::to_string(budget.n_p) +
                                   "," + format_metric(budget.t_p) + "," +
                                   format_metric(budget.t_d) + "," + format_metric(budget.total));

            const fs::path recon_dir = config.out_dir / "recon" / mask_tag / cell.tag();
            const fs::path overlay_dir = config.out_dir / "overlays" / mask_tag / cell.tag();
            if (config.save_images) {
                fs::create_directories(recon_dir);
                fs::create_directories(overlay_dir);
            }

            double wall_seconds = 0.0;
            for (const std::string& id : split.test) {
                const ChargeStabilityDiagram& truth_csd = *by_id.at(id);
                const Tensor truth = truth_csd.as_tensor();
                const Tensor y = apply_mask(truth, mask);

                MetricRow row;
                row.method = cell.method;
                row.mask = mask_str;
                row.steps = cell.steps;
                row.image = id;
                row.n_measured = n_measured;

                const auto t0 = std::chrono::steady_clock::now();
                Tensor recon;
                if (cell.method == "linear") {
                    recon = interp_linear(y, mask);
                } else if (cell.method == "idw") {
                    recon = interp_idw(y, mask);
                } else if (cell.method == "biharmonic") {
                    BiharmonicResult r = interp_biharmonic_full(y, mask);
                    recon = std::move(r.image);
                    if (!r.converged)
                        append_note(row, "biharmonic degraded (residual " +
                                             format_metric(r.residual) + ")");
                } else {
                    Rng rng = substream(config.seed,
                                        "sample-" + mask_tag + "-T" +
                                            std::to_string(cell.steps) + "-" + id);
                    recon = reconstruct_diffusion(model.net, y, mask, sched, rng, sample_opt);
                }
                wall_seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                                    .count();

                // pixel metrics
                try {
                    row.rnmse = rnmse(recon, truth);
                } catch (const std::invalid_argument&) {
                    append_note(row, "rnmse undefined (constant reference)");
                }
                row.psnr = psnr(recon, truth);
                row.ssim = ssim(recon, truth);

                // structure metrics against the extraction from the reference
                auto truth_it = truth_maps.find(id);
                if (truth_it == truth_maps.end())
                    truth_it = truth_maps
                                   .emplace(id, std::make_pair(canny_edges(truth),
                                                               frangi_ridges(truth)))
                                   .first;
                const BinaryFeatureMap& edge_truth = truth_it->second.first;
                const BinaryFeatureMap& ridge_truth = truth_it->second.second;
                const BinaryFeatureMap edge_recon = canny_edges(recon);
                const BinaryFeatureMap ridge_recon = frangi_ridges(recon);

                row.edge_iou = iou(edge_recon, edge_truth);
                row.edge_f1 = f1(edge_recon, edge_truth, config.f1_radius);
                try {
                    row.edge_hausdorff = hausdorff(edge_recon, edge_truth);
                } catch (const std::invalid_argument&) {
                    append_note(row, "edge_hausdorff undefined (empty extraction)");
                }
                row.ridge_iou = iou(ridge_recon, ridge_truth);
                row.ridge_f1 = f1(ridge_recon, ridge_truth, config.f1_radius);
                try {
                    row.ridge_hausdorff = hausdorff(ridge_recon, ridge_truth);
                } catch (const std::invalid_argument&) {
                    append_note(row, "ridge_hausdorff undefined (empty extraction)");
                }
                rows.push_back(std::move(row));

                if (config.save_images) {
                    save_csdc(recon_dir / (id + ".csd1"),
                              tensor_as_csd(recon, id, truth_csd.window));
                    save_csdc(overlay_dir / (id + "-canny.csd1"),
                              tensor_as_csd(
                                  ridge_overlay(edge_recon, edge_truth, config.f1_radius),
                                  id, truth_csd.window));
                    save_csdc(overlay_dir / (id + "-frangi.csd1"),
                              tensor_as_csd(
                                  ridge_overlay(ridge_recon, ridge_truth, config.f1_radius),
                                  id, truth_csd.window));
                }
            }
            timing_lines.push_back(cell.method + "," + mask_str + "," +
                                   std::to_string(cell.steps) + "," +
                                   std::to_string(split.test.size()) + "," +
                                   format_metric(wall_seconds) + "," +
                                   format_metric(wall_seconds / double(split.test.size())));
        }
    }

    const std::vector<MetricRow> aggregates = aggregate_rows(rows);
    rows.insert(rows.end(), aggregates.begin(), aggregates.end());

    ExperimentOutcome outcome;
    outcome.rows = rows;
    outcome.metrics_csv = config.out_dir / "metrics.csv";
    outcome.timebudget_csv = config.out_dir / "timebudget.csv";
    outcome.timings_csv = config.out_dir / "timings.csv";

    std::string mask_list, method_list, step_list;
    for (const MaskSpec& spec : config.masks)
        mask_list += (mask_list.empty() ? "" : " ") + format_mask_spec(spec);
    for (const std::string& m : config.methods)
        method_list += (method_list.empty() ? "" : " ") + m;
    for (const int t : config.steps)
        step_list += (step_list.empty() ? "" : " ") + std::to_string(t);

    write_metrics_csv(outcome.metrics_csv,
                      {"reconstruction quality on the held-out test set",
                       "seed " + std::to_string(config.seed),
                       "images " + std::to_string(images.size()) + " (" +
                           std::to_string(split.train.size()) + " train, " +
                           std::to_string(split.val.size()) + " val, " +
                           std::to_string(split.test.size()) + " test), size " +
                           std::to_string(height) + "x" + std::to_string(width),
                       "masks: " + mask_list, "methods: " + method_list,
                       "diffusion steps: " + step_list,
                       "training: " + std::to_string(config.epochs) + " epochs, batch " +
                           std::to_string(config.batch_size) + ", lr " + format_float(config.lr)},
                      rows);

    write_csv(outcome.timebudget_csv,
              {"idealized acquisition + reconstruction time: total = n_p * t_p + t_d",
               "t_p = " + format_metric(config.t_pixel) + " s per measured pixel",
               "diffusion t_d = " + format_metric(config.t_diffusion_ref20) +
                   " s at 20 steps, scaled linearly in steps; direct baselines t_d = 0"},
              "method,mask,steps,n_p,t_p,t_d,total_seconds", budget_lines);

    write_csv(outcome.timings_csv,
              {"wall-clock reconstruction timings on this host",
               "hardware-dependent: excluded from the byte-determinism contract"},
              "method,mask,steps,images,total_seconds,seconds_per_image", timing_lines);

    return outcome;
}

} // namespace csdr
