// csdr: charge-stability-diagram reconstruction from sparse measurements.
//
// Subcommands:
//   synth       write a synthetic CSD dataset as .csd1 files
//   import      convert a CSV voltage map to the .csd1 format
//   train       train one denoiser for a (mask, steps) cell
//   reconstruct reconstruct a single diagram from masked measurements
//   evaluate    full sweep: train missing cells, reconstruct the test set,
//               write metrics/timebudget/timings CSVs and images
//   timebudget  evaluate the idealized acquisition-time model
//
// Every option can also come from an INI file via --config; section names
// match the subcommand (e.g. [evaluate]).

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "csdr/baselines.hpp"
#include "csdr/checkpoint.hpp"
#include "csdr/csd.hpp"
#include "csdr/experiment.hpp"
#include "csdr/masking.hpp"
#include "csdr/metrics.hpp"
#include "csdr/rng.hpp"
#include "csdr/sampling.hpp"
#include "csdr/splits.hpp"
#include "csdr/synthesis.hpp"
#include "csdr/training.hpp"
#include "csdr/util.hpp"

namespace {

struct SynthOpts {
    csdr::SyntheticConfig config;
    int count = 1;
};

void add_generator_flags(CLI::App* cmd, csdr::SyntheticConfig& g) {
    cmd->add_option("--size", g.size, "image side length in pixels")->capture_default_str();
    cmd->add_option("--lines1", g.n_lines_family1, "count of steep transition lines")
        ->capture_default_str();
    cmd->add_option("--lines2", g.n_lines_family2, "count of shallow transition lines")
        ->capture_default_str();
    cmd->add_option("--slope1", g.slope1, "slope of the steep family (|slope| > 1)")
        ->capture_default_str();
    cmd->add_option("--slope2", g.slope2, "slope of the shallow family (|slope| < 1)")
        ->capture_default_str();
    cmd->add_option("--line-width", g.line_width, "Gaussian line profile sigma in pixels")
        ->capture_default_str();
    cmd->add_option("--contrast", g.line_contrast, "line amplitude above the background")
        ->capture_default_str();
    cmd->add_option("--tilt", g.background_tilt, "diagonal background gradient amplitude")
        ->capture_default_str();
    cmd->add_option("--noise", g.noise_sigma, "additive Gaussian noise sigma")
        ->capture_default_str();
    cmd->add_option("--gap", g.anticrossing_gap, "avoided-crossing gap in pixels")
        ->capture_default_str();
    cmd->add_option("--seed", g.seed, "generator seed (dataset uses seed, seed+1, ...)")
        ->capture_default_str();
}

std::vector<csdr::MaskSpec> parse_masks(const std::vector<std::string>& specs) {
    std::vector<csdr::MaskSpec> masks;
    masks.reserve(specs.size());
    for (const std::string& s : specs) masks.push_back(csdr::parse_mask_spec(s));
    return masks;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"charge stability diagram reconstruction from sparse measurements"};
    app.require_subcommand(1);
    app.set_config("--config", "", "read options from an INI file (sections per subcommand)");
    app.set_version_flag("--version", "csdr 1.0.0");

    // ---- synth -------------------------------------------------------------
    auto* synth = app.add_subcommand("synth", "write a synthetic dataset as .csd1 files");
    SynthOpts so;
    std::string synth_out = "dataset";
    add_generator_flags(synth, so.config);
    synth->add_option("--count", so.count, "number of diagrams")->capture_default_str();
    synth->add_option("--out", synth_out, "output directory")->capture_default_str();
    synth->callback([&] {
        csdr::validate(so.config);
        std::filesystem::create_directories(synth_out);
        const auto data = csdr::synthesize_dataset(so.config, so.count, so.config.seed);
        for (const csdr::SyntheticCSD& s : data)
            csdr::save_csdc(std::filesystem::path(synth_out) / (s.csd.id + ".csd1"), s.csd);
        std::printf("wrote %zu diagrams (%dx%d) to %s\n", data.size(), so.config.size,
                    so.config.size, synth_out.c_str());
    });

    // ---- import ------------------------------------------------------------
    auto* import = app.add_subcommand("import", "convert a CSV voltage map to .csd1");
    std::string import_in, import_out;
    std::vector<double> window_vals;
    import->add_option("--csv", import_in, "input CSV (numeric grid, one row per line)")
        ->required();
    import->add_option("--out", import_out, "output .csd1 path")->required();
    import
        ->add_option("--window", window_vals,
                     "voltage extents: v1_min v1_max v2_min v2_max (default 0 1 0 1)")
        ->expected(4);
    import->callback([&] {
        csdr::VoltageWindow window;
        if (window_vals.size() == 4) {
            window.v1_min = window_vals[0];
            window.v1_max = window_vals[1];
            window.v2_min = window_vals[2];
            window.v2_max = window_vals[3];
        }
        csdr::ChargeStabilityDiagram csd = csdr::import_csv(import_in, window);
        csdr::save_csdc(import_out, csd);
        std::printf("imported %dx%d map to %s\n", csd.height, csd.width, import_out.c_str());
    });

    // ---- train ---------------------------------------------------------
    auto* train = app.add_subcommand("train", "train one denoiser for a (mask, steps) cell");
    csdr::ExperimentConfig tc;
    std::string train_mask = "lc:8-8-4-4";
    int train_steps = 60;
    std::string train_data;
    train->add_option("--data", train_data, "directory of .csd1 files (default: synthesize)");
    add_generator_flags(train, tc.synth);
    train->add_option("--count", tc.synth_count, "synthetic dataset size")->capture_default_str();
    train->add_option("--n-test", tc.n_test, "held-out test images")->capture_default_str();
    train->add_option("--n-val", tc.n_val, "validation images (-1 = 10%)")->capture_default_str();
    train->add_option("--mask", train_mask, "mask spec, e.g. grid:5 or lc:8-8-4-4")
        ->capture_default_str();
    train->add_option("--steps", train_steps, "diffusion steps (20/60/100/140)")
        ->capture_default_str();
    train->add_option("--run-seed", tc.seed, "run seed")->capture_default_str();
    train->add_option("--epochs", tc.epochs, "training epochs")->capture_default_str();
    train->add_option("--batch", tc.batch_size, "batch size")->capture_default_str();
    train->add_option("--lr", tc.lr, "Adam learning rate")->capture_default_str();
    train->add_option("--threads", tc.threads, "worker threads (0 = auto)")
        ->capture_default_str();
    train->add_option("--out", tc.out_dir, "output directory (checkpoints/, logs/)")
        ->capture_default_str();
    train->callback([&] {
        tc.dataset_dir = train_data;
        tc.masks = parse_masks({train_mask});
        tc.steps = {train_steps};
        tc.methods = {"diffusion"};
        tc.save_images = false;
        csdr::validate(tc);
        const auto images = csdr::prepare_dataset(tc);
        std::vector<std::string> ids;
        for (const auto& img : images) ids.push_back(img.id);
        const csdr::DatasetSplit split = csdr::make_splits(ids, tc.seed, tc.n_test, tc.n_val);
        const auto ckpt = csdr::train_cell(tc, images, split, tc.masks[0], train_steps);
        std::printf("trained on %zu images (%zu validation); checkpoint at %s\n",
                    split.train.size(), split.val.size(), ckpt.string().c_str());
    });

    // ---- reconstruct ---------------------------------------------------
    auto* rec = app.add_subcommand("reconstruct",
                                   "reconstruct one diagram from masked measurements");
    std::string rec_in, rec_out = "recon.csd1", rec_mask = "lc:8-8-4-4";
    std::string rec_method = "diffusion", rec_ckpt;
    std::uint64_t rec_seed = 1;
    bool rec_replace = false;
    rec->add_option("--in", rec_in, "input .csd1 (full diagram; the mask selects measurements)")
        ->required();
    rec->add_option("--out", rec_out, "output .csd1 path")->capture_default_str();
    rec->add_option("--mask", rec_mask, "mask spec")->capture_default_str();
    rec->add_option("--method", rec_method, "diffusion | linear | idw | biharmonic")
        ->capture_default_str();
    rec->add_option("--ckpt", rec_ckpt, "checkpoint path (diffusion only)");
    rec->add_option("--seed", rec_seed, "sampling seed")->capture_default_str();
    rec->add_flag("--replace-known", rec_replace,
                  "re-impose measured pixels at every diffusion step");
    rec->callback([&] {
        csdr::ChargeStabilityDiagram csd = csdr::load_csdc(rec_in);
        csd.pixels = csdr::normalize(csd.pixels);
        const csdr::MaskSpec spec = csdr::parse_mask_spec(rec_mask);
        const csdr::MeasurementMask mask = csdr::make_mask(csd.height, csd.width, spec);
        const csdr::Tensor truth = csd.as_tensor();
        const csdr::Tensor y = csdr::apply_mask(truth, mask);
        csdr::Tensor out;
        if (rec_method == "linear") {
            out = csdr::interp_linear(y, mask);
        } else if (rec_method == "idw") {
            out = csdr::interp_idw(y, mask);
        } else if (rec_method == "biharmonic") {
            out = csdr::interp_biharmonic(y, mask);
        } else if (rec_method == "diffusion") {
            if (rec_ckpt.empty())
                throw CLI::ValidationError("--ckpt is required for the diffusion method");
            const csdr::Checkpoint ck = csdr::load_checkpoint(rec_ckpt);
            const csdr::NoiseSchedule sched = csdr::build_schedule(ck.T);
            csdr::Rng rng = csdr::substream(rec_seed, "sample-cli");
            out = csdr::reconstruct_diffusion(ck.net, y, mask, sched, rng,
                                              csdr::SampleOptions{rec_replace});
        } else {
            throw CLI::ValidationError("unknown method '" + rec_method + "'");
        }
        csdr::ChargeStabilityDiagram result = csd;
        result.pixels = out.data;
        csdr::save_csdc(rec_out, result);
        std::printf("psnr vs input diagram: %s dB; wrote %s\n",
                    csdr::format_metric(csdr::psnr(out, truth)).c_str(), rec_out.c_str());
    });

    // ---- evaluate --------------------------------------------------------
    auto* eval = app.add_subcommand("evaluate", "full (method x mask x steps) experiment sweep");
    csdr::ExperimentConfig ec;
    std::string eval_data;
    std::vector<std::string> eval_masks = {"lc:8-8-4-4"};
    std::vector<std::string> eval_methods = {"diffusion", "linear", "idw", "biharmonic"};
    bool no_images = false;
    eval->add_option("--data", eval_data, "directory of .csd1 files (default: synthesize)");
    add_generator_flags(eval, ec.synth);
    eval->add_option("--count", ec.synth_count, "synthetic dataset size")->capture_default_str();
    eval->add_option("--n-test", ec.n_test, "held-out test images")->capture_default_str();
    eval->add_option("--n-val", ec.n_val, "validation images (-1 = 10%)")->capture_default_str();
    eval->add_option("--mask", eval_masks, "mask specs (repeatable)")->capture_default_str();
    eval->add_option("--steps", ec.steps, "diffusion step counts (subset of 20/60/100/140)")
        ->capture_default_str();
    eval->add_option("--method", eval_methods, "methods (repeatable)")->capture_default_str();
    eval->add_option("--run-seed", ec.seed, "run seed")->capture_default_str();
    eval->add_option("--epochs", ec.epochs, "training epochs")->capture_default_str();
    eval->add_option("--batch", ec.batch_size, "batch size")->capture_default_str();
    eval->add_option("--lr", ec.lr, "Adam learning rate")->capture_default_str();
    eval->add_option("--threads", ec.threads, "worker threads (0 = auto)")->capture_default_str();
    eval->add_option("--f1-radius", ec.f1_radius, "structure-F1 tolerance radius in pixels")
        ->capture_default_str();
    eval->add_option("--t-pixel", ec.t_pixel, "idealized seconds per measured pixel")
        ->capture_default_str();
    eval->add_option("--t-d-ref20", ec.t_diffusion_ref20,
                     "idealized diffusion inference seconds at 20 steps")
        ->capture_default_str();
    eval->add_flag("--no-images", no_images, "skip reconstruction/overlay image output");
    eval->add_flag("--replace-known", ec.replace_known,
                   "re-impose measured pixels at every diffusion step");
    eval->add_option("--out", ec.out_dir, "output directory")->capture_default_str();
    eval->callback([&] {
        ec.dataset_dir = eval_data;
        ec.masks = parse_masks(eval_masks);
        ec.methods = eval_methods;
        ec.save_images = !no_images;
        const auto outcome = csdr::run_experiment(ec);
        std::printf("wrote %s\n", outcome.metrics_csv.string().c_str());
        std::printf("wrote %s\n", outcome.timebudget_csv.string().c_str());
        std::printf("wrote %s\n", outcome.timings_csv.string().c_str());
        for (const csdr::MetricRow& r : outcome.rows)
            if (r.image == "mean")
                std::printf("%-10s %-12s T=%-3d psnr %s ssim %s ridge-iou %s\n",
                            r.method.c_str(), r.mask.c_str(), r.steps,
                            csdr::format_metric(r.psnr).c_str(),
                            csdr::format_metric(r.ssim).c_str(),
                            csdr::format_metric(r.ridge_iou).c_str());
    });

    // ---- timebudget --------------------------------------------------------
    auto* tb = app.add_subcommand("timebudget", "evaluate the idealized time model");
    int tb_pixels = -1, tb_height = 128, tb_width = 128, tb_steps = 0;
    std::string tb_mask;
    double tb_tp = 25e-6, tb_td = 0.0, tb_ref = 0.02;
    tb->add_option("--pixels", tb_pixels, "measured pixel count (overrides --mask)");
    tb->add_option("--mask", tb_mask, "mask spec to count pixels from");
    tb->add_option("--height", tb_height, "image height for --mask")->capture_default_str();
    tb->add_option("--width", tb_width, "image width for --mask")->capture_default_str();
    tb->add_option("--t-pixel", tb_tp, "seconds per measured pixel")->capture_default_str();
    tb->add_option("--t-d", tb_td, "reconstruction overhead in seconds")->capture_default_str();
    tb->add_option("--steps", tb_steps,
                   "diffusion steps; sets t_d = t-d-ref20 * steps / 20 when > 0");
    tb->add_option("--t-d-ref20", tb_ref, "diffusion inference seconds at 20 steps")
        ->capture_default_str();
    tb->callback([&] {
        int n_p = tb_pixels;
        if (n_p < 0) {
            if (tb_mask.empty())
                throw CLI::ValidationError("give either --pixels or --mask");
            const csdr::MeasurementMask mask =
                csdr::make_mask(tb_height, tb_width, csdr::parse_mask_spec(tb_mask));
            n_p = int(mask.count());
        }
        const double t_d = tb_steps > 0 ? tb_ref * double(tb_steps) / 20.0 : tb_td;
        const csdr::TimeBudget b = csdr::time_to_reconstruct(n_p, tb_tp, t_d);
        std::printf("n_p %d  t_p %s s  t_d %s s  total %s s\n", b.n_p,
                    csdr::format_metric(b.t_p).c_str(), csdr::format_metric(b.t_d).c_str(),
                    csdr::format_metric(b.total).c_str());
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
