#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"

#include "corrcam/analysis.hpp"
#include "corrcam/commands.hpp"
#include "corrcam/errors.hpp"
#include "corrcam/estimator.hpp"
#include "corrcam/holography.hpp"
#include "corrcam/io/csv.hpp"
#include "corrcam/io/framefile.hpp"
#include "corrcam/io/keyval.hpp"
#include "corrcam/io/pgm.hpp"
#include "corrcam/run_config.hpp"

namespace corrcam {

namespace fs = std::filesystem;

namespace {

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << content;
    f.flush();
    if (!f) throw IoError("write failed: '" + path + "'");
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// min..max -> 0..255; flat images render as 0
Image2D<uint8_t> preview8(const Image2D<double>& im) {
    const double lo = image_min(im), hi = image_max(im);
    Image2D<uint8_t> out(im.nx(), im.ny());
    if (hi > lo) {
        const double s = 255.0 / (hi - lo);
        for (size_t i = 0; i < im.size(); ++i)
            out.raw()[i] = static_cast<uint8_t>(std::lround((im.raw()[i] - lo) * s));
    }
    return out;
}

// documented phase rendering: (-pi, pi] -> [0, 254] linearly, mask -> 255
Image2D<uint8_t> phase_preview(const PhaseMap& pm) {
    Image2D<uint8_t> out(pm.phase.nx(), pm.phase.ny());
    for (size_t i = 0; i < out.size(); ++i) {
        if (pm.mask.raw()[i]) {
            const double v = (wrap_phase(pm.phase.raw()[i]) + M_PI) / (2.0 * M_PI) * 254.0;
            out.raw()[i] = static_cast<uint8_t>(std::lround(v));
        } else {
            out.raw()[i] = 255;
        }
    }
    return out;
}

std::optional<std::string> meta_value(const FrameFileInfo& info, const std::string& key) {
    for (const auto& kv : info.metadata)
        if (kv.first == key) return kv.second;
    return std::nullopt;
}

double pitch_from_stack(const std::string& path) {
    const FrameFileInfo info = read_frame_stack_info(path);
    if (auto v = meta_value(info, "optics.pitch")) return std::strtod(v->c_str(), nullptr);
    return 0.0;
}

CorrelationImage reconstruct_stack(const std::string& path, const std::string& engine, int workers,
                                   std::optional<double> threshold) {
    if (engine != "direct" && engine != "fft")
        throw ConfigError("--engine must be 'direct' or 'fft', got '" + engine + "'");
    FileStackSource file_src(path);
    std::optional<ThresholdedSource> th;
    const FrameSource* src = &file_src;
    if (threshold) {
        th.emplace(file_src, *threshold);
        src = &*th;
    }
    CorrelationImage ci = (engine == "direct") ? correlation_image_direct(*src)
                                               : correlation_image_fft(*src, workers);
    ci.pixel_pitch = pitch_from_stack(path);
    return ci;
}

double stack_theta(const std::string& path) {
    const FrameFileInfo info = read_frame_stack_info(path);
    auto v = meta_value(info, "source.theta");
    if (!v)
        throw ConfigError("stack '" + path +
                          "' carries no source.theta metadata (not an interference run?)");
    return std::strtod(v->c_str(), nullptr);
}

// Matches four stacks to the canonical phases {0, pi/4, pi/2, 3pi/4} by their
// source.theta metadata, reconstructs each, and returns the assembled set.
HologramSet assemble_set(const std::vector<std::string>& paths, const std::string& engine,
                         int workers, std::optional<double> threshold) {
    if (paths.size() != 4)
        throw ConfigError("holography needs exactly 4 stacks per set, got " +
                          std::to_string(paths.size()));
    HologramSet set;
    std::array<bool, 4> filled = {false, false, false, false};
    for (const auto& path : paths) {
        const double theta = stack_theta(path);
        int slot = -1;
        for (int s = 0; s < 4; ++s)
            if (std::fabs(theta - kHologramPhases[s]) < 1e-6) slot = s;
        if (slot < 0)
            throw ConfigError("stack '" + path + "' has theta = " + fmt(theta) +
                              ", expected one of {0, pi/4, pi/2, 3pi/4}");
        if (filled[slot])
            throw ConfigError("two stacks carry theta = " + fmt(kHologramPhases[slot]));
        set.gamma[slot] = reconstruct_stack(path, engine, workers, threshold);
        filled[slot] = true;
    }
    return set;
}

struct Band {
    bool rows = false;  // rows=a:b averages over rows (l), cols over columns (k)
    int a = 0, b = 0;
};

Band parse_band(const std::string& profile) {
    Band band;
    std::string rest;
    if (profile.rfind("rows=", 0) == 0) {
        band.rows = true;
        rest = profile.substr(5);
    } else if (profile.rfind("cols=", 0) == 0) {
        band.rows = false;
        rest = profile.substr(5);
    } else {
        throw ConfigError("--profile expects rows=a:b or cols=a:b, got '" + profile + "'");
    }
    const auto colon = rest.find(':');
    if (colon == std::string::npos)
        throw ConfigError("--profile expects rows=a:b or cols=a:b, got '" + profile + "'");
    try {
        band.a = std::stoi(rest.substr(0, colon));
        band.b = std::stoi(rest.substr(colon + 1));
    } catch (const std::exception&) {
        throw ConfigError("--profile band bounds must be integers, got '" + profile + "'");
    }
    if (band.a < 0 || band.b < band.a)
        throw ConfigError("--profile band must satisfy 0 <= a <= b");
    return band;
}

KeyValueFile fit_report(const GaussianFitResult& fit) {
    KeyValueFile kv;
    kv.set("amplitude", fmt(fit.amplitude));
    kv.set("x0", fmt(fit.x0));
    kv.set("y0", fmt(fit.y0));
    kv.set("sigma_x", fmt(fit.sigma_x));
    kv.set("sigma_y", fmt(fit.sigma_y));
    kv.set("offset", fmt(fit.offset));
    kv.set("iterations", std::to_string(fit.iterations));
    kv.set("rms_residual", fmt(fit.rms_residual));
    return kv;
}

} // namespace

void cmd_simulate(const SimulateOptions& opt) {
    RunConfig rc = load_run_config(opt.config_path, opt.overrides);
    if (opt.seed) rc.params.seed = *opt.seed;

    SimStats stats;
    FrameStack stack = simulate_stack(rc.params, opt.workers, &stats);

    ensure_dir(opt.out_dir);
    const std::string stack_path = join(opt.out_dir, "frames.bin");
    write_frame_stack(stack_path, stack);
    write_text_file(join(opt.out_dir, "effective.cfg"), rc.effective_text());

    std::printf("%s", rc.effective_text().c_str());
    std::printf("wrote %s: %u frames of %dx%d (%s)\n", stack_path.c_str(), stack.frames, stack.nx,
                stack.ny, dtype_name(stack.dtype));
    std::printf("pairs attempted = %llu, kept = %llu, off-sensor = %llu\n",
                static_cast<unsigned long long>(stats.attempted_pairs),
                static_cast<unsigned long long>(stats.kept_pairs),
                static_cast<unsigned long long>(stats.discarded_pairs));
}

void cmd_reconstruct(const ReconstructOptions& opt) {
    CorrelationImage gamma = reconstruct_stack(opt.stack_path, opt.engine, opt.workers,
                                               opt.threshold);

    FileStackSource file_src(opt.stack_path);
    std::optional<ThresholdedSource> th;
    const FrameSource* src = &file_src;
    if (opt.threshold) {
        th.emplace(file_src, *opt.threshold);
        src = &*th;
    }
    Image2D<double> intensity = intensity_image(*src, opt.workers);

    ensure_dir(opt.out_dir);
    write_correlation_image(join(opt.out_dir, "gamma.bin"), gamma);
    write_pgm8(join(opt.out_dir, "gamma.pgm"), preview8(gamma.values));

    FrameStack istack;
    istack.nx = intensity.nx();
    istack.ny = intensity.ny();
    istack.frames = 1;
    istack.dtype = Dtype::f32;
    istack.data.assign(intensity.raw().begin(), intensity.raw().end());
    istack.metadata.emplace_back("kind", "intensity");
    istack.metadata.emplace_back("frames_used", std::to_string(gamma.frames_used));
    istack.metadata.emplace_back("pixel_pitch", fmt(gamma.pixel_pitch));
    write_frame_stack(join(opt.out_dir, "intensity.bin"), istack);
    write_pgm8(join(opt.out_dir, "intensity.pgm"), preview8(intensity));

    if (!opt.profile.empty()) {
        const Band band = parse_band(opt.profile);
        const auto& v = gamma.values;
        std::vector<double> line;
        if (band.rows) {
            if (band.b >= v.ny()) throw ConfigError("--profile rows out of range");
            line.assign(v.nx(), 0.0);
            for (int l = band.a; l <= band.b; ++l)
                for (int k = 0; k < v.nx(); ++k) line[k] += v(k, l);
            for (auto& x : line) x /= (band.b - band.a + 1);
        } else {
            if (band.b >= v.nx()) throw ConfigError("--profile cols out of range");
            line.assign(v.ny(), 0.0);
            for (int k = band.a; k <= band.b; ++k)
                for (int l = 0; l < v.ny(); ++l) line[l] += v(k, l);
            for (auto& x : line) x /= (band.b - band.a + 1);
        }
        write_csv_rows(join(opt.out_dir, "profile.csv"), {line},
                       band.rows ? "gamma averaged over rows " + std::to_string(band.a) + ":" +
                                       std::to_string(band.b)
                                 : "gamma averaged over cols " + std::to_string(band.a) + ":" +
                                       std::to_string(band.b));
    }

    std::printf("gamma: %dx%d bins from %u frames, range [%g, %g]\n", gamma.values.nx(),
                gamma.values.ny(), gamma.frames_used, image_min(gamma.values),
                image_max(gamma.values));
    std::printf("intensity: %dx%d, mean %g\n", intensity.nx(), intensity.ny(),
                image_sum(intensity) / static_cast<double>(intensity.size()));
}

void cmd_holography(const HolographyOptions& opt) {
    ensure_dir(opt.out_dir);

    if (opt.sweep) {
        if (opt.object_stacks.size() < 8)
            throw ConfigError("sweep mode needs at least 8 stacks, got " +
                              std::to_string(opt.object_stacks.size()));
        std::vector<std::pair<double, std::string>> runs;
        for (const auto& path : opt.object_stacks) runs.emplace_back(stack_theta(path), path);
        std::sort(runs.begin(), runs.end());

        std::vector<double> thetas;
        std::vector<CorrelationImage> images;
        for (const auto& [theta, path] : runs) {
            thetas.push_back(theta);
            images.push_back(reconstruct_stack(path, opt.engine, opt.workers, opt.threshold));
        }
        int pk = images[0].values.nx() / 2, pl = images[0].values.ny() / 2;  // center bin
        if (opt.probe) {
            pk = opt.probe->first;
            pl = opt.probe->second;
        }
        const auto points = phase_sweep_curve(thetas, images, pk, pl);
        const SweepFit fit = fit_phase_sweep(points);

        std::vector<std::vector<double>> rows;
        for (const auto& pt : points) rows.push_back({pt.theta, pt.value});
        write_csv_rows(join(opt.out_dir, "sweep.csv"), rows, "theta,gamma");

        KeyValueFile kv;
        kv.set("probe_k", std::to_string(pk));
        kv.set("probe_l", std::to_string(pl));
        kv.set("offset", fmt(fit.offset));
        kv.set("amplitude", fmt(fit.amplitude));
        kv.set("phase", fmt(fit.phase));
        kv.set("r_squared", fmt(fit.r_squared));
        write_text_file(join(opt.out_dir, "sweep_fit.cfg"), kv.serialize());

        std::printf("sweep fit at bin (%d,%d): %g + %g*cos(2*theta + %g), R^2 = %.6f\n", pk, pl,
                    fit.offset, fit.amplitude, fit.phase, fit.r_squared);
        return;
    }

    HologramSet object_set =
        assemble_set(opt.object_stacks, opt.engine, opt.workers, opt.threshold);
    PhaseMap object_map = combine_phases(object_set, opt.support_threshold);
    PhaseMap final_map = object_map;

    if (!opt.reference_stacks.empty()) {
        HologramSet reference_set =
            assemble_set(opt.reference_stacks, opt.engine, opt.workers, opt.threshold);
        PhaseMap reference_map = calibrate_reference(reference_set, opt.support_threshold);
        final_map = subtract_reference(object_map, reference_map);
        write_csv(join(opt.out_dir, "object_phase.csv"), object_map.phase);
        write_csv(join(opt.out_dir, "reference_phase.csv"), reference_map.phase);
    }

    write_csv(join(opt.out_dir, "phase.csv"), final_map.phase);
    write_pgm8(join(opt.out_dir, "phase.pgm"), phase_preview(final_map));
    Image2D<uint8_t> mask8(final_map.mask.nx(), final_map.mask.ny());
    for (size_t i = 0; i < mask8.size(); ++i)
        mask8.raw()[i] = final_map.mask.raw()[i] ? 255 : 0;
    write_pgm8(join(opt.out_dir, "mask.pgm"), mask8);

    std::printf("phase map: %dx%d, %d valid pixels\n", final_map.phase.nx(),
                final_map.phase.ny(), final_map.valid_count());
    if (final_map.empty)
        std::printf("warning: empty phase map (no pixel passed the support threshold)\n");
}

void cmd_analyze(const AnalyzeOptions& opt) {
    ensure_dir(opt.out_dir);

    if (opt.mode == "width" || opt.mode == "snr") {
        if (opt.input.empty()) throw ConfigError("analyze " + opt.mode + " needs an input file");
        const CorrelationImage ci = read_correlation_image(opt.input);
        const GaussianFitResult fit = fit_double_gaussian(ci.values);
        KeyValueFile kv = fit_report(fit);
        if (opt.mode == "snr") {
            const SnrResult snr = compute_snr(ci.values, fit);
            kv.set("signal_mean", fmt(snr.signal_mean));
            kv.set("noise_std", fmt(snr.noise_std));
            kv.set("snr", fmt(snr.snr));
            kv.set("spot_pixels", std::to_string(snr.spot_pixels));
            kv.set("noise_pixels", std::to_string(snr.noise_pixels));
        }
        write_text_file(join(opt.out_dir, opt.mode + ".cfg"), kv.serialize());
        std::printf("%s", kv.serialize().c_str());
        return;
    }

    if (opt.mode != "scaling")
        throw ConfigError("analyze mode must be width, snr, or scaling, got '" + opt.mode + "'");

    std::vector<ScalingPoint> width_points, snr_points;
    std::vector<std::vector<double>> rows;

    if (!opt.points_csv.empty()) {
        rows = read_csv_rows(opt.points_csv);
        for (const auto& row : rows) {
            if (row.size() < 3)
                throw IoError("scaling csv '" + opt.points_csv +
                              "': each row needs f_mm, width_px, snr");
            width_points.push_back({row[0], row[1]});
            snr_points.push_back({row[0], row[2]});
        }
    } else {
        if (opt.config_path.empty())
            throw ConfigError("analyze scaling needs --points or --config");
        RunConfig rc = load_run_config(opt.config_path, opt.overrides);
        if (opt.seed) rc.params.seed = *opt.seed;
        std::vector<double> focal_lengths = opt.focal_lengths;
        if (focal_lengths.empty())
            focal_lengths = {50e-3, 75e-3, 100e-3, 150e-3, 200e-3};
        if (focal_lengths.size() < 3)
            throw ConfigError("scaling needs at least 3 focal lengths");

        for (size_t i = 0; i < focal_lengths.size(); ++i) {
            SimParams params = rc.params;
            params.optics.f = focal_lengths[i];
            params.optics.validate();
            params.seed = rc.params.seed + i;
            SimulatedSource src(params);
            const CorrelationImage gamma = correlation_image_fft(src, opt.workers);
            const GaussianFitResult fit = fit_double_gaussian(gamma.values);
            const SnrResult snr = compute_snr(gamma.values, fit);
            // sum-coordinate bins are half a sensor pixel wide
            const double width_px = 0.25 * (fit.sigma_x + fit.sigma_y);
            const double f_mm = focal_lengths[i] * 1e3;
            width_points.push_back({f_mm, width_px});
            snr_points.push_back({f_mm, snr.snr});
            rows.push_back({f_mm, width_px, snr.snr});
            std::printf("f = %g mm: width = %g px, snr = %g\n", f_mm, width_px, snr.snr);
        }
        write_csv_rows(join(opt.out_dir, "scaling.csv"), rows, "f_mm,width_px,snr");
    }

    const PowerLawFit wfit = fit_width_scaling(width_points);
    const PowerLawFit sfit = fit_snr_scaling(snr_points);

    KeyValueFile kv;
    kv.set("width_coeff", fmt(wfit.coeff));
    kv.set("width_r_squared", fmt(wfit.r_squared));
    kv.set("width_loglog_slope", fmt(wfit.loglog_slope));
    kv.set("snr_coeff", fmt(sfit.coeff));
    kv.set("snr_r_squared", fmt(sfit.r_squared));
    kv.set("snr_loglog_slope", fmt(sfit.loglog_slope));
    write_text_file(join(opt.out_dir, "scaling_fit.cfg"), kv.serialize());
    std::printf("width: a/f with a = %g px*mm, R^2 = %.6f, log-log slope %.4f\n", wfit.coeff,
                wfit.r_squared, wfit.loglog_slope);
    std::printf("snr:   b*f^2 with b = %g, R^2 = %.6f, log-log slope %.4f\n", sfit.coeff,
                sfit.r_squared, sfit.loglog_slope);
}

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"photon-pair correlation imaging: simulate, reconstruct, analyze"};
    app.require_subcommand(1);

    int default_workers = 1;
    if (const char* env = std::getenv("CORRCAM_WORKERS")) {
        char* end = nullptr;
        const long w = std::strtol(env, &end, 10);
        if (end && *end == '\0' && w >= 1 && w <= 256) default_workers = static_cast<int>(w);
    }

    SimulateOptions sim;
    sim.workers = default_workers;
    auto* c_sim = app.add_subcommand("simulate", "generate a frame stack from a config");
    c_sim->add_option("--config", sim.config_path, "run configuration file")->required();
    c_sim->add_option("--set", sim.overrides, "override config entries (key=value)");
    c_sim->add_option("--seed", sim.seed, "override sim.seed");
    c_sim->add_option("--workers", sim.workers, "worker threads");
    c_sim->add_option("--out-dir", sim.out_dir, "output directory");

    ReconstructOptions rec;
    rec.workers = default_workers;
    auto* c_rec = app.add_subcommand("reconstruct",
                                     "correlation + intensity images from a frame stack");
    c_rec->add_option("stack", rec.stack_path, "frame stack file")->required();
    c_rec->add_option("--engine", rec.engine, "direct | fft (default fft)");
    c_rec->add_option("--workers", rec.workers, "worker threads");
    c_rec->add_option("--threshold", rec.threshold, "binarize frames at this level first");
    c_rec->add_option("--profile", rec.profile, "band profile export: rows=a:b or cols=a:b");
    c_rec->add_option("--out-dir", rec.out_dir, "output directory");

    HolographyOptions holo;
    holo.workers = default_workers;
    std::vector<int> probe_bins;
    auto* c_holo = app.add_subcommand("holography",
                                      "four-phase retrieval or a theta sweep over stacks");
    c_holo->add_option("stacks", holo.object_stacks, "object stacks (4; sweep: >= 8)")
        ->required();
    c_holo->add_option("--reference", holo.reference_stacks,
                       "reference stacks (4, no-object runs)");
    c_holo->add_flag("--sweep", holo.sweep, "fit the oscillation at a probe bin instead");
    c_holo->add_option("--engine", holo.engine, "direct | fft (default fft)");
    c_holo->add_option("--workers", holo.workers, "worker threads");
    c_holo->add_option("--threshold", holo.threshold, "binarize frames at this level first");
    c_holo->add_option("--support", holo.support_threshold,
                       "mask threshold as a fraction of the peak fringe modulus");
    c_holo->add_option("--probe", probe_bins, "sweep probe bin k l (default: center)")
        ->expected(2);
    c_holo->add_option("--out-dir", holo.out_dir, "output directory");

    AnalyzeOptions ana;
    ana.workers = default_workers;
    auto* c_ana = app.add_subcommand("analyze", "width / snr / scaling reports");
    c_ana->add_option("mode", ana.mode, "width | snr | scaling")->required();
    c_ana->add_option("input", ana.input, "correlation image file (width / snr)");
    c_ana->add_option("--points", ana.points_csv, "scaling: precomputed f_mm,width_px,snr csv");
    c_ana->add_option("--config", ana.config_path, "scaling: base config for simulated runs");
    c_ana->add_option("--set", ana.overrides, "override config entries (key=value)");
    c_ana->add_option("--focal-lengths", ana.focal_lengths,
                      "scaling: focal lengths in meters (default 0.05 0.075 0.1 0.15 0.2)");
    c_ana->add_option("--seed", ana.seed, "override sim.seed");
    c_ana->add_option("--workers", ana.workers, "worker threads");
    c_ana->add_option("--out-dir", ana.out_dir, "output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*c_sim) {
            cmd_simulate(sim);
        } else if (*c_rec) {
            cmd_reconstruct(rec);
        } else if (*c_holo) {
            if (!probe_bins.empty()) holo.probe = std::make_pair(probe_bins[0], probe_bins[1]);
            cmd_holography(holo);
        } else if (*c_ana) {
            cmd_analyze(ana);
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const CapacityError& e) {
        std::fprintf(stderr, "capacity error: %s\n", e.what());
        return 3;
    } catch (const ConvergenceError& e) {
        std::fprintf(stderr, "convergence error: %s\n", e.what());
        return 4;
    } catch (const IoError& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 5;
    }
    return 0;
}

} // namespace corrcam
