#pragma once

#include <optional>
#include <string>
#include <vector>

// Command implementations behind the corrcam CLI.  Each cmd_* throws the
// taxonomy errors (ConfigError, CapacityError, ConvergenceError, IoError);
// cli_main maps them to process exit codes 2/3/4/5 and returns 0 on success.

namespace corrcam {

struct SimulateOptions {
    std::string config_path;
    std::vector<std::string> overrides;  // --set key=value
    std::optional<uint64_t> seed;        // --seed overrides sim.seed
    int workers = 1;
    std::string out_dir = ".";
};
void cmd_simulate(const SimulateOptions& opt);

struct ReconstructOptions {
    std::string stack_path;
    std::string engine = "fft";  // direct | fft
    int workers = 1;
    std::optional<double> threshold;  // binarize frames before estimation
    std::string profile;              // "rows=a:b" or "cols=a:b"
    std::string out_dir = ".";
};
void cmd_reconstruct(const ReconstructOptions& opt);

struct HolographyOptions {
    std::vector<std::string> object_stacks;     // 4 stacks (sweep: >= 8)
    std::vector<std::string> reference_stacks;  // 4 stacks or empty
    bool sweep = false;
    std::string engine = "fft";
    int workers = 1;
    std::optional<double> threshold;
    double support_threshold = 0.1;
    std::optional<std::pair<int, int>> probe;  // sweep probe bin; default center
    std::string out_dir = ".";
};
void cmd_holography(const HolographyOptions& opt);

struct AnalyzeOptions {
    std::string mode;        // width | snr | scaling
    std::string input;       // width/snr: correlation image file
    std::string points_csv;  // scaling: precomputed points (f_mm, width_px, snr)
    std::string config_path; // scaling: base config to orchestrate simulations
    std::vector<std::string> overrides;
    std::vector<double> focal_lengths;  // meters; scaling orchestration
    std::optional<uint64_t> seed;
    int workers = 1;
    std::string out_dir = ".";
};
void cmd_analyze(const AnalyzeOptions& opt);

// Parses argv, dispatches, maps the error taxonomy to exit codes.
int cli_main(int argc, const char* const* argv);

} // namespace corrcam
