#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "corrcam/correlation.hpp"
#include "corrcam/image.hpp"
#include "corrcam/io/csv.hpp"
#include "corrcam/io/framefile.hpp"
#include "corrcam/io/keyval.hpp"

using namespace corrcam;
namespace fs = std::filesystem;

namespace {

// one scratch tree for the whole binary; individual cases use subdirs
struct CliFixture {
    std::string bin;
    fs::path root;

    CliFixture() {
        const char* env = std::getenv("CORRCAM_BIN");
        REQUIRE_MESSAGE(env != nullptr, "CORRCAM_BIN must point at the cli binary");
        bin = env;
        root = fs::temp_directory_path() / ("corrcam_cli_" + std::to_string(::getpid()));
        fs::create_directories(root);
    }

    ~CliFixture() {
        std::error_code ec;
        fs::remove_all(root, ec);
    }

    std::string dir(const std::string& name) const {
        fs::path p = root / name;
        fs::create_directories(p);
        return p.string();
    }

    int run(const std::string& args, const std::string& env_prefix = "") const {
        const std::string cmd =
            env_prefix + bin + " " + args + " > " + (root / "last_stdout.txt").string() + " 2>&1";
        const int rc = std::system(cmd.c_str());
        REQUIRE(rc != -1);
        return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    }

    std::string last_output() const {
        std::ifstream in(root / "last_stdout.txt");
        return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    }
};

CliFixture& fx() {
    static CliFixture fixture;
    return fixture;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string amplitude_cfg() {
    static std::string path;
    if (path.empty()) {
        path = (fx().root / "disc.cfg").string();
        write_text(path,
                   "object.kind = disc\n"
                   "object.n = 16\n"
                   "object.pixel_size = 64e-6\n"
                   "object.radius_px = 4\n"
                   "optics.sensor_nx = 16\n"
                   "optics.sensor_ny = 16\n"
                   "source.mean_pairs_per_frame = 6\n"
                   "source.minus_sigma = 1.5\n"
                   "sim.frames = 400\n"
                   "sim.seed = 3\n"
                   "sim.dtype = u16\n");
    }
    return path;
}

std::string interference_cfg() {
    static std::string path;
    if (path.empty()) {
        path = (fx().root / "inter.cfg").string();
        write_text(path,
                   "object.kind = two_level_phase\n"
                   "object.n = 16\n"
                   "object.pixel_size = 16e-6\n"
                   "object.support_radius_px = 6\n"
                   "object.step_radius_px = 3\n"
                   "object.phase_step = 1.0\n"
                   "optics.sensor_nx = 16\n"
                   "optics.sensor_ny = 16\n"
                   "source.mode = interference\n"
                   "source.mean_pairs_per_frame = 8\n"
                   "source.minus_sigma = 2.0\n"
                   "source.reference_amplitude = 0.9\n"
                   "source.instrument_phase = 0.4\n"
                   "camera.quantum_efficiency = 1.0\n"
                   "camera.dark_rate = 0\n"
                   "camera.readout_sigma = 0\n"
                   "camera.gain = 1\n"
                   "camera.gain_mode = deterministic\n"
                   "sim.frames = 400\n"
                   "sim.seed = 5\n"
                   "sim.dtype = u16\n");
    }
    return path;
}

// canonical four-step phase values, printed to full double precision
const char* kThetaStr[4] = {"0", "0.78539816339744831", "1.5707963267948966",
                            "2.3561944901923449"};

double payload_rel_diff(const CorrelationImage& a, const CorrelationImage& b) {
    double scale = 0, worst = 0;
    for (size_t i = 0; i < a.values.size(); ++i)
        scale = std::max(scale, std::abs(a.values.raw()[i]));
    if (scale == 0) scale = 1;
    for (size_t i = 0; i < a.values.size(); ++i)
        worst = std::max(worst, std::abs(a.values.raw()[i] - b.values.raw()[i]) / scale);
    return worst;
}

bool has_magic(const fs::path& p, const char* magic) {
    std::ifstream in(p, std::ios::binary);
    std::string head(strlen(magic), '\0');
    in.read(head.data(), std::streamsize(head.size()));
    return in && head == magic;
}

} // namespace

TEST_CASE("help exits cleanly") {
    CHECK(fx().run("--help") == 0);
    CHECK(fx().run("simulate --help") == 0);
    CHECK(fx().run("analyze --help") == 0);
}

TEST_CASE("simulate writes the stack and the effective config") {
    const std::string out = fx().dir("sim");
    REQUIRE(fx().run("simulate --config " + amplitude_cfg() + " --out-dir " + out) == 0);

    const FrameFileInfo info = read_frame_stack_info(out + "/frames.bin");
    CHECK(info.nx == 16);
    CHECK(info.ny == 16);
    CHECK(info.frames == 400);
    CHECK(info.dtype == Dtype::u16);

    KeyValueFile eff = KeyValueFile::load(out + "/effective.cfg");
    CHECK(eff.get_string("object.kind") == "disc");
    CHECK(eff.get_int("sim.seed") == 3);
    CHECK(eff.get_double("optics.f") == doctest::Approx(0.1)); // default filled in
}

TEST_CASE("seed and set overrides change the effective run") {
    const std::string out = fx().dir("sim_override");
    REQUIRE(fx().run("simulate --config " + amplitude_cfg() + " --seed 9 --set sim.frames=50" +
                     " --out-dir " + out) == 0);
    const FrameFileInfo info = read_frame_stack_info(out + "/frames.bin");
    CHECK(info.frames == 50);
    KeyValueFile eff = KeyValueFile::load(out + "/effective.cfg");
    CHECK(eff.get_int("sim.seed") == 9);

    // unknown keys are rejected
    CHECK(fx().run("simulate --config " + amplitude_cfg() + " --set bogus.key=1 --out-dir " +
                   fx().dir("sim_bad")) == 2);
}

TEST_CASE("reconstruct: both engines, equal payloads, previews, profile") {
    const std::string sim = fx().dir("sim");
    const std::string stack = sim + "/frames.bin";
    if (!fs::exists(stack))
        REQUIRE(fx().run("simulate --config " + amplitude_cfg() + " --out-dir " + sim) == 0);

    const std::string out_fft = fx().dir("rec_fft");
    const std::string out_dir = fx().dir("rec_direct");
    REQUIRE(fx().run("reconstruct " + stack + " --engine fft --profile rows=14:16 --out-dir " +
                     out_fft) == 0);
    REQUIRE(fx().run("reconstruct " + stack + " --engine direct --out-dir " + out_dir) == 0);

    CorrelationImage g_fft = read_correlation_image(out_fft + "/gamma.bin");
    CorrelationImage g_dir = read_correlation_image(out_dir + "/gamma.bin");
    REQUIRE(g_fft.values.nx() == 31);
    REQUIRE(g_fft.values.ny() == 31);
    CHECK(g_fft.frames_used == 400);
    CHECK(g_fft.pixel_pitch == doctest::Approx(16e-6));
    CHECK(payload_rel_diff(g_fft, g_dir) < 1e-6); // f32 container rounding, not engine drift

    CHECK(has_magic(out_fft + "/gamma.pgm", "P5"));
    CHECK(has_magic(out_fft + "/intensity.pgm", "P5"));

    const FrameFileInfo info = read_frame_stack_info(out_fft + "/intensity.bin");
    CHECK(info.nx == 16);
    CHECK(info.frames == 1);

    auto rows = read_csv_rows(out_fft + "/profile.csv");
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].size() == 31);
}

TEST_CASE("worker count does not change the output") {
    const std::string sim = fx().dir("sim");
    const std::string stack = sim + "/frames.bin";
    if (!fs::exists(stack))
        REQUIRE(fx().run("simulate --config " + amplitude_cfg() + " --out-dir " + sim) == 0);

    const std::string out1 = fx().dir("rec_w1");
    const std::string out2 = fx().dir("rec_w2");
    REQUIRE(fx().run("reconstruct " + stack + " --workers 1 --out-dir " + out1) == 0);
    REQUIRE(fx().run("reconstruct " + stack + " --out-dir " + out2, "CORRCAM_WORKERS=2 ") == 0);

    std::ifstream a(out1 + "/gamma.bin", std::ios::binary), b(out2 + "/gamma.bin", std::ios::binary);
    std::vector<char> da{std::istreambuf_iterator<char>(a), std::istreambuf_iterator<char>()};
    std::vector<char> db{std::istreambuf_iterator<char>(b), std::istreambuf_iterator<char>()};
    REQUIRE(!da.empty());
    CHECK(da == db);
}

TEST_CASE("holography four-step pipeline produces a phase map") {
    std::vector<std::string> stacks;
    for (int s = 0; s < 4; ++s) {
        const std::string out = fx().dir("holo_s" + std::to_string(s));
        REQUIRE(fx().run("simulate --config " + interference_cfg() + " --set source.theta=" +
                         kThetaStr[s] + " --seed " + std::to_string(21 + s) + " --out-dir " +
                         out) == 0);
        stacks.push_back(out + "/frames.bin");
    }

    const std::string out = fx().dir("holo");
    std::string cmd = "holography";
    for (const auto& s : stacks) cmd += " " + s;
    cmd += " --support 0.05 --out-dir " + out;
    REQUIRE(fx().run(cmd) == 0);

    Image2D<double> phase = read_csv_image(out + "/phase.csv");
    CHECK(phase.nx() == 31);
    CHECK(phase.ny() == 31);
    CHECK(has_magic(out + "/phase.pgm", "P5"));
    CHECK(has_magic(out + "/mask.pgm", "P5"));

    // a duplicated phase slot is rejected
    std::string dup = "holography " + stacks[0] + " " + stacks[0] + " " + stacks[1] + " " +
                      stacks[2] + " --out-dir " + fx().dir("holo_dup");
    CHECK(fx().run(dup) == 2);

    // a stack without source.theta metadata cannot join a set
    FrameStack bare;
    bare.nx = 16;
    bare.ny = 16;
    bare.frames = 2;
    bare.data.assign(bare.frame_size() * 2, 1.0f);
    const std::string bare_path = (fx().root / "bare.bin").string();
    write_frame_stack(bare_path, bare);
    std::string noth = "holography " + bare_path + " " + stacks[1] + " " + stacks[2] + " " +
                       stacks[3] + " --out-dir " + fx().dir("holo_noth");
    CHECK(fx().run(noth) == 2);
}

TEST_CASE("holography sweep fits the oscillation at the probe bin") {
    std::vector<std::string> stacks;
    for (int s = 0; s < 8; ++s) {
        const double theta = 2 * M_PI * double(s) / 8.0;
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", theta);
        const std::string out = fx().dir("sweep_s" + std::to_string(s));
        REQUIRE(fx().run("simulate --config " + interference_cfg() + " --set source.theta=" +
                         std::string(buf) + " --set sim.frames=300 --seed " +
                         std::to_string(50 + s) + " --out-dir " + out) == 0);
        stacks.push_back(out + "/frames.bin");
    }

    const std::string out = fx().dir("sweep");
    std::string cmd = "holography --sweep";
    for (const auto& s : stacks) cmd += " " + s;
    cmd += " --probe 15 15 --out-dir " + out;
    REQUIRE(fx().run(cmd) == 0);

    auto rows = read_csv_rows(out + "/sweep.csv");
    REQUIRE(rows.size() == 8);
    CHECK(rows[0].size() == 2);

    KeyValueFile fit = KeyValueFile::load(out + "/sweep_fit.cfg");
    CHECK(fit.get_int("probe_k") == 15);
    CHECK(fit.has("offset"));
    CHECK(fit.has("amplitude"));
    CHECK(fit.has("phase"));
    CHECK(fit.get_double("r_squared") <= 1.0 + 1e-12);
}

TEST_CASE("analyze width reports the fitted spot") {
    // synthetic correlation image with a known gaussian
    CorrelationImage ci;
    ci.values = Image2D<double>(41, 41);
    for (int j = 0; j < 41; ++j)
        for (int i = 0; i < 41; ++i) {
            const double ex = (i - 20.0) * (i - 20.0) / (3.0 * 3.0);
            const double ey = (j - 20.0) * (j - 20.0) / (5.0 * 5.0);
            ci.values(i, j) = 2.0 * std::exp(-ex - ey) + 0.1;
        }
    ci.frames_used = 10;
    ci.pixel_pitch = 16e-6;
    const std::string in = (fx().root / "synth_gamma.bin").string();
    write_correlation_image(in, ci);

    const std::string out = fx().dir("width");
    REQUIRE(fx().run("analyze width " + in + " --out-dir " + out) == 0);
    KeyValueFile kv = KeyValueFile::load(out + "/width.cfg");
    CHECK(kv.get_double("sigma_x") == doctest::Approx(3.0).epsilon(1e-4));
    CHECK(kv.get_double("sigma_y") == doctest::Approx(5.0).epsilon(1e-4));
    CHECK(kv.get_double("x0") == doctest::Approx(20.0).epsilon(1e-4));
}

TEST_CASE("error paths map to distinct exit codes") {
    CHECK(fx().run("simulate --config /nonexistent/run.cfg --out-dir " + fx().dir("err1")) == 5);
    CHECK(fx().run("reconstruct /nonexistent/stack.bin --out-dir " + fx().dir("err2")) == 5);

    const std::string sim = fx().dir("sim");
    const std::string stack = sim + "/frames.bin";
    if (!fs::exists(stack))
        REQUIRE(fx().run("simulate --config " + amplitude_cfg() + " --out-dir " + sim) == 0);
    CHECK(fx().run("reconstruct " + stack + " --engine warp --out-dir " + fx().dir("err3")) == 2);
    CHECK(fx().run("analyze bogus --out-dir " + fx().dir("err4")) == 2);
    CHECK(fx().run("holography " + stack + " --out-dir " + fx().dir("err5")) == 2); // 1 stack
    CHECK(fx().run("definitely-not-a-subcommand") == 2);
}
