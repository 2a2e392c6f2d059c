#include <cmath>
#include <cstdio>

#include "corrcam/errors.hpp"
#include "corrcam/io/object_io.hpp"
#include "corrcam/run_config.hpp"

namespace corrcam {

namespace {

const std::vector<std::string> kAllowedKeys = {
    "object.kind",
    "object.n",
    "object.pixel_size",
    "object.amplitude",
    "object.sigma_px",
    "object.radius_px",
    "object.period_px",
    "object.support_radius_px",
    "object.step_radius_px",
    "object.phase_step",
    "object.path",
    "optics.lambda_pump",
    "optics.f",
    "optics.f_prime",
    "optics.d",
    "optics.d_prime",
    "optics.pitch",
    "optics.sensor_nx",
    "optics.sensor_ny",
    "source.mode",
    "source.mean_pairs_per_frame",
    "source.minus_sigma",
    "source.theta",
    "source.reference_amplitude",
    "source.instrument_phase",
    "camera.quantum_efficiency",
    "camera.dark_rate",
    "camera.readout_sigma",
    "camera.gain",
    "camera.gain_mode",
    "camera.threshold",
    "sim.frames",
    "sim.seed",
    "sim.dtype",
};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int require_grid(const KeyValueFile& kv) {
    const long n = kv.get_int("object.n", 64);
    if (n < 2 || n > 4096) throw ConfigError("object.n must be in [2, 4096]");
    return static_cast<int>(n);
}

} // namespace

ObjectSpec make_object(const std::string& kind, const KeyValueFile& kv) {
    // default cell size 32 um: with the default optics (f = 100 mm,
    // f' = 50 mm, 16 um pitch) one object cell maps onto one sensor pixel
    const double dx = kv.get_double("object.pixel_size", 32e-6);
    if (dx <= 0) throw ConfigError("object.pixel_size must be positive");

    if (kind == "uniform")
        return object_uniform(require_grid(kv), dx, kv.get_double("object.amplitude", 1.0));
    if (kind == "delta") return object_delta(require_grid(kv), dx);
    if (kind == "disc")
        return object_disc(require_grid(kv), dx, kv.get_double("object.radius_px"));
    if (kind == "gaussian")
        return object_gaussian(require_grid(kv), dx, kv.get_double("object.sigma_px"));
    if (kind == "grating")
        return object_grating(require_grid(kv), dx, kv.get_double("object.period_px"));
    if (kind == "cat") return object_cat(require_grid(kv), dx);
    if (kind == "two_level_phase")
        return object_two_level_phase(require_grid(kv), dx,
                                      kv.get_double("object.support_radius_px"),
                                      kv.get_double("object.step_radius_px"),
                                      kv.get_double("object.phase_step"));
    if (kind == "file") {
        ObjectSpec obj = load_object(kv.get_string("object.path"));
        if (kv.has("object.pixel_size")) obj.pixel_size = dx;
        return obj;
    }
    throw ConfigError("object.kind '" + kind +
                      "' unknown (uniform, delta, disc, gaussian, grating, cat, "
                      "two_level_phase, file)");
}

RunConfig run_config_from_text(const std::string& text, const std::string& source_name,
                               const std::vector<std::string>& overrides) {
    KeyValueFile kv = KeyValueFile::parse(text, source_name);
    for (const auto& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("--set expects key=value, got '" + ov + "'");
        std::string key = ov.substr(0, eq), value = ov.substr(eq + 1);
        while (!key.empty() && key.back() == ' ') key.pop_back();
        while (!value.empty() && value.front() == ' ') value.erase(value.begin());
        kv.set(key, value);
    }
    kv.check_known(kAllowedKeys);

    RunConfig rc;
    rc.object_kind = kv.get_string("object.kind");
    if (rc.object_kind == "file") rc.object_path = kv.get_string("object.path");
    rc.params.object = make_object(rc.object_kind, kv);

    OpticalConfig& oc = rc.params.optics;
    oc.lambda_pump = kv.get_double("optics.lambda_pump", oc.lambda_pump);
    oc.f = kv.get_double("optics.f", oc.f);
    oc.f_prime = kv.get_double("optics.f_prime", oc.f_prime);
    oc.d = kv.get_double("optics.d", oc.d);
    oc.d_prime = kv.get_double("optics.d_prime", oc.d_prime);
    oc.pitch = kv.get_double("optics.pitch", oc.pitch);
    oc.sensor_nx = static_cast<int>(kv.get_int("optics.sensor_nx", oc.sensor_nx));
    oc.sensor_ny = static_cast<int>(kv.get_int("optics.sensor_ny", oc.sensor_ny));

    PairSourceConfig& sc = rc.params.source;
    const std::string mode = kv.get_string("source.mode", "amplitude");
    if (mode == "amplitude")
        sc.mode = SourceMode::amplitude;
    else if (mode == "interference")
        sc.mode = SourceMode::interference;
    else
        throw ConfigError("source.mode must be amplitude or interference, got '" + mode + "'");
    sc.mean_pairs_per_frame = kv.get_double("source.mean_pairs_per_frame", sc.mean_pairs_per_frame);
    sc.minus_sigma = kv.get_double("source.minus_sigma", sc.minus_sigma);
    sc.theta = kv.get_double("source.theta", sc.theta);
    sc.reference_amplitude = kv.get_double("source.reference_amplitude", sc.reference_amplitude);
    sc.instrument_phase = kv.get_double("source.instrument_phase", sc.instrument_phase);

    CameraModel& cm = rc.params.camera;
    cm.quantum_efficiency = kv.get_double("camera.quantum_efficiency", cm.quantum_efficiency);
    cm.dark_rate = kv.get_double("camera.dark_rate", cm.dark_rate);
    cm.readout_sigma = kv.get_double("camera.readout_sigma", cm.readout_sigma);
    cm.gain = kv.get_double("camera.gain", cm.gain);
    cm.gain_mode = gain_mode_from_name(kv.get_string("camera.gain_mode", "stochastic"));
    if (kv.has("camera.threshold")) cm.threshold = kv.get_double("camera.threshold");

    const long frames = kv.get_int("sim.frames", 100000);
    if (frames < 2 || frames > 100000000) throw ConfigError("sim.frames must be in [2, 1e8]");
    rc.params.frames = static_cast<uint32_t>(frames);
    const long seed = kv.get_int("sim.seed", 1);
    if (seed < 0) throw ConfigError("sim.seed must be >= 0");
    rc.params.seed = static_cast<uint64_t>(seed);
    rc.params.dtype = dtype_from_name(kv.get_string("sim.dtype", "u16"));

    rc.params.object.validate();
    rc.params.optics.validate();
    rc.params.source.validate();
    rc.params.camera.validate();
    return rc;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    return run_config_from_text(KeyValueFile::load(path).serialize(), path, overrides);
}

std::string RunConfig::effective_text() const {
    KeyValueFile kv;
    auto set = [&](const std::string& k, const std::string& v) { kv.set(k, v); };
    set("object.kind", object_kind);
    if (!object_path.empty()) set("object.path", object_path);
    set("object.n", std::to_string(params.object.amplitude.nx()));
    set("object.pixel_size", fmt(params.object.pixel_size));
    set("optics.lambda_pump", fmt(params.optics.lambda_pump));
    set("optics.f", fmt(params.optics.f));
    set("optics.f_prime", fmt(params.optics.f_prime));
    set("optics.d", fmt(params.optics.dist_d()));
    set("optics.d_prime", fmt(params.optics.dist_d_prime()));
    set("optics.pitch", fmt(params.optics.pitch));
    set("optics.sensor_nx", std::to_string(params.optics.sensor_nx));
    set("optics.sensor_ny", std::to_string(params.optics.sensor_ny));
    set("source.mode", params.source.mode == SourceMode::amplitude ? "amplitude" : "interference");
    set("source.mean_pairs_per_frame", fmt(params.source.mean_pairs_per_frame));
    set("source.minus_sigma", fmt(params.source.minus_sigma));
    set("source.theta", fmt(params.source.theta));
    set("source.reference_amplitude", fmt(params.source.reference_amplitude));
    set("source.instrument_phase", fmt(params.source.instrument_phase));
    set("camera.quantum_efficiency", fmt(params.camera.quantum_efficiency));
    set("camera.dark_rate", fmt(params.camera.dark_rate));
    set("camera.readout_sigma", fmt(params.camera.readout_sigma));
    set("camera.gain", fmt(params.camera.gain));
    set("camera.gain_mode", gain_mode_name(params.camera.gain_mode));
    if (params.camera.threshold) set("camera.threshold", fmt(*params.camera.threshold));
    set("sim.frames", std::to_string(params.frames));
    set("sim.seed", std::to_string(params.seed));
    set("sim.dtype", dtype_name(params.dtype));
    return kv.serialize();
}

} // namespace corrcam
