#include "corrcam/io/object_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "corrcam/errors.hpp"
#include "corrcam/io/csv.hpp"
#include "corrcam/io/keyval.hpp"
#include "corrcam/io/pgm.hpp"

namespace corrcam {

void save_object(const std::string& base, const ObjectSpec& obj) {
    obj.validate();
    double scale = image_max(obj.amplitude);
    Image2D<uint16_t> q(obj.amplitude.nx(), obj.amplitude.ny());
    for (int iy = 0; iy < q.ny(); ++iy)
        for (int ix = 0; ix < q.nx(); ++ix)
            q(ix, iy) = static_cast<uint16_t>(std::lround(obj.amplitude(ix, iy) / scale * 65535.0));
    write_pgm16(base + ".pgm", q);
    write_csv(base + ".phase.csv", obj.phase);

    char buf[40];
    std::ofstream f(base + ".cfg");
    if (!f) throw IoError("cannot open for writing: " + base + ".cfg");
    std::snprintf(buf, sizeof buf, "%.17g", obj.pixel_size);
    f << "pixel_size = " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", scale);
    f << "amplitude_scale = " << buf << "\n";
    f << "nx = " << obj.amplitude.nx() << "\n";
    f << "ny = " << obj.amplitude.ny() << "\n";
    if (!f) throw IoError("write failed: " + base + ".cfg");
}

ObjectSpec load_object(const std::string& base) {
    KeyValueFile side = KeyValueFile::load(base + ".cfg");
    side.check_known({"pixel_size", "amplitude_scale", "nx", "ny"});
    double pixel_size = side.get_double("pixel_size");
    double scale = side.get_double("amplitude_scale", 1.0);

    Image2D<uint16_t> q = read_pgm16(base + ".pgm");
    Image2D<double> phase = read_csv_image(base + ".phase.csv");
    if (q.nx() != phase.nx() || q.ny() != phase.ny())
        throw IoError(base + ": amplitude and phase dimensions differ");
    long nx = side.get_int("nx", q.nx()), ny = side.get_int("ny", q.ny());
    if (nx != q.nx() || ny != q.ny())
        throw IoError(base + ": sidecar dimensions disagree with PGM");

    ObjectSpec obj;
    obj.pixel_size = pixel_size;
    obj.amplitude = Image2D<double>(q.nx(), q.ny());
    for (int iy = 0; iy < q.ny(); ++iy)
        for (int ix = 0; ix < q.nx(); ++ix)
            obj.amplitude(ix, iy) = q(ix, iy) / 65535.0 * scale;
    obj.phase = std::move(phase);
    obj.validate();
    return obj;
}

} // namespace corrcam
