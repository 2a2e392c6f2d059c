#include "corrcam/io/pgm.hpp"

#include <cstdio>
#include <fstream>

#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

// Consumes whitespace and '#' comment lines between header tokens.
int next_header_int(std::istream& in, const std::string& path) {
    for (;;) {
        int c = in.peek();
        if (c == EOF) throw IoError(path + ": truncated PGM header");
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        break;
    }
    int v = 0;
    if (!(in >> v)) throw IoError(path + ": malformed PGM header");
    return v;
}

void read_header(std::istream& in, const std::string& path, int& w, int& h, int& maxval) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (m0 != 'P' || m1 != '5') throw IoError(path + ": not a binary PGM (P5) file");
    w = next_header_int(in, path);
    h = next_header_int(in, path);
    maxval = next_header_int(in, path);
    in.get(); // single whitespace after maxval
    if (w <= 0 || h <= 0) throw IoError(path + ": bad PGM dimensions");
}

} // namespace

void write_pgm16(const std::string& path, const Image2D<uint16_t>& im) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "P5\n" << im.nx() << " " << im.ny() << "\n65535\n";
    std::vector<unsigned char> row(static_cast<size_t>(im.nx()) * 2);
    for (int iy = 0; iy < im.ny(); ++iy) {
        for (int ix = 0; ix < im.nx(); ++ix) {
            uint16_t v = im(ix, iy);
            row[2 * ix] = static_cast<unsigned char>(v >> 8);
            row[2 * ix + 1] = static_cast<unsigned char>(v & 0xff);
        }
        f.write(reinterpret_cast<const char*>(row.data()), row.size());
    }
    if (!f) throw IoError("write failed: " + path);
}

Image2D<uint16_t> read_pgm16(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    int w, h, maxval;
    read_header(f, path, w, h, maxval);
    if (maxval <= 255 || maxval > 65535)
        throw IoError(path + ": expected 16-bit PGM, maxval=" + std::to_string(maxval));
    Image2D<uint16_t> im(w, h);
    std::vector<unsigned char> row(static_cast<size_t>(w) * 2);
    for (int iy = 0; iy < h; ++iy) {
        f.read(reinterpret_cast<char*>(row.data()), row.size());
        if (!f) throw IoError(path + ": truncated PGM payload");
        for (int ix = 0; ix < w; ++ix)
            im(ix, iy) = static_cast<uint16_t>((row[2 * ix] << 8) | row[2 * ix + 1]);
    }
    return im;
}

void write_pgm8(const std::string& path, const Image2D<uint8_t>& im) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f << "P5\n" << im.nx() << " " << im.ny() << "\n255\n";
    for (int iy = 0; iy < im.ny(); ++iy)
        f.write(reinterpret_cast<const char*>(im.data() + static_cast<size_t>(iy) * im.nx()), im.nx());
    if (!f) throw IoError("write failed: " + path);
}

Image2D<uint8_t> read_pgm8(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    int w, h, maxval;
    read_header(f, path, w, h, maxval);
    if (maxval != 255) throw IoError(path + ": expected 8-bit PGM, maxval=" + std::to_string(maxval));
    Image2D<uint8_t> im(w, h);
    for (int iy = 0; iy < h; ++iy) {
        f.read(reinterpret_cast<char*>(im.data() + static_cast<size_t>(iy) * w), w);
        if (!f) throw IoError(path + ": truncated PGM payload");
    }
    return im;
}

} // namespace corrcam
