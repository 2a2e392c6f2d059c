#include "corrcam/io/framefile.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

constexpr char kMagic[16] = {'C', 'O', 'R', 'R', 'C', 'A', 'M', 'F',
                             'R', 'A', 'M', 'E', 'S', '\0', '\0', '\0'};
constexpr uint32_t kVersion = 1;

void put_u32(std::ostream& f, uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    f.write(reinterpret_cast<const char*>(b), 4);
}

uint32_t get_u32(std::istream& f, const std::string& path) {
    unsigned char b[4];
    f.read(reinterpret_cast<char*>(b), 4);
    if (!f) throw IoError(path + ": truncated header");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

std::string encode_metadata(const std::vector<std::pair<std::string, std::string>>& md) {
    std::string out;
    for (const auto& [k, v] : md) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::vector<std::pair<std::string, std::string>> decode_metadata(const std::string& text,
                                                                 const std::string& path) {
    std::vector<std::pair<std::string, std::string>> md;
    size_t pos = 0;
    int lineno = 0;
    while (pos < text.size()) {
        size_t nl = text.find('\n', pos);
        if (nl == std::string::npos) nl = text.size();
        std::string line = text.substr(pos, nl - pos);
        pos = nl + 1;
        ++lineno;
        if (line.empty()) continue;
        size_t eq = line.find(" = ");
        if (eq == std::string::npos)
            throw IoError(path + ": malformed metadata line " + std::to_string(lineno));
        md.emplace_back(line.substr(0, eq), line.substr(eq + 3));
    }
    return md;
}

size_t sample_bytes(Dtype d) { return d == Dtype::u16 ? 2 : 4; }

} // namespace

Dtype dtype_from_name(const std::string& s) {
    if (s == "u16") return Dtype::u16;
    if (s == "f32") return Dtype::f32;
    throw ConfigError("unknown dtype '" + s + "' (expected u16 or f32)");
}

void write_frame_stack(const std::string& path, const FrameStack& stack) {
    stack.validate();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open for writing: " + path);
    f.write(kMagic, 16);
    put_u32(f, kVersion);
    put_u32(f, stack.frames);
    put_u32(f, static_cast<uint32_t>(stack.nx));
    put_u32(f, static_cast<uint32_t>(stack.ny));
    put_u32(f, static_cast<uint32_t>(stack.dtype));

    const size_t n = stack.data.size();
    if (stack.dtype == Dtype::u16) {
        std::vector<unsigned char> buf(n * 2);
        for (size_t i = 0; i < n; ++i) {
            double v = stack.data[i];
            if (!(v >= 0.0 && v <= 65535.0) || v != std::floor(v))
                throw IoError(path + ": u16 stack holds non-u16 sample " + std::to_string(v));
            uint16_t u = static_cast<uint16_t>(v);
            buf[2 * i] = static_cast<unsigned char>(u & 0xff);
            buf[2 * i + 1] = static_cast<unsigned char>(u >> 8);
        }
        f.write(reinterpret_cast<const char*>(buf.data()), buf.size());
    } else {
        // floats are stored LE; this targets little-endian hosts
        f.write(reinterpret_cast<const char*>(stack.data.data()), n * 4);
    }

    std::string md = encode_metadata(stack.metadata);
    put_u32(f, static_cast<uint32_t>(md.size()));
    f.write(md.data(), md.size());
    if (!f) throw IoError("write failed: " + path);
}

namespace {

void read_header_common(std::ifstream& f, const std::string& path, FrameFileInfo& info,
                        uint64_t& payload_bytes) {
    char magic[16];
    f.read(magic, 16);
    if (!f || std::memcmp(magic, kMagic, 16) != 0)
        throw IoError(path + ": not a corrcam frame file (bad magic)");
    uint32_t version = get_u32(f, path);
    if (version != kVersion)
        throw IoError(path + ": unsupported version " + std::to_string(version));
    info.frames = get_u32(f, path);
    info.nx = static_cast<int>(get_u32(f, path));
    info.ny = static_cast<int>(get_u32(f, path));
    uint32_t dt = get_u32(f, path);
    if (dt > 1) throw IoError(path + ": unknown dtype code " + std::to_string(dt));
    info.dtype = static_cast<Dtype>(dt);
    if (info.frames == 0 || info.nx <= 0 || info.ny <= 0)
        throw IoError(path + ": degenerate dimensions in header");
    payload_bytes = static_cast<uint64_t>(info.frames) * info.nx * info.ny * sample_bytes(info.dtype);
}

} // namespace

FrameStack read_frame_stack(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    f.seekg(0, std::ios::end);
    uint64_t file_size = static_cast<uint64_t>(f.tellg());
    f.seekg(0);

    FrameFileInfo info;
    uint64_t payload_bytes = 0;
    read_header_common(f, path, info, payload_bytes);
    if (file_size < 36 + payload_bytes + 4)
        throw IoError(path + ": file too short for declared dimensions");

    FrameStack stack;
    stack.nx = info.nx;
    stack.ny = info.ny;
    stack.frames = info.frames;
    stack.dtype = info.dtype;
    size_t n = static_cast<size_t>(payload_bytes / sample_bytes(info.dtype));
    stack.data.resize(n);
    if (info.dtype == Dtype::u16) {
        std::vector<unsigned char> buf(payload_bytes);
        f.read(reinterpret_cast<char*>(buf.data()), payload_bytes);
        if (!f) throw IoError(path + ": truncated payload");
        for (size_t i = 0; i < n; ++i)
            stack.data[i] = static_cast<float>(buf[2 * i] | (buf[2 * i + 1] << 8));
    } else {
        f.read(reinterpret_cast<char*>(stack.data.data()), payload_bytes);
        if (!f) throw IoError(path + ": truncated payload");
    }

    uint32_t md_len = get_u32(f, path);
    if (file_size != 36 + payload_bytes + 4 + md_len)
        throw IoError(path + ": size mismatch (corrupt or trailing garbage)");
    std::string md(md_len, '\0');
    f.read(md.data(), md_len);
    if (!f) throw IoError(path + ": truncated metadata");
    stack.metadata = decode_metadata(md, path);
    return stack;
}

FrameFileInfo read_frame_stack_info(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open: " + path);
    f.seekg(0, std::ios::end);
    uint64_t file_size = static_cast<uint64_t>(f.tellg());
    f.seekg(0);
    FrameFileInfo info;
    uint64_t payload_bytes = 0;
    read_header_common(f, path, info, payload_bytes);
    if (file_size < 36 + payload_bytes + 4)
        throw IoError(path + ": file too short for declared dimensions");
    f.seekg(static_cast<std::streamoff>(36 + payload_bytes));
    uint32_t md_len = get_u32(f, path);
    if (file_size != 36 + payload_bytes + 4 + md_len)
        throw IoError(path + ": size mismatch (corrupt or trailing garbage)");
    std::string md(md_len, '\0');
    f.read(md.data(), md_len);
    if (!f) throw IoError(path + ": truncated metadata");
    info.metadata = decode_metadata(md, path);
    return info;
}

void write_correlation_image(const std::string& path, const CorrelationImage& im) {
    FrameStack s;
    s.nx = im.values.nx();
    s.ny = im.values.ny();
    s.frames = 1;
    s.dtype = Dtype::f32;
    s.data.resize(im.values.size());
    for (size_t i = 0; i < s.data.size(); ++i)
        s.data[i] = static_cast<float>(im.values.raw()[i]);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%u", im.frames_used);
    s.metadata.emplace_back("frames_used", buf);
    std::snprintf(buf, sizeof buf, "%.17g", im.pixel_pitch);
    s.metadata.emplace_back("pixel_pitch", buf);
    s.metadata.emplace_back("kind", "correlation");
    write_frame_stack(path, s);
}

CorrelationImage read_correlation_image(const std::string& path) {
    FrameStack s = read_frame_stack(path);
    if (s.frames != 1) throw IoError(path + ": correlation container must hold one frame");
    CorrelationImage im;
    im.values = Image2D<double>(s.nx, s.ny);
    for (size_t i = 0; i < s.data.size(); ++i)
        im.values.raw()[i] = s.data[i];
    for (const auto& [k, v] : s.metadata) {
        if (k == "frames_used") im.frames_used = static_cast<uint32_t>(std::strtoul(v.c_str(), nullptr, 10));
        if (k == "pixel_pitch") im.pixel_pitch = std::strtod(v.c_str(), nullptr);
    }
    return im;
}

} // namespace corrcam
