#include "corrcam/frame_source.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <vector>

#include "corrcam/errors.hpp"
#include "corrcam/io/framefile.hpp"

namespace corrcam {

namespace {
constexpr uint64_t kHeaderBytes = 36; // magic + five u32 fields
}

FileStackSource::FileStackSource(const std::string& path) : path_(path) {
    FrameFileInfo info = read_frame_stack_info(path); // validates format + size
    nx_ = info.nx;
    ny_ = info.ny;
    frames_ = info.frames;
    dtype_ = info.dtype;
    fd_ = ::open(path.c_str(), O_RDONLY);
    if (fd_ < 0) throw IoError("cannot open: " + path);
}

FileStackSource::~FileStackSource() {
    if (fd_ >= 0) ::close(fd_);
}

void FileStackSource::fetch(uint32_t m, double* out) const {
    if (m >= frames_) throw ConfigError("frame index out of range");
    const size_t n = static_cast<size_t>(nx_) * ny_;
    const size_t bytes_per = dtype_ == Dtype::u16 ? 2 : 4;
    const uint64_t off = kHeaderBytes + static_cast<uint64_t>(m) * n * bytes_per;
    std::vector<unsigned char> buf(n * bytes_per);
    size_t got = 0;
    while (got < buf.size()) {
        ssize_t r = ::pread(fd_, buf.data() + got, buf.size() - got,
                            static_cast<off_t>(off + got));
        if (r <= 0) throw IoError(path_ + ": short read at frame " + std::to_string(m));
        got += static_cast<size_t>(r);
    }
    if (dtype_ == Dtype::u16) {
        for (size_t i = 0; i < n; ++i)
            out[i] = static_cast<double>(buf[2 * i] | (buf[2 * i + 1] << 8));
    } else {
        float v;
        for (size_t i = 0; i < n; ++i) {
            __builtin_memcpy(&v, buf.data() + 4 * i, 4);
            out[i] = v;
        }
    }
}

} // namespace corrcam
