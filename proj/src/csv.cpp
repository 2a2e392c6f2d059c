#include "corrcam/io/csv.hpp"

#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "corrcam/errors.hpp"

namespace corrcam {

namespace {

std::vector<double> parse_line(const std::string& line, const std::string& path, int lineno) {
    std::vector<double> out;
    const char* p = line.c_str();
    for (;;) {
        while (*p == ' ' || *p == '\t') ++p;
        if (*p == '\0') break;
        char* end = nullptr;
        double v = std::strtod(p, &end);
        if (end == p) {
            if (std::strncmp(p, "nan", 3) == 0) { // strtod handles nan, but be safe
                v = std::nan("");
                end = const_cast<char*>(p) + 3;
            } else {
                throw IoError(path + ":" + std::to_string(lineno) + ": bad CSV cell near '" +
                              std::string(p).substr(0, 12) + "'");
            }
        }
        out.push_back(v);
        p = end;
        while (*p == ' ' || *p == '\t') ++p;
        if (*p == ',') ++p;
        else if (*p != '\0')
            throw IoError(path + ":" + std::to_string(lineno) + ": expected ',' in CSV");
    }
    return out;
}

} // namespace

void write_csv(const std::string& path, const Image2D<double>& im) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    char buf[40];
    for (int iy = 0; iy < im.ny(); ++iy) {
        for (int ix = 0; ix < im.nx(); ++ix) {
            std::snprintf(buf, sizeof buf, "%.17g", im(ix, iy));
            f << buf;
            if (ix + 1 < im.nx()) f << ',';
        }
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

Image2D<double> read_csv_image(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(parse_line(line, path, lineno));
        if (rows.size() > 1 && rows.back().size() != rows.front().size())
            throw IoError(path + ":" + std::to_string(lineno) + ": ragged CSV row");
    }
    if (rows.empty()) throw IoError(path + ": empty CSV");
    Image2D<double> im(static_cast<int>(rows.front().size()), static_cast<int>(rows.size()));
    for (int iy = 0; iy < im.ny(); ++iy)
        for (int ix = 0; ix < im.nx(); ++ix)
            im(ix, iy) = rows[iy][ix];
    return im;
}

std::vector<std::vector<double>> read_csv_rows(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot open: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    int lineno = 0;
    while (std::getline(f, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        rows.push_back(parse_line(line, path, lineno));
    }
    return rows;
}

void write_csv_rows(const std::string& path, const std::vector<std::vector<double>>& rows,
                    const std::string& header) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open for writing: " + path);
    if (!header.empty()) f << "# " << header << '\n';
    char buf[40];
    for (const auto& r : rows) {
        for (size_t i = 0; i < r.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", r[i]);
            f << buf;
            if (i + 1 < r.size()) f << ',';
        }
        f << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
}

} // namespace corrcam
