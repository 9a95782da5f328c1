#include "plastokh/csv.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "plastokh/errors.hpp"

namespace plastokh {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    return out;
}

} // namespace

void export_volume(const Field3& f, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,y,z,value\n";
    const Grid3& g = *f.grid;
    for (int i = 0; i < g.nx(); ++i)
        for (int j : f.js())
            for (int k = 0; k < g.nz(); ++k)
                out << num(g.xs[i]) << ',' << num(g.ys[j]) << ',' << num(g.zs[k]) << ','
                    << num(f.at(i, j, k)) << '\n';
    if (!out) throw IoError("write failed on " + path);
}

void export_face(const FaceField& f, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,y,value,face\n";
    const Grid3& g = *f.grid;
    const char* tag = (f.face == Face::Plus) ? "plus" : "minus";
    for (int i = 0; i < g.nx(); ++i)
        for (int j = f.j_lo; j <= f.j_hi; ++j)
            out << num(g.xs[i]) << ',' << num(g.ys[j]) << ',' << num(f.at(i, j)) << ','
                << tag << '\n';
    if (!out) throw IoError("write failed on " + path);
}

void export_surface(const SurfaceField& s, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "x,z,value,sheet\n";
    const Grid3& g = *s.grid;
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k)
            out << num(g.xs[i]) << ',' << num(g.zs[k]) << ',' << num(s.lo(i, k))
                << ",lower\n";
    for (int i = 0; i < g.nx(); ++i)
        for (int k = 0; k < g.nz(); ++k)
            out << num(g.xs[i]) << ',' << num(g.zs[k]) << ',' << num(s.up(i, k))
                << ",upper\n";
    if (!out) throw IoError("write failed on " + path);
}

std::vector<double> import_values(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path);
    std::string header;
    std::getline(in, header);
    int value_col = -1, col = 0;
    std::istringstream hs(header);
    std::string cell;
    while (std::getline(hs, cell, ',')) {
        if (cell == "value") value_col = col;
        ++col;
    }
    if (value_col < 0) throw IoError("no value column in " + path);

    std::vector<double> values;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        for (int c = 0; std::getline(ls, cell, ','); ++c)
            if (c == value_col) values.push_back(std::strtod(cell.c_str(), nullptr));
    }
    return values;
}

} // namespace plastokh
