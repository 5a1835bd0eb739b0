#include "branchflow/io.hpp"

#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "json.hpp"

namespace branchflow {

namespace {

static_assert(std::endian::native == std::endian::little,
              "snapshot format is little-endian; byte swapping is not implemented");

std::string comp_base(const std::string& dir, const std::string& stem, int i) {
    return (std::filesystem::path(dir) / (stem + "_c" + std::to_string(i))).string();
}

}  // namespace

void write_snapshot(const VectorField& v, const std::string& dir, const std::string& stem) {
    std::filesystem::create_directories(dir);
    const GridSpec& g = v.grid();
    for (int i = 0; i < v.n(); ++i) {
        const std::string base = comp_base(dir, stem, i);
        std::ofstream raw(base + ".f64", std::ios::binary);
        if (!raw) throw std::runtime_error("write_snapshot: cannot open " + base + ".f64");
        raw.write(reinterpret_cast<const char*>(v.comp[i].samples.data()),
                  static_cast<std::streamsize>(v.comp[i].samples.size() * sizeof(double)));
        nlohmann::json meta{{"n", g.n},
                            {"N", g.N},
                            {"L", g.L},
                            {"t", v.t()},
                            {"component", i},
                            {"dft_convention", kDftConvention},
                            {"version", kSnapshotVersion}};
        std::ofstream side(base + ".json");
        side << meta.dump(2) << "\n";
    }
}

VectorField read_snapshot(const std::string& dir, const std::string& stem, int ncomp) {
    VectorField v;
    for (int i = 0; i < ncomp; ++i) {
        const std::string base = comp_base(dir, stem, i);
        std::ifstream side(base + ".json");
        if (!side) throw std::runtime_error("read_snapshot: missing sidecar " + base + ".json");
        nlohmann::json meta = nlohmann::json::parse(side);
        if (meta.at("version").get<int>() != kSnapshotVersion)
            throw std::runtime_error("read_snapshot: unsupported version in " + base + ".json");
        const GridSpec g = make_grid(meta.at("n"), meta.at("N"), meta.at("L"));
        if (i == 0) v = VectorField(g, meta.at("t").get<double>());
        if (!(v.grid() == g)) throw std::runtime_error("read_snapshot: component grids differ");
        std::ifstream raw(base + ".f64", std::ios::binary);
        if (!raw) throw std::runtime_error("read_snapshot: missing " + base + ".f64");
        raw.read(reinterpret_cast<char*>(v.comp[i].samples.data()),
                 static_cast<std::streamsize>(g.size() * sizeof(double)));
        if (static_cast<std::size_t>(raw.gcount()) != g.size() * sizeof(double))
            throw std::runtime_error("read_snapshot: short read in " + base + ".f64");
    }
    return v;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_csv: cannot open " + path);
    for (std::size_t i = 0; i < header.size(); ++i)
        out << header[i] << (i + 1 < header.size() ? "," : "\n");
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto& row : rows)
        for (std::size_t i = 0; i < row.size(); ++i)
            out << row[i] << (i + 1 < row.size() ? "," : "\n");
}

void write_text(const std::string& path, const std::string& text) {
    std::filesystem::create_directories(std::filesystem::path(path).parent_path());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_text: cannot open " + path);
    out << text;
}

}  // namespace branchflow
