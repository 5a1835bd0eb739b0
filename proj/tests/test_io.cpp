#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "branchflow/io.hpp"
#include "json.hpp"
#include "doctest.h"

using namespace branchflow;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    fs::path p = fs::temp_directory_path() / (std::string("branchflow_io_") + tag);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

VectorField random_vec(const GridSpec& g, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    VectorField v(g, 0.375);
    for (auto& c : v.comp)
        for (auto& s : c.samples) s = u(rng);
    return v;
}

}  // namespace

TEST_CASE("snapshot round trip is bitwise exact") {
    const fs::path dir = temp_dir("roundtrip");
    const GridSpec g = make_grid(3, 12, 8.0);
    const VectorField v = random_vec(g, 7);
    write_snapshot(v, dir.string(), "frame");
    const VectorField r = read_snapshot(dir.string(), "frame", 3);
    CHECK(r.grid() == g);
    CHECK(r.t() == v.t());
    for (int i = 0; i < 3; ++i)
        for (std::size_t p = 0; p < g.size(); ++p)
            CHECK(r.comp[i].samples[p] == v.comp[i].samples[p]);
    fs::remove_all(dir);
}

TEST_CASE("sidecar carries the documented metadata") {
    const fs::path dir = temp_dir("sidecar");
    const GridSpec g = make_grid(2, 10, 4.0);
    write_snapshot(random_vec(g, 9), dir.string(), "snap");
    std::ifstream in(dir / "snap_c0.json");
    REQUIRE(in.good());
    const auto j = nlohmann::json::parse(in);
    CHECK(j.at("n") == 2);
    CHECK(j.at("N") == 10);
    CHECK(j.at("L") == 4.0);
    CHECK(j.at("component") == 0);
    CHECK(j.at("version") == kSnapshotVersion);
    CHECK(j.at("dft_convention") == kDftConvention);
    CHECK(fs::file_size(dir / "snap_c0.f64") == g.size() * sizeof(double));
    fs::remove_all(dir);
}

TEST_CASE("reader rejects corrupted snapshots") {
    const fs::path dir = temp_dir("corrupt");
    const GridSpec g = make_grid(2, 8, 8.0);
    write_snapshot(random_vec(g, 3), dir.string(), "bad");
    SUBCASE("missing files") {
        CHECK_THROWS(read_snapshot(dir.string(), "nonexistent", 2));
    }
    SUBCASE("short raw file") {
        fs::resize_file(dir / "bad_c1.f64", 16);
        CHECK_THROWS(read_snapshot(dir.string(), "bad", 2));
    }
    SUBCASE("version mismatch") {
        std::ifstream in(dir / "bad_c0.json");
        auto j = nlohmann::json::parse(in);
        in.close();
        j["version"] = kSnapshotVersion + 1;
        std::ofstream out(dir / "bad_c0.json");
        out << j.dump(2);
        out.close();
        CHECK_THROWS(read_snapshot(dir.string(), "bad", 2));
    }
    fs::remove_all(dir);
}

TEST_CASE("csv output is deterministic and full precision") {
    const fs::path dir = temp_dir("csv");
    const std::vector<std::string> header{"a", "b"};
    const std::vector<std::vector<double>> rows{{1.0 / 3.0, 2.0}, {-1e-300, 0.1}};
    write_csv((dir / "t.csv").string(), header, rows);
    write_csv((dir / "t2.csv").string(), header, rows);
    std::ifstream f1(dir / "t.csv"), f2(dir / "t2.csv");
    std::stringstream s1, s2;
    s1 << f1.rdbuf();
    s2 << f2.rdbuf();
    CHECK(s1.str() == s2.str());
    CHECK(s1.str().substr(0, 4) == "a,b\n");
    // full round-trip precision of a cell
    std::string line;
    std::getline(s1, line);  // header
    std::getline(s1, line);
    CHECK(std::stod(line.substr(0, line.find(','))) == 1.0 / 3.0);
    fs::remove_all(dir);
}
