#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/graph.hpp"
#include "core/io.hpp"
#include "core/measure.hpp"

using namespace erdiff;

namespace {

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "erdiff_io_tests";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_SUITE("io") {
  TEST_CASE("number formatting round-trips") {
    for (const double x : {0.1, 1.0 / 3.0, 1e-300, -2.5e17, 0.0}) CHECK(std::stod(io::fmt(x)) == x);
    CHECK(io::fmt(1.0) == "1");
  }

  TEST_CASE("text graph round trip") {
    const auto g = sample_er(60, 0.1, 21);
    const auto text = io::graph_to_text(g);
    CHECK(text.rfind("60 ", 0) == 0);
    CHECK(io::graph_from_text(text) == g);
    const auto path = scratch("g.txt");
    io::write_graph(path, g);
    CHECK(io::read_graph(path) == g);
  }

  TEST_CASE("binary graph round trip") {
    const auto g = sample_er(80, 0.05, 22);
    const auto bytes = io::graph_to_binary(g);
    CHECK(bytes.substr(0, 4) == "ERDG");
    CHECK(bytes.size() == 4 + 8 * 4 + 8 * g.edge_count());
    CHECK(io::graph_from_binary(bytes) == g);
    const auto path = scratch("g.bin");
    io::write_graph(path, g);
    CHECK(io::read_file(path) == bytes);
    CHECK(io::read_graph(path) == g);
  }

  TEST_CASE("malformed graph files") {
    CHECK_THROWS_AS(io::graph_from_text(""), IoError);
    CHECK_THROWS_AS(io::graph_from_text("3 0.5\n"), IoError);
    CHECK_THROWS_AS(io::graph_from_text("3 0.5 1\n0 x\n"), IoError);
    CHECK_THROWS(io::graph_from_text("3 0.5 1\n0 7\n"));
    CHECK_THROWS_AS(io::graph_from_binary("NOPE"), IoError);
    auto bytes = io::graph_to_binary(sample_er(10, 0.5, 1));
    bytes.resize(bytes.size() - 3);
    CHECK_THROWS_AS(io::graph_from_binary(bytes), IoError);
    CHECK_THROWS_AS(io::read_file(scratch("does_not_exist.txt")), IoError);
  }

  TEST_CASE("comments in text graphs") {
    const auto g = io::graph_from_text("# header follows\n3 0.5 9\n0 1\n# edge\n2 2\n");
    CHECK(g.n() == 3);
    CHECK(g.edge_count() == 2);
    CHECK(g.seed() == 9);
  }

  TEST_CASE("csv layouts") {
    CouplingDiagnostics d;
    d.times = {0.0, 0.5};
    d.s_n = {0.0, 0.25};
    d.delta_path = {1.0, 2.0};
    CHECK(io::diagnostics_csv(d) == "t,s_n,delta\n0,0,1\n0.5,0.25,2\n");
    DensityGrid g = uniform_density(Geometry::line(), 0.0, 1.0, 2);
    CHECK(io::density_csv(g) == "theta,value\n0.25,1\n0.75,1\n");
    const EmpiricalMeasure emp({0.5, -1.0}, Geometry::line());
    const auto csv = io::empirical_csv(emp);
    CHECK(csv == "theta\n-1\n0.5\n");
    CHECK(io::samples_from_csv(csv) == std::vector<double>{-1.0, 0.5});
    CHECK_THROWS_AS(io::samples_from_csv("theta\n1\nabc\n"), IoError);
    CHECK(io::matrix_csv({"a", "b"}, {{0, 1}, {1, 0}}) == "label,a,b\na,0,1\nb,1,0\n");
  }

  TEST_CASE("path files") {
    CoupledPaths p;
    p.n = 2;
    p.times = {0.0, 1.0};
    p.theta = {1, 2, 3, 4};
    p.theta_bar = {5, 6, 7, 8};
    const auto stem = scratch("paths");
    io::write_paths(stem, p, 10, "kuramoto", 77);
    const auto bin = io::read_file(scratch("paths.bin"));
    REQUIRE(bin.size() == 10 * 8);
    std::vector<double> vals(10);
    std::memcpy(vals.data(), bin.data(), bin.size());
    CHECK(vals == std::vector<double>{0, 1, 1, 2, 3, 4, 5, 6, 7, 8});
    const auto meta = nlohmann::json::parse(io::read_file(scratch("paths.json")));
    CHECK(meta["n"] == 2);
    CHECK(meta["stored"] == 2);
    CHECK(meta["graph_seed"] == 77);
    CHECK(meta["stride"] == 10);
  }

  TEST_CASE("digests") {
    CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
    CHECK(git_blob_sha1("") == "e69de29bb2d1d6434b8b29ae775ad8c2e48c5391");
    CHECK(git_blob_sha1("hello world\n") == "3b18e512dba79e4c8300dd08aeb37f8e728b8dad");
  }
}
