#include <Eigen/Dense>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include "doctest.h"
#include "test_util.hpp"
#include "waveop/imagtime.hpp"
#include "waveop/io.hpp"
#include "waveop/model.hpp"
#include "waveop/phasespace.hpp"

using namespace waveop;
namespace fs = std::filesystem;

namespace {

// Fresh directory under the system temp root; removed by the fixture.
struct TempDir {
  fs::path path;
  TempDir() {
    std::string tmpl =
        (fs::temp_directory_path() / "waveop_io_XXXXXX").string();
    REQUIRE(mkdtemp(tmpl.data()) != nullptr);
    path = tmpl;
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

}  // namespace

TEST_SUITE("io") {

TEST_CASE("format_double round-trips exactly") {
  CHECK(io::format_double(0.5) == "0.5");
  CHECK(io::format_double(0.0) == "0");
  CHECK(io::format_double(-2.0) == "-2");

  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::exponential_distribution<double> mag(0.5);
  for (int k = 0; k < 1000; ++k) {
    double v = u(rng) * std::exp(mag(rng) - 10.0);
    if (k % 7 == 0) v = 1.0 / v;
    const std::string s = io::format_double(v);
    const double back = std::strtod(s.c_str(), nullptr);
    CHECK(back == v);
  }
}

TEST_CASE("matrix snapshot round trip") {
  TempDir tmp;
  std::mt19937_64 rng(3);
  const Eigen::MatrixXcd a = testutil::random_complex(rng, 17);

  const std::string path = tmp.file("a.wopm");
  io::write_matrix(path, a);
  const Eigen::MatrixXcd b = io::read_matrix(path);
  REQUIRE(b.rows() == 17);
  CHECK((a - b).cwiseAbs().maxCoeff() == 0.0);

  SUBCASE("corrupted magic is refused") {
    std::fstream f(path,
                   std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(0);
    f.write("XXXX", 4);
    f.close();
    CHECK_THROWS_AS(io::read_matrix(path), ConfigError);
  }

  SUBCASE("wrong format version is refused") {
    std::fstream f(path,
                   std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(4);
    const std::uint32_t bogus = 999;
    f.write(reinterpret_cast<const char*>(&bogus), 4);
    f.close();
    CHECK_THROWS_AS(io::read_matrix(path), ConfigError);
  }

  SUBCASE("truncated payload is refused") {
    const std::string clipped = tmp.file("clip.wopm");
    const std::string bytes = io::read_text_file(path);
    io::write_text_file(clipped, bytes.substr(0, bytes.size() / 2));
    CHECK_THROWS_AS(io::read_matrix(clipped), ConfigError);
  }

  CHECK_THROWS_AS(io::read_matrix(tmp.file("absent.wopm")), ConfigError);
}

TEST_CASE("field snapshot round trip") {
  TempDir tmp;
  model::GridSpec g;
  g.nx = 16;
  g.np = 24;
  g.x_min = -3.0;
  g.x_max = 5.0;
  phasespace::PhaseSpaceField f = phasespace::make_field(g, 0.7);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < g.nx; ++i)
    for (int j = 0; j < g.np; ++j)
      f.values(i, j) = std::complex<double>(gauss(rng), gauss(rng));

  const std::string path = tmp.file("f.wopf");
  io::write_field(path, f);
  const phasespace::PhaseSpaceField f2 = io::read_field(path);
  CHECK(f2.grid.nx == 16);
  CHECK(f2.grid.np == 24);
  CHECK(f2.grid.x_min == -3.0);
  CHECK(f2.grid.x_max == 5.0);
  CHECK(f2.hbar == 0.7);
  CHECK((f.values - f2.values).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_AS(io::read_field(tmp.file("a.wopm")), ConfigError);
}

TEST_CASE("series tables") {
  imagtime::ObservableSeries s;
  s.axis = {0.5, 1.0};
  s.energy = {2.0, 1.0};
  s.dx = {1.5, 1.0};
  s.dp = {1.25, 1.0};
  s.dxdp = {1.875, 1.0};
  s.norm_prerenorm = {0.25, 0.125};
  s.tier = "classical";

  const std::string csv = io::series_csv({&s});
  const std::string header = csv.substr(0, csv.find('\n'));
  CHECK(header == "beta,energy,dx,dp,dxdp,norm_prerenorm,tier");
  CHECK(csv.find("0.5,2,1.5,1.25,1.875,0.25,classical\n") !=
        std::string::npos);
  CHECK(csv.back() == '\n');

  // quoting kicks in only when the label needs it
  imagtime::ObservableSeries q = s;
  q.axis = {0.5};
  q.energy = {2.0};
  q.dx = {1.5};
  q.dp = {1.25};
  q.dxdp = {1.875};
  q.norm_prerenorm = {0.25};
  q.tier = "ad,\"hoc\"";
  const std::string qcsv = io::series_csv({&q});
  CHECK(qcsv.find("\"ad,\"\"hoc\"\"\"") != std::string::npos);

  const std::string json = io::series_json_rows({&s});
  CHECK(json.find("\"tier\": \"classical\"") != std::string::npos);
  CHECK(json.find("\"beta\": 0.5") != std::string::npos);
  CHECK(json.find("\"energy\": 2") != std::string::npos);
}

TEST_CASE("sha256 known answers") {
  TempDir tmp;
  const std::string empty_path = tmp.file("empty");
  io::write_text_file(empty_path, "");
  CHECK(io::sha256_file(empty_path) ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");

  const std::string abc_path = tmp.file("abc");
  io::write_text_file(abc_path, "abc");
  CHECK(io::sha256_file(abc_path) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");

  CHECK_THROWS_AS(io::sha256_file(tmp.file("missing")), ConfigError);
}

TEST_CASE("text file round trip") {
  TempDir tmp;
  const std::string path = tmp.file("t.txt");
  const std::string content = "line one\nline two\n";
  io::write_text_file(path, content);
  CHECK(io::read_text_file(path) == content);
  CHECK_THROWS_AS(io::read_text_file(tmp.file("missing.txt")), ConfigError);
}

}  // TEST_SUITE
