#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "myriad/bench.hpp"
#include "myriad/error.hpp"
#include "myriad/rng.hpp"

using namespace myriad;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "myriad_test_bench";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("seed splitting is stable per index") {
  CHECK(split_seed(1, 0) != split_seed(1, 1));
  CHECK(split_seed(1, 5) == split_seed(1, 5));
  CHECK(split_seed(1, 5) != split_seed(2, 5));
}

TEST_CASE("csv output") {
  SUBCASE("header only for no rows") {
    const fs::path p = scratch("empty.csv");
    emit_csv({}, p);
    CHECK(slurp(p) == "nu,sigma,mean_gmmf,std_gmmf,mean_em,std_em,failures\n");
  }
  SUBCASE("two-row golden file, sorted by nu") {
    BenchRow a{100.0, "I", 4.0654, 0.2472, 4.904, 0.2953, 0};
    BenchRow b{1.0, "I", 20.3536, 1.5899, 60.8843, 3.9302, 2};
    const fs::path p = scratch("two.csv");
    emit_csv({a, b}, p);
    CHECK(slurp(p) ==
          "nu,sigma,mean_gmmf,std_gmmf,mean_em,std_em,failures\n"
          "1,I,20.3536,1.5899,60.8843,3.9302,2\n"
          "100,I,4.0654,0.2472,4.9040,0.2953,0\n");
  }
  SUBCASE("unwritable path") {
    CHECK_THROWS_AS(emit_csv({}, scratch("no_such_dir") / "x" / "y.csv"), Error);
  }
}

TEST_CASE("small table: gmmf needs fewer iterations and reruns are identical") {
  BenchConfig cfg;
  cfg.nus = {1.0, 100.0};
  cfg.trials = 200;
  const auto rows = run_table1(cfg);
  REQUIRE(rows.size() == 2);
  for (const BenchRow& r : rows) {
    CAPTURE(r.nu);
    CHECK(r.mean_iter_gmmf < r.mean_iter_em);
    CHECK(r.mean_iter_gmmf >= 1.0);
    CHECK(r.std_iter_gmmf >= 0.0);
    CHECK(r.failures == 0);
  }
  CHECK(std::abs(rows[0].mean_iter_gmmf - 20.35) <= 3.0);
  CHECK(std::abs(rows[1].mean_iter_gmmf - 4.07) <= 0.5);

  const fs::path p1 = scratch("run1.csv"), p2 = scratch("run2.csv");
  emit_csv(rows, p1);
  cfg.threads = 3;
  emit_csv(run_table1(cfg), p2);
  CHECK(slurp(p1) == slurp(p2));
}

TEST_CASE("iteration counts barely move when the scatter is rescaled") {
  BenchConfig cfg;
  cfg.nus = {2.0, 10.0};
  cfg.trials = 200;
  cfg.sigmas = {{"I", SpdMatrix::identity(2)},
                {"0.1I", SpdMatrix::identity(2, 0.1)},
                {"5I", SpdMatrix::identity(2, 5.0)},
                {"10I", SpdMatrix::identity(2, 10.0)}};
  const auto rows = run_table1(cfg);
  REQUIRE(rows.size() == 8);
  for (std::size_t base = 0; base < 8; base += 4) {
    const BenchRow* ident = nullptr;
    for (std::size_t i = base; i < base + 4; ++i)
      if (rows[i].sigma_label == "I") ident = &rows[i];
    REQUIRE(ident != nullptr);
    for (std::size_t i = base; i < base + 4; ++i) {
      CAPTURE(rows[i].sigma_label);
      CHECK(std::abs(rows[i].mean_iter_gmmf - ident->mean_iter_gmmf) <= 1.0);
      CHECK(std::abs(rows[i].mean_iter_em - ident->mean_iter_em) <= 1.0);
      CHECK(rows[i].failures <= cfg.trials / 1000);
    }
  }
}

TEST_CASE("bench configuration errors") {
  BenchConfig cfg;
  cfg.trials = 5;
  cfg.nus = {0.5};
  CHECK_THROWS_AS(run_table1(cfg), Error);
  cfg.nus = {1.0};
  cfg.n = 2;
  CHECK_THROWS_AS(run_table1(cfg), Error);
  cfg.n = 100;
  cfg.mu = {0.0};
  CHECK_THROWS_AS(run_table1(cfg), Error);
}
