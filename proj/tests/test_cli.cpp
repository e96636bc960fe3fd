#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "myriad/distributions.hpp"
#include "myriad/imaging.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;
  std::string err;
};

fs::path dir() {
  const fs::path d = fs::temp_directory_path() / "myriad_test_cli";
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

Run run(const std::string& args, const std::string& env = "") {
  const fs::path out = dir() / "stdout.txt", err = dir() / "stderr.txt";
  const std::string cmd = env + (env.empty() ? "" : " ") + "\"" MYRIADKIT_BIN "\" " + args + " >\"" + out.string() +
                          "\" 2>\"" + err.string() + "\"";
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

std::string path(const std::string& name) { return (dir() / name).string(); }

}  // namespace

TEST_CASE("estimate") {
  spit(path("three.csv"), "-1\n0\n1\n");
  const Run g = run("estimate --input " + path("three.csv") + " --nu 1");
  REQUIRE(g.code == 0);
  const json jg = json::parse(g.out);
  CHECK(std::abs(jg["mu"][0].get<double>()) <= 1e-6);
  CHECK(std::abs(jg["sigma"][0][0].get<double>() - 1.0 / 3.0) <= 1e-6);
  CHECK(jg["converged"].get<bool>());

  const Run e = run("estimate --input " + path("three.csv") + " --nu 1 --method em");
  REQUIRE(e.code == 0);
  const json je = json::parse(e.out);
  CHECK(std::abs(je["sigma"][0][0].get<double>() - 1.0 / 3.0) <= 1e-6);
  CHECK(je["iterations"].get<int>() > jg["iterations"].get<int>());

  const Run missing = run("estimate --input " + path("three.csv"));
  CHECK(missing.code == 1);
  CHECK(missing.err.find("--nu") != std::string::npos);

  CHECK(run("estimate --input " + path("three.csv") + " --nu 1 --bogus 3").code == 1);

  spit(path("two.csv"), "-1\n1\n");
  const Run infeasible = run("estimate --input " + path("two.csv") + " --nu 1");
  CHECK(infeasible.code == 2);
  CHECK(infeasible.err.find("AssumptionViolation") != std::string::npos);

  spit(path("bad.csv"), "1,2\n3\n");
  CHECK(run("estimate --input " + path("bad.csv") + " --nu 1").code == 2);

  const Run capped = run("estimate --input " + path("three.csv") + " --nu 1 --max-iter 2");
  CHECK(capped.code == 3);
  CHECK_FALSE(json::parse(capped.out)["converged"].get<bool>());
}

TEST_CASE("wc-estimate") {
  spit(path("sym.csv"), "0\n2.0943951023931953\n-2.0943951023931953\n");
  const Run r = run("wc-estimate --input " + path("sym.csv"));
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["rho"].get<double>() == 0.0);

  const auto theta = myriad::sample_wrapped_cauchy(myriad::WrappedCauchyParams(1.0, 0.8), 10000, 12);
  std::string csv;
  char buf[64];
  for (double t : theta) {
    std::snprintf(buf, sizeof buf, "%.17g\n", t);
    csv += buf;
  }
  spit(path("wc.csv"), csv);
  const Run big = run("wc-estimate --input " + path("wc.csv"));
  REQUIRE(big.code == 0);
  const json j = json::parse(big.out);
  CHECK(std::abs(j["a"].get<double>() - 1.0) <= 0.05);
  CHECK(std::abs(j["rho"].get<double>() - 0.8) <= 0.05);

  spit(path("pair.csv"), "0.1\n0.2\n");
  CHECK(run("wc-estimate --input " + path("pair.csv")).code == 2);
}

TEST_CASE("tyler") {
  spit(path("square.csv"), "1,0\n0,1\n0.7071067811865476,0.7071067811865476\n-0.7071067811865476,0.7071067811865476\n");
  const Run r = run("tyler --input " + path("square.csv") + " --tol 1e-12");
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["sigma"][0][0].get<double>() - 0.5) <= 1e-8);
  CHECK(std::abs(j["sigma"][0][1].get<double>()) <= 1e-8);
}

TEST_CASE("add-noise, metrics and denoise") {
  myriad::write_pgm(path("flat.pgm"), myriad::Image(24, 24, 77.0));
  myriad::write_pgm(path("phantom.pgm"), myriad::make_piecewise_phantom(48));

  SUBCASE("metrics on identical files") {
    const Run r = run("metrics --ref " + path("phantom.pgm") + " --test " + path("phantom.pgm"));
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j["psnr"].get<std::string>() == "inf");
    CHECK(j["ssim"].get<double>() == doctest::Approx(1.0));
  }
  SUBCASE("seeded noise is reproducible") {
    const std::string base = "add-noise --input " + path("phantom.pgm") + " --model student-t --nu 1 --sigma 10 --seed 9 --output ";
    REQUIRE(run(base + path("n1.myr")).code == 0);
    REQUIRE(run(base + path("n2.myr")).code == 0);
    CHECK(slurp(path("n1.myr")) == slurp(path("n2.myr")));
    CHECK(slurp(path("n1.myr")).size() == 24 + 8 * 48 * 48);
  }
  SUBCASE("constant image passes through denoise unchanged") {
    const Run r = run("denoise --input " + path("flat.pgm") + " --output " + path("flat_out.pgm") + " --sigma 10");
    REQUIRE(r.code == 0);
    CHECK(slurp(path("flat.pgm")) == slurp(path("flat_out.pgm")));
    CHECK(json::parse(r.out)["stats"]["pixels"].get<int>() == 576);
  }
  SUBCASE("thread count does not change the output") {
    REQUIRE(run("add-noise --input " + path("phantom.pgm") + " --model student-t --nu 1 --sigma 10 --seed 3 --output " +
                path("noisy.myr"))
                .code == 0);
    const std::string base = "denoise --input " + path("noisy.myr") + " --sigma 10 --patch 3 --k 15 ";
    REQUIRE(run(base + "--threads 1 --output " + path("t1.myr")).code == 0);
    REQUIRE(run(base + "--threads 8 --output " + path("t8.myr")).code == 0);
    REQUIRE(run(base + "--output " + path("tenv.myr"), "MYRIADKIT_THREADS=3").code == 0);
    CHECK(slurp(path("t1.myr")) == slurp(path("t8.myr")));
    CHECK(slurp(path("t1.myr")) == slurp(path("tenv.myr")));
    const Run m = run("metrics --ref " + path("phantom.pgm") + " --test " + path("t1.myr"));
    REQUIRE(m.code == 0);
    const Run m0 = run("metrics --ref " + path("phantom.pgm") + " --test " + path("noisy.myr"));
    CHECK(json::parse(m.out)["psnr"].get<double>() > json::parse(m0.out)["psnr"].get<double>() + 8.0);
  }
  SUBCASE("infeasible patchwise configuration reports the minimal k") {
    const Run r = run("denoise --input " + path("flat.pgm") + " --output " + path("x.pgm") +
                      " --sigma 10 --mode patchwise --patch 5 --k 20");
    CHECK(r.code == 2);
    CHECK(r.err.find("k >= 27") != std::string::npos);
  }
  SUBCASE("circular images") {
    myriad::write_f64(path("s1.myr"), myriad::make_s1_phantom(32));
    REQUIRE(run("add-noise --input " + path("s1.myr") + " --model wrapped-cauchy --gamma 0.1 --seed 2 --output " +
                path("s1n.myr"))
                .code == 0);
    const Run d = run("denoise --input " + path("s1n.myr") + " --output " + path("s1d.myr") + " --gamma 0.1");
    REQUIRE(d.code == 0);
    CHECK(json::parse(d.out)["kind"].get<std::string>() == "s1");
    const Run m = run("metrics --ref " + path("s1.myr") + " --test " + path("s1d.myr"));
    REQUIRE(m.code == 0);
    const Run m0 = run("metrics --ref " + path("s1.myr") + " --test " + path("s1n.myr"));
    CHECK(json::parse(m.out)["epsilon"].get<double>() < json::parse(m0.out)["epsilon"].get<double>());
    CHECK(run("metrics --ref " + path("s1.myr") + " --test " + path("phantom.pgm")).code == 2);
  }
}

TEST_CASE("bench") {
  const Run r = run("bench --nus 1,100 --trials 200");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("nu,sigma,mean_gmmf,std_gmmf,mean_em,std_em,failures\n", 0) == 0);
  double g = 0, e = 0;
  int rows = 0;
  std::size_t pos = r.out.find('\n') + 1;
  while (pos < r.out.size()) {
    const std::size_t end = r.out.find('\n', pos);
    const std::string line = r.out.substr(pos, end - pos);
    double nu = 0, sg = 0, eg = 0;
    char label[16];
    REQUIRE(std::sscanf(line.c_str(), "%lf,%15[^,],%lf,%*f,%lf", &nu, label, &sg, &eg) == 4);
    g = sg;
    e = eg;
    CHECK(g < e);
    ++rows;
    pos = end + 1;
  }
  CHECK(rows == 2);

  spit(path("bench.json"), R"({"d": 2, "n": 50, "trials": 20, "nus": [5], "seed": 4,
    "sigmas": [{"label": "D", "matrix": [[2, 0.5], [0.5, 1]]}]})");
  const Run c1 = run("bench --config " + path("bench.json") + " --output " + path("b1.csv"));
  const Run c2 = run("bench --config " + path("bench.json") + " --output " + path("b2.csv"));
  REQUIRE(c1.code == 0);
  REQUIRE(c2.code == 0);
  CHECK(slurp(path("b1.csv")) == slurp(path("b2.csv")));
  CHECK(slurp(path("b1.csv")).find("\n5,D,") != std::string::npos);
}

TEST_CASE("every subcommand documents its flags") {
  const std::pair<const char*, std::vector<const char*>> expected[] = {
      {"estimate", {"--input", "--nu", "--weights", "--method", "--mode", "--mu", "--tol", "--max-iter", "--no-check"}},
      {"wc-estimate", {"--input", "--weights", "--tol", "--max-iter"}},
      {"tyler", {"--input", "--weights", "--tol"}},
      {"add-noise", {"--input", "--output", "--model", "--nu", "--gamma", "--sigma", "--seed"}},
      {"denoise",
       {"--input", "--output", "--kind", "--nu", "--sigma", "--gamma", "--patch", "--window", "--k", "--mode",
        "--var-threshold", "--seedless", "--threads"}},
      {"metrics", {"--ref", "--test", "--kind"}},
      {"bench", {"--config", "--nus", "--trials", "--seed", "--output"}},
  };
  for (const auto& [cmd, flags] : expected) {
    CAPTURE(cmd);
    const Run r = run(std::string(cmd) + " --help");
    CHECK(r.code == 0);
    for (const char* f : flags) {
      CAPTURE(f);
      CHECK(r.out.find(f) != std::string::npos);
    }
  }
  CHECK(run("--help").code == 0);
  CHECK(run("frobnicate").code == 1);
}
