// Drives the installed CLI end to end through a temp directory.
#define DOCTEST_CONFIG_IMPLEMENT
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "isodec/iofmt.hpp"
#include "isodec/verify.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_dir;

int run(const std::string& args) {
  std::string cmd = g_cli + " " + args + " >/dev/null 2>&1";
  int rc = std::system(cmd.c_str());
  return WEXITSTATUS(rc);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

std::string path(const char* name) { return (g_dir / name).string(); }

}  // namespace

using namespace isodec;

TEST_CASE("gen-example writes a loadable, stable spec") {
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  std::string text = slurp(path("spec.json"));
  LoadedCode code = read_code_spec(text);
  CHECK(code.n == 5);
  CHECK(code.delta == 2);
  CHECK(is_mdp_system(code.field, code.sys));
  std::string again = write_code_spec(code.field, code.n, code.k, code.delta, code.L, code.T,
                                      &code.gen, &code.sys);
  CHECK(text == again);
  REQUIRE(run("gen-example --out " + path("spec2.json")) == 0);
  CHECK(slurp(path("spec2.json")) == text);
}

TEST_CASE("encode, erase, decode round trip through files") {
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  LoadedCode code = read_code_spec(slurp(path("spec.json")));

  Blocks msg(4, std::vector<Fe>(3));
  Rng rng(77);
  for (auto& blk : msg)
    for (auto& x : blk) x = code.field.random(rng);
  spit(path("msg.txt"), write_message(code.field, msg));

  REQUIRE(run("encode " + path("spec.json") + " " + path("msg.txt") + " --out " + path("clean.txt")) == 0);
  ReceivedStream clean = parse_stream(code.field, slurp(path("clean.txt")));
  Blocks expect = encode(code.field, code.gen, msg);
  for (std::size_t t = 0; t < clean.blocks.size(); ++t)
    for (std::size_t c = 0; c < 5; ++c) CHECK(clean.blocks[t][c].value == expect[t][c]);

  // decoding an unmasked stream is the identity and exits 0
  REQUIRE(run("decode " + path("spec.json") + " " + path("clean.txt") + " --out " +
              path("copy.txt") + " --report " + path("rep0.json")) == 0);
  CHECK(slurp(path("copy.txt")) == slurp(path("clean.txt")));

  spit(path("mask.txt"), write_mask(example_pattern()));
  REQUIRE(run("erase " + path("spec.json") + " " + path("clean.txt") + " --pattern " +
              path("mask.txt") + " --out " + path("rx.txt")) == 0);

  REQUIRE(run("decode " + path("spec.json") + " " + path("rx.txt") + " --delay 1 --out " +
              path("rec.txt") + " --report " + path("rep.json")) == 0);
  CHECK(slurp(path("rec.txt")) == slurp(path("clean.txt")));
  std::string rep = slurp(path("rep.json"));
  CHECK(rep.find("\"fully_recovered\": true") != std::string::npos);

  // the reference decoder cannot finish this pattern: nonzero exit
  CHECK(run("decode " + path("spec.json") + " " + path("rx.txt") + " --delay 1 --baseline --out " +
            path("recb.txt") + " --report " + path("repb.json")) == 1);
  std::string repb = slurp(path("repb.json"));
  CHECK(repb.find("\"decoder\": \"baseline\"") != std::string::npos);
  CHECK(repb.find("\"lost\": 10") != std::string::npos);
}

TEST_CASE("erase with an iid seed is reproducible") {
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  LoadedCode code = read_code_spec(slurp(path("spec.json")));
  Blocks msg(4, std::vector<Fe>(3));
  Rng rng(12);
  for (auto& blk : msg)
    for (auto& x : blk) x = code.field.random(rng);
  spit(path("msg.txt"), write_message(code.field, msg));
  REQUIRE(run("encode " + path("spec.json") + " " + path("msg.txt") + " --out " + path("clean.txt")) == 0);
  REQUIRE(run("erase " + path("spec.json") + " " + path("clean.txt") +
              " --seed 5 --p-erase 0.3 --out " + path("rx1.txt")) == 0);
  REQUIRE(run("erase " + path("spec.json") + " " + path("clean.txt") +
              " --seed 5 --p-erase 0.3 --out " + path("rx2.txt")) == 0);
  CHECK(slurp(path("rx1.txt")) == slurp(path("rx2.txt")));
}

TEST_CASE("simulate writes deterministic stats") {
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  REQUIRE(run("simulate " + path("spec.json") +
              " --trials 20 --seed 9 --p-erase 0.05 --delay 1 --out " + path("s1.json")) == 0);
  REQUIRE(run("simulate " + path("spec.json") +
              " --trials 20 --seed 9 --p-erase 0.05 --delay 1 --out " + path("s2.json")) == 0);
  CHECK(slurp(path("s1.json")) == slurp(path("s2.json")));
  CHECK(slurp(path("s1.json")).find("\"trials\": 20") != std::string::npos);
}

TEST_CASE("verify-example passes") { CHECK(run("verify-example") == 0); }

TEST_CASE("inspect prints the profile") {
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  REQUIRE(run("inspect " + path("spec.json") + " --out " + path("prof.json")) == 0);
  std::string prof = slurp(path("prof.json"));
  CHECK(prof.find("\"mdp\": true") != std::string::npos);
  CHECK(prof.find("\"ell\": -1") != std::string::npos);
}

TEST_CASE("malformed inputs exit with a diagnostic") {
  spit(path("garbage.json"), "not json at all");
  CHECK(run("inspect " + path("garbage.json")) == 2);
  spit(path("bad_stream.txt"), "isodec-stream n=5 k=3 gamma=3 field=gf(2^331)\n1 2 3\n");
  REQUIRE(run("gen-example --out " + path("spec.json")) == 0);
  CHECK(run("decode " + path("spec.json") + " " + path("bad_stream.txt")) == 2);
}

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli>\n");
    return 1;
  }
  g_cli = argv[1];
  g_dir = std::filesystem::temp_directory_path() / "isodec_cli_test";
  std::filesystem::create_directories(g_dir);
  doctest::Context ctx;
  int rc = ctx.run();
  std::filesystem::remove_all(g_dir);
  return rc;
}
