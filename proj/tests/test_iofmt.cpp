#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "isodec/verify.hpp"
#include "oracles.hpp"

using namespace isodec;

TEST_CASE("code spec round trip is byte identical") {
  ExampleCode ex = build_example_code();
  std::string text = write_code_spec(ex.field, 5, 3, 2, 1, 1, &ex.gen, &ex.sys);
  LoadedCode code = read_code_spec(text);
  CHECK(code.n == 5);
  CHECK(code.k == 3);
  CHECK(code.delta == 2);
  CHECK(code.L == 1);
  CHECK(code.T == 1);
  CHECK(code.had_gen);
  CHECK(code.had_sys);
  std::string again = write_code_spec(code.field, code.n, code.k, code.delta, code.L, code.T,
                                      &code.gen, &code.sys);
  CHECK(text == again);
}

TEST_CASE("code spec materializes the missing half") {
  ExampleCode ex = build_example_code();
  {
    std::string text = write_code_spec(ex.field, 5, 3, 2, 1, 1, nullptr, &ex.sys);
    LoadedCode code = read_code_spec(text);
    CHECK_FALSE(code.had_gen);
    CHECK(code.gen.mu == 1);
    Rng rng(3);
    Frame fr = random_frame(code.field, code.gen, 2, rng);
    CHECK(membership_check(code.field, code.sys, fr.encoded));
  }
  {
    std::string text = write_code_spec(ex.field, 5, 3, 2, 1, 1, &ex.gen, nullptr);
    LoadedCode code = read_code_spec(text);
    CHECK_FALSE(code.had_sys);
    CHECK(code.sys.s == 2);
  }
}

TEST_CASE("code spec rejects inconsistent content") {
  ExampleCode ex = build_example_code();
  // declared delta disagrees with the code
  std::string text = write_code_spec(ex.field, 5, 3, 1, 1, 1, &ex.gen, nullptr);
  CHECK_THROWS_AS((void)read_code_spec(text), Error);
  // mismatched generator and system
  StateSpace other = ex.sys;
  other.D.at(0, 0) = ex.field.add(other.D.at(0, 0), ex.field.one());
  std::string text2 = write_code_spec(ex.field, 5, 3, 2, 1, 1, &ex.gen, &other);
  CHECK_THROWS_AS((void)read_code_spec(text2), Error);
  CHECK_THROWS_AS((void)read_code_spec("{"), Error);
  CHECK_THROWS_AS((void)read_code_spec("{\"format\": \"nope\"}"), Error);
}

TEST_CASE("stream round trip with erasures") {
  Gf f = Gf::gf2(3, {1, 0});
  ReceivedStream rx;
  rx.n = 3;
  rx.k = 1;
  rx.gamma = 1;
  rx.blocks.assign(3, std::vector<ErasureSymbol>(3));
  Rng rng(8);
  for (auto& blk : rx.blocks)
    for (auto& s : blk) s = rng.below(3) ? ErasureSymbol::of(f.random(rng)) : ErasureSymbol::erased();
  std::string text = write_stream(f, rx);
  ReceivedStream back = parse_stream(f, text);
  CHECK(back.n == rx.n);
  CHECK(back.k == rx.k);
  CHECK(back.gamma == rx.gamma);
  REQUIRE(back.blocks.size() == rx.blocks.size());
  for (std::size_t t = 0; t < rx.blocks.size(); ++t)
    for (std::size_t c = 0; c < 3; ++c) {
      CHECK(back.blocks[t][c].known == rx.blocks[t][c].known);
      if (rx.blocks[t][c].known) CHECK(back.blocks[t][c].value == rx.blocks[t][c].value);
    }
  CHECK(write_stream(f, back) == text);
}

TEST_CASE("stream parser reports positions") {
  Gf f = Gf::gf2(3, {1, 0});
  auto expect_fail = [&](const std::string& text, const std::string& needle) {
    try {
      (void)parse_stream(f, text);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.code() == Errc::ParseError);
      CHECK(std::string(e.what()).find(needle) != std::string::npos);
    }
  };
  expect_fail("", "line 1");
  expect_fail("bogus-header\n", "line 1");
  expect_fail("isodec-stream n=3 k=1 gamma=0 field=gf(2^3)\n1 2\n", "line 2");
  expect_fail("isodec-stream n=3 k=1 gamma=0 field=gf(2^3)\n1 2 z\n", "column 5");
  expect_fail("isodec-stream n=3 k=1 gamma=0 field=gf(2^4)\n", "field reference");
  expect_fail("isodec-stream n=3 k=3 gamma=0 field=gf(2^3)\n", "1 <= k < n");
}

TEST_CASE("parser survives fuzz without crashing") {
  Gf f = Gf::gf2(3, {1, 0});
  Rng rng(0xF022);
  for (int trial = 0; trial < 3000; ++trial) {
    std::string text;
    std::size_t len = rng.below(120);
    for (std::size_t i = 0; i < len; ++i) text.push_back(static_cast<char>(rng.below(256)));
    try {
      (void)parse_stream(f, text);
    } catch (const Error&) {
    }
    try {
      (void)read_code_spec(text);
    } catch (const Error&) {
    }
    try {
      (void)parse_mask(text);
    } catch (const Error&) {
    }
  }
  CHECK(true);
}

TEST_CASE("message and mask round trips") {
  Gf f = Gf::gf2(2, {1, 0});
  Blocks msg(3, std::vector<Fe>(2));
  Rng rng(5);
  for (auto& blk : msg)
    for (auto& x : blk) x = f.random(rng);
  CHECK(parse_message(f, write_message(f, msg)) == msg);

  std::vector<std::vector<bool>> mask{{true, false}, {false, false}, {true, true}};
  CHECK(parse_mask(write_mask(mask)) == mask);
}

TEST_CASE("reports serialize deterministically") {
  ExampleCode ex = build_example_code();
  StructuralCache cache(ex.field, ex.sys, 10);
  Rng rng(0x532);
  Frame fr = random_frame(ex.field, ex.gen, 3, rng);
  ReceivedStream rx = apply_channel(fr, ChannelModel::from_pattern(example_pattern()));
  DecoderConfig cfg{1, false, 1u << 24};
  DecodeReport rep = decode(ex.field, ex.sys, cache, ex.gen, rx, cfg);
  std::string a = report_to_json(rep, cfg);
  std::string b = report_to_json(rep, cfg);
  CHECK(a == b);
  CHECK(a.find("\"decoder\": \"lowdelay\"") != std::string::npos);
  CHECK(a.find("\"termination_used\": true") != std::string::npos);
}
