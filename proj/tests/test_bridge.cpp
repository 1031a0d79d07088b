#include <filesystem>
#include <random>
#include <sstream>

#include "doctest.h"
#include "llmsim/corpus.hpp"
#include "llmsim/error.hpp"
#include "llmsim/itma_bridge.hpp"

using namespace llmsim;

namespace {

const Alphabet kBin({"0", "1"});

ErrorCode error_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::ConfigError;
}

std::string message_of(const auto& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

// Ones with probability 3/10, so 200 symbols stay well below 128 ones.
SymbolString sparse_stream(std::uint32_t seed, std::size_t length) {
  std::mt19937 rng(seed);
  SymbolString s;
  for (std::size_t i = 0; i < length; ++i) s.push_back(rng() % 10 < 3 ? 1 : 0);
  return s;
}

std::filesystem::path temp_dir(const std::string& name) {
  const auto p = std::filesystem::temp_directory_path() / ("llmsim-test-" + name);
  std::filesystem::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("model descriptions as advice") {
  const Dfst fst = corpus::fst("running-parity-fst");
  const auto cm = compile_fst(fst, {4});
  const ModelDescription d = describe_model(cm.model);
  CHECK(d.version() == "llmsim-model v1");
  CHECK(describe_model(parse_model_description(d.bytes)) == d);
  CHECK(describe_model(compile_fst(corpus::fst("running-parity-fst"), {4}).model) == d);

  std::istringstream in(d.bytes);
  std::string line;
  std::size_t words = 0;
  while (std::getline(in, line))
    if (line.rfind("tok ", 0) == 0 && line.find(" word ") != std::string::npos) ++words;
  CHECK(words == cm.report.machine_words);
}

TEST_CASE("bridge_run") {
  SUBCASE("one-member echo lineage") {
    const MultiTapeTm m = corpus::tm("echo-itm");
    const SymbolString stream = sparse_stream(3, 30);
    const auto lin = process_stream(m, {}, stream, {1});
    const BridgeAdvice advice = harvest_advice(lin.lineage);
    CHECK(advice.descriptions.size() == 1);
    const auto r = bridge_run(advice, stream);
    CHECK(r.chunks == lin.chunks);
    CHECK(r.load_positions == std::vector<std::size_t>{0});
  }

  SUBCASE("counter lineage with three reconstructions") {
    const MultiTapeTm m = corpus::tm("unary-counter-itm");
    const SymbolString stream = kBin.parse_string("110100101");
    const auto lin = process_stream(m, {}, stream, {2, 4, 8, 16});
    REQUIRE(lin.lineage.log.size() == 3);
    const BridgeAdvice advice = harvest_advice(lin.lineage);
    const auto r = bridge_run(advice, stream);
    CHECK(r.chunks == lin.chunks);
    CHECK(r.epoch_words == lin.epoch_words);
    CHECK(r.load_positions == std::vector<std::size_t>{0, 3, 5, 9});
    for (std::size_t i = 0; i < lin.lineage.members.size(); ++i)
      CHECK(parse_model_description(advice.descriptions.at(i).bytes) == lin.lineage.members[i].model);

    BridgeAdvice truncated = advice;
    truncated.descriptions.erase(2);
    CHECK(error_of([&] { bridge_run(truncated, stream); }) == ErrorCode::MissingAdvice);
    CHECK(message_of([&] { bridge_run(truncated, stream); }).find("position 5") != std::string::npos);

    BridgeAdvice corrupt = advice;
    corrupt.descriptions[1].bytes.resize(corrupt.descriptions[1].bytes.size() / 3);
    CHECK(error_of([&] { bridge_run(corrupt, stream); }) == ErrorCode::ParseError);
  }

  SUBCASE("advice-driven switch") {
    const MultiTapeTm m = corpus::tm("advice-xor-itma");
    const AdviceFunction fn = corpus::advice_xor_advice(20, 5);
    const SymbolString stream = sparse_stream(5, 12);
    const auto lin = process_stream(m, fn, stream, {1, 2});
    const BridgeAdvice advice = harvest_advice(lin.lineage);
    CHECK(advice.boundary_switches == std::set<std::size_t>{5});
    CHECK(bridge_run(advice, stream).chunks == lin.chunks);
  }
}

TEST_CASE("advice directory") {
  const MultiTapeTm m = corpus::tm("unary-counter-itm");
  const SymbolString stream = kBin.parse_string("0110");
  const BridgeAdvice advice = harvest_advice(process_stream(m, {}, stream, {2, 4}).lineage);
  const auto dir = temp_dir("advice");
  write_bridge_advice(dir, advice);
  CHECK(std::filesystem::exists(dir / "manifest.txt"));
  CHECK(read_bridge_advice(dir) == advice);

  std::filesystem::remove(dir / "member-0001.model");
  const BridgeAdvice partial = read_bridge_advice(dir);
  CHECK(partial.descriptions.size() == 1);
  CHECK(error_of([&] { bridge_run(partial, stream); }) == ErrorCode::MissingAdvice);
  std::filesystem::remove_all(dir);
}

TEST_CASE("descriptions do not depend on the symbols seen") {
  SUBCASE("equal switch structure, different streams") {
    const MultiTapeTm m = corpus::tm("unary-counter-itm");
    // Same symbols where the switches happen (3, 5, 9), different elsewhere.
    const auto a = process_stream(m, {}, kBin.parse_string("001000100"), {2, 4, 8, 16});
    const auto b = process_stream(m, {}, kBin.parse_string("111101010"), {2, 4, 8, 16});
    REQUIRE(a.lineage.log == b.lineage.log);
    CHECK(harvest_advice(a.lineage) == harvest_advice(b.lineage));
  }

  SUBCASE("advice switches") {
    const MultiTapeTm m = corpus::tm("advice-xor-itma");
    const AdviceFunction fn = corpus::advice_xor_advice(20, 5);
    const auto a = process_stream(m, fn, sparse_stream(1, 10), {1, 2});
    const auto b = process_stream(m, fn, sparse_stream(2, 10), {1, 2});
    CHECK(harvest_advice(a.lineage) == harvest_advice(b.lineage));
  }
}

TEST_CASE("roundtrip_check") {
  SUBCASE("echo") {
    const auto r = roundtrip_check(corpus::tm("echo-itm"), {}, sparse_stream(9, 25), {1});
    CHECK(r.passed());
    CHECK(r.members == 1);
  }

  SUBCASE("binary counter over a 200-symbol stream") {
    const MultiTapeTm m = corpus::tm("binary-counter-itm");
    const auto r = roundtrip_check(m, {}, sparse_stream(42, 200), {2, 4, 8, 16, 32});
    CHECK(r.passed());
    CHECK(r.log.size() >= 2);
    CHECK(r.oracle == r.lineage);
    CHECK(r.lineage == r.bridge);
    CHECK(r.oracle.size() == 200);
  }

  SUBCASE("a flipped embedding entry is caught in the first epoch that uses it") {
    const MultiTapeTm m = corpus::tm("unary-counter-itm");
    const SymbolString stream = kBin.parse_string("0101101");
    const auto lin = process_stream(m, {}, stream, {2, 4, 8});
    REQUIRE(lin.lineage.log.size() == 2);
    // The first word member 1 generates is a mid-epoch configuration; its
    // successor is looked up from its own embedding.
    const std::string victim = lin.lineage.log[0].first_word;
    std::size_t expected = 0;
    for (std::size_t e = 0; e < lin.epoch_words.size() && !expected; ++e)
      for (const auto& w : lin.epoch_words[e])
        if (w == victim) expected = e + 1;
    REQUIRE(expected == lin.lineage.log[0].position);

    const auto r = roundtrip_check(m, {}, stream, {2, 4, 8}, {}, [&](BridgeAdvice& a) {
      ModelParts p = parse_model_description(a.descriptions.at(1).bytes).parts();
      const FixedLlm original(p);
      IntVector& e = p.embeddings.vectors[original.id(victim)];
      e.back() = 1 - e.back();
      a.descriptions[1] = describe_model(FixedLlm(p));
    });
    CHECK(!r.passed());
    REQUIRE(r.divergence_epoch);
    CHECK(*r.divergence_epoch == expected);
  }
}
