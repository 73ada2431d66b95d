#include <gtest/gtest.h>

#include <sstream>

#include "wire/metrics.hpp"
#include "wire/trace.hpp"

using namespace wire;

namespace {

Trace parse(const std::string& text, std::size_t block_bytes = 64, std::size_t memory = 0) {
  std::istringstream in(text);
  return parse_trace(in, block_bytes, memory);
}

std::size_t error_line(const std::string& text, std::size_t block_bytes = 64, std::size_t memory = 0) {
  try {
    parse(text, block_bytes, memory);
  } catch (const TraceError& e) {
    return e.line();
  }
  return 0;
}

}  // namespace

TEST(Parse, WriteOfZeros) {
  const auto t = parse("W 0000 " + std::string(128, '0') + "\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].op, Op::write);
  EXPECT_EQ(t[0].addr, 0u);
  EXPECT_EQ(t[0].payload, std::vector<std::uint8_t>(64, 0));
}

TEST(Parse, Read) {
  const auto t = parse("R 002a\n");
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].op, Op::read);
  EXPECT_EQ(t[0].addr, 0x2Au);
  EXPECT_TRUE(t[0].payload.empty());
}

TEST(Parse, ShortPayloadNamesLineAndLength) {
  try {
    parse("W 0 abcd\n");
    FAIL();
  } catch (const TraceError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_NE(std::string(e.what()).find("64 bytes"), std::string::npos);
  }
}

TEST(Parse, CommentsAndBlankLines) {
  const auto t = parse("# header\n\n   \nR 1  # trailing\nW 2 ff\n", 1);
  ASSERT_EQ(t.size(), 2u);
  EXPECT_EQ(t[1].payload, std::vector<std::uint8_t>({0xFF}));
}

TEST(Parse, Malformed) {
  EXPECT_EQ(error_line("R 1\nX 2\n"), 2u);
  EXPECT_EQ(error_line("R\n"), 1u);
  EXPECT_EQ(error_line("R 1 2\n"), 1u);
  EXPECT_EQ(error_line("R zz\n"), 1u);
  EXPECT_EQ(error_line("W 1 gg\n", 1), 1u);
  EXPECT_EQ(error_line("R 1\n\nR 10\n", 1, 16), 3u);
}

TEST(Emit, RoundTrip) {
  GenSpec spec = preset("write-heavy");
  spec.events = 500;
  spec.memory_blocks = 300;
  const auto t = generate(spec);
  std::stringstream ss;
  emit_trace(ss, t);
  EXPECT_EQ(parse(ss.str(), 64, 300), t);
}

TEST(Generate, ReadFraction) {
  GenSpec spec;
  spec.read_fraction = 2.0 / 3.0;
  spec.events = 30000;
  const auto t = generate(spec);
  const auto reads = std::count_if(t.begin(), t.end(), [](const TraceEvent& e) { return e.op == Op::read; });
  EXPECT_GE(reads, 19400);
  EXPECT_LE(reads, 20600);
}

TEST(Generate, CategoricalTopValue) {
  GenSpec spec;
  spec.values.top = {{0x0, 0.8}};
  spec.events = 10000;
  const auto t = generate(spec);
  const auto rows = mfv_coverage(t, 4);
  EXPECT_EQ(rows[0].value, 0u);
  EXPECT_NEAR(rows[0].fraction, 0.80, 0.02);
  // the rest is spread evenly over the other 15 values
  for (std::size_t k = 1; k < rows.size(); ++k) EXPECT_NEAR(rows[k].fraction, 0.2 / 15, 0.005);
}

TEST(Generate, PresetsCoverEightyPercentInTopFive) {
  for (const char* name : {"read-heavy", "balanced", "write-heavy"}) {
    GenSpec spec = preset(name);
    spec.events = 20000;
    const auto rows = mfv_coverage(generate(spec), 4);
    EXPECT_NEAR(top_k_coverage(rows, 5), 0.82, 0.01) << name;
  }
  EXPECT_DOUBLE_EQ(preset("read-heavy").read_fraction, 0.75);
  EXPECT_DOUBLE_EQ(preset("balanced").read_fraction, 0.5);
  EXPECT_DOUBLE_EQ(preset("write-heavy").read_fraction, 0.25);
  EXPECT_THROW(preset("mixed"), ConfigError);
}

TEST(Generate, Deterministic) {
  GenSpec spec = preset("balanced");
  spec.events = 2000;
  spec.seed = 42;
  std::stringstream a, b;
  emit_trace(a, generate(spec));
  emit_trace(b, generate(spec));
  EXPECT_EQ(a.str(), b.str());
  spec.seed = 43;
  std::stringstream c;
  emit_trace(c, generate(spec));
  EXPECT_NE(a.str(), c.str());
}

TEST(Generate, ZipfAddressesAndValues) {
  GenSpec spec;
  spec.events = 20000;
  spec.address.kind = AddressModel::Kind::zipf;
  spec.address.zipf_s = 1.2;
  spec.values.kind = ValueModel::Kind::zipf;
  const auto t = generate(spec);
  std::vector<int> hits(spec.memory_blocks, 0);
  for (const auto& e : t) ++hits[e.addr];
  EXPECT_GT(hits[0], hits[1]);
  EXPECT_GT(hits[1], hits[100]);
  const auto rows = mfv_coverage(t, 4);
  EXPECT_EQ(rows[0].value, 0u);
  EXPECT_EQ(rows[1].value, 1u);
  spec.address.zipf_s = 0;
  EXPECT_THROW(generate(spec), ConfigError);
}

TEST(Generate, RejectsBadValueModels) {
  GenSpec spec;
  spec.values.top = {{0x0, 0.7}, {0x1, 0.4}};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.values.top = {{0x10, 0.1}};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.values.top = {{0x1, 0.1}, {0x1, 0.1}};
  EXPECT_THROW(spec.validate(), ConfigError);
  spec.values.top.clear();
  spec.read_fraction = 1.5;
  EXPECT_THROW(spec.validate(), ConfigError);
}

TEST(TraceHash, SensitiveToContent) {
  GenSpec spec;
  spec.events = 100;
  auto t = generate(spec);
  const auto h = trace_hash(t);
  EXPECT_EQ(trace_hash(t), h);
  t[5].addr ^= 1;
  EXPECT_NE(trace_hash(t), h);
}
