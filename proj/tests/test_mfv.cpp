#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "wire/mfv.hpp"

using namespace wire;

TEST(Fifo, PromotesOnThirdObservationWithSatMax3) {
  FifoFilter f(4, 3, 1);
  EXPECT_EQ(f.observe(0xA), FifoFilter::Result::inserted);
  EXPECT_EQ(f.observe(0xA), FifoFilter::Result::counted);
  EXPECT_EQ(f.observe(0xA), FifoFilter::Result::saturated);
  EXPECT_EQ(f.find(0xA)->sat_counter, 3u);
}

TEST(Fifo, ColdInsertStartsAtOne) {
  FifoFilter f(4, 7, 1);
  EXPECT_EQ(f.observe(5), FifoFilter::Result::inserted);
  ASSERT_NE(f.find(5), nullptr);
  EXPECT_EQ(f.find(5)->sat_counter, 1u);
}

TEST(Fifo, FullAndWarmDropsNewValueAfterDecrement) {
  FifoFilter f(2, 7, 1);
  for (int i = 0; i < 3; ++i) f.observe(1);
  for (int i = 0; i < 4; ++i) f.observe(2);
  // counters: 1 -> 3 then decremented to 2 by the miss on 2; 2 -> 4
  ASSERT_EQ(f.find(1)->sat_counter, 2u);
  ASSERT_EQ(f.find(2)->sat_counter, 4u);
  EXPECT_EQ(f.observe(9), FifoFilter::Result::dropped);
  EXPECT_EQ(f.find(9), nullptr);
  EXPECT_EQ(f.find(1)->sat_counter, 1u);
  EXPECT_EQ(f.find(2)->sat_counter, 3u);
}

TEST(Fifo, ColdEntryIsReplaced) {
  FifoFilter f(2, 7, 1);
  f.observe(1);
  f.observe(2);  // decrements 1 to 0
  EXPECT_EQ(f.find(1)->sat_counter, 0u);
  EXPECT_EQ(f.observe(3), FifoFilter::Result::inserted);
  EXPECT_EQ(f.find(1), nullptr);
  EXPECT_NE(f.find(3), nullptr);
}

TEST(Fifo, CountersStayInRangeAndValuesUnique) {
  std::mt19937_64 rng(2);
  FifoFilter f(8, 5, 2);
  for (int i = 0; i < 20000; ++i) {
    f.observe(static_cast<std::uint32_t>(rng() % 24));
    std::set<std::uint32_t> seen;
    for (const auto& e : f.entries()) {
      EXPECT_LE(e.sat_counter, 5u);
      if (e.occupied) {
        EXPECT_TRUE(seen.insert(e.value).second);
      }
    }
  }
}

TEST(FvTable, RetireReferences) {
  FvTable t(4);
  ASSERT_TRUE(t.insert(7));
  t.add_reference(7);
  t.retire_reference(7);
  EXPECT_FALSE(t.contains(7));
  EXPECT_FALSE(t.lines()[0].used);
  EXPECT_EQ(t.lines()[0].pointer, 0u);

  ASSERT_TRUE(t.insert(8));
  for (int i = 0; i < 5; ++i) t.add_reference(8);
  t.retire_reference(8);
  EXPECT_EQ(t.entry(8)->pointer, 4u);
  EXPECT_TRUE(t.entry(8)->used);
}

TEST(FvTable, RetireUnknownOnlyCounts) {
  FvTable t(4);
  t.insert(1);
  t.add_reference(1);
  std::vector<FvEntry> before(t.lines().begin(), t.lines().end());
  t.retire_reference(99);
  EXPECT_EQ(t.unknown_retires(), 1u);
  for (std::size_t i = 0; i < before.size(); ++i) {
    EXPECT_EQ(t.lines()[i].value, before[i].value);
    EXPECT_EQ(t.lines()[i].pointer, before[i].pointer);
    EXPECT_EQ(t.lines()[i].used, before[i].used);
  }
}

TEST(FvTable, InsertFillsGapsAndRanks) {
  FvTable t(2, 3);
  EXPECT_TRUE(t.insert(4));
  EXPECT_TRUE(t.insert(2));
  EXPECT_FALSE(t.insert(9));
  for (int i = 0; i < 10; ++i) t.bump(4);
  EXPECT_EQ(t.entry(4)->counter, 3u);  // saturates
  t.bump(2);
  t.bump(2);
  t.bump(2);
  EXPECT_EQ(t.ranked(), std::vector<std::uint32_t>({2, 4}));  // tie broken by value
  EXPECT_EQ(t.ranked(1), std::vector<std::uint32_t>({2}));
}

TEST(MfvFinder, PromotesIntoTableAndBypassesFifoAfterwards) {
  MfvConfig cfg;
  cfg.sat_max = 3;
  MfvFinder f(cfg);
  EXPECT_FALSE(f.observe(6));
  EXPECT_FALSE(f.observe(6));
  EXPECT_EQ(f.observe(6), std::optional<std::uint32_t>(6));
  EXPECT_TRUE(f.table().contains(6));
  EXPECT_EQ(f.fifo().find(6), nullptr);
  EXPECT_FALSE(f.observe(6));
  EXPECT_EQ(f.table().entry(6)->counter, 1u);
}

TEST(MfvFinder, PromotionWithoutGapIsCounted) {
  MfvConfig cfg;
  cfg.sat_max = 1;
  cfg.fv_entries = 1;
  MfvFinder f(cfg);
  EXPECT_EQ(f.observe(1), std::optional<std::uint32_t>(1));
  EXPECT_EQ(f.observe(2), std::optional<std::uint32_t>(2));
  EXPECT_EQ(f.promotions_without_gap(), 1u);
  EXPECT_TRUE(f.table().contains(1));
  EXPECT_FALSE(f.table().contains(2));
}

TEST(MfvFinder, TableNeverHoldsDuplicates) {
  std::mt19937_64 rng(12);
  MfvConfig cfg;
  cfg.sat_max = 2;
  cfg.fv_entries = 6;
  MfvFinder f(cfg);
  std::vector<std::uint32_t> held;
  for (int i = 0; i < 20000; ++i) {
    const auto v = static_cast<std::uint32_t>(rng() % 16);
    f.observe(v);
    if (rng() % 3 == 0) {
      f.table().add_reference(v);
      held.push_back(v);
    }
    if (!held.empty() && rng() % 3 == 0) {
      f.table().retire_reference(held.front());
      held.erase(held.begin());
    }
    std::set<std::uint32_t> seen;
    for (const auto& l : f.table().lines()) {
      if (l.used) {
        EXPECT_TRUE(seen.insert(l.value).second);
      } else {
        EXPECT_EQ(l.pointer, 0u);
      }
    }
  }
}

// Extra copies of a value never stop its promotion while the FIFO has room
// for every distinct value: nothing is evicted, so the value's counter is a
// capped walk that extra hits can only raise.
TEST(MfvFinder, PromotionIsMonotoneWithoutEvictions) {
  std::mt19937_64 rng(77);
  MfvConfig cfg;
  cfg.fifo_entries = 6;
  cfg.sat_max = 4;
  auto promoted = [&](const std::vector<std::uint32_t>& s, std::uint32_t v) {
    MfvFinder f(cfg);
    for (auto x : s)
      if (f.observe(x) == std::optional<std::uint32_t>(v)) return true;
    return f.table().contains(v);
  };
  int checked = 0;
  for (int t = 0; t < 3000; ++t) {
    std::vector<std::uint32_t> s(10 + rng() % 30);
    for (auto& x : s) x = static_cast<std::uint32_t>(rng() % 6);
    const std::uint32_t v = s[rng() % s.size()];
    if (!promoted(s, v)) continue;
    ++checked;
    auto more = s;
    const std::size_t extra = 1 + rng() % 3;
    for (std::size_t k = 0; k < extra; ++k) more.insert(more.begin() + static_cast<long>(rng() % (more.size() + 1)), v);
    EXPECT_TRUE(promoted(more, v));
  }
  EXPECT_GT(checked, 100);
}

// Once entries get evicted the decrement-on-miss rule is not monotone:
// a leading copy of 0 changes which entries the later misses replace.
TEST(MfvFinder, ExtraOccurrenceCanDelayPromotionUnderEviction) {
  MfvConfig cfg;
  cfg.fifo_entries = 2;
  cfg.sat_max = 3;
  cfg.replace_threshold = 1;
  auto promoted = [&](std::initializer_list<std::uint32_t> s) {
    MfvFinder f(cfg);
    for (auto x : s) f.observe(x);
    return f.table().contains(0);
  };
  EXPECT_TRUE(promoted({1, 2, 0, 0, 2, 0}));
  EXPECT_FALSE(promoted({0, 1, 2, 0, 0, 2, 0}));
}

TEST(Codebook, TwoBitExample) {
  const std::uint32_t ranked[] = {0b00, 0b11};
  const auto cb = build_codebook(ranked, 2);
  EXPECT_EQ(cb.encode(0b00), 0b00u);
  EXPECT_EQ(cb.encode(0b11), 0b01u);
  EXPECT_EQ(cb.encode(0b01), 0b10u);
  EXPECT_EQ(cb.encode(0b10), 0b11u);
}

TEST(Codebook, AllZeroAndAllOne) {
  const std::uint32_t ranked[] = {0x0, 0xF};
  const auto cb = build_codebook(ranked, 4);
  EXPECT_EQ(encode_granule(cb, 0x0), 0x0u);
  EXPECT_EQ(encode_granule(cb, 0xF), 0x1u);
  EXPECT_EQ(popcount32(cb.encode(0x0) ^ cb.encode(0xF)), 1u);
}

TEST(Codebook, SingleBit) {
  const std::uint32_t ranked[] = {0, 1};
  const auto cb = build_codebook(ranked, 1);
  EXPECT_EQ(popcount32(cb.encode(0) ^ cb.encode(1)), 1u);
  EXPECT_EQ(cb.decode(cb.encode(1)), 1u);
}

TEST(Codebook, EmptyRankingIsIdentity) {
  EXPECT_TRUE(build_codebook({}, 4).is_identity());
  EXPECT_EQ(build_codebook({}, 4), Codebook::identity(4));
}

TEST(Codebook, RejectsBadRankings) {
  const std::uint32_t dup[] = {3, 3};
  const std::uint32_t wide[] = {16};
  EXPECT_THROW(build_codebook(dup, 4), ConfigError);
  EXPECT_THROW(build_codebook(wide, 4), ConfigError);
}

TEST(Codebook, RandomRankingsAreBijectiveGrayChains) {
  std::mt19937_64 rng(31);
  for (unsigned g : {1u, 2u, 4u, 8u}) {
    const std::uint32_t n = 1u << g;
    for (int t = 0; t < 50; ++t) {
      std::vector<std::uint32_t> all(n);
      for (std::uint32_t v = 0; v < n; ++v) all[v] = v;
      std::shuffle(all.begin(), all.end(), rng);
      all.resize(rng() % (n + 1));
      const auto cb = build_codebook(all, g);
      std::vector<bool> hit(n, false);
      for (std::uint32_t v = 0; v < n; ++v) {
        EXPECT_EQ(decode_granule(cb, encode_granule(cb, v)), v);
        EXPECT_FALSE(hit[cb.encode(v)]);
        hit[cb.encode(v)] = true;
      }
      for (std::size_t k = 0; k + 1 < all.size(); ++k)
        EXPECT_EQ(popcount32(cb.encode(all[k]) ^ cb.encode(all[k + 1])), 1u);
      if (!all.empty() && all[0] == 0) {
        EXPECT_EQ(cb.encode(0), 0u);
      }
      // leftovers: ascending value to ascending codeword
      std::uint32_t last = 0;
      bool first = true;
      for (std::uint32_t v = 0; v < n; ++v) {
        if (std::find(all.begin(), all.end(), v) != all.end()) continue;
        if (!first) {
          EXPECT_GT(cb.encode(v), last);
        }
        last = cb.encode(v);
        first = false;
      }
    }
  }
}

TEST(Codebook, DumpLoadRoundTrip) {
  const std::uint32_t ranked[] = {0x0, 0xF, 0x1, 0x7};
  const auto cb = build_codebook(ranked, 4);
  std::stringstream ss;
  cb.dump(ss);
  EXPECT_EQ(ss.str().rfind("# wire-codebook v1\ngranule_bits 4\n", 0), 0u);
  const auto back = Codebook::load(ss);
  EXPECT_EQ(back, cb);
}

TEST(Codebook, LoadRejectsBrokenTables) {
  std::stringstream bad_version("# other\n");
  EXPECT_THROW(Codebook::load(bad_version), ConfigError);
  std::stringstream dup("# wire-codebook v1\ngranule_bits 1\n- 0 0\n- 1 0\n");
  EXPECT_THROW(Codebook::load(dup), ConfigError);
  std::stringstream short_table("# wire-codebook v1\ngranule_bits 1\n- 0 0\n");
  EXPECT_THROW(Codebook::load(short_table), ConfigError);
}
