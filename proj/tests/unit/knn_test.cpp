#include "vad/knn.hpp"

#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "vad/error.hpp"

using namespace vad;

namespace {

struct RandomBank {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> clips;
  ExemplarIndex index;
};

RandomBank random_bank(std::size_t n, std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  RandomBank b;
  FeatureMatrix m;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<double> r(d);
    for (auto& v : r) v = g(rng);
    m.push_row(r);
    b.rows.push_back(r);
    b.clips.push_back("clip" + std::to_string(rng() % 5));
  }
  b.index = ExemplarIndex(m, b.clips);
  return b;
}

}  // namespace

TEST(KnnScore, ExemplarScoresZeroAgainstItself) {
  const RandomBank b = random_bank(50, 6, 1);
  for (std::size_t i = 0; i < b.rows.size(); ++i) EXPECT_EQ(knn_score(b.index, b.rows[i], 1), 0.0);
}

TEST(KnnScore, ExcludingOwnClipRemovesSelfMatch) {
  FeatureMatrix m;
  m.push_row(std::vector<double>{0, 0});
  m.push_row(std::vector<double>{3, 4});
  m.push_row(std::vector<double>{0, 3});
  const ExemplarIndex idx(m, {"a", "b", "c"});
  const std::vector<double> x{0, 0};
  EXPECT_EQ(knn_score(idx, x, 1), 0.0);
  EXPECT_EQ(knn_score(idx, x, 1, "a"), 3.0);
  EXPECT_EQ(knn_score(idx, x, 2, "a"), 4.0);
  EXPECT_EQ(knn_score(idx, x, 2, "c"), 2.5);
}

TEST(KnnScore, MatchesFullSortOracle) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const RandomBank b = random_bank(300, 8, seed);
    std::mt19937_64 rng(seed + 1000);
    std::normal_distribution<double> g;
    for (int q = 0; q < 10; ++q) {
      std::vector<double> x(8);
      for (auto& v : x) v = g(rng);
      for (int k : {1, 5}) {
        EXPECT_EQ(knn_score(b.index, x, k), oracle::knn(b.rows, b.clips, x, k, nullptr));
        const std::string ex = "clip" + std::to_string(q % 5);
        EXPECT_EQ(knn_score(b.index, x, k, ex), oracle::knn(b.rows, b.clips, x, k, &ex));
      }
    }
  }
}

TEST(KnnScore, ExclusionNeverUsesExcludedRows) {
  // Excluded rows sit on top of the query; any leak would pull the score to 0.
  FeatureMatrix m;
  std::vector<std::string> clips;
  for (int i = 0; i < 10; ++i) {
    m.push_row(std::vector<double>{0, 0});
    clips.push_back("self");
  }
  m.push_row(std::vector<double>{1, 0});
  clips.push_back("other");
  const ExemplarIndex idx(m, clips);
  EXPECT_EQ(knn_score(idx, std::vector<double>{0, 0}, 5, "self"), 1.0);
}

TEST(KnnScore, AllExcludedThrows) {
  FeatureMatrix m;
  m.push_row(std::vector<double>{1});
  const ExemplarIndex idx(m, {"only"});
  EXPECT_THROW(knn_score(idx, std::vector<double>{0}, 1, "only"), ValidationError);
}

TEST(KnnScore, DimensionMismatchIsCompatibilityError) {
  const RandomBank b = random_bank(5, 3, 2);
  EXPECT_THROW(knn_score(b.index, std::vector<double>{1, 2}, 1), CompatibilityError);
}

TEST(ExemplarIndex, ClipNamesSortedAndInterned) {
  FeatureMatrix m;
  for (int i = 0; i < 4; ++i) m.push_row(std::vector<double>{double(i)});
  const ExemplarIndex idx(m, {"z", "a", "z", "m"});
  EXPECT_EQ(idx.clip_names(), (std::vector<std::string>{"a", "m", "z"}));
  EXPECT_EQ(idx.clip_of(0), "z");
  EXPECT_EQ(idx.clip_of(3), "m");
}
