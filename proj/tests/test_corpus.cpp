#include <gtest/gtest.h>

#include "suite.hpp"

namespace {

matid::suite::Options options() {
  matid::suite::Options o;
  o.corpus_dir = MATID_CORPUS_DIR;
  return o;
}

TEST(Corpus, FixturesHold) {
  for (const auto& c : matid::suite::fixtures(options())) {
    EXPECT_TRUE(c.pass) << c.id << ": " << c.detail;
  }
}

TEST(Corpus, MissingDirectoryFailsEveryCriterion) {
  matid::suite::Options o = options();
  o.corpus_dir = "/nonexistent/matid-corpus";
  auto checks = matid::suite::fixtures(o);
  ASSERT_EQ(checks.size(), 3u);
  for (const auto& c : checks) EXPECT_FALSE(c.pass) << c.id;
}

}  // namespace
