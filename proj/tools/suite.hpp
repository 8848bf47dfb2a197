#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace matid::suite {

struct Check {
  std::string id;
  std::string title;
  bool pass = false;
  std::string detail;
  double seconds = 0;
};

struct Options {
  std::string corpus_dir;
  std::uint64_t seed = 20240601;
  /// Checks run concurrently on this many workers; results keep their order.
  unsigned threads = 1;
};

/// The ten acceptance criteria, in order. Fixture inputs come from the
/// corpus directory; every exception is reported as a failure.
std::vector<Check> acceptance(const Options& opts);

/// Corpus fixtures not covered by a criterion: identity list, composed
/// certificates and tensors.
std::vector<Check> fixtures(const Options& opts);

/// Default corpus location: $MATID_CORPUS, else the source tree's corpus/.
std::string default_corpus_dir();

}  // namespace matid::suite
