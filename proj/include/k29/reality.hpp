#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "k29/protocol.hpp"
#include "k29/types.hpp"

namespace k29 {

enum class RealityKind { bernoulli, regime, dawid, replay };

struct RegimeSegment {
  std::size_t count = 1;
  double theta = 0.5;
};

struct RealitySpec {
  RealityKind kind = RealityKind::bernoulli;
  double theta = 0.5;                  // bernoulli
  std::vector<RegimeSegment> script;   // regime
  bool expose_theta_as_object = false; // regime: object = current segment theta
  std::string replay_path;             // replay
  std::uint64_t seed = 0;

  void validate() const;
};

struct ReplayRecord {
  Eigen::VectorXd object;
  int label = 0;
};

// Parses "1000:0.5,1000:0,1000:1" into segments; throws std::invalid_argument
// on malformed input.
std::vector<RegimeSegment> parse_regime_script(const std::string& text);

// Reads a recorded (object, label) stream. Accepts the JSON-lines history
// format ({"x":[...],"p":...,"y":...}, p ignored) or a trajectory CSV with
// y and x0..x{d-1} columns; the format is sniffed from the first line.
// Throws ParseError with a line number on malformed records.
std::vector<ReplayRecord> read_replay_file(const std::string& path);
std::vector<ReplayRecord> read_replay_stream(std::istream& in,
                                             const std::string& origin);

// Label sources. Stochastic sources draw exactly once per label from a
// SplitMix64 stream seeded by RealityStrategy::reset (see rng.hpp).
std::unique_ptr<RealityStrategy> make_bernoulli_reality(double theta,
                                                        std::uint64_t seed = 0);
std::unique_ptr<RealityStrategy> make_regime_reality(std::vector<RegimeSegment> script,
                                                     bool expose_theta_as_object = false,
                                                     std::uint64_t seed = 0);
// y = 1 iff p < 0.5; deterministic, consumes no randomness.
std::unique_ptr<RealityStrategy> make_dawid_reality();
std::unique_ptr<RealityStrategy> make_replay_reality(std::vector<ReplayRecord> records);

std::unique_ptr<RealityStrategy> make_reality(const RealitySpec& spec);

// The bare label rules, exposed for direct testing.
int dawid_label(double forecast);

}  // namespace k29
