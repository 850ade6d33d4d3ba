#pragma once

#include <cstdint>
#include <map>

#include "isodec/decoder.hpp"

namespace isodec {

// One transmitted frame with its ground truth retained.
struct Frame {
  std::size_t gamma = 0;
  Blocks message;  // m_0..m_gamma
  Blocks encoded;  // v_0..v_{gamma+mu}
};

Frame make_frame(const Gf& f, const PolyGenerator& gen, Blocks message);
Frame random_frame(const Gf& f, const PolyGenerator& gen, std::size_t gamma, Rng& rng);

struct ChannelModel {
  enum class Kind { Iid, Burst, Pattern };
  Kind kind = Kind::Iid;
  // Iid: independent per-symbol erasure, with an optional y/u probability
  // split (a channel may hit outputs harder than inputs).
  double p_erase_y = 0.0;
  double p_erase_u = 0.0;
  // Burst (Gilbert-Elliott): two-state Markov modulation. Per symbol the
  // erasure is drawn from the current state, then the state transitions.
  double good_to_bad = 0.0;
  double bad_to_good = 1.0;
  double p_erase_good = 0.0;
  double p_erase_bad = 1.0;
  // Pattern: explicit mask, true = erased; shape must match the frame.
  std::vector<std::vector<bool>> pattern;
  std::uint64_t seed = 0;

  static ChannelModel iid(double p, std::uint64_t seed);
  static ChannelModel iid_split(double p_y, double p_u, std::uint64_t seed);
  static ChannelModel burst(double g2b, double b2g, double p_bad, std::uint64_t seed);
  static ChannelModel from_pattern(std::vector<std::vector<bool>> mask);
};

// Draw order is fixed: blocks in time order, components 0..n-1 within a
// block, one RNG draw per symbol (Burst takes a second draw for the state
// transition). Identical seed + model + frame give identical masks.
ReceivedStream apply_channel(const Frame& frame, const ChannelModel& model);
ReceivedStream apply_channel_seeded(const Frame& frame, const ChannelModel& model, Rng& rng);

struct DecoderAggregate {
  std::uint64_t symbols = 0;
  std::uint64_t erased = 0;
  std::uint64_t received_clean = 0;
  std::uint64_t recovered = 0;
  std::uint64_t lost = 0;
  std::uint64_t negative_delay_symbols = 0;
  std::uint64_t negative_delay_blocks = 0;
  std::int64_t delay_sum = 0;          // over recovered symbols
  std::uint64_t delay_count = 0;
  int max_delay = 0;
  std::map<int, std::uint64_t> delay_histogram;
  std::uint64_t mul = 0, inv = 0;
  std::uint64_t windows_solved = 0;
  std::uint64_t state_recoveries = 0;
  std::uint64_t terminal_symbols = 0;  // recovered via the termination step
  std::uint64_t rescued = 0;           // declared lost, recovered later anyway
  std::uint64_t frames_fully_recovered = 0;

  void absorb(const DecodeReport& rep);
};

struct TrialStats {
  std::size_t trials = 0;
  std::size_t gamma = 0;
  std::size_t delay_T = 0;
  std::uint64_t seed = 0;
  DecoderAggregate lowdelay;
  DecoderAggregate baseline;
  // Delay comparison over symbols recovered by both decoders.
  std::int64_t common_delay_lowdelay = 0;
  std::int64_t common_delay_baseline = 0;
  std::uint64_t common_count = 0;
};

// Encode-channel-decode trials with ground-truth verification: any recovered
// value differing from the transmitted one aborts with the reproduction seed.
TrialStats run_experiment(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                          const PolyGenerator& gen, const ChannelModel& model, std::size_t trials,
                          std::size_t gamma, std::size_t delay_T);

// Soundness check used by the harness: every known output symbol must equal
// the transmitted one.
void verify_against_truth(const Frame& frame, const DecodeReport& rep, std::uint64_t seed);

}  // namespace isodec
