#include "isodec/pipeline.hpp"

#include <string>

namespace isodec {

Frame make_frame(const Gf& f, const PolyGenerator& gen, Blocks message) {
  Frame fr;
  fr.gamma = message.size() - 1;
  fr.encoded = encode(f, gen, message);
  fr.message = std::move(message);
  return fr;
}

Frame random_frame(const Gf& f, const PolyGenerator& gen, std::size_t gamma, Rng& rng) {
  Blocks msg(gamma + 1, std::vector<Fe>(gen.k));
  for (auto& blk : msg)
    for (auto& x : blk) x = f.random(rng);
  return make_frame(f, gen, std::move(msg));
}

ChannelModel ChannelModel::iid(double p, std::uint64_t seed) {
  ChannelModel m;
  m.kind = Kind::Iid;
  m.p_erase_y = m.p_erase_u = p;
  m.seed = seed;
  return m;
}

ChannelModel ChannelModel::iid_split(double p_y, double p_u, std::uint64_t seed) {
  ChannelModel m;
  m.kind = Kind::Iid;
  m.p_erase_y = p_y;
  m.p_erase_u = p_u;
  m.seed = seed;
  return m;
}

ChannelModel ChannelModel::burst(double g2b, double b2g, double p_bad, std::uint64_t seed) {
  ChannelModel m;
  m.kind = Kind::Burst;
  m.good_to_bad = g2b;
  m.bad_to_good = b2g;
  m.p_erase_bad = p_bad;
  m.seed = seed;
  return m;
}

ChannelModel ChannelModel::from_pattern(std::vector<std::vector<bool>> mask) {
  ChannelModel m;
  m.kind = Kind::Pattern;
  m.pattern = std::move(mask);
  return m;
}

namespace {

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 1.0)) fail(Errc::PatternError, "erasure probability outside [0,1]");
}

}  // namespace

ReceivedStream apply_channel_seeded(const Frame& frame, const ChannelModel& model, Rng& rng) {
  const std::size_t nblocks = frame.encoded.size();
  const std::size_t n = nblocks ? frame.encoded[0].size() : 0;

  ReceivedStream rx;
  rx.gamma = frame.gamma;
  rx.n = n;
  rx.k = frame.message.empty() ? 0 : frame.message[0].size();
  rx.blocks.assign(nblocks, std::vector<ErasureSymbol>(n));

  switch (model.kind) {
    case ChannelModel::Kind::Iid: {
      check_probability(model.p_erase_y);
      check_probability(model.p_erase_u);
      std::size_t p = n - rx.k;
      for (std::size_t t = 0; t < nblocks; ++t)
        for (std::size_t c = 0; c < n; ++c) {
          double pe = c < p ? model.p_erase_y : model.p_erase_u;
          bool erased = rng.uniform() < pe;
          rx.blocks[t][c] = erased ? ErasureSymbol::erased() : ErasureSymbol::of(frame.encoded[t][c]);
        }
      break;
    }
    case ChannelModel::Kind::Burst: {
      check_probability(model.good_to_bad);
      check_probability(model.bad_to_good);
      check_probability(model.p_erase_good);
      check_probability(model.p_erase_bad);
      bool bad = false;
      for (std::size_t t = 0; t < nblocks; ++t)
        for (std::size_t c = 0; c < n; ++c) {
          double pe = bad ? model.p_erase_bad : model.p_erase_good;
          bool erased = rng.uniform() < pe;
          double pt = bad ? model.bad_to_good : model.good_to_bad;
          if (rng.uniform() < pt) bad = !bad;
          rx.blocks[t][c] = erased ? ErasureSymbol::erased() : ErasureSymbol::of(frame.encoded[t][c]);
        }
      break;
    }
    case ChannelModel::Kind::Pattern: {
      if (model.pattern.size() != nblocks) fail(Errc::PatternError, "pattern mask block count mismatch");
      for (std::size_t t = 0; t < nblocks; ++t) {
        if (model.pattern[t].size() != n) fail(Errc::PatternError, "pattern mask arity mismatch");
        for (std::size_t c = 0; c < n; ++c)
          rx.blocks[t][c] = model.pattern[t][c] ? ErasureSymbol::erased()
                                                : ErasureSymbol::of(frame.encoded[t][c]);
      }
      break;
    }
  }
  return rx;
}

ReceivedStream apply_channel(const Frame& frame, const ChannelModel& model) {
  Rng rng(model.seed);
  return apply_channel_seeded(frame, model, rng);
}

void DecoderAggregate::absorb(const DecodeReport& rep) {
  bool block_negative = false;
  for (std::size_t t = 0; t < rep.symbols.size(); ++t) {
    block_negative = false;
    for (const auto& s : rep.symbols[t]) {
      ++symbols;
      switch (s.status) {
        case SymbolStatus::ReceivedClean:
          ++received_clean;
          break;
        case SymbolStatus::Recovered:
          ++recovered;
          ++erased;
          delay_sum += s.delay;
          ++delay_count;
          ++delay_histogram[s.delay];
          max_delay = std::max(max_delay, s.delay);
          if (s.delay < 0) {
            ++negative_delay_symbols;
            block_negative = true;
          }
          if (s.route == Route::Terminal) ++terminal_symbols;
          if (s.was_lost) ++rescued;
          break;
        case SymbolStatus::Lost:
          ++lost;
          ++erased;
          break;
      }
    }
    if (block_negative) ++negative_delay_blocks;
  }
  mul += rep.ops.mul;
  inv += rep.ops.inv;
  windows_solved += rep.counters.windows_solved;
  state_recoveries += rep.counters.state_recoveries;
  frames_fully_recovered += rep.fully_recovered() ? 1 : 0;
}

void verify_against_truth(const Frame& frame, const DecodeReport& rep, std::uint64_t seed) {
  for (std::size_t t = 0; t < rep.stream_out.size(); ++t)
    for (std::size_t c = 0; c < rep.stream_out[t].size(); ++c) {
      if (!rep.known_out[t][c]) continue;
      if (!(rep.stream_out[t][c] == frame.encoded[t][c]))
        fail(Errc::IntegrityError,
             "recovered value mismatch against ground truth (reproduction seed " +
                 std::to_string(seed) + ", block " + std::to_string(t) + ", component " +
                 std::to_string(c) + ")");
    }
}

TrialStats run_experiment(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                          const PolyGenerator& gen, const ChannelModel& model, std::size_t trials,
                          std::size_t gamma, std::size_t delay_T) {
  if (trials < 1) fail(Errc::ShapeError, "experiment needs at least one trial");
  TrialStats stats;
  stats.trials = trials;
  stats.gamma = gamma;
  stats.delay_T = delay_T;
  stats.seed = model.seed;

  DecoderConfig cfg_low{delay_T, false, 1u << 24};
  DecoderConfig cfg_base{delay_T, true, 1u << 24};

  for (std::size_t trial = 0; trial < trials; ++trial) {
    std::uint64_t trial_seed = model.seed + trial;
    Rng rng(trial_seed);
    Frame fr = random_frame(f, gen, gamma, rng);
    ReceivedStream rx = model.kind == ChannelModel::Kind::Pattern
                            ? apply_channel(fr, model)
                            : apply_channel_seeded(fr, model, rng);

    DecodeReport rl = decode(f, sys, cache, gen, rx, cfg_low);
    DecodeReport rb = baseline_decode(f, sys, cache, rx, cfg_base);
    verify_against_truth(fr, rl, trial_seed);
    verify_against_truth(fr, rb, trial_seed);

    stats.lowdelay.absorb(rl);
    stats.baseline.absorb(rb);
    for (std::size_t t = 0; t < rl.symbols.size(); ++t)
      for (std::size_t c = 0; c < rl.symbols[t].size(); ++c) {
        if (rl.symbols[t][c].status == SymbolStatus::Recovered &&
            rb.symbols[t][c].status == SymbolStatus::Recovered) {
          stats.common_delay_lowdelay += rl.symbols[t][c].delay;
          stats.common_delay_baseline += rb.symbols[t][c].delay;
          ++stats.common_count;
        }
      }
  }
  return stats;
}

}  // namespace isodec
