#pragma once

#include <optional>
#include <string>

#include "isodec/pipeline.hpp"

namespace isodec {

// A code-spec file carries the field, the code parameters, and a generator
// and/or a state space. Loading materializes whichever half is missing and
// cross-validates when both are present.
struct LoadedCode {
  Gf field;
  std::size_t n = 0, k = 0, delta = 0;
  std::size_t L = 0, T = 0;
  PolyGenerator gen;
  StateSpace sys;
  bool had_gen = false, had_sys = false;
};

std::string write_code_spec(const Gf& f, std::size_t n, std::size_t k, std::size_t delta,
                            std::optional<std::size_t> L, std::optional<std::size_t> T,
                            const PolyGenerator* gen, const StateSpace* sys);
LoadedCode read_code_spec(const std::string& text);

// Stream files: one header line, then one line per block with n tokens, each
// a fixed-width hex element or the erasure literal '*'.
std::string write_stream(const Gf& f, const ReceivedStream& rx);
ReceivedStream parse_stream(const Gf& f, const std::string& text);

ReceivedStream stream_from_blocks(const Gf& f, const Blocks& blocks, std::size_t k, std::size_t gamma);

std::string write_message(const Gf& f, const Blocks& msg);
Blocks parse_message(const Gf& f, const std::string& text);

// Mask files: '.' = received, '*' = erased.
std::string write_mask(const std::vector<std::vector<bool>>& mask);
std::vector<std::vector<bool>> parse_mask(const std::string& text);

std::string report_to_json(const DecodeReport& rep, const DecoderConfig& cfg);
std::string stats_to_json(const TrialStats& st);
std::string profile_to_json(const CodeProfile& prof, const QualityReport& quality);

}  // namespace isodec
