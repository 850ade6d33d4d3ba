#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "isodec/sysrep.hpp"

namespace isodec {

struct ErasureSymbol {
  bool known = false;
  Fe value{};

  static ErasureSymbol erased() { return {}; }
  static ErasureSymbol of(const Fe& v) { return {true, v}; }
};

// Time-indexed blocks of n symbols, each received or erased, ordered
// (y-part, u-part) within a block.
struct ReceivedStream {
  std::size_t n = 0, k = 0, gamma = 0;
  std::vector<std::vector<ErasureSymbol>> blocks;
};

enum class SymbolStatus : unsigned char { ReceivedClean, Recovered, Lost };
enum class Route : unsigned char { None, Window, StateRecovery, Backfill, Terminal };

struct SymbolReport {
  SymbolStatus status = SymbolStatus::ReceivedClean;
  Route route = Route::None;
  bool was_lost = false;  // declared lost before a later recovery
  int resolved_at = 0;    // time step of resolution
  int delay = 0;          // resolved_at - block index; negative = before arrival
};

struct RecoveryEvent {
  Route route = Route::None;
  std::size_t pos = 0;  // algorithm position i
  std::size_t l = 0, j = 0;
  std::size_t time = 0;
  std::size_t symbols = 0;  // symbols committed by this event
};

struct DecodeCounters {
  std::uint64_t windows_attempted = 0;
  std::uint64_t windows_solved = 0;
  std::uint64_t state_attempts = 0;
  std::uint64_t state_recoveries = 0;
  std::uint64_t backfill_solves = 0;
  std::uint64_t terminal_attempts = 0;
  bool termination_used = false;
};

struct DecodeReport {
  std::size_t n = 0, k = 0, gamma = 0;
  std::vector<std::vector<SymbolReport>> symbols;
  Blocks stream_out;                        // recovered values; zeros where lost
  std::vector<std::vector<bool>> known_out; // false only for lost symbols
  DecodeCounters counters;
  std::vector<RecoveryEvent> events;
  OpCount ops;

  std::size_t lost_count() const;
  std::size_t recovered_count() const;
  bool fully_recovered() const { return lost_count() == 0; }
};

struct DecoderConfig {
  std::size_t delay_T = 0;  // max decoding delay; also the baseline window bound
  bool baseline = false;
  std::uint64_t solve_budget = 1u << 24;  // cap on unknowns*rows per solve
};

// x_i from the recursion x_{t+1} = A x_t + B u_t over a fully known input
// prefix u_0..u_{i-1}; PrefixUnknown if any of those are erased.
std::vector<Fe> state_from_prefix(const Gf& f, const StateSpace& sys, const ReceivedStream& rx,
                                  std::size_t i, OpCount* ops = nullptr);

struct WindowOutcome {
  bool target_resolved = false;  // every erasure of v_i determined
  std::vector<std::pair<std::size_t, std::size_t>> committed;  // (block, comp)
  std::uint64_t mult_count = 0;
};

// Sliding-window solve over v_i..v_{i+j} given x_i; writes every determined
// erased component back into the stream. IntegrityError on an inconsistent
// system (impossible for genuine channel output).
WindowOutcome recover_window(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                             ReceivedStream& rx, std::size_t i, std::size_t j,
                             std::span<const Fe> x_i, OpCount* ops = nullptr);

struct StateOutcome {
  bool success = false;                 // all s coordinates of x_{i+l} determined
  std::vector<Fe> state;                // x_{i+l} when successful
  std::vector<std::pair<std::size_t, std::size_t>> committed;
  std::uint64_t mult_count = 0;
};

// Window solve with x_{i+l} itself among the unknowns, alongside the erased
// window components; on success also writes back every determined window
// symbol.
StateOutcome recover_state(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                           ReceivedStream& rx, std::size_t i, std::size_t l, std::size_t j,
                           OpCount* ops = nullptr);

struct BackfillOutcome {
  bool solved = false;  // l <= ell path taken
  std::vector<std::pair<std::size_t, std::size_t>> committed;
  std::vector<std::pair<std::size_t, std::size_t>> lost;  // still-erased, declared lost
};

// Input backfill between a known x_i and a recovered x_{i+l}: when l <= ell
// the difference pins u_i..u_{i+l-1} (then the y's); otherwise the remaining
// erasures of those blocks are reported lost.
BackfillOutcome backfill_inputs(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                                ReceivedStream& rx, std::size_t i, std::size_t l,
                                std::span<const Fe> x_i, std::span<const Fe> x_il,
                                OpCount* ops = nullptr);

struct TerminalOutcome {
  bool attempted = false;
  bool all_resolved = false;
  std::vector<std::pair<std::size_t, std::size_t>> committed;
};

// Whole-frame resolution from the known symbols and the declared message
// degree: solves for the message coefficients and commits every symbol whose
// value is constant across the solution set. Symbols of blocks beyond
// time_cutoff contribute no equations (they have not arrived yet).
TerminalOutcome terminal_check_and_solve(const Gf& f, const PolyGenerator& gen, ReceivedStream& rx,
                                         std::size_t time_cutoff, OpCount* ops = nullptr);

// The low-delay decoding loop: position scan with terminal check, window
// recovery j = 0..T, state recovery with restart, and loss declaration.
DecodeReport decode(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                    const PolyGenerator& gen, const ReceivedStream& rx, const DecoderConfig& cfg);

// Big-window reference decoder: tries j = T first and shrinks on failure; no
// state recovery, no termination.
DecodeReport baseline_decode(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                             const ReceivedStream& rx, const DecoderConfig& cfg);

}  // namespace isodec
