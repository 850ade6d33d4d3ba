#include "isodec/decoder.hpp"

#include <algorithm>

namespace isodec {

std::size_t DecodeReport::lost_count() const {
  std::size_t c = 0;
  for (const auto& blk : symbols)
    for (const auto& s : blk) c += s.status == SymbolStatus::Lost;
  return c;
}

std::size_t DecodeReport::recovered_count() const {
  std::size_t c = 0;
  for (const auto& blk : symbols)
    for (const auto& s : blk) c += s.status == SymbolStatus::Recovered;
  return c;
}

namespace {

void check_stream(const StateSpace& sys, const ReceivedStream& rx) {
  if (rx.n != sys.n || rx.k != sys.k) fail(Errc::ShapeError, "stream dimensions do not match the code");
  for (const auto& blk : rx.blocks)
    if (blk.size() != rx.n) fail(Errc::ShapeError, "stream block has wrong arity");
}

struct SymRef {
  std::size_t block, comp;
  friend bool operator<(const SymRef& a, const SymRef& b) {
    return a.block != b.block ? a.block < b.block : a.comp < b.comp;
  }
  friend bool operator==(const SymRef&, const SymRef&) = default;
};

// Linear system over the erased components of blocks base..base+j (and
// optionally the state x_base): obs-row * x + Markov terms + D u - y = 0 per
// block row, knowns moved to the right-hand side.
struct WindowSystem {
  Mat a;
  std::vector<Fe> rhs;
  std::vector<SymRef> unknowns;  // after the x columns
  std::size_t x_cols = 0;
};

WindowSystem build_window_system(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                                 const ReceivedStream& rx, std::size_t base, std::size_t j,
                                 std::span<const Fe> x_known, bool x_is_unknown, OpCount* ops) {
  const std::size_t p = sys.n - sys.k;
  WindowSystem ws;
  ws.x_cols = x_is_unknown ? sys.s : 0;

  for (std::size_t t = base; t <= base + j; ++t)
    for (std::size_t c = 0; c < sys.n; ++c)
      if (!rx.blocks[t][c].known) ws.unknowns.push_back({t, c});
  auto col_of = [&](std::size_t t, std::size_t c) -> std::size_t {
    auto it = std::lower_bound(ws.unknowns.begin(), ws.unknowns.end(), SymRef{t, c});
    return ws.x_cols + static_cast<std::size_t>(it - ws.unknowns.begin());
  };

  std::size_t rows = (j + 1) * p;
  ws.a = Mat(rows, ws.x_cols + ws.unknowns.size());
  ws.rhs.assign(rows, Fe{});

  auto add_term = [&](std::size_t row, std::size_t t, std::size_t c, const Fe& coef) {
    if (f.is_zero(coef)) return;
    if (rx.blocks[t][c].known) {
      ws.rhs[row] = f.sub(ws.rhs[row], f.mul(coef, rx.blocks[t][c].value, ops));
    } else {
      std::size_t col = col_of(t, c);
      ws.a.at(row, col) = f.add(ws.a.at(row, col), coef);
    }
  };

  for (std::size_t r = 0; r <= j; ++r) {
    std::size_t t = base + r;
    const Mat& obs = cache.obs_row(r);
    for (std::size_t rr = 0; rr < p; ++rr) {
      std::size_t row = r * p + rr;
      // observability term
      if (x_is_unknown) {
        for (std::size_t c = 0; c < sys.s; ++c) ws.a.at(row, c) = obs.at(rr, c);
      } else {
        Fe acc{};
        for (std::size_t c = 0; c < sys.s; ++c) {
          if (f.is_zero(obs.at(rr, c)) || f.is_zero(x_known[c])) continue;
          acc = f.add(acc, f.mul(obs.at(rr, c), x_known[c], ops));
        }
        ws.rhs[row] = f.sub(ws.rhs[row], acc);
      }
      // -y_t
      add_term(row, t, rr, f.neg(f.one()));
      // D u_t
      for (std::size_t c = 0; c < sys.k; ++c) add_term(row, t, p + c, sys.D.at(rr, c));
      // C A^{r-1-q} B u_{base+q}
      for (std::size_t q = 0; q < r; ++q) {
        const Mat& mk = cache.markov(r - 1 - q);
        for (std::size_t c = 0; c < sys.k; ++c) add_term(row, base + q, p + c, mk.at(rr, c));
      }
    }
  }
  return ws;
}

}  // namespace

std::vector<Fe> state_from_prefix(const Gf& f, const StateSpace& sys, const ReceivedStream& rx,
                                  std::size_t i, OpCount* ops) {
  check_stream(sys, rx);
  if (i > rx.blocks.size()) fail(Errc::IndexError, "prefix exceeds stream");
  std::vector<Fe> x(sys.s);
  const std::size_t p = sys.n - sys.k;
  for (std::size_t t = 0; t < i; ++t) {
    std::vector<Fe> u(sys.k);
    for (std::size_t c = 0; c < sys.k; ++c) {
      if (!rx.blocks[t][p + c].known) fail(Errc::PrefixUnknown, "erased input inside the prefix");
      u[c] = rx.blocks[t][p + c].value;
    }
    auto ax = mat_apply(f, sys.A, x, ops);
    auto bu = mat_apply(f, sys.B, u, ops);
    for (std::size_t r = 0; r < sys.s; ++r) x[r] = f.add(ax[r], bu[r]);
  }
  return x;
}

WindowOutcome recover_window(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                             ReceivedStream& rx, std::size_t i, std::size_t j,
                             std::span<const Fe> x_i, OpCount* ops) {
  check_stream(sys, rx);
  if (i + j >= rx.blocks.size()) fail(Errc::IndexError, "window exceeds stream");
  if (x_i.size() != sys.s) fail(Errc::ShapeError, "x_i must have s components");

  WindowOutcome out;
  auto ws = build_window_system(f, sys, cache, rx, i, j, x_i, false, ops);
  auto sol = solve_determined(f, ws.a, ws.rhs, ops);
  out.mult_count = sol.mult_count;
  if (!sol.consistent) fail(Errc::IntegrityError, "window system inconsistent: corrupted stream");

  out.target_resolved = true;
  for (std::size_t idx = 0; idx < ws.unknowns.size(); ++idx) {
    bool det = sol.status[idx] == SolveOutcome::Var::Determined;
    if (det) {
      rx.blocks[ws.unknowns[idx].block][ws.unknowns[idx].comp] = ErasureSymbol::of(sol.value[idx]);
      out.committed.push_back({ws.unknowns[idx].block, ws.unknowns[idx].comp});
    } else if (ws.unknowns[idx].block == i) {
      out.target_resolved = false;
    }
  }
  return out;
}

StateOutcome recover_state(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                           ReceivedStream& rx, std::size_t i, std::size_t l, std::size_t j,
                           OpCount* ops) {
  check_stream(sys, rx);
  if (l < 1) fail(Errc::IndexError, "state recovery needs l >= 1");
  if (i + l + j >= rx.blocks.size()) fail(Errc::IndexError, "state window exceeds stream");

  StateOutcome out;
  auto ws = build_window_system(f, sys, cache, rx, i + l, j, {}, true, ops);
  auto sol = solve_determined(f, ws.a, ws.rhs, ops);
  out.mult_count = sol.mult_count;
  if (!sol.consistent) fail(Errc::IntegrityError, "state system inconsistent: corrupted stream");

  out.success = true;
  for (std::size_t c = 0; c < sys.s; ++c)
    if (sol.status[c] != SolveOutcome::Var::Determined) out.success = false;
  if (!out.success) return out;

  out.state.resize(sys.s);
  for (std::size_t c = 0; c < sys.s; ++c) out.state[c] = sol.value[c];
  for (std::size_t idx = 0; idx < ws.unknowns.size(); ++idx) {
    if (sol.status[sys.s + idx] != SolveOutcome::Var::Determined) continue;
    rx.blocks[ws.unknowns[idx].block][ws.unknowns[idx].comp] =
        ErasureSymbol::of(sol.value[sys.s + idx]);
    out.committed.push_back({ws.unknowns[idx].block, ws.unknowns[idx].comp});
  }
  return out;
}

BackfillOutcome backfill_inputs(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                                ReceivedStream& rx, std::size_t i, std::size_t l,
                                std::span<const Fe> x_i, std::span<const Fe> x_il, OpCount* ops) {
  check_stream(sys, rx);
  const std::size_t p = sys.n - sys.k;
  BackfillOutcome out;

  if (cache.ell() >= 0 && l <= static_cast<std::size_t>(cache.ell())) {
    // b = x_{i+l} - A^l x_i = R_l (u_i; ...; u_{i+l-1})
    auto al_xi = mat_apply(f, cache.apow(l), x_i, ops);
    std::vector<Fe> b(sys.s);
    for (std::size_t r = 0; r < sys.s; ++r) b[r] = f.sub(x_il[r], al_xi[r]);

    std::vector<SymRef> unknowns;
    for (std::size_t t = 0; t < l; ++t)
      for (std::size_t c = 0; c < sys.k; ++c)
        if (!rx.blocks[i + t][p + c].known) unknowns.push_back({i + t, p + c});

    Mat a(sys.s, unknowns.size());
    for (std::size_t t = 0; t < l; ++t) {
      const Mat& blk = cache.apow(l - 1 - t);
      Mat ab = mat_mul(f, blk, sys.B, ops);
      for (std::size_t c = 0; c < sys.k; ++c) {
        SymRef ref{i + t, p + c};
        if (rx.blocks[i + t][p + c].known) {
          for (std::size_t r = 0; r < sys.s; ++r)
            b[r] = f.sub(b[r], f.mul(ab.at(r, c), rx.blocks[i + t][p + c].value, ops));
        } else {
          auto it = std::lower_bound(unknowns.begin(), unknowns.end(), ref);
          std::size_t col = static_cast<std::size_t>(it - unknowns.begin());
          for (std::size_t r = 0; r < sys.s; ++r) a.at(r, col) = ab.at(r, c);
        }
      }
    }
    auto sol = solve_determined(f, a, b, ops);
    if (!sol.consistent) fail(Errc::IntegrityError, "backfill system inconsistent: corrupted stream");
    for (std::size_t idx = 0; idx < unknowns.size(); ++idx) {
      // R_l has full column rank here, so every restricted unknown is pinned.
      if (sol.status[idx] != SolveOutcome::Var::Determined)
        fail(Errc::IntegrityError, "backfill column rank defect");
      rx.blocks[unknowns[idx].block][unknowns[idx].comp] = ErasureSymbol::of(sol.value[idx]);
      out.committed.push_back({unknowns[idx].block, unknowns[idx].comp});
    }
    // outputs via y_t = C x_t + D u_t along the now-known inputs
    std::vector<Fe> x(x_i.begin(), x_i.end());
    for (std::size_t t = 0; t < l; ++t) {
      std::vector<Fe> u(sys.k);
      for (std::size_t c = 0; c < sys.k; ++c) u[c] = rx.blocks[i + t][p + c].value;
      for (std::size_t rr = 0; rr < p; ++rr) {
        if (rx.blocks[i + t][rr].known) continue;
        Fe acc{};
        for (std::size_t c = 0; c < sys.s; ++c) acc = f.add(acc, f.mul(sys.C.at(rr, c), x[c], ops));
        for (std::size_t c = 0; c < sys.k; ++c) acc = f.add(acc, f.mul(sys.D.at(rr, c), u[c], ops));
        rx.blocks[i + t][rr] = ErasureSymbol::of(acc);
        out.committed.push_back({i + t, rr});
      }
      auto ax = mat_apply(f, sys.A, x, ops);
      auto bu = mat_apply(f, sys.B, u, ops);
      for (std::size_t r = 0; r < sys.s; ++r) x[r] = f.add(ax[r], bu[r]);
    }
    out.solved = true;
  } else {
    for (std::size_t t = 0; t < l; ++t)
      for (std::size_t c = 0; c < sys.n; ++c)
        if (!rx.blocks[i + t][c].known) out.lost.push_back({i + t, c});
  }
  return out;
}

TerminalOutcome terminal_check_and_solve(const Gf& f, const PolyGenerator& gen, ReceivedStream& rx,
                                         std::size_t time_cutoff, OpCount* ops) {
  TerminalOutcome out;
  const std::size_t vars = gen.k * (rx.gamma + 1);

  std::vector<SymRef> known;
  for (std::size_t t = 0; t < rx.blocks.size() && t <= time_cutoff; ++t)
    for (std::size_t c = 0; c < gen.n; ++c)
      if (rx.blocks[t][c].known) known.push_back({t, c});
  if (known.empty()) return out;
  out.attempted = true;

  auto fill_row = [&](Mat& m, std::size_t row, std::size_t t, std::size_t c) {
    for (std::size_t i = 0; i <= gen.mu && i <= t; ++i) {
      std::size_t mt = t - i;
      if (mt > rx.gamma) continue;
      for (std::size_t jj = 0; jj < gen.k; ++jj) m.at(row, mt * gen.k + jj) = gen.g[i].at(c, jj);
    }
  };

  Mat aug(known.size(), vars + 1);
  for (std::size_t r = 0; r < known.size(); ++r) {
    fill_row(aug, r, known[r].block, known[r].comp);
    aug.at(r, vars) = rx.blocks[known[r].block][known[r].comp].value;
  }
  OpCount local;
  auto rr = rref(f, std::move(aug), &local);
  if (ops) *ops += local;
  if (!rr.pivots.empty() && rr.pivots.back() == vars)
    fail(Errc::IntegrityError, "termination system inconsistent: corrupted stream");

  std::vector<SymRef> open;
  for (std::size_t t = 0; t < rx.blocks.size(); ++t)
    for (std::size_t c = 0; c < gen.n; ++c)
      if (!rx.blocks[t][c].known) open.push_back({t, c});

  if (rr.rank == vars) {
    // message fully determined: rebuild the whole codeword
    std::vector<std::vector<Fe>> msg(rx.gamma + 1, std::vector<Fe>(gen.k));
    for (std::size_t ri = 0; ri < rr.pivots.size(); ++ri) {
      std::size_t c = rr.pivots[ri];
      msg[c / gen.k][c % gen.k] = rr.m.at(ri, vars);
    }
    auto word = encode(f, gen, msg, ops);
    for (const auto& ref : open) {
      rx.blocks[ref.block][ref.comp] = ErasureSymbol::of(word[ref.block][ref.comp]);
      out.committed.push_back({ref.block, ref.comp});
    }
    out.all_resolved = true;
    return out;
  }

  // Per-symbol resolution: a symbol is pinned when its coefficient row lies in
  // the row space of the known equations.
  std::vector<Fe> row(vars);
  for (const auto& ref : open) {
    std::fill(row.begin(), row.end(), Fe{});
    Mat tmp(1, vars);
    fill_row(tmp, 0, ref.block, ref.comp);
    for (std::size_t c = 0; c < vars; ++c) row[c] = tmp.at(0, c);

    Fe val{};
    for (std::size_t ri = 0; ri < rr.pivots.size(); ++ri) {
      std::size_t pc = rr.pivots[ri];
      if (f.is_zero(row[pc])) continue;
      Fe coef = row[pc];
      for (std::size_t c = 0; c < vars; ++c) {
        if (f.is_zero(rr.m.at(ri, c))) continue;
        row[c] = f.sub(row[c], f.mul(coef, rr.m.at(ri, c), ops));
      }
      val = f.add(val, f.mul(coef, rr.m.at(ri, vars), ops));
    }
    bool pinned = true;
    for (std::size_t c = 0; c < vars; ++c)
      if (!f.is_zero(row[c])) {
        pinned = false;
        break;
      }
    if (pinned) {
      rx.blocks[ref.block][ref.comp] = ErasureSymbol::of(val);
      out.committed.push_back({ref.block, ref.comp});
    }
  }
  out.all_resolved = out.committed.size() == open.size();
  return out;
}

namespace {

class DecodeRun {
 public:
  DecodeRun(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
            const PolyGenerator* gen, const ReceivedStream& rx, const DecoderConfig& cfg)
      : f_(f), sys_(sys), cache_(cache), gen_(gen), rx_(rx), cfg_(cfg) {
    check_stream(sys, rx_);
    N_ = rx_.blocks.size() - 1;
    rep_.n = sys.n;
    rep_.k = sys.k;
    rep_.gamma = rx.gamma;
    rep_.symbols.assign(N_ + 1, std::vector<SymbolReport>(sys.n));
    x_.assign(N_ + 2, std::nullopt);
    x_[0] = std::vector<Fe>(sys.s);
    propagate();
  }

  DecodeReport run_lowdelay() {
    int pos = -1;
    for (;;) {
      // Step 2: terminal check, then advance over blocks without erasures.
      for (;;) {
        terminal_try();
        if (unresolved_count() == 0) return finish();
        if (pos >= 0 && pos <= static_cast<int>(N_) && block_pending(pos)) break;
        if (pos > static_cast<int>(N_)) return finish();
        ++pos;
        bump_time(pos);
        propagate();
      }

      std::size_t i = static_cast<std::size_t>(pos);
      if (!x_[i]) fail(Errc::IntegrityError, "internal: base state unavailable at a pending block");

      // Steps 3-6: windows j = 0..T
      bool advanced = false;
      for (std::size_t j = 0; j <= cfg_.delay_T && i + j <= N_; ++j) {
        bump_time(i + j);
        check_budget(i, j + 1);
        rep_.counters.windows_attempted++;
        auto out = recover_window(f_, sys_, cache_, rx_, i, j, *x_[i], &rep_.ops);
        note_committed(out.committed, Route::Window);
        if (out.target_resolved) {
          rep_.counters.windows_solved++;
          rep_.events.push_back({Route::Window, i, 0, j, static_cast<std::size_t>(time_),
                                 out.committed.size()});
          advanced = true;
          break;
        }
      }
      if (advanced) {
        propagate();
        continue;
      }

      // Steps 7-11: state recovery with restart
      bool found = false;
      for (std::size_t l = 1; !found && i + l <= N_; ++l) {
        std::size_t jcap = std::min(cfg_.delay_T, N_ - i - l);
        for (std::size_t j = 0; j <= jcap; ++j) {
          bump_time(i + l + j);
          check_budget(i + l, j + 1);
          rep_.counters.state_attempts++;
          auto st = recover_state(f_, sys_, cache_, rx_, i, l, j, &rep_.ops);
          if (!st.success) continue;
          rep_.counters.state_recoveries++;
          x_[i + l] = st.state;
          note_committed(st.committed, Route::StateRecovery);
          rep_.events.push_back({Route::StateRecovery, i, l, j, static_cast<std::size_t>(time_),
                                 st.committed.size()});

          auto bf = backfill_inputs(f_, sys_, cache_, rx_, i, l, *x_[i], st.state, &rep_.ops);
          if (bf.solved) {
            rep_.counters.backfill_solves++;
            note_committed(bf.committed, Route::Backfill);
            rep_.events.push_back({Route::Backfill, i, l, 0, static_cast<std::size_t>(time_),
                                   bf.committed.size()});
          } else {
            for (const auto& [bt, bc] : bf.lost) mark_lost(bt, bc);
          }
          pos = static_cast<int>(i + l) - 1;
          found = true;
          break;
        }
      }
      if (!found) {
        // Stream exhausted without a restart point: remaining erasures from i
        // on are lost; a final terminal attempt still sees the whole stream.
        bump_time(N_);
        for (std::size_t t = i; t <= N_; ++t)
          for (std::size_t c = 0; c < sys_.n; ++c)
            if (!rx_.blocks[t][c].known && rep_.symbols[t][c].status != SymbolStatus::Lost)
              mark_lost(t, c);
        pos = static_cast<int>(N_) + 1;
      }
      propagate();
    }
  }

  DecodeReport run_baseline() {
    for (std::size_t i = 0; i <= N_; ++i) {
      bump_time(i);
      if (!block_pending(i)) {
        propagate();
        continue;
      }
      if (x_[i]) {
        std::size_t jmax = std::min(cfg_.delay_T, N_ - i);
        for (std::size_t jj = 0; jj <= jmax; ++jj) {
          std::size_t j = jmax - jj;  // largest window first
          bump_time(i + j);
          check_budget(i, j + 1);
          rep_.counters.windows_attempted++;
          auto out = recover_window(f_, sys_, cache_, rx_, i, j, *x_[i], &rep_.ops);
          note_committed(out.committed, Route::Window);
          if (out.target_resolved) {
            rep_.counters.windows_solved++;
            rep_.events.push_back({Route::Window, i, 0, j, static_cast<std::size_t>(time_),
                                   out.committed.size()});
            break;
          }
        }
      }
      for (std::size_t c = 0; c < sys_.n; ++c)
        if (!rx_.blocks[i][c].known && rep_.symbols[i][c].status != SymbolStatus::Lost)
          mark_lost(i, c);
      propagate();
    }
    return finish();
  }

 private:
  bool block_pending(int t) const {
    for (std::size_t c = 0; c < sys_.n; ++c)
      if (!rx_.blocks[static_cast<std::size_t>(t)][c].known &&
          rep_.symbols[static_cast<std::size_t>(t)][c].status != SymbolStatus::Lost)
        return true;
    return false;
  }

  void check_budget(std::size_t base, std::size_t span) const {
    std::size_t rows = span * (sys_.n - sys_.k);
    std::size_t unknowns = sys_.s;
    for (std::size_t t = base; t < base + span; ++t)
      for (std::size_t c = 0; c < sys_.n; ++c) unknowns += !rx_.blocks[t][c].known;
    if (rows * (unknowns + 1) > cfg_.solve_budget)
      fail(Errc::BudgetExceeded, "window solve exceeds the configured budget");
  }

  std::size_t unresolved_count() const {
    std::size_t c = 0;
    for (std::size_t t = 0; t <= N_; ++t)
      for (std::size_t cc = 0; cc < sys_.n; ++cc) c += !rx_.blocks[t][cc].known;
    return c;
  }

  void bump_time(std::size_t t) { time_ = std::max(time_, static_cast<int>(t)); }

  void propagate() {
    for (std::size_t t = 0; t <= N_; ++t) {
      if (!x_[t] || x_[t + 1]) continue;
      std::vector<Fe> u(sys_.k);
      bool full = true;
      for (std::size_t c = 0; c < sys_.k; ++c) {
        const auto& s = rx_.blocks[t][sys_.n - sys_.k + c];
        if (!s.known) {
          full = false;
          break;
        }
        u[c] = s.value;
      }
      if (!full) continue;
      auto ax = mat_apply(f_, sys_.A, *x_[t], &rep_.ops);
      auto bu = mat_apply(f_, sys_.B, u, &rep_.ops);
      std::vector<Fe> nx(sys_.s);
      for (std::size_t r = 0; r < sys_.s; ++r) nx[r] = f_.add(ax[r], bu[r]);
      x_[t + 1] = std::move(nx);
    }
  }

  void note_committed(const std::vector<std::pair<std::size_t, std::size_t>>& committed,
                      Route route) {
    for (const auto& [t, c] : committed) {
      auto& s = rep_.symbols[t][c];
      if (s.status == SymbolStatus::Lost) s.was_lost = true;
      s.status = SymbolStatus::Recovered;
      s.route = route;
      s.resolved_at = time_;
      s.delay = time_ - static_cast<int>(t);
    }
  }

  void mark_lost(std::size_t t, std::size_t c) {
    auto& s = rep_.symbols[t][c];
    s.status = SymbolStatus::Lost;
    s.resolved_at = time_;
    s.delay = 0;
  }

  void terminal_try() {
    if (!gen_ || time_ < 0) return;
    bool lost_exists = false;
    for (std::size_t t = 0; t <= N_ && !lost_exists; ++t)
      for (std::size_t c = 0; c < sys_.n; ++c)
        if (rep_.symbols[t][c].status == SymbolStatus::Lost && !rx_.blocks[t][c].known) {
          lost_exists = true;
          break;
        }
    bool gate = lost_exists;
    if (!gate && static_cast<std::size_t>(time_) == N_) {
      // all inputs known, outputs still missing: trailing backfill
      bool u_unknown = false, y_open = false;
      for (std::size_t t = 0; t <= N_; ++t)
        for (std::size_t c = 0; c < sys_.n; ++c)
          if (!rx_.blocks[t][c].known) {
            if (c >= sys_.n - sys_.k)
              u_unknown = true;
            else
              y_open = true;
          }
      gate = !u_unknown && y_open;
    }
    if (!gate) return;

    // Re-attempt only when the knowledge actually grew.
    std::size_t knowns = 0;
    for (std::size_t t = 0; t <= std::min(static_cast<std::size_t>(time_), N_); ++t)
      for (std::size_t c = 0; c < sys_.n; ++c) knowns += rx_.blocks[t][c].known;
    if (time_ == last_terminal_time_ && knowns == last_terminal_knowns_) return;
    // Before the stream ends, a solve is only worthwhile once the equations
    // can pin the whole message; the final attempt is unconditional.
    if (static_cast<std::size_t>(time_) < N_ && knowns < gen_->k * (rx_.gamma + 1)) return;
    last_terminal_time_ = time_;
    last_terminal_knowns_ = knowns;

    rep_.counters.terminal_attempts++;

    // With every input known the remaining outputs follow directly from the
    // output equation along the state trajectory; no solve is needed.
    bool all_u_known = static_cast<std::size_t>(time_) == N_;
    for (std::size_t t = 0; t <= N_ && all_u_known; ++t)
      for (std::size_t c = sys_.n - sys_.k; c < sys_.n; ++c)
        all_u_known = all_u_known && rx_.blocks[t][c].known;
    if (all_u_known) {
      propagate();
      std::vector<std::pair<std::size_t, std::size_t>> committed;
      for (std::size_t t = 0; t <= N_; ++t) {
        std::vector<Fe> u(sys_.k);
        for (std::size_t c = 0; c < sys_.k; ++c) u[c] = rx_.blocks[t][sys_.n - sys_.k + c].value;
        for (std::size_t rr = 0; rr < sys_.n - sys_.k; ++rr) {
          if (rx_.blocks[t][rr].known) continue;
          Fe acc{};
          for (std::size_t c = 0; c < sys_.s; ++c)
            acc = f_.add(acc, f_.mul(sys_.C.at(rr, c), (*x_[t])[c], &rep_.ops));
          for (std::size_t c = 0; c < sys_.k; ++c)
            acc = f_.add(acc, f_.mul(sys_.D.at(rr, c), u[c], &rep_.ops));
          rx_.blocks[t][rr] = ErasureSymbol::of(acc);
          committed.push_back({t, rr});
        }
      }
      if (!committed.empty()) {
        rep_.counters.termination_used = true;
        note_committed(committed, Route::Terminal);
        rep_.events.push_back({Route::Terminal, static_cast<std::size_t>(time_), 0, 0,
                               static_cast<std::size_t>(time_), committed.size()});
      }
      return;
    }

    auto out = terminal_check_and_solve(f_, *gen_, rx_, static_cast<std::size_t>(time_), &rep_.ops);
    if (!out.committed.empty()) {
      rep_.counters.termination_used = true;
      note_committed(out.committed, Route::Terminal);
      rep_.events.push_back({Route::Terminal, static_cast<std::size_t>(time_), 0, 0,
                             static_cast<std::size_t>(time_), out.committed.size()});
      propagate();
    }
  }

  DecodeReport finish() {
    for (std::size_t t = 0; t <= N_; ++t)
      for (std::size_t c = 0; c < sys_.n; ++c)
        if (!rx_.blocks[t][c].known && rep_.symbols[t][c].status != SymbolStatus::Lost)
          mark_lost(t, c);
    rep_.stream_out.assign(N_ + 1, std::vector<Fe>(sys_.n));
    rep_.known_out.assign(N_ + 1, std::vector<bool>(sys_.n, false));
    for (std::size_t t = 0; t <= N_; ++t)
      for (std::size_t c = 0; c < sys_.n; ++c)
        if (rx_.blocks[t][c].known) {
          rep_.stream_out[t][c] = rx_.blocks[t][c].value;
          rep_.known_out[t][c] = true;
        }
    return std::move(rep_);
  }

  const Gf& f_;
  const StateSpace& sys_;
  const StructuralCache& cache_;
  const PolyGenerator* gen_;
  ReceivedStream rx_;
  DecoderConfig cfg_;
  std::size_t N_ = 0;
  std::vector<std::optional<std::vector<Fe>>> x_;
  DecodeReport rep_;
  int time_ = -1;
  int last_terminal_time_ = -2;
  std::size_t last_terminal_knowns_ = 0;
};

}  // namespace

DecodeReport decode(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                    const PolyGenerator& gen, const ReceivedStream& rx, const DecoderConfig& cfg) {
  DecodeRun run(f, sys, cache, &gen, rx, cfg);
  return run.run_lowdelay();
}

DecodeReport baseline_decode(const Gf& f, const StateSpace& sys, const StructuralCache& cache,
                             const ReceivedStream& rx, const DecoderConfig& cfg) {
  DecodeRun run(f, sys, cache, nullptr, rx, cfg);
  return run.run_baseline();
}

}  // namespace isodec
