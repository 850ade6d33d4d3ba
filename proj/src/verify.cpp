#include "isodec/verify.hpp"

#include <algorithm>
#include <sstream>

#include "isodec/structured.hpp"

namespace isodec {

ExampleCode build_example_code() {
  Gf f(default_example_field());
  StateSpace sys = construct_example_532(f);
  PolyGenerator gen = generator_of(f, sys);
  return {std::move(f), std::move(sys), std::move(gen)};
}

std::vector<std::vector<bool>> example_pattern() {
  std::vector<std::vector<bool>> mask(5, std::vector<bool>(5, false));
  mask[0][0] = mask[0][1] = true;                // y_0
  mask[1][0] = mask[1][1] = mask[1][2] = true;   // y_1 and u_1[0]
  mask[2][0] = mask[2][1] = true;                // y_2
  mask[4].assign(5, true);                       // v_4 entirely
  return mask;
}

namespace {

void check(ExampleVerification& out, const std::string& name, bool pass,
           const std::string& detail = "") {
  out.checks.push_back({name, pass, detail});
}

std::string fmt_count(std::size_t total, std::size_t trivial, std::size_t nonzero) {
  std::ostringstream os;
  os << total << " full-size minors, " << trivial << " trivially zero, " << nonzero
     << " verified nonzero";
  return os.str();
}

}  // namespace

ExampleVerification verify_example(std::uint64_t message_seed) {
  ExampleVerification out;
  ExampleCode ex = build_example_code();
  const Gf& f = ex.field;
  auto ap = [&](std::uint64_t e) { return f.pow(f.generator(), e); };

  // Closed forms of B and A.
  {
    Mat bexp(2, 3);
    bexp.at(0, 0) = f.one();
    bexp.at(1, 1) = f.one();
    bexp.at(0, 2) = f.neg(f.mul(ap(32), f.add(ap(8), f.one())));
    bexp.at(1, 2) = f.mul(ap(16), f.add(f.add(ap(16), ap(8)), f.one()));
    check(out, "B matches its closed form", ex.sys.B == bexp);

    Fe den = f.inv(f.sub(ap(8), f.one()));
    Mat aexp(2, 2);
    aexp.at(0, 0) = f.mul(den, f.sub(ap(64), ap(112)));
    aexp.at(0, 1) = f.mul(den, f.sub(ap(128), ap(240)));
    aexp.at(1, 0) = f.mul(den, f.sub(ap(104), ap(48)));
    aexp.at(1, 1) = f.mul(den, f.sub(ap(232), ap(112)));
    check(out, "A matches its closed form", ex.sys.A == aexp);
  }

  StructuralCache cache(f, ex.sys, 12);

  // F_1 is the lower-right 4x6 of the 4x8 display matrix [C D 0; CA CB D].
  Mat display(4, 8);
  {
    const std::uint64_t top[2][8] = {{8, 16, 1, 2, 4, 0, 0, 0}, {16, 32, 2, 4, 8, 0, 0, 0}};
    const std::uint64_t bot[2][8] = {{64, 128, 8, 16, 32, 1, 2, 4}, {128, 256, 16, 32, 64, 2, 4, 8}};
    for (std::size_t c = 0; c < 8; ++c) {
      for (std::size_t r = 0; r < 2; ++r) {
        display.at(r, c) = top[r][c] ? ap(top[r][c]) : Fe{};
        display.at(2 + r, c) = bot[r][c] ? ap(bot[r][c]) : Fe{};
      }
    }
    Mat f1 = cache.f_matrix(1);
    Mat expect(4, 6);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 3; ++c) {
        expect.at(r, c) = display.at(r, 2 + c);          // D
        expect.at(2 + r, c) = display.at(2 + r, 2 + c);  // CB
        expect.at(2 + r, 3 + c) = display.at(2 + r, 5 + c);  // D
      }
    check(out, "F_1 equals the lower-right 4x6 of the display matrix", f1 == expect);
    Mat assembled = mat_hcat(cache.obs_stack(1), f1);
    check(out, "[obs | F_1] reproduces the 4x8 display matrix", assembled == display);
  }

  // Superregularity of the display matrix: full-size minors.
  {
    StructuredMatrix pat(4, 8);
    pat.place(0, 0, 0, 2, 2);  // C
    pat.place(1, 2, 0, 2, 2);  // CA
    pat.place(2, 0, 2, 2, 3);  // D
    pat.place(3, 2, 2, 2, 3);  // CB
    pat.place(2, 2, 5, 2, 3);  // D repeat
    const Gf& cls = classifier_field();
    auto inst = pat.random_instances(8, 0x5EED5EEDULL, cls);
    std::size_t total = 0, trivial = 0, nonzero = 0;
    std::vector<std::size_t> rows = {0, 1, 2, 3};
    std::vector<std::size_t> cols = {0, 1, 2, 3};
    do {
      ++total;
      if (StructuredMatrix::minor_trivially_zero(cls, inst, rows, cols)) {
        ++trivial;
        continue;
      }
      if (!f.is_zero(minor_det(f, display, rows, cols))) ++nonzero;
    } while (next_combination(cols, 8));
    check(out, "display matrix is superregular at full size",
          total == 70 && trivial == 5 && nonzero == 65, fmt_count(total, trivial, nonzero));
  }

  check(out, "F_1 certificate: system represents an MDP code", is_mdp_system(f, ex.sys));
  check(out, "system is reachable and observable",
        kalman_reachable(f, ex.sys) && kalman_observable(f, ex.sys));

  // Generator shape: column degrees {1,1,0}, mu = 1, delta = 2.
  {
    auto cd = column_degrees_and_reduced(f, ex.gen);
    std::vector<std::size_t> degs = cd.degs;
    std::sort(degs.begin(), degs.end());
    bool degs_ok = degs == std::vector<std::size_t>{0, 1, 1};
    check(out, "generator has column degrees {1,1,0} and mu = 1",
          degs_ok && cd.reduced && ex.gen.mu == 1);
    check(out, "code degree is 2", code_degree(f, ex.gen) == 2);
    check(out, "generator-side MDP minor criterion agrees", mdp_check_minors(f, ex.gen));
    check(out, "generator is non-catastrophic", is_noncatastrophic(f, ex.gen));
  }

  // Structural constants: R_1 = B is 2x3, so ell = -1.
  check(out, "ell = -1 (B has more columns than rows)", cache.ell() == -1);

  {
    QualityReport q = quality_report(f, ex.sys, 1, 3, 60, 7);
    check(out, "properties 1 and 2 hold for j = 1",
          q.property1.size() == 1 && q.property1[0] && q.property2.size() == 1 && q.property2[0]);
  }

  // Decode narrative at T = 1 on the received table.
  {
    Rng rng(message_seed);
    Frame fr = random_frame(f, ex.gen, 3, rng);
    ReceivedStream rx = apply_channel(fr, ChannelModel::from_pattern(example_pattern()));
    DecoderConfig cfg{1, false, 1u << 24};
    DecodeReport rep = decode(f, ex.sys, cache, ex.gen, rx, cfg);
    verify_against_truth(fr, rep, message_seed);

    check(out, "whole sequence recovered", rep.fully_recovered());
    auto sym = [&](std::size_t t, std::size_t c) -> const SymbolReport& { return rep.symbols[t][c]; };
    check(out, "y_0 recovered by a j=0 window with delay 0",
          sym(0, 0).status == SymbolStatus::Recovered && sym(0, 0).route == Route::Window &&
              sym(0, 0).delay == 0 && sym(0, 1).delay == 0 && rep.counters.windows_solved == 1);

    bool state_event = false;
    for (const auto& e : rep.events)
      if (e.route == Route::StateRecovery && e.pos == 1 && e.l == 1 && e.j == 1) state_event = true;
    check(out, "x_2 and y_2 via state recovery at i = l = 1",
          state_event && sym(2, 0).route == Route::StateRecovery && sym(2, 0).delay == 1 &&
              sym(2, 1).route == Route::StateRecovery && sym(2, 1).delay == 1 &&
              rep.counters.state_recoveries == 1);

    bool lost_then_terminal = true;
    for (std::size_t c : {0u, 1u, 2u}) {
      const auto& s = sym(1, c);
      lost_then_terminal = lost_then_terminal && s.status == SymbolStatus::Recovered && s.was_lost &&
                           s.route == Route::Terminal && s.delay == 2 && s.resolved_at == 3;
    }
    check(out, "y_1 and u_1[0] declared lost, then recovered by termination at time 3",
          lost_then_terminal);

    bool future = true;
    for (std::size_t c = 0; c < 5; ++c) {
      const auto& s = sym(4, c);
      future = future && s.status == SymbolStatus::Recovered && s.route == Route::Terminal &&
               s.delay == -1 && s.resolved_at == 3;
    }
    check(out, "u_4 and y_4 recovered at time 3, one step before they were sent (delay -1)",
          future && rep.counters.termination_used);

    DecoderConfig bcfg{1, true, 1u << 24};
    DecodeReport brep = baseline_decode(f, ex.sys, cache, rx, bcfg);
    verify_against_truth(fr, brep, message_seed);
    check(out, "big-window reference recovers y_0 only at delay 1",
          brep.symbols[0][0].status == SymbolStatus::Recovered && brep.symbols[0][0].delay == 1 &&
              brep.symbols[0][1].delay == 1);
    check(out, "low-delay decoder strictly dominates the reference on this pattern",
          rep.lost_count() == 0 && brep.lost_count() == 10);
  }

  return out;
}

}  // namespace isodec
