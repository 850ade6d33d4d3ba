#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "isodec/iofmt.hpp"
#include "isodec/verify.hpp"

namespace {

using namespace isodec;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::ParseError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::ParseError, "cannot write '" + path + "'");
  out << content;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty() || out_path == "-")
    std::cout << content;
  else
    spit(out_path, content);
}

int cmd_gen_example(const std::string& out_path) {
  ExampleCode ex = build_example_code();
  std::string spec = write_code_spec(ex.field, 5, 3, 2, 1, 1, &ex.gen, &ex.sys);
  emit(out_path, spec);
  return 0;
}

int cmd_encode(const std::string& spec_path, const std::string& msg_path, const std::string& out_path) {
  LoadedCode code = read_code_spec(slurp(spec_path));
  Blocks msg = parse_message(code.field, slurp(msg_path));
  Frame fr = make_frame(code.field, code.gen, msg);
  ReceivedStream rx = stream_from_blocks(code.field, fr.encoded, code.k, fr.gamma);
  emit(out_path, write_stream(code.field, rx));
  return 0;
}

struct ChannelArgs {
  std::uint64_t seed = 1;
  double p_erase = -1.0;
  double p_erase_y = -1.0;
  double p_erase_u = -1.0;
  std::vector<double> burst;  // g2b, b2g, p_bad
  std::string pattern_path;

  ChannelModel build() const {
    if (!pattern_path.empty()) return ChannelModel::from_pattern(parse_mask(slurp(pattern_path)));
    if (!burst.empty()) {
      if (burst.size() != 3) fail(Errc::PatternError, "--burst needs g2b,b2g,p_bad");
      return ChannelModel::burst(burst[0], burst[1], burst[2], seed);
    }
    double py = p_erase_y >= 0 ? p_erase_y : (p_erase >= 0 ? p_erase : 0.0);
    double pu = p_erase_u >= 0 ? p_erase_u : (p_erase >= 0 ? p_erase : 0.0);
    return ChannelModel::iid_split(py, pu, seed);
  }
};

int cmd_erase(const std::string& spec_path, const std::string& stream_path, const ChannelArgs& ch,
              const std::string& out_path) {
  LoadedCode code = read_code_spec(slurp(spec_path));
  ReceivedStream in = parse_stream(code.field, slurp(stream_path));
  // reuse the channel machinery by treating the parsed stream as ground truth
  Frame fr;
  fr.gamma = in.gamma;
  fr.message.assign(in.gamma + 1, std::vector<Fe>(code.k));
  fr.encoded.assign(in.blocks.size(), std::vector<Fe>(in.n));
  for (std::size_t t = 0; t < in.blocks.size(); ++t)
    for (std::size_t c = 0; c < in.n; ++c) {
      if (!in.blocks[t][c].known)
        fail(Errc::PatternError, "input stream to erase already contains erasures");
      fr.encoded[t][c] = in.blocks[t][c].value;
    }
  ReceivedStream rx = apply_channel(fr, ch.build());
  emit(out_path, write_stream(code.field, rx));
  return 0;
}

int cmd_decode(const std::string& spec_path, const std::string& stream_path, long delay,
               bool baseline, const std::string& out_path, const std::string& report_path) {
  LoadedCode code = read_code_spec(slurp(spec_path));
  ReceivedStream rx = parse_stream(code.field, slurp(stream_path));
  if (rx.blocks.size() != rx.gamma + code.gen.mu + 1)
    fail(Errc::ParseError, "stream block count does not match gamma + mu + 1");

  DecoderConfig cfg;
  cfg.delay_T = delay >= 0 ? static_cast<std::size_t>(delay) : code.T;
  cfg.baseline = baseline;
  StructuralCache cache(code.field, code.sys, rx.blocks.size() + code.sys.s + 1);
  DecodeReport rep = baseline ? baseline_decode(code.field, code.sys, cache, rx, cfg)
                              : decode(code.field, code.sys, cache, code.gen, rx, cfg);

  ReceivedStream outstream;
  outstream.n = rx.n;
  outstream.k = rx.k;
  outstream.gamma = rx.gamma;
  outstream.blocks.assign(rep.stream_out.size(), std::vector<ErasureSymbol>(rx.n));
  for (std::size_t t = 0; t < rep.stream_out.size(); ++t)
    for (std::size_t c = 0; c < rx.n; ++c)
      outstream.blocks[t][c] = rep.known_out[t][c] ? ErasureSymbol::of(rep.stream_out[t][c])
                                                   : ErasureSymbol::erased();
  emit(out_path, write_stream(code.field, outstream));
  if (!report_path.empty()) spit(report_path, report_to_json(rep, cfg));
  std::cerr << (baseline ? "baseline" : "lowdelay") << ": " << rep.recovered_count()
            << " recovered, " << rep.lost_count() << " lost, " << rep.ops.mul
            << " multiplications\n";
  return rep.fully_recovered() ? 0 : 1;
}

int cmd_simulate(const std::string& spec_path, std::size_t trials, std::uint64_t seed,
                 double p_erase, long delay, long gamma, const std::string& out_path) {
  LoadedCode code = read_code_spec(slurp(spec_path));
  std::size_t g = gamma >= 0 ? static_cast<std::size_t>(gamma) : 3;
  std::size_t T = delay >= 0 ? static_cast<std::size_t>(delay) : code.T;
  StructuralCache cache(code.field, code.sys, g + code.gen.mu + code.sys.s + 2);
  ChannelModel model = ChannelModel::iid(p_erase, seed);
  TrialStats st = run_experiment(code.field, code.sys, cache, code.gen, model, trials, g, T);
  emit(out_path, stats_to_json(st));
  return 0;
}

int cmd_verify_example() {
  ExampleVerification v = verify_example();
  for (const auto& c : v.checks) {
    std::cout << (c.pass ? "PASS" : "FAIL") << "  " << c.name;
    if (!c.detail.empty()) std::cout << "  (" << c.detail << ")";
    std::cout << "\n";
  }
  std::cout << (v.all_pass() ? "PASS" : "FAIL") << "  example verification ("
            << v.checks.size() << " checks)\n";
  return v.all_pass() ? 0 : 1;
}

int cmd_inspect(const std::string& spec_path, const std::string& out_path) {
  LoadedCode code = read_code_spec(slurp(spec_path));
  CodeProfile prof = profile(code.field, code.gen);
  QualityReport q = quality_report(code.field, code.sys, code.T, 3);
  emit(out_path, profile_to_json(prof, q));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Erasure decoding of convolutional codes via their linear-systems representation"};
  app.require_subcommand(1);

  std::string out_path, report_path, spec_path, stream_path, msg_path;
  long delay = -1, gamma = -1;
  bool baseline = false;
  std::size_t trials = 1000;
  double p_erase = 0.05;
  ChannelArgs ch;

  auto* gen_example = app.add_subcommand("gen-example", "write the worked (5,3,2) code spec");
  gen_example->add_option("--out", out_path, "output file (default stdout)");

  auto* enc = app.add_subcommand("encode", "encode a message file into a stream file");
  enc->add_option("spec", spec_path, "code spec file")->required();
  enc->add_option("message", msg_path, "message file")->required();
  enc->add_option("--out", out_path, "output stream file");

  auto* ers = app.add_subcommand("erase", "pass a stream through an erasure channel");
  ers->add_option("spec", spec_path, "code spec file")->required();
  ers->add_option("stream", stream_path, "stream file")->required();
  ers->add_option("--seed", ch.seed, "channel seed");
  ers->add_option("--p-erase", ch.p_erase, "iid erasure probability");
  ers->add_option("--p-erase-y", ch.p_erase_y, "iid erasure probability for y components");
  ers->add_option("--p-erase-u", ch.p_erase_u, "iid erasure probability for u components");
  ers->add_option("--burst", ch.burst, "gilbert-elliott g2b,b2g,p_bad")->expected(3);
  ers->add_option("--pattern", ch.pattern_path, "explicit mask file");
  ers->add_option("--out", out_path, "output stream file");

  auto* dec = app.add_subcommand("decode", "recover erasures in a stream");
  dec->add_option("spec", spec_path, "code spec file")->required();
  dec->add_option("stream", stream_path, "received stream file")->required();
  dec->add_option("--delay", delay, "max decoding delay T (default from spec)");
  dec->add_flag("--baseline", baseline, "use the big-window reference decoder");
  dec->add_option("--out", out_path, "recovered stream file");
  dec->add_option("--report", report_path, "decode report (json)");

  auto* sim = app.add_subcommand("simulate", "aggregate decoder comparison over random trials");
  sim->add_option("spec", spec_path, "code spec file")->required();
  sim->add_option("--trials", trials, "number of trials");
  sim->add_option("--seed", ch.seed, "base seed");
  sim->add_option("--p-erase", p_erase, "iid erasure probability");
  sim->add_option("--delay", delay, "max decoding delay T");
  sim->add_option("--gamma", gamma, "message degree per frame (default 3)");
  sim->add_option("--out", out_path, "stats file (json)");

  app.add_subcommand("verify-example", "reproduce the worked example end to end");

  auto* ins = app.add_subcommand("inspect", "print code profile and quality report");
  ins->add_option("spec", spec_path, "code spec file")->required();
  ins->add_option("--out", out_path, "output file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("gen-example")) return cmd_gen_example(out_path);
    if (app.got_subcommand("encode")) return cmd_encode(spec_path, msg_path, out_path);
    if (app.got_subcommand("erase")) return cmd_erase(spec_path, stream_path, ch, out_path);
    if (app.got_subcommand("decode"))
      return cmd_decode(spec_path, stream_path, delay, baseline, out_path, report_path);
    if (app.got_subcommand("simulate"))
      return cmd_simulate(spec_path, trials, ch.seed, p_erase, delay, gamma, out_path);
    if (app.got_subcommand("verify-example")) return cmd_verify_example();
    if (app.got_subcommand("inspect")) return cmd_inspect(spec_path, out_path);
  } catch (const isodec::Error& e) {
    std::cerr << "error [" << isodec::errc_name(e.code()) << "]: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
