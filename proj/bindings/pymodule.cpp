#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "isodec/iofmt.hpp"
#include "isodec/verify.hpp"

namespace py = pybind11;
using namespace isodec;

namespace {

LoadedCode load(const std::string& spec_json) { return read_code_spec(spec_json); }

std::string py_gen_example_spec() {
  ExampleCode ex = build_example_code();
  return write_code_spec(ex.field, 5, 3, 2, 1, 1, &ex.gen, &ex.sys);
}

std::string py_encode(const std::string& spec_json, const std::string& message_text) {
  LoadedCode code = load(spec_json);
  Blocks msg = parse_message(code.field, message_text);
  Frame fr = make_frame(code.field, code.gen, msg);
  return write_stream(code.field, stream_from_blocks(code.field, fr.encoded, code.k, fr.gamma));
}

std::string py_erase(const std::string& spec_json, const std::string& stream_text,
                     std::uint64_t seed, double p_erase_y, double p_erase_u) {
  LoadedCode code = load(spec_json);
  ReceivedStream in = parse_stream(code.field, stream_text);
  Frame fr;
  fr.gamma = in.gamma;
  fr.message.assign(in.gamma + 1, std::vector<Fe>(code.k));
  fr.encoded.assign(in.blocks.size(), std::vector<Fe>(in.n));
  for (std::size_t t = 0; t < in.blocks.size(); ++t)
    for (std::size_t c = 0; c < in.n; ++c) {
      if (!in.blocks[t][c].known) fail(Errc::PatternError, "stream already contains erasures");
      fr.encoded[t][c] = in.blocks[t][c].value;
    }
  ReceivedStream rx = apply_channel(fr, ChannelModel::iid_split(p_erase_y, p_erase_u, seed));
  return write_stream(code.field, rx);
}

py::tuple py_decode(const std::string& spec_json, const std::string& stream_text, long delay,
                    bool baseline) {
  LoadedCode code = load(spec_json);
  ReceivedStream rx = parse_stream(code.field, stream_text);
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
  return py::make_tuple(write_stream(code.field, outstream), report_to_json(rep, cfg));
}

std::string py_simulate(const std::string& spec_json, std::size_t trials, std::uint64_t seed,
                        double p_erase, long delay, long gamma) {
  LoadedCode code = load(spec_json);
  std::size_t g = gamma >= 0 ? static_cast<std::size_t>(gamma) : 3;
  std::size_t T = delay >= 0 ? static_cast<std::size_t>(delay) : code.T;
  StructuralCache cache(code.field, code.sys, g + code.gen.mu + code.sys.s + 2);
  TrialStats st = run_experiment(code.field, code.sys, cache, code.gen,
                                 ChannelModel::iid(p_erase, seed), trials, g, T);
  return stats_to_json(st);
}

std::string py_inspect(const std::string& spec_json) {
  LoadedCode code = load(spec_json);
  CodeProfile prof = profile(code.field, code.gen);
  QualityReport q = quality_report(code.field, code.sys, code.T, 3);
  return profile_to_json(prof, q);
}

std::vector<std::tuple<std::string, bool, std::string>> py_verify_example() {
  ExampleVerification v = verify_example();
  std::vector<std::tuple<std::string, bool, std::string>> out;
  for (const auto& c : v.checks) out.emplace_back(c.name, c.pass, c.detail);
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Erasure decoding of convolutional codes via their linear-systems representation";

  py::register_exception<Error>(m, "IsodecError");

  m.def("gen_example_spec", &py_gen_example_spec,
        "Code-spec JSON for the worked (5,3,2) code over GF(2^331)");
  m.def("encode", &py_encode, py::arg("spec_json"), py::arg("message_text"),
        "Encode a message file body into a stream file body");
  m.def("erase", &py_erase, py::arg("spec_json"), py::arg("stream_text"), py::arg("seed"),
        py::arg("p_erase_y"), py::arg("p_erase_u"),
        "Pass a clean stream through a seeded iid erasure channel");
  m.def("decode", &py_decode, py::arg("spec_json"), py::arg("stream_text"), py::arg("delay") = -1,
        py::arg("baseline") = false,
        "Recover erasures; returns (recovered_stream_text, report_json)");
  m.def("simulate", &py_simulate, py::arg("spec_json"), py::arg("trials"), py::arg("seed"),
        py::arg("p_erase"), py::arg("delay") = -1, py::arg("gamma") = -1,
        "Aggregate decoder comparison over random trials; returns stats JSON");
  m.def("inspect", &py_inspect, py::arg("spec_json"),
        "Code profile and quality report as JSON");
  m.def("verify_example", &py_verify_example,
        "Reproduce the worked example; returns (name, pass, detail) per check");
}
