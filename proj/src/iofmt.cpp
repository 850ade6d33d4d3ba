#include "isodec/iofmt.hpp"

#include <sstream>

#include "json.hpp"

namespace isodec {

namespace {

using ojson = nlohmann::ordered_json;

ojson mat_to_json(const Gf& f, const Mat& m) {
  ojson rows = ojson::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    ojson row = ojson::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(f.to_hex(m.at(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat mat_from_json(const Gf& f, const ojson& j, std::size_t rows, std::size_t cols,
                  const char* what) {
  if (!j.is_array() || j.size() != rows)
    fail(Errc::ParseError, std::string(what) + ": expected " + std::to_string(rows) + " rows");
  Mat m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto& row = j[r];
    if (!row.is_array() || row.size() != cols)
      fail(Errc::ParseError, std::string(what) + ": expected " + std::to_string(cols) + " columns");
    for (std::size_t c = 0; c < cols; ++c) m.at(r, c) = f.from_hex(row[c].get<std::string>());
  }
  return m;
}

std::string modulus_hex(const FieldSpec& spec) {
  // bit i = coefficient of x^i, big-endian hex
  std::string out((spec.m + 1 + 3) / 4, '0');
  static const char* hexd = "0123456789abcdef";
  for (unsigned d = 0; d < out.size(); ++d) {
    unsigned v = 0;
    for (unsigned b = 0; b < 4; ++b) {
      unsigned bit = 4 * d + b;
      if (bit < spec.modulus.size() && spec.modulus[bit]) v |= 1u << b;
    }
    out[out.size() - 1 - d] = hexd[v];
  }
  return out;
}

std::vector<std::uint64_t> modulus_from_hex(const std::string& s, unsigned m) {
  std::vector<std::uint64_t> coeffs(m + 1, 0);
  for (std::size_t i = 0; i < s.size(); ++i) {
    char c = s[s.size() - 1 - i];
    int v = c >= '0' && c <= '9'   ? c - '0'
            : c >= 'a' && c <= 'f' ? c - 'a' + 10
            : c >= 'A' && c <= 'F' ? c - 'A' + 10
                                   : -1;
    if (v < 0) fail(Errc::ParseError, "bad hex digit in modulus");
    for (unsigned b = 0; b < 4; ++b) {
      unsigned bit = static_cast<unsigned>(4 * i + b);
      if ((v >> b) & 1) {
        if (bit > m) fail(Errc::ParseError, "modulus bit above degree m");
        coeffs[bit] = 1;
      }
    }
  }
  return coeffs;
}

std::string field_ref(const Gf& f) {
  return "gf(" + std::to_string(f.characteristic()) + "^" + std::to_string(f.degree()) + ")";
}

ojson field_to_json(const Gf& f) {
  const FieldSpec& spec = f.spec();
  ojson out;
  out["p"] = spec.p;
  out["m"] = spec.m;
  if (spec.p == 2)
    out["modulus_hex"] = modulus_hex(spec);
  else
    out["modulus_coeffs"] = spec.modulus;
  out["generator"] = spec.generator_hex;
  return out;
}

Gf field_from_json(const ojson& j) {
  FieldSpec spec;
  spec.p = j.at("p").get<std::uint64_t>();
  spec.m = j.at("m").get<unsigned>();
  if (j.contains("modulus_hex"))
    spec.modulus = modulus_from_hex(j.at("modulus_hex").get<std::string>(), spec.m);
  else
    spec.modulus = j.at("modulus_coeffs").get<std::vector<std::uint64_t>>();
  spec.generator_hex = j.at("generator").get<std::string>();
  return Gf(spec);
}

[[noreturn]] void parse_fail(std::size_t line, std::size_t col, const std::string& what) {
  fail(Errc::ParseError,
       "line " + std::to_string(line) + ", column " + std::to_string(col) + ": " + what);
}

struct LineTokens {
  std::vector<std::string> tokens;
  std::vector<std::size_t> cols;  // 1-based column of each token
};

LineTokens tokenize(const std::string& line) {
  LineTokens lt;
  std::size_t i = 0;
  while (i < line.size()) {
    if (line[i] == ' ' || line[i] == '\t' || line[i] == '\r') {
      ++i;
      continue;
    }
    std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    lt.tokens.push_back(line.substr(start, i - start));
    lt.cols.push_back(start + 1);
  }
  return lt;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) lines.push_back(cur);
  return lines;
}

// header tokens of the form key=value
std::string header_value(const LineTokens& lt, std::size_t line_no, const std::string& key) {
  for (std::size_t i = 1; i < lt.tokens.size(); ++i) {
    const std::string& t = lt.tokens[i];
    if (t.size() > key.size() + 1 && t.compare(0, key.size(), key) == 0 && t[key.size()] == '=')
      return t.substr(key.size() + 1);
  }
  parse_fail(line_no, 1, "missing header field '" + key + "'");
}

std::size_t to_size(const std::string& s, std::size_t line, std::size_t col) {
  std::size_t out = 0;
  if (s.empty()) parse_fail(line, col, "empty number");
  for (char c : s) {
    if (c < '0' || c > '9') parse_fail(line, col, "bad number '" + s + "'");
    out = out * 10 + static_cast<std::size_t>(c - '0');
  }
  return out;
}

void check_field_ref(const Gf& f, const std::string& ref, std::size_t line_no) {
  if (ref != field_ref(f))
    parse_fail(line_no, 1, "field reference '" + ref + "' does not match " + field_ref(f));
}

const char* route_name(Route r) {
  switch (r) {
    case Route::None: return "none";
    case Route::Window: return "window";
    case Route::StateRecovery: return "state";
    case Route::Backfill: return "backfill";
    case Route::Terminal: return "terminal";
  }
  return "none";
}

const char* status_name(SymbolStatus s) {
  switch (s) {
    case SymbolStatus::ReceivedClean: return "clean";
    case SymbolStatus::Recovered: return "recovered";
    case SymbolStatus::Lost: return "lost";
  }
  return "clean";
}

ojson aggregate_to_json(const DecoderAggregate& a) {
  ojson out;
  out["symbols"] = a.symbols;
  out["erased"] = a.erased;
  out["received_clean"] = a.received_clean;
  out["recovered"] = a.recovered;
  out["lost"] = a.lost;
  out["negative_delay_symbols"] = a.negative_delay_symbols;
  out["negative_delay_blocks"] = a.negative_delay_blocks;
  out["delay_sum"] = a.delay_sum;
  out["delay_count"] = a.delay_count;
  out["mean_delay_milli"] = a.delay_count ? a.delay_sum * 1000 / static_cast<std::int64_t>(a.delay_count) : 0;
  out["max_delay"] = a.max_delay;
  ojson hist;
  for (const auto& [d, c] : a.delay_histogram) hist[std::to_string(d)] = c;
  out["delay_histogram"] = std::move(hist);
  out["mul"] = a.mul;
  out["inv"] = a.inv;
  out["windows_solved"] = a.windows_solved;
  out["state_recoveries"] = a.state_recoveries;
  out["terminal_symbols"] = a.terminal_symbols;
  out["rescued"] = a.rescued;
  out["frames_fully_recovered"] = a.frames_fully_recovered;
  return out;
}

}  // namespace

std::string write_code_spec(const Gf& f, std::size_t n, std::size_t k, std::size_t delta,
                            std::optional<std::size_t> L, std::optional<std::size_t> T,
                            const PolyGenerator* gen, const StateSpace* sys) {
  ojson out;
  out["format"] = "isodec-code-spec-v1";
  out["field"] = field_to_json(f);
  out["n"] = n;
  out["k"] = k;
  out["delta"] = delta;
  if (L) out["L"] = *L;
  if (T) out["T"] = *T;
  if (gen) {
    ojson gj;
    gj["mu"] = gen->mu;
    ojson coeffs = ojson::array();
    for (const Mat& gi : gen->g) coeffs.push_back(mat_to_json(f, gi));
    gj["coeffs"] = std::move(coeffs);
    out["generator_matrix"] = std::move(gj);
  }
  if (sys) {
    ojson sj;
    sj["s"] = sys->s;
    sj["A"] = mat_to_json(f, sys->A);
    sj["B"] = mat_to_json(f, sys->B);
    sj["C"] = mat_to_json(f, sys->C);
    sj["D"] = mat_to_json(f, sys->D);
    out["system"] = std::move(sj);
  }
  return out.dump(2) + "\n";
}

LoadedCode read_code_spec(const std::string& text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("code spec: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "isodec-code-spec-v1")
      fail(Errc::ParseError, "unsupported code-spec format");
    LoadedCode code{field_from_json(j.at("field")), 0, 0, 0, 0, 0, {}, {}, false, false};
    code.n = j.at("n").get<std::size_t>();
    code.k = j.at("k").get<std::size_t>();
    code.delta = j.at("delta").get<std::size_t>();

    if (j.contains("generator_matrix")) {
      const auto& gj = j.at("generator_matrix");
      code.gen.n = code.n;
      code.gen.k = code.k;
      code.gen.mu = gj.at("mu").get<std::size_t>();
      const auto& coeffs = gj.at("coeffs");
      if (!coeffs.is_array() || coeffs.size() != code.gen.mu + 1)
        fail(Errc::ParseError, "generator matrix: expected mu+1 coefficient blocks");
      for (std::size_t i = 0; i <= code.gen.mu; ++i)
        code.gen.g.push_back(mat_from_json(code.field, coeffs[i], code.n, code.k, "generator"));
      validate_generator(code.field, code.gen);
      code.had_gen = true;
    }
    if (j.contains("system")) {
      const auto& sj = j.at("system");
      code.sys.n = code.n;
      code.sys.k = code.k;
      code.sys.s = sj.at("s").get<std::size_t>();
      code.sys.A = mat_from_json(code.field, sj.at("A"), code.sys.s, code.sys.s, "A");
      code.sys.B = mat_from_json(code.field, sj.at("B"), code.sys.s, code.sys.k, "B");
      code.sys.C = mat_from_json(code.field, sj.at("C"), code.n - code.k, code.sys.s, "C");
      code.sys.D = mat_from_json(code.field, sj.at("D"), code.n - code.k, code.sys.k, "D");
      validate_system(code.sys);
      code.had_sys = true;
    }
    if (!code.had_gen && !code.had_sys)
      fail(Errc::ParseError, "code spec carries neither a generator nor a system");
    if (!code.had_sys) code.sys = realize(code.field, code.gen);
    if (!code.had_gen) code.gen = generator_of(code.field, code.sys);

    if (code.had_gen && code.had_sys) {
      // cross-validation: encoded words must be valid trajectories
      Rng rng(0x15D0C0DEULL);
      for (int trial = 0; trial < 8; ++trial) {
        Frame fr = random_frame(code.field, code.gen, 3, rng);
        if (!membership_check(code.field, code.sys, fr.encoded))
          fail(Errc::ParseError, "generator and system disagree (membership suite failed)");
      }
    }
    std::size_t delta_chk = code_degree(code.field, code.gen);
    if (delta_chk != code.delta)
      fail(Errc::ParseError, "declared delta " + std::to_string(code.delta) +
                                 " does not match the code (computed " + std::to_string(delta_chk) + ")");
    std::size_t L_default = code.k < code.n ? mdp_window_L(code.n, code.k, code.delta) : 0;
    code.L = j.contains("L") ? j.at("L").get<std::size_t>() : L_default;
    code.T = j.contains("T") ? j.at("T").get<std::size_t>() : code.L;
    return code;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("code spec: ") + e.what());
  }
}

std::string write_stream(const Gf& f, const ReceivedStream& rx) {
  std::ostringstream out;
  out << "isodec-stream n=" << rx.n << " k=" << rx.k << " gamma=" << rx.gamma
      << " field=" << field_ref(f) << "\n";
  for (const auto& blk : rx.blocks) {
    for (std::size_t c = 0; c < blk.size(); ++c) {
      if (c) out << ' ';
      if (blk[c].known)
        out << f.to_hex(blk[c].value);
      else
        out << '*';
    }
    out << "\n";
  }
  return out.str();
}

ReceivedStream parse_stream(const Gf& f, const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) fail(Errc::ParseError, "line 1, column 1: empty stream file");
  auto hdr = tokenize(lines[0]);
  if (hdr.tokens.empty() || hdr.tokens[0] != "isodec-stream")
    parse_fail(1, 1, "expected 'isodec-stream' header");
  ReceivedStream rx;
  rx.n = to_size(header_value(hdr, 1, "n"), 1, 1);
  rx.k = to_size(header_value(hdr, 1, "k"), 1, 1);
  rx.gamma = to_size(header_value(hdr, 1, "gamma"), 1, 1);
  check_field_ref(f, header_value(hdr, 1, "field"), 1);
  if (rx.k == 0 || rx.k >= rx.n) parse_fail(1, 1, "header needs 1 <= k < n");

  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto lt = tokenize(lines[li]);
    if (lt.tokens.empty()) continue;
    std::vector<ErasureSymbol> blk(rx.n);
    if (lt.tokens.size() != rx.n)
      parse_fail(li + 1, 1,
                 "expected " + std::to_string(rx.n) + " tokens, found " + std::to_string(lt.tokens.size()));
    for (std::size_t c = 0; c < rx.n; ++c) {
      if (lt.tokens[c] == "*") {
        blk[c] = ErasureSymbol::erased();
      } else {
        try {
          blk[c] = ErasureSymbol::of(f.from_hex(lt.tokens[c]));
        } catch (const Error&) {
          parse_fail(li + 1, lt.cols[c], "bad element token '" + lt.tokens[c] + "'");
        }
      }
    }
    rx.blocks.push_back(std::move(blk));
  }
  return rx;
}

ReceivedStream stream_from_blocks(const Gf& f, const Blocks& blocks, std::size_t k, std::size_t gamma) {
  ReceivedStream rx;
  rx.n = blocks.empty() ? 0 : blocks[0].size();
  rx.k = k;
  rx.gamma = gamma;
  for (const auto& blk : blocks) {
    std::vector<ErasureSymbol> out(blk.size());
    for (std::size_t c = 0; c < blk.size(); ++c) out[c] = ErasureSymbol::of(blk[c]);
    rx.blocks.push_back(std::move(out));
  }
  (void)f;
  return rx;
}

std::string write_message(const Gf& f, const Blocks& msg) {
  std::ostringstream out;
  std::size_t k = msg.empty() ? 0 : msg[0].size();
  out << "isodec-message k=" << k << " gamma=" << (msg.size() - 1) << " field=" << field_ref(f)
      << "\n";
  for (const auto& blk : msg) {
    for (std::size_t c = 0; c < blk.size(); ++c) {
      if (c) out << ' ';
      out << f.to_hex(blk[c]);
    }
    out << "\n";
  }
  return out.str();
}

Blocks parse_message(const Gf& f, const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) fail(Errc::ParseError, "line 1, column 1: empty message file");
  auto hdr = tokenize(lines[0]);
  if (hdr.tokens.empty() || hdr.tokens[0] != "isodec-message")
    parse_fail(1, 1, "expected 'isodec-message' header");
  std::size_t k = to_size(header_value(hdr, 1, "k"), 1, 1);
  std::size_t gamma = to_size(header_value(hdr, 1, "gamma"), 1, 1);
  check_field_ref(f, header_value(hdr, 1, "field"), 1);

  Blocks msg;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto lt = tokenize(lines[li]);
    if (lt.tokens.empty()) continue;
    if (lt.tokens.size() != k)
      parse_fail(li + 1, 1, "expected " + std::to_string(k) + " tokens");
    std::vector<Fe> blk(k);
    for (std::size_t c = 0; c < k; ++c) {
      try {
        blk[c] = f.from_hex(lt.tokens[c]);
      } catch (const Error&) {
        parse_fail(li + 1, lt.cols[c], "bad element token '" + lt.tokens[c] + "'");
      }
    }
    msg.push_back(std::move(blk));
  }
  if (msg.size() != gamma + 1) fail(Errc::ParseError, "message block count does not match gamma");
  return msg;
}

std::string write_mask(const std::vector<std::vector<bool>>& mask) {
  std::ostringstream out;
  out << "isodec-mask n=" << (mask.empty() ? 0 : mask[0].size()) << " blocks=" << mask.size() << "\n";
  for (const auto& blk : mask) {
    for (std::size_t c = 0; c < blk.size(); ++c) {
      if (c) out << ' ';
      out << (blk[c] ? '*' : '.');
    }
    out << "\n";
  }
  return out.str();
}

std::vector<std::vector<bool>> parse_mask(const std::string& text) {
  auto lines = split_lines(text);
  if (lines.empty()) fail(Errc::ParseError, "line 1, column 1: empty mask file");
  auto hdr = tokenize(lines[0]);
  if (hdr.tokens.empty() || hdr.tokens[0] != "isodec-mask")
    parse_fail(1, 1, "expected 'isodec-mask' header");
  std::size_t n = to_size(header_value(hdr, 1, "n"), 1, 1);

  std::vector<std::vector<bool>> mask;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    auto lt = tokenize(lines[li]);
    if (lt.tokens.empty()) continue;
    if (lt.tokens.size() != n) parse_fail(li + 1, 1, "expected " + std::to_string(n) + " tokens");
    std::vector<bool> blk(n);
    for (std::size_t c = 0; c < n; ++c) {
      if (lt.tokens[c] == "*")
        blk[c] = true;
      else if (lt.tokens[c] == ".")
        blk[c] = false;
      else
        parse_fail(li + 1, lt.cols[c], "mask token must be '.' or '*'");
    }
    mask.push_back(std::move(blk));
  }
  return mask;
}

std::string report_to_json(const DecodeReport& rep, const DecoderConfig& cfg) {
  ojson out;
  out["format"] = "isodec-report-v1";
  out["decoder"] = cfg.baseline ? "baseline" : "lowdelay";
  out["n"] = rep.n;
  out["k"] = rep.k;
  out["gamma"] = rep.gamma;
  out["delay_T"] = cfg.delay_T;
  out["fully_recovered"] = rep.fully_recovered();
  out["lost"] = rep.lost_count();
  out["recovered"] = rep.recovered_count();
  ojson counters;
  counters["windows_attempted"] = rep.counters.windows_attempted;
  counters["windows_solved"] = rep.counters.windows_solved;
  counters["state_attempts"] = rep.counters.state_attempts;
  counters["state_recoveries"] = rep.counters.state_recoveries;
  counters["backfill_solves"] = rep.counters.backfill_solves;
  counters["terminal_attempts"] = rep.counters.terminal_attempts;
  counters["termination_used"] = rep.counters.termination_used;
  counters["mul"] = rep.ops.mul;
  counters["inv"] = rep.ops.inv;
  out["counters"] = std::move(counters);
  ojson events = ojson::array();
  for (const auto& e : rep.events) {
    ojson ev;
    ev["route"] = route_name(e.route);
    ev["pos"] = e.pos;
    ev["l"] = e.l;
    ev["j"] = e.j;
    ev["time"] = e.time;
    ev["symbols"] = e.symbols;
    events.push_back(std::move(ev));
  }
  out["events"] = std::move(events);
  ojson syms = ojson::array();
  for (std::size_t t = 0; t < rep.symbols.size(); ++t)
    for (std::size_t c = 0; c < rep.symbols[t].size(); ++c) {
      const auto& s = rep.symbols[t][c];
      ojson sj;
      sj["block"] = t;
      sj["comp"] = c;
      sj["status"] = status_name(s.status);
      if (s.status == SymbolStatus::Recovered) {
        sj["route"] = route_name(s.route);
        sj["was_lost"] = s.was_lost;
        sj["resolved_at"] = s.resolved_at;
        sj["delay"] = s.delay;
      }
      syms.push_back(std::move(sj));
    }
  out["symbols"] = std::move(syms);
  return out.dump(2) + "\n";
}

std::string stats_to_json(const TrialStats& st) {
  ojson out;
  out["format"] = "isodec-stats-v1";
  out["trials"] = st.trials;
  out["gamma"] = st.gamma;
  out["delay_T"] = st.delay_T;
  out["seed"] = st.seed;
  out["lowdelay"] = aggregate_to_json(st.lowdelay);
  out["baseline"] = aggregate_to_json(st.baseline);
  ojson cmp;
  cmp["common_recovered"] = st.common_count;
  cmp["common_delay_sum_lowdelay"] = st.common_delay_lowdelay;
  cmp["common_delay_sum_baseline"] = st.common_delay_baseline;
  out["comparison"] = std::move(cmp);
  return out.dump(2) + "\n";
}

std::string profile_to_json(const CodeProfile& prof, const QualityReport& quality) {
  ojson out;
  out["format"] = "isodec-profile-v1";
  out["n"] = prof.n;
  out["k"] = prof.k;
  out["delta"] = prof.delta;
  out["L"] = prof.L;
  out["column_degrees"] = prof.column_degrees;
  out["column_reduced"] = prof.column_reduced;
  out["noncatastrophic"] = prof.noncatastrophic;
  out["mdp"] = prof.mdp;
  ojson q;
  q["T"] = quality.T;
  q["gamma"] = quality.gamma;
  q["ell"] = quality.ell;
  q["property1"] = quality.property1;
  q["property2"] = quality.property2;
  q["e_subsets_tested"] = quality.e_subsets_tested;
  q["e_subsets_independent"] = quality.e_subsets_independent;
  out["quality"] = std::move(q);
  return out.dump(2) + "\n";
}

}  // namespace isodec
