// fusepeel command line: fuse/ER hypergraph generation, peeling, Monte Carlo
// peelability sweeps, threshold certificates, survival traces and the XOR
// retrieval structure. CSV or JSON on stdout (or --out); errors are a JSON
// object on stderr. Exit codes: 0 ok, 2 usage, 3 build failed, 4 capacity,
// 5 I/O.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fusepeel/errors.hpp"
#include "fusepeel/hash.hpp"
#include "fusepeel/hypergraph.hpp"
#include "fusepeel/peel.hpp"
#include "fusepeel/retrieval.hpp"
#include "fusepeel/rng.hpp"
#include "fusepeel/threshold.hpp"

namespace {

using json = nlohmann::json;
using namespace fusepeel;

// Seeds for the synthetic key generator and the documented default value
// function value(key) = low r bits of murmur3_x64_128(key, kValueSeed).lo.
constexpr std::uint64_t kSyntheticSeed = 0x53594e54;  // "SYNT"
constexpr std::uint64_t kValueSeed = 0x56414c5545;    // "VALUE"

// ---------------------------------------------------------------------------
// Tabular output. Cells are JSON scalars so CSV and JSON render numbers with
// identical digits. Column names containing "timing" are wall-clock readings
// and excluded from the byte-for-byte determinism guarantee.

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<json>> rows;

  void add_row(std::vector<json> cells) { rows.push_back(std::move(cells)); }
};

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string cell_to_csv(const json& v) {
  if (v.is_null()) return "";
  if (v.is_string()) return csv_escape(v.get<std::string>());
  return v.dump();
}

void write_table(std::ostream& out, const Table& t,
                 const std::string& format) {
  if (format == "json") {
    json arr = json::array();
    for (const auto& row : t.rows) {
      json obj = json::object();
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        obj[t.columns[i]] = i < row.size() ? row[i] : json();
      }
      arr.push_back(std::move(obj));
    }
    out << arr.dump(2) << '\n';
    return;
  }
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out << ',';
    out << csv_escape(t.columns[i]);
  }
  out << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << cell_to_csv(row[i]);
    }
    out << '\n';
  }
}

void emit_table(const Table& t, const std::string& format,
                const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    write_table(std::cout, t, format);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw IoError("cannot open output file: " + out_path);
  write_table(f, t, format);
  if (!f.good()) throw IoError("write failed: " + out_path);
}

// ---------------------------------------------------------------------------

struct CommonOpts {
  std::string format = "csv";
  std::string out_path;
  unsigned threads = 1;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_threads = true) {
  cmd->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}))
      ->capture_default_str();
  cmd->add_option("--out", o.out_path, "Output path (default stdout)");
  if (with_threads) {
    cmd->add_option("--threads", o.threads,
                    "Worker threads for independent trials "
                    "(FUSEPEEL_THREADS overrides)")
        ->check(CLI::PositiveNumber);
  }
}

unsigned effective_threads(unsigned from_flag) {
  if (const char* env = std::getenv("FUSEPEEL_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v >= 1 && v <= 4096) return unsigned(v);
  }
  return from_flag;
}

// Runs `trials` independent jobs over a bounded pool; results are indexed by
// trial, so output order is schedule-independent.
template <typename Fn>
void run_trials(std::uint64_t trials, unsigned threads, Fn&& fn) {
  if (threads <= 1 || trials <= 1) {
    for (std::uint64_t t = 0; t < trials; ++t) fn(t);
    return;
  }
  std::atomic<std::uint64_t> next{0};
  std::vector<std::thread> pool;
  const unsigned n = unsigned(std::min<std::uint64_t>(threads, trials));
  pool.reserve(n);
  for (unsigned w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::uint64_t t = next.fetch_add(1);
        if (t >= trials) return;
        fn(t);
      }
    });
  }
  for (auto& th : pool) th.join();
}

std::vector<std::string> load_keys(const std::string& source) {
  if (source.rfind("synthetic:", 0) == 0) {
    const std::uint64_t count = std::stoull(source.substr(10));
    std::vector<std::string> keys;
    keys.reserve(count);
    char buf[32];
    for (std::uint64_t i = 0; i < count; ++i) {
      std::snprintf(buf, sizeof buf, "synth-%016llx",
                    (unsigned long long)mix2(kSyntheticSeed, i));
      keys.emplace_back(buf);
    }
    return keys;
  }
  std::ifstream f(source, std::ios::binary);
  if (!f) throw IoError("cannot open key file: " + source);
  std::vector<std::string> keys;
  std::string line;
  while (std::getline(f, line)) {
    keys.push_back(line);
  }
  return keys;
}

std::uint64_t default_value(const std::string& key, std::uint32_t r_bits) {
  const std::uint64_t mask =
      r_bits == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << r_bits) - 1;
  return murmur3_x64_128(key, kValueSeed).lo & mask;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// ---------------------------------------------------------------------------
// gen

struct GenOpts {
  std::string family = "fuse";
  std::uint32_t k = 3;
  double c = 0.9;
  std::uint64_t ell = 1;
  std::uint64_t n = 1;
  std::uint64_t m = 0;
  std::uint64_t seed = 0;
  bool with_replacement = false;
  std::string out_path;
};

int cmd_gen(const GenOpts& o) {
  Hypergraph h = [&] {
    if (o.family == "fuse") {
      return generate_fuse({o.k, o.c, o.ell, o.n, o.seed});
    }
    const std::uint64_t m =
        o.m ? o.m : std::uint64_t(std::llround(o.c * double(o.n)));
    return generate_er(o.k, o.n, m, o.seed,
                       o.with_replacement ? VertexSampling::with_replacement
                                          : VertexSampling::distinct);
  }();
  if (o.out_path.empty() || o.out_path == "-") {
    write_graph(std::cout, h);
  } else {
    std::ofstream f(o.out_path, std::ios::binary);
    if (!f) throw IoError("cannot open output file: " + o.out_path);
    write_graph(f, h);
    if (!f.good()) throw IoError("write failed: " + o.out_path);
  }
  return 0;
}

// ---------------------------------------------------------------------------
// peel

int cmd_peel(const std::string& in_path, const std::string& mode,
             const CommonOpts& common) {
  Hypergraph h = [&] {
    if (in_path.empty() || in_path == "-") return read_graph(std::cin);
    std::ifstream f(in_path, std::ios::binary);
    if (!f) throw IoError("cannot open graph file: " + in_path);
    return read_graph(f);
  }();
  const PeelResult r = mode == "rounds" ? peel_rounds(h) : peel_sequential(h);
  Table t;
  t.columns = {"mode",   "vertices",      "edges",      "peelable",
               "rounds", "core_vertices", "core_edges", "work"};
  t.add_row({mode, h.num_vertices(), h.num_edges(), r.peelable(), r.rounds,
             r.core_vertices.size(), r.core_edges.size(), r.work});
  emit_table(t, common.format, common.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// mc-peel

struct McOpts {
  std::string family = "fuse";
  std::uint32_t k = 3;
  double c = 0.9;
  std::uint64_t ell = 1;
  std::uint64_t n = 1000;
  std::uint64_t trials = 20;
  std::uint64_t seed = 0;
};

int cmd_mc_peel(const McOpts& o, const CommonOpts& common) {
  struct TrialRow {
    bool peelable;
    std::uint64_t rounds, core_v, core_e;
  };
  std::vector<TrialRow> results(o.trials);
  run_trials(o.trials, effective_threads(common.threads),
             [&](std::uint64_t t) {
               const std::uint64_t seed = mix2(o.seed, t);
               const Hypergraph h =
                   o.family == "fuse"
                       ? generate_fuse({o.k, o.c, o.ell, o.n, seed})
                       : generate_er(
                             o.k, o.n,
                             std::uint64_t(std::llround(o.c * double(o.n))),
                             seed);
               const PeelResult r = peel_rounds(h);
               results[t] = {r.peelable(), r.rounds, r.core_vertices.size(),
                             r.core_edges.size()};
             });

  Table t;
  t.columns = {"row",           "trial",      "peelable",      "rounds",
               "core_vertices", "core_edges", "peel_fraction", "mean_rounds"};
  std::uint64_t peeled = 0;
  double round_sum = 0;
  for (std::uint64_t i = 0; i < o.trials; ++i) {
    const TrialRow& r = results[i];
    peeled += r.peelable;
    round_sum += double(r.rounds);
    t.add_row({"trial", i, r.peelable, r.rounds, r.core_v, r.core_e, nullptr,
               nullptr});
  }
  t.add_row({"summary", nullptr, nullptr, nullptr, nullptr, nullptr,
             o.trials ? double(peeled) / double(o.trials) : 0.0,
             o.trials ? round_sum / double(o.trials) : 0.0});
  emit_table(t, common.format, common.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// threshold

struct ThresholdOpts {
  std::uint32_t k = 3;
  std::int64_t window_d = 50;
  double tol = 1e-4;
  std::uint64_t max_iter = 100000000;
  std::string trace_path;
  std::uint64_t trace_stride = 1;
  std::vector<double> erode_at;
  std::vector<double> consolidate_at;
  std::string precision = "double";
};

const char* verdict_name(IterationVerdict v) {
  switch (v) {
    case IterationVerdict::verified: return "verified";
    case IterationVerdict::stationary: return "stationary";
    case IterationVerdict::iteration_limit: return "iteration-limit";
  }
  return "?";
}

int cmd_threshold(const ThresholdOpts& o, const CommonOpts& common) {
  if (o.k < 3) throw std::invalid_argument("threshold: k must be >= 3");
  const Precision prec =
      o.precision == "extended" ? Precision::extended : Precision::f64;

  Table trace;
  trace.columns = {"side", "c", "r", "probe"};
  const bool tracing = !o.trace_path.empty();
  auto tracer = [&](const char* side, double c) -> IterationTrace {
    if (!tracing) return {};
    return [&trace, side, c, stride = o.trace_stride](std::uint64_t r,
                                                      double probe) {
      if (r % stride == 0) trace.add_row({side, c, r, probe});
    };
  };

  Table t;
  if (!o.erode_at.empty() || !o.consolidate_at.empty()) {
    t.columns = {"check", "c", "verdict", "iterations", "probe", "target"};
    for (double c : o.erode_at) {
      const auto cert = erosion_check(o.k, c, o.window_d, o.max_iter,
                                      tracer("erosion", c), prec);
      t.add_row({"erosion", c, verdict_name(cert.verdict), cert.iterations,
                 cert.probe, cert.target});
    }
    for (double c : o.consolidate_at) {
      const auto cert = consolidation_check(o.k, c, o.window_d, o.max_iter,
                                            tracer("consolidation", c), prec);
      t.add_row({"consolidation", c, verdict_name(cert.verdict),
                 cert.iterations, cert.probe, cert.target});
    }
  } else {
    const ThresholdBracket br =
        bracket_threshold(o.k, o.window_d, o.max_iter, o.tol);
    t.columns = {"k",           "lower",        "upper",
                 "width",       "lower_cert_R", "upper_cert_R",
                 "iterations_used", "converged",
                 "ref_b_k",     "ref_c_star_k", "ref_B_k"};
    const auto ref = reference_row(o.k);
    t.add_row({br.k, br.lower, br.upper, br.upper - br.lower,
               br.lower_cert_iterations, br.upper_cert_iterations,
               br.iterations_used, br.converged,
               ref ? json(ref->b_k) : json(),
               ref ? json(ref->c_star_k) : json(),
               ref ? json(ref->B_k) : json()});
  }

  if (tracing) {
    std::ofstream f(o.trace_path, std::ios::binary);
    if (!f) throw IoError("cannot open trace file: " + o.trace_path);
    write_table(f, trace, "csv");
    if (!f.good()) throw IoError("write failed: " + o.trace_path);
  }
  emit_table(t, common.format, common.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// survival

struct SurvivalOpts {
  std::uint32_t k = 3;
  double c = 0.9;
  std::uint64_t ell = 20;
  std::uint64_t n = 10000;
  std::uint64_t r_max = 5;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
};

int cmd_survival(const SurvivalOpts& o, const CommonOpts& common) {
  const std::uint64_t segments = o.ell + o.k - 1;
  std::vector<std::vector<std::vector<double>>> rooted_per_trial(o.trials);
  std::vector<std::vector<std::vector<double>>> round_per_trial(o.trials);
  run_trials(o.trials, effective_threads(common.threads),
             [&](std::uint64_t t) {
               const Hypergraph h =
                   generate_fuse({o.k, o.c, o.ell, o.n, mix2(o.seed, t)});
               rooted_per_trial[t] = rooted_segment_survival(h, o.r_max);
               const PeelResult res = peel_rounds(h);
               auto& rows = round_per_trial[t];
               rows.resize(o.r_max + 1);
               for (std::uint64_t r = 0; r <= o.r_max; ++r) {
                 rows[r] = segment_survival(
                     res, std::min<std::uint64_t>(r, res.rounds));
               }
             });

  Table t;
  t.columns = {"r",     "segment",        "rooted_survival", "round_survival",
               "p_iterate", "phat_iterate", "abs_gap"};
  for (std::uint64_t r = 0; r <= o.r_max; ++r) {
    const auto analytic = p_iterate_ones(o.k, o.c, o.ell, r);
    const SupportFn phat = phat_iterate_ones(o.k, o.c, o.ell, r);
    for (std::uint64_t i = 0; i < segments; ++i) {
      double rooted = 0, rounds = 0;
      for (std::uint64_t tr = 0; tr < o.trials; ++tr) {
        rooted += rooted_per_trial[tr][r][i];
        rounds += round_per_trial[tr][r][i];
      }
      rooted /= double(o.trials);
      rounds /= double(o.trials);
      t.add_row({r, i, rooted, rounds, analytic[i],
                 phat.at(std::int64_t(i)), std::abs(rooted - analytic[i])});
    }
  }
  emit_table(t, common.format, common.out_path);
  return 0;
}

// ---------------------------------------------------------------------------
// retrieval build | query | bench

struct RetrievalOpts {
  std::string keys_source;
  std::uint32_t bits = 1;
  std::uint32_t k = 3;
  double c = 0.910;
  std::uint64_t ell = 100;
  std::uint64_t seed = 0;
  std::uint32_t max_retries = 100;
};

RetrievalParams to_params(const RetrievalOpts& o) {
  return RetrievalParams{o.k, o.c, o.ell, o.bits, o.max_retries, o.seed};
}

int cmd_retrieval_build(const RetrievalOpts& o, const std::string& struct_path,
                        const CommonOpts& common) {
  const auto keys = load_keys(o.keys_source);
  std::vector<std::uint64_t> values(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    values[i] = default_value(keys[i], o.bits);
  }
  BuildStats stats;
  const auto t0 = std::chrono::steady_clock::now();
  const RetrievalStructure s =
      build_retrieval(keys, values, to_params(o), &stats);
  const double build_us = std::chrono::duration<double, std::micro>(
                              std::chrono::steady_clock::now() - t0)
                              .count();

  const auto bytes = serialize(s);
  if (!struct_path.empty()) {
    std::ofstream f(struct_path, std::ios::binary);
    if (!f) throw IoError("cannot open structure file: " + struct_path);
    f.write(reinterpret_cast<const char*>(bytes.data()),
            std::streamsize(bytes.size()));
    if (!f.good()) throw IoError("write failed: " + struct_path);
  }

  Table t;
  t.columns = {"m",        "n",            "cells",
               "attempts", "raw_overhead", "serialized_overhead",
               "bytes",    "build_timing_us_per_key"};
  t.add_row({s.num_keys(), s.segment_size(), s.num_cells(), stats.attempts,
             raw_overhead(s), serialized_overhead(s), bytes.size(),
             keys.empty() ? 0.0 : build_us / double(keys.size())});
  emit_table(t, common.format, common.out_path);
  return 0;
}

RetrievalStructure load_structure(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open structure file: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(f)),
                                  std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

int cmd_retrieval_query(const std::string& struct_path,
                        const std::vector<std::string>& keys,
                        const std::string& keys_source,
                        const CommonOpts& common) {
  const RetrievalStructure s = load_structure(struct_path);
  Table t;
  t.columns = {"key", "value"};
  for (const std::string& key : keys) {
    t.add_row({key, s.query(key)});
  }
  if (!keys_source.empty()) {
    for (const std::string& key : load_keys(keys_source)) {
      t.add_row({key, s.query(key)});
    }
  }
  emit_table(t, common.format, common.out_path);
  return 0;
}

int cmd_retrieval_bench(const RetrievalOpts& o, std::uint64_t trials,
                        const CommonOpts& common) {
  const auto keys = load_keys(o.keys_source);
  std::vector<std::uint64_t> values(keys.size());
  for (std::size_t i = 0; i < keys.size(); ++i) {
    values[i] = default_value(keys[i], o.bits);
  }

  Table t;
  t.columns = {"row",
               "trial",
               "attempts",
               "raw_overhead",
               "serialized_overhead",
               "build_timing_us_per_key",
               "query_timing_ns_per_key",
               "query_errors"};
  std::vector<double> build_us, query_ns, raw, ser;
  std::vector<double> attempts;
  volatile std::uint64_t sink = 0;
  for (std::uint64_t trial = 0; trial < trials; ++trial) {
    RetrievalParams params = to_params(o);
    params.seed = mix2(o.seed, trial);
    BuildStats stats;
    const auto t0 = std::chrono::steady_clock::now();
    const RetrievalStructure s = build_retrieval(keys, values, params, &stats);
    const auto t1 = std::chrono::steady_clock::now();
    std::uint64_t errors = 0;
    std::uint64_t acc = 0;
    for (std::size_t i = 0; i < keys.size(); ++i) {
      const std::uint64_t got = s.query(keys[i]);
      acc ^= got;
      errors += got != values[i];
    }
    sink = acc;
    const auto t2 = std::chrono::steady_clock::now();

    const double m = keys.empty() ? 1.0 : double(keys.size());
    const double bu =
        std::chrono::duration<double, std::micro>(t1 - t0).count() / m;
    const double qn =
        std::chrono::duration<double, std::nano>(t2 - t1).count() / m;
    build_us.push_back(bu);
    query_ns.push_back(qn);
    raw.push_back(raw_overhead(s));
    ser.push_back(serialized_overhead(s));
    attempts.push_back(double(stats.attempts));
    t.add_row({"trial", trial, stats.attempts, raw.back(), ser.back(), bu, qn,
               errors});
  }
  (void)sink;
  if (trials > 0) {
    t.add_row({"median", nullptr, median(attempts), median(raw), median(ser),
               median(build_us), median(query_ns), nullptr});
  }
  emit_table(t, common.format, common.out_path);
  return 0;
}

// ---------------------------------------------------------------------------

void emit_error(int code, const char* kind, const std::string& message) {
  json obj{{"error",
            {{"exit_code", code}, {"kind", kind}, {"message", message}}}};
  std::cerr << obj.dump() << '\n';
}

int run(int argc, char** argv) {
  CLI::App app{"fuse-graph peeling toolkit"};
  app.require_subcommand(1);

  GenOpts gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a hypergraph dump");
  gen_cmd->add_option("--family", gen.family)
      ->check(CLI::IsMember({"fuse", "er"}))
      ->capture_default_str();
  gen_cmd->add_option("--k", gen.k)->capture_default_str();
  gen_cmd->add_option("--c", gen.c)->capture_default_str();
  gen_cmd->add_option("--ell", gen.ell)->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "Segment size (fuse) / vertices (er)")
      ->capture_default_str();
  gen_cmd->add_option("--m", gen.m, "Edge count (er; default round(c*n))");
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_flag("--with-replacement", gen.with_replacement,
                    "ER edges may repeat vertices");
  gen_cmd->add_option("--out", gen.out_path, "Output path (default stdout)");

  CommonOpts peel_common;
  std::string peel_in = "-", peel_mode = "seq";
  auto* peel_cmd = app.add_subcommand("peel", "Peel a hypergraph dump");
  peel_cmd->add_option("--in", peel_in, "Graph dump path or - for stdin")
      ->capture_default_str();
  peel_cmd->add_option("--mode", peel_mode)
      ->check(CLI::IsMember({"seq", "rounds"}))
      ->capture_default_str();
  add_common(peel_cmd, peel_common, false);

  McOpts mc;
  CommonOpts mc_common;
  auto* mc_cmd =
      app.add_subcommand("mc-peel", "Monte Carlo peelability sweep");
  mc_cmd->add_option("--family", mc.family)
      ->check(CLI::IsMember({"fuse", "er"}))
      ->capture_default_str();
  mc_cmd->add_option("--k", mc.k)->capture_default_str();
  mc_cmd->add_option("--c", mc.c)->capture_default_str();
  mc_cmd->add_option("--ell", mc.ell)->capture_default_str();
  mc_cmd->add_option("--n", mc.n, "Segment size (fuse) / vertices (er)")
      ->capture_default_str();
  mc_cmd->add_option("--trials", mc.trials)->capture_default_str();
  mc_cmd->add_option("--seed", mc.seed)->capture_default_str();
  add_common(mc_cmd, mc_common);

  ThresholdOpts th;
  CommonOpts th_common;
  auto* th_cmd = app.add_subcommand(
      "threshold", "Erosion/consolidation certificates and bracketing");
  th_cmd->add_option("--k", th.k)->capture_default_str();
  th_cmd->add_option("--window-D", th.window_d)->capture_default_str();
  th_cmd->add_option("--tol", th.tol)->capture_default_str();
  th_cmd->add_option("--max-iter", th.max_iter)->capture_default_str();
  th_cmd->add_option("--trace", th.trace_path,
                     "CSV trace of (side, c, r, probe) per iteration");
  th_cmd->add_option("--trace-stride", th.trace_stride)
      ->capture_default_str();
  th_cmd->add_option("--erode-at", th.erode_at,
                     "Check erosion at these densities instead of bracketing");
  th_cmd->add_option("--consolidate-at", th.consolidate_at,
                     "Check consolidation at these densities");
  th_cmd->add_option("--precision", th.precision)
      ->check(CLI::IsMember({"double", "extended"}))
      ->capture_default_str();
  add_common(th_cmd, th_common, false);

  SurvivalOpts sv;
  CommonOpts sv_common;
  auto* sv_cmd = app.add_subcommand(
      "survival", "Empirical vs analytic per-segment survival");
  sv_cmd->add_option("--k", sv.k)->capture_default_str();
  sv_cmd->add_option("--c", sv.c)->capture_default_str();
  sv_cmd->add_option("--ell", sv.ell)->capture_default_str();
  sv_cmd->add_option("--n", sv.n)->capture_default_str();
  sv_cmd->add_option("--r-max", sv.r_max)->capture_default_str();
  sv_cmd->add_option("--trials", sv.trials)->capture_default_str();
  sv_cmd->add_option("--seed", sv.seed)->capture_default_str();
  add_common(sv_cmd, sv_common);

  auto* rt_cmd = app.add_subcommand("retrieval", "XOR retrieval structure");
  rt_cmd->require_subcommand(1);
  RetrievalOpts rt;
  auto add_retrieval_opts = [&rt](CLI::App* cmd) {
    cmd->add_option("--keys", rt.keys_source,
                    "Key file (newline separated) or synthetic:N")
        ->required();
    cmd->add_option("--bits", rt.bits, "Value width r in bits")
        ->check(CLI::Range(1u, 64u))
        ->capture_default_str();
    cmd->add_option("--k", rt.k)->capture_default_str();
    cmd->add_option("--c", rt.c)->capture_default_str();
    cmd->add_option("--ell", rt.ell)->capture_default_str();
    cmd->add_option("--seed", rt.seed)->capture_default_str();
    cmd->add_option("--max-retries", rt.max_retries)->capture_default_str();
  };

  CommonOpts rb_common;
  std::string rb_struct_path;
  auto* rb_cmd = rt_cmd->add_subcommand("build", "Build and serialize");
  add_retrieval_opts(rb_cmd);
  rb_cmd->add_option("--struct", rb_struct_path,
                     "Write the serialized structure here");
  add_common(rb_cmd, rb_common, false);

  CommonOpts rq_common;
  std::string rq_struct_path, rq_keys_source;
  std::vector<std::string> rq_keys;
  auto* rq_cmd =
      rt_cmd->add_subcommand("query", "Query a serialized structure");
  rq_cmd->add_option("--in", rq_struct_path, "Serialized structure path")
      ->required();
  rq_cmd->add_option("--key", rq_keys, "Key to query (repeatable)");
  rq_cmd->add_option("--keys", rq_keys_source,
                     "Bulk keys: file or synthetic:N");
  add_common(rq_cmd, rq_common, false);

  CommonOpts rn_common;
  std::uint64_t rn_trials = 5;
  auto* rn_cmd = rt_cmd->add_subcommand("bench", "Build/query timing");
  add_retrieval_opts(rn_cmd);
  rn_cmd->add_option("--trials", rn_trials)->capture_default_str();
  add_common(rn_cmd, rn_common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    if (rc == 0) return 0;  // --help and friends
    emit_error(2, "usage", e.what());
    return 2;
  }

  if (gen_cmd->parsed()) return cmd_gen(gen);
  if (peel_cmd->parsed()) return cmd_peel(peel_in, peel_mode, peel_common);
  if (mc_cmd->parsed()) return cmd_mc_peel(mc, mc_common);
  if (th_cmd->parsed()) return cmd_threshold(th, th_common);
  if (sv_cmd->parsed()) return cmd_survival(sv, sv_common);
  if (rt_cmd->parsed()) {
    if (rb_cmd->parsed())
      return cmd_retrieval_build(rt, rb_struct_path, rb_common);
    if (rq_cmd->parsed())
      return cmd_retrieval_query(rq_struct_path, rq_keys, rq_keys_source,
                                 rq_common);
    if (rn_cmd->parsed()) return cmd_retrieval_bench(rt, rn_trials, rn_common);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::invalid_argument& e) {
    emit_error(2, "usage", e.what());
    return 2;
  } catch (const BuildFailedError& e) {
    emit_error(3, "build-failed", e.what());
    return 3;
  } catch (const CapacityError& e) {
    emit_error(4, "capacity", e.what());
    return 4;
  } catch (const SerializeError& e) {
    emit_error(5, "io", e.what());
    return 5;
  } catch (const IoError& e) {
    emit_error(5, "io", e.what());
    return 5;
  } catch (const std::exception& e) {
    emit_error(1, "internal", e.what());
    return 1;
  }
}
