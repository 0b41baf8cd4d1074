// Acceptance suite. Each criterion prints one [PASS]/[FAIL] line; the
// process exits nonzero if any selected criterion fails.
//
//   acceptance            run criteria 1-7 (fast tier)
//   acceptance 3 5        run a subset
//   acceptance --deep     long-running reproduction of the k=3 ten-digit
//                         erosion/consolidation densities (not part of ctest)

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <string>
#include <vector>

#include "fusepeel/errors.hpp"
#include "fusepeel/hypergraph.hpp"
#include "fusepeel/peel.hpp"
#include "fusepeel/retrieval.hpp"
#include "fusepeel/rng.hpp"
#include "fusepeel/threshold.hpp"

using namespace fusepeel;

namespace {

struct Criterion {
  Criterion(int number, std::string label)
      : number(number), label(std::move(label)) {}

  int number;
  std::string label;
  std::vector<std::string> failures;

  void require(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <typename... Args>
  void requiref(bool ok, const char* fmt, Args... args) {
    if (!ok) {
      char buf[512];
      std::snprintf(buf, sizeof buf, fmt, args...);
      failures.emplace_back(buf);
    }
  }

  bool report() const {
    std::printf("[%s] criterion %d: %s\n", failures.empty() ? "PASS" : "FAIL",
                number, label.c_str());
    for (const std::string& f : failures) {
      std::printf("       - %s\n", f.c_str());
    }
    std::fflush(stdout);
    return failures.empty();
  }
};

// ---------------------------------------------------------------------------
// 1. Threshold certificates, fast tier (k = 3, D = 50).

bool criterion1() {
  Criterion c{1, "k=3 erosion at 0.9179 / consolidation at 0.9180, "
                 "bracket width 1e-4"};
  const auto er = erosion_check(3, 0.9179, 50, 20000000);
  c.requiref(er.verdict == IterationVerdict::verified,
             "erosion at 0.9179 not verified (verdict %d after %llu iters)",
             int(er.verdict), (unsigned long long)er.iterations);
  if (er.verdict == IterationVerdict::verified) {
    std::printf("       erosion  c=0.9179 verified, R=%llu, a_R(0)=%.6g\n",
                (unsigned long long)er.iterations, er.probe);
  }

  const auto co = consolidation_check(3, 0.9180, 50, 20000000);
  c.requiref(co.verdict == IterationVerdict::verified,
             "consolidation at 0.9180 not verified (verdict %d)",
             int(co.verdict));
  if (co.verdict == IterationVerdict::verified) {
    std::printf("       consolid c=0.9180 verified, R=%llu, b_R(-1)=%.6g\n",
                (unsigned long long)co.iterations, co.probe);
  }

  const ThresholdBracket br = bracket_threshold(3, 50, 20000000, 1e-4);
  const double c_star_3 = reference_row(3)->c_star_k;
  std::printf("       bracket [%.10f, %.10f], width %.3g\n", br.lower,
              br.upper, br.upper - br.lower);
  c.require(br.converged, "bracket did not converge to tol");
  c.requiref(br.upper - br.lower <= 1e-4, "bracket width %.3g > 1e-4",
             br.upper - br.lower);
  c.require(br.lower < c_star_3 && c_star_3 < br.upper,
            "bracket does not contain the reference orientability threshold");
  return c.report();
}

// ---------------------------------------------------------------------------
// 2. Fast-tier certificates for k = 4..7 around the reference rows.

bool criterion2() {
  Criterion c{2, "k=4..7 erosion/consolidation pairs at tol 1e-3"};
  struct Pair {
    std::uint32_t k;
    double erode_at, consolidate_at;
  };
  const Pair pairs[] = {
      {4, 0.976, 0.977}, {5, 0.992, 0.993}, {6, 0.997, 0.998},
      {7, 0.999, 1.000},
  };
  for (const Pair& p : pairs) {
    const auto ref = reference_row(p.k);
    c.requiref(ref && p.erode_at < ref->b_k && p.consolidate_at > ref->B_k,
               "k=%u check densities do not straddle the reference row", p.k);
    const auto er = erosion_check(p.k, p.erode_at, 50, 50000000);
    c.requiref(er.verdict == IterationVerdict::verified,
               "k=%u erosion at %.3f not verified (verdict %d)", p.k,
               p.erode_at, int(er.verdict));
    const auto co = consolidation_check(p.k, p.consolidate_at, 50, 50000000);
    c.requiref(co.verdict == IterationVerdict::verified,
               "k=%u consolidation at %.3f not verified (verdict %d)", p.k,
               p.consolidate_at, int(co.verdict));
    if (er.verdict == IterationVerdict::verified &&
        co.verdict == IterationVerdict::verified) {
      std::printf("       k=%u: erode@%.3f R=%llu, consolidate@%.3f R=%llu\n",
                  p.k, p.erode_at, (unsigned long long)er.iterations,
                  p.consolidate_at, (unsigned long long)co.iterations);
    }
  }
  return c.report();
}

// Deep tier: the ten-digit k=3 densities, 2e8 iteration budget.
bool deep_tier() {
  Criterion c{2, "deep tier: ten-digit k=3 densities (long run)"};
  const auto ref = reference_row(3);
  const auto er = erosion_check(3, ref->b_k, 50, 200000000);
  c.requiref(er.verdict == IterationVerdict::verified,
             "erosion at b_3 not verified (verdict %d after %llu iters)",
             int(er.verdict), (unsigned long long)er.iterations);
  std::printf("       erosion  c=%.10f: verdict %d, iterations %llu\n",
              ref->b_k, int(er.verdict), (unsigned long long)er.iterations);
  const auto co = consolidation_check(3, ref->B_k, 50, 200000000);
  c.requiref(co.verdict == IterationVerdict::verified,
             "consolidation at B_3 not verified (verdict %d after %llu)",
             int(co.verdict), (unsigned long long)co.iterations);
  std::printf("       consolid c=%.10f: verdict %d, iterations %llu\n",
              ref->B_k, int(co.verdict), (unsigned long long)co.iterations);
  return c.report();
}

// ---------------------------------------------------------------------------
// 3. Monte Carlo peelability phase transition.

double fuse_peel_fraction(double density, std::uint64_t trials,
                          std::uint64_t seed) {
  std::uint64_t peeled = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    FuseParams p{.k = 3, .c = density, .ell = 50, .n = 10000,
                 .seed = mix2(seed, t)};
    peeled += peel_sequential(generate_fuse(p)).peelable();
  }
  return double(peeled) / double(trials);
}

double er_peel_fraction(double density, std::uint64_t trials,
                        std::uint64_t seed) {
  std::uint64_t peeled = 0;
  const std::uint64_t n = 100000;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const auto m = std::uint64_t(std::llround(density * double(n)));
    peeled += peel_sequential(generate_er(3, n, m, mix2(seed, t))).peelable();
  }
  return double(peeled) / double(trials);
}

bool criterion3() {
  Criterion c{3, "Monte Carlo phase transition (fuse 0.88/0.96, ER 0.80/0.84)"};
  const double fuse_lo = fuse_peel_fraction(0.88, 20, 1001);
  const double fuse_hi = fuse_peel_fraction(0.96, 20, 1002);
  const double er_lo = er_peel_fraction(0.80, 20, 1003);
  const double er_hi = er_peel_fraction(0.84, 20, 1004);
  std::printf("       fuse: peel fraction %.2f @ c=0.88, %.2f @ c=0.96\n",
              fuse_lo, fuse_hi);
  std::printf("       er:   peel fraction %.2f @ c=0.80, %.2f @ c=0.84\n",
              er_lo, er_hi);
  c.requiref(fuse_lo >= 0.9, "fuse @0.88 fraction %.2f < 0.9", fuse_lo);
  c.requiref(fuse_hi <= 0.1, "fuse @0.96 fraction %.2f > 0.1", fuse_hi);
  c.requiref(er_lo >= 0.9, "er @0.80 fraction %.2f < 0.9", er_lo);
  c.requiref(er_hi <= 0.1, "er @0.84 fraction %.2f > 0.1", er_hi);
  return c.report();
}

// ---------------------------------------------------------------------------
// 4. Retrieval correctness, overhead and serialization.

bool retrieval_config(Criterion& c, std::uint32_t k, double density,
                      std::uint64_t ell, double reported_percent) {
  const std::uint64_t m = 100000;
  RetrievalParams params{.k = k, .c = density, .ell = ell, .r_bits = 1,
                         .max_retries = 100, .seed = 4242};
  std::vector<std::string> keys;
  keys.reserve(m);
  std::vector<std::uint64_t> values(m);
  for (std::uint64_t i = 0; i < m; ++i) {
    keys.push_back("acceptance-key-" + std::to_string(i));
    values[i] = mix2(1, i) & 1;
  }
  BuildStats stats;
  RetrievalStructure s;
  try {
    s = build_retrieval(keys, values, params, &stats);
  } catch (const BuildFailedError& e) {
    c.requiref(false,
               "k=%u c=%.3f ell=%llu: no attempt of %u peeled (segment size "
               "n=%llu leaves every attempt with a large residual core)",
               k, density, (unsigned long long)ell, e.attempts,
               (unsigned long long)std::uint64_t(
                   std::ceil(double(m) / (density * double(ell)))));
    return false;
  }

  std::uint64_t wrong = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    wrong += s.query(keys[i]) != values[i];
  }
  c.requiref(wrong == 0, "k=%u: %llu of %llu keys query incorrectly", k,
             (unsigned long long)wrong, (unsigned long long)m);

  const double formula =
      double(ell + k - 1) / (density * double(ell)) - 1.0;
  const double cell_rounding = double(ell + k - 1) / double(m);
  const double raw = raw_overhead(s);
  std::printf(
      "       k=%u c=%.3f ell=%llu: attempts %u, raw overhead %.4f%%"
      " (formula %.4f%%, published ~%.1f%%), serialized %.4f%%\n",
      k, density, (unsigned long long)ell, stats.attempts, raw * 100,
      formula * 100, reported_percent, serialized_overhead(s) * 100);
  c.requiref(std::abs(raw - formula) <= cell_rounding,
             "k=%u raw overhead %.6f vs formula %.6f beyond one-cell slack",
             k, raw, formula);

  const auto bytes = serialize(s);
  const RetrievalStructure t = deserialize(bytes);
  c.require(serialize(t) == bytes, "serialize/deserialize not bit-exact");
  std::uint64_t divergent = 0;
  for (std::uint64_t i = 0; i < m; i += 7) {
    divergent += t.query(keys[i]) != s.query(keys[i]);
  }
  c.require(divergent == 0, "queries diverge after round-trip");
  return true;
}

bool criterion4() {
  Criterion c{4, "retrieval @ (3, 0.910, 100) and (4, 0.960, 200), m=1e5"};
  retrieval_config(c, 3, 0.910, 100, 12.1);
  retrieval_config(c, 4, 0.960, 200, 5.7);
  return c.report();
}

// ---------------------------------------------------------------------------
// 5. Operator property suite.

bool criterion5() {
  Criterion c{5, "operator properties (dominance, shift, monotonicity, "
                 "step soundness, f checks)"};
  SplitMix64 rng(55);

  // Operator order/shift/monotonicity properties on 1000 randomized windows.
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(4));
    const double cc = 0.2 + 1.3 * rng.next_unit();

    // (i) finite-ell operator dominated by the unrestricted operator
    const std::uint64_t ell = 1 + rng.next_below(16);
    SupportFn q{0, std::vector<double>(std::size_t(ell + k - 1))};
    for (double& v : q.values) v = rng.next_unit();
    const auto p = apply_p(q.values, k, cc, ell);
    const SupportFn ph = apply_phat_exact(q, k, cc);
    for (std::size_t i = 0; i < p.size(); ++i) {
      c.require(p[i] <= ph.at(std::int64_t(i)) + 1e-15,
                "P q > Phat q at some index");
    }

    // (ii) shift commutation, exact
    const std::int64_t shift = std::int64_t(rng.next_below(9)) - 4;
    SupportFn shifted{q.lo + shift, q.values};
    const SupportFn a = apply_phat_exact(shifted, k, cc);
    c.require(a.lo == ph.lo + shift && a.values == ph.values,
              "shift does not commute bitwise");

    // (iii) monotone dominance
    SupportFn q2 = q;
    for (double& v : q2.values) v = std::min(1.0, v + rng.next_unit() * 0.3);
    const SupportFn ph2 = apply_phat_exact(q2, k, cc);
    for (std::int64_t i = ph.lo; i < ph.lo + std::int64_t(ph.values.size());
         ++i) {
      c.require(ph.at(i) <= ph2.at(i) + 1e-15, "monotone dominance violated");
    }

    // (iv) monotone profiles stay monotone
    const std::int64_t D = 4 + std::int64_t(rng.next_below(6));
    std::vector<double> vals(std::size_t(2 * D + 1));
    for (double& v : vals) v = rng.next_unit();
    std::sort(vals.begin(), vals.end());
    const double lo_ext = vals.front() * rng.next_unit();
    const double hi_ext = vals.back() + (1 - vals.back()) * rng.next_unit();
    const ProbWindow w(D, std::move(vals), lo_ext, hi_ext, ExtendRule::hold,
                       ExtendRule::hold);
    const ProbWindow out = apply_phat(w, k, cc);
    for (std::int64_t i = -D; i < D; ++i) {
      c.require(out.at(i) <= out.at(i + 1) + 1e-15,
                "monotonicity not preserved");
    }
  }

  // Finite-window step soundness: the a-step stays above the exact image,
  // the b-step below it.
  for (int trial = 0; trial < 100; ++trial) {
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(3));
    const double tangency = tangency_density(k);
    const double cc = tangency + 0.05 + rng.next_unit() * 0.4;
    const auto fp = fixed_points(k, cc);
    if (!fp) continue;
    const std::int64_t D = 8 + std::int64_t(rng.next_below(8));
    ProbWindow a = ProbWindow::step(D, fp->xi1 / 2, 1.0,
                                    ExtendRule::copy_boundary,
                                    ExtendRule::hold);
    ProbWindow b = ProbWindow::step(D, 0.0, (fp->xi1 + fp->xi2) / 2,
                                    ExtendRule::hold,
                                    ExtendRule::copy_boundary);
    for (std::uint64_t it = rng.next_below(10); it > 0; --it) {
      a = apply_phat(a, k, cc);
      b = apply_phat(b, k, cc);
    }
    const ProbWindow a2 = apply_phat(a, k, cc);
    const ProbWindow b2 = apply_phat(b, k, cc);
    for (std::int64_t i = -D - 4; i <= D + 4; ++i) {
      c.require(phat_point(a, i, k, cc) <= a2.at(i) + 1e-15,
                "a-step fell below the exact operator image");
      c.require(b2.at(i) <= phat_point(b, i, k, cc) + 1e-15,
                "b-step rose above the exact operator image");
    }
  }

  // f-derivative against central finite differences.
  for (int trial = 0; trial < 200; ++trial) {
    const double x = 0.05 + 0.9 * rng.next_unit();
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(5));
    const double cc = 0.3 + 1.2 * rng.next_unit();
    const double h = 1e-6;
    const double fd =
        (f_eval(x + h, k, cc) - f_eval(x - h, k, cc)) / (2 * h);
    c.requiref(std::abs(f_deriv(x, k, cc) - fd) <= 1e-6,
               "f' mismatch %.3g at x=%.4f k=%u c=%.4f",
               std::abs(f_deriv(x, k, cc) - fd), x, k, cc);
  }

  // Fixed-point residuals and slopes for 50 supercritical pairs.
  for (int trial = 0; trial < 50; ++trial) {
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(5));
    const double tangency = tangency_density(k);
    const double cc = tangency + 0.02 + rng.next_unit() * (1.3 - tangency);
    const auto fp = fixed_points(k, cc);
    c.require(fp.has_value(), "fixed points missing above tangency");
    if (!fp) continue;
    c.require(std::abs(f_eval(fp->xi1, k, cc) - fp->xi1) <= 1e-12,
              "xi1 residual above 1e-12");
    c.require(std::abs(f_eval(fp->xi2, k, cc) - fp->xi2) <= 1e-12,
              "xi2 residual above 1e-12");
    c.require(f_deriv(fp->xi1, k, cc) > 1.0, "f'(xi1) <= 1");
    c.require(f_deriv(fp->xi2, k, cc) < 1.0, "f'(xi2) >= 1");
  }

  return c.report();
}

// ---------------------------------------------------------------------------
// 6. Round traces against the operator iteration.

bool criterion6() {
  Criterion c{6, "survival vs operator iterate, k=3 c=0.9 ell=20 n=2e5, r<=5"};
  FuseParams p{.k = 3, .c = 0.9, .ell = 20, .n = 200000, .seed = 606};
  const Hypergraph h = generate_fuse(p);
  const auto rooted = rooted_segment_survival(h, 5);
  double worst = 0.0;
  for (std::uint64_t r = 0; r <= 5; ++r) {
    const auto analytic = p_iterate_ones(p.k, p.c, p.ell, r);
    for (std::size_t i = 0; i < analytic.size(); ++i) {
      worst = std::max(worst, std::abs(rooted[r][i] - analytic[i]));
    }
  }
  std::printf("       max |rooted survival - P^r 1_I| over r<=5: %.4f\n",
              worst);
  c.requiref(worst <= 0.05, "max gap %.4f exceeds 0.05", worst);
  return c.report();
}

// ---------------------------------------------------------------------------
// 7. Structural suite.

bool criterion7() {
  Criterion c{7, "confluence, replay validity, peelable=>orientable, "
                 "density>1 pigeonhole"};
  SplitMix64 rng(777);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(3));
    const std::uint64_t nv = k + rng.next_below(100);
    const std::uint64_t m = rng.next_below(nv + 8);
    const Hypergraph h = generate_er(k, nv, m, rng.next());
    const PeelResult seq = peel_sequential(h);
    const PeelResult rnd = peel_rounds(h);
    c.require(seq.core_vertices == rnd.core_vertices &&
                  seq.core_edges == rnd.core_edges,
              "sequential and round peel cores differ");
    c.require(replay_valid(h, seq), "sequential peel order replay invalid");
    c.require(replay_valid(h, rnd), "round peel order replay invalid");
    if (!c.failures.empty()) break;
  }

  int peelable_seen = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::uint32_t k = 3 + std::uint32_t(rng.next_below(3));
    const std::uint64_t nv = k + rng.next_below(50 - k + 1);
    const std::uint64_t m = rng.next_below(nv + 3);
    const Hypergraph h = generate_er(k, nv, m, rng.next());
    if (peel_sequential(h).peelable()) {
      ++peelable_seen;
      c.require(orient(h).full(), "peelable graph not orientable");
    }
  }
  c.require(peelable_seen >= 50, "too few peelable instances sampled");

  for (int trial = 0; trial < 50; ++trial) {
    const std::uint64_t nv = 4 + rng.next_below(60);
    const Hypergraph h =
        generate_er(3, nv, nv + 1 + rng.next_below(20), rng.next());
    c.require(!orient(h).full(), "graph with density > 1 oriented");
  }
  return c.report();
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  bool deep = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--deep") == 0) {
      deep = true;
    } else {
      selected.push_back(std::atoi(argv[i]));
    }
  }
  if (selected.empty() && !deep) selected = {1, 2, 3, 4, 5, 6, 7};

  const std::function<bool()> criteria[] = {
      criterion1, criterion2, criterion3, criterion4,
      criterion5, criterion6, criterion7,
  };

  bool ok = true;
  for (int n : selected) {
    if (n < 1 || n > 7) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    ok &= criteria[n - 1]();
  }
  if (deep) ok &= deep_tier();
  return ok ? 0 : 1;
}
