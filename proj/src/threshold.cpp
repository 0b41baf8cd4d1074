#include "fusepeel/threshold.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>
#include <utility>

namespace fusepeel {

double f_eval(double x, std::uint32_t k, double c) {
  return 1.0 - std::exp(-c * double(k) * std::pow(x, double(k - 1)));
}

double f_deriv(double x, std::uint32_t k, double c) {
  const double kk = double(k);
  return c * kk * (kk - 1.0) * std::pow(x, double(k - 2)) *
         std::exp(-c * kk * std::pow(x, double(k - 1)));
}

namespace {

constexpr int kGridCells = 1024;

// Bisection for a root of g on [neg, pos] with g(neg) < 0 <= g(pos) (or the
// mirrored orientation); runs to floating-point exhaustion, which leaves the
// fixed-point residual well below 1e-12.
template <typename G>
double bisect_root(G&& g, double a, double b, bool positive_at_b) {
  for (int it = 0; it < 200; ++it) {
    const double mid = a + (b - a) / 2;
    if (mid == a || mid == b) break;
    if ((g(mid) > 0) == positive_at_b) {
      b = mid;
    } else {
      a = mid;
    }
  }
  return a + (b - a) / 2;
}

}  // namespace

std::optional<FixedPoints> fixed_points(std::uint32_t k, double c) {
  if (k < 3) throw std::invalid_argument("fixed_points: k must be >= 3");
  if (!(c > 0)) throw std::invalid_argument("fixed_points: c must be > 0");

  const auto g = [k, c](double x) { return f_eval(x, k, c) - x; };

  // Grid scan for the maximum of g, then a ternary refinement around it. g
  // has at most one sign-change pair in (0, 1), so locating its maximum
  // decides existence.
  int best = 0;
  double best_val = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGridCells; ++i) {
    const double x = double(i) / kGridCells;
    const double v = g(x);
    if (v > best_val) {
      best_val = v;
      best = i;
    }
  }
  double lo = double(best > 0 ? best - 1 : 0) / kGridCells;
  double hi = double(best < kGridCells ? best + 1 : kGridCells) / kGridCells;
  for (int it = 0; it < 200; ++it) {
    const double m1 = lo + (hi - lo) / 3;
    const double m2 = hi - (hi - lo) / 3;
    if (m1 >= m2) break;
    if (g(m1) < g(m2)) {
      lo = m1;
    } else {
      hi = m2;
    }
  }
  const double xmax = lo + (hi - lo) / 2;
  if (!(g(xmax) > 0)) return std::nullopt;

  // xi1: left anchor with g < 0 exists since g(x) ~ c k x^(k-1) - x < 0 for
  // small x when k >= 3.
  double neg = xmax / 2;
  while (g(neg) >= 0) neg /= 2;
  const double xi1 = bisect_root(g, neg, xmax, true);

  // xi2: g(1) = -exp(-ck) < 0, though it can round to 0 for very large ck.
  double xi2;
  if (g(1.0) >= 0) {
    xi2 = 1.0;
  } else {
    xi2 = bisect_root(g, 1.0, xmax, true);
  }
  return FixedPoints{xi1, xi2};
}

double tangency_density(std::uint32_t k, double tol) {
  if (k < 3) throw std::invalid_argument("tangency_density: k must be >= 3");
  double lo = 1e-3, hi = 1.0;
  while (fixed_points(k, lo).has_value()) lo /= 2;
  while (!fixed_points(k, hi).has_value()) {
    hi *= 2;
    if (hi > 64) throw std::runtime_error("tangency_density: no upper bound");
  }
  while (hi - lo > tol) {
    const double mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    if (fixed_points(k, mid).has_value()) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

ProbWindow::ProbWindow(std::int64_t half_width, double fill, ExtendRule left,
                       ExtendRule right)
    : ProbWindow(half_width,
                 std::vector<double>(std::size_t(2 * half_width + 1), fill),
                 fill, fill, left, right) {}

ProbWindow ProbWindow::step(std::int64_t half_width, double left_value,
                            double right_value, ExtendRule left_rule,
                            ExtendRule right_rule) {
  std::vector<double> vals(std::size_t(2 * half_width + 1));
  for (std::int64_t i = -half_width; i <= half_width; ++i) {
    vals[std::size_t(i + half_width)] = i < 0 ? left_value : right_value;
  }
  return ProbWindow(half_width, std::move(vals), left_value, right_value,
                    left_rule, right_rule);
}

ProbWindow::ProbWindow(std::int64_t half_width, std::vector<double> values,
                       double left_extension, double right_extension,
                       ExtendRule left_rule, ExtendRule right_rule)
    : half_width_(half_width),
      right_extension_(right_extension),
      left_rule_(left_rule),
      right_rule_(right_rule) {
  if (half_width < 1) {
    throw std::invalid_argument("ProbWindow: half width must be >= 1");
  }
  if (values.size() != std::size_t(2 * half_width + 1)) {
    throw std::invalid_argument("ProbWindow: expected 2D+1 values");
  }
  storage_.reserve(values.size() + 1);
  storage_.push_back(left_extension);
  storage_.insert(storage_.end(), values.begin(), values.end());
  for (double v : storage_) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("ProbWindow: value outside [0, 1]");
    }
  }
  if (!(right_extension >= 0.0 && right_extension <= 1.0)) {
    throw std::invalid_argument("ProbWindow: value outside [0, 1]");
  }
}

bool ProbWindow::bit_identical(const ProbWindow& other) const {
  if (half_width_ != other.half_width_ || left_rule_ != other.left_rule_ ||
      right_rule_ != other.right_rule_) {
    return false;
  }
  return std::memcmp(storage_.data(), other.storage_.data(),
                     storage_.size() * sizeof(double)) == 0 &&
         std::memcmp(&right_extension_, &other.right_extension_,
                     sizeof(double)) == 0;
}

double phat_point(const ProbWindow& q, std::int64_t i, std::uint32_t k,
                  double c) {
  double sum = 0.0;
  for (std::int64_t j = i - std::int64_t(k) + 1; j <= i; ++j) {
    double prod = 1.0;
    for (std::int64_t ip = j; ip < j + std::int64_t(k); ++ip) {
      if (ip != i) prod *= q.at(ip);
    }
    sum += prod;
  }
  return 1.0 - std::exp(-c * sum);
}

ProbWindow apply_phat(const ProbWindow& q, std::uint32_t k, double c) {
  const std::int64_t D = q.half_width();
  std::vector<double> out(std::size_t(2 * D + 1));
  for (std::int64_t i = -D; i <= D; ++i) {
    out[std::size_t(i + D)] = phat_point(q, i, k, c);
  }
  const double left = q.left_rule() == ExtendRule::copy_boundary
                          ? out.front()
                          : q.storage()[0];
  const double right = q.right_rule() == ExtendRule::copy_boundary
                           ? out.back()
                           : q.right_extension();
  return ProbWindow(D, std::move(out), left, right, q.left_rule(),
                    q.right_rule());
}

SupportFn apply_phat_exact(const SupportFn& q, std::uint32_t k, double c) {
  if (q.values.empty()) return SupportFn{};
  SupportFn out;
  out.lo = q.lo - 1;
  out.values.resize(q.values.size() + 2);
  for (std::size_t idx = 0; idx < out.values.size(); ++idx) {
    const std::int64_t i = out.lo + std::int64_t(idx);
    double sum = 0.0;
    for (std::int64_t j = i - std::int64_t(k) + 1; j <= i; ++j) {
      double prod = 1.0;
      for (std::int64_t ip = j; ip < j + std::int64_t(k); ++ip) {
        if (ip != i) prod *= q.at(ip);
      }
      sum += prod;
    }
    out.values[idx] = 1.0 - std::exp(-c * sum);
  }
  // Trim exact zeros at the ends so support stays tight.
  std::size_t first = 0, last = out.values.size();
  while (first < last && out.values[first] == 0.0) ++first;
  while (last > first && out.values[last - 1] == 0.0) --last;
  out.lo += std::int64_t(first);
  out.values.assign(out.values.begin() + std::ptrdiff_t(first),
                    out.values.begin() + std::ptrdiff_t(last));
  return out;
}

std::vector<double> apply_p(std::span<const double> q, std::uint32_t k,
                            double c, std::uint64_t ell) {
  const std::int64_t L = std::int64_t(ell) + k - 1;
  if (std::int64_t(q.size()) != L) {
    throw std::invalid_argument("apply_p: expected ell + k - 1 values");
  }
  std::vector<double> out(q.size());
  for (std::int64_t i = 0; i < L; ++i) {
    double sum = 0.0;
    const std::int64_t j_lo = std::max<std::int64_t>(0, i - std::int64_t(k) + 1);
    const std::int64_t j_hi = std::min<std::int64_t>(std::int64_t(ell) - 1, i);
    for (std::int64_t j = j_lo; j <= j_hi; ++j) {
      double prod = 1.0;
      for (std::int64_t ip = j; ip < j + std::int64_t(k); ++ip) {
        if (ip != i) prod *= q[std::size_t(ip)];
      }
      sum += prod;
    }
    out[std::size_t(i)] = 1.0 - std::exp(-c * sum);
  }
  return out;
}

std::vector<double> p_iterate_ones(std::uint32_t k, double c,
                                   std::uint64_t ell, std::uint64_t r) {
  std::vector<double> q(std::size_t(ell + k - 1), 1.0);
  for (std::uint64_t it = 0; it < r; ++it) q = apply_p(q, k, c, ell);
  return q;
}

SupportFn phat_iterate_ones(std::uint32_t k, double c, std::uint64_t ell,
                            std::uint64_t r) {
  SupportFn q{0, std::vector<double>(std::size_t(ell + k - 1), 1.0)};
  for (std::uint64_t it = 0; it < r; ++it) q = apply_phat_exact(q, k, c);
  return q;
}

namespace {

template <typename F>
bool same_bits(const F* a, const F* b, std::size_t n) {
  if constexpr (sizeof(F) == sizeof(double)) {
    return std::memcmp(a, b, n * sizeof(F)) == 0;
  } else {
    // long double carries padding bytes; compare by value instead.
    for (std::size_t i = 0; i < n; ++i) {
      if (a[i] != b[i]) return false;
    }
    return true;
  }
}

struct IterationSetup {
  std::uint32_t k;
  double c;
  std::int64_t half_width;
  double step_lo;   // window value for i < 0 (also the left extension)
  double step_hi;   // window value for i >= 0 (also the right extension)
  ExtendRule left_rule;
  ExtendRule right_rule;
  std::int64_t probe_index;
  double target;
  bool success_below;  // true: probe < target succeeds; false: probe > target
};

// Double-buffered window iteration with (k-1)-wide pads that hold the
// extension values, so the inner update reads raw array slots only. For
// F = double this reproduces apply_phat bit for bit.
template <typename F>
IterationCertificate run_iteration(const IterationSetup& s,
                                   std::uint64_t max_iter,
                                   const IterationTrace& trace) {
  const std::int64_t D = s.half_width;
  const std::size_t window = std::size_t(2 * D + 1);
  const std::size_t pad = s.k - 1;
  const std::int64_t kk = std::int64_t(s.k);
  const F c = F(s.c);
  const F target = F(s.target);

  std::vector<F> cur(window + 2 * pad), nxt(window + 2 * pad);
  F left = F(s.step_lo);
  F right = F(s.step_hi);
  for (std::int64_t i = -D; i <= D; ++i) {
    cur[pad + std::size_t(i + D)] = i < 0 ? F(s.step_lo) : F(s.step_hi);
  }

  F probe = cur[pad + std::size_t(s.probe_index + D)];
  for (std::uint64_t r = 1; r <= max_iter; ++r) {
    for (std::size_t p = 0; p < pad; ++p) {
      cur[p] = left;
      cur[pad + window + p] = right;
    }
    F* q = cur.data() + pad + std::size_t(D);  // q[i] valid on [-D-pad, D+pad]
    for (std::int64_t i = -D; i <= D; ++i) {
      F sum = F(0);
      for (std::int64_t j = i - kk + 1; j <= i; ++j) {
        F prod = F(1);
        for (std::int64_t ip = j; ip < j + kk; ++ip) {
          if (ip != i) prod *= q[ip];
        }
        sum += prod;
      }
      nxt[pad + std::size_t(i + D)] = F(1) - std::exp(-c * sum);
    }
    const F new_left = s.left_rule == ExtendRule::copy_boundary
                           ? nxt[pad]
                           : left;
    const F new_right = s.right_rule == ExtendRule::copy_boundary
                            ? nxt[pad + window - 1]
                            : right;
    probe = nxt[pad + std::size_t(s.probe_index + D)];
    if (trace) trace(r, double(probe));

    const bool success =
        s.success_below ? (probe < target) : (probe > target);
    if (success) {
      return IterationCertificate{IterationVerdict::verified, r,
                                  double(probe), s.target};
    }
    if (same_bits(cur.data() + pad, nxt.data() + pad, window) &&
        same_bits(&left, &new_left, 1) && same_bits(&right, &new_right, 1)) {
      return IterationCertificate{IterationVerdict::stationary, r,
                                  double(probe), s.target};
    }
    cur.swap(nxt);
    left = new_left;
    right = new_right;
  }
  return IterationCertificate{IterationVerdict::iteration_limit, max_iter,
                              double(probe), s.target};
}

IterationCertificate dispatch(const IterationSetup& s, std::uint64_t max_iter,
                              const IterationTrace& trace,
                              Precision precision) {
  if (s.half_width < 1) {
    throw std::invalid_argument("window half width must be >= 1");
  }
  if (precision == Precision::extended) {
    return run_iteration<long double>(s, max_iter, trace);
  }
  return run_iteration<double>(s, max_iter, trace);
}

}  // namespace

IterationCertificate erosion_check(std::uint32_t k, double c,
                                   std::int64_t half_width,
                                   std::uint64_t max_iter,
                                   const IterationTrace& trace,
                                   Precision precision) {
  const auto fp = fixed_points(k, c);
  if (!fp) {
    throw std::invalid_argument(
        "erosion_check: no nonzero fixed points at this density");
  }
  IterationSetup s;
  s.k = k;
  s.c = c;
  s.half_width = half_width;
  s.step_lo = fp->xi1 / 2;
  s.step_hi = 1.0;
  s.left_rule = ExtendRule::copy_boundary;
  s.right_rule = ExtendRule::hold;
  s.probe_index = 0;
  s.target = fp->xi1 / 2;
  s.success_below = true;
  return dispatch(s, max_iter, trace, precision);
}

IterationCertificate consolidation_check(std::uint32_t k, double c,
                                         std::int64_t half_width,
                                         std::uint64_t max_iter,
                                         const IterationTrace& trace,
                                         Precision precision) {
  const auto fp = fixed_points(k, c);
  if (!fp) {
    throw std::invalid_argument(
        "consolidation_check: no nonzero fixed points at this density");
  }
  const double mid = (fp->xi1 + fp->xi2) / 2;
  IterationSetup s;
  s.k = k;
  s.c = c;
  s.half_width = half_width;
  s.step_lo = 0.0;
  s.step_hi = mid;
  s.left_rule = ExtendRule::hold;
  s.right_rule = ExtendRule::copy_boundary;
  s.probe_index = -1;
  s.target = mid;
  s.success_below = false;
  return dispatch(s, max_iter, trace, precision);
}

ThresholdBracket bracket_threshold(std::uint32_t k, std::int64_t half_width,
                                   std::uint64_t max_iter, double tol) {
  if (!(tol > 0)) throw std::invalid_argument("bracket: tol must be > 0");

  ThresholdBracket bracket;
  bracket.k = k;
  const double tangency = tangency_density(k);

  double lower = std::numeric_limits<double>::quiet_NaN();
  for (double cand : {tangency + 1e-3, tangency + 1e-2, tangency + 5e-2}) {
    const auto cert = erosion_check(k, cand, half_width, max_iter);
    bracket.iterations_used += cert.iterations;
    if (cert.verdict == IterationVerdict::verified) {
      lower = cand;
      bracket.lower_cert_iterations = cert.iterations;
      break;
    }
  }
  if (std::isnan(lower)) {
    throw std::runtime_error("bracket_threshold: no eroding density found");
  }

  double upper = std::numeric_limits<double>::quiet_NaN();
  for (double cand : {1.0, 1.1, 1.3, 2.0}) {
    const auto cert = consolidation_check(k, cand, half_width, max_iter);
    bracket.iterations_used += cert.iterations;
    if (cert.verdict == IterationVerdict::verified) {
      upper = cand;
      bracket.upper_cert_iterations = cert.iterations;
      break;
    }
  }
  if (std::isnan(upper)) {
    throw std::runtime_error(
        "bracket_threshold: no consolidating density found");
  }

  while (upper - lower > tol) {
    const double mid = lower + (upper - lower) / 2;
    if (mid <= lower || mid >= upper) break;
    const auto er = erosion_check(k, mid, half_width, max_iter);
    bracket.iterations_used += er.iterations;
    if (er.verdict == IterationVerdict::verified) {
      lower = mid;
      bracket.lower_cert_iterations = er.iterations;
      continue;
    }
    const auto co = consolidation_check(k, mid, half_width, max_iter);
    bracket.iterations_used += co.iterations;
    if (co.verdict == IterationVerdict::verified) {
      upper = mid;
      bracket.upper_cert_iterations = co.iterations;
      continue;
    }
    break;  // undecided at this max_iter / half_width; keep the verified pair
  }

  bracket.lower = lower;
  bracket.upper = upper;
  bracket.converged = (upper - lower) <= tol;
  return bracket;
}

std::optional<ReferenceRow> reference_row(std::uint32_t k) {
  static constexpr ReferenceRow rows[] = {
      {3, 0.9179352469, 0.9179352767, 0.9179353065},
      {4, 0.9767692112, 0.9767701649, 0.9767711186},
      {5, 0.9924345766, 0.9924383913, 0.9924422067},
      {6, 0.9973757381, 0.9973795528, 0.9973833675},
      {7, 0.9990561294, 0.9990637588, 0.9990713882},
  };
  for (const auto& row : rows) {
    if (row.k == k) return row;
  }
  return std::nullopt;
}

}  // namespace fusepeel
