#ifndef FUSEPEEL_THRESHOLD_HPP
#define FUSEPEEL_THRESHOLD_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace fusepeel {

// Scalar one-round survival map x -> 1 - exp(-c k x^(k-1)) and its
// derivative. This is the constant-profile restriction of the window
// operator below.
double f_eval(double x, std::uint32_t k, double c);
double f_deriv(double x, std::uint32_t k, double c);

// The two nonzero fixed points of f: xi1 unstable (f'(xi1) > 1), xi2 stable.
struct FixedPoints {
  double xi1;
  double xi2;
};

// Locates xi1 (smallest positive fixed point) and xi2 (largest) by a
// 1024-cell grid scan plus bisection to 1e-12 residual, or returns nullopt
// when f has no point with f(x) >= x in (0, 1].
std::optional<FixedPoints> fixed_points(std::uint32_t k, double c);

// Smallest density (to `tol`) at which fixed_points(k, .) becomes nonempty.
double tangency_density(std::uint32_t k, double tol = 1e-9);

// How a window's out-of-range values behave when the operator is applied:
// `hold` keeps the stored extension value (used for the constant-0 left /
// constant-1 right rails), `copy_boundary` re-pins it to the freshly
// computed boundary value.
enum class ExtendRule : std::uint8_t { hold, copy_boundary };

// A function q : Z -> [0,1] represented on the finite window [-D, D].
// Storage matches the iteration in the numerical-threshold routine: 2D+2
// doubles where slot 0 holds the left-extension value (any i < -D) and the
// remaining 2D+1 hold q(-D) ... q(D); a single scalar holds the right
// extension (any i > D).
class ProbWindow {
 public:
  // Constant window.
  ProbWindow(std::int64_t half_width, double fill,
             ExtendRule left = ExtendRule::hold,
             ExtendRule right = ExtendRule::hold);

  // Step window: `left_value` for i < 0, `right_value` for i >= 0.
  static ProbWindow step(std::int64_t half_width, double left_value,
                         double right_value, ExtendRule left_rule,
                         ExtendRule right_rule);

  // Arbitrary in-window values (size 2D+1, for index -D ... D).
  ProbWindow(std::int64_t half_width, std::vector<double> values,
             double left_extension, double right_extension,
             ExtendRule left_rule, ExtendRule right_rule);

  double at(std::int64_t i) const {
    if (i < -half_width_) return storage_[0];
    if (i > half_width_) return right_extension_;
    return storage_[std::size_t(i + half_width_) + 1];
  }

  std::int64_t half_width() const { return half_width_; }
  std::span<const double> storage() const { return storage_; }
  double right_extension() const { return right_extension_; }
  ExtendRule left_rule() const { return left_rule_; }
  ExtendRule right_rule() const { return right_rule_; }

  // Exact representation equality (the stationarity criterion).
  bool bit_identical(const ProbWindow& other) const;

 private:
  friend ProbWindow apply_phat(const ProbWindow&, std::uint32_t, double);

  std::int64_t half_width_;
  std::vector<double> storage_;  // [0] = left extension, [1..2D+1] = window
  double right_extension_;
  ExtendRule left_rule_;
  ExtendRule right_rule_;
};

// One-round idealised survival update at a single integer position, reading
// q through its extension rules:
//   1 - exp(-c * sum_{j=i-k+1}^{i} prod_{j <= i' < j+k, i' != i} q(i')).
// Products are formed per (i, j) pair directly so rounding is reproducible.
double phat_point(const ProbWindow& q, std::int64_t i, std::uint32_t k,
                  double c);

// Applies the update at every in-window index and then refreshes the
// extension values according to the window's rules.
ProbWindow apply_phat(const ProbWindow& q, std::uint32_t k, double c);

// Exact counterpart on finitely supported functions (value 0 outside
// [lo, lo + values.size())). Used as the oracle in tests and for the
// finite-ell survival iteration cross-checks.
struct SupportFn {
  std::int64_t lo = 0;
  std::vector<double> values;

  double at(std::int64_t i) const {
    if (i < lo || i >= lo + std::int64_t(values.size())) return 0.0;
    return values[std::size_t(i - lo)];
  }
};

SupportFn apply_phat_exact(const SupportFn& q, std::uint32_t k, double c);

// Finite-ell operator on survival values indexed by segments I = [0, ell+k-1):
// the edge-type sum is restricted to j in [i-k+1, i] intersect [0, ell) and
// out-of-range factors read as 0.
std::vector<double> apply_p(std::span<const double> q, std::uint32_t k,
                            double c, std::uint64_t ell);

// r-fold composition of apply_p starting from the all-ones profile on I.
std::vector<double> p_iterate_ones(std::uint32_t k, double c,
                                   std::uint64_t ell, std::uint64_t r);

// r-fold exact phat composition starting from the indicator of I.
SupportFn phat_iterate_ones(std::uint32_t k, double c, std::uint64_t ell,
                            std::uint64_t r);

enum class IterationVerdict : std::uint8_t {
  verified,         // the success condition fired at iteration `iterations`
  stationary,       // consecutive windows became bit-identical first
  iteration_limit,  // max_iter reached
};

struct IterationCertificate {
  IterationVerdict verdict;
  std::uint64_t iterations;  // witness R when verified, else iterations run
  double probe;              // last a_r(0) (erosion) or b_r(-1) (consolidation)
  double target;             // xi1/2 or (xi1+xi2)/2
};

// Called once per iteration with (r, probe value) when tracing is requested.
using IterationTrace = std::function<void(std::uint64_t, double)>;

enum class Precision : std::uint8_t { f64, extended };

// Erosion certificate search: iterate the window update from the step
// profile (xi1/2 left of 0, 1 from 0 on) with a copy-boundary left rail and
// a constant-1 right rail; success when a_r(0) < xi1/2. Requires fixed
// points to exist at (k, c).
IterationCertificate erosion_check(std::uint32_t k, double c,
                                   std::int64_t half_width,
                                   std::uint64_t max_iter,
                                   const IterationTrace& trace = {},
                                   Precision precision = Precision::f64);

// Consolidation certificate search: start from 0 left of 0 and
// (xi1+xi2)/2 from 0 on, constant-0 left rail, copy-boundary right rail;
// success when b_r(-1) > (xi1+xi2)/2.
IterationCertificate consolidation_check(std::uint32_t k, double c,
                                         std::int64_t half_width,
                                         std::uint64_t max_iter,
                                         const IterationTrace& trace = {},
                                         Precision precision = Precision::f64);

struct ThresholdBracket {
  std::uint32_t k = 0;
  double lower = 0;  // verified eroding density
  double upper = 0;  // verified consolidating density
  std::uint64_t iterations_used = 0;       // total across all checks
  std::uint64_t lower_cert_iterations = 0; // witness R for `lower`
  std::uint64_t upper_cert_iterations = 0; // witness R for `upper`
  bool converged = false;                  // upper - lower <= tol reached
};

// Bisection between a verified eroding and a verified consolidating density,
// shrinking the bracket to width <= tol (or stopping early once a midpoint
// can no longer be decided within max_iter per check). Throws
// std::runtime_error if no initial bracket can be established.
ThresholdBracket bracket_threshold(std::uint32_t k, std::int64_t half_width,
                                   std::uint64_t max_iter, double tol);

// Published reference brackets for the fuse-graph peelability threshold
// (window computation at D = 50, double precision) along with the exact
// Erdos-Renyi orientability threshold they straddle. Used in tests and
// reports only; no computation depends on them.
struct ReferenceRow {
  std::uint32_t k;
  double b_k;       // largest density verified eroding
  double c_star_k;  // ER orientability threshold
  double B_k;       // smallest density verified consolidating
};

std::optional<ReferenceRow> reference_row(std::uint32_t k);

// ER peelability threshold for k = 3 (~0.818), quoted for reports.
inline constexpr double kErPeelability3 = 0.818;

}  // namespace fusepeel

#endif  // FUSEPEEL_THRESHOLD_HPP
