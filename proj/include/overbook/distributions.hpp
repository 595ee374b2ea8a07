#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "overbook/error.hpp"
#include "overbook/random.hpp"

namespace overbook {

struct Atom {
  double value = 0.0;
  double probability = 0.0;

  friend bool operator==(const Atom&, const Atom&) = default;
};

inline constexpr double kProbabilitySumTolerance = 1e-12;

// Distribution of a single award. CDFs are right-continuous,
// F(x) = Pr[X <= x], and quantile(q) = inf{x : F(x) >= q}.
// Immutable after construction.
class ValueDistribution {
 public:
  enum class Kind { kFiniteSupport, kUniformInterval, kExponential, kDegenerate };

  static ValueDistribution finite_support(std::vector<Atom> atoms) {
    detail::require(!atoms.empty(), ErrorKind::kInvalidArgument,
                    "finite-support distribution needs at least one atom");
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    double total = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const Atom& a = atoms[i];
      detail::require(std::isfinite(a.value) && a.value >= 0.0,
                      ErrorKind::kInvalidArgument,
                      "atom values must be finite and nonnegative");
      detail::require(a.probability > 0.0 && a.probability <= 1.0,
                      ErrorKind::kInvalidArgument,
                      "atom probabilities must lie in (0, 1]");
      detail::require(i == 0 || atoms[i - 1].value < a.value,
                      ErrorKind::kInvalidArgument,
                      "atom values must be distinct");
      total += a.probability;
    }
    detail::require(std::abs(total - 1.0) <= kProbabilitySumTolerance,
                    ErrorKind::kInvalidArgument,
                    "atom probabilities must sum to 1");
    ValueDistribution d(Kind::kFiniteSupport);
    d.atoms_ = std::move(atoms);
    d.build_cumulative();
    return d;
  }

  static ValueDistribution uniform(double low, double high) {
    detail::require(std::isfinite(low) && std::isfinite(high) && low >= 0.0 &&
                        low < high,
                    ErrorKind::kInvalidArgument,
                    "uniform interval needs 0 <= low < high");
    ValueDistribution d(Kind::kUniformInterval);
    d.a_ = low;
    d.b_ = high;
    return d;
  }

  static ValueDistribution exponential(double rate) {
    detail::require(std::isfinite(rate) && rate > 0.0,
                    ErrorKind::kInvalidArgument, "exponential rate must be > 0");
    ValueDistribution d(Kind::kExponential);
    d.a_ = rate;
    return d;
  }

  static ValueDistribution degenerate(double point) {
    detail::require(std::isfinite(point) && point >= 0.0,
                    ErrorKind::kInvalidArgument,
                    "degenerate point must be finite and nonnegative");
    ValueDistribution d(Kind::kDegenerate);
    d.atoms_ = {Atom{point, 1.0}};
    d.build_cumulative();
    return d;
  }

  Kind kind() const noexcept { return kind_; }
  bool atomless() const noexcept {
    return kind_ == Kind::kUniformInterval || kind_ == Kind::kExponential;
  }
  bool has_finite_support() const noexcept { return !atomless(); }
  bool bounded() const noexcept { return kind_ != Kind::kExponential; }

  // Atoms in increasing value order; empty for atomless kinds.
  std::span<const Atom> atoms() const noexcept { return atoms_; }

  double low() const noexcept { return a_; }
  double high() const noexcept { return b_; }
  double rate() const noexcept { return a_; }
  double point() const noexcept {
    return kind_ == Kind::kDegenerate ? atoms_.front().value : 0.0;
  }

  double support_min() const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval: return a_;
      case Kind::kExponential: return 0.0;
      default: return atoms_.front().value;
    }
  }

  double support_max() const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval: return b_;
      case Kind::kExponential: return std::numeric_limits<double>::infinity();
      default: return atoms_.back().value;
    }
  }

  double mean() const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval: return 0.5 * (a_ + b_);
      case Kind::kExponential: return 1.0 / a_;
      default: {
        double m = 0.0;
        for (const Atom& at : atoms_) m += at.value * at.probability;
        return m;
      }
    }
  }

  double sample(Rng& rng) const {
    switch (kind_) {
      case Kind::kDegenerate: return atoms_.front().value;
      case Kind::kUniformInterval: return a_ + (b_ - a_) * uniform01(rng);
      case Kind::kExponential: return -std::log1p(-uniform01(rng)) / a_;
      case Kind::kFiniteSupport: {
        const double u = uniform01(rng);
        // First atom whose cumulative mass exceeds u.
        auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
        if (it == cumulative_.end()) --it;
        return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].value;
      }
    }
    return 0.0;
  }

  double cdf(double x) const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval:
        if (x <= a_) return 0.0;
        if (x >= b_) return 1.0;
        return (x - a_) / (b_ - a_);
      case Kind::kExponential:
        return x <= 0.0 ? 0.0 : -std::expm1(-a_ * x);
      default: {
        auto it = std::upper_bound(
            atoms_.begin(), atoms_.end(), x,
            [](double v, const Atom& at) { return v < at.value; });
        if (it == atoms_.begin()) return 0.0;
        return cumulative_[static_cast<std::size_t>(it - atoms_.begin()) - 1];
      }
    }
  }

  // Generalized inverse. Continuous kinds are snapped to the smallest double
  // y with cdf(y) >= q, so quantile(cdf(x)) <= x and cdf(quantile(q)) >= q
  // hold exactly in floating point.
  double quantile(double q) const {
    detail::require(q >= 0.0 && q <= 1.0, ErrorKind::kInvalidArgument,
                    "quantile level must lie in [0, 1]");
    switch (kind_) {
      case Kind::kUniformInterval:
        return snap_quantile(a_ + q * (b_ - a_), q);
      case Kind::kExponential:
        if (q >= 1.0) return std::numeric_limits<double>::infinity();
        return snap_quantile(-std::log1p(-q) / a_, q);
      default: {
        auto it = std::lower_bound(cumulative_.begin(), cumulative_.end(), q);
        if (it == cumulative_.end()) --it;
        return atoms_[static_cast<std::size_t>(it - cumulative_.begin())].value;
      }
    }
  }

  // Density where one exists; nullopt for kinds with point masses.
  std::optional<double> density(double x) const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval:
        return (x >= a_ && x <= b_) ? 1.0 / (b_ - a_) : 0.0;
      case Kind::kExponential:
        return x >= 0.0 ? a_ * std::exp(-a_ * x) : 0.0;
      default:
        return std::nullopt;
    }
  }

  // (1 - F(v)) / f(v) in closed form; nullopt where the density vanishes or
  // does not exist.
  std::optional<double> inverse_hazard(double v) const noexcept {
    switch (kind_) {
      case Kind::kUniformInterval:
        if (v < a_ || v > b_) return std::nullopt;
        return b_ - v;
      case Kind::kExponential:
        if (v < 0.0) return std::nullopt;
        return 1.0 / a_;
      default:
        return std::nullopt;
    }
  }

  friend bool operator==(const ValueDistribution& x, const ValueDistribution& y) {
    return x.kind_ == y.kind_ && x.a_ == y.a_ && x.b_ == y.b_ && x.atoms_ == y.atoms_;
  }

 private:
  explicit ValueDistribution(Kind kind) : kind_(kind) {}

  void build_cumulative() {
    cumulative_.resize(atoms_.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      acc += atoms_[i].probability;
      cumulative_[i] = acc;
    }
    cumulative_.back() = 1.0;
  }

  // Smallest double y >= support_min() with cdf(y) >= q, starting from the
  // closed-form guess. Nonnegative doubles order like their bit patterns, so
  // this is a bisection on the integer view with cdf(lo) < q <= cdf(hi).
  double snap_quantile(double guess, double q) const {
    using Bits = std::uint64_t;
    const auto as_double = [](Bits b) { return std::bit_cast<double>(b); };
    const double floor_value = support_min();
    if (cdf(floor_value) >= q) return floor_value;
    Bits lo = std::bit_cast<Bits>(floor_value);
    Bits hi = std::bit_cast<Bits>(std::max(guess, floor_value));
    for (Bits step = 1; cdf(as_double(hi)) < q; step *= 2) {
      lo = hi;
      hi += step;
    }
    for (Bits step = 1; hi - lo > step; step *= 2) {
      if (cdf(as_double(hi - step)) < q) {
        lo = hi - step;
        break;
      }
      hi -= step;
    }
    while (hi - lo > 1) {
      const Bits mid = lo + (hi - lo) / 2;
      (cdf(as_double(mid)) >= q ? hi : lo) = mid;
    }
    return as_double(hi);
  }

  Kind kind_;
  double a_ = 0.0;  // uniform low, or exponential rate
  double b_ = 0.0;  // uniform high
  std::vector<Atom> atoms_;
  std::vector<double> cumulative_;
};

inline std::string to_string(ValueDistribution::Kind kind) {
  switch (kind) {
    case ValueDistribution::Kind::kFiniteSupport: return "finite-support";
    case ValueDistribution::Kind::kUniformInterval: return "uniform-interval";
    case ValueDistribution::Kind::kExponential: return "exponential";
    case ValueDistribution::Kind::kDegenerate: return "degenerate";
  }
  return "unknown";
}

// The product distribution D = D_1 x ... x D_n over independent awards.
class ProductInstance {
 public:
  explicit ProductInstance(std::vector<ValueDistribution> components)
      : components_(std::move(components)) {
    detail::require(!components_.empty(), ErrorKind::kInvalidArgument,
                    "product instance needs at least one component");
  }

  static ProductInstance iid(const ValueDistribution& dist, std::size_t n) {
    return ProductInstance(std::vector<ValueDistribution>(n, dist));
  }

  std::size_t size() const noexcept { return components_.size(); }
  const ValueDistribution& operator[](std::size_t i) const { return components_[i]; }
  std::span<const ValueDistribution> components() const noexcept { return components_; }

  bool atomless() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const ValueDistribution& d) { return d.atomless(); });
  }
  bool finite_support() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const ValueDistribution& d) { return d.has_finite_support(); });
  }
  bool bounded() const noexcept {
    return std::all_of(components_.begin(), components_.end(),
                       [](const ValueDistribution& d) { return d.bounded(); });
  }

  // Product of support sizes, saturating at SIZE_MAX; nullopt unless every
  // component has finite support.
  std::optional<std::size_t> outcome_count() const noexcept {
    if (!finite_support()) return std::nullopt;
    std::size_t total = 1;
    for (const auto& d : components_) {
      const std::size_t m = d.atoms().size();
      if (total > std::numeric_limits<std::size_t>::max() / m)
        return std::numeric_limits<std::size_t>::max();
      total *= m;
    }
    return total;
  }

  void sample_into(std::span<double> out, Rng& rng) const {
    for (std::size_t i = 0; i < components_.size(); ++i) out[i] = components_[i].sample(rng);
  }

  std::vector<double> sample(Rng& rng) const {
    std::vector<double> out(components_.size());
    sample_into(out, rng);
    return out;
  }

  // CDF of the maximum: the product of component CDFs.
  double max_cdf(double x) const noexcept {
    double p = 1.0;
    for (const auto& d : components_) {
      p *= d.cdf(x);
      if (p == 0.0) break;
    }
    return p;
  }

  friend bool operator==(const ProductInstance&, const ProductInstance&) = default;

 private:
  std::vector<ValueDistribution> components_;
};

inline constexpr int kRootFindingMaxIterations = 200;

// T = inf{t : prod_i F_i(t) >= q}, the q-quantile of the maximum.
//
// Instances made only of point masses are solved exactly over the union of
// atoms. Otherwise the root is bracketed (expanding upwards from 1) and
// bisected until the bracket cannot shrink further or the iteration cap hits.
inline double max_quantile(const ProductInstance& instance, double q) {
  detail::require(q > 0.0 && q <= 1.0, ErrorKind::kInvalidArgument,
                  "max_quantile level must lie in (0, 1]");
  if (q == 1.0 && !instance.bounded()) {
    throw Error(ErrorKind::kDegenerateThreshold,
                "the 1-quantile of an unbounded maximum is infinite");
  }

  if (instance.finite_support()) {
    std::vector<double> candidates;
    for (const auto& d : instance.components())
      for (const Atom& a : d.atoms()) candidates.push_back(a.value);
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (double c : candidates)
      if (instance.max_cdf(c) >= q) return c;
    return candidates.back();
  }

  if (instance.max_cdf(0.0) >= q) return 0.0;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; instance.max_cdf(hi) < q; ++i) {
    detail::require(i < 2000, ErrorKind::kDegenerateThreshold,
                    "could not bracket the max quantile");
    lo = hi;
    hi *= 2.0;
  }
  for (int i = 0; i < kRootFindingMaxIterations; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (instance.max_cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Myerson virtual valuation v - (1 - F(v)) / f(v).
inline double virtual_value(const ValueDistribution& dist, double v) {
  const auto h = dist.inverse_hazard(v);
  if (!h) {
    throw Error(ErrorKind::kUndefinedVirtualValue,
                "no positive density at v = " + std::to_string(v));
  }
  return v - *h;
}

inline constexpr std::size_t kRegularityGridSize = 1024;
inline constexpr double kRegularityTolerance = 1e-9;

namespace detail {

// Index of the first grid point where the virtual value drops by more than
// the tolerance, scanning quantile levels (j + 1/2) / grid_size.
template <class VirtualAtQuantile>
std::optional<std::size_t> first_regularity_violation(VirtualAtQuantile&& phi_at,
                                                      std::size_t grid_size = kRegularityGridSize) {
  double prev = -std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid_size; ++j) {
    const double q = (static_cast<double>(j) + 0.5) / static_cast<double>(grid_size);
    const double phi = phi_at(q);
    if (phi < prev - kRegularityTolerance) return j;
    prev = std::max(prev, phi);
  }
  return std::nullopt;
}

}  // namespace detail

inline bool is_regular(const ValueDistribution& dist) {
  return !detail::first_regularity_violation(
      [&](double q) { return virtual_value(dist, dist.quantile(q)); });
}

// Monopoly price: the zero of the virtual valuation, or the bottom of the
// support when the virtual value is already nonnegative there.
inline double monopoly_price(const ValueDistribution& dist) {
  if (!is_regular(dist)) {
    throw Error(ErrorKind::kRegularityViolation,
                "virtual valuation is not nondecreasing");
  }
  const double lo0 = dist.support_min();
  if (virtual_value(dist, lo0) >= 0.0) return lo0;
  double lo = lo0;
  double hi = lo0 + 1.0;
  const double top = dist.support_max();
  while (hi < top && virtual_value(dist, hi) < 0.0) {
    lo = hi;
    hi = lo0 + 2.0 * (hi - lo0);
  }
  hi = std::min(hi, top);
  for (int i = 0; i < kRootFindingMaxIterations; ++i) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (virtual_value(dist, mid) >= 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

// Worst-case instance for online algorithms with capacity k: award i <= k+1
// is x_i = i (2k - i + 3) / 2 with probability 1/x_i and 0 otherwise; the
// remaining n - k - 1 awards are identically zero. Each of the first k+1
// awards has expectation exactly 1.
inline ProductInstance hard_prophet_instance(std::size_t k, std::size_t n) {
  detail::require(k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
  detail::require(n >= k + 1, ErrorKind::kInvalidArgument, "n must be >= k + 1");
  std::vector<ValueDistribution> comps;
  comps.reserve(n);
  for (std::size_t i = 1; i <= k + 1; ++i) {
    const double x = static_cast<double>(i * (2 * k - i + 3)) / 2.0;
    comps.push_back(ValueDistribution::finite_support({{0.0, 1.0 - 1.0 / x}, {x, 1.0 / x}}));
  }
  while (comps.size() < n) comps.push_back(ValueDistribution::degenerate(0.0));
  return ProductInstance(std::move(comps));
}

struct SingleSampleConstants {
  std::vector<double> low;   // L_1 .. L_{k+1}
  std::vector<double> high;  // H_1 .. H_{k+1}
};

// L_i = i and H_i = L_{k+1} * ratio^i, which gives
// 0 < L_1 < ... < L_{k+1} < H_1 < ... < H_{k+1} with H_j / H_{j-1} = ratio.
inline SingleSampleConstants single_sample_constants(std::size_t k, double ratio) {
  SingleSampleConstants c;
  const double top_low = static_cast<double>(k + 1);
  double scale = 1.0;
  for (std::size_t i = 1; i <= k + 1; ++i) {
    scale *= ratio;
    c.low.push_back(static_cast<double>(i));
    c.high.push_back(top_low * scale);
  }
  return c;
}

// Instance used against single-sample algorithms: awards 1..j_bar are 50/50
// on {L_i, H_i}, awards j_bar+1..k+1 are fixed at L_i, the rest are zero.
inline ProductInstance single_sample_hard_instance(std::size_t k, std::size_t j_bar,
                                                   double ratio, std::size_t n) {
  detail::require(k >= 1, ErrorKind::kInvalidArgument, "k must be >= 1");
  detail::require(j_bar >= 1 && j_bar <= k + 1, ErrorKind::kInvalidArgument,
                  "j_bar must lie in [1, k + 1]");
  detail::require(ratio > 1.0 && std::isfinite(ratio), ErrorKind::kInvalidArgument,
                  "ratio must be > 1");
  detail::require(n >= k + 1, ErrorKind::kInvalidArgument, "n must be >= k + 1");
  const auto c = single_sample_constants(k, ratio);
  std::vector<ValueDistribution> comps;
  comps.reserve(n);
  for (std::size_t i = 0; i <= k; ++i) {
    if (i < j_bar) {
      comps.push_back(ValueDistribution::finite_support({{c.low[i], 0.5}, {c.high[i], 0.5}}));
    } else {
      comps.push_back(ValueDistribution::degenerate(c.low[i]));
    }
  }
  while (comps.size() < n) comps.push_back(ValueDistribution::degenerate(0.0));
  return ProductInstance(std::move(comps));
}

}  // namespace overbook
