#pragma once

#include <cmath>
#include <cstddef>
#include <span>

#include "overbook/error.hpp"

namespace overbook {

struct MeanEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Sample mean with the standard error from the unbiased sample variance.
// Summation runs in index order so the result is a pure function of the data.
inline MeanEstimate estimate_mean(std::span<const double> xs) {
  detail::require(!xs.empty(), ErrorKind::kInvalidArgument,
                  "estimate_mean needs at least one observation");
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  const double mean = sum / n;
  if (xs.size() == 1) return {mean, 0.0};
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

struct RatioEstimate {
  double ratio = 0.0;
  double std_error = 0.0;
  double numerator_mean = 0.0;
  double denominator_mean = 0.0;
};

// Ratio of means for paired observations (numerator and denominator taken on
// the same realization). Standard error via the delta method:
//   se(R) = sqrt(sum (a_t - R b_t)^2 / (N (N - 1))) / mean(b).
inline RatioEstimate estimate_ratio(std::span<const double> numerator,
                                    std::span<const double> denominator) {
  detail::require(numerator.size() == denominator.size() && !numerator.empty(),
                  ErrorKind::kInvalidArgument,
                  "estimate_ratio needs equally sized, non-empty samples");
  const double n = static_cast<double>(numerator.size());
  double sa = 0.0;
  double sb = 0.0;
  for (std::size_t i = 0; i < numerator.size(); ++i) {
    sa += numerator[i];
    sb += denominator[i];
  }
  RatioEstimate out;
  out.numerator_mean = sa / n;
  out.denominator_mean = sb / n;
  if (sb == 0.0) return out;
  out.ratio = sa / sb;
  if (numerator.size() > 1) {
    double ss = 0.0;
    for (std::size_t i = 0; i < numerator.size(); ++i) {
      const double r = numerator[i] - out.ratio * denominator[i];
      ss += r * r;
    }
    out.std_error = std::sqrt(ss / (n * (n - 1.0))) / out.denominator_mean;
  }
  return out;
}

// Binomial proportion with its plug-in standard error.
inline MeanEstimate estimate_proportion(std::size_t hits, std::size_t trials) {
  detail::require(trials > 0, ErrorKind::kInvalidArgument,
                  "estimate_proportion needs trials > 0");
  const double p = static_cast<double>(hits) / static_cast<double>(trials);
  return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(trials))};
}

}  // namespace overbook
