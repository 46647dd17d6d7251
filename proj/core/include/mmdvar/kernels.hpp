#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "mmdvar/sample_set.hpp"

namespace mmdvar {

enum class KernelKind { Linear, Rbf, Polynomial, Constant };

std::string_view to_string(KernelKind kind);

/// Declarative kernel choice.
///
///   Linear      k(x, y) = <x, y>
///   Rbf         k(x, y) = exp(-||x - y||^2 / (2 sigma^2))
///   Polynomial  k(x, y) = (<x, y> + coef0)^degree
///   Constant    k(x, y) = value
///
/// An RBF kernel may carry a numeric bandwidth or defer to the median
/// heuristic; a deferred bandwidth has to be resolved against data before
/// evaluation. Constant is meant for testing and is PSD iff value >= 0.
class KernelSpec {
 public:
  static KernelSpec linear();
  static KernelSpec rbf(double bandwidth);
  static KernelSpec rbf_median();
  static KernelSpec polynomial(int degree, double coef0);
  static KernelSpec constant(double value);

  KernelKind kind() const noexcept { return kind_; }
  /// Numeric RBF bandwidth, empty while the median heuristic is pending.
  std::optional<double> bandwidth() const noexcept { return bandwidth_; }
  bool wants_median() const noexcept { return median_; }
  bool resolved() const noexcept {
    return kind_ != KernelKind::Rbf || bandwidth_.has_value();
  }
  int degree() const noexcept { return degree_; }
  double coef0() const noexcept { return coef0_; }
  double value() const noexcept { return value_; }

  /// Same kernel with the median-heuristic bandwidth replaced by `sigma`.
  /// Records that the bandwidth came from the heuristic.
  KernelSpec with_bandwidth(double sigma) const;

  std::string describe() const;

 private:
  KernelSpec() = default;

  KernelKind kind_ = KernelKind::Linear;
  std::optional<double> bandwidth_;
  bool median_ = false;
  int degree_ = 1;
  double coef0_ = 0.0;
  double value_ = 0.0;
};

/// k(x, y). Symmetric in its arguments bit for bit.
double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y);

/// out[j - begin] = k(x, ys[j]) for j in [begin, end): eval_kernel with
/// its checks hoisted out of the loop, bit-identical entry by entry.
void kernel_row(const KernelSpec& spec, std::span<const double> x,
                const SampleSet& ys, std::size_t begin, std::size_t end,
                double* out);

/// Median Euclidean distance over all unordered pairs of distinct rows
/// (zero distances between duplicate rows included). Even pair counts
/// average the two middle values.
double median_heuristic(const SampleSet& pooled);

/// Resolves a median-heuristic RBF bandwidth against the pooled samples;
/// any other spec is returned unchanged.
KernelSpec resolve_bandwidth(const KernelSpec& spec,
                             std::span<const SampleSet* const> samples);

}  // namespace mmdvar
