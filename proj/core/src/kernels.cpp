#include "mmdvar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "mmdvar/error.hpp"

namespace mmdvar {

std::string_view to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf: return "rbf";
    case KernelKind::Polynomial: return "poly";
    case KernelKind::Constant: return "const";
  }
  return "unknown";
}

KernelSpec KernelSpec::linear() {
  KernelSpec s;
  s.kind_ = KernelKind::Linear;
  return s;
}

KernelSpec KernelSpec::rbf(double bandwidth) {
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth)) {
    throw InputError("RBF bandwidth must be a positive finite number");
  }
  KernelSpec s;
  s.kind_ = KernelKind::Rbf;
  s.bandwidth_ = bandwidth;
  return s;
}

KernelSpec KernelSpec::rbf_median() {
  KernelSpec s;
  s.kind_ = KernelKind::Rbf;
  s.median_ = true;
  return s;
}

KernelSpec KernelSpec::polynomial(int degree, double coef0) {
  if (degree < 1) throw InputError("polynomial degree must be >= 1");
  if (!std::isfinite(coef0)) throw InputError("polynomial coef0 must be finite");
  KernelSpec s;
  s.kind_ = KernelKind::Polynomial;
  s.degree_ = degree;
  s.coef0_ = coef0;
  return s;
}

KernelSpec KernelSpec::constant(double value) {
  if (!std::isfinite(value)) throw InputError("constant kernel value must be finite");
  KernelSpec s;
  s.kind_ = KernelKind::Constant;
  s.value_ = value;
  return s;
}

KernelSpec KernelSpec::with_bandwidth(double sigma) const {
  if (kind_ != KernelKind::Rbf) return *this;
  KernelSpec s = rbf(sigma);
  s.median_ = median_;
  return s;
}

std::string KernelSpec::describe() const {
  char buf[128];
  switch (kind_) {
    case KernelKind::Linear: return "linear";
    case KernelKind::Rbf:
      if (!bandwidth_) return "rbf(bandwidth=median)";
      std::snprintf(buf, sizeof buf, "rbf(bandwidth=%.17g%s)", *bandwidth_,
                    median_ ? ", median" : "");
      return buf;
    case KernelKind::Polynomial:
      std::snprintf(buf, sizeof buf, "poly(degree=%d, coef0=%.17g)", degree_,
                    coef0_);
      return buf;
    case KernelKind::Constant:
      std::snprintf(buf, sizeof buf, "const(value=%.17g)", value_);
      return buf;
  }
  return "unknown";
}

namespace {

double dot(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double squared_distance(std::span<const double> x, std::span<const double> y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double diff = x[i] - y[i];
    s += diff * diff;
  }
  return s;
}

void check_arguments(const KernelSpec& spec, std::size_t dx, std::size_t dy) {
  if (dx != dy) {
    throw PreconditionError("kernel arguments have dimensions " +
                            std::to_string(dx) + " and " + std::to_string(dy));
  }
  if (!spec.resolved()) {
    throw PreconditionError(
        "RBF bandwidth is still 'median'; resolve it against data first");
  }
}

double power(double base, int degree) {
  double result = 1.0;
  for (int p = 0; p < degree; ++p) result *= base;
  return result;
}

}  // namespace

double eval_kernel(const KernelSpec& spec, std::span<const double> x,
                   std::span<const double> y) {
  double out = 0.0;
  check_arguments(spec, x.size(), y.size());
  switch (spec.kind()) {
    case KernelKind::Linear: out = dot(x, y); break;
    case KernelKind::Rbf: {
      const double sigma = *spec.bandwidth();
      out = std::exp(-squared_distance(x, y) / (2.0 * sigma * sigma));
      break;
    }
    case KernelKind::Polynomial: out = power(dot(x, y) + spec.coef0(), spec.degree()); break;
    case KernelKind::Constant: out = spec.value(); break;
  }
  return out;
}

void kernel_row(const KernelSpec& spec, std::span<const double> x,
                const SampleSet& ys, std::size_t begin, std::size_t end,
                double* out) {
  check_arguments(spec, x.size(), ys.dim());
  switch (spec.kind()) {
    case KernelKind::Linear:
      for (std::size_t j = begin; j < end; ++j) *out++ = dot(x, ys[j]);
      break;
    case KernelKind::Rbf: {
      const double sigma = *spec.bandwidth();
      const double denom = 2.0 * sigma * sigma;
      for (std::size_t j = begin; j < end; ++j) {
        *out++ = std::exp(-squared_distance(x, ys[j]) / denom);
      }
      break;
    }
    case KernelKind::Polynomial:
      for (std::size_t j = begin; j < end; ++j) {
        *out++ = power(dot(x, ys[j]) + spec.coef0(), spec.degree());
      }
      break;
    case KernelKind::Constant:
      std::fill(out, out + (end - begin), spec.value());
      break;
  }
}

namespace {

/// Middle value of the squared distances, averaging the two central order
/// statistics when the count is even. Reorders `dist`; `offset` is the
/// number of smaller values that were dropped before the call.
double middle_sq(std::vector<double>& dist, std::size_t lo_rank, std::size_t hi_rank,
                 std::size_t offset) {
  const auto hi = dist.begin() + static_cast<std::ptrdiff_t>(hi_rank - offset);
  std::nth_element(dist.begin(), hi, dist.end());
  const double upper = std::sqrt(*hi);
  if (lo_rank == hi_rank) return upper;
  const auto lo = dist.begin() + static_cast<std::ptrdiff_t>(lo_rank - offset);
  const double lower = std::sqrt(*std::max_element(dist.begin(), lo + 1));
  return 0.5 * (lower + upper);
}

template <class F>
void for_each_pair(const SampleSet& s, F&& f) {
  const std::size_t n = s.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto xi = s[i];
    for (std::size_t j = i + 1; j < n; ++j) f(squared_distance(xi, s[j]));
  }
}

}  // namespace

double median_heuristic(const SampleSet& pooled) {
  const std::size_t n = pooled.size();
  if (n < 2) {
    throw PreconditionError("median heuristic needs at least 2 pooled rows");
  }
  // Squared distances order the same way, so only the middle values need a
  // square root.
  const std::size_t pairs = n * (n - 1) / 2;
  const std::size_t hi_rank = pairs / 2;
  const std::size_t lo_rank = pairs % 2 == 0 ? hi_rank - 1 : hi_rank;

  double median = 0.0;
  bool done = false;
  constexpr std::size_t kSample = 8192;
  if (pairs > 16 * kSample) {
    // Bracket the middle using a fixed subsample, then keep only the
    // distances inside the bracket. The ranks are checked afterwards, so a
    // bad bracket only costs the fallback below, never a different answer.
    std::vector<double> sample;
    sample.reserve(kSample);
    for (std::size_t k = 0; sample.size() < kSample; ++k) {
      const std::size_t i = (k * 7919) % n;
      const std::size_t j = (k * 104729 + 1) % n;
      if (i != j) sample.push_back(squared_distance(pooled[i], pooled[j]));
    }
    std::sort(sample.begin(), sample.end());
    const double lo_cut = sample[kSample * 45 / 100];
    const double hi_cut = sample[kSample * 55 / 100];

    // Branch-free partition: the three-way split is close to random, so a
    // branch here would mispredict on most pairs.
    std::size_t below = 0;
    std::size_t count = 0;
    std::vector<double> kept(pairs / 8 + n);
    bool overflow = false;
    for (std::size_t i = 0; i < n && !overflow; ++i) {
      const auto xi = pooled[i];
      for (std::size_t j = i + 1; j < n; ++j) {
        const double d = squared_distance(xi, pooled[j]);
        below += static_cast<std::size_t>(d < lo_cut);
        kept[count] = d;
        count += static_cast<std::size_t>(d >= lo_cut) & static_cast<std::size_t>(d <= hi_cut);
      }
      overflow = count + n > kept.size();
    }
    kept.resize(count);
    if (!overflow && below <= lo_rank && below + kept.size() > hi_rank) {
      median = middle_sq(kept, lo_rank, hi_rank, below);
      done = true;
    }
  }
  if (!done) {
    std::vector<double> dist;
    dist.reserve(pairs);
    for_each_pair(pooled, [&](double d) { dist.push_back(d); });
    median = middle_sq(dist, lo_rank, hi_rank, 0);
  }
  if (!(median > 0.0)) {
    throw PreconditionError("degenerate pooled sample: median pairwise distance is zero");
  }
  return median;
}

KernelSpec resolve_bandwidth(const KernelSpec& spec,
                             std::span<const SampleSet* const> samples) {
  if (spec.resolved()) return spec;
  return spec.with_bandwidth(median_heuristic(SampleSet::pooled(samples)));
}

}  // namespace mmdvar
