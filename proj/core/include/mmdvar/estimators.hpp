#pragma once

#include <cstdint>
#include <optional>

#include "mmdvar/gram_pack.hpp"
#include "mmdvar/terms.hpp"

namespace mmdvar {

inline constexpr double kDefaultFloorEpsilon = 1e-12;

/// (m)_k = m (m-1) ... (m-k+1). Throws PreconditionError if m < k and
/// std::overflow_error if the result does not fit in 64 bits.
std::uint64_t falling_factorial(std::uint64_t m, std::uint64_t k);

enum class Comparison { XY, XZ };

/// Unbiased MMD^2 U-statistic
///
///   1/(m(m-1)) sum_{i != j} [k(A_i,A_j) + k(B_i,B_j) - k(A_i,B_j) - k(A_j,B_i)]
///
/// with A = X and B = Y (or Z). Terms k(A_i, B_i) never enter.
double mmd2_u(const GramPack& g, Comparison which = Comparison::XY);

// Unbiased estimators of the individual variance terms. Each one sums
// only over index tuples that share no data point, so products of
// expectations are estimated without bias. All run in O(m) on the cached
// aggregates of the pack. Cross pairs follow GramPack::cross. Values come
// back in extended precision for use in further sums.

/// <mu_A, mu_B>: grand sum over m^2 (cross) or over m(m-1) (A == B).
Real estimate_mu_inner(const GramPack& g, Sample a, Sample b);

/// <mu_A, mu_B>^2 for a cross pair.
Real estimate_mu_inner_sq_cross(const GramPack& g, Sample a, Sample b);

/// <mu_A, mu_A>^2. Needs m >= 4.
Real estimate_mu_inner_sq_within(const GramPack& g, Sample a);

/// <mu_A, mu_A> <mu_A, mu_B>. Needs m >= 3.
Real estimate_prod_within_cross(const GramPack& g, Sample a, Sample b);

/// <mu_X, mu_Y> <mu_X, mu_Z>.
Real estimate_prod_two_cross(const GramPack& g);

/// E[<phi(A), mu_A>^2]. Needs m >= 3.
Real estimate_e_phi_own_sq(const GramPack& g, Sample a);

/// E[<phi(A), mu_B>^2] for a cross pair.
Real estimate_e_phi_other_sq(const GramPack& g, Sample a, Sample b);

/// E[<phi(A), mu_A> <phi(A), mu_B>] for a cross pair.
Real estimate_e_phi_own_other(const GramPack& g, Sample a, Sample b);

/// E[<phi(X), mu_Y> <phi(X), mu_Z>].
Real estimate_e_phi_two_other(const GramPack& g);

/// E[k(A, A')^2] (A == B) or E[k(A, B)^2].
Real estimate_e_k2(const GramPack& g, Sample a, Sample b);

/// Dispatches to the estimator for `t`.
Real estimate_term(const GramPack& g, const TermId& t);

/// Estimates of every term in variance_terms(g.has_z()).
TermTable estimate_sub_terms(const GramPack& g);

/// Unbiased estimate of Var[MMD^2_u(X, B)], B = Y or Z. Needs m >= 4.
/// May be negative.
double vhat_m(const GramPack& g, Comparison which = Comparison::XY);

/// Unbiased estimate of Var[MMD^2_u(X, Y) - MMD^2_u(X, Z)]. Needs m >= 4
/// and a Z sample. May be negative.
double nuhat_m(const GramPack& g);

struct EstimateReport {
  std::size_t m = 0;
  std::optional<KernelSpec> kernel;
  double mmd2_xy = 0.0;
  std::optional<double> mmd2_xz;
  std::optional<double> diff;  // mmd2_xy - mmd2_xz
  double vhat = 0.0;
  double vhat_floored = 0.0;
  std::optional<double> nuhat;
  std::optional<double> nuhat_floored;
  /// diff / sqrt(nuhat_floored) with a Z sample, else
  /// mmd2_xy / sqrt(vhat_floored). Normal-approximation convenience only.
  double z_stat = 0.0;
};

/// Every statistic for the pack. Raw variance estimates are reported
/// unclamped next to copies floored at `floor_epsilon`.
EstimateReport full_report(const GramPack& g,
                           double floor_epsilon = kDefaultFloorEpsilon);

}  // namespace mmdvar
