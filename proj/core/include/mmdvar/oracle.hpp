#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include "mmdvar/estimators.hpp"
#include "mmdvar/gram_pack.hpp"
#include "mmdvar/terms.hpp"

namespace mmdvar {

// ---------------------------------------------------------------------------
// Nested-loop twins of the matrix estimators
// ---------------------------------------------------------------------------

/// Largest m accepted by the O(m^4) loops.
inline constexpr std::size_t kOracleMaxM = 30;

/// Evaluates the term's defining average over explicitly enumerated
/// ordered index tuples with no shared data point, reading individual Gram
/// entries only (no cached aggregates).
Real oracle_sub_term(const GramPack& g, const TermId& t);

/// oracle_sub_term for every term in variance_terms(g.has_z()).
TermTable oracle_sub_terms(const GramPack& g);

/// MMD^2_u as the literal double sum over i != j.
double oracle_mmd2_u(const GramPack& g, Comparison which = Comparison::XY);

// ---------------------------------------------------------------------------
// Exact variance expressions
// ---------------------------------------------------------------------------

/// Var[MMD^2_u(X, B)] at sample size m written in terms of the population
/// quantities in `terms` (B = Y or Z). Feeding unbiased term estimates
/// instead of population values gives an unbiased variance estimate.
double assemble_mmd_variance(std::size_t m, const TermLookup& terms,
                             Sample b = Sample::Y);

/// Var[MMD^2_u(X, Y) - MMD^2_u(X, Z)] in terms of the same quantities.
double assemble_diff_variance(std::size_t m, const TermLookup& terms);

/// First-order (zeta_1) and second-order (zeta_2) components of the
/// MMD^2_u U-statistic kernel h(U_1, U_2), U_i = (X_i, B_i).
double mmd_first_order(const TermLookup& terms, Sample b = Sample::Y);
double mmd_second_order(const TermLookup& terms, Sample b = Sample::Y);

/// xi_1 and xi_2 for the difference kernel f(W_1, W_2), W_i = (X_i, Y_i, Z_i).
double diff_first_order(const TermLookup& terms);
double diff_second_order(const TermLookup& terms);

// ---------------------------------------------------------------------------
// Population moments
// ---------------------------------------------------------------------------

/// Population values of every inner-product quantity, indexed by Sample.
struct PopulationMoments {
  using Table = std::array<std::array<double, 3>, 3>;

  Table mu{};           // <mu_A, mu_B>
  Table e_phi_sq{};     // E[<phi(A), mu_B>^2]
  std::array<Table, 3> e_phi_cross{};  // [A][B][C] = E[<phi(A), mu_B><phi(A), mu_C>]
  std::array<double, 3> e_k2_within{};  // E[k(A, A')^2]
  Table e_k2_cross{};   // E[k(A, B)^2]

  /// Population value of a term (products of embeddings multiplied out).
  double value(const TermId& t) const;
  TermLookup lookup() const {
    return [this](const TermId& t) { return value(t); };
  }
  /// MMD^2(P_X, P_B).
  double mmd2(Sample b = Sample::Y) const;
};

/// Independent scalar Gaussians X, Y, Z under the linear kernel k(x,y)=xy.
/// Variances may be zero (point masses).
struct GaussianLinearModel {
  double mean_x = 0.0, var_x = 1.0;
  double mean_y = 0.0, var_y = 1.0;
  double mean_z = 0.0, var_z = 1.0;

  double mean(Sample s) const;
  double variance(Sample s) const;
  /// Throws InputError on negative or non-finite parameters.
  void validate() const;
};

/// Closed forms. With s_A = E[A^2] = mean_A^2 + var_A:
///   <mu_A, mu_B> = mean_A mean_B        E[<phi(A), mu_B>^2] = s_A mean_B^2
///   E[<phi(A), mu_B><phi(A), mu_C>] = s_A mean_B mean_C
///   E[k(A, A')^2] = s_A^2                E[k(A, B)^2] = s_A s_B
PopulationMoments gaussian_linear_moments(const GaussianLinearModel& model);

struct VarianceDecomposition {
  double first_order = 0.0;   // zeta_1 or xi_1
  double second_order = 0.0;  // zeta_2 or xi_2
  double total = 0.0;         // V_m or nu_m
};

/// V_m = Var[MMD^2_u(X, Y)] from the collected closed form, together with
/// zeta_1 and zeta_2. Needs m >= 2.
VarianceDecomposition population_V(const PopulationMoments& mom, std::size_t m);

/// nu_m = Var[MMD^2_u(X, Y) - MMD^2_u(X, Z)] with xi_1, xi_2. Needs m >= 2.
VarianceDecomposition population_nu(const PopulationMoments& mom, std::size_t m);

// ---------------------------------------------------------------------------
// Direct nested Monte Carlo of the variance components
// ---------------------------------------------------------------------------

struct ComponentEstimate {
  double first_order = 0.0;
  double first_order_se = 0.0;
  double second_order = 0.0;
  double second_order_se = 0.0;
};

/// zeta_1 = Var_{U1}[E_{U2} h(U1, U2)] and zeta_2 = Var[h(U1, U2)] sampled
/// straight from h under the model: n_outer draws of U1, each with n_inner
/// draws of U2. The inner-mean noise is subtracted, so both estimates are
/// unbiased; standard errors come from a jackknife over outer draws.
/// Needs n_outer, n_inner >= 100. Deterministic for a fixed seed.
ComponentEstimate zeta_direct(const GaussianLinearModel& model,
                              std::size_t n_outer, std::size_t n_inner,
                              std::uint64_t seed, unsigned threads = 0);

/// Same for xi_1, xi_2 of the difference kernel f(W1, W2).
ComponentEstimate xi_direct(const GaussianLinearModel& model,
                            std::size_t n_outer, std::size_t n_inner,
                            std::uint64_t seed, unsigned threads = 0);

}  // namespace mmdvar
