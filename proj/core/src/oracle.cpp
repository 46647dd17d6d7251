#include "mmdvar/oracle.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "mmdvar/error.hpp"
#include "mmdvar/random.hpp"
#include "parallel.hpp"

namespace mmdvar {

namespace {

std::size_t idx(Sample s) { return static_cast<std::size_t>(s); }

Real dm(std::size_t m) { return static_cast<Real>(m); }

// Loops below follow the defining sums literally: every index ranges over
// 0..m-1 and excluded coincidences are skipped one by one.

Real loop_mu_inner(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  Real s = 0;
  if (a == b) {
    const Matrix& k = g.within(a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) s += k(i, j);
    return s / (dm(m) * dm(m - 1));
  }
  const CrossView k = g.cross(a, b);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) s += k(i, j);
  return s / (dm(m) * dm(m));
}

// sum_{i,j} sum_{i' != i} sum_{j' != j} k(A_i,B_j) k(A_i',B_j')
Real loop_mu_inner_sq_cross(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  const CrossView k = g.cross(a, b);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i2 = 0; i2 < m; ++i2) {
        if (i2 == i) continue;
        for (std::size_t j2 = 0; j2 < m; ++j2) {
          if (j2 == j) continue;
          s += Real(k(i, j)) * k(i2, j2);
        }
      }
  return s / (dm(m) * dm(m) * dm(m - 1) * dm(m - 1));
}

// sum over ordered distinct (i, j, a, b) of k(A_i,A_j) k(A_a,A_b)
Real loop_mu_inner_sq_within(const GramPack& g, Sample s_) {
  const std::size_t m = g.m();
  const Matrix& k = g.within(s_);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t a = 0; a < m; ++a) {
        if (a == i || a == j) continue;
        for (std::size_t b = 0; b < m; ++b) {
          if (b == i || b == j || b == a) continue;
          s += Real(k(i, j)) * k(a, b);
        }
      }
    }
  return s / (dm(m) * dm(m - 1) * dm(m - 2) * dm(m - 3));
}

// sum_i sum_{j != i} sum_{l not in {i,j}} sum_c k(A_i,A_j) k(A_l,B_c)
Real loop_prod_within_cross(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  const Matrix& kaa = g.within(a);
  const CrossView kab = g.cross(a, b);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == i || l == j) continue;
        for (std::size_t c = 0; c < m; ++c) s += Real(kaa(i, j)) * kab(l, c);
      }
    }
  return s / (dm(m) * dm(m) * dm(m - 1) * dm(m - 2));
}

// sum_i sum_a sum_{j != i} sum_b k(X_i,Y_a) k(X_j,Z_b)
Real loop_prod_two_cross(const GramPack& g) {
  const std::size_t m = g.m();
  const CrossView kxy = g.cross(Sample::X, Sample::Y);
  const CrossView kxz = g.cross(Sample::X, Sample::Z);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t j = 0; j < m; ++j) {
        if (j == i) continue;
        for (std::size_t b = 0; b < m; ++b) s += Real(kxy(i, a)) * kxz(j, b);
      }
  return s / (dm(m) * dm(m) * dm(m) * dm(m - 1));
}

// sum_i sum_{j != i} sum_{l not in {i,j}} k(A_i,A_j) k(A_i,A_l)
Real loop_e_phi_own_sq(const GramPack& g, Sample a) {
  const std::size_t m = g.m();
  const Matrix& k = g.within(a);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t l = 0; l < m; ++l) {
        if (l == i || l == j) continue;
        s += Real(k(i, j)) * k(i, l);
      }
    }
  return s / (dm(m) * dm(m - 1) * dm(m - 2));
}

// sum_i sum_j sum_{l != j} k(A_i,B_j) k(A_i,B_l)
Real loop_e_phi_other_sq(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  const CrossView k = g.cross(a, b);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < m; ++l) {
        if (l == j) continue;
        s += Real(k(i, j)) * k(i, l);
      }
  return s / (dm(m) * dm(m) * dm(m - 1));
}

// sum_i sum_{j != i} sum_l k(A_i,A_j) k(A_i,B_l)
Real loop_e_phi_own_other(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  const Matrix& kaa = g.within(a);
  const CrossView kab = g.cross(a, b);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      for (std::size_t l = 0; l < m; ++l) s += Real(kaa(i, j)) * kab(i, l);
    }
  return s / (dm(m) * dm(m) * dm(m - 1));
}

// sum_{i,j,l} k(X_i,Y_j) k(X_i,Z_l)
Real loop_e_phi_two_other(const GramPack& g) {
  const std::size_t m = g.m();
  const CrossView kxy = g.cross(Sample::X, Sample::Y);
  const CrossView kxz = g.cross(Sample::X, Sample::Z);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t l = 0; l < m; ++l) s += Real(kxy(i, j)) * kxz(i, l);
  return s / (dm(m) * dm(m) * dm(m));
}

Real loop_e_k2(const GramPack& g, Sample a, Sample b) {
  const std::size_t m = g.m();
  Real s = 0;
  if (a == b) {
    const Matrix& k = g.within(a);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j)
        if (j != i) s += Real(k(i, j)) * k(i, j);
    return s / (dm(m) * dm(m - 1));
  }
  const CrossView k = g.cross(a, b);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) s += Real(k(i, j)) * k(i, j);
  return s / (dm(m) * dm(m));
}

}  // namespace

Real oracle_sub_term(const GramPack& g, const TermId& t) {
  validate(t);
  if (g.m() > kOracleMaxM) {
    throw PreconditionError("oracle loops are limited to m <= " +
                            std::to_string(kOracleMaxM) + ", got m = " +
                            std::to_string(g.m()));
  }
  if (g.m() < min_sample_size(t)) {
    throw PreconditionError(name(t) + " requires m ≥ " +
                            std::to_string(min_sample_size(t)));
  }
  if (needs_z(t) && !g.has_z()) {
    throw PreconditionError(name(t) + " requires a Z sample");
  }
  switch (t.kind) {
    case TermKind::MuInner: return loop_mu_inner(g, t.a, t.b);
    case TermKind::MuInnerSq:
      return t.a == t.b ? loop_mu_inner_sq_within(g, t.a)
                        : loop_mu_inner_sq_cross(g, t.a, t.b);
    case TermKind::ProdWithinCross: return loop_prod_within_cross(g, t.a, t.b);
    case TermKind::ProdTwoCross: return loop_prod_two_cross(g);
    case TermKind::EPhiOwnSq: return loop_e_phi_own_sq(g, t.a);
    case TermKind::EPhiOtherSq: return loop_e_phi_other_sq(g, t.a, t.b);
    case TermKind::EPhiOwnOther: return loop_e_phi_own_other(g, t.a, t.b);
    case TermKind::EPhiTwoOther: return loop_e_phi_two_other(g);
    case TermKind::EK2: return loop_e_k2(g, t.a, t.b);
  }
  throw InputError("unknown term kind");
}

TermTable oracle_sub_terms(const GramPack& g) {
  TermTable table;
  for (const TermId& t : variance_terms(g.has_z())) table.set(t, oracle_sub_term(g, t));
  return table;
}

double oracle_mmd2_u(const GramPack& g, Comparison which) {
  const Sample b = which == Comparison::XY ? Sample::Y : Sample::Z;
  const std::size_t m = g.m();
  const Matrix& kxx = g.within(Sample::X);
  const Matrix& kbb = g.within(b);
  const CrossView kxb = g.cross(Sample::X, b);
  Real s = 0;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (j == i) continue;
      s += kxx(i, j) + kbb(i, j) - kxb(i, j) - kxb(j, i);
    }
  return s / (dm(m) * dm(m - 1));
}

// ---------------------------------------------------------------------------

double assemble_mmd_variance(std::size_t m, const TermLookup& t, Sample b) {
  if (m < 2) throw PreconditionError("variance expression requires m ≥ 2");
  using S = Sample;
  const S x = S::X;
  const Real md = dm(m);
  const Real bracket =
      2.0 * (md - 2.0) * t(TermId::e_phi_own_sq(x)) -
      (2.0 * md - 3.0) * t(TermId::mu_inner_sq(x, x)) +
      2.0 * (md - 2.0) * t(TermId::e_phi_own_sq(b)) -
      (2.0 * md - 3.0) * t(TermId::mu_inner_sq(b, b)) +
      2.0 * (md - 2.0) *
          (t(TermId::e_phi_other_sq(x, b)) + t(TermId::e_phi_other_sq(b, x))) -
      (4.0 * md - 6.0) * t(TermId::mu_inner_sq(x, b)) -
      4.0 * (md - 1.0) * t(TermId::e_phi_own_other(x, b)) +
      4.0 * (md - 1.0) * t(TermId::prod_within_cross(x, b)) -
      4.0 * (md - 1.0) * t(TermId::e_phi_own_other(b, x)) +
      4.0 * (md - 1.0) * t(TermId::prod_within_cross(b, x)) +
      t(TermId::e_k2(x, x)) + t(TermId::e_k2(b, b)) + 2.0 * t(TermId::e_k2(x, b));
  return 2.0 / (md * (md - 1.0)) * bracket;
}

double assemble_diff_variance(std::size_t m, const TermLookup& t) {
  if (m < 2) throw PreconditionError("variance expression requires m ≥ 2");
  using S = Sample;
  const Real md = dm(m);
  const Real bracket =
      2.0 * (md - 2.0) *
          (t(TermId::e_phi_other_sq(S::X, S::Y)) + t(TermId::e_phi_other_sq(S::X, S::Z)) +
           t(TermId::e_phi_other_sq(S::Y, S::X)) + t(TermId::e_phi_other_sq(S::Z, S::X))) +
      2.0 * (md - 2.0) *
          (t(TermId::e_phi_own_sq(S::Y)) + t(TermId::e_phi_own_sq(S::Z))) -
      2.0 * (2.0 * md - 3.0) *
          (t(TermId::mu_inner_sq(S::X, S::Y)) + t(TermId::mu_inner_sq(S::X, S::Z))) -
      (2.0 * md - 3.0) *
          (t(TermId::mu_inner_sq(S::Y, S::Y)) + t(TermId::mu_inner_sq(S::Z, S::Z))) +
      4.0 * (md - 1.0) *
          (t(TermId::prod_two_cross()) + t(TermId::prod_within_cross(S::Y, S::X)) +
           t(TermId::prod_within_cross(S::Z, S::X))) -
      4.0 * (md - 1.0) * t(TermId::e_phi_two_other()) -
      4.0 * (md - 1.0) * t(TermId::e_phi_own_other(S::Y, S::X)) -
      4.0 * (md - 1.0) * t(TermId::e_phi_own_other(S::Z, S::X)) +
      2.0 * t(TermId::e_k2(S::X, S::Y)) + 2.0 * t(TermId::e_k2(S::X, S::Z)) +
      t(TermId::e_k2(S::Y, S::Y)) + t(TermId::e_k2(S::Z, S::Z));
  return 2.0 / (md * (md - 1.0)) * bracket;
}

double mmd_first_order(const TermLookup& t, Sample b) {
  const Sample x = Sample::X;
  return Real(t(TermId::e_phi_own_sq(x))) - t(TermId::mu_inner_sq(x, x)) +
         t(TermId::e_phi_own_sq(b)) - t(TermId::mu_inner_sq(b, b)) +
         t(TermId::e_phi_other_sq(x, b)) - t(TermId::mu_inner_sq(x, b)) +
         t(TermId::e_phi_other_sq(b, x)) - t(TermId::mu_inner_sq(x, b)) -
         2.0 * t(TermId::e_phi_own_other(x, b)) +
         2.0 * t(TermId::prod_within_cross(x, b)) -
         2.0 * t(TermId::e_phi_own_other(b, x)) +
         2.0 * t(TermId::prod_within_cross(b, x));
}

double mmd_second_order(const TermLookup& t, Sample b) {
  const Sample x = Sample::X;
  return Real(t(TermId::e_k2(x, x))) - t(TermId::mu_inner_sq(x, x)) +
         t(TermId::e_k2(b, b)) - t(TermId::mu_inner_sq(b, b)) +
         2.0 * t(TermId::e_k2(x, b)) - 2.0 * t(TermId::mu_inner_sq(x, b)) -
         4.0 * t(TermId::e_phi_own_other(x, b)) +
         4.0 * t(TermId::prod_within_cross(x, b)) -
         4.0 * t(TermId::e_phi_own_other(b, x)) +
         4.0 * t(TermId::prod_within_cross(b, x));
}

double diff_first_order(const TermLookup& t) {
  using S = Sample;
  return Real(t(TermId::e_phi_other_sq(S::X, S::Y))) - t(TermId::mu_inner_sq(S::X, S::Y)) +
         t(TermId::e_phi_other_sq(S::X, S::Z)) - t(TermId::mu_inner_sq(S::X, S::Z)) +
         t(TermId::e_phi_other_sq(S::Y, S::X)) - t(TermId::mu_inner_sq(S::X, S::Y)) +
         t(TermId::e_phi_own_sq(S::Y)) - t(TermId::mu_inner_sq(S::Y, S::Y)) +
         t(TermId::e_phi_other_sq(S::Z, S::X)) - t(TermId::mu_inner_sq(S::X, S::Z)) +
         t(TermId::e_phi_own_sq(S::Z)) - t(TermId::mu_inner_sq(S::Z, S::Z)) -
         2.0 * t(TermId::e_phi_two_other()) + 2.0 * t(TermId::prod_two_cross()) -
         2.0 * t(TermId::e_phi_own_other(S::Y, S::X)) +
         2.0 * t(TermId::prod_within_cross(S::Y, S::X)) -
         2.0 * t(TermId::e_phi_own_other(S::Z, S::X)) +
         2.0 * t(TermId::prod_within_cross(S::Z, S::X));
}

double diff_second_order(const TermLookup& t) {
  using S = Sample;
  return Real(2.0 * t(TermId::e_k2(S::X, S::Y))) - 2.0 * t(TermId::mu_inner_sq(S::X, S::Y)) +
         2.0 * t(TermId::e_k2(S::X, S::Z)) - 2.0 * t(TermId::mu_inner_sq(S::X, S::Z)) +
         t(TermId::e_k2(S::Y, S::Y)) - t(TermId::mu_inner_sq(S::Y, S::Y)) +
         t(TermId::e_k2(S::Z, S::Z)) - t(TermId::mu_inner_sq(S::Z, S::Z)) -
         4.0 * t(TermId::e_phi_two_other()) + 4.0 * t(TermId::prod_two_cross()) -
         4.0 * t(TermId::e_phi_own_other(S::Y, S::X)) +
         4.0 * t(TermId::prod_within_cross(S::Y, S::X)) -
         4.0 * t(TermId::e_phi_own_other(S::Z, S::X)) +
         4.0 * t(TermId::prod_within_cross(S::Z, S::X));
}

// ---------------------------------------------------------------------------

double PopulationMoments::value(const TermId& t) const {
  const std::size_t a = idx(t.a), b = idx(t.b), c = idx(t.c);
  switch (t.kind) {
    case TermKind::MuInner: return mu[a][b];
    case TermKind::MuInnerSq: return mu[a][b] * mu[a][b];
    case TermKind::ProdWithinCross: return mu[a][a] * mu[a][b];
    case TermKind::ProdTwoCross: return mu[a][b] * mu[a][c];
    case TermKind::EPhiOwnSq: return e_phi_sq[a][a];
    case TermKind::EPhiOtherSq: return e_phi_sq[a][b];
    case TermKind::EPhiOwnOther: return e_phi_cross[a][a][b];
    case TermKind::EPhiTwoOther: return e_phi_cross[a][b][c];
    case TermKind::EK2: return a == b ? e_k2_within[a] : e_k2_cross[a][b];
  }
  return 0.0;
}

double PopulationMoments::mmd2(Sample b) const {
  const std::size_t x = idx(Sample::X), j = idx(b);
  return mu[x][x] + mu[j][j] - 2.0 * mu[x][j];
}

double GaussianLinearModel::mean(Sample s) const {
  switch (s) {
    case Sample::X: return mean_x;
    case Sample::Y: return mean_y;
    case Sample::Z: return mean_z;
  }
  return 0.0;
}

double GaussianLinearModel::variance(Sample s) const {
  switch (s) {
    case Sample::X: return var_x;
    case Sample::Y: return var_y;
    case Sample::Z: return var_z;
  }
  return 0.0;
}

void GaussianLinearModel::validate() const {
  for (Sample s : {Sample::X, Sample::Y, Sample::Z}) {
    if (!std::isfinite(mean(s)) || !std::isfinite(variance(s)) || variance(s) < 0.0) {
      throw InputError("model for " + std::string(to_string(s)) +
                       " needs a finite mean and a finite non-negative variance");
    }
  }
}

PopulationMoments gaussian_linear_moments(const GaussianLinearModel& model) {
  model.validate();
  PopulationMoments mom;
  std::array<double, 3> mean{}, second{};
  for (Sample s : {Sample::X, Sample::Y, Sample::Z}) {
    mean[idx(s)] = model.mean(s);
    second[idx(s)] = model.mean(s) * model.mean(s) + model.variance(s);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    mom.e_k2_within[a] = second[a] * second[a];
    for (std::size_t b = 0; b < 3; ++b) {
      mom.mu[a][b] = mean[a] * mean[b];
      mom.e_phi_sq[a][b] = second[a] * mean[b] * mean[b];
      mom.e_k2_cross[a][b] = second[a] * second[b];
      for (std::size_t c = 0; c < 3; ++c)
        mom.e_phi_cross[a][b][c] = second[a] * mean[b] * mean[c];
    }
  }
  return mom;
}

VarianceDecomposition population_V(const PopulationMoments& mom, std::size_t m) {
  const TermLookup t = mom.lookup();
  return {mmd_first_order(t), mmd_second_order(t), assemble_mmd_variance(m, t)};
}

VarianceDecomposition population_nu(const PopulationMoments& mom, std::size_t m) {
  const TermLookup t = mom.lookup();
  return {diff_first_order(t), diff_second_order(t), assemble_diff_variance(m, t)};
}

// ---------------------------------------------------------------------------

namespace {

struct OuterUnit {
  double mean = 0.0;      // inner mean of the U-statistic kernel
  double variance = 0.0;  // inner sample variance (n_inner - 1 divisor)
};

/// Unbiased first/second-order components from per-outer-draw inner
/// moments, with delete-one jackknife standard errors.
ComponentEstimate reduce_components(const std::vector<OuterUnit>& units,
                                    std::size_t n_inner) {
  const std::size_t n = units.size();
  const double nd = static_cast<double>(n);
  const double inv_inner = 1.0 / static_cast<double>(n_inner);

  double mean_of_means = 0.0, mean_of_vars = 0.0;
  for (const OuterUnit& u : units) {
    mean_of_means += u.mean;
    mean_of_vars += u.variance;
  }
  mean_of_means /= nd;
  mean_of_vars /= nd;
  double ss = 0.0;
  for (const OuterUnit& u : units) {
    const double d = u.mean - mean_of_means;
    ss += d * d;
  }

  // first = var(means) - mean(vars)/n_inner, second = var(means) + mean(vars)(1 - 1/n_inner)
  auto first = [&](double var_means, double mv) { return var_means - mv * inv_inner; };
  auto second = [&](double var_means, double mv) {
    return var_means + mv * (1.0 - inv_inner);
  };

  ComponentEstimate est;
  const double var_means = ss / (nd - 1.0);
  est.first_order = first(var_means, mean_of_vars);
  est.second_order = second(var_means, mean_of_vars);

  std::vector<double> loo_first(n), loo_second(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double d = units[i].mean - mean_of_means;
    const double ss_loo = ss - d * d * nd / (nd - 1.0);
    const double vm_loo = ss_loo / (nd - 2.0);
    const double mv_loo = (mean_of_vars * nd - units[i].variance) / (nd - 1.0);
    loo_first[i] = first(vm_loo, mv_loo);
    loo_second[i] = second(vm_loo, mv_loo);
  }
  auto jackknife_se = [nd](const std::vector<double>& loo) {
    double mean = 0.0;
    for (double v : loo) mean += v;
    mean /= nd;
    double s = 0.0;
    for (double v : loo) s += (v - mean) * (v - mean);
    return std::sqrt((nd - 1.0) / nd * s);
  };
  est.first_order_se = jackknife_se(loo_first);
  est.second_order_se = jackknife_se(loo_second);
  return est;
}

void check_nested_sizes(std::size_t n_outer, std::size_t n_inner) {
  if (n_outer < 100 || n_inner < 100) {
    throw InputError("nested Monte Carlo needs at least 100 outer and 100 inner draws");
  }
}

template <typename DrawUnit, typename Kernel>
ComponentEstimate nested_components(std::size_t n_outer, std::size_t n_inner,
                                    std::uint64_t seed, unsigned threads,
                                    DrawUnit draw, Kernel kernel) {
  std::vector<OuterUnit> units(n_outer);
  detail::parallel_for(n_outer, threads, [&](std::size_t o) {
    StreamRng rng(seed, o);
    const auto u1 = draw(rng);
    double mean = 0.0, m2 = 0.0;
    for (std::size_t r = 0; r < n_inner; ++r) {
      const double h = kernel(u1, draw(rng));
      const double delta = h - mean;
      mean += delta / static_cast<double>(r + 1);
      m2 += delta * (h - mean);
    }
    units[o] = {mean, m2 / static_cast<double>(n_inner - 1)};
  });
  return reduce_components(units, n_inner);
}

}  // namespace

ComponentEstimate zeta_direct(const GaussianLinearModel& model,
                              std::size_t n_outer, std::size_t n_inner,
                              std::uint64_t seed, unsigned threads) {
  model.validate();
  check_nested_sizes(n_outer, n_inner);
  struct Pair {
    double x, y;
  };
  auto draw = [&model](StreamRng& rng) {
    const double x = rng.normal(model.mean_x, model.var_x);
    const double y = rng.normal(model.mean_y, model.var_y);
    return Pair{x, y};
  };
  // h(U1, U2) = k(X1,X2) + k(Y1,Y2) - k(X1,Y2) - k(X2,Y1), k(a,b) = ab
  auto h = [](const Pair& u1, const Pair& u2) {
    return u1.x * u2.x + u1.y * u2.y - u1.x * u2.y - u2.x * u1.y;
  };
  return nested_components(n_outer, n_inner, seed, threads, draw, h);
}

ComponentEstimate xi_direct(const GaussianLinearModel& model,
                            std::size_t n_outer, std::size_t n_inner,
                            std::uint64_t seed, unsigned threads) {
  model.validate();
  check_nested_sizes(n_outer, n_inner);
  struct Triple {
    double x, y, z;
  };
  auto draw = [&model](StreamRng& rng) {
    const double x = rng.normal(model.mean_x, model.var_x);
    const double y = rng.normal(model.mean_y, model.var_y);
    const double z = rng.normal(model.mean_z, model.var_z);
    return Triple{x, y, z};
  };
  // f(W1, W2) = [k(Y1,Y2) - k(X1,Y2) - k(X2,Y1)] - [k(Z1,Z2) - k(X1,Z2) - k(X2,Z1)]
  auto f = [](const Triple& w1, const Triple& w2) {
    return (w1.y * w2.y - w1.x * w2.y - w2.x * w1.y) -
           (w1.z * w2.z - w1.x * w2.z - w2.x * w1.z);
  };
  return nested_components(n_outer, n_inner, seed, threads, draw, f);
}

}  // namespace mmdvar
