#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "mmdvar/error.hpp"
#include "mmdvar/estimators.hpp"
#include "mmdvar/oracle.hpp"
#include "test_support.hpp"

using namespace mmdvar;
using mmdvar::testing::close;
using mmdvar::testing::column;
using mmdvar::testing::gaussian_samples;

namespace {

/// A finitely supported scalar law.
struct Discrete {
  std::vector<double> points;
  std::vector<double> probs;
};

/// Population values of every term for discrete laws, straight from the
/// defining expectations.
struct DiscreteMoments {
  std::array<Discrete, 3> law;
  KernelSpec kernel;

  double k(double a, double b) const {
    const std::array<double, 1> x{a}, y{b};
    return eval_kernel(kernel, x, y);
  }
  const Discrete& of(Sample s) const { return law[static_cast<int>(s)]; }

  /// E_{b ~ B} k(a, b)
  double embed(Sample b, double a) const {
    double s = 0.0;
    const Discrete& d = of(b);
    for (std::size_t i = 0; i < d.points.size(); ++i) s += d.probs[i] * k(a, d.points[i]);
    return s;
  }
  double mu(Sample a, Sample b) const {
    double s = 0.0;
    const Discrete& d = of(a);
    for (std::size_t i = 0; i < d.points.size(); ++i) s += d.probs[i] * embed(b, d.points[i]);
    return s;
  }
  double phi_moment(Sample a, Sample b, Sample c) const {
    double s = 0.0;
    const Discrete& d = of(a);
    for (std::size_t i = 0; i < d.points.size(); ++i) {
      s += d.probs[i] * embed(b, d.points[i]) * embed(c, d.points[i]);
    }
    return s;
  }
  double k2(Sample a, Sample b) const {
    double s = 0.0;
    const Discrete& da = of(a);
    const Discrete& db = of(b);
    for (std::size_t i = 0; i < da.points.size(); ++i) {
      for (std::size_t j = 0; j < db.points.size(); ++j) {
        const double v = k(da.points[i], db.points[j]);
        s += da.probs[i] * db.probs[j] * v * v;
      }
    }
    return s;
  }

  double operator()(const TermId& t) const {
    switch (t.kind) {
      case TermKind::MuInner: return mu(t.a, t.b);
      case TermKind::MuInnerSq: return mu(t.a, t.b) * mu(t.a, t.b);
      case TermKind::ProdWithinCross: return mu(t.a, t.a) * mu(t.a, t.b);
      case TermKind::ProdTwoCross: return mu(t.a, t.b) * mu(t.a, t.c);
      case TermKind::EPhiOwnSq: return phi_moment(t.a, t.a, t.a);
      case TermKind::EPhiOtherSq: return phi_moment(t.a, t.b, t.b);
      case TermKind::EPhiOwnOther: return phi_moment(t.a, t.a, t.b);
      case TermKind::EPhiTwoOther: return phi_moment(t.a, t.b, t.c);
      case TermKind::EK2: return k2(t.a, t.b);
    }
    return 0.0;
  }
};

/// Calls fn(sample_sets, probability) for every dataset of size m drawn
/// i.i.d. from the laws in `laws` (one SampleSet per law).
void enumerate(const std::vector<Discrete>& laws, std::size_t m,
               const std::function<void(const std::vector<SampleSet>&, double)>& fn) {
  std::size_t slots = laws.size() * m;
  std::vector<std::size_t> idx(slots, 0);
  while (true) {
    std::vector<SampleSet> sets;
    double p = 1.0;
    for (std::size_t l = 0; l < laws.size(); ++l) {
      std::vector<double> v(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t c = idx[l * m + i];
        v[i] = laws[l].points[c];
        p *= laws[l].probs[c];
      }
      sets.push_back(SampleSet::from_column(v));
    }
    fn(sets, p);
    std::size_t s = 0;
    while (s < slots && ++idx[s] == laws[s / m].points.size()) idx[s++] = 0;
    if (s == slots) break;
  }
}

struct Moments2 {
  double mean = 0.0;
  double second = 0.0;
  double variance() const { return second - mean * mean; }
};

GaussianLinearModel random_model(StreamRng& rng) {
  GaussianLinearModel md;
  md.mean_x = rng.normal();
  md.mean_y = rng.normal();
  md.mean_z = rng.normal();
  md.var_x = 0.1 + 2.0 * rng.uniform();
  md.var_y = 0.1 + 2.0 * rng.uniform();
  md.var_z = 0.1 + 2.0 * rng.uniform();
  return md;
}

GaussianLinearModel point_masses() {
  GaussianLinearModel md;
  md.mean_x = 1.0;
  md.mean_y = -0.5;
  md.mean_z = 2.0;
  md.var_x = md.var_y = md.var_z = 0.0;
  return md;
}

}  // namespace

TEST_CASE("oracle sub-term examples") {
  const SampleSet c4 = column({1, 2, 3, 4});
  const GramPack ones = GramPack::build(c4, c4, c4, KernelSpec::constant(1.0));
  CHECK(oracle_sub_term(ones, TermId::mu_inner_sq(Sample::X, Sample::X)) == 1.0);
  const GramPack zeros = GramPack::build(c4, c4, c4, KernelSpec::constant(0.0));
  for (const TermId& t : variance_terms(true)) CHECK(oracle_sub_term(zeros, t) == 0.0);
  const GramPack lin = GramPack::build(column({1, 2}), column({3, 4}), KernelSpec::linear());
  CHECK(oracle_sub_term(lin, TermId::mu_inner_sq(Sample::X, Sample::Y)) == 24.0);
  CHECK(oracle_mmd2_u(lin) == 4.0);
}

TEST_CASE("oracle preconditions") {
  std::vector<double> big(kOracleMaxM + 1, 0.0);
  for (std::size_t i = 0; i < big.size(); ++i) big[i] = static_cast<double>(i);
  const SampleSet s = SampleSet::from_column(big);
  const GramPack g = GramPack::build(s, s, KernelSpec::linear());
  CHECK_THROWS_AS(oracle_sub_term(g, TermId::mu_inner(Sample::X, Sample::Y)), PreconditionError);
  const GramPack small = GramPack::build(column({1, 2, 3}), column({1, 2, 3}), KernelSpec::linear());
  CHECK_THROWS_WITH_AS(oracle_sub_term(small, TermId::mu_inner_sq(Sample::X, Sample::X)),
                       doctest::Contains("m ≥ 4"), PreconditionError);
  CHECK_THROWS_AS(oracle_sub_term(small, TermId::e_phi_two_other()), PreconditionError);
  CHECK_THROWS_AS(oracle_sub_term(small, TermId::e_k2(Sample::Y, Sample::Z)), InputError);
}

TEST_CASE("oracle is exchangeable") {
  StreamRng rng(808, 0);
  const std::size_t m = 6;
  const SampleSet x = gaussian_samples(rng, m, 2);
  const SampleSet y = gaussian_samples(rng, m, 2, 0.5);
  const SampleSet z = gaussian_samples(rng, m, 2, -0.5);
  const KernelSpec k = KernelSpec::rbf(1.3);
  const GramPack g = GramPack::build(x, y, z, k);
  const GramPack p = GramPack::build(
      mmdvar::testing::permuted_rows(x, mmdvar::testing::random_permutation(rng, m)),
      mmdvar::testing::permuted_rows(y, mmdvar::testing::random_permutation(rng, m)),
      mmdvar::testing::permuted_rows(z, mmdvar::testing::random_permutation(rng, m)), k);
  for (const TermId& t : variance_terms(true)) {
    INFO(name(t));
    CHECK(close(oracle_sub_term(g, t), oracle_sub_term(p, t), 1e-12));
  }
}

TEST_CASE("gaussian linear moments: closed forms") {
  SUBCASE("standard normals") {
    const PopulationMoments mom = gaussian_linear_moments(GaussianLinearModel{});
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) CHECK(mom.mu[a][b] == 0.0);
      CHECK(mom.e_k2_within[a] == 1.0);
    }
  }
  SUBCASE("point mass limit") {
    const PopulationMoments mom = gaussian_linear_moments(point_masses());
    CHECK(mom.mu[0][1] == -0.5);
    CHECK(mom.e_phi_sq[0][1] == 0.25);
    CHECK(mom.e_k2_within[2] == 16.0);
    CHECK(mom.e_k2_cross[0][2] == 4.0);
    CHECK(mom.e_phi_cross[0][1][2] == -1.0);
  }
  SUBCASE("E[(XY)^2] = 39, confirmed by simulation") {
    GaussianLinearModel md;
    md.mean_x = 1.0;
    md.var_x = 2.0;
    md.mean_y = 3.0;
    md.var_y = 4.0;
    const PopulationMoments mom = gaussian_linear_moments(md);
    CHECK(mom.e_k2_cross[0][1] == 39.0);
    CHECK(mom.value(TermId::e_k2(Sample::X, Sample::Y)) == 39.0);
    CHECK(mom.value(TermId::mu_inner_sq(Sample::X, Sample::Y)) == 9.0);

    StreamRng rng(39, 0);
    const int n = 400000;
    double s = 0.0, ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = rng.normal(1.0, 2.0) * rng.normal(3.0, 4.0);
      s += v * v;
      ss += v * v * v * v;
    }
    const double mean = s / n;
    const double se = std::sqrt((ss / n - mean * mean) / n);
    CHECK(std::abs(mean - 39.0) <= 3.0 * se);
  }
}

TEST_CASE("gaussian linear moments match simulated defining expectations") {
  GaussianLinearModel md;
  md.mean_x = 0.7;
  md.var_x = 1.5;
  md.mean_y = -0.4;
  md.var_y = 0.8;
  md.mean_z = 1.2;
  md.var_z = 0.3;
  const PopulationMoments mom = gaussian_linear_moments(md);
  StreamRng rng(2718, 0);
  const int n = 400000;
  // Sample draws a, a' from X and b from Y, c from Z. <phi(x), mu_B> = x mean_B.
  std::array<Moments2, 6> acc{};
  for (int i = 0; i < n; ++i) {
    const double a = rng.normal(md.mean_x, md.var_x);
    const double a2 = rng.normal(md.mean_x, md.var_x);
    const double b = rng.normal(md.mean_y, md.var_y);
    const double c = rng.normal(md.mean_z, md.var_z);
    const std::array<double, 6> v = {a * b,
                                     (a * md.mean_y) * (a * md.mean_y),
                                     (a * md.mean_y) * (a * md.mean_z),
                                     (a * md.mean_x) * (a * md.mean_y),
                                     (a * a2) * (a * a2),
                                     (a * c) * (a * c)};
    for (std::size_t j = 0; j < v.size(); ++j) {
      acc[j].mean += v[j];
      acc[j].second += v[j] * v[j];
    }
  }
  const std::array<double, 6> truth = {
      mom.value(TermId::mu_inner(Sample::X, Sample::Y)),
      mom.value(TermId::e_phi_other_sq(Sample::X, Sample::Y)),
      mom.value(TermId::e_phi_two_other()),
      mom.value(TermId::e_phi_own_other(Sample::X, Sample::Y)),
      mom.value(TermId::e_k2(Sample::X, Sample::X)),
      mom.value(TermId::e_k2(Sample::X, Sample::Z))};
  for (std::size_t j = 0; j < acc.size(); ++j) {
    const double mean = acc[j].mean / n;
    const double se = std::sqrt((acc[j].second / n - mean * mean) / n);
    INFO("moment ", j, " mean ", mean, " truth ", truth[j], " se ", se);
    CHECK(std::abs(mean - truth[j]) <= 4.0 * se);
  }
}

TEST_CASE("model validation") {
  GaussianLinearModel md;
  md.var_y = -1.0;
  CHECK_THROWS_AS(md.validate(), InputError);
  md.var_y = 1.0;
  md.mean_z = std::nan("");
  CHECK_THROWS_AS(md.validate(), InputError);
  CHECK_NOTHROW(point_masses().validate());
}

TEST_CASE("population variances: degenerate cases and decomposition") {
  const PopulationMoments pm = gaussian_linear_moments(point_masses());
  for (std::size_t m : {2u, 4u, 8u, 50u}) {
    CHECK(std::abs(population_V(pm, m).total) < 1e-12);
    CHECK(std::abs(population_nu(pm, m).total) < 1e-12);
  }
  StreamRng rng(11, 0);
  for (int trial = 0; trial < 25; ++trial) {
    const PopulationMoments mom = gaussian_linear_moments(random_model(rng));
    const VarianceDecomposition v2 = population_V(mom, 2);
    CHECK(close(v2.total, v2.second_order, 1e-12));
    const VarianceDecomposition n2 = population_nu(mom, 2);
    CHECK(close(n2.total, n2.second_order, 1e-12));
    for (std::size_t m : {3u, 4u, 8u, 100u}) {
      const double c = 2.0 / (static_cast<double>(m) * static_cast<double>(m - 1));
      const double d = 2.0 * static_cast<double>(m - 2);
      const VarianceDecomposition v = population_V(mom, m);
      CHECK(close(v.total, c * (d * v.first_order + v.second_order), 1e-12));
      CHECK(close(v.total, assemble_mmd_variance(m, mom.lookup()), 1e-12));
      const VarianceDecomposition n = population_nu(mom, m);
      CHECK(close(n.total, c * (d * n.first_order + n.second_order), 1e-12));
      CHECK(close(n.total, assemble_diff_variance(m, mom.lookup()), 1e-12));
    }
  }
  CHECK_THROWS_AS(population_V(pm, 1), PreconditionError);
  CHECK_THROWS_AS(population_nu(pm, 1), PreconditionError);
}

TEST_CASE("estimators are exactly unbiased: full enumeration of discrete laws") {
  // X, Y, Z take finitely many values, so every expectation is a finite
  // weighted sum over all datasets and can be computed without sampling.
  const KernelSpec rbf = KernelSpec::rbf(1.0);
  const Discrete lx{{0.0, 1.0, 2.5}, {0.2, 0.5, 0.3}};
  const Discrete ly{{0.5, 2.0}, {0.6, 0.4}};
  const Discrete lz{{-0.5, 1.5}, {0.35, 0.65}};
  const DiscreteMoments pop{{lx, ly, lz}, rbf};
  const std::size_t m = 4;

  SUBCASE("two samples") {
    Moments2 stat;
    double e_vhat = 0.0, total_p = 0.0;
    TermTable e_terms;
    for (const TermId& t : variance_terms(false)) e_terms.set(t, 0.0);
    enumerate({lx, ly}, m, [&](const std::vector<SampleSet>& s, double p) {
      const GramPack g = GramPack::build(s[0], s[1], rbf);
      const double v = mmd2_u(g);
      stat.mean += p * v;
      stat.second += p * v * v;
      e_vhat += p * vhat_m(g);
      total_p += p;
      for (const auto& [t, val] : e_terms) e_terms.set(t, val + p * estimate_term(g, t));
    });
    CHECK(close(total_p, 1.0, 1e-12));
    for (const auto& [t, val] : e_terms) {
      INFO(name(t));
      CHECK(close(val, pop(t), 1e-10, 1e-13));
    }
    const double mmd2 = pop(TermId::mu_inner(Sample::X, Sample::X)) +
                        pop(TermId::mu_inner(Sample::Y, Sample::Y)) -
                        2.0 * pop(TermId::mu_inner(Sample::X, Sample::Y));
    CHECK(close(stat.mean, mmd2, 1e-10));
    CHECK(close(e_vhat, stat.variance(), 1e-9));
    CHECK(close(assemble_mmd_variance(m, std::cref(pop)), stat.variance(), 1e-9));
    CHECK(close(mmd_first_order(std::cref(pop)) * 2.0 * 2.0 * 2.0 / 12.0 +
                    mmd_second_order(std::cref(pop)) * 2.0 / 12.0,
                stat.variance(), 1e-9));
  }

  SUBCASE("three samples") {
    const Discrete bx{{0.0, 1.5}, {0.3, 0.7}};
    const DiscreteMoments pop3{{bx, ly, lz}, rbf};
    Moments2 stat;
    double e_nuhat = 0.0;
    enumerate({bx, ly, lz}, m, [&](const std::vector<SampleSet>& s, double p) {
      const GramPack g = GramPack::build(s[0], s[1], s[2], rbf);
      const double d = mmd2_u(g, Comparison::XY) - mmd2_u(g, Comparison::XZ);
      stat.mean += p * d;
      stat.second += p * d * d;
      e_nuhat += p * nuhat_m(g);
    });
    CHECK(close(e_nuhat, stat.variance(), 1e-9));
    CHECK(close(assemble_diff_variance(m, std::cref(pop3)), stat.variance(), 1e-9));
    CHECK(close(diff_first_order(std::cref(pop3)) * 8.0 / 12.0 +
                    diff_second_order(std::cref(pop3)) * 2.0 / 12.0,
                stat.variance(), 1e-9));
  }
}

TEST_CASE("nested Monte Carlo of zeta and xi") {
  SUBCASE("point masses") {
    const ComponentEstimate z = zeta_direct(point_masses(), 200, 100, 1, 1);
    CHECK(std::abs(z.first_order) < 1e-12);
    CHECK(std::abs(z.second_order) < 1e-12);
    const ComponentEstimate x = xi_direct(point_masses(), 200, 100, 1, 1);
    CHECK(std::abs(x.first_order) < 1e-12);
    CHECK(std::abs(x.second_order) < 1e-12);
  }
  SUBCASE("standard normals against the closed form") {
    const GaussianLinearModel md;
    const VarianceDecomposition v = population_V(gaussian_linear_moments(md), 8);
    const ComponentEstimate z = zeta_direct(md, 2000, 200, 7, 0);
    CHECK(std::abs(z.first_order - v.first_order) <= 3.0 * z.first_order_se);
    CHECK(std::abs(z.second_order - v.second_order) <= 3.0 * z.second_order_se);
  }
  SUBCASE("swapping the X and Y laws") {
    GaussianLinearModel a;
    a.mean_y = 0.5;
    a.var_y = 2.0;
    GaussianLinearModel b = a;
    std::swap(b.mean_x, b.mean_y);
    std::swap(b.var_x, b.var_y);
    const ComponentEstimate za = zeta_direct(a, 2000, 200, 3, 0);
    const ComponentEstimate zb = zeta_direct(b, 2000, 200, 4, 0);
    CHECK(std::abs(za.first_order - zb.first_order) <=
          3.0 * std::hypot(za.first_order_se, zb.first_order_se));
    CHECK(std::abs(za.second_order - zb.second_order) <=
          3.0 * std::hypot(za.second_order_se, zb.second_order_se));
  }
  SUBCASE("determinism and thread independence") {
    GaussianLinearModel md;
    md.mean_z = 0.25;
    const ComponentEstimate a = xi_direct(md, 300, 100, 9, 1);
    const ComponentEstimate b = xi_direct(md, 300, 100, 9, 3);
    CHECK(a.first_order == b.first_order);
    CHECK(a.second_order_se == b.second_order_se);
  }
  CHECK_THROWS_AS(zeta_direct(GaussianLinearModel{}, 99, 100, 1), InputError);
  CHECK_THROWS_AS(xi_direct(GaussianLinearModel{}, 100, 50, 1), InputError);
}
