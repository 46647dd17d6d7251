#include "mmdvar/estimators.hpp"

#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>

#include "mmdvar/error.hpp"

namespace mmdvar {

namespace {

using Int = __int128;

void require_m(const GramPack& g, std::size_t minimum, const char* what) {
  if (g.m() < minimum) {
    throw PreconditionError(std::string(what) + " requires m ≥ " +
                            std::to_string(minimum) + ", got m = " +
                            std::to_string(g.m()));
  }
}

void require_z(const GramPack& g, const char* what) {
  if (!g.has_z()) {
    throw PreconditionError(std::string(what) + " requires a Z sample");
  }
}

Int ff(std::size_t m, int k) {
  Int r = 1;
  for (int i = 0; i < k; ++i) r *= static_cast<Int>(m) - i;
  return r;
}

Int pow_int(std::size_t base, int e) {
  Int r = 1;
  for (int i = 0; i < e; ++i) r *= static_cast<Int>(base);
  return r;
}

/// Exact rational coefficient num/den, rounded once.
Real ratio(Int num, Int den) {
  return static_cast<Real>(num) / static_cast<Real>(den);
}

Real dot(std::span<const Real> a, std::span<const Real> b) {
  Real s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

Real sq_norm(std::span<const Real> a) { return dot(a, a); }

Sample other_of(Comparison which) {
  return which == Comparison::XY ? Sample::Y : Sample::Z;
}

}  // namespace

std::uint64_t falling_factorial(std::uint64_t m, std::uint64_t k) {
  if (m < k) {
    throw PreconditionError("falling factorial (" + std::to_string(m) + ")_" +
                            std::to_string(k) + " needs m >= k");
  }
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < k; ++i) {
    const std::uint64_t f = m - i;
    if (f != 0 && r > std::numeric_limits<std::uint64_t>::max() / f) {
      throw std::overflow_error("falling factorial overflows 64 bits");
    }
    r *= f;
  }
  return r;
}

double mmd2_u(const GramPack& g, Comparison which) {
  require_m(g, 2, "MMD^2 estimate");
  const Sample b = other_of(which);
  if (b == Sample::Z) require_z(g, "MMD^2(X, Z)");
  const std::size_t m = g.m();
  const CrossView kab = g.cross(Sample::X, b);
  const Real off_diag_cross = kab.grand_sum() - kab.trace();
  const Real total = g.within_stats(Sample::X).grand_sum +
                       g.within_stats(b).grand_sum - 2.0 * off_diag_cross;
  return total / static_cast<Real>(ff(m, 2));
}

Real estimate_mu_inner(const GramPack& g, Sample a, Sample b) {
  require_m(g, 2, "<mu_A, mu_B> estimate");
  const std::size_t m = g.m();
  if (a == b) {
    return g.within_stats(a).grand_sum / static_cast<Real>(ff(m, 2));
  }
  return g.cross(a, b).grand_sum() / static_cast<Real>(pow_int(m, 2));
}

Real estimate_mu_inner_sq_cross(const GramPack& g, Sample a, Sample b) {
  require_m(g, 2, "<mu_A, mu_B>^2 estimate");
  const std::size_t m = g.m();
  const CrossView k = g.cross(a, b);
  const Real s = k.grand_sum();
  const Real num = s * s - sq_norm(k.col_sums()) - sq_norm(k.row_sums()) +
                     k.frob_sq();
  return num / static_cast<Real>(pow_int(m, 2) * pow_int(m - 1, 2));
}

Real estimate_mu_inner_sq_within(const GramPack& g, Sample a) {
  require_m(g, 4, "<mu_A, mu_A>^2 estimate");
  const MatrixStats& k = g.within_stats(a);
  const Real num = k.grand_sum * k.grand_sum - 4.0 * sq_norm(k.row_sums) +
                     2.0 * k.frob_sq;
  return num / static_cast<Real>(ff(g.m(), 4));
}

Real estimate_prod_within_cross(const GramPack& g, Sample a, Sample b) {
  require_m(g, 3, "<mu_A, mu_A><mu_A, mu_B> estimate");
  const std::size_t m = g.m();
  const MatrixStats& kaa = g.within_stats(a);
  const CrossView kab = g.cross(a, b);
  const Real num = kaa.grand_sum * kab.grand_sum() -
                     2.0 * dot(kaa.row_sums, kab.row_sums());
  return num / static_cast<Real>(static_cast<Int>(m) * ff(m, 3));
}

Real estimate_prod_two_cross(const GramPack& g) {
  require_m(g, 2, "<mu_X, mu_Y><mu_X, mu_Z> estimate");
  require_z(g, "<mu_X, mu_Y><mu_X, mu_Z> estimate");
  const std::size_t m = g.m();
  const CrossView kxy = g.cross(Sample::X, Sample::Y);
  const CrossView kxz = g.cross(Sample::X, Sample::Z);
  const Real num =
      kxy.grand_sum() * kxz.grand_sum() - dot(kxy.row_sums(), kxz.row_sums());
  return num / static_cast<Real>(pow_int(m, 3) * static_cast<Int>(m - 1));
}

Real estimate_e_phi_own_sq(const GramPack& g, Sample a) {
  require_m(g, 3, "E[<phi(A), mu_A>^2] estimate");
  const MatrixStats& k = g.within_stats(a);
  return (sq_norm(k.row_sums) - k.frob_sq) / static_cast<Real>(ff(g.m(), 3));
}

Real estimate_e_phi_other_sq(const GramPack& g, Sample a, Sample b) {
  require_m(g, 2, "E[<phi(A), mu_B>^2] estimate");
  const std::size_t m = g.m();
  const CrossView k = g.cross(a, b);
  return (sq_norm(k.row_sums()) - k.frob_sq()) /
         static_cast<Real>(pow_int(m, 2) * static_cast<Int>(m - 1));
}

Real estimate_e_phi_own_other(const GramPack& g, Sample a, Sample b) {
  require_m(g, 2, "E[<phi(A), mu_A><phi(A), mu_B>] estimate");
  const std::size_t m = g.m();
  const MatrixStats& kaa = g.within_stats(a);
  const CrossView kab = g.cross(a, b);
  return dot(kaa.row_sums, kab.row_sums()) /
         static_cast<Real>(pow_int(m, 2) * static_cast<Int>(m - 1));
}

Real estimate_e_phi_two_other(const GramPack& g) {
  require_z(g, "E[<phi(X), mu_Y><phi(X), mu_Z>] estimate");
  const CrossView kxy = g.cross(Sample::X, Sample::Y);
  const CrossView kxz = g.cross(Sample::X, Sample::Z);
  return dot(kxy.row_sums(), kxz.row_sums()) /
         static_cast<Real>(pow_int(g.m(), 3));
}

Real estimate_e_k2(const GramPack& g, Sample a, Sample b) {
  require_m(g, 2, "E[k^2] estimate");
  const std::size_t m = g.m();
  if (a == b) {
    return g.within_stats(a).frob_sq / static_cast<Real>(ff(m, 2));
  }
  return g.cross(a, b).frob_sq() / static_cast<Real>(pow_int(m, 2));
}

Real estimate_term(const GramPack& g, const TermId& t) {
  validate(t);
  switch (t.kind) {
    case TermKind::MuInner: return estimate_mu_inner(g, t.a, t.b);
    case TermKind::MuInnerSq:
      return t.a == t.b ? estimate_mu_inner_sq_within(g, t.a)
                        : estimate_mu_inner_sq_cross(g, t.a, t.b);
    case TermKind::ProdWithinCross: return estimate_prod_within_cross(g, t.a, t.b);
    case TermKind::ProdTwoCross: return estimate_prod_two_cross(g);
    case TermKind::EPhiOwnSq: return estimate_e_phi_own_sq(g, t.a);
    case TermKind::EPhiOtherSq: return estimate_e_phi_other_sq(g, t.a, t.b);
    case TermKind::EPhiOwnOther: return estimate_e_phi_own_other(g, t.a, t.b);
    case TermKind::EPhiTwoOther: return estimate_e_phi_two_other(g);
    case TermKind::EK2: return estimate_e_k2(g, t.a, t.b);
  }
  throw InputError("unknown term kind");
}

TermTable estimate_sub_terms(const GramPack& g) {
  TermTable table;
  for (const TermId& t : variance_terms(g.has_z())) table.set(t, estimate_term(g, t));
  return table;
}

// Closed-form combination of the term estimators plugged into the exact
// variance of MMD^2_u(X, B), with like terms collected. Coefficients are
// exact rationals in m.
double vhat_m(const GramPack& g, Comparison which) {
  require_m(g, 4, "variance estimator");
  const Sample bs = other_of(which);
  if (bs == Sample::Z) require_z(g, "variance estimator for MMD^2(X, Z)");
  const std::size_t m = g.m();

  const MatrixStats& kxx = g.within_stats(Sample::X);
  const MatrixStats& kbb = g.within_stats(bs);
  const CrossView kxb = g.cross(Sample::X, bs);

  const Real sxx = kxx.grand_sum;
  const Real sbb = kbb.grand_sum;
  const Real sxb = kxb.grand_sum();
  const Real rxx = sq_norm(kxx.row_sums);
  const Real rbb = sq_norm(kbb.row_sums);
  const Real rxb = sq_norm(kxb.row_sums());
  const Real cxb = sq_norm(kxb.col_sums());
  const Real pxx = dot(kxx.row_sums, kxb.row_sums());  // 1' K~xx Kxb 1
  const Real pbb = dot(kbb.row_sums, kxb.col_sums());  // 1' K~bb Kxb' 1
  const Real fxx = kxx.frob_sq;
  const Real fbb = kbb.frob_sq;
  const Real fxb = kxb.frob_sq();

  const Int mi = static_cast<Int>(m);
  const Int m1 = mi - 1;
  const Int ff2 = ff(m, 2);
  const Int ff3 = ff(m, 3);
  const Int ff4 = ff(m, 4);

  Real v = 0;
  v += ratio(4, ff4) * (rxx + rbb);
  v += ratio(4 * (mi * mi - mi - 1), mi * mi * mi * m1 * m1 * m1) * (rxb + cxb);
  v -= ratio(8, mi * ff3) * (pxx + pbb);
  v += ratio(8, mi * mi * ff3) * ((sxx + sbb) * sxb);
  v -= ratio(2 * (2 * mi - 3), ff2 * ff4) * (sxx * sxx + sbb * sbb);
  v -= ratio(4 * (2 * mi - 3), mi * mi * mi * m1 * m1 * m1) * (sxb * sxb);
  v -= ratio(2, ff4) * (fxx + fbb);
  v -= ratio(4 * (mi - 2), mi * mi * m1 * m1 * m1) * fxb;
  return v;
}

double nuhat_m(const GramPack& g) {
  require_m(g, 4, "variance estimator");
  require_z(g, "difference variance estimator");
  const std::size_t m = g.m();

  const MatrixStats& kyy = g.within_stats(Sample::Y);
  const MatrixStats& kzz = g.within_stats(Sample::Z);
  const CrossView kxy = g.cross(Sample::X, Sample::Y);
  const CrossView kxz = g.cross(Sample::X, Sample::Z);

  const Real syy = kyy.grand_sum;
  const Real szz = kzz.grand_sum;
  const Real sxy = kxy.grand_sum();
  const Real sxz = kxz.grand_sum();
  const Real row_col = sq_norm(kxy.row_sums()) + sq_norm(kxy.col_sums()) +
                         sq_norm(kxz.row_sums()) + sq_norm(kxz.col_sums());
  const Real ryy = sq_norm(kyy.row_sums);
  const Real rzz = sq_norm(kzz.row_sums);
  const Real qyz = dot(kxy.row_sums(), kxz.row_sums());  // 1' Kxy' Kxz 1
  const Real pyy = dot(kyy.row_sums, kxy.col_sums());    // 1' K~yy Kxy' 1
  const Real pzz = dot(kzz.row_sums, kxz.col_sums());    // 1' K~zz Kxz' 1
  const Real fxy = kxy.frob_sq();
  const Real fxz = kxz.frob_sq();
  const Real fyy = kyy.frob_sq;
  const Real fzz = kzz.frob_sq;

  const Int mi = static_cast<Int>(m);
  const Int m1 = mi - 1;
  const Int ff2 = ff(m, 2);
  const Int ff3 = ff(m, 3);
  const Int ff4 = ff(m, 4);
  const Int m3m13 = mi * mi * mi * m1 * m1 * m1;

  Real v = 0;
  v += ratio(4 * (mi * mi - mi - 1), m3m13) * row_col;
  v += ratio(4, ff4) * (ryy + rzz);
  v -= ratio(8, mi * mi * mi * m1) * qyz;
  v -= ratio(8, mi * ff3) * (pyy + pzz);
  v -= ratio(4 * (2 * mi - 3), m3m13) * (sxy * sxy + sxz * sxz);
  v -= ratio(2 * (2 * mi - 3), ff2 * ff4) * (syy * syy + szz * szz);
  v += ratio(8, mi * mi * mi * mi * m1) * (sxy * sxz);
  v += ratio(8, mi * mi * ff3) * (syy * sxy + szz * sxz);
  v -= ratio(4 * (mi - 2), mi * mi * m1 * m1 * m1) * (fxy + fxz);
  v -= ratio(2, ff4) * (fyy + fzz);
  return v;
}

EstimateReport full_report(const GramPack& g, double floor_epsilon) {
  if (!(floor_epsilon > 0.0) || !std::isfinite(floor_epsilon)) {
    throw InputError("floor epsilon must be a positive finite number");
  }
  require_m(g, 4, "variance estimator");
  EstimateReport r;
  r.m = g.m();
  r.kernel = g.kernel();
  r.mmd2_xy = mmd2_u(g, Comparison::XY);
  r.vhat = vhat_m(g, Comparison::XY);
  r.vhat_floored = std::max(r.vhat, floor_epsilon);
  if (g.has_z()) {
    r.mmd2_xz = mmd2_u(g, Comparison::XZ);
    r.diff = r.mmd2_xy - *r.mmd2_xz;
    r.nuhat = nuhat_m(g);
    r.nuhat_floored = std::max(*r.nuhat, floor_epsilon);
    r.z_stat = *r.diff / std::sqrt(*r.nuhat_floored);
  } else {
    r.z_stat = r.mmd2_xy / std::sqrt(r.vhat_floored);
  }
  return r;
}

}  // namespace mmdvar
