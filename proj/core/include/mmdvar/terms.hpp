#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mmdvar/gram_pack.hpp"

namespace mmdvar {

/// Population quantities that make up the variance of MMD^2 and of a
/// difference of two MMD^2 statistics sharing X. phi is the kernel
/// feature map and mu_A = E[phi(A)] the mean embedding of A's law.
enum class TermKind {
  MuInner,          // <mu_A, mu_B>
  MuInnerSq,        // <mu_A, mu_B>^2   (A == B allowed)
  ProdWithinCross,  // <mu_A, mu_A> <mu_A, mu_B>
  ProdTwoCross,     // <mu_A, mu_B> <mu_A, mu_C>
  EPhiOwnSq,        // E[<phi(A), mu_A>^2]
  EPhiOtherSq,      // E[<phi(A), mu_B>^2]
  EPhiOwnOther,     // E[<phi(A), mu_A> <phi(A), mu_B>]
  EPhiTwoOther,     // E[<phi(A), mu_B> <phi(A), mu_C>]
  EK2,              // E[k(A, A')^2] when A == B, else E[k(A, B)^2]
};

struct TermId {
  TermKind kind = TermKind::MuInner;
  Sample a = Sample::X;
  Sample b = Sample::X;
  Sample c = Sample::X;

  static TermId mu_inner(Sample a, Sample b) { return {TermKind::MuInner, a, b, b}; }
  static TermId mu_inner_sq(Sample a, Sample b) { return {TermKind::MuInnerSq, a, b, b}; }
  static TermId prod_within_cross(Sample a, Sample b) { return {TermKind::ProdWithinCross, a, b, b}; }
  static TermId prod_two_cross() { return {TermKind::ProdTwoCross, Sample::X, Sample::Y, Sample::Z}; }
  static TermId e_phi_own_sq(Sample a) { return {TermKind::EPhiOwnSq, a, a, a}; }
  static TermId e_phi_other_sq(Sample a, Sample b) { return {TermKind::EPhiOtherSq, a, b, b}; }
  static TermId e_phi_own_other(Sample a, Sample b) { return {TermKind::EPhiOwnOther, a, b, b}; }
  static TermId e_phi_two_other() { return {TermKind::EPhiTwoOther, Sample::X, Sample::Y, Sample::Z}; }
  static TermId e_k2(Sample a, Sample b) { return {TermKind::EK2, a, b, b}; }

  auto operator<=>(const TermId&) const = default;
};

/// Stable textual key, e.g. "mu_inner_sq[X,Y]" or "e_phi_two_other[X;Y,Z]".
std::string name(const TermId& t);

/// Smallest m for which the term's unbiased estimator is defined.
std::size_t min_sample_size(const TermId& t);

/// True if the term needs the Z sample.
bool needs_z(const TermId& t);

/// Throws InputError unless the term is one this library can estimate:
/// cross pairs must be (X,Y), (Y,X), (X,Z) or (Z,X).
void validate(const TermId& t);

/// Every term entering the variance of MMD^2(X, Y); with `with_z`, also
/// every term entering the variance of MMD^2(X, Y) - MMD^2(X, Z).
std::vector<TermId> variance_terms(bool with_z);

/// Values keyed by TermId, kept in insertion order and held in extended
/// precision so that assembled variances keep their accuracy.
class TermTable {
 public:
  void set(const TermId& t, Real value);
  bool contains(const TermId& t) const;
  /// Throws std::out_of_range for a missing term.
  Real at(const TermId& t) const;
  Real operator()(const TermId& t) const { return at(t); }

  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::vector<std::pair<TermId, Real>> entries_;
};

/// Anything that can supply a value per term: estimates, oracle sums, or
/// population moments.
using TermLookup = std::function<Real(const TermId&)>;

}  // namespace mmdvar
