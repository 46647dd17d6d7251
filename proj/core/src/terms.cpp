#include "mmdvar/terms.hpp"

#include <algorithm>
#include <stdexcept>

#include "mmdvar/error.hpp"

namespace mmdvar {

namespace {

std::string s(Sample x) { return std::string(to_string(x)); }

bool is_cross_pair(Sample a, Sample b) {
  return (a == Sample::X && (b == Sample::Y || b == Sample::Z)) ||
         (b == Sample::X && (a == Sample::Y || a == Sample::Z));
}

}  // namespace

std::string name(const TermId& t) {
  switch (t.kind) {
    case TermKind::MuInner: return "mu_inner[" + s(t.a) + "," + s(t.b) + "]";
    case TermKind::MuInnerSq: return "mu_inner_sq[" + s(t.a) + "," + s(t.b) + "]";
    case TermKind::ProdWithinCross:
      return "prod_within_cross[" + s(t.a) + ";" + s(t.b) + "]";
    case TermKind::ProdTwoCross:
      return "prod_two_cross[" + s(t.a) + ";" + s(t.b) + "," + s(t.c) + "]";
    case TermKind::EPhiOwnSq: return "e_phi_own_sq[" + s(t.a) + "]";
    case TermKind::EPhiOtherSq: return "e_phi_other_sq[" + s(t.a) + "," + s(t.b) + "]";
    case TermKind::EPhiOwnOther:
      return "e_phi_own_other[" + s(t.a) + ";" + s(t.b) + "]";
    case TermKind::EPhiTwoOther:
      return "e_phi_two_other[" + s(t.a) + ";" + s(t.b) + "," + s(t.c) + "]";
    case TermKind::EK2: return "e_k2[" + s(t.a) + "," + s(t.b) + "]";
  }
  return "unknown";
}

std::size_t min_sample_size(const TermId& t) {
  switch (t.kind) {
    case TermKind::MuInnerSq: return t.a == t.b ? 4 : 2;
    case TermKind::ProdWithinCross:
    case TermKind::EPhiOwnSq: return 3;
    case TermKind::EPhiTwoOther: return 1;
    default: return 2;
  }
}

bool needs_z(const TermId& t) {
  return t.a == Sample::Z || t.b == Sample::Z || t.c == Sample::Z;
}

void validate(const TermId& t) {
  auto fail = [&t] {
    throw InputError("unsupported term " + name(t) +
                     ": cross pairs must pair X with Y or Z");
  };
  switch (t.kind) {
    case TermKind::MuInner:
    case TermKind::MuInnerSq:
    case TermKind::EK2:
      if (t.a != t.b && !is_cross_pair(t.a, t.b)) fail();
      break;
    case TermKind::ProdWithinCross:
    case TermKind::EPhiOtherSq:
    case TermKind::EPhiOwnOther:
      if (!is_cross_pair(t.a, t.b)) fail();
      break;
    case TermKind::ProdTwoCross:
    case TermKind::EPhiTwoOther:
      if (t.a != Sample::X || t.b == t.c || !is_cross_pair(t.a, t.b) ||
          !is_cross_pair(t.a, t.c)) {
        fail();
      }
      break;
    case TermKind::EPhiOwnSq:
      break;
  }
}

std::vector<TermId> variance_terms(bool with_z) {
  using S = Sample;
  std::vector<TermId> terms = {
      TermId::mu_inner(S::X, S::X),
      TermId::mu_inner(S::Y, S::Y),
      TermId::mu_inner(S::X, S::Y),
      TermId::mu_inner_sq(S::X, S::X),
      TermId::mu_inner_sq(S::Y, S::Y),
      TermId::mu_inner_sq(S::X, S::Y),
      TermId::prod_within_cross(S::X, S::Y),
      TermId::prod_within_cross(S::Y, S::X),
      TermId::e_phi_own_sq(S::X),
      TermId::e_phi_own_sq(S::Y),
      TermId::e_phi_other_sq(S::X, S::Y),
      TermId::e_phi_other_sq(S::Y, S::X),
      TermId::e_phi_own_other(S::X, S::Y),
      TermId::e_phi_own_other(S::Y, S::X),
      TermId::e_k2(S::X, S::X),
      TermId::e_k2(S::Y, S::Y),
      TermId::e_k2(S::X, S::Y),
  };
  if (with_z) {
    const std::vector<TermId> extra = {
        TermId::mu_inner(S::Z, S::Z),
        TermId::mu_inner(S::X, S::Z),
        TermId::mu_inner_sq(S::Z, S::Z),
        TermId::mu_inner_sq(S::X, S::Z),
        TermId::prod_within_cross(S::Z, S::X),
        TermId::prod_two_cross(),
        TermId::e_phi_own_sq(S::Z),
        TermId::e_phi_other_sq(S::X, S::Z),
        TermId::e_phi_other_sq(S::Z, S::X),
        TermId::e_phi_own_other(S::Z, S::X),
        TermId::e_phi_two_other(),
        TermId::e_k2(S::Z, S::Z),
        TermId::e_k2(S::X, S::Z),
    };
    terms.insert(terms.end(), extra.begin(), extra.end());
  }
  return terms;
}

void TermTable::set(const TermId& t, Real value) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&t](const auto& e) { return e.first == t; });
  if (it != entries_.end()) {
    it->second = value;
  } else {
    entries_.emplace_back(t, value);
  }
}

bool TermTable::contains(const TermId& t) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&t](const auto& e) { return e.first == t; });
}

Real TermTable::at(const TermId& t) const {
  for (const auto& [id, v] : entries_)
    if (id == t) return v;
  throw std::out_of_range("term " + name(t) + " not in table");
}

}  // namespace mmdvar
