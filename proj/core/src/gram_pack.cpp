#include "mmdvar/gram_pack.hpp"

#include <algorithm>
#include <array>
#include <string>
#include <tuple>
#include <utility>

#include "mmdvar/error.hpp"
#include "parallel.hpp"

namespace mmdvar {

std::string_view to_string(Sample s) {
  switch (s) {
    case Sample::X: return "X";
    case Sample::Y: return "Y";
    case Sample::Z: return "Z";
  }
  return "?";
}

MatrixStats MatrixStats::of(const Matrix& k) {
  MatrixStats s;
  s.row_sums.assign(k.rows(), 0);
  s.col_sums.assign(k.cols(), 0);
  for (std::size_t i = 0; i < k.rows(); ++i) {
    Real row = 0;
    Real sq = 0;
    for (std::size_t j = 0; j < k.cols(); ++j) {
      const Real v = k(i, j);
      row += v;
      sq += v * v;
      s.col_sums[j] += v;
    }
    s.row_sums[i] = row;
    s.grand_sum += row;
    s.frob_sq += sq;
    if (i < k.cols()) s.trace += k(i, i);
  }
  return s;
}

namespace {

void check_shapes(std::span<const SampleSet* const> sets) {
  const std::size_t m = sets.front()->size();
  const std::size_t d = sets.front()->dim();
  static constexpr std::array<const char*, 3> names{"X", "Y", "Z"};
  for (std::size_t s = 1; s < sets.size(); ++s) {
    if (sets[s]->size() != m) {
      throw PreconditionError(std::string("unequal sample sizes: X has ") +
                              std::to_string(m) + " rows, " + names[s] +
                              " has " + std::to_string(sets[s]->size()));
    }
    if (sets[s]->dim() != d) {
      throw PreconditionError(std::string("unequal dimensions: X has d=") +
                              std::to_string(d) + ", " + names[s] + " has d=" +
                              std::to_string(sets[s]->dim()));
    }
  }
  if (m < 2) {
    throw PreconditionError("need m >= 2 observations per sample, got " +
                            std::to_string(m));
  }
  if (d == 0) throw PreconditionError("samples have dimension 0");
}

struct Gram {
  Matrix k;
  MatrixStats stats;
};

/// Totals from per-row sums, accumulated in index order exactly as
/// MatrixStats::of does, so both routes agree bit for bit.
void add_row_totals(MatrixStats& s, const std::vector<Real>& row_sq) {
  for (std::size_t i = 0; i < s.row_sums.size(); ++i) {
    s.grand_sum += s.row_sums[i];
    s.frob_sq += row_sq[i];
  }
}

/// Row sum and sum of squares of one row, taken while it is still cached.
void row_stats(std::span<const double> row, Real& sum, Real& sq) {
  Real a = 0;
  Real b = 0;
  for (const double v : row) {
    const Real r = v;
    a += r;
    b += r * r;
  }
  sum = a;
  sq = b;
}

constexpr std::size_t kTile = 64;

/// Folds the rows [i0, i1) into the column sums and trace in row order, the
/// same order MatrixStats::of uses.
void add_columns(const Matrix& k, std::size_t i0, std::size_t i1, MatrixStats& s) {
  for (std::size_t i = i0; i < i1; ++i) {
    const auto row = k.row(i);
    for (std::size_t j = 0; j < row.size(); ++j) s.col_sums[j] += row[j];
    s.trace += row[i];
  }
}

/// Rows are produced in blocks small enough to stay in cache while their
/// statistics are taken.
Gram cross_gram(const KernelSpec& spec, const SampleSet& a, const SampleSet& b,
                unsigned threads) {
  const std::size_t m = a.size();
  Gram g{Matrix(m, m), {}};
  MatrixStats& s = g.stats;
  s.row_sums.assign(m, 0);
  s.col_sums.assign(m, 0);
  std::vector<Real> row_sq(m);
  for (std::size_t i0 = 0; i0 < m; i0 += kTile) {
    const std::size_t i1 = std::min(m, i0 + kTile);
    detail::parallel_for(i1 - i0, threads, [&](std::size_t r) {
      const std::size_t i = i0 + r;
      const auto row = g.k.row(i);
      kernel_row(spec, a[i], b, 0, m, row.data());
      row_stats(row, s.row_sums[i], row_sq[i]);
    });
    add_columns(g.k, i0, i1, s);
  }
  add_row_totals(s, row_sq);
  return g;
}

/// Within-sample Gram with a zero diagonal. The upper triangle is computed
/// in square tiles and mirrored tile by tile. Once a band of tile rows is
/// done its rows are complete, so their statistics are taken while cached.
Gram within_gram(const KernelSpec& spec, const SampleSet& a, unsigned threads) {
  const std::size_t m = a.size();
  const std::size_t tiles = (m + kTile - 1) / kTile;
  Gram g{Matrix(m, m), {}};
  Matrix& k = g.k;
  MatrixStats& s = g.stats;
  s.row_sums.assign(m, 0);
  std::vector<Real> row_sq(m);
  for (std::size_t ti = 0; ti < tiles; ++ti) {
    const std::size_t i0 = ti * kTile;
    const std::size_t i1 = std::min(m, i0 + kTile);
    detail::parallel_for(tiles - ti, threads, [&](std::size_t t) {
      const std::size_t j0 = (ti + t) * kTile;
      const std::size_t j1 = std::min(m, j0 + kTile);
      for (std::size_t i = i0; i < i1; ++i) {
        const std::size_t start = std::max(j0, i + 1);
        if (start >= j1) continue;
        kernel_row(spec, a[i], a, start, j1, &k(i, start));
        for (std::size_t j = start; j < j1; ++j) k(j, i) = k(i, j);
      }
    });
    for (std::size_t i = i0; i < i1; ++i) row_stats(k.row(i), s.row_sums[i], row_sq[i]);
  }
  add_row_totals(s, row_sq);
  // Symmetric entries make each column sum the same sequence of additions
  // as the matching row sum.
  s.col_sums = s.row_sums;
  return g;
}

std::pair<Matrix, MatrixStats> unpack(Gram g) {
  return {std::move(g.k), std::move(g.stats)};
}

void zero_diagonal(Matrix& k) {
  for (std::size_t i = 0; i < k.rows(); ++i) k(i, i) = 0.0;
}

}  // namespace

GramPack GramPack::build(const SampleSet& x, const SampleSet& y,
                         const KernelSpec& spec, Options options) {
  const std::array<const SampleSet*, 2> sets{&x, &y};
  check_shapes(sets);
  const KernelSpec k = resolve_bandwidth(spec, sets);

  GramPack g;
  g.m_ = x.size();
  g.kernel_ = k;
  std::tie(g.kxy_, g.sxy_) = unpack(cross_gram(k, x, y, options.threads));
  std::tie(g.kxx_, g.sxx_) = unpack(within_gram(k, x, options.threads));
  std::tie(g.kyy_, g.syy_) = unpack(within_gram(k, y, options.threads));
  return g;
}

GramPack GramPack::build(const SampleSet& x, const SampleSet& y,
                         const SampleSet& z, const KernelSpec& spec,
                         Options options) {
  const std::array<const SampleSet*, 3> sets{&x, &y, &z};
  check_shapes(sets);
  const KernelSpec k = resolve_bandwidth(spec, sets);

  GramPack g;
  g.m_ = x.size();
  g.has_z_ = true;
  g.kernel_ = k;
  std::tie(g.kxy_, g.sxy_) = unpack(cross_gram(k, x, y, options.threads));
  std::tie(g.kxz_, g.sxz_) = unpack(cross_gram(k, x, z, options.threads));
  std::tie(g.kxx_, g.sxx_) = unpack(within_gram(k, x, options.threads));
  std::tie(g.kyy_, g.syy_) = unpack(within_gram(k, y, options.threads));
  std::tie(g.kzz_, g.szz_) = unpack(within_gram(k, z, options.threads));
  return g;
}

GramPack GramPack::from_matrices(Matrix kxy, Matrix kxx, Matrix kyy,
                                 std::optional<Matrix> kxz,
                                 std::optional<Matrix> kzz) {
  if (kxz.has_value() != kzz.has_value()) {
    throw PreconditionError("K_XZ and K_ZZ must be supplied together");
  }
  const std::size_t m = kxy.rows();
  auto check = [m](const Matrix& k, const char* name, bool symmetric) {
    if (k.rows() != m || k.cols() != m) {
      throw PreconditionError(std::string(name) + " is " +
                              std::to_string(k.rows()) + "x" +
                              std::to_string(k.cols()) + ", expected " +
                              std::to_string(m) + "x" + std::to_string(m));
    }
    if (symmetric) {
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < i; ++j)
          if (k(i, j) != k(j, i)) {
            throw PreconditionError(std::string(name) + " is not symmetric");
          }
    }
  };
  if (m < 2) {
    throw PreconditionError("need m >= 2 observations per sample, got " +
                            std::to_string(m));
  }
  check(kxy, "K_XY", false);
  check(kxx, "K_XX", true);
  check(kyy, "K_YY", true);
  if (kxz) {
    check(*kxz, "K_XZ", false);
    check(*kzz, "K_ZZ", true);
  }

  GramPack g;
  g.m_ = m;
  g.kxy_ = std::move(kxy);
  g.kxx_ = std::move(kxx);
  g.kyy_ = std::move(kyy);
  if (kxz) {
    g.has_z_ = true;
    g.kxz_ = std::move(*kxz);
    g.kzz_ = std::move(*kzz);
  }
  g.finalize();
  return g;
}

void GramPack::finalize() {
  zero_diagonal(kxx_);
  zero_diagonal(kyy_);
  sxy_ = MatrixStats::of(kxy_);
  sxx_ = MatrixStats::of(kxx_);
  syy_ = MatrixStats::of(kyy_);
  if (has_z_) {
    zero_diagonal(kzz_);
    sxz_ = MatrixStats::of(kxz_);
    szz_ = MatrixStats::of(kzz_);
  }
}

const Matrix& GramPack::within(Sample a) const {
  switch (a) {
    case Sample::X: return kxx_;
    case Sample::Y: return kyy_;
    case Sample::Z:
      if (!has_z_) throw PreconditionError("this comparison has no Z sample");
      return kzz_;
  }
  return kxx_;
}

const MatrixStats& GramPack::within_stats(Sample a) const {
  switch (a) {
    case Sample::X: return sxx_;
    case Sample::Y: return syy_;
    case Sample::Z:
      if (!has_z_) throw PreconditionError("this comparison has no Z sample");
      return szz_;
  }
  return sxx_;
}

CrossView GramPack::cross(Sample a, Sample b) const {
  if (a == Sample::X && b == Sample::Y) return {kxy_, sxy_, false};
  if (a == Sample::Y && b == Sample::X) return {kxy_, sxy_, true};
  if ((a == Sample::X && b == Sample::Z) || (a == Sample::Z && b == Sample::X)) {
    if (!has_z_) throw PreconditionError("this comparison has no Z sample");
    return {kxz_, sxz_, a == Sample::Z};
  }
  throw PreconditionError(std::string("no cross Gram matrix for pair (") +
                          std::string(to_string(a)) + "," +
                          std::string(to_string(b)) + ")");
}

const Matrix& GramPack::kxz() const {
  if (!has_z_) throw PreconditionError("this comparison has no Z sample");
  return kxz_;
}

std::size_t GramPack::memory_bytes() const noexcept {
  auto bytes = [](const Matrix& k, const MatrixStats& s) {
    return sizeof(double) * k.data().size() +
           sizeof(Real) * (s.row_sums.size() + s.col_sums.size());
  };
  std::size_t total = bytes(kxy_, sxy_) + bytes(kxx_, sxx_) + bytes(kyy_, syy_);
  if (has_z_) total += bytes(kxz_, sxz_) + bytes(kzz_, szz_);
  return total;
}

}  // namespace mmdvar
