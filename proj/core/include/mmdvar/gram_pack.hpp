#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "mmdvar/kernels.hpp"
#include "mmdvar/sample_set.hpp"

namespace mmdvar {

/// The three sample sets that can take part in a comparison.
enum class Sample { X, Y, Z };

std::string_view to_string(Sample s);

/// Accumulator type for Gram aggregates and everything built from them.
/// The variance estimates are small differences of large sums, so the
/// extra mantissa bits of long double show up directly in their accuracy.
using Real = long double;

/// Aggregates cached for one Gram matrix K.
struct MatrixStats {
  std::vector<Real> row_sums;  // K 1
  std::vector<Real> col_sums;  // K^T 1
  Real grand_sum = 0;          // 1^T K 1
  Real frob_sq = 0;            // ||K||_F^2
  Real trace = 0;

  static MatrixStats of(const Matrix& k);
};

/// A cross Gram matrix K_AB seen in a fixed orientation: rows index A,
/// columns index B. (Y, X) is served from K_XY with the roles of its row
/// and column aggregates swapped.
class CrossView {
 public:
  CrossView(const Matrix& k, const MatrixStats& stats, bool transposed)
      : k_(&k), stats_(&stats), transposed_(transposed) {}

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return transposed_ ? (*k_)(j, i) : (*k_)(i, j);
  }
  /// K_AB 1
  std::span<const Real> row_sums() const noexcept {
    return transposed_ ? stats_->col_sums : stats_->row_sums;
  }
  /// K_AB^T 1
  std::span<const Real> col_sums() const noexcept {
    return transposed_ ? stats_->row_sums : stats_->col_sums;
  }
  Real grand_sum() const noexcept { return stats_->grand_sum; }
  Real frob_sq() const noexcept { return stats_->frob_sq; }
  Real trace() const noexcept { return stats_->trace; }

 private:
  const Matrix* k_;
  const MatrixStats* stats_;
  bool transposed_;
};

/// Every kernel matrix the estimators need, built once:
///
///   K_XY, K_XZ                 cross matrices
///   K~_XX, K~_YY, K~_ZZ        within-sample matrices, diagonal zeroed
///
/// together with their row/column sums, grand sums and squared Frobenius
/// norms. Immutable after construction.
class GramPack {
 public:
  struct Options {
    /// Worker threads for Gram construction; 0 picks the hardware count.
    /// The result does not depend on this value.
    unsigned threads = 0;
  };

  /// All sets must share m >= 2 rows and dimension d. A median-heuristic
  /// RBF bandwidth is resolved against the pooled samples first.
  static GramPack build(const SampleSet& x, const SampleSet& y,
                        const KernelSpec& spec, Options options);
  static GramPack build(const SampleSet& x, const SampleSet& y,
                        const KernelSpec& spec) {
    return build(x, y, spec, Options{});
  }
  static GramPack build(const SampleSet& x, const SampleSet& y,
                        const SampleSet& z, const KernelSpec& spec,
                        Options options);
  static GramPack build(const SampleSet& x, const SampleSet& y,
                        const SampleSet& z, const KernelSpec& spec) {
    return build(x, y, z, spec, Options{});
  }

  /// Assembles a pack from precomputed kernel matrices. Within-sample
  /// matrices must be symmetric; their diagonals are discarded.
  static GramPack from_matrices(Matrix kxy, Matrix kxx, Matrix kyy,
                                std::optional<Matrix> kxz = std::nullopt,
                                std::optional<Matrix> kzz = std::nullopt);

  std::size_t m() const noexcept { return m_; }
  bool has_z() const noexcept { return has_z_; }
  /// Resolved kernel, absent for packs assembled from raw matrices.
  const std::optional<KernelSpec>& kernel() const noexcept { return kernel_; }

  /// Zero-diagonal within-sample matrix K~_AA.
  const Matrix& within(Sample a) const;
  const MatrixStats& within_stats(Sample a) const;

  /// Cross matrix K_AB for (A, B) in {(X,Y), (Y,X), (X,Z), (Z,X)}.
  CrossView cross(Sample a, Sample b) const;
  const Matrix& kxy() const noexcept { return kxy_; }
  const Matrix& kxz() const;

  /// Bytes held by matrices and caches.
  std::size_t memory_bytes() const noexcept;

 private:
  GramPack() = default;
  void finalize();

  std::size_t m_ = 0;
  bool has_z_ = false;
  std::optional<KernelSpec> kernel_;

  Matrix kxy_, kxz_, kxx_, kyy_, kzz_;
  MatrixStats sxy_, sxz_, sxx_, syy_, szz_;
};

}  // namespace mmdvar
