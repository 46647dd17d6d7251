#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "mmdvar/oracle.hpp"
#include "mmdvar/terms.hpp"

namespace mmdvar {

/// Smallest replicate count for which a pass/fail verdict is issued.
inline constexpr std::size_t kMinReplicates = 1000;

/// A statistic whose replicate mean (or variance) is checked.
struct McTarget {
  enum class Kind { Term, Mmd2, Diff, Vhat, Nuhat };

  Kind kind = Kind::Mmd2;
  TermId term{};  // Kind::Term only

  static McTarget of(const TermId& t) { return {Kind::Term, t}; }
  static McTarget mmd2() { return {Kind::Mmd2, {}}; }
  static McTarget diff() { return {Kind::Diff, {}}; }
  static McTarget vhat() { return {Kind::Vhat, {}}; }
  static McTarget nuhat() { return {Kind::Nuhat, {}}; }

  bool needs_z() const;
  std::string name() const;
};

/// mmd2, vhat and every variance term; with Z also diff, nuhat and the
/// Z-dependent terms.
std::vector<McTarget> default_targets(bool with_z);

struct McConfig {
  GaussianLinearModel model;
  std::size_t m = 8;
  std::size_t replicates = 100000;
  std::uint64_t seed = 42;
  /// Draw a Z sample per replicate.
  bool with_z = true;
  /// Empty means default_targets(with_z).
  std::vector<McTarget> targets;
  /// Verdict passes when |z| <= z_threshold.
  double z_threshold = 4.0;
  /// Worker threads; 0 picks the hardware count. Results do not depend on it.
  unsigned threads = 0;

  /// Throws InputError for invalid settings.
  void validate() const;
};

struct McEntry {
  std::string target;
  double estimate = 0.0;  // replicate mean, or empirical variance
  double se = 0.0;
  double truth = 0.0;
  double z = 0.0;         // (estimate - truth) / se
  bool pass = false;
};

struct McReport {
  std::string check;  // "unbiasedness" or "variance_tracking"
  McConfig config;
  std::vector<McEntry> entries;

  bool all_pass() const;
};

/// Name of the sampler recorded in reports.
inline constexpr const char* kSamplerName = "mt19937_64/splitmix64-streams/box-muller";

/// Draws `replicates` independent datasets of size m from the model and
/// compares each target's replicate mean against its population value
/// (moments for terms, MMD^2 for mmd2/diff, V_m and nu_m for vhat/nuhat).
McReport run_unbiasedness(const McConfig& config);

/// Compares the empirical variance of MMD^2_u(X, Y) across replicates with
/// V_m, and with Z that of the difference statistic with nu_m. Standard
/// errors of the empirical variances are delete-one jackknife.
McReport run_variance_tracking(const McConfig& config);

/// z-score and verdict for an estimate with standard error `se`. A zero
/// standard error (deterministic statistic) passes iff estimate and truth
/// agree to rounding.
McEntry score(std::string target, double estimate, double se, double truth,
              double threshold);

}  // namespace mmdvar
