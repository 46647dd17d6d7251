#include "mmdvar/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mmdvar/error.hpp"
#include "mmdvar/estimators.hpp"
#include "mmdvar/random.hpp"
#include "parallel.hpp"

namespace mmdvar {

bool McTarget::needs_z() const {
  switch (kind) {
    case Kind::Term: return mmdvar::needs_z(term);
    case Kind::Diff:
    case Kind::Nuhat: return true;
    default: return false;
  }
}

std::string McTarget::name() const {
  switch (kind) {
    case Kind::Term: return mmdvar::name(term);
    case Kind::Mmd2: return "mmd2";
    case Kind::Diff: return "diff";
    case Kind::Vhat: return "vhat";
    case Kind::Nuhat: return "nuhat";
  }
  return "unknown";
}

std::vector<McTarget> default_targets(bool with_z) {
  std::vector<McTarget> out = {McTarget::mmd2(), McTarget::vhat()};
  if (with_z) {
    out.push_back(McTarget::diff());
    out.push_back(McTarget::nuhat());
  }
  for (const TermId& t : variance_terms(with_z)) out.push_back(McTarget::of(t));
  return out;
}

void McConfig::validate() const {
  model.validate();
  if (replicates < kMinReplicates) {
    throw InputError("replicates below minimum: got " + std::to_string(replicates) +
                     ", need at least " + std::to_string(kMinReplicates));
  }
  if (!(z_threshold > 0.0)) throw InputError("z threshold must be positive");
  std::size_t min_m = 2;
  for (const McTarget& t : targets.empty() ? default_targets(with_z) : targets) {
    if (t.kind == McTarget::Kind::Term) {
      mmdvar::validate(t.term);
      min_m = std::max(min_m, min_sample_size(t.term));
    }
    if (t.kind == McTarget::Kind::Vhat || t.kind == McTarget::Kind::Nuhat) {
      min_m = std::max<std::size_t>(min_m, 4);
    }
    if (t.needs_z() && !with_z) {
      throw InputError("target " + t.name() + " needs a Z sample");
    }
  }
  if (m < min_m) {
    throw InputError("sample size m = " + std::to_string(m) +
                     " is below the minimum " + std::to_string(min_m) +
                     " for the requested targets");
  }
}

bool McReport::all_pass() const {
  return std::all_of(entries.begin(), entries.end(),
                     [](const McEntry& e) { return e.pass; });
}

McEntry score(std::string target, double estimate, double se, double truth,
              double threshold) {
  McEntry e{std::move(target), estimate, se, truth, 0.0, false};
  const double gap = estimate - truth;
  if (se > 0.0) {
    e.z = gap / se;
  } else {
    const double scale = std::max({1.0, std::abs(estimate), std::abs(truth)});
    e.z = std::abs(gap) <= 1e-9 * scale
              ? 0.0
              : std::copysign(std::numeric_limits<double>::infinity(), gap);
  }
  e.pass = std::abs(e.z) <= threshold;
  return e;
}

namespace {

SampleSet draw_sample(StreamRng& rng, std::size_t m, double mean, double var) {
  std::vector<double> v(m);
  for (double& x : v) x = rng.normal(mean, var);
  return SampleSet(m, 1, std::move(v));
}

double evaluate(const McTarget& t, const GramPack& g) {
  switch (t.kind) {
    case McTarget::Kind::Term: return estimate_term(g, t.term);
    case McTarget::Kind::Mmd2: return mmd2_u(g, Comparison::XY);
    case McTarget::Kind::Diff: return mmd2_u(g, Comparison::XY) - mmd2_u(g, Comparison::XZ);
    case McTarget::Kind::Vhat: return vhat_m(g, Comparison::XY);
    case McTarget::Kind::Nuhat: return nuhat_m(g);
  }
  return 0.0;
}

double truth_of(const McTarget& t, const PopulationMoments& mom, std::size_t m) {
  switch (t.kind) {
    case McTarget::Kind::Term: return mom.value(t.term);
    case McTarget::Kind::Mmd2: return mom.mmd2(Sample::Y);
    case McTarget::Kind::Diff: return mom.mmd2(Sample::Y) - mom.mmd2(Sample::Z);
    case McTarget::Kind::Vhat: return population_V(mom, m).total;
    case McTarget::Kind::Nuhat: return population_nu(mom, m).total;
  }
  return 0.0;
}

/// values[r * targets.size() + t] for replicate r, target t.
std::vector<double> simulate(const McConfig& cfg, const std::vector<McTarget>& targets) {
  const std::size_t nt = targets.size();
  std::vector<double> values(cfg.replicates * nt);
  const KernelSpec linear = KernelSpec::linear();
  const GaussianLinearModel& md = cfg.model;
  detail::parallel_for(cfg.replicates, cfg.threads, [&](std::size_t r) {
    StreamRng rng(cfg.seed, r);
    const SampleSet x = draw_sample(rng, cfg.m, md.mean_x, md.var_x);
    const SampleSet y = draw_sample(rng, cfg.m, md.mean_y, md.var_y);
    GramPack::Options serial{1};
    GramPack g = cfg.with_z
                     ? GramPack::build(x, y, draw_sample(rng, cfg.m, md.mean_z, md.var_z),
                                       linear, serial)
                     : GramPack::build(x, y, linear, serial);
    for (std::size_t t = 0; t < nt; ++t) values[r * nt + t] = evaluate(targets[t], g);
  });
  return values;
}

struct Column {
  double mean = 0.0;
  double ss = 0.0;  // sum of squared deviations
};

Column column_stats(const std::vector<double>& values, std::size_t nt, std::size_t t,
                    std::size_t n) {
  Column c;
  for (std::size_t r = 0; r < n; ++r) c.mean += values[r * nt + t];
  c.mean /= static_cast<double>(n);
  for (std::size_t r = 0; r < n; ++r) {
    const double d = values[r * nt + t] - c.mean;
    c.ss += d * d;
  }
  return c;
}

/// Sample variance (n - 1 divisor) and its delete-one jackknife SE.
std::pair<double, double> variance_with_jackknife(const std::vector<double>& values,
                                                  std::size_t nt, std::size_t t,
                                                  std::size_t n) {
  const Column c = column_stats(values, nt, t, n);
  const double nd = static_cast<double>(n);
  const double var = c.ss / (nd - 1.0);
  std::vector<double> loo(n);
  double loo_mean = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    const double d = values[r * nt + t] - c.mean;
    loo[r] = (c.ss - d * d * nd / (nd - 1.0)) / (nd - 2.0);
    loo_mean += loo[r];
  }
  loo_mean /= nd;
  double s = 0.0;
  for (double v : loo) s += (v - loo_mean) * (v - loo_mean);
  return {var, std::sqrt((nd - 1.0) / nd * s)};
}

}  // namespace

McReport run_unbiasedness(const McConfig& config) {
  config.validate();
  const std::vector<McTarget> targets =
      config.targets.empty() ? default_targets(config.with_z) : config.targets;
  const PopulationMoments mom = gaussian_linear_moments(config.model);
  const std::vector<double> values = simulate(config, targets);

  McReport report{"unbiasedness", config, {}};
  const std::size_t n = config.replicates;
  const std::size_t nt = targets.size();
  for (std::size_t t = 0; t < nt; ++t) {
    const Column c = column_stats(values, nt, t, n);
    const double nd = static_cast<double>(n);
    const double se = std::sqrt(c.ss / (nd - 1.0) / nd);
    report.entries.push_back(score(targets[t].name(), c.mean, se,
                                   truth_of(targets[t], mom, config.m),
                                   config.z_threshold));
  }
  return report;
}

McReport run_variance_tracking(const McConfig& config) {
  config.validate();
  std::vector<McTarget> targets = {McTarget::mmd2()};
  if (config.with_z) targets.push_back(McTarget::diff());
  const PopulationMoments mom = gaussian_linear_moments(config.model);
  const std::vector<double> values = simulate(config, targets);

  McReport report{"variance_tracking", config, {}};
  const std::size_t n = config.replicates;
  const auto [var_mmd, se_mmd] = variance_with_jackknife(values, targets.size(), 0, n);
  report.entries.push_back(score("var[mmd2]", var_mmd, se_mmd,
                                 population_V(mom, config.m).total, config.z_threshold));
  if (config.with_z) {
    const auto [var_diff, se_diff] = variance_with_jackknife(values, targets.size(), 1, n);
    report.entries.push_back(score("var[diff]", var_diff, se_diff,
                                   population_nu(mom, config.m).total,
                                   config.z_threshold));
  }
  return report;
}

}  // namespace mmdvar
