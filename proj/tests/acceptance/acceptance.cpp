// Runs the acceptance checks in order and prints one verdict line each.
// Exit status is 0 iff every check passes. Pass check numbers as arguments
// to run a subset.

#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <new>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mmdvar/estimators.hpp"
#include "mmdvar/montecarlo.hpp"
#include "mmdvar/oracle.hpp"
#include "mmdvar/random.hpp"
#include "mmdvar_cli/cli.hpp"
#include "mmdvar_cli/csv.hpp"
#include "mmdvar_cli/report.hpp"

// Heap accounting for the memory check: every allocation carries its size
// in a 16-byte prefix.
namespace {
std::atomic<std::size_t> g_live{0};
std::atomic<std::size_t> g_peak{0};
constexpr std::size_t kPrefix = 16;
}  // namespace

void* operator new(std::size_t n) {
  void* p = std::malloc(n + kPrefix);
  if (p == nullptr) throw std::bad_alloc();
  *static_cast<std::size_t*>(p) = n;
  const std::size_t live = g_live.fetch_add(n) + n;
  std::size_t peak = g_peak.load();
  while (live > peak && !g_peak.compare_exchange_weak(peak, live)) {
  }
  return static_cast<char*>(p) + kPrefix;
}
void* operator new[](std::size_t n) { return operator new(n); }
void operator delete(void* p) noexcept {
  if (p == nullptr) return;
  char* base = static_cast<char*>(p) - kPrefix;
  g_live.fetch_sub(*reinterpret_cast<std::size_t*>(base));
  std::free(base);
}
void operator delete[](void* p) noexcept { operator delete(p); }
void operator delete(void* p, std::size_t) noexcept { operator delete(p); }
void operator delete[](void* p, std::size_t) noexcept { operator delete(p); }

namespace {

using namespace mmdvar;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;
};

/// |a - b| <= 1e-10 |b|, or <= 1e-12 when |b| < 1e-8.
struct Agreement {
  std::size_t compared = 0;
  std::size_t failed = 0;
  double worst_rel = 0.0;
  double worst_abs_small = 0.0;

  void check(double got, double want) {
    ++compared;
    const double gap = std::abs(got - want);
    if (std::abs(want) < 1e-8) {
      worst_abs_small = std::max(worst_abs_small, gap);
      if (gap > 1e-12) ++failed;
    } else {
      worst_rel = std::max(worst_rel, gap / std::abs(want));
      if (gap > 1e-10 * std::abs(want)) ++failed;
    }
  }
  std::string summary() const {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%zu comparisons, %zu outside tolerance, max rel err %.2e, "
                  "max abs err (small values) %.2e",
                  compared, failed, worst_rel, worst_abs_small);
    return buf;
  }
};

SampleSet gaussian(StreamRng& rng, std::size_t m, std::size_t d, double mean, double sd) {
  std::vector<double> v(m * d);
  for (double& x : v) x = mean + sd * rng.normal();
  return SampleSet(m, d, std::move(v));
}

const std::vector<KernelSpec>& grid_kernels() {
  static const std::vector<KernelSpec> k = {KernelSpec::linear(), KernelSpec::rbf_median(),
                                            KernelSpec::polynomial(2, 1.0)};
  return k;
}

/// Calls fn on 50 random three-sample packs per (m, kernel), m = 4..8.
void for_each_grid_pack(const std::function<void(const GramPack&)>& fn) {
  std::uint64_t stream = 0;
  for (std::size_t m = 4; m <= 8; ++m) {
    for (const KernelSpec& k : grid_kernels()) {
      for (int rep = 0; rep < 50; ++rep) {
        StreamRng rng(20240601, stream++);
        const SampleSet x = gaussian(rng, m, 3, 0.0, 1.0);
        const SampleSet y = gaussian(rng, m, 3, 0.3, 1.2);
        const SampleSet z = gaussian(rng, m, 3, -0.2, 0.8);
        fn(GramPack::build(x, y, z, k));
      }
    }
  }
}

Verdict oracle_equivalence() {
  const auto t0 = Clock::now();
  Agreement a;
  for_each_grid_pack([&](const GramPack& g) {
    for (const TermId& t : variance_terms(true)) a.check(estimate_term(g, t), oracle_sub_term(g, t));
    a.check(mmd2_u(g), oracle_mmd2_u(g));
    a.check(mmd2_u(g, Comparison::XZ), oracle_mmd2_u(g, Comparison::XZ));
  });
  const double secs = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof buf, ", %.2f s (limit 60 s)", secs);
  return {a.failed == 0 && secs < 60.0, a.summary() + buf};
}

Verdict assembly_identity() {
  Agreement a;
  for_each_grid_pack([&](const GramPack& g) {
    const TermTable oracle = oracle_sub_terms(g);
    const TermTable fast = estimate_sub_terms(g);
    a.check(vhat_m(g), assemble_mmd_variance(g.m(), oracle));
    a.check(vhat_m(g), assemble_mmd_variance(g.m(), fast));
    a.check(nuhat_m(g), assemble_diff_variance(g.m(), oracle));
    a.check(nuhat_m(g), assemble_diff_variance(g.m(), fast));
  });
  return {a.failed == 0, a.summary()};
}

Verdict trivial_exactness() {
  double worst = 0.0;
  for (std::size_t m : {4u, 10u, 100u}) {
    StreamRng rng(3, m);
    const GramPack g = GramPack::build(gaussian(rng, m, 2, 0.0, 1.0), gaussian(rng, m, 2, 1.0, 2.0),
                                       gaussian(rng, m, 2, -1.0, 0.5), KernelSpec::constant(1.0));
    worst = std::max({worst, std::abs(mmd2_u(g)), std::abs(vhat_m(g)), std::abs(nuhat_m(g))});
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, "max |mmd2_u|, |vhat_m|, |nuhat_m| = %.2e (limit 1e-12)", worst);
  return {worst <= 1e-12, buf};
}

McConfig criterion_config() {
  McConfig cfg;
  cfg.model.mean_x = 0.0;
  cfg.model.var_x = 1.0;
  cfg.model.mean_y = 0.5;
  cfg.model.var_y = 2.0;
  cfg.model.mean_z = 0.25;
  cfg.model.var_z = 1.0;
  cfg.m = 8;
  cfg.replicates = 100000;
  cfg.seed = 42;
  cfg.z_threshold = 4.0;
  return cfg;
}

std::string describe_entries(const McReport& r, bool list_all) {
  std::ostringstream out;
  std::size_t failed = 0;
  double worst = 0.0;
  std::string worst_name;
  for (const McEntry& e : r.entries) {
    if (!e.pass) ++failed;
    if (std::abs(e.z) >= worst) {
      worst = std::abs(e.z);
      worst_name = e.target;
    }
  }
  out << r.entries.size() << " targets, " << failed << " beyond 4 SE, max |z| = " << worst
      << " (" << worst_name << ")";
  if (list_all) {
    for (const McEntry& e : r.entries) {
      char buf[200];
      std::snprintf(buf, sizeof buf, "\n      %-26s estimate %.6g  truth %.6g  se %.3g  z %+.2f",
                    e.target.c_str(), e.estimate, e.truth, e.se, e.z);
      out << buf;
    }
  }
  return out.str();
}

Verdict unbiasedness() {
  const auto t0 = Clock::now();
  const McReport r = run_unbiasedness(criterion_config());
  const double secs = seconds_since(t0);
  char buf[64];
  std::snprintf(buf, sizeof buf, "; %.1f s (limit 300 s)", secs);
  return {r.all_pass() && secs < 300.0, describe_entries(r, false) + buf};
}

Verdict variance_tracking() {
  const McReport r = run_variance_tracking(criterion_config());
  return {r.all_pass(), describe_entries(r, true)};
}

Verdict component_consistency() {
  const GaussianLinearModel md = criterion_config().model;
  const PopulationMoments mom = gaussian_linear_moments(md);
  const VarianceDecomposition v = population_V(mom, 8);
  const VarianceDecomposition n = population_nu(mom, 8);
  const ComponentEstimate z = zeta_direct(md, 10000, 1000, 7, 0);
  const ComponentEstimate x = xi_direct(md, 10000, 1000, 8, 0);
  const double z1 = (z.first_order - v.first_order) / z.first_order_se;
  const double z2 = (z.second_order - v.second_order) / z.second_order_se;
  const double x1 = (x.first_order - n.first_order) / x.first_order_se;
  const double x2 = (x.second_order - n.second_order) / x.second_order_se;
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "zeta1 %.5g vs %.5g (z %+.2f), zeta2 %.5g vs %.5g (z %+.2f); "
                "xi1 %.5g vs %.5g (z %+.2f), xi2 %.5g vs %.5g (z %+.2f)",
                z.first_order, v.first_order, z1, z.second_order, v.second_order, z2,
                x.first_order, n.first_order, x1, x.second_order, n.second_order, x2);
  const bool pass = std::abs(z1) <= 4 && std::abs(z2) <= 4 && std::abs(x1) <= 4 && std::abs(x2) <= 4;
  return {pass, buf};
}

struct Timing {
  double seconds = 0.0;
  std::size_t peak_bytes = 0;
};

Timing time_mmd_and_vhat(std::size_t m, std::uint64_t seed) {
  StreamRng rng(seed, m);
  const SampleSet x = gaussian(rng, m, 10, 0.0, 1.0);
  const SampleSet y = gaussian(rng, m, 10, 0.1, 1.0);
  const std::size_t base = g_live.load();
  g_peak.store(base);
  const auto t0 = Clock::now();
  const GramPack g = GramPack::build(x, y, KernelSpec::rbf_median());
  volatile double sink = mmd2_u(g) + vhat_m(g);
  (void)sink;
  return {seconds_since(t0), g_peak.load() - base};
}

Verdict performance() {
  constexpr int kRuns = 5;
  Timing small{1e30, 0}, large{1e30, 0};
  for (int r = 0; r < kRuns; ++r) {
    const Timing s = time_mmd_and_vhat(500, r);
    const Timing l = time_mmd_and_vhat(2000, r);
    small.seconds = std::min(small.seconds, s.seconds);
    large.seconds = std::min(large.seconds, l.seconds);
    small.peak_bytes = std::max(small.peak_bytes, s.peak_bytes);
    large.peak_bytes = std::max(large.peak_bytes, l.peak_bytes);
  }
  const double exponent = std::log(large.seconds / small.seconds) / std::log(4.0);
  const double m2 = 2000.0 * 2000.0;
  const double bytes_per_m2 = static_cast<double>(large.peak_bytes) / m2;
  const double memory_ratio =
      static_cast<double>(large.peak_bytes) / static_cast<double>(small.peak_bytes);
  char buf[320];
  std::snprintf(buf, sizeof buf,
                "m=2000 d=10 RBF: %.3f s (limit 10 s); m=500: %.4f s; time exponent %.2f "
                "(limit 2.3); peak heap %.1f MB = %.1f bytes per m^2, growth x%.1f for 4x m",
                large.seconds, small.seconds, exponent, large.peak_bytes / 1e6, bytes_per_m2,
                memory_ratio);
  // Three dense m x m double matrices are 24 bytes per m^2; allow a little
  // slack for O(m) caches. Quadratic growth means a ratio near 16.
  const bool pass = large.seconds < 10.0 && exponent <= 2.3 && bytes_per_m2 <= 32.0 &&
                    memory_ratio > 12.0 && memory_ratio < 20.0;
  return {pass, buf};
}

Verdict cli_contract() {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / ("mmdvar_accept_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  auto file = [&](const std::string& name, const std::string& text) {
    std::ofstream((dir / name)) << text;
    return (dir / name).string();
  };
  auto run = [](const std::vector<std::string>& args, std::string& out, std::string& err) {
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e);
    out = o.str();
    err = e.str();
    return code;
  };

  std::vector<std::string> failures;
  std::string out, err;
  const std::string m3 = file("m3.csv", "1\n2\n3\n");
  if (run({"mmd", "-x", m3, "-y", m3}, out, err) != 3 || err.find("m ≥ 4") == std::string::npos) {
    failures.push_back("m=3 exit code");
  }
  const std::string ragged = file("ragged.csv", "1,2\n3\n");
  const std::string x4 = file("x4.csv", "1\n2\n3\n4\n");
  if (run({"mmd", "-x", ragged, "-y", x4}, out, err) != 2 ||
      err.find("ragged row 2") == std::string::npos) {
    failures.push_back("ragged exit code");
  }
  if (run({"verify", "--replicates", "10"}, out, err) != 2 ||
      err.find("replicates below minimum") == std::string::npos) {
    failures.push_back("replicates exit code");
  }

  // Round trip: parse, compare bit for bit, re-render, compare bytes.
  const std::string y = file("y.csv", "0.1\n0.7\n1.3\n2.9\n3.3\n");
  const std::string x = file("x.csv", "1e-3\n-0.25\n2.5\n0.3333333333333333\n4\n");
  const std::string z = file("z.csv", "1\n0.5\n2\n3\n-1\n");
  const std::vector<std::string> args = {"relmmd", "-x", x, "-y", y, "-z", z};
  if (run(args, out, err) != 0) {
    failures.push_back("relmmd run");
  } else {
    std::string again;
    run(args, again, err);
    const nlohmann::ordered_json j = nlohmann::ordered_json::parse(out);
    cli::Node doc = cli::Node::object();
    for (const auto& [k, v] : j.items()) {
      if (v.is_number_integer()) {
        doc.set(k, v.get<std::int64_t>());
      } else if (v.is_number_float()) {
        doc.set(k, v.get<double>());
      } else {
        doc.set(k, v.get<std::string>());
      }
    }
    std::ostringstream re;
    cli::write_json(re, doc);
    const EstimateReport truth = full_report(GramPack::build(
        cli::load_csv(x), cli::load_csv(y), cli::load_csv(z), KernelSpec::rbf_median()));
    if (re.str() != out) failures.push_back("re-rendered JSON differs");
    if (again != out) failures.push_back("output not byte-stable");
    if (j["nuhat"].get<double>() != *truth.nuhat || j["diff"].get<double>() != *truth.diff) {
      failures.push_back("parsed values differ from library values");
    }
  }
  fs::remove_all(dir);

  if (failures.empty()) {
    return {true, "m=3 -> exit 3, ragged row -> exit 2, 10 replicates -> exit 2, "
                  "JSON round trip bit-exact and byte-stable"};
  }
  std::string detail = "failed:";
  for (const auto& f : failures) detail += " [" + f + "]";
  return {false, detail};
}

}  // namespace

int main(int argc, char** argv) {
  struct Check {
    int id;
    const char* title;
    Verdict (*run)();
  };
  const std::vector<Check> checks = {
      {1, "oracle equivalence", oracle_equivalence},
      {2, "assembly identity", assembly_identity},
      {3, "trivial exactness", trivial_exactness},
      {4, "unbiasedness", unbiasedness},
      {5, "variance tracking", variance_tracking},
      {6, "zeta/xi consistency", component_consistency},
      {7, "performance", performance},
      {8, "CLI contract", cli_contract},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  bool all = true;
  for (const Check& c : checks) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    all = all && v.pass;
    std::printf("[%s] criterion %d, %s: %s\n", v.pass ? "PASS" : "FAIL", c.id, c.title,
                v.detail.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
