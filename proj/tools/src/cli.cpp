#include "mmdvar_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "mmdvar/error.hpp"
#include "mmdvar/estimators.hpp"
#include "mmdvar/montecarlo.hpp"
#include "mmdvar_cli/csv.hpp"
#include "mmdvar_cli/report.hpp"

namespace mmdvar::cli {

namespace {

enum class Format { Json, Tsv };

struct KernelFlags {
  std::string kind = "rbf";
  std::string bandwidth = "median";
  int degree = 2;
  double coef0 = 1.0;
  double const_value = 1.0;
};

struct RunConfig {
  std::string x_path, y_path, z_path;
  KernelFlags kernel;
  double floor_eps = kDefaultFloorEpsilon;
  std::string format_name = "json";
  Format format = Format::Json;
  unsigned threads = 0;

  // verify
  McConfig mc;
  std::string check = "all";
};

KernelSpec make_kernel(const KernelFlags& f) {
  if (f.kind == "linear") return KernelSpec::linear();
  if (f.kind == "poly") return KernelSpec::polynomial(f.degree, f.coef0);
  if (f.kind == "const") return KernelSpec::constant(f.const_value);
  if (f.bandwidth == "median") return KernelSpec::rbf_median();
  double sigma = 0.0;
  const char* b = f.bandwidth.data();
  const char* e = b + f.bandwidth.size();
  const auto [ptr, ec] = std::from_chars(b, e, sigma);
  if (ec != std::errc() || ptr != e) {
    throw InputError("--bandwidth must be a positive number or 'median', got '" +
                     f.bandwidth + "'");
  }
  return KernelSpec::rbf(sigma);
}

void emit(const RunConfig& cfg, const Node& doc, std::ostream& out) {
  if (cfg.format == Format::Json) {
    write_json(out, doc);
  } else {
    write_tsv(out, doc);
  }
}

Node optional_number(const std::optional<double>& v) {
  return v ? Node(*v) : Node(nullptr);
}

int cmd_mmd(const RunConfig& cfg, std::ostream& out) {
  const SampleSet x = load_csv(cfg.x_path);
  const SampleSet y = load_csv(cfg.y_path);
  const GramPack g = GramPack::build(x, y, make_kernel(cfg.kernel), {cfg.threads});
  const EstimateReport r = full_report(g, cfg.floor_eps);
  Node doc = Node::object();
  doc.set("m", r.m)
      .set("d", x.dim())
      .set("kernel", r.kernel ? r.kernel->describe() : "precomputed")
      .set("mmd2", r.mmd2_xy)
      .set("vhat", r.vhat)
      .set("vhat_floored", r.vhat_floored)
      .set("z_stat", r.z_stat);
  emit(cfg, doc, out);
  return kOk;
}

int cmd_relmmd(const RunConfig& cfg, std::ostream& out) {
  const SampleSet x = load_csv(cfg.x_path);
  const SampleSet y = load_csv(cfg.y_path);
  const SampleSet z = load_csv(cfg.z_path);
  const GramPack g = GramPack::build(x, y, z, make_kernel(cfg.kernel), {cfg.threads});
  const EstimateReport r = full_report(g, cfg.floor_eps);
  Node doc = Node::object();
  doc.set("m", r.m)
      .set("d", x.dim())
      .set("kernel", r.kernel ? r.kernel->describe() : "precomputed")
      .set("mmd2_xy", r.mmd2_xy)
      .set("mmd2_xz", optional_number(r.mmd2_xz))
      .set("diff", optional_number(r.diff))
      .set("nuhat", optional_number(r.nuhat))
      .set("nuhat_floored", optional_number(r.nuhat_floored))
      .set("z_stat", r.z_stat);
  emit(cfg, doc, out);
  return kOk;
}

Node report_node(const McReport& r) {
  Node entries = Node::array();
  for (const McEntry& e : r.entries) {
    Node n = Node::object();
    n.set("target", e.target)
        .set("estimate", e.estimate)
        .set("se", e.se)
        .set("truth", e.truth)
        .set("z", e.z)
        .set("pass", e.pass);
    entries.push(std::move(n));
  }
  Node n = Node::object();
  n.set("check", r.check).set("all_pass", r.all_pass()).set("entries", std::move(entries));
  return n;
}

int cmd_verify(const RunConfig& cfg, std::ostream& out) {
  McConfig mc = cfg.mc;
  mc.threads = cfg.threads;
  mc.validate();

  std::vector<McReport> reports;
  if (cfg.check == "all" || cfg.check == "unbiasedness") reports.push_back(run_unbiasedness(mc));
  if (cfg.check == "all" || cfg.check == "variance") reports.push_back(run_variance_tracking(mc));

  const GaussianLinearModel& md = mc.model;
  Node model = Node::object();
  model.set("mean_x", md.mean_x).set("var_x", md.var_x)
      .set("mean_y", md.mean_y).set("var_y", md.var_y)
      .set("mean_z", md.mean_z).set("var_z", md.var_z);
  Node config = Node::object();
  config.set("model", std::move(model))
      .set("m", mc.m)
      .set("replicates", mc.replicates)
      .set("seed", mc.seed)
      .set("with_z", mc.with_z)
      .set("z_threshold", mc.z_threshold)
      .set("sampler", kSamplerName);

  bool pass = true;
  Node checks = Node::array();
  for (const McReport& r : reports) {
    pass = pass && r.all_pass();
    checks.push(report_node(r));
  }
  Node doc = Node::object();
  doc.set("config", std::move(config)).set("all_pass", pass).set("checks", std::move(checks));
  emit(cfg, doc, out);
  return pass ? kOk : kVerificationFailed;
}

void add_common(CLI::App* sub, RunConfig& cfg) {
  sub->add_option("--format", cfg.format_name, "Output format")
      ->check(CLI::IsMember({"json", "tsv"}))
      ->capture_default_str()
      ->each([&cfg](const std::string& v) {
        cfg.format = v == "tsv" ? Format::Tsv : Format::Json;
      });
  sub->add_option("--threads", cfg.threads, "Worker threads (0 = all cores)");
}

void add_data(CLI::App* sub, RunConfig& cfg, bool with_z) {
  sub->add_option("-x,--x", cfg.x_path, "CSV file with the X sample")->required();
  sub->add_option("-y,--y", cfg.y_path, "CSV file with the Y sample")->required();
  if (with_z) sub->add_option("-z,--z", cfg.z_path, "CSV file with the Z sample")->required();
  sub->add_option("--kernel", cfg.kernel.kind, "Kernel")
      ->check(CLI::IsMember({"linear", "rbf", "poly", "const"}))
      ->capture_default_str();
  sub->add_option("--bandwidth", cfg.kernel.bandwidth, "RBF bandwidth or 'median'")
      ->capture_default_str();
  sub->add_option("--degree", cfg.kernel.degree, "Polynomial degree")->capture_default_str();
  sub->add_option("--coef0", cfg.kernel.coef0, "Polynomial offset")->capture_default_str();
  sub->add_option("--const-value", cfg.kernel.const_value, "Constant kernel value")
      ->capture_default_str();
  sub->add_option("--floor-eps", cfg.floor_eps, "Floor applied to variance estimates")
      ->capture_default_str();
  add_common(sub, cfg);
}

void add_verify(CLI::App* sub, RunConfig& cfg) {
  GaussianLinearModel& md = cfg.mc.model;
  md.mean_y = 0.5;
  md.var_y = 2.0;
  md.mean_z = 0.25;
  sub->add_option("--mean-x", md.mean_x, "Mean of X ~ N(mean, var)")->capture_default_str();
  sub->add_option("--var-x", md.var_x, "Variance of X")->capture_default_str();
  sub->add_option("--mean-y", md.mean_y, "Mean of Y")->capture_default_str();
  sub->add_option("--var-y", md.var_y, "Variance of Y")->capture_default_str();
  sub->add_option("--mean-z", md.mean_z, "Mean of Z")->capture_default_str();
  sub->add_option("--var-z", md.var_z, "Variance of Z")->capture_default_str();
  sub->add_option("-m,--m", cfg.mc.m, "Sample size per replicate")->capture_default_str();
  sub->add_option("--replicates", cfg.mc.replicates, "Independent datasets drawn")->capture_default_str();
  sub->add_option("--seed", cfg.mc.seed, "Base seed; each replicate gets its own stream")->capture_default_str();
  sub->add_option("--z-threshold", cfg.mc.z_threshold, "Largest |z| counted as a pass")->capture_default_str();
  sub->add_flag("!--no-z", cfg.mc.with_z, "Skip the Z sample and its targets");
  sub->add_option("--check", cfg.check, "Which checks to run")
      ->check(CLI::IsMember({"all", "unbiasedness", "variance"}))
      ->capture_default_str();
  add_common(sub, cfg);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"Unbiased variance estimates for MMD^2 statistics", "mmdvar"};
  app.require_subcommand(1);
  CLI::App* mmd = app.add_subcommand("mmd", "MMD^2(X, Y) with its variance estimate");
  CLI::App* rel = app.add_subcommand("relmmd", "MMD^2(X, Y) - MMD^2(X, Z) with its variance");
  CLI::App* ver = app.add_subcommand("verify", "Monte Carlo check of the estimators");
  add_data(mmd, cfg, false);
  add_data(rel, cfg, true);
  add_verify(ver, cfg);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    // Help requests print the help of the subcommand that was asked.
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "mmdvar: error: " << e.what() << '\n';
    return kInputError;
  }

  try {
    if (mmd->parsed()) return cmd_mmd(cfg, out);
    if (rel->parsed()) return cmd_relmmd(cfg, out);
    return cmd_verify(cfg, out);
  } catch (const InputError& e) {
    err << "mmdvar: error: " << e.what() << '\n';
    return kInputError;
  } catch (const PreconditionError& e) {
    err << "mmdvar: error: " << e.what() << '\n';
    return kPreconditionError;
  } catch (const std::exception& e) {
    err << "mmdvar: internal error: " << e.what() << '\n';
    return kInternalError;
  }
}

}  // namespace mmdvar::cli
