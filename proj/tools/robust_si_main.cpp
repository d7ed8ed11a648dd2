// Command-line front end: analyze a CSV dataset or run the Monte Carlo
// harnesses. Exit codes: 0 success, 2 no outliers detected, 3 input error,
// 4 numerical failure.

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "robustsi/analyze.h"
#include "robustsi/csv_io.h"
#include "robustsi/errors.h"
#include "robustsi/experiments.h"
#include "robustsi/report.h"

namespace {

using namespace robustsi;

struct CommonOpts {
  std::string estimator = "lad";
  double delta = 1.0;
  std::string rule = "threshold";
  double xi = 1.0;
  int k = 1;
  double alpha = 0.05;
  double window_mult = 20.0;
  double sigma2 = 1.0;
  std::string sigma_file;
  std::uint64_t seed = 1;
  std::string format = "json";
};

void add_common(CLI::App* cmd, CommonOpts* o) {
  cmd->add_option("--estimator", o->estimator, "Robust estimator")
      ->check(CLI::IsMember({"lad", "huber"}));
  cmd->add_option("--delta", o->delta, "Huber transition width");
  cmd->add_option("--rule", o->rule, "Outlier detection rule")
      ->check(CLI::IsMember({"threshold", "topk"}));
  cmd->add_option("--xi", o->xi, "Threshold on |residual|");
  cmd->add_option("--k", o->k, "Top-K count");
  cmd->add_option("--alpha", o->alpha, "Significance level");
  cmd->add_option("--window-mult", o->window_mult,
                  "Working window half-width in sigma units");
  cmd->add_option("--sigma2", o->sigma2, "Noise variance (Sigma = sigma2*I)");
  cmd->add_option("--sigma-file", o->sigma_file,
                  "Headerless CSV with a full covariance matrix");
  cmd->add_option("--seed", o->seed, "RNG seed");
  cmd->add_option("--format", o->format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
}

EstimatorSpec make_estimator(const CommonOpts& o) {
  return o.estimator == "lad" ? EstimatorSpec::lad()
                              : EstimatorSpec::huber(o.delta);
}

DetectionRule make_rule(const CommonOpts& o) {
  return o.rule == "threshold" ? DetectionRule::threshold(o.xi)
                               : DetectionRule::top_k(o.k);
}

ReportFormat make_format(const CommonOpts& o) {
  return o.format == "json" ? ReportFormat::Json : ReportFormat::Csv;
}

std::string rates_output(const std::vector<std::pair<std::string, double>>& kv,
                         const std::string& format) {
  std::string out;
  char buf[64];
  if (format == "json") {
    out = "{";
    for (std::size_t i = 0; i < kv.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", kv[i].second);
      out += (i ? ", " : "") + ("\"" + kv[i].first + "\": ") + buf;
    }
    out += "}";
  } else {
    for (std::size_t i = 0; i < kv.size(); ++i) out += (i ? "," : "") + kv[i].first;
    out += "\n";
    for (std::size_t i = 0; i < kv.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.17g", kv[i].second);
      out += (i ? "," : "") + std::string(buf);
    }
  }
  return out + "\n";
}

SimConfig make_sim_config(const CommonOpts& o, int n, int p, int trials) {
  SimConfig cfg;
  cfg.n = n;
  cfg.p = p;
  cfg.beta_star = SimConfig::default_beta_star(p);
  cfg.shift = Eigen::VectorXd::Zero(n);
  cfg.sigma2 = o.sigma2;
  cfg.estimator = make_estimator(o);
  cfg.rule = make_rule(o);
  cfg.alpha = o.alpha;
  cfg.trials = trials;
  cfg.seed = o.seed;
  cfg.window_mult = o.window_mult;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Selective inference for outliers detected by robust regression"};
  app.require_subcommand(1);

  CommonOpts analyze_opts, fpr_opts, tpr_opts, hl_opts;

  auto* analyze = app.add_subcommand(
      "analyze", "Selective p-values and CIs for a CSV dataset");
  std::string input, response;
  std::vector<std::string> features;
  bool intercept = false;
  analyze->add_option("--input", input, "CSV file")->required();
  analyze->add_option("--response", response, "Response column name")
      ->required();
  analyze->add_option("--features", features, "Feature column names")
      ->required()
      ->delimiter(',');
  analyze->add_flag("--intercept", intercept, "Prepend a column of ones");
  add_common(analyze, &analyze_opts);

  auto* fpr = app.add_subcommand(
      "simulate-fpr", "Null false-positive rates of naive/Bonferroni/selective");
  int n = 20, p = 5, trials = 1000;
  fpr->add_option("--n", n, "Instances per trial");
  fpr->add_option("--p", p, "Features per trial (plus intercept)");
  fpr->add_option("--trials", trials, "Accepted trials");
  add_common(fpr, &fpr_opts);

  auto* tpr = app.add_subcommand(
      "simulate-tpr", "Power for a single shifted instance");
  int tn = 20, tp = 5, ttrials = 1000;
  double shift = 5.0;
  tpr->add_option("--n", tn, "Instances per trial");
  tpr->add_option("--p", tp, "Features per trial (plus intercept)");
  tpr->add_option("--trials", ttrials, "Accepted trials");
  tpr->add_option("--shift", shift, "Location shift of instance 1");
  add_common(tpr, &tpr_opts);

  auto* hl = app.add_subcommand(
      "compare-hl",
      "Power of selective inference vs the sign-conditioned Huberized-Lasso "
      "baseline (delta = xi = lambda)");
  int hn = 50, hp = 5, htrials = 300, houtliers = 10;
  double hlambda = 3.0, hshift = 2.0;
  hl->add_option("--n", hn, "Instances per trial");
  hl->add_option("--p", hp, "Features per trial (plus intercept)");
  hl->add_option("--trials", htrials, "Matched trials");
  hl->add_option("--lambda", hlambda, "Lasso penalty (= delta = xi)");
  hl->add_option("--n-outliers", houtliers, "Leading shifted instances");
  hl->add_option("--shift", hshift, "Shift magnitude of each outlier");
  add_common(hl, &hl_opts);

  try {
    app.parse(argc, argv);

    if (*analyze) {
      const CommonOpts& o = analyze_opts;
      std::optional<Eigen::MatrixXd> Sigma;
      if (!o.sigma_file.empty()) Sigma = read_matrix_csv(o.sigma_file);
      const Dataset data =
          ingest_csv(input, response, features, intercept, o.sigma2, Sigma);
      AnalysisConfig cfg;
      cfg.estimator = make_estimator(o);
      cfg.rule = make_rule(o);
      cfg.alpha = o.alpha;
      cfg.window_mult = o.window_mult;
      std::vector<std::string> warnings;
      const auto reports = cmd_analyze(cfg, data, &warnings);
      for (const auto& w : warnings) std::cerr << w << "\n";
      std::cout << emit_report(reports, make_format(o)) << "\n";
    } else if (*fpr) {
      SimConfig cfg = make_sim_config(fpr_opts, n, p, trials);
      const FprResult r = run_fpr(cfg);
      std::cout << rates_output({{"fpr_naive", r.fpr_naive},
                                 {"fpr_bonferroni", r.fpr_bonf},
                                 {"fpr_selective", r.fpr_plh},
                                 {"attempts", double(r.attempts)}},
                                fpr_opts.format);
    } else if (*tpr) {
      SimConfig cfg = make_sim_config(tpr_opts, tn, tp, ttrials);
      cfg.shift(0) = shift;
      const TprResult r = run_tpr(cfg);
      std::cout << rates_output({{"tpr_bonferroni", r.tpr_bonf},
                                 {"tpr_selective", r.tpr_plh},
                                 {"attempts", double(r.attempts)}},
                                tpr_opts.format);
    } else if (*hl) {
      CommonOpts o = hl_opts;
      o.estimator = "huber";
      o.rule = "threshold";
      o.delta = hlambda;
      o.xi = hlambda;
      SimConfig cfg = make_sim_config(o, hn, hp, htrials);
      for (int i = 0; i < std::min(houtliers, hn); ++i) cfg.shift(i) = hshift;
      const HlCompareResult r = run_hl_compare(cfg, hlambda);
      std::cout << rates_output(
          {{"tpr_selective", r.tpr_plh},
           {"tpr_huberized_lasso", r.tpr_hl},
           {"matched_trials", double(r.matched_trials)},
           {"detection_mismatches", double(r.detection_mismatches)},
           {"containment_all", r.containment_all ? 1.0 : 0.0}},
          o.format);
    }
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  } catch (const ParseError& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 3;
  } catch (const MissingColumn& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 3;
  } catch (const NoOutliersDetected& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << e.name() << ": " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "NumericalFailure: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
