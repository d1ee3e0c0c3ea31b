// Acceptance suite: one line per criterion, nonzero exit if any enforced
// criterion fails. Thresholds are pinned in code, not configurable.

#include "prefband/confidence.hpp"
#include "prefband/experiments.hpp"
#include "prefband/logistic.hpp"
#include "prefband/martingale.hpp"
#include "prefband/mf.hpp"
#include "prefband/records.hpp"
#include "prefband/rng.hpp"
#include "prefband/solver.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace prefband;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

double now_seconds() {
  return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch()).count();
}

void report(int id, const char* name, bool pass, const std::string& detail, double seconds) {
  std::printf("%s criterion %2d: %-28s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, name,
              detail.c_str(), seconds);
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

void info(int id, const char* name, const std::string& detail, double seconds) {
  std::printf("INFO criterion %2d: %-28s %s (%.1fs)\n", id, name, detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(const char* pattern, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), pattern, args...);
  return buf;
}

// Objective over a 201-per-axis tensor grid on [-3,3]^d, evaluated through
// an independent vectorized arithmetic path (array softplus, not the
// library routine). Grid cost caps criterion-1 instances at d <= 3.
double grid_max_objective(const Dataset& data, double reg_weight, int d) {
  constexpr int kAxis = 201;
  Eigen::ArrayXd axis(kAxis);
  for (int i = 0; i < kAxis; ++i) axis[i] = -3.0 + 6.0 * i / (kAxis - 1);

  const int n = static_cast<int>(data.size());
  Eigen::ArrayXd best = Eigen::ArrayXd::Constant(1, -1e300);

  const long outer_count = d == 1 ? 1L : (d == 2 ? kAxis : kAxis * static_cast<long>(kAxis));
  Eigen::ArrayXd obj(kAxis);
  Eigen::ArrayXd z(kAxis);

  for (long outer = 0; outer < outer_count; ++outer) {
    double fixed[2] = {0.0, 0.0};
    double fixed_sq = 0.0;
    long rem = outer;
    for (int k = 0; k + 1 < d; ++k) {
      fixed[k] = axis[rem % kAxis];
      fixed_sq += fixed[k] * fixed[k];
      rem /= kAxis;
    }
    obj.setZero();
    for (int s = 0; s < n; ++s) {
      const Vector& x = data[static_cast<std::size_t>(s)].features();
      double base = 0.0;
      for (int k = 0; k + 1 < d; ++k) base += fixed[k] * x[k];
      z = base + x[d - 1] * axis;
      // r·z − softplus(z), softplus via the stable array form
      const double r = data[static_cast<std::size_t>(s)].outcome();
      obj += r * z - ((1.0 + (-z.abs()).exp()).log() + z.max(0.0));
    }
    obj -= 0.5 * reg_weight * (fixed_sq + axis.square());
    best[0] = std::max(best[0], obj.maxCoeff());
  }
  return best[0];
}

void criterion_1() {
  const double t0 = now_seconds();
  RngStream rng(1001);
  bool pass = true;
  double worst_gap = 0.0;
  double worst_grad = 0.0;
  SolverConfig solver;
  solver.tolerance = 1e-9;

  for (int i = 0; i < 100; ++i) {
    const int d = i < 30 ? 1 : (i < 94 ? 2 : 3);
    const int n = d == 3 ? 8 + static_cast<int>(rng.uniform_int(9))
                         : 5 + static_cast<int>(rng.uniform_int(46));
    Dataset data;
    Vector theta_star = rng.unit_sphere(d);
    for (int s = 0; s < n; ++s) {
      Vector x = rng.uniform() * rng.unit_sphere(d);
      data.emplace_back(x, rng.bernoulli(sigmoid(x.dot(theta_star))) ? 1 : 0);
    }
    const double reg = 0.25 + rng.uniform();
    const FitResult fit = fit_mle(data, reg, solver);
    worst_grad = std::max(worst_grad, fit.final_gradient_norm);
    if (fit.final_gradient_norm > 1e-8) pass = false;

    const double mle_obj = log_likelihood(fit.estimate, data);
    const double grid_obj = grid_max_objective(data, reg, d);
    worst_gap = std::max(worst_gap, grid_obj - mle_obj);
    if (mle_obj < grid_obj - 1e-9) pass = false;
  }
  const double secs = now_seconds() - t0;
  if (secs >= 10.0) pass = false;
  report(1, "MLE optimality", pass,
         fmt("100 instances, max ‖grad‖=%.1e, max grid excess=%.1e, limit 10s", worst_grad,
             worst_gap),
         secs);
}

void criterion_2() {
  const double t0 = now_seconds();
  RngStream rng(1002);
  double worst_grad = 0.0;
  double worst_hess = 0.0;
  for (int i = 0; i < 100; ++i) {
    const int d = 1 + static_cast<int>(rng.uniform_int(4));
    const int n = 5 + static_cast<int>(rng.uniform_int(46));
    Dataset data;
    for (int s = 0; s < n; ++s) {
      Vector x = rng.uniform() * rng.unit_sphere(d);
      data.emplace_back(x, rng.bernoulli(0.5) ? 1 : 0);
    }
    const double reg = 0.2 + rng.uniform();
    const Vector at = rng.gaussian_vector(d);
    const ModelParams p(at, 1.0, reg);

    const Vector analytic_g = score_gradient(p, data);
    Vector fd_g(d);
    const double h1 = 1e-6;
    for (int k = 0; k < d; ++k) {
      Vector hi = at, lo = at;
      hi[k] += h1;
      lo[k] -= h1;
      fd_g[k] = (log_likelihood(ModelParams(hi, 1.0, reg), data) -
                 log_likelihood(ModelParams(lo, 1.0, reg), data)) /
                (2.0 * h1);
    }
    worst_grad = std::max(worst_grad, (analytic_g - fd_g).norm() / std::max(1.0, analytic_g.norm()));

    const Matrix analytic_h = hessian(p, data).matrix();
    Matrix fd_h(d, d);
    const double h2 = 1e-5;
    for (int k = 0; k < d; ++k) {
      Vector hi = at, lo = at;
      hi[k] += h2;
      lo[k] -= h2;
      fd_h.col(k) = -(score_gradient(ModelParams(hi, 1.0, reg), data) -
                      score_gradient(ModelParams(lo, 1.0, reg), data)) /
                    (2.0 * h2);
    }
    worst_hess = std::max(worst_hess, (analytic_h - fd_h).norm() / analytic_h.norm());
  }
  const bool pass = worst_grad < 1e-5 && worst_hess < 1e-5;
  report(2, "derivative correctness", pass,
         fmt("grad rel err=%.1e, hessian rel err=%.1e (tol 1e-5)", worst_grad, worst_hess),
         now_seconds() - t0);
}

void criterion_3() {
  const double t0 = now_seconds();
  bool ratio_ok = true;
  // 10^4-point grid of (z1, z2) pairs on [-20,20]^2
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double z1 = -20.0 + 40.0 * i / 99.0;
      const double z2 = -20.0 + 40.0 * j / 99.0;
      const double lhs = sigmoid_derivative(z2);
      const double rhs = std::exp(std::abs(z2 - z1)) * sigmoid_derivative(z1);
      if (lhs > rhs * (1.0 + 1e-12)) ratio_ok = false;
    }
  }

  RngStream rng(1003);
  bool comparability_ok = true;
  for (int rep = 0; rep < 200; ++rep) {
    Dataset data;
    for (int s = 0; s < 20; ++s) data.emplace_back(rng.unit_sphere(3), rng.bernoulli(0.5) ? 1 : 0);
    const ModelParams b(rng.gaussian_vector(3), 1.0, 0.7);
    const ModelParams a(Vector(b.theta + 0.4 * rng.gaussian_vector(3)), 1.0, 0.7);
    const double displacement = metric_norm(hessian(b, data), a.theta - b.theta);
    const ComparabilityReport rep_out = hessian_comparability(data, a, b, displacement);
    if (!(rep_out.upper && rep_out.lower && rep_out.premise)) comparability_ok = false;
  }
  report(3, "self-concordance checks", ratio_ok && comparability_ok,
         fmt("ratio grid %s, comparability 200/200 %s", ratio_ok ? "ok" : "violated",
             comparability_ok ? "ok" : "violated"),
         now_seconds() - t0);
}

void criterion_4() {
  const double t0 = now_seconds();
  RngStream rng(1004);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    // 1e5 boundary samples resolve the maximum to ~1e-4 relative in d <= 3
    const int d = 2 + static_cast<int>(rng.uniform_int(2));
    Matrix a(d, d);
    for (int i = 0; i < d; ++i) a.col(i) = rng.gaussian_vector(d);
    Matrix m = a * a.transpose();
    m.diagonal().array() += 0.5;
    m = 0.5 * (m + m.transpose());
    const HessianMatrix metric(m, Vector::Zero(d), 0.5);
    const ConfidenceEllipsoid set{rng.gaussian_vector(d), metric, 0.3 + 2.0 * rng.uniform(), 0.1};
    const Vector direction = rng.gaussian_vector(d);

    Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
    const Matrix inv_sqrt = eig.operatorInverseSqrt();
    double brute = -1e300;
    for (int i = 0; i < 100000; ++i) {
      brute = std::max(brute,
                       (set.center + set.radius * (inv_sqrt * rng.unit_sphere(d))).dot(direction));
    }
    const double closed = max_linear(set, direction);
    worst = std::max(worst, std::abs(closed - brute) / std::max(1e-12, std::abs(brute)));
  }
  report(4, "ellipsoid closed form", worst < 1e-3,
         fmt("max rel gap vs 1e5-sample brute force = %.2e (tol 1e-3)", worst), now_seconds() - t0);
}

void criterion_5() {
  const double t0 = now_seconds();
  const CheckReport mgf = mgf_two_point_check(2.0);

  MartingaleConfig config;
  config.dim = 2;
  config.horizon = 50;
  config.replicates = 10000;
  config.weight_mode = WeightMode::Estimate;
  config.seed = 2005;
  const CheckReport sm = verify_supermartingale(config);

  MartingaleConfig zero = config;
  zero.weight_mode = WeightMode::Zero;
  const CheckReport negative = verify_supermartingale(zero);

  const double secs = now_seconds() - t0;
  const bool pass = mgf.pass && sm.pass && !negative.pass && secs < 120.0;
  report(5, "supermartingale verification", pass,
         fmt("mgf slack=%.1e, max stat=%.2f (<=3), zero-weight control stat=%.1f (fails), limit 120s",
             mgf.statistic, sm.statistic, negative.statistic),
         secs);
}

void criterion_6() {
  const double t0 = now_seconds();
  MartingaleConfig config;
  config.dim = 2;
  config.reg_weight = 1.0;
  config.delta = 0.1;
  config.horizon = 200;
  config.n_trajectories = 500;
  config.seed = 2006;
  const CheckReport report_main = verify_theorem_bound(config);

  MartingaleConfig shrunk = config;
  shrunk.radius_scale = 0.05;
  const CheckReport negative = verify_theorem_bound(shrunk);

  const bool pass = report_main.pass && report_main.statistic <= 0.1 && negative.statistic > 0.0;
  report(6, "theorem tail bound", pass,
         fmt("violation rate=%.4f (<=0.1), shrunk-radius control rate=%.2f", report_main.statistic,
             negative.statistic),
         now_seconds() - t0);
}

void criterion_7() {
  const double t0 = now_seconds();
  CoverageConfig config;
  config.world.dim = 3;
  config.world.norm_bound = 1.0;
  config.world.seed = 2007;
  config.horizon = 200;
  config.delta = 0.1;
  config.n_trials = 500;
  config.reg_weight = 1.0;

  config.set_kind = SetKind::Exp;
  const CoverageSummary exp_summary = run_coverage(config, nullptr);

  config.set_kind = SetKind::Corollary1;
  const CoverageSummary cor1_summary = run_coverage(config, nullptr);

  config.set_kind = SetKind::Nl;
  const CoverageSummary nl_summary = run_coverage(config, nullptr);

  const bool pass = exp_summary.anytime_coverage >= exp_summary.threshold &&
                    cor1_summary.anytime_coverage >= cor1_summary.threshold;
  const double secs = now_seconds() - t0;
  report(7, "confidence coverage", pass,
         fmt("exp=%.3f, corollary1=%.3f (floor %.3f)", exp_summary.anytime_coverage,
             cor1_summary.anytime_coverage, exp_summary.threshold),
         secs);
  info(7, "nl coverage (reported)",
       fmt("anytime rate=%.3f, expected near %.2f; measured, not gated",
           nl_summary.anytime_coverage, 1.0 - config.delta),
       0.0);
}

void criterion_8() {
  const double t0 = now_seconds();
  ActiveBenchConfig config;
  config.dim = 8;
  config.pool_size = 100;
  config.horizon = 60;
  config.n_seeds = 20;
  config.seed = 0;
  const ActiveBenchSummary summary = run_active_benchmark(config, nullptr);
  const double secs = now_seconds() - t0;
  const bool pass = summary.efficiency_ratio >= 1.3 && secs < 300.0;
  report(8, "active selection efficiency", pass,
         fmt("efficiency ratio=%.2f (>=1.3), rounds random/uncertainty=%d/%d, limit 300s",
             summary.efficiency_ratio, summary.rounds_random, summary.rounds_uncertainty),
         secs);
}

void criterion_9() {
  const double t0 = now_seconds();
  MfScalingConfig config;
  config.seed = 2009;
  const MfScalingSummary scaling = run_mf_scaling(config, nullptr);

  MfInitStabilityConfig stability;
  stability.seed = 2009;
  const MfInitStabilitySummary init = run_mf_init_stability(stability, nullptr);

  // gauge invariance, exact
  RngStream rng(2010);
  FactorizationModel model;
  model.user_factors = Matrix(3, 10);
  model.item_factors = Matrix(3, 20);
  for (int u = 0; u < 10; ++u) model.user_factors.col(u) = rng.ball(3, 1.5);
  for (int m = 0; m < 20; ++m) model.item_factors.col(m) = rng.ball(3, 1.5);
  FactorizationModel scaled = model;
  scaled.user_factors *= 2.0;  // power of two: exact rescaling
  scaled.item_factors /= 2.0;
  const bool gauge_exact =
      (scaled.probabilities() - model.probabilities()).cwiseAbs().maxCoeff() == 0.0;

  const double secs = now_seconds() - t0;
  const bool pass =
      scaling.monotone && scaling.slope_ok && gauge_exact && init.pass && secs < 600.0;
  report(9, "mf recovery and scaling", pass,
         fmt("medians=%.3f/%.3f/%.3f, slope=%.2f in [-0.75,-0.25]=%s, gauge exact=%s, "
             "svd std=%.4f <= random std=%.4f, limit 600s",
             scaling.median_errors[0], scaling.median_errors[1], scaling.median_errors[2],
             scaling.slope, scaling.slope_ok ? "yes" : "no", gauge_exact ? "yes" : "no",
             init.svd_std, init.random_std),
         secs);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

void criterion_10(const std::string& cli_path) {
  const double t0 = now_seconds();
  const fs::path root = fs::temp_directory_path() / "prefband_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);

  // small representative run of every subcommand
  {
    std::ofstream f(root / "prefs.csv");
    f << "user_id,item_id,outcome\n";
    for (int u = 0; u < 6; ++u)
      for (int m = 0; m < 8; ++m) f << u << ',' << m << ',' << ((u * m) % 3 == 0 ? 1 : 0) << '\n';
  }
  const std::vector<std::pair<std::string, std::string>> runs = {
      {"coverage", "coverage --d 2 --trials 100 --horizon 10 --seed 3"},
      {"verify-sm", "verify supermartingale --d 2 --horizon 8 --replicates 400 --seed 3"},
      {"verify-th", "verify theorem --d 2 --horizon 15 --trials 40 --seed 3"},
      {"adapt", "adapt --d 3 --rounds 6 --pool-size 10 --seed 3"},
      {"bench", "bench-active --d 2 --pool-size 10 --horizon 8 --seeds 3 --seed 3"},
      {"mf-train", "mf-train --data " + (root / "prefs.csv").string() + " --rank 2 --seed 3"},
      {"mf-scaling", "mf-scaling --grid 8x24 --seeds 2 --seed 3"},
      {"mle-fit", "mle-fit --d 2 --horizon 12 --seed 3"},
  };

  bool pass = true;
  std::string first_diff;
  for (const auto& [name, args] : runs) {
    const fs::path out = root / name;
    const std::string cmd = cli_path + " " + args + " --out " + out.string() + " >/dev/null 2>&1";
    std::string snapshot[3];
    const char* files[3] = {"records.csv", "summary.json", "config.resolved.json"};
    for (int pass_idx = 0; pass_idx < 2; ++pass_idx) {
      const int status = std::system(cmd.c_str());
      if (WEXITSTATUS(status) > 1) {  // 0/1 are run verdicts; 2+ is breakage
        pass = false;
        if (first_diff.empty()) first_diff = name + " exited " + std::to_string(WEXITSTATUS(status));
      }
      for (int f = 0; f < 3; ++f) {
        const std::string content = slurp(out / files[f]);
        if (pass_idx == 0) {
          snapshot[f] = content;
          if (content.empty()) {
            pass = false;
            if (first_diff.empty()) first_diff = name + "/" + files[f] + " empty";
          }
        } else if (content != snapshot[f]) {
          pass = false;
          if (first_diff.empty()) first_diff = name + "/" + files[f];
        }
      }
    }
  }
  report(10, "CLI determinism", pass,
         pass ? fmt("%zu subcommands hash-stable under fixed seed", runs.size())
              : "first mismatch: " + first_diff,
         now_seconds() - t0);
}

}  // namespace

int main(int argc, char** argv) {
#ifdef PREFBAND_CLI_PATH
  std::string cli_path = PREFBAND_CLI_PATH;
#else
  std::string cli_path;
#endif
  if (argc > 1) cli_path = argv[1];

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  if (!cli_path.empty()) {
    criterion_10(cli_path);
  } else {
    report(10, "CLI determinism", false, "no CLI path provided", 0.0);
  }

  if (g_failures == 0) {
    std::printf("acceptance: all criteria passed\n");
    return 0;
  }
  std::printf("acceptance: %d criterion(s) failed\n", g_failures);
  return 1;
}
