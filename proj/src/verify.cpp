#include "ccdist/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include "ccdist/bessel.hpp"
#include "ccdist/geodesics.hpp"
#include "ccdist/heatkernel.hpp"
#include "ccdist/oracle.hpp"
#include "ccdist/optimize.hpp"

namespace ccdist::verify {

namespace {

constexpr double kPi = 3.14159265358979323846;

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

GroupPoint random_point(const StepTwoGroup& G, std::mt19937_64& rng, double box) {
  std::uniform_real_distribution<double> U(-box, box);
  GroupPoint g{Eigen::VectorXd(G.q), Eigen::VectorXd(G.m)};
  for (int i = 0; i < G.q; ++i) g.x[i] = U(rng);
  for (int i = 0; i < G.m; ++i) g.t[i] = U(rng);
  return g;
}

// tau uniformly scaled into the level-k reference set.
Eigen::VectorXd random_tau(const StepTwoGroup& G, std::mt19937_64& rng, int k,
                           double max_fill = 0.995) {
  std::normal_distribution<double> N(0.0, 1.0);
  std::uniform_real_distribution<double> U(0.0, max_fill);
  for (;;) {
    Eigen::VectorXd dir(G.m);
    for (int i = 0; i < G.m; ++i) dir[i] = N(rng);
    const double nu = std::sqrt(spectral(G, dir).max_beta());
    if (nu < 1e-12) continue;
    return dir * (U(rng) * omega_radius(k) / nu);
  }
}

const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names = {"heisenberg(1)", "htype(4,3)", "corank1(4)",
                                                 "n32"};
  return names;
}

}  // namespace

void SuiteResult::expect_le(const std::string& check, double measured, double threshold) {
  const bool ok = measured <= threshold;
  rows.push_back({check, measured, threshold, ok});
  pass = pass && ok;
}

void SuiteResult::expect_true(const std::string& check, bool ok) {
  rows.push_back({check, ok ? 1.0 : 0.0, 1.0, ok});
  pass = pass && ok;
}

SuiteResult heisenberg_grid() {
  Timer timer;
  SuiteResult out;
  out.name = "heisenberg-grid";
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;
  cfg.max_k = 2;

  double max_rel = 0.0;
  bool all_k0 = true;
  for (int ix = 0; ix < 20; ++ix)
    for (int it = 0; it < 20; ++it) {
      const double r = 0.1 + (2.0 - 0.1) * ix / 19.0;
      const double t = -1.0 + 2.0 * it / 19.0;
      GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
      g.x << r, 0.0;
      g.t << t;
      const DistanceCertificate cert = distance(H, g, cfg);
      const double ref = heisenberg_closed_form(g.x, t);
      max_rel = std::max(max_rel, std::abs(cert.d2 - ref) / ref);
      all_k0 = all_k0 && (cert.k_used == 0) && cert.attained;
    }
  out.expect_le("max relative error vs closed form (20x20 grid)", max_rel, 1e-8);
  out.expect_true("all points certified at level 0", all_k0);
  out.seconds = timer.seconds();
  out.expect_le("runtime seconds", out.seconds, 30.0);
  return out;
}

SuiteResult cut_axis() {
  Timer timer;
  SuiteResult out;
  out.name = "cut-axis";
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;

  for (double t : {0.5, -0.5, 1.0, -1.0, 2.0, -2.0}) {
    GroupPoint g{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, t)};
    const DistanceCertificate cert = distance(H, g, cfg);
    const std::string tag = "t=" + std::to_string(t);
    out.expect_true(tag + ": level 0 supremum on boundary",
                    !cert.level_status.empty() &&
                        cert.level_status[0] == InnerStatus::Boundary);
    out.expect_true(tag + ": attained at level 1", cert.attained && cert.k_used == 1);
    const double ref = 4.0 * kPi * std::abs(t);
    out.expect_le(tag + ": relative error vs 4*pi*|t|", std::abs(cert.d2 - ref) / ref, 1e-5);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult lower_bounds() {
  Timer timer;
  SuiteResult out;
  out.name = "lower-bounds";
  for (const auto& name : fixture_names()) {
    const StepTwoGroup G = builtin_group(name);
    SolverConfig cfg;
    cfg.restarts = 8;
    std::mt19937_64 rng(20240901);
    double worst_gap = -1e300;
    for (int i = 0; i < 50; ++i) {
      const GroupPoint g = random_point(G, rng, 1.2);
      const double scale = point_scale(g);
      const DirectResult oracle = direct_distance(G, g, 128, 3, 981 + i);
      const auto levels = level_sweep(G, g, 2, cfg);
      for (const auto& lv : levels)
        worst_gap = std::max(worst_gap, (lv.value - oracle.energy) / scale);
    }
    // Lower bounds may not exceed the oracle energy by more than the slack.
    out.expect_le(name + ": max (lower_bound - oracle)/scale over k<=2", worst_gap, 1e-3);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult monotonicity() {
  Timer timer;
  SuiteResult out;
  out.name = "monotonicity";
  for (const auto& name : fixture_names()) {
    const StepTwoGroup G = builtin_group(name);
    SolverConfig cfg;
    cfg.restarts = 8;
    std::mt19937_64 rng(20240902);
    double worst_drop = -1e300;  // value(k) - value(k+1), should be <= tol
    double worst_equal = 0.0;    // |value(k+1)-value(k)| after attainment
    for (int i = 0; i < 50; ++i) {
      const GroupPoint g = random_point(G, rng, 1.2);
      const double scale = point_scale(g);
      const auto levels = level_sweep(G, g, 3, cfg);
      for (size_t k = 0; k + 1 < levels.size(); ++k) {
        worst_drop = std::max(worst_drop, (levels[k].value - levels[k + 1].value) / scale);
        if (levels[k].attained) {
          const double rel = std::abs(levels[k + 1].value - levels[k].value) /
                             (1.0 + std::abs(levels[k].value));
          worst_equal = std::max(worst_equal, rel);
        }
      }
    }
    out.expect_le(name + ": max (value(k)-value(k+1))/scale", worst_drop, 1e-6);
    out.expect_le(name + ": max relative change after attainment", worst_equal, 1e-8);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult n32_oracle() {
  Timer timer;
  SuiteResult out;
  out.name = "n32-oracle";
  const StepTwoGroup G = builtin_group("n32");
  SolverConfig cfg;
  std::mt19937_64 rng(20240903);
  double worst = 0.0;
  bool all_certified = true;
  for (int i = 0; i < 20; ++i) {
    const GroupPoint g = random_point(G, rng, 1.0);
    const DistanceCertificate cert = distance(G, g, cfg);
    all_certified = all_certified && cert.attained;
    const DirectResult direct = direct_distance(G, g, 96, 6, 555 + i);
    double oracle = direct.energy;
    if (g.norm() > 1e-9) {
      if (const auto shoot = shooting_distance(G, g, 16, 777 + i))
        oracle = std::min(oracle, shoot->energy);
    }
    worst = std::max(worst, std::abs(cert.d2 - oracle) / (1.0 + std::max(cert.d2, oracle)));
  }
  out.expect_true("all 20 points certified", all_certified);
  out.expect_le("max relative gap vs best oracle", worst, 1e-3);
  out.seconds = timer.seconds();
  return out;
}

SuiteResult bessel_suite() {
  Timer timer;
  SuiteResult out;
  out.name = "bessel";

  double worst = 0.0;
  for (int l = 1; l <= 64; ++l)
    worst = std::max(worst, std::abs(bessel::zero(0, l) - l * kPi) / (l * kPi));
  out.expect_le("zero(0,l) vs l*pi relative, l<=64", worst, 1e-12);

  // Independent oracle for zero(1,1): bisection on tan z = z.
  {
    double lo = kPi + 1e-9, hi = 1.5 * kPi - 1e-9;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (std::tan(mid) - mid < 0)
        lo = mid;
      else
        hi = mid;
    }
    const double z11 = 0.5 * (lo + hi);
    out.expect_le("zero(1,1) vs tan z = z bisection (abs)", std::abs(bessel::zero(1, 1) - z11),
                  1e-9);
    out.expect_le("zero(1,1) vs frozen 4.493409457909064 (abs)",
                  std::abs(bessel::zero(1, 1) - 4.493409457909064), 1e-9);
  }

  bool interlace = true, bounds = true;
  for (int k = 0; k <= 8; ++k)
    for (int l = 1; l <= 64; ++l) {
      const double z = bessel::zero(k, l);
      if (!(z > ((k - 1) / 2.0 + l) * kPi - 1e-9 && z < ((k + 1) / 2.0 + l) * kPi + 1e-9))
        bounds = false;
      if (!(bessel::zero(k, l) < bessel::zero(k + 1, l) &&
            bessel::zero(k + 1, l) < bessel::zero(k, l + 1)))
        interlace = false;
    }
  out.expect_true("interlacing zero(k,l) < zero(k+1,l) < zero(k,l+1), k<=8, l<=64", interlace);
  out.expect_true("zero bounds ((k-1)/2+l)pi <= zero <= ((k+1)/2+l)pi", bounds);

  std::mt19937_64 rng(77);
  double worst_rec = 0.0;
  for (int i = 0; i < 100; ++i) {
    std::uniform_int_distribution<int> K(0, 8);
    const int k = K(rng);
    const double z1 = bessel::zero(k, 1);
    std::uniform_real_distribution<double> W(-z1 * z1 + 0.1, 50.0);
    const double w = W(rng);
    const double lhs = bessel::qk(k, w);
    const double rhs = (2.0 * k + 3.0) * bessel::qk(k + 1, w) + w * bessel::qk(k + 2, w);
    worst_rec = std::max(worst_rec, std::abs(lhs - rhs) / std::abs(lhs));
  }
  out.expect_le("recursion residual on 100 random arguments", worst_rec, 1e-11);

  {
    const auto s01 = bessel::rk_series(0, 1.0, 10000);
    const double closed = bessel::rk(0, 1.0);
    out.expect_le("series k=0,w=1 vs closed form within tail bound",
                  std::abs(s01.value - closed), s01.tail_bound);
    out.expect_le("corrected series k=0,w=1 vs closed form", std::abs(s01.corrected - closed),
                  1e-8);
    const auto s14 = bessel::rk_series(1, 4.0, 10000);
    out.expect_le("series k=1,w=4 vs closed form within tail bound",
                  std::abs(s14.value - bessel::rk(1, 4.0)), s14.tail_bound);
  }

  // Derivative identity along the real axis: R_k(z) = z Q'_k / Q_k.
  {
    double worst_d = 0.0;
    for (double z : {0.5, 1.0, 2.0, 3.7}) {
      const double h = 1e-6;
      const double qp =
          (bessel::qk(0, (z + h) * (z + h)) - bessel::qk(0, (z - h) * (z - h))) / (2.0 * h);
      const double ref = z * qp / bessel::qk(0, z * z);
      worst_d = std::max(worst_d, std::abs(bessel::rk(0, z * z) - ref) / std::abs(ref));
    }
    out.expect_le("derivative identity z Q'/Q vs rk (relative)", worst_d, 1e-7);
  }

  out.seconds = timer.seconds();
  return out;
}

SuiteResult concavity() {
  Timer timer;
  SuiteResult out;
  out.name = "concavity";
  for (const auto& name : fixture_names()) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(555);
    int violations = 0;
    for (int k = 0; k <= 2; ++k) {
      for (int i = 0; i < 1000; ++i) {
        const GroupPoint g = random_point(G, rng, 2.0);
        SegmentVector s = SegmentVector::zeros(k, G.q);
        std::normal_distribution<double> N(0.0, 1.0);
        for (auto& sj : s.s)
          for (int c = 0; c < G.q; ++c) sj[c] = N(rng);
        const Eigen::VectorXd t1 = random_tau(G, rng, k);
        const Eigen::VectorXd t2 = random_tau(G, rng, k);
        const double f1 = phi_k_star(G, g, s, t1, k, EvalMode::ValueOnly).value;
        const double f2 = phi_k_star(G, g, s, t2, k, EvalMode::ValueOnly).value;
        const double fm = phi_k_star(G, g, s, (t1 + t2) / 2.0, k, EvalMode::ValueOnly).value;
        if (fm < 0.5 * (f1 + f2) - 1e-10) ++violations;
      }
    }
    out.expect_le(name + ": midpoint concavity violations (3000 checks)", violations, 0.0);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult relation_pk() {
  Timer timer;
  SuiteResult out;
  out.name = "relation-pk";
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  const double h = 1.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  struct Sample {
    double x0, x1, t;
  };
  const std::vector<Sample> samples = {{inv_sqrt2, 0.0, 0.1}, {0.3, 0.4, -0.2}, {0.0, 0.0, 0.35}};
  for (const auto& s : samples) {
    Eigen::VectorXd X(2), T(1);
    X << s.x0, s.x1;
    T << s.t;
    const RelationReport rep = verify_relation_pk(H, 0, X, T, h, quad);
    char label[128];
    std::snprintf(label, sizeof(label), "X=(%.3g,%.3g) T=%.3g relative discrepancy", s.x0, s.x1,
                  s.t);
    out.expect_le(label, rep.rel_discrepancy, 0.01);
    out.expect_true(std::string(label) + " converged", rep.converged);
  }
  out.seconds = timer.seconds();
  out.expect_le("runtime seconds", out.seconds, 60.0);
  return out;
}

SuiteResult positivity() {
  Timer timer;
  SuiteResult out;
  out.name = "positivity";
  QuadConfig quad;
  quad.rel_tol = 1e-7;
  for (const std::string name : {"heisenberg(1)", "corank1(4)"}) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> U(-1.2, 1.2);
    std::uniform_real_distribution<double> LH(std::log(0.3), std::log(3.0));
    bool all_positive = true;
    for (int k = 0; k <= 2; ++k)
      for (int i = 0; i < 50; ++i) {
        Eigen::VectorXd X(G.q), T(G.m);
        for (int c = 0; c < G.q; ++c) X[c] = U(rng);
        for (int c = 0; c < G.m; ++c) T[c] = U(rng);
        const double hh = std::exp(LH(rng));
        const HeatKernelEstimate est = p_k_h(G, k, X, T, hh, quad);
        if (!(est.value > 0.0) || !est.converged) all_positive = false;
      }
    out.expect_true(name + ": P_{k,h} > 0 on 150 samples (k<=2)", all_positive);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult varadhan() {
  Timer timer;
  SuiteResult out;
  out.name = "varadhan";
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  QuadConfig quad;
  GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
  g.x << 1.0, 0.0;
  g.t << kPi / 8.0;
  const double d2 = kPi * kPi / 4.0;
  const VaradhanResult vr = varadhan_estimate(H, g, {1e-1, 3e-2, 1e-2, 3e-3}, quad);
  out.expect_true("estimates monotone toward the limit", vr.monotone);
  out.expect_true("all quadratures converged", vr.all_converged);
  out.expect_le("extrapolated relative error", std::abs(vr.extrapolated - d2) / d2, 0.02);

  // Leading-term ratio at h = 1e-3 on points with interior maximizers.
  SolverConfig cfg;
  double worst = 0.0;
  const double h = 1e-3;
  const std::vector<std::pair<double, double>> pts = {
      {1.0, 0.0}, {1.0, 0.2}, {0.7, -0.15}, {1.4, 0.35}, {0.5, 0.05}};
  for (const auto& [xc, tc] : pts) {
    GroupPoint p{Eigen::VectorXd(2), Eigen::VectorXd(1)};
    p.x << xc, 0.0;
    p.t << tc;
    const HeatKernelEstimate hk = heat_kernel(H, p, h, quad);
    const AsymptoticTerm lead = asymptotic_leading_term(H, p, 0, h, cfg);
    const double ratio = std::exp(hk.log_value - lead.log_value);
    worst = std::max(worst, std::abs(ratio - 1.0));
  }
  out.expect_le("max |kernel/leading-term - 1| at h=1e-3 over 5 points", worst, 0.1);
  out.seconds = timer.seconds();
  return out;
}

SuiteResult geodesic_roundtrip() {
  Timer timer;
  SuiteResult out;
  out.name = "geodesic-roundtrip";
  for (const auto& name : fixture_names()) {
    const StepTwoGroup G = builtin_group(name);
    std::mt19937_64 rng(31337);
    std::normal_distribution<double> N(0.0, 1.0);
    double worst = 0.0;
    int tested = 0;
    while (tested < 200) {
      Eigen::VectorXd zeta(G.q);
      for (int c = 0; c < G.q; ++c) zeta[c] = N(rng);
      const Eigen::VectorXd theta = random_tau(G, rng, 0, 0.85);
      if (!theta_nonsingular(G, theta, 1e-6)) continue;
      ++tested;
      const Eigen::VectorXd xc = x_component_closed_form(G, zeta, theta);
      const GroupPoint e = exp_map(G, zeta, 2.0 * theta, 2048);
      worst = std::max(worst, (e.x - xc).norm() / (1.0 + xc.norm()));
    }
    out.expect_le(name + ": exp vs closed-form x over 200 covectors", worst, 1e-8);
  }

  // Records: endpoint residual and energy consistency on solved geodesics.
  {
    const StepTwoGroup H = builtin_group("heisenberg(1)");
    SolverConfig cfg;
    double worst_res = 0.0, worst_energy = 0.0;
    const std::vector<std::pair<double, double>> pts = {{1.0, 0.3927}, {0.8, -0.2}, {1.5, 0.6}};
    for (const auto& [xc, tc] : pts) {
      GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
      g.x << xc, 0.0;
      g.t << tc;
      const DistanceCertificate cert = distance(H, g, cfg);
      const auto records = solve_geodesics(H, g, cert.k_used, cfg);
      if (records.empty()) {
        out.expect_true("records found at certified level", false);
        continue;
      }
      for (const auto& r : records)
        worst_res = std::max(worst_res, r.endpoint_residual / (1.0 + g.norm()));
      worst_energy =
          std::max(worst_energy, std::abs(records.front().energy - cert.d2) / (1.0 + cert.d2));
    }
    out.expect_le("endpoint residual / (1+|g|)", worst_res, 1e-8);
    out.expect_le("minimal record energy vs certified distance (relative)", worst_energy, 1e-6);
  }
  out.seconds = timer.seconds();
  return out;
}

SuiteResult cut_verdicts() {
  Timer timer;
  SuiteResult out;
  out.name = "cut-verdicts";
  const StepTwoGroup H = builtin_group("heisenberg(1)");
  SolverConfig cfg;

  int wrong = 0;
  for (int i = 0; i < 10; ++i) {
    const double r = 0.4 + 0.15 * i;
    const double t = -0.6 + 0.13 * i;
    GroupPoint g{Eigen::VectorXd(2), Eigen::VectorXd(1)};
    g.x << r, 0.2 * r;
    g.t << t;
    const CutLocusVerdict v = cut_locus_test(H, g, cfg);
    if (v.verdict != CutVerdict::NotCut) ++wrong;
  }
  out.expect_le("misclassified off-axis points (of 10, expect not-cut)", wrong, 0.0);

  wrong = 0;
  for (double t : {0.4, -0.7, 1.0, 1.6, -2.2}) {
    GroupPoint g{Eigen::VectorXd::Zero(2), Eigen::VectorXd::Constant(1, t)};
    const CutLocusVerdict v = cut_locus_test(H, g, cfg);
    if (v.verdict != CutVerdict::Cut) ++wrong;
  }
  out.expect_le("misclassified axis points (of 5, expect cut)", wrong, 0.0);
  out.seconds = timer.seconds();
  return out;
}

SuiteResult gm_classifier() {
  Timer timer;
  SuiteResult out;
  out.name = "gm-classifier";
  SolverConfig cfg;
  {
    const GmClassification c = classify_gm(builtin_group("heisenberg(1)"), 500, 99, cfg);
    out.expect_le("heisenberg(1): 1 - in-M fraction (500 samples)", 1.0 - c.fraction, 0.01);
  }
  {
    const GmClassification c = classify_gm(builtin_group("htype(4,3)"), 500, 99, cfg);
    out.expect_le("htype(4,3): 1 - in-M fraction (500 samples)", 1.0 - c.fraction, 0.01);
  }
  {
    const GmClassification c = classify_gm(builtin_group("n32"), 500, 99, cfg);
    out.expect_true("n32: evidence of level-0 undershoot found", !c.evidence.empty());
  }
  out.seconds = timer.seconds();
  return out;
}

std::vector<std::string> suite_names() {
  return {"bessel",   "concavity", "bounds",   "relpk",
          "varadhan", "geodesic",  "cutlocus", "oracle-xcheck"};
}

std::vector<SuiteResult> run_suite(const std::string& name) {
  if (name == "bessel") return {bessel_suite()};
  if (name == "concavity") return {concavity()};
  if (name == "bounds") return {lower_bounds(), monotonicity()};
  if (name == "relpk") return {relation_pk(), positivity()};
  if (name == "varadhan") return {varadhan()};
  if (name == "geodesic") return {geodesic_roundtrip()};
  if (name == "cutlocus") return {cut_axis(), cut_verdicts(), gm_classifier()};
  if (name == "oracle-xcheck") return {heisenberg_grid(), n32_oracle()};
  throw Error("unknown verify suite: " + name);
}

std::vector<SuiteResult> run_all() {
  return {heisenberg_grid(), cut_axis(),     lower_bounds(),       monotonicity(),
          n32_oracle(),      bessel_suite(), concavity(),          relation_pk(),
          positivity(),      varadhan(),     geodesic_roundtrip(), cut_verdicts(),
          gm_classifier()};
}

}  // namespace ccdist::verify
