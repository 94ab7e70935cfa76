// ccdist -- command-line front end.
//
// Subcommands: distance, geodesics, cutlocus, classify, heat, varadhan,
// bessel, oracle, verify, sweep. Outputs are deterministic for a fixed
// group/config/seed (wall-time fields excluded).

#include <chrono>
#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "ccdist/bessel.hpp"
#include "ccdist/geodesics.hpp"
#include "ccdist/heatkernel.hpp"
#include "ccdist/io.hpp"
#include "ccdist/oracle.hpp"
#include "ccdist/optimize.hpp"
#include "ccdist/verify.hpp"

namespace {

using nlohmann::json;
using namespace ccdist;

constexpr const char* kVersion = "ccdist 1.0.0";

struct Timer {
  std::chrono::steady_clock::time_point begin = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin).count();
  }
};

json manifest_json(const std::string& command, const StepTwoGroup& G, std::uint64_t seed,
                   const std::string& config_echo, double wall) {
  json j;
  j["command"] = command;
  j["group_digest"] = group_digest(G);
  j["config"] = config_echo;
  j["seed"] = seed;
  j["version"] = kVersion;
  j["wall_time_s"] = wall;
  return j;
}

json vector_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

std::string config_echo(const SolverConfig& cfg) {
  std::ostringstream os;
  os << "max_k=" << cfg.max_k << " restarts=" << cfg.restarts << " tol_grad=" << cfg.tol_grad
     << " tol_boundary=" << cfg.tol_boundary;
  return os.str();
}

json certificate_json(const DistanceCertificate& cert) {
  json j;
  j["schema"] = 1;
  j["d2"] = cert.d2;
  j["k_used"] = cert.k_used;
  j["attained"] = cert.attained;
  j["stabilized"] = cert.stabilized;
  j["lower"] = cert.lower;
  j["upper"] = std::isfinite(cert.upper) ? json(cert.upper) : json();
  j["theta_star"] = vector_json(cert.theta_star);
  json s = json::array();
  for (const auto& sj : cert.s_star.s) s.push_back(vector_json(sj));
  j["s_star"] = s;
  if (cert.covector) {
    j["covector"] = {{"zeta", vector_json(cert.covector->zeta)},
                     {"tau", vector_json(cert.covector->tau)}};
  }
  json lv = json::array();
  for (size_t i = 0; i < cert.level_values.size(); ++i)
    lv.push_back({{"k", i},
                  {"value", cert.level_values[i]},
                  {"inner_status", to_string(cert.level_status[i])}});
  j["levels"] = lv;
  j["iterations"] = cert.iterations;
  j["restart_spread"] = cert.restart_spread;
  return j;
}

// Axis specification "name=lo:hi:count", names x1..xq and t1..tm.
struct AxisSpec {
  bool is_x = false;
  int index = 0;
  double lo = 0, hi = 0;
  int count = 1;
};

AxisSpec parse_axis(const std::string& text, const StepTwoGroup& G) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ParseError("axis must be name=lo:hi:count");
  const std::string name = text.substr(0, eq);
  AxisSpec ax;
  if (name.size() < 2 || (name[0] != 'x' && name[0] != 't'))
    throw ParseError("axis name must be x<i> or t<j>");
  ax.is_x = name[0] == 'x';
  ax.index = std::stoi(name.substr(1)) - 1;
  if (ax.index < 0 || (ax.is_x && ax.index >= G.q) || (!ax.is_x && ax.index >= G.m))
    throw ParseError("axis index out of range: " + name);
  std::string rest = text.substr(eq + 1);
  double lo, hi;
  int count;
  if (std::sscanf(rest.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 || count < 1)
    throw ParseError("axis range must be lo:hi:count");
  ax.lo = lo;
  ax.hi = hi;
  ax.count = count;
  return ax;
}

std::vector<double> parse_h_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  if (out.empty()) throw ParseError("empty h list");
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"Carnot-Caratheodory distance, geodesics, cut loci and heat kernels on "
               "step-two Carnot groups"};
  app.require_subcommand(1);

  std::string group_arg, point_arg;
  SolverConfig cfg;
  bool as_json = false;

  auto add_common = [&](CLI::App* sub, bool need_point = true) {
    sub->add_option("--group", group_arg, "builtin fixture name or JSON spec path")->required();
    if (need_point) sub->add_option("--point", point_arg, "point 'x1,..,xq;t1,..,tm'")->required();
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--restarts", cfg.restarts, "multi-start count");
    sub->add_option("--max-k", cfg.max_k, "level cap");
  };

  // distance
  auto* cmd_distance = app.add_subcommand("distance", "squared distance certificate");
  add_common(cmd_distance);
  cmd_distance->add_flag("--json", as_json, "JSON output (default)");
  cmd_distance->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    const DistanceCertificate cert = distance(G, g, cfg);
    json out = certificate_json(cert);
    out["manifest"] = manifest_json("distance", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
    if (!cert.attained) std::exit(3);
  });

  // geodesics
  int geo_k = -1;
  auto* cmd_geo = app.add_subcommand("geodesics", "normal geodesics from the identity (CSV)");
  add_common(cmd_geo);
  cmd_geo->add_option("--k", geo_k, "search level (default: certified level)");
  cmd_geo->callback([&] {
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    int k = geo_k;
    if (k < 0) k = distance(G, g, cfg).k_used;
    const auto records = solve_geodesics(G, g, k, cfg);
    std::cout << "index,energy,endpoint_residual,level";
    for (int i = 0; i < G.q; ++i) std::cout << ",zeta" << i + 1;
    for (int i = 0; i < G.m; ++i) std::cout << ",tauhat" << i + 1;
    std::cout << "\n";
    for (size_t r = 0; r < records.size(); ++r) {
      std::cout << r << "," << format_double(records[r].energy) << ","
                << format_double(records[r].endpoint_residual) << "," << records[r].source_level;
      for (int i = 0; i < G.q; ++i)
        std::cout << "," << format_double(records[r].covector.zeta[i]);
      for (int i = 0; i < G.m; ++i)
        std::cout << "," << format_double(records[r].covector.tau[i]);
      std::cout << "\n";
    }
  });

  // cutlocus
  auto* cmd_cut = app.add_subcommand("cutlocus", "cut-locus membership verdict (JSON)");
  add_common(cmd_cut);
  cmd_cut->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    const CutLocusVerdict v = cut_locus_test(G, g, cfg);
    json out;
    out["schema"] = 1;
    out["verdict"] = to_string(v.verdict);
    out["classical_cut"] = v.classical_cut;
    out["critical_count"] = v.critical_count;
    out["minimizing_count"] = v.minimizing_count;
    out["min_abs_det_scaled"] = v.min_abs_det_scaled;
    out["note"] = v.note;
    out["d2"] = v.certificate.d2;
    out["k_used"] = v.certificate.k_used;
    out["manifest"] = manifest_json("cutlocus", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
  });

  // classify
  int samples = 200;
  auto* cmd_classify = app.add_subcommand("classify", "sampled level-0 coverage classifier");
  add_common(cmd_classify, /*need_point=*/false);
  cmd_classify->add_option("--samples", samples, "number of sampled points");
  cmd_classify->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GmClassification c = classify_gm(G, samples, cfg.seed, cfg);
    json out;
    out["schema"] = 1;
    out["samples"] = c.samples;
    out["in_m_count"] = c.in_m_count;
    out["fraction"] = c.fraction;
    json ev = json::array();
    for (const auto& p : c.evidence)
      ev.push_back({{"x", vector_json(p.x)}, {"t", vector_json(p.t)}});
    out["evidence"] = ev;
    out["likely_gm"] = c.evidence.empty() && c.fraction >= 0.99;
    out["manifest"] = manifest_json("classify", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
  });

  // heat
  double h_value = 1.0;
  int heat_k = 0;
  QuadConfig quad;
  auto* cmd_heat = app.add_subcommand("heat", "heat kernel or lifted kernel value (JSON)");
  add_common(cmd_heat);
  cmd_heat->add_option("--h", h_value, "time parameter")->required();
  cmd_heat->add_option("--k", heat_k, "level (0 = heat kernel, >0 = lifted kernel)");
  cmd_heat->add_option("--rel-tol", quad.rel_tol, "quadrature relative tolerance");
  cmd_heat->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    const HeatKernelEstimate est = (heat_k == 0)
                                       ? heat_kernel(G, g, h_value, quad)
                                       : p_k_h(G, heat_k, g.x, g.t, h_value, quad);
    json out;
    out["schema"] = 1;
    out["value"] = est.value;
    out["log_value"] = est.log_value;
    out["h"] = est.h;
    out["k"] = heat_k;
    out["quad_error"] = est.quad_error;
    out["imag_residual"] = est.imag_residual;
    out["truncation_radius"] = est.truncation_radius;
    out["converged"] = est.converged;
    out["manifest"] = manifest_json("heat", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
    if (!est.converged) std::exit(2);
  });

  // varadhan
  std::string h_list_arg = "1e-1,3e-2,1e-2,3e-3";
  auto* cmd_var = app.add_subcommand("varadhan", "small-time distance estimates (CSV + JSON)");
  add_common(cmd_var);
  cmd_var->add_option("--h-list", h_list_arg, "comma-separated decreasing h values");
  cmd_var->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    const VaradhanResult vr = varadhan_estimate(G, g, parse_h_list(h_list_arg), quad);
    std::cout << "h,estimate\n";
    for (size_t i = 0; i < vr.h_values.size(); ++i)
      std::cout << format_double(vr.h_values[i]) << "," << format_double(vr.estimates[i])
                << "\n";
    json out;
    out["schema"] = 1;
    out["extrapolated"] = vr.extrapolated;
    out["monotone"] = vr.monotone;
    out["all_converged"] = vr.all_converged;
    out["manifest"] = manifest_json("varadhan", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
    if (!vr.all_converged) std::exit(2);
  });

  // bessel zeros
  auto* cmd_bessel = app.add_subcommand("bessel", "Bessel utilities");
  auto* cmd_zeros = cmd_bessel->add_subcommand("zeros", "zeros of the half-integer Bessel");
  int bk = 0, bcount = 10;
  cmd_zeros->add_option("--k", bk, "order index k (J_{k+1/2})")->required();
  cmd_zeros->add_option("--count", bcount, "number of zeros")->required();
  cmd_zeros->callback([&] {
    std::cout << "k,l,zero\n";
    for (int l = 1; l <= bcount; ++l)
      std::cout << bk << "," << l << "," << format_double(bessel::zero(bk, l)) << "\n";
  });

  // oracle
  std::string method = "direct";
  int segments = 64;
  auto* cmd_oracle = app.add_subcommand("oracle", "brute-force distance estimators (JSON)");
  add_common(cmd_oracle);
  cmd_oracle->add_option("--method", method, "direct|shoot");
  cmd_oracle->add_option("--segments", segments, "control segments for the direct method");
  cmd_oracle->callback([&] {
    Timer timer;
    const StepTwoGroup G = load_group(group_arg);
    const GroupPoint g = parse_point(point_arg, G);
    json out;
    out["schema"] = 1;
    if (method == "direct") {
      const DirectResult res = direct_distance(G, g, segments, cfg.restarts, cfg.seed);
      out["method"] = "direct";
      out["energy"] = res.energy;
      out["feasibility"] = res.feasibility;
      out["converged"] = res.converged;
      out["segments"] = segments;
    } else if (method == "shoot") {
      const auto res = shooting_distance(G, g, cfg.restarts, cfg.seed);
      out["method"] = "shoot";
      if (res) {
        out["energy"] = res->energy;
        out["residual"] = res->residual;
        out["solutions_found"] = res->solutions_found;
        out["zeta"] = vector_json(res->covector.zeta);
        out["tauhat"] = vector_json(res->covector.tau);
      } else {
        out["energy"] = nullptr;
      }
    } else {
      throw ParseError("unknown oracle method: " + method);
    }
    out["manifest"] = manifest_json("oracle", G, cfg.seed, config_echo(cfg), timer.seconds());
    std::cout << out.dump(2) << "\n";
  });

  // verify
  std::string suite;
  auto* cmd_verify = app.add_subcommand("verify", "named verification suites");
  cmd_verify->add_option("suite", suite, "suite name (or 'all')");
  cmd_verify->callback([&] {
    std::vector<verify::SuiteResult> results;
    try {
      if (suite.empty() || suite == "all")
        results = verify::run_all();
      else
        results = verify::run_suite(suite);
    } catch (const Error&) {
      std::cerr << "unknown suite '" << suite << "'; available:";
      for (const auto& s : verify::suite_names()) std::cerr << " " << s;
      std::cerr << "\n";
      std::exit(1);
    }
    bool all_pass = true;
    for (const auto& res : results) {
      std::printf("suite %-20s %s  (%.1fs)\n", res.name.c_str(),
                  res.pass ? "PASS" : "FAIL", res.seconds);
      for (const auto& row : res.rows)
        std::printf("  [%s] %-64s measured=%.6g threshold=%.6g\n", row.pass ? "ok" : "FAIL",
                    row.check.c_str(), row.measured, row.threshold);
      all_pass = all_pass && res.pass;
    }
    if (!all_pass) std::exit(2);
  });

  // sweep
  std::string grid_arg;
  std::string sweep_h_list;
  auto* cmd_sweep = app.add_subcommand("sweep", "stream distance rows over a coordinate grid");
  cmd_sweep->add_option("--group", group_arg, "builtin fixture name or JSON spec path")
      ->required();
  cmd_sweep->add_option("--grid", grid_arg,
                        "semicolon-separated axes 'x1=lo:hi:n;t1=lo:hi:n' (others zero)");
  cmd_sweep->add_option("--point", point_arg, "fixed point for --h-list sweeps");
  cmd_sweep->add_option("--h-list", sweep_h_list, "sweep h instead of points");
  cmd_sweep->add_option("--seed", cfg.seed, "RNG seed");
  cmd_sweep->add_option("--max-k", cfg.max_k, "level cap");
  cmd_sweep->callback([&] {
    const StepTwoGroup G = load_group(group_arg);
    if (!sweep_h_list.empty()) {
      const GroupPoint g = parse_point(point_arg, G);
      std::cout << "h,estimate,error\n";
      for (double h : parse_h_list(sweep_h_list)) {
        try {
          const HeatKernelEstimate est = heat_kernel(G, g, h, quad);
          std::cout << format_double(h) << "," << format_double(-4.0 * h * est.log_value)
                    << ",\n";
        } catch (const Error& e) {
          std::cout << format_double(h) << ",," << e.what() << "\n";
        }
      }
      return;
    }
    std::vector<AxisSpec> axes;
    std::stringstream ss(grid_arg);
    std::string part;
    while (std::getline(ss, part, ';'))
      if (!part.empty()) axes.push_back(parse_axis(part, G));
    std::cout << "point,d2,k_used,lower,upper,error\n";
    if (axes.empty()) return;
    std::vector<int> idx(axes.size(), 0);
    for (;;) {
      GroupPoint g{Eigen::VectorXd::Zero(G.q), Eigen::VectorXd::Zero(G.m)};
      std::ostringstream label;
      for (size_t a = 0; a < axes.size(); ++a) {
        const auto& ax = axes[a];
        const double v =
            ax.count == 1 ? ax.lo : ax.lo + (ax.hi - ax.lo) * idx[a] / (ax.count - 1);
        if (ax.is_x)
          g.x[ax.index] = v;
        else
          g.t[ax.index] = v;
        if (a) label << "|";
        label << (ax.is_x ? "x" : "t") << ax.index + 1 << "=" << format_double(v);
      }
      try {
        const DistanceCertificate cert = distance(G, g, cfg);
        std::cout << label.str() << "," << format_double(cert.d2) << "," << cert.k_used << ","
                  << format_double(cert.lower) << ","
                  << (std::isfinite(cert.upper) ? format_double(cert.upper) : "") << ",\n";
      } catch (const Error& e) {
        std::cout << label.str() << ",,,,," << e.what() << "\n";
      }
      int a = static_cast<int>(axes.size()) - 1;
      for (; a >= 0; --a) {
        if (++idx[a] < axes[a].count) break;
        idx[a] = 0;
      }
      if (a < 0) break;
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const UnknownFixture& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
