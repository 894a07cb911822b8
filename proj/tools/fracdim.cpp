// fracdim command-line frontend.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fracdim/fracdim.hpp"
#include "json.hpp"

using json = nlohmann::ordered_json;
using namespace fracdim;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;

// A usage problem detected after CLI parsing (e.g. a flag required only for
// some families).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SourceOptions {
  std::string in;
  std::string family;
  std::optional<double> p;
  std::optional<double> lambda;
  int d = 0;
  double c1 = 1.0;
  int n_max = 1000000;
  double delta = 1e-3;
  bool no_core_ball = false;
  int level = 6;
  double scale = 1.0;
  double t_max = 0.0;
  double u_max = 0.0;
  double v_max = 1.0 + 2.0 * std::numbers::pi;
};

void add_source_options(CLI::App* cmd, SourceOptions& o, bool allow_csv) {
  if (allow_csv) cmd->add_option("--in", o.in, "Read the sample from a CSV file instead of generating it");
  cmd->add_option("--family", o.family, "concentric | spiral | shell | snowflake | snowflake-collection")
      ->check(CLI::IsMember({"concentric", "spiral", "shell", "snowflake", "snowflake-collection"}));
  cmd->add_option("--p", o.p, "Polynomial rate exponent p > 0");
  cmd->add_option("--lambda", o.lambda, "Exponential rate e^{-lambda n} (collections only)");
  cmd->add_option("--d", o.d, "Ambient dimension (default 2; 3 for shells)");
  cmd->add_option("--c1", o.c1, "Size constant c1 in (0,1]");
  cmd->add_option("--n-max", o.n_max, "Truncation index");
  cmd->add_option("--delta", o.delta, "Sampling density");
  cmd->add_flag("--no-core-ball", o.no_core_ball, "Do not fill the unresolved tail with a solid ball");
  cmd->add_option("--level", o.level, "Snowflake construction level");
  cmd->add_option("--scale", o.scale, "Snowflake side length");
  cmd->add_option("--t-max", o.t_max, "Spiral truncation (default delta^{-1/p})");
  cmd->add_option("--u-max", o.u_max, "Shell truncation in u (default delta^{-1/p})");
  cmd->add_option("--v-max", o.v_max, "Shell truncation in v");
}

/// Sample plus whatever closed forms are known for its family.
struct Source {
  SampleSet sample;
  std::string family;
  std::optional<double> box_reference;
  std::function<double(double)> spectrum_reference;
  json params = json::object();
};

double require_p(const SourceOptions& o) {
  if (!o.p) throw UsageError("--p is required for family '" + o.family + "'");
  return *o.p;
}

Source load_source(const SourceOptions& o) {
  if (!o.in.empty()) {
    if (!o.family.empty()) throw UsageError("--in and --family are mutually exclusive");
    auto s = read_csv_file(o.in);
    Source src{s, s.family(), std::nullopt, nullptr, json::object()};
    src.params["in"] = o.in;
    return src;
  }
  if (o.family.empty()) throw UsageError("either --family or --in is required");
  json params = {{"family", o.family}, {"delta", o.delta}};

  if (o.family == "concentric" || o.family == "snowflake-collection") {
    if (o.p && o.lambda) throw UsageError("--p and --lambda are mutually exclusive");
    if (!o.p && !o.lambda) throw UsageError("--p (or --lambda) is required for family '" + o.family + "'");
    CollectionSpec spec;
    spec.family = o.family == "concentric" ? Family::ConcentricSpheres : Family::SnowflakeCollection;
    spec.rate = o.p ? Rate::polynomial(*o.p) : Rate::exponential(*o.lambda);
    spec.ambient_dim = o.d ? o.d : 2;
    spec.c1 = o.c1;
    spec.n_max = o.n_max;
    spec.delta = o.delta;
    spec.include_core_ball = !o.no_core_ball;
    params["d"] = spec.ambient_dim;
    params[o.p ? "p" : "lambda"] = spec.rate.value;
    params["c1"] = spec.c1;
    params["n_max"] = spec.n_max;
    params["include_core_ball"] = spec.include_core_ball;
    params["retained_spheres"] = retained_sphere_count(spec);
    Source src{generate_collection(spec), o.family, std::nullopt, nullptr, params};
    if (spec.family == Family::ConcentricSpheres) {
      const int d = spec.ambient_dim;
      if (o.p) {
        const double p = *o.p;
        src.box_reference = formula_box_dim(p, d);
        src.spectrum_reference = [p, d](double t) { return formula_assouad_spectrum(p, d, t); };
      } else {
        src.box_reference = d - 1.0;
        src.spectrum_reference = [d](double) { return formula_exponential_spectrum(d - 1.0); };
      }
    }
    return src;
  }
  if (o.lambda) throw UsageError("--lambda applies to collections only");
  if (o.family == "spiral") {
    if (o.d && o.d != 2) throw UsageError("spirals live in R^2");
    const double p = require_p(o);
    params["p"] = p;
    params["t_max"] = o.t_max > 0 ? o.t_max : std::pow(o.delta, -1.0 / p);
    return Source{generate_spiral(p, o.t_max, o.delta), "spiral", std::nullopt, nullptr, params};
  }
  if (o.family == "shell") {
    if (o.d && o.d != 3) throw UsageError("shells live in R^3");
    const double p = require_p(o);
    ShellSpec spec{p, o.u_max, o.v_max, o.delta};
    params["p"] = p;
    params["u_max"] = spec.effective_u_max();
    params["v_max"] = spec.v_max;
    Source src{generate_shell(spec), "shell", formula_box_dim(p, 3), nullptr, params};
    src.spectrum_reference = [p](double t) { return formula_assouad_spectrum(p, 3, t); };
    return src;
  }
  // snowflake
  params.erase("delta");
  params["level"] = o.level;
  params["scale"] = o.scale;
  return Source{generate_snowflake(o.level, o.scale), "snowflake", std::log(4.0) / std::log(3.0), nullptr, params};
}

struct ScaleOptions {
  std::optional<double> r_min;
  std::optional<double> r_max;
  int n_scales = 16;
  double density_factor = 10.0;
};

void add_scale_options(CLI::App* cmd, ScaleOptions& o) {
  cmd->add_option("--r-min", o.r_min, "Smallest scale (default density-factor * delta)");
  cmd->add_option("--r-max", o.r_max, "Largest scale (default 100 * r-min, capped by the set size)");
  cmd->add_option("--scales", o.n_scales, "Number of geometric scales")->check(CLI::Range(4, 1000));
  cmd->add_option("--density-factor", o.density_factor, "Require r >= factor * delta")->check(CLI::PositiveNumber);
}

ScaleRange resolve_range(const ScaleOptions& o, const SampleSet& s, double cap) {
  ScaleRange r;
  r.n_scales = o.n_scales;
  r.r_min = o.r_min.value_or(o.density_factor * s.delta());
  r.r_max = o.r_max.value_or(std::min(100.0 * r.r_min, cap));
  if (!(r.r_max > r.r_min))
    throw UsageError("empty scale range [" + num_text(r.r_min) + ", " + num_text(r.r_max) +
                     "]; refine --delta or set --r-min/--r-max");
  return r;
}

json common_fields(const std::string& command, const Source& src, const ScaleRange* range, double density_factor,
                   std::uint64_t seed) {
  json j;
  j["schema"] = "fracdim/1";
  j["command"] = command;
  j["family"] = src.family;
  j["params"] = src.params;
  j["n_points"] = src.sample.size();
  j["ambient_dim"] = src.sample.dim();
  j["delta"] = src.sample.delta();
  j["seed"] = seed;
  j["cell_convention"] = kCellConvention;
  j["density_factor"] = density_factor;
  if (range) j["scale_range"] = {{"r_min", range->r_min}, {"r_max", range->r_max}, {"n_scales", range->n_scales}};
  return j;
}

json fit_json(const RegressionFit& f) {
  return {{"slope", f.slope},           {"intercept", f.intercept},  {"r_squared", f.r_squared},
          {"degenerate", f.degenerate}, {"scales", f.scales_used},   {"counts", f.counts_used},
          {"quality_gate_passed", f.passes_quality_gate()}};
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  os << text;
}

// Plot failures are reported but never change the exit code.
void try_write_plot(const std::string& path, const Plot& plot) {
  try {
    write_text(path, render_svg(plot));
  } catch (const std::exception& e) {
    std::cerr << "warning: plot not written: " << e.what() << '\n';
  }
}

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

void emit(const json& j, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text(out, j.dump(2) + "\n");
  }
}

// ---------------------------------------------------------------------------

int cmd_generate(const SourceOptions& so, const std::string& out) {
  const auto src = load_source(so);
  if (out.empty() || out == "-") {
    write_csv(std::cout, src.sample);
    std::cerr << "points=" << src.sample.size() << " delta=" << format_delta(src.sample.delta()) << '\n';
  } else {
    write_csv_file(out, src.sample);
    std::cout << "points=" << src.sample.size() << " delta=" << format_delta(src.sample.delta()) << '\n';
  }
  return kExitOk;
}

int cmd_boxdim(const SourceOptions& so, const ScaleOptions& sc, const std::string& out, const std::string& plot) {
  const auto src = load_source(so);
  const auto range = resolve_range(sc, src.sample, 0.5 * diameter_bound(src.sample));
  CoveringOptions copt;
  copt.density_factor = sc.density_factor;
  const auto fit = estimate_box_dimension(src.sample, range.r_min, range.r_max, range.n_scales, copt);
  json j = common_fields("boxdim", src, &range, sc.density_factor, kDefaultSeed);
  j["estimate"] = fit.slope;
  j["r_squared"] = fit.r_squared;
  j["quality_gate_passed"] = fit.passes_quality_gate();
  j["scales"] = fit.scales_used;
  j["counts"] = fit.counts_used;
  if (src.box_reference) j["formula_reference"] = *src.box_reference;
  emit(j, out);
  if (!plot.empty()) {
    Plot p{"covering counts", "log(1/r)", "log N_r", {}};
    PlotSeries pts{"counts", {}, {}, true, false, kPalette[0]};
    PlotSeries line{"fit slope " + num_text(std::round(fit.slope * 1e4) / 1e4), {}, {}, false, true, kPalette[3]};
    for (std::size_t i = 0; i < fit.scales_used.size(); ++i) {
      const double x = -std::log(fit.scales_used[i]);
      pts.x.push_back(x);
      pts.y.push_back(std::log(fit.counts_used[i]));
      line.x.push_back(x);
      line.y.push_back(fit.intercept + fit.slope * x);
    }
    p.series = {pts, line};
    try_write_plot(plot, p);
  }
  return kExitOk;
}

std::vector<double> parse_thetas(const std::string& list, double lo, double hi, double step) {
  std::vector<double> t;
  if (!list.empty()) {
    std::stringstream ss(list);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        std::size_t used = 0;
        t.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw UsageError("bad theta value '" + tok + "'");
      }
    }
    return t;
  }
  if (!(step > 0.0)) throw UsageError("--theta-step must be positive");
  const int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
  for (int i = 0; i <= n; ++i) t.push_back(std::round((lo + i * step) * 1e12) / 1e12);
  return t;
}

struct SpectrumOptions {
  std::string thetas;
  double theta_min = 0.1, theta_max = 0.8, theta_step = 0.1;
  int centers = 32;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> tol;
};

int cmd_spectrum(const SourceOptions& so, const ScaleOptions& sc, const SpectrumOptions& sp, const std::string& out,
                 const std::string& plot) {
  const auto thetas = parse_thetas(sp.thetas, sp.theta_min, sp.theta_max, sp.theta_step);
  check_theta_grid(thetas);
  const auto src = load_source(so);
  // every ball radius r^theta must fit inside the set
  const double diam = diameter_bound(src.sample);
  const double cap = std::min(0.5, diam >= 1.0 ? 0.5 : std::pow(diam, 1.0 / thetas.front()));
  const auto range = resolve_range(sc, src.sample, cap);
  CenterPolicy centers;
  centers.random_centers = sp.centers;
  centers.seed = sp.seed;
  CoveringOptions copt;
  copt.density_factor = sc.density_factor;
  const auto curve = estimate_spectrum_curve(src.sample, thetas, range, centers, copt);
  const auto reg = regularize(curve);
  const int d = src.sample.dim();
  const double tol = sp.tol.value_or(0.05 * d);
  const auto pt = detect_phase_transition(reg, d, tol);

  json j = common_fields("spectrum", src, &range, sc.density_factor, sp.seed);
  j["centers"] = {{"anchor", "origin"}, {"random", sp.centers}};
  j["thetas"] = curve.thetas;
  j["estimated"] = curve.values;
  j["regularized"] = reg.values;
  j["transition_tol"] = tol;
  j["theta_star"] = pt.found ? json(pt.theta_star) : json(nullptr);
  json fits = json::array();
  for (const auto& f : curve.fits) fits.push_back(fit_json(f));
  j["fits"] = fits;
  std::vector<double> closed;
  if (src.spectrum_reference) {
    for (double t : thetas) closed.push_back(src.spectrum_reference(t));
    j["closed_form"] = closed;
  }
  emit(j, out);

  if (!plot.empty()) {
    Plot sp_plot{"Assouad spectrum", "theta", "dimension", {}};
    sp_plot.series.push_back({"estimated", curve.thetas, curve.values, true, true, kPalette[0]});
    sp_plot.series.push_back({"regularized", reg.thetas, reg.values, false, true, kPalette[1]});
    if (!closed.empty()) sp_plot.series.push_back({"closed form", thetas, closed, false, true, kPalette[2]});
    try_write_plot(plot + "_spectrum.svg", sp_plot);
    Plot ll{"local covering counts", "log(r^theta / r)", "log M(r)", {}};
    for (std::size_t i = 0; i < curve.fits.size(); ++i) {
      PlotSeries s{"theta " + num_text(thetas[i]), {}, {}, true, true, kPalette[i % 10]};
      for (std::size_t k = 0; k < curve.fits[i].scales_used.size(); ++k) {
        s.x.push_back((thetas[i] - 1.0) * std::log(curve.fits[i].scales_used[k]));
        s.y.push_back(std::log(curve.fits[i].counts_used[k]));
      }
      ll.series.push_back(std::move(s));
    }
    try_write_plot(plot + "_loglog.svg", ll);
  }
  return kExitOk;
}

int cmd_classify(double p, double q, double K, const std::string& out) {
  const auto pair = ShellPair::normalized(p, q);
  const auto c = classify(pair, K);
  json j;
  j["schema"] = "fracdim/1";
  j["command"] = "classify";
  j["p"] = pair.p;
  j["q"] = pair.q;
  j["K"] = K;
  j["min_dilatation"] = c.min_K;
  j["verdict"] = c.admissible ? "admissible" : "impossible";
  if (c.admissible) {
    j["witness"] = {{"map", "radial stretch |x|^{q/p-1} x"}, {"stretch_exponent", c.stretch_exponent}};
  } else {
    j["witness"] = {{"theta_t", c.theta_t},
                    {"theta_t_over_K", c.theta_t_over_K},
                    {"transition_p", c.transition_p},
                    {"theta_t_over_K_below_transition", c.witness_holds}};
  }
  emit(j, out);
  return kExitOk;
}

int cmd_verify(const std::string& suite, const std::string& json_out) {
  const auto rep = run_suite(suite);
  json j;
  j["schema"] = "fracdim/1";
  j["command"] = "verify";
  j["suite"] = rep.suite;
  j["seed"] = kDefaultSeed;
  j["cell_convention"] = kCellConvention;
  j["passed"] = rep.passed();
  json checks = json::array();
  for (const auto& c : rep.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
  j["checks"] = checks;
  if (json_out == "-") {
    std::cout << j.dump(2) << '\n';
  } else {
    for (const auto& c : rep.checks)
      std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << (c.detail.empty() ? "" : ": " + c.detail) << '\n';
    std::cout << rep.suite << ": " << (rep.passed() ? "all checks passed" : std::to_string(rep.failures()) + " failed")
              << '\n';
    if (!json_out.empty()) write_text(json_out, j.dump(2) + "\n");
  }
  return rep.passed() ? kExitOk : kExitCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"fracdim: covering-number dimension estimates for concentric collections, spirals and shells"};
  app.require_subcommand(1);

  SourceOptions gen_src, box_src, spec_src;
  ScaleOptions box_sc, spec_sc;
  SpectrumOptions spec_opt;
  std::string gen_out, box_out, box_plot, spec_out, spec_plot, cls_out, verify_json, suite;
  double cls_p = 0, cls_q = 0, cls_K = 0;

  auto* gen = app.add_subcommand("generate", "Write a sample of a built-in family as CSV");
  add_source_options(gen, gen_src, false);
  gen->add_option("--out", gen_out, "Output CSV path (default stdout)");

  auto* box = app.add_subcommand("boxdim", "Estimate the box dimension");
  add_source_options(box, box_src, true);
  add_scale_options(box, box_sc);
  box->add_option("--out", box_out, "JSON output path (default stdout)");
  box->add_option("--plot", box_plot, "Write a log-log SVG plot to this path");

  auto* spec = app.add_subcommand("spectrum", "Estimate the Assouad spectrum on a theta grid");
  add_source_options(spec, spec_src, true);
  add_scale_options(spec, spec_sc);
  spec->add_option("--thetas", spec_opt.thetas, "Comma-separated theta values");
  spec->add_option("--theta-min", spec_opt.theta_min, "Grid start (default 0.1)");
  spec->add_option("--theta-max", spec_opt.theta_max, "Grid end (default 0.8)");
  spec->add_option("--theta-step", spec_opt.theta_step, "Grid step (default 0.1)");
  spec->add_option("--centers", spec_opt.centers, "Random sample centers besides the origin")
      ->check(CLI::NonNegativeNumber);
  spec->add_option("--seed", spec_opt.seed, "Seed for center selection");
  spec->add_option("--tol", spec_opt.tol, "Phase-transition tolerance (default 0.05 d)");
  spec->add_option("--out", spec_out, "JSON output path (default stdout)");
  spec->add_option("--plot", spec_plot, "Write <prefix>_spectrum.svg and <prefix>_loglog.svg");

  auto* cls = app.add_subcommand("classify", "Decide whether a K-quasiconformal map can take one shell to another");
  cls->add_option("--p", cls_p, "First shell exponent")->required();
  cls->add_option("--q", cls_q, "Second shell exponent")->required();
  cls->add_option("--K", cls_K, "Dilatation bound K >= 1")->required();
  cls->add_option("--out", cls_out, "JSON output path (default stdout)");

  auto* ver = app.add_subcommand("verify", "Run a verification suite");
  ver->add_option("suite", suite, "formulas | covering-oracle | classification")->required();
  ver->add_option("--json", verify_json, "Also write the JSON report to this path ('-' prints JSON only)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*gen) return cmd_generate(gen_src, gen_out);
    if (*box) return cmd_boxdim(box_src, box_sc, box_out, box_plot);
    if (*spec) return cmd_spectrum(spec_src, spec_sc, spec_opt, spec_out, spec_plot);
    if (*cls) return cmd_classify(cls_p, cls_q, cls_K, cls_out);
    if (*ver) return cmd_verify(suite, verify_json);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const UnderResolution& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitCheckFailed;
  }
  return kExitUsage;
}
