#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "oscfrac/oscfrac.hpp"

namespace fs = std::filesystem;
using namespace oscfrac;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct Options {
  std::string config_path;
  std::string out_dir;
  std::string tolerance;
  std::optional<std::uint64_t> seed;
  bool assume_adapted = false;
  std::optional<int> coeff_hypothesis;
  std::optional<double> tau_min, tau_max;
  std::optional<int> count;

  std::string input;
  std::string amplitude_path;
  bool svg = false;
  std::optional<double> eps_max, eps_min;
  int grid_count = kDefaultGridCount;
  std::string method = "finite-size";
  std::optional<double> d;
};

// Settings from --config, overridden by explicit flags.
struct Settings {
  json config = json::object();

  template <class T>
  T get(const char* key, T fallback) const {
    if (!config.contains(key)) return fallback;
    try {
      return config.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InputError(std::string("config key '") + key + "': " + e.what());
    }
  }
};

Settings load_settings(const Options& o) {
  Settings s;
  if (!o.config_path.empty()) {
    s.config = read_json_file(o.config_path);
    if (!s.config.is_object()) throw InputError("config must be a JSON object");
  }
  return s;
}

void emit(const Options& o, const std::string& name, const std::string& content) {
  if (o.out_dir.empty()) {
    std::cout << content;
    return;
  }
  fs::create_directories(o.out_dir);
  const auto path = fs::path(o.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path.string());
  out << content;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

PolynomialPhase load_phase(const Options& o) { return phase_from_json(read_json_file(o.input)); }

AmplitudeSpec load_amplitude(const Options& o, const Settings& s, int n) {
  if (!o.amplitude_path.empty()) return amplitude_from_json(read_json_file(o.amplitude_path), n);
  if (s.config.contains("amplitude")) return amplitude_from_json(s.config.at("amplitude"), n);
  return amplitude_from_json(json::object(), n);
}

QuadratureConfig load_quadrature(const Settings& s, int n) {
  QuadratureConfig q;
  if (s.config.contains("quadrature")) {
    const auto& j = s.config.at("quadrature");
    try {
      q.points_per_wavelength = j.value("points_per_wavelength", q.points_per_wavelength);
      q.panel_order = j.value("panel_order", q.panel_order);
      q.max_panels = j.value("max_panels", q.max_panels);
      q.max_nodes = j.value("max_nodes", q.max_nodes);
      q.min_panels = j.value("min_panels", q.min_panels);
    } catch (const json::exception& e) {
      throw InputError(std::string("config quadrature: ") + e.what());
    }
  }
  q.dimension = n;
  q.validate();
  return q;
}

VerifyConfig load_verify_config(const Options& o, const Settings& s, int n) {
  VerifyConfig c;
  c.tau_min = o.tau_min.value_or(s.get("tau_min", 0.0));
  c.tau_max = o.tau_max.value_or(s.get("tau_max", 0.0));
  c.count = o.count.value_or(s.get("count", 0));
  c.quadrature = load_quadrature(s, n);
  c.tolerance = parse_tolerance(!o.tolerance.empty() ? o.tolerance : s.get<std::string>("tolerance", "desk"));
  c.content_tolerance = s.get("content_tolerance", c.content_tolerance);
  c.grid_count = s.get("grid_count", c.grid_count);
  c.offsets = s.get("offsets", c.offsets);
  c.seed = o.seed.value_or(s.get<std::uint64_t>("seed", c.seed));
  c.assume_adapted = o.assume_adapted || s.get("assume_adapted", false);
  if (o.coeff_hypothesis)
    c.coeff_hypothesis = o.coeff_hypothesis;
  else if (s.config.contains("coeff_hypothesis"))
    c.coeff_hypothesis = s.get("coeff_hypothesis", 0);
  apply_default_range(c, n);
  return c;
}

IntegralSamples sample_for(const Options& o, const Settings& s, bool winding) {
  const auto phase = load_phase(o);
  const auto amp = load_amplitude(o, s, phase.dimension());
  const auto cfg = load_verify_config(o, s, phase.dimension());
  auto samples = sample_integral(phase, amp, cfg.tau_min, cfg.tau_max, cfg.count, cfg.quadrature);
  samples.phase_id = phase_label(phase);
  return winding ? resolve_winding(phase, amp, samples, cfg.quadrature) : samples;
}

EpsilonGrid grid_for(const Options& o, const Settings& s, const Polyline& p) {
  const double diam = bounding_box(p).diameter();
  const double emax = o.eps_max.value_or(s.get("eps_max", diam / 20.0));
  const double emin = o.eps_min.value_or(s.get("eps_min", emax / 100.0));
  auto g = make_epsilon_grid(emax, emin, o.grid_count);
  g.validate();
  return g;
}

int cmd_newton(const Options& o) {
  const auto phase = load_phase(o);
  const auto info = newton_diagram(phase);
  auto j = diagram_to_json(info);
  j["principal_part"] = phase_to_json(principal_part(phase, info.faces));
  const auto nd = r_nondegeneracy_check(phase, info.faces);
  j["r_nondegenerate"] = nd.pass;
  emit(o, "diagram.json", dump(j));
  return kExitPass;
}

int cmd_predict(const Options& o) {
  const auto s = load_settings(o);
  const auto phase = load_phase(o);
  const auto amp = load_amplitude(o, s, phase.dimension());
  const auto cfg = load_verify_config(o, s, phase.dimension());
  if (phase.dimension() >= 2 && !cfg.assume_adapted) {
    const auto nd = r_nondegeneracy_check(phase, newton_diagram(phase).faces);
    if (!nd.pass) throw InputError("principal part is R-degenerate; coordinates may not be adapted");
  }
  const auto p = predict_phase(phase, amp, cfg.coeff_hypothesis);
  auto j = prediction_to_json(p);
  j["phase_id"] = phase_label(phase);
  emit(o, "prediction.json", dump(j));
  return kExitPass;
}

int cmd_integrate(const Options& o) {
  const auto s = load_settings(o);
  emit(o, "integral.csv", samples_to_csv(sample_for(o, s, false)));
  return kExitPass;
}

int cmd_curve(const Options& o) {
  const auto s = load_settings(o);
  const auto samples = sample_for(o, s, true);
  const auto poly = curve_from_samples(samples).polyline();
  emit(o, "curve.csv", polyline_to_csv(poly));
  if (o.svg) {
    if (o.out_dir.empty()) throw InputError("--svg needs --out");
    emit(o, "curve.svg", polyline_to_svg(poly));
  }
  return kExitPass;
}

int cmd_dim(const Options& o) {
  const auto s = load_settings(o);
  const auto poly = read_polyline_csv(o.input);
  const auto grid = grid_for(o, s, poly);
  const auto counts = box_count(poly, grid, s.get("offsets", 4), o.seed.value_or(s.get<std::uint64_t>("seed", 1)));
  DimensionEstimate d;
  if (o.method == "plateau")
    d = estimate_dimension(counts.epsilons, counts.counts);
  else if (o.method == "finite-size")
    d = estimate_dimension_corrected(counts.epsilons, counts.counts);
  else
    throw InputError("unknown method '" + o.method + "' (plateau or finite-size)");
  auto j = dimension_to_json(d);
  json table = json::array();
  for (std::size_t i = 0; i < counts.epsilons.size(); ++i)
    table.push_back({{"eps", counts.epsilons[i]}, {"count", counts.counts[i]}});
  j["table"] = table;
  emit(o, "dimension.json", dump(j));
  return d.inconclusive ? kExitFail : kExitPass;
}

int cmd_content(const Options& o) {
  const auto s = load_settings(o);
  const auto poly = read_polyline_csv(o.input);
  if (!o.d) throw InputError("content needs --d");
  const auto grid = grid_for(o, s, poly);
  const auto c = estimate_content(poly, *o.d, grid);
  emit(o, "content.json", dump(content_to_json(c)));
  return kExitPass;
}

int cmd_calibrate(const Options& o) {
  const auto s = load_settings(o);
  ZooSettings zs;
  zs.seed = o.seed.value_or(s.get<std::uint64_t>("seed", zs.seed));
  zs.spiral_phi_max = s.get("spiral_phi_max", zs.spiral_phi_max);
  json rows = json::array();
  bool all = true;
  std::string table = "case                            expected  measured  verdict               result\n";
  for (const auto& c : default_zoo()) {
    const auto r = run_zoo_case(c, zs);
    all = all && r.pass();
    json row = {{"case", c.name()},
                {"expected_dimension", c.expected_dimension()},
                {"dimension", dimension_to_json(r.dimension)},
                {"dimension_checked", c.check_dimension},
                {"window", window_to_json(r.window)},
                {"pass", r.pass()}};
    if (r.content) {
      row["content"] = {{"M_hat", number(r.content->M_hat)},
                        {"log_exponent_hat", number(r.content->log_exponent_hat)},
                        {"verdict", to_string(r.content->verdict)}};
      const auto M = c.expected_content();
      row["content"]["expected_M"] = M ? json(*M) : json(nullptr);
    }
    rows.push_back(row);
    char line[160];
    std::snprintf(line, sizeof line, "%-30s  %8.4f  %8.4f  %-20s  %s\n", c.name().c_str(), c.expected_dimension(),
                  r.dimension.d_hat, r.content ? to_string(r.content->verdict) : "-", r.pass() ? "PASS" : "FAIL");
    table += line;
  }
  if (o.out_dir.empty()) {
    std::cout << table;
  } else {
    emit(o, "calibration.json", dump({{"cases", rows}, {"pass", all}}));
    std::cout << table;
  }
  return all ? kExitPass : kExitFail;
}

int cmd_verify(const Options& o) {
  const auto s = load_settings(o);
  const auto phase = load_phase(o);
  const auto amp = load_amplitude(o, s, phase.dimension());
  const auto cfg = load_verify_config(o, s, phase.dimension());
  const auto r = verify_phase(phase, amp, cfg);
  emit(o, "report.json", dump(report_to_json(r)));
  if (!o.out_dir.empty()) {
    std::fprintf(stdout, "%s: d = %s predicted, %.4f measured (%s); content %s -> %s\n", r.phase_id.c_str(),
                 r.prediction.curve_dim.to_string().c_str(), r.curve_dimension.d_hat,
                 r.dimension_pass ? "ok" : "off", r.content_consistent ? "consistent" : "inconsistent",
                 r.pass ? "PASS" : "FAIL");
  }
  return r.pass ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractal geometry of curves defined by oscillatory integrals"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_option("--config", o.config_path, "JSON settings file")->check(CLI::ExistingFile);
  app.add_option("--out", o.out_dir, "Output directory (default: stdout)");
  app.add_option("--tolerance", o.tolerance, "Tolerance profile: strict (0.03) or desk (0.05)");
  app.add_option("--seed", o.seed, "Seed for box-count grid offsets");

  auto phase_opts = [&](CLI::App* sub) {
    sub->add_option("phase", o.input, "Phase JSON file")->required()->check(CLI::ExistingFile);
  };
  auto amplitude_opt = [&](CLI::App* sub) {
    sub->add_option("--amplitude", o.amplitude_path, "Amplitude JSON file")->check(CLI::ExistingFile);
  };
  auto prediction_opts = [&](CLI::App* sub) {
    sub->add_flag("--assume-adapted", o.assume_adapted, "Skip the R-nondegeneracy check of the principal part");
    sub->add_option("--coeff-hypothesis", o.coeff_hypothesis, "Index k of the leading nonzero coefficient (n > 2)");
  };
  auto tau_opts = [&](CLI::App* sub) {
    sub->add_option("--tau-min", o.tau_min, "Smallest tau");
    sub->add_option("--tau-max", o.tau_max, "Largest tau");
    sub->add_option("--count", o.count, "Number of geometric tau samples");
  };
  auto grid_opts = [&](CLI::App* sub) {
    sub->add_option("polyline", o.input, "Polyline CSV (x,y)")->required()->check(CLI::ExistingFile);
    sub->add_option("--eps-max", o.eps_max, "Largest scale (default diameter/20)");
    sub->add_option("--eps-min", o.eps_min, "Smallest scale (default eps-max/100)");
    sub->add_option("--grid-count", o.grid_count, "Number of scales")->check(CLI::Range(8, 1000));
  };

  auto* newton = app.add_subcommand("newton", "Newton diagram, distance, remoteness, multiplicity");
  phase_opts(newton);
  auto* predict = app.add_subcommand("predict", "Predicted dimensions and content");
  phase_opts(predict);
  amplitude_opt(predict);
  prediction_opts(predict);
  auto* integrate = app.add_subcommand("integrate", "Sample I(tau) on a geometric grid (CSV)");
  phase_opts(integrate);
  amplitude_opt(integrate);
  tau_opts(integrate);
  auto* curve = app.add_subcommand("curve", "Curve (Re I, Im I) with winding refinement (CSV, SVG)");
  phase_opts(curve);
  amplitude_opt(curve);
  tau_opts(curve);
  curve->add_flag("--svg", o.svg, "Also write curve.svg");
  auto* dim = app.add_subcommand("dim", "Box dimension of a polyline");
  grid_opts(dim);
  dim->add_option("--method", o.method, "plateau or finite-size");
  auto* content = app.add_subcommand("content", "Minkowski content of a polyline at dimension d");
  grid_opts(content);
  content->add_option("--d", o.d, "Dimension")->required();
  auto* calibrate = app.add_subcommand("calibrate", "Run the estimators on synthetic sets with known answers");
  auto* verify = app.add_subcommand("verify", "Predict, integrate, measure and compare");
  phase_opts(verify);
  amplitude_opt(verify);
  prediction_opts(verify);
  tau_opts(verify);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitInput;
  }

  try {
    if (!o.tolerance.empty()) parse_tolerance(o.tolerance);
    if (*newton) return cmd_newton(o);
    if (*predict) return cmd_predict(o);
    if (*integrate) return cmd_integrate(o);
    if (*curve) return cmd_curve(o);
    if (*dim) return cmd_dim(o);
    if (*content) return cmd_content(o);
    if (*calibrate) return cmd_calibrate(o);
    if (*verify) return cmd_verify(o);
  } catch (const InputError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const ConvergenceError& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFail;
  }
  return kExitInput;
}
