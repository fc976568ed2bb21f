#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <sstream>
#include <string>

#include "oscfrac/asymptotics.hpp"
#include "oscfrac/error.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/integral.hpp"
#include "oscfrac/json_io.hpp"
#include "oscfrac/newton.hpp"
#include "oscfrac/phase.hpp"
#include "oscfrac/windows.hpp"

namespace oscfrac {

enum class ToleranceProfile { strict, desk };

inline const char* to_string(ToleranceProfile p) { return p == ToleranceProfile::strict ? "strict" : "desk"; }

inline double dimension_tolerance(ToleranceProfile p) { return p == ToleranceProfile::strict ? 0.03 : 0.05; }

inline ToleranceProfile parse_tolerance(const std::string& s) {
  if (s == "strict") return ToleranceProfile::strict;
  if (s == "desk") return ToleranceProfile::desk;
  throw InputError("unknown tolerance profile '" + s + "' (strict or desk)");
}

struct VerifyConfig {
  // tau range; zero selects the default for the phase dimension
  double tau_min = 0.0;
  double tau_max = 0.0;
  int count = 0;
  QuadratureConfig quadrature;
  ToleranceProfile tolerance = ToleranceProfile::desk;
  double content_tolerance = 0.15;
  int grid_count = kDefaultGridCount;
  int offsets = 4;
  std::uint64_t seed = 1;
  bool assume_adapted = false;
  std::optional<int> coeff_hypothesis;
};

// Default tau ranges: long in 1D where evaluation is cheap, short in 2D
// and 3D where the tensor quadrature grows with tau^n.
inline void apply_default_range(VerifyConfig& cfg, int n) {
  if (cfg.tau_min == 0.0) cfg.tau_min = n == 1 ? 20.0 : 10.0;
  if (cfg.tau_max == 0.0) cfg.tau_max = n == 1 ? 2000.0 : 300.0;
  if (cfg.count == 0) cfg.count = n == 1 ? 12000 : 2000;
  if (!(cfg.tau_min > 0.0) || !(cfg.tau_max > cfg.tau_min)) throw InputError("need 0 < tau_min < tau_max");
  if (cfg.count < 2) throw InputError("count must be >= 2");
}

// Human-readable polynomial, e.g. "x^2 + y^4 + 1".
inline std::string phase_label(const PolynomialPhase& p) {
  static const char* names3[] = {"x", "y", "z"};
  std::ostringstream out;
  out.precision(12);
  bool first = true;
  for (auto it = p.terms().rbegin(); it != p.terms().rend(); ++it) {
    const auto& [k, c] = *it;
    bool constant = true;
    for (int e : k) constant = constant && e == 0;
    const double mag = std::abs(c);
    out << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
    first = false;
    if (constant || mag != 1.0) out << mag;
    bool need_star = !constant && mag != 1.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (k[i] == 0) continue;
      if (need_star) out << '*';
      need_star = true;
      if (p.dimension() <= 3)
        out << names3[i];
      else
        out << "x" << i + 1;
      if (k[i] > 1) out << '^' << k[i];
    }
  }
  return first ? "0" : out.str();
}

// Rethrows errors from one pipeline stage with the stage name prepended,
// keeping the error category.
template <class F>
auto run_stage(const char* stage, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const InputError& e) {
    throw InputError(std::string("[") + stage + "] " + e.what());
  } catch (const BudgetError& e) {
    throw BudgetError(std::string("[") + stage + "] " + e.what());
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(std::string("[") + stage + "] " + e.what());
  }
}

struct GraphMeasurement {
  Component component = Component::re;
  ScaleWindow window;
  DimensionEstimate dimension;
};

struct VerificationReport {
  std::string phase_id;
  PolynomialPhase phase;
  AmplitudeSpec amplitude;
  std::optional<DiagramInfo> diagram;
  AsymptoticPrediction prediction;
  std::optional<double> predicted_content;  // formula value or from the fitted leading constant
  std::string content_source;               // "formula", "fitted-leading-term" or "none"
  std::optional<LeadingTermFit> leading;
  double tau_min = 0.0, tau_max = 0.0;
  std::size_t curve_points = 0;
  ScaleWindow curve_window;
  DimensionEstimate curve_dimension;
  GraphMeasurement reflected_re, reflected_im;
  ContentEstimate content;
  ToleranceProfile tolerance = ToleranceProfile::desk;
  double tol_d = 0.05;
  double delta_d = 0.0;
  std::optional<double> content_rel_error;
  bool dimension_pass = false;
  bool content_consistent = false;
  std::string content_note;
  bool pass = false;
};

// Content verdict consistency: a predicted value must be matched within
// the tolerance and not contradicted by a degenerate verdict; a predicted
// degeneracy must not be measured as nondegenerate. Inconclusive verdicts
// never contradict.
inline void judge_content(VerificationReport& r, double content_tol) {
  const auto v = r.content.verdict;
  const bool degenerate_measured =
      v == ContentVerdict::degenerate_infinity || v == ContentVerdict::degenerate_zero;
  if (r.prediction.content_kind == ContentKind::degenerate) {
    r.content_consistent = v != ContentVerdict::nondegenerate;
    r.content_note = "degenerate content predicted";
    return;
  }
  if (r.predicted_content) {
    const double rel = (r.content.M_hat - *r.predicted_content) / *r.predicted_content;
    r.content_rel_error = rel;
    r.content_consistent = std::abs(rel) <= content_tol && !degenerate_measured;
    r.content_note = "content value predicted";
    return;
  }
  r.content_consistent = true;
  r.content_note = "no content value predicted; verdict reported only";
}

inline VerificationReport verify_phase(const PolynomialPhase& phase, const AmplitudeSpec& amp, VerifyConfig cfg) {
  VerificationReport r;
  const int n = phase.dimension();
  r.phase = phase;
  r.amplitude = amp;
  r.phase_id = phase_label(phase);
  r.tolerance = cfg.tolerance;
  r.tol_d = dimension_tolerance(cfg.tolerance);
  if (amp.dimension != n) throw InputError("amplitude and phase dimensions differ");

  run_stage("validate", [&] {
    amp.validate();
    if (n > 3) throw InputError("verification supports n <= 3");
    const auto crit = verify_isolated_critical_point(phase, amp);
    if (!crit.pass) throw InputError("phase has a second critical point in the support");
  });

  if (n >= 2) {
    r.diagram = run_stage("newton", [&] { return newton_diagram(phase); });
    if (!cfg.assume_adapted) {
      run_stage("newton", [&] {
        const auto nd = r_nondegeneracy_check(phase, r.diagram->faces);
        if (!nd.pass)
          throw InputError("principal part is R-degenerate; coordinates may not be adapted (use --assume-adapted)");
      });
    }
  }

  r.prediction = run_stage("predict", [&] { return predict_phase(phase, amp, cfg.coeff_hypothesis); });
  const auto& pred = r.prediction;
  if (pred.content_kind == ContentKind::value) {
    r.predicted_content = pred.content;
    r.content_source = "formula";
  } else {
    r.content_source = "none";
  }

  apply_default_range(cfg, n);
  cfg.quadrature.dimension = n;
  r.tau_min = cfg.tau_min;
  r.tau_max = cfg.tau_max;
  const auto samples = run_stage("integrate", [&] {
    auto s = sample_integral(phase, amp, cfg.tau_min, cfg.tau_max, cfg.count, cfg.quadrature);
    s.phase_id = r.phase_id;
    return resolve_winding(phase, amp, s, cfg.quadrature);
  });

  // 1D critical points of order >= 3 have no closed-form leading constant;
  // it is fitted from the top decade and turned into a content value.
  if (!pred.rectifiable && cfg.tau_max >= 10.0 * cfg.tau_min) {
    r.leading = run_stage("predict", [&] {
      return leading_term_fit(samples, pred.f0, pred.beta, pred.multiplicity_K);
    });
    if (n == 1 && !r.predicted_content && r.leading->confirmed && pred.f0 != 0.0) {
      const int s = critical_order_1d(phase).s;
      r.predicted_content = content_from_c1(s, std::abs(r.leading->a), pred.f0);
      r.content_source = "fitted-leading-term";
    }
  }

  const auto curve = run_stage("curve", [&] { return curve_from_samples(samples).polyline(); });
  r.curve_points = curve.size();

  run_stage("estimate", [&] {
    r.curve_window = integral_curve_window(samples, pred.f0, curve);
    const auto grid = window_grid(r.curve_window, cfg.grid_count);
    grid.validate();
    const auto counts = box_count(curve, grid, cfg.offsets, cfg.seed);
    r.curve_dimension = estimate_dimension_corrected(counts.epsilons, counts.counts);
    for (auto* g : {&r.reflected_re, &r.reflected_im}) {
      g->component = g == &r.reflected_re ? Component::re : Component::im;
      const auto graph = reflected_graph(samples, g->component).polyline();
      g->window = graph_window(graph);
      const auto gg = window_grid(g->window, cfg.grid_count);
      const auto gc = box_count(graph, gg, cfg.offsets, cfg.seed);
      g->dimension = estimate_dimension_corrected(gc.epsilons, gc.counts);
    }
    r.content = estimate_content(curve, pred.curve_dim.to_double(), grid);
  });

  r.delta_d = r.curve_dimension.d_hat - pred.curve_dim.to_double();
  r.dimension_pass = std::abs(r.delta_d) <= r.tol_d;
  judge_content(r, cfg.content_tolerance);
  r.pass = r.dimension_pass && r.content_consistent;
  return r;
}

inline json window_to_json(const ScaleWindow& w) {
  return {{"eps_max", number(w.eps_max)},
          {"eps_min", number(w.eps_min)},
          {"decades", number(w.decades())},
          {"extended", w.extended},
          {"rule", w.rule}};
}

inline json leading_fit_to_json(const LeadingTermFit& f) {
  return {{"a", complex_to_json(f.a)}, {"residual", number(f.residual)}, {"used", f.used}, {"confirmed", f.confirmed}};
}

inline json report_to_json(const VerificationReport& r) {
  json j;
  j["phase_id"] = r.phase_id;
  j["phase"] = phase_to_json(r.phase);
  j["amplitude"] = amplitude_to_json(r.amplitude);
  j["diagram"] = r.diagram ? diagram_to_json(*r.diagram) : json(nullptr);
  j["predicted"] = prediction_to_json(r.prediction);
  j["predicted"]["content_used"] = r.predicted_content ? number(*r.predicted_content) : json(nullptr);
  j["predicted"]["content_source"] = r.content_source;
  j["leading_term_fit"] = r.leading ? leading_fit_to_json(*r.leading) : json(nullptr);
  j["sampling"] = {{"tau_min", r.tau_min}, {"tau_max", r.tau_max}, {"curve_points", r.curve_points}};
  json measured;
  measured["curve_window"] = window_to_json(r.curve_window);
  measured["curve_dimension"] = dimension_to_json(r.curve_dimension);
  for (const auto* g : {&r.reflected_re, &r.reflected_im}) {
    measured[g->component == Component::re ? "reflected_re" : "reflected_im"] = {
        {"window", window_to_json(g->window)}, {"dimension", dimension_to_json(g->dimension)}};
  }
  measured["content"] = content_to_json(r.content);
  j["measured"] = measured;
  j["deltas"] = {{"d", number(r.delta_d)},
                 {"content_relative", r.content_rel_error ? number(*r.content_rel_error) : json(nullptr)}};
  j["tolerance"] = {{"profile", to_string(r.tolerance)}, {"d", r.tol_d}};
  j["result"] = {{"dimension_pass", r.dimension_pass},
                 {"content_consistent", r.content_consistent},
                 {"content_note", r.content_note},
                 {"pass", r.pass}};
  return j;
}

}  // namespace oscfrac
