#pragma once

#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "oscfrac/asymptotics.hpp"
#include "oscfrac/error.hpp"
#include "oscfrac/fractal.hpp"
#include "oscfrac/geometry.hpp"
#include "oscfrac/integral.hpp"
#include "oscfrac/newton.hpp"
#include "oscfrac/phase.hpp"

namespace oscfrac {

using nlohmann::json;

inline json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

// {"n":2,"terms":[{"k":[2,0],"c":1.0},...]}
inline PolynomialPhase phase_from_json(const json& j) {
  try {
    const int n = j.at("n").get<int>();
    PolynomialPhase p(n);
    for (const auto& t : j.at("terms")) {
      const auto k = t.at("k").get<std::vector<int>>();
      p.add_term(k, t.at("c").get<double>());
    }
    if (p.is_zero()) throw InputError("phase has no nonzero terms");
    return p;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed phase JSON: ") + e.what());
  }
}

inline json phase_to_json(const PolynomialPhase& p) {
  json terms = json::array();
  for (const auto& [k, c] : p.terms()) terms.push_back({{"k", k}, {"c", c}});
  return {{"n", p.dimension()}, {"terms", terms}};
}

// {"radius":1.0,"phi0":1.0}; the dimension comes from the phase.
inline AmplitudeSpec amplitude_from_json(const json& j, int dimension) {
  try {
    AmplitudeSpec a{dimension, j.value("radius", 1.0), j.value("phi0", 1.0)};
    a.validate();
    return a;
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed amplitude JSON: ") + e.what());
  }
}

inline json amplitude_to_json(const AmplitudeSpec& a) { return {{"radius", a.radius}, {"phi0", a.value_at_origin}}; }

inline json rvec_to_json(const RVec& v) {
  json out = json::array();
  for (const auto& r : v) out.push_back(r.to_string());
  return out;
}

inline json diagram_to_json(const DiagramInfo& d) {
  json faces = json::array();
  for (const auto& f : d.faces)
    faces.push_back({{"dim", f.dim}, {"vertices", f.vertices}, {"points", f.points}, {"weight", rvec_to_json(f.weight)}});
  json j = {{"c", d.distance.to_string()},
            {"beta", d.remoteness.to_string()},
            {"multiplicity", d.multiplicity},
            {"remote", d.is_remote},
            {"center_face_dim", d.center_face_dim},
            {"faces", faces}};
  j["center_face"] = d.center_face ? json(*d.center_face) : json(nullptr);
  return j;
}

inline json complex_to_json(const cplx& z) {
  return {{"re", z.real()}, {"im", z.imag()}, {"abs", std::abs(z)}, {"arg", std::arg(z)}};
}

// Non-finite doubles have no JSON form; they are written as null.
inline json number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

inline json prediction_to_json(const AsymptoticPrediction& p) {
  json j = {{"beta", p.beta.to_string()},
            {"multiplicity", p.multiplicity_K},
            {"curve_dim", p.curve_dim.to_string()},
            {"curve_dim_value", p.curve_dim.to_double()},
            {"osc_dim", p.osc_dim.to_string()},
            {"osc_dim_value", p.osc_dim.to_double()},
            {"content_kind", to_string(p.content_kind)},
            {"f0", p.f0},
            {"degenerate", p.degenerate},
            {"rectifiable", p.rectifiable},
            {"note", p.note}};
  j["content"] = p.content_kind == ContentKind::value ? number(p.content) : json(nullptr);
  j["leading_coeff"] = p.leading_coeff ? complex_to_json(*p.leading_coeff) : json(nullptr);
  return j;
}

inline json dimension_to_json(const DimensionEstimate& d) {
  return {{"d_hat", number(d.d_hat)},
          {"stderr", number(d.stderr_d)},
          {"fit_window", {number(d.eps_lo), number(d.eps_hi)}},
          {"r_squared", number(d.r_squared)},
          {"method", to_string(d.method)},
          {"model", to_string(d.model)},
          {"inconclusive", d.inconclusive},
          {"points_used", d.points_used}};
}

inline json content_to_json(const ContentEstimate& c) {
  json table = json::array();
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    table.push_back({{"eps", c.epsilons[i]},
                     {"area", c.areas[i]},
                     {"ratio", number(c.ratios[i])},
                     {"corrected_ratio", number(c.corrected_ratios[i])}});
  return {{"d_used", c.d_used},
          {"M_hat", number(c.M_hat)},
          {"M_raw", number(c.M_raw)},
          {"log_exponent_hat", number(c.log_exponent_hat)},
          {"log_exponent_source", c.log_exponent_from_fit ? "finite-size-fit" : "fine-scale-slope"},
          {"degenerate_verdict", to_string(c.verdict)},
          {"missing_length_term", number(c.missing_length_term)},
          {"missing_core_term", number(c.missing_core_term)},
          {"table", table}};
}

// Polyline CSV: header "x,y" then one vertex per line.
inline std::string polyline_to_csv(const Polyline& p) {
  std::ostringstream out;
  out.precision(17);
  out << "x,y\n";
  for (const auto& v : p.points) out << v.x << ',' << v.y << '\n';
  return out.str();
}

inline Polyline polyline_from_csv(std::istream& in) {
  Polyline p;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() < 2) throw InputError("polyline CSV line " + std::to_string(lineno) + ": expected x,y");
    // the last two columns are the coordinates, so tau,x,y also reads
    const auto& xs = cells[cells.size() - 2];
    const auto& ys = cells[cells.size() - 1];
    try {
      std::size_t px = 0, py = 0;
      const double x = std::stod(xs, &px), y = std::stod(ys, &py);
      if (px != xs.size() || py != ys.size()) throw std::invalid_argument("trailing characters");
      p.points.push_back({x, y});
    } catch (const std::exception&) {
      if (p.points.empty() && lineno == 1) continue;  // header
      throw InputError("polyline CSV line " + std::to_string(lineno) + ": not a number");
    }
  }
  if (p.points.empty()) throw InputError("polyline CSV has no vertices");
  validate_finite(p);
  return p;
}

inline Polyline read_polyline_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  return polyline_from_csv(in);
}

inline std::string samples_to_csv(const IntegralSamples& s) {
  std::ostringstream out;
  out.precision(17);
  out << "tau,re,im,abs\n";
  for (std::size_t i = 0; i < s.size(); ++i)
    out << s.tau[i] << ',' << s.values[i].real() << ',' << s.values[i].imag() << ',' << std::abs(s.values[i]) << '\n';
  return out.str();
}

// SVG with the polyline as a single path, y axis pointing up.
inline std::string polyline_to_svg(const Polyline& p, int size = 800) {
  const auto bb = bounding_box(p);
  const double span = std::max({bb.width(), bb.height(), 1e-300});
  const double margin = 0.02 * size;
  const double scale = (size - 2.0 * margin) / span;
  std::ostringstream out;
  out.precision(8);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
      << size << ' ' << size << "\">\n";
  out << "<path fill=\"none\" stroke=\"black\" stroke-width=\"0.5\" d=\"";
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double x = margin + (p.points[i].x - bb.xmin) * scale;
    const double y = size - margin - (p.points[i].y - bb.ymin) * scale;
    out << (i ? " L" : "M") << x << ' ' << y;
  }
  out << "\"/>\n</svg>\n";
  return out.str();
}

}  // namespace oscfrac
