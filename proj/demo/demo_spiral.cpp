// Builds the curves of x^2 + 1 and x^3 + 1, writes them as SVG and CSV into
// the working directory and compares predicted and measured dimensions.
#include <cstdio>
#include <fstream>

#include "oscfrac/oscfrac.hpp"

using namespace oscfrac;

int main() {
  for (int s : {2, 3}) {
    PolynomialPhase f(1);
    f.add_term({s}, 1.0).add_term({0}, 1.0);
    const AmplitudeSpec amp{1, 1.0, 1.0};
    const auto pred = predict_phase(f, amp);
    const auto samples = resolve_winding(f, amp, sample_integral(f, amp, 20.0, 2000.0, 12000));
    const auto curve = curve_from_samples(samples).polyline();
    const auto window = integral_curve_window(samples, pred.f0, curve);
    const auto grid = window_grid(window);
    const auto counts = box_count(curve, grid);
    const auto dim = estimate_dimension_corrected(counts.epsilons, counts.counts);
    const auto content = estimate_content(curve, pred.curve_dim.to_double(), grid);

    const std::string stem = "curve_x" + std::to_string(s);
    std::ofstream(stem + ".svg") << polyline_to_svg(curve);
    std::ofstream(stem + ".csv") << polyline_to_csv(curve);
    std::printf("%s: %zu points, d predicted %s = %.4f, measured %.4f; M_hat %.3f (%s)\n",
                phase_label(f).c_str(), curve.size(), pred.curve_dim.to_string().c_str(),
                pred.curve_dim.to_double(), dim.d_hat, content.M_hat, to_string(content.verdict));
    if (pred.content_kind == ContentKind::value) std::printf("  predicted content %.3f\n", pred.content);
  }
  return 0;
}
