#include "semibart/curve.hpp"

#include <cmath>
#include <stdexcept>

#include "semibart/stats.hpp"

namespace semibart {

void CausalCurveQuery::validate() const {
  if (p0.empty()) throw std::runtime_error("causal curve: need at least one baseline probability");
  for (double p : p0) {
    if (!(p > 0.0 && p < 1.0))
      throw std::runtime_error("causal curve: baseline probability " + format_full(p) +
                               " outside (0,1)");
  }
  if (!std::isfinite(psi1) || !std::isfinite(psi2))
    throw std::runtime_error("causal curve: coefficients must be finite");
  for (double v : modifier_values)
    if (!std::isfinite(v)) throw std::runtime_error("causal curve: modifier values must be finite");
  if (psi2 != 0.0 && modifier_values.empty())
    throw std::runtime_error("causal curve: psi2 given without modifier values");
}

std::vector<CurvePoint> causal_curve(const CausalCurveQuery& query) {
  query.validate();
  std::vector<CurvePoint> out;
  for (double p : query.p0) {
    const double base = normal_quantile(p);
    if (query.modifier_values.empty()) {
      out.push_back({p, false, 0.0, normal_cdf(base + query.psi1)});
    } else {
      for (double v : query.modifier_values)
        out.push_back({p, true, v, normal_cdf(base + query.psi1 + query.psi2 * v)});
    }
  }
  return out;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
  std::string out = "p0,modifier,p1\n";
  for (const auto& pt : points) {
    out += format_full(pt.p0) + ",";
    if (pt.has_modifier) out += format_full(pt.modifier);
    out += "," + format_fixed(pt.p1, 4) + "\n";
  }
  return out;
}

}  // namespace semibart
