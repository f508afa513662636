#pragma once

#include <string>
#include <vector>

namespace semibart {

// Probit-scale treatment contrast: a fitted psi says the treated success
// probability satisfies probit(p1) = probit(p0) + psi1 + psi2 * modifier,
// so curves of p1 against a grid of baseline risks p0 read the effect off on
// the probability scale.
struct CausalCurveQuery {
  std::vector<double> p0;               // baseline probabilities, each in (0,1)
  double psi1 = 0.0;                    // treatment main effect
  double psi2 = 0.0;                    // treatment-modifier interaction
  std::vector<double> modifier_values;  // empty when psi2 is unused

  void validate() const;
};

struct CurvePoint {
  double p0 = 0.0;
  bool has_modifier = false;
  double modifier = 0.0;
  double p1 = 0.0;
};

// One point per p0 (and per modifier value when given), in input order.
std::vector<CurvePoint> causal_curve(const CausalCurveQuery& query);

// Columns p0,modifier,p1; modifier stays empty without modifier values; p1 is
// reported to 4 decimals.
std::string curve_csv(const std::vector<CurvePoint>& points);

}  // namespace semibart
