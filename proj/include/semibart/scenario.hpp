#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>

#include "semibart/dataset.hpp"

namespace semibart {

// Built-in benchmark generators. s1: continuous outcome, treatment only.
// s2a/s2b: continuous outcome with a continuous effect modifier, simple and
// complex nuisance surfaces. s3: binary outcome, probit link. s4: continuous
// outcome where the analyst's linear part is deliberately misspecified.
enum class ScenarioId { s1, s2a, s2b, s3, s4 };

ScenarioId parse_scenario(const std::string& name);
std::string scenario_name(ScenarioId id);

struct ScenarioSpec {
  ScenarioId id = ScenarioId::s1;
  int n = 500;
  std::uint64_t seed = 1;

  void validate() const;
};

struct GeneratedDataset {
  Dataset data;
  LinearTermSpec linear_spec;   // the analyst model paired with the scenario
  Eigen::VectorXd true_psi;     // one value per linear term
};

GeneratedDataset generate(const ScenarioSpec& spec);

// Linear treatment component of the generating model (probit scale for s3);
// x holds the non-treatment covariates in dataset column order. For s4 the
// analyst terms beyond the main effect have pseudo-true value zero.
double true_h(ScenarioId id, double a, const Eigen::VectorXd& x);

}  // namespace semibart
