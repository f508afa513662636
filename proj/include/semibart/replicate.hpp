#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "semibart/sampler.hpp"
#include "semibart/scenario.hpp"

namespace semibart {

// Repeated generate-fit-summarize runs over one scenario. Per-replication
// seeds derive from base_seed alone, and results are reduced in replication
// order, so reports do not depend on the worker count.
struct ReplicationPlan {
  ScenarioId scenario = ScenarioId::s1;
  int n = 500;
  int n_reps = 100;
  SamplerConfig sampler;  // its seed field is ignored; seeds come from base_seed
  std::uint64_t base_seed = 1;
  int workers = 1;

  void validate() const;
};

struct ReplicationRow {
  int rep = 0;                 // 1-based
  std::uint64_t seed = 0;      // the replication's master seed
  Eigen::VectorXd estimate;    // posterior means, one per linear term
  Eigen::VectorXd lower95, upper95;
};

struct ParamMetrics {
  double bias = 0.0;
  double coverage = 0.0;
  double esd = 0.0;  // sd of the per-replication estimates
};

struct ReplicationReport {
  ScenarioId scenario = ScenarioId::s1;
  int n = 0;
  int n_reps = 0;
  std::vector<std::string> params;
  Eigen::VectorXd true_psi;
  std::vector<ParamMetrics> metrics;
  std::vector<ReplicationRow> rows;
};

using RepEstimator = std::function<ReplicationRow(int rep, std::uint64_t rep_seed)>;

ReplicationReport run_replications(const ReplicationPlan& plan);

// Same bookkeeping with an injected estimator; lets tests exercise the
// harness without paying for MCMC.
ReplicationReport run_replications_with(const ReplicationPlan& plan,
                                        const std::vector<std::string>& params,
                                        const Eigen::VectorXd& true_psi,
                                        const RepEstimator& estimator);

std::vector<ParamMetrics> compute_metrics(const std::vector<ReplicationRow>& rows,
                                          const Eigen::VectorXd& true_psi);

struct ReportTables {
  std::string csv;
  std::string text;
};

// Bias and coverage to 2 decimals, ESD to 3, halves rounded away from zero.
ReportTables report_table(const ReplicationReport& report);

// One row per (replication, parameter) at full precision; carries enough to
// recompute every report number.
std::string audit_csv(const ReplicationReport& report);

}  // namespace semibart
