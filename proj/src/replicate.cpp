#include "semibart/replicate.hpp"

#include <atomic>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "semibart/stats.hpp"

namespace semibart {

void ReplicationPlan::validate() const {
  if (n < 2) throw std::runtime_error("replication plan: n must be at least 2");
  if (n_reps < 1) throw std::runtime_error("replication plan: need at least 1 replication");
  if (workers < 1) throw std::runtime_error("replication plan: need at least 1 worker");
  sampler.validate();
}

ReplicationReport run_replications_with(const ReplicationPlan& plan,
                                        const std::vector<std::string>& params,
                                        const Eigen::VectorXd& true_psi,
                                        const RepEstimator& estimator) {
  plan.validate();
  if (static_cast<Eigen::Index>(params.size()) != true_psi.size())
    throw std::runtime_error("replication: parameter names and true values disagree");

  ReplicationReport report;
  report.scenario = plan.scenario;
  report.n = plan.n;
  report.n_reps = plan.n_reps;
  report.params = params;
  report.true_psi = true_psi;
  report.rows.resize(static_cast<std::size_t>(plan.n_reps));

  std::atomic<int> next{0};
  std::mutex fail_mutex;
  std::string failure;

  auto worker = [&]() {
    for (;;) {
      const int r = next.fetch_add(1);
      if (r >= plan.n_reps) return;
      {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (!failure.empty()) return;
      }
      const std::uint64_t rep_seed = derive_seed(plan.base_seed, static_cast<std::uint64_t>(r) + 1);
      try {
        auto row = estimator(r + 1, rep_seed);
        row.rep = r + 1;
        row.seed = rep_seed;
        if (row.estimate.size() != true_psi.size() || row.lower95.size() != true_psi.size() ||
            row.upper95.size() != true_psi.size())
          throw std::runtime_error("estimator returned wrong parameter count");
        report.rows[static_cast<std::size_t>(r)] = std::move(row);
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(fail_mutex);
        if (failure.empty())
          failure = "replication " + std::to_string(r + 1) + " (seed " + std::to_string(rep_seed) +
                    ") failed: " + e.what();
        return;
      }
    }
  };

  const int nworkers = std::min(plan.workers, plan.n_reps);
  if (nworkers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nworkers));
    for (int w = 0; w < nworkers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (!failure.empty()) throw std::runtime_error(failure);

  report.metrics = compute_metrics(report.rows, report.true_psi);
  return report;
}

ReplicationReport run_replications(const ReplicationPlan& plan) {
  // Peek at the scenario's analyst model for names and true values.
  const auto probe = generate(ScenarioSpec{plan.scenario, 2, 0});
  const auto params = term_names(probe.linear_spec, probe.data.column_names);
  const Eigen::Index q = probe.true_psi.size();

  auto estimator = [&plan, q](int, std::uint64_t rep_seed) {
    const auto gen = generate(ScenarioSpec{plan.scenario, plan.n, derive_seed(rep_seed, 1)});
    SamplerConfig cfg = plan.sampler;
    cfg.seed = derive_seed(rep_seed, 2);
    const auto draws = fit(gen.data, gen.linear_spec, cfg);
    const auto summary = summarize(draws);

    ReplicationRow row;
    row.estimate.resize(q);
    row.lower95.resize(q);
    row.upper95.resize(q);
    for (Eigen::Index j = 0; j < q; ++j) {
      row.estimate[j] = summary[static_cast<std::size_t>(j)].mean;
      row.lower95[j] = summary[static_cast<std::size_t>(j)].lower95;
      row.upper95[j] = summary[static_cast<std::size_t>(j)].upper95;
    }
    return row;
  };

  return run_replications_with(plan, params, probe.true_psi, estimator);
}

std::vector<ParamMetrics> compute_metrics(const std::vector<ReplicationRow>& rows,
                                          const Eigen::VectorXd& true_psi) {
  if (rows.empty()) throw std::runtime_error("compute_metrics: no replication rows");
  const auto n_reps = static_cast<Eigen::Index>(rows.size());

  std::vector<ParamMetrics> metrics(static_cast<std::size_t>(true_psi.size()));
  for (Eigen::Index j = 0; j < true_psi.size(); ++j) {
    Eigen::VectorXd est(n_reps);
    int covered = 0;
    for (Eigen::Index r = 0; r < n_reps; ++r) {
      const auto& row = rows[static_cast<std::size_t>(r)];
      est[r] = row.estimate[j];
      if (row.lower95[j] <= true_psi[j] && true_psi[j] <= row.upper95[j]) ++covered;
    }
    auto& m = metrics[static_cast<std::size_t>(j)];
    m.bias = est.mean() - true_psi[j];
    m.coverage = static_cast<double>(covered) / static_cast<double>(n_reps);
    m.esd = n_reps >= 2 ? sample_sd(est) : 0.0;
  }
  return metrics;
}

ReportTables report_table(const ReplicationReport& report) {
  ReportTables out;
  out.csv = "scenario,n,reps,parameter,true_value,bias,coverage,esd\n";
  for (std::size_t j = 0; j < report.params.size(); ++j) {
    const auto& m = report.metrics[j];
    out.csv += scenario_name(report.scenario) + "," + std::to_string(report.n) + "," +
               std::to_string(report.n_reps) + "," + report.params[j] + "," +
               format_full(report.true_psi[static_cast<Eigen::Index>(j)]) + "," +
               format_fixed(m.bias, 2) + "," + format_fixed(m.coverage, 2) + "," +
               format_fixed(m.esd, 3) + "\n";
  }

  std::ostringstream text;
  text << "scenario " << scenario_name(report.scenario) << ", n=" << report.n << ", "
       << report.n_reps << " replications\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%-12s %10s %8s %10s %8s\n", "parameter", "true", "bias",
                "coverage", "esd");
  text << line;
  for (std::size_t j = 0; j < report.params.size(); ++j) {
    const auto& m = report.metrics[j];
    std::snprintf(line, sizeof(line), "%-12s %10s %8s %10s %8s\n", report.params[j].c_str(),
                  format_full(report.true_psi[static_cast<Eigen::Index>(j)]).c_str(),
                  format_fixed(m.bias, 2).c_str(), format_fixed(m.coverage, 2).c_str(),
                  format_fixed(m.esd, 3).c_str());
    text << line;
  }
  out.text = text.str();
  return out;
}

std::string audit_csv(const ReplicationReport& report) {
  std::string out = "rep,seed,parameter,true_value,estimate,lower95,upper95\n";
  for (const auto& row : report.rows) {
    for (std::size_t j = 0; j < report.params.size(); ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      out += std::to_string(row.rep) + "," + std::to_string(row.seed) + "," + report.params[j] +
             "," + format_full(report.true_psi[jj]) + "," + format_full(row.estimate[jj]) + "," +
             format_full(row.lower95[jj]) + "," + format_full(row.upper95[jj]) + "\n";
    }
  }
  return out;
}

}  // namespace semibart
