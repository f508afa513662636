#include "semibart/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include "semibart/curve.hpp"
#include "semibart/io.hpp"
#include "semibart/replicate.hpp"
#include "semibart/sampler.hpp"
#include "semibart/scenario.hpp"
#include "semibart/stats.hpp"

namespace semibart {

namespace {

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::string strip_ws(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

// Turns "--config file" into injected "--key=value" tokens placed before the
// explicit flags, so with a take-last policy the command line always wins.
std::vector<std::string> inject_config(const std::vector<std::string>& args) {
  std::string path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) path = args[i].substr(9);
  }
  if (path.empty()) return args;

  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  std::vector<std::string> injected;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string text = strip_ws(line);
    if (text.empty() || text[0] == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0)
      throw std::runtime_error(path + " line " + std::to_string(lineno) + ": expected key=value");
    injected.push_back("--" + strip_ws(text.substr(0, eq)) + "=" + strip_ws(text.substr(eq + 1)));
  }

  std::vector<std::string> out;
  out.reserve(args.size() + injected.size());
  out.push_back(args.front());
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), args.begin() + 1, args.end());
  return out;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir + ": " + ec.message());
}

std::vector<double> parse_real_list(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) throw std::runtime_error(what + ": empty entry in \"" + text + "\"");
    char* end = nullptr;
    const double v = std::strtod(item.c_str(), &end);
    if (end == item.c_str() || *end != '\0')
      throw std::runtime_error(what + ": cannot parse \"" + item + "\" as a number");
    out.push_back(v);
  }
  if (out.empty()) throw std::runtime_error(what + ": empty list");
  return out;
}

// Either a comma list ("0.2,0.5") or an inclusive grid ("0.05:0.95:0.05").
std::vector<double> parse_p0(const std::string& text) {
  if (text.find(':') == std::string::npos) return parse_real_list(text, "--p0");
  std::stringstream in(text);
  std::string part;
  std::vector<double> parts;
  while (std::getline(in, part, ':')) parts.push_back(parse_real_list(part, "--p0").front());
  if (parts.size() != 3) throw std::runtime_error("--p0 grid must be start:stop:step");
  const double start = parts[0], stop = parts[1], step = parts[2];
  if (!(step > 0.0)) throw std::runtime_error("--p0 grid step must be positive");
  if (stop < start) throw std::runtime_error("--p0 grid stop must not precede start");
  std::vector<double> out;
  for (int k = 0;; ++k) {
    const double v = start + k * step;
    if (v > stop + 1e-12 * std::max(1.0, std::abs(stop))) break;
    out.push_back(v);
  }
  return out;
}

std::string draws_csv(const PosteriorDraws& draws) {
  std::string out = "iter";
  for (const auto& name : draws.names) out += ",psi_" + name;
  if (draws.sigma2.size()) out += ",sigma2";
  out += "\n";
  for (Eigen::Index r = 0; r < draws.psi.rows(); ++r) {
    out += std::to_string(draws.first_iteration + static_cast<int>(r));
    for (Eigen::Index c = 0; c < draws.psi.cols(); ++c) out += "," + format_full(draws.psi(r, c));
    if (draws.sigma2.size()) out += "," + format_full(draws.sigma2[r]);
    out += "\n";
  }
  return out;
}

std::string summary_csv(const std::vector<ParamSummary>& summary) {
  std::string out = "parameter,mean,sd,lower95,upper95\n";
  for (const auto& s : summary) {
    out += s.name + "," + format_full(s.mean) + "," + format_full(s.sd) + "," +
           format_full(s.lower95) + "," + format_full(s.upper95) + "\n";
  }
  return out;
}

std::string dataset_csv(const Dataset& ds) {
  std::string out;
  for (const auto& name : ds.column_names) out += name + ",";
  out += "y\n";
  for (Eigen::Index i = 0; i < ds.n(); ++i) {
    for (Eigen::Index j = 0; j < ds.p(); ++j) out += format_full(ds.X(i, j)) + ",";
    out += format_full(ds.y[i]) + "\n";
  }
  return out;
}

struct FitArgs {
  std::string data, outcome = "y", terms, out_dir;
  bool force_binary = false, force_continuous = false;
  SamplerConfig cfg;
};

int cmd_fit(const FitArgs& a) {
  const Table table = read_table(a.data);
  Eigen::VectorXd ycol;
  {
    const auto it = std::find(table.header.begin(), table.header.end(), a.outcome);
    if (it == table.header.end())
      throw std::runtime_error(a.data + ": outcome column \"" + a.outcome + "\" not found");
    ycol = table.values.col(it - table.header.begin());
  }
  OutcomeKind kind = detect_outcome_kind(ycol);
  if (a.force_binary) kind = OutcomeKind::binary;
  if (a.force_continuous) kind = OutcomeKind::continuous;

  const Dataset ds = dataset_from_table(table, a.data, a.outcome, kind);
  const LinearTermSpec spec = parse_linear_terms(a.terms, ds.column_names);

  const PosteriorDraws draws = fit(ds, spec, a.cfg);

  ensure_dir(a.out_dir);
  write_file_atomic(join_path(a.out_dir, "draws.csv"), draws_csv(draws));
  write_file_atomic(join_path(a.out_dir, "summary.csv"), summary_csv(summarize(draws)));
  return 0;
}

int cmd_simulate(const std::string& scenario, int n, std::uint64_t seed, const std::string& out_dir) {
  const ScenarioSpec spec{parse_scenario(scenario), n, seed};
  const GeneratedDataset gen = generate(spec);

  ensure_dir(out_dir);
  write_file_atomic(join_path(out_dir, "data.csv"), dataset_csv(gen.data));

  std::string psis;
  for (Eigen::Index j = 0; j < gen.true_psi.size(); ++j)
    psis += (j ? "," : "") + format_full(gen.true_psi[j]);
  std::string terms;
  const auto names = term_names(gen.linear_spec, gen.data.column_names);
  for (std::size_t j = 0; j < names.size(); ++j) terms += (j ? "," : "") + names[j];

  write_key_values_atomic(
      join_path(out_dir, "meta.txt"),
      {{"scenario", scenario},
       {"n", std::to_string(n)},
       {"seed", std::to_string(seed)},
       {"outcome", gen.data.outcome_kind == OutcomeKind::binary ? "binary" : "continuous"},
       {"terms", terms},
       {"true_psi", psis}});
  return 0;
}

int cmd_replicate(const ReplicationPlan& plan, const std::string& out_dir) {
  const ReplicationReport report = run_replications(plan);
  const ReportTables tables = report_table(report);
  ensure_dir(out_dir);
  write_file_atomic(join_path(out_dir, "report.csv"), tables.csv);
  write_file_atomic(join_path(out_dir, "report.txt"), tables.text);
  write_file_atomic(join_path(out_dir, "audit.csv"), audit_csv(report));
  return 0;
}

int cmd_curve(const std::string& p0_text, double psi1, double psi2,
              const std::string& modifier_text, const std::string& out_path, std::ostream& out) {
  CausalCurveQuery query;
  query.p0 = parse_p0(p0_text);
  query.psi1 = psi1;
  query.psi2 = psi2;
  if (!modifier_text.empty()) query.modifier_values = parse_real_list(modifier_text, "--modifier-values");
  const std::string csv = curve_csv(causal_curve(query));
  if (out_path.empty() || out_path == "-") out << csv;
  else write_file_atomic(out_path, csv);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semiparametric BART regression: sum-of-trees nuisance plus linear treatment terms"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  std::string config_path;

  FitArgs fit_args;
  auto* fit_cmd = app.add_subcommand("fit", "Sample the posterior for one dataset");
  fit_cmd->add_option("--data", fit_args.data, "input CSV")->required();
  fit_cmd->add_option("--outcome", fit_args.outcome, "outcome column name");
  fit_cmd->add_option("--terms", fit_args.terms,
                      "linear terms, e.g. a,a:x1,x1 (first term names the treatment)")->required();
  auto* binary_flag = fit_cmd->add_flag("--binary", fit_args.force_binary, "treat the outcome as binary");
  fit_cmd->add_flag("--continuous", fit_args.force_continuous, "treat the outcome as continuous")
      ->excludes(binary_flag);
  fit_cmd->add_option("--m", fit_args.cfg.m, "trees in the sum");
  fit_cmd->add_option("--iters", fit_args.cfg.n_iter, "total sweeps");
  fit_cmd->add_option("--burn", fit_args.cfg.n_burn, "burn-in sweeps");
  fit_cmd->add_option("--k", fit_args.cfg.k_scale, "leaf shrinkage factor");
  fit_cmd->add_option("--nu", fit_args.cfg.nu0, "error variance prior df");
  fit_cmd->add_option("--q", fit_args.cfg.q_cal, "error variance calibration quantile");
  fit_cmd->add_option("--sigma-psi", fit_args.cfg.sigma2_psi, "prior variance of linear coefficients");
  fit_cmd->add_option("--seed", fit_args.cfg.seed, "RNG seed");
  fit_cmd->add_option("--out", fit_args.out_dir, "output directory")->required();
  fit_cmd->add_option("--config", config_path, "flat key=value config file; explicit flags win");

  std::string sim_scenario;
  int sim_n = 500;
  std::uint64_t sim_seed = 1;
  std::string sim_out;
  auto* sim_cmd = app.add_subcommand("simulate", "Write one generated dataset");
  sim_cmd->add_option("--scenario", sim_scenario, "one of s1, s2a, s2b, s3, s4")->required();
  sim_cmd->add_option("--n", sim_n, "rows to generate")->required();
  sim_cmd->add_option("--seed", sim_seed, "RNG seed");
  sim_cmd->add_option("--out", sim_out, "output directory")->required();
  sim_cmd->add_option("--config", config_path, "flat key=value config file; explicit flags win");

  std::string rep_scenario, rep_out;
  ReplicationPlan plan;
  plan.sampler.n_iter = 2000;
  plan.sampler.n_burn = 500;
  plan.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  auto* rep_cmd = app.add_subcommand("replicate", "Generate-and-fit study over one scenario");
  rep_cmd->add_option("--scenario", rep_scenario, "one of s1, s2a, s2b, s3, s4")->required();
  rep_cmd->add_option("--n", plan.n, "rows per replication");
  rep_cmd->add_option("--reps", plan.n_reps, "number of replications");
  rep_cmd->add_option("--iters", plan.sampler.n_iter, "sweeps per fit");
  rep_cmd->add_option("--burn", plan.sampler.n_burn, "burn-in sweeps per fit");
  rep_cmd->add_option("--m", plan.sampler.m, "trees in the sum");
  rep_cmd->add_option("--workers", plan.workers, "parallel fits");
  rep_cmd->add_option("--seed", plan.base_seed, "base seed");
  rep_cmd->add_option("--out", rep_out, "output directory")->required();
  rep_cmd->add_option("--config", config_path, "flat key=value config file; explicit flags win");

  std::string curve_p0, curve_modifiers, curve_out;
  double curve_psi1 = 0.0, curve_psi2 = 0.0;
  auto* curve_cmd = app.add_subcommand("curve", "Treated-vs-baseline probability curve");
  curve_cmd->add_option("--p0", curve_p0, "baseline probabilities: list or start:stop:step")->required();
  auto* psi1_opt = curve_cmd->add_option("--psi1", curve_psi1, "treatment main effect");
  psi1_opt->required();
  curve_cmd->add_option("--psi2", curve_psi2, "treatment-modifier interaction");
  curve_cmd->add_option("--modifier-values", curve_modifiers, "modifier values (comma list)");
  curve_cmd->add_option("--out", curve_out, "output CSV path; '-' or omitted writes to stdout");
  curve_cmd->add_option("--config", config_path, "flat key=value config file; explicit flags win");

  std::vector<std::string> expanded;
  try {
    expanded = inject_config(args);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<std::string> argv(expanded.rbegin(), expanded.rend());  // CLI11 wants reversed argv
  try {
    app.parse(argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (fit_cmd->parsed()) return cmd_fit(fit_args);
    if (sim_cmd->parsed()) return cmd_simulate(sim_scenario, sim_n, sim_seed, sim_out);
    if (rep_cmd->parsed()) {
      plan.scenario = parse_scenario(rep_scenario);
      return cmd_replicate(plan, rep_out);
    }
    if (curve_cmd->parsed())
      return cmd_curve(curve_p0, curve_psi1, curve_psi2, curve_modifiers, curve_out, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  err << "error: no subcommand given\n";
  return 1;
}

}  // namespace semibart
