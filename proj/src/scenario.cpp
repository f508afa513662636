#include "semibart/scenario.hpp"

#include <cmath>
#include <stdexcept>

#include "semibart/rng.hpp"
#include "semibart/stats.hpp"

namespace semibart {

ScenarioId parse_scenario(const std::string& name) {
  if (name == "s1") return ScenarioId::s1;
  if (name == "s2a") return ScenarioId::s2a;
  if (name == "s2b") return ScenarioId::s2b;
  if (name == "s3") return ScenarioId::s3;
  if (name == "s4") return ScenarioId::s4;
  throw std::runtime_error("unknown scenario \"" + name + "\" (expected s1, s2a, s2b, s3, or s4)");
}

std::string scenario_name(ScenarioId id) {
  switch (id) {
    case ScenarioId::s1: return "s1";
    case ScenarioId::s2a: return "s2a";
    case ScenarioId::s2b: return "s2b";
    case ScenarioId::s3: return "s3";
    case ScenarioId::s4: return "s4";
  }
  return "";
}

void ScenarioSpec::validate() const {
  if (n < 2) throw std::runtime_error("scenario: n must be at least 2");
}

namespace {

double expit(double x) { return std::exp(x) / (1.0 + std::exp(x)); }

// Draws each row as mean + L * z with z iid standard normal, L the lower
// Cholesky factor of the covariance.
Eigen::MatrixXd draw_mvn_rows(int n, const Eigen::VectorXd& mean, const Eigen::MatrixXd& cov,
                              Rng& rng) {
  const Eigen::Index p = mean.size();
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("scenario: covariance is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  Eigen::MatrixXd out(n, p);
  Eigen::VectorXd z(p);
  for (int i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) z[j] = rng.normal();
    out.row(i) = (mean + L * z).transpose();
  }
  return out;
}

// 30 covariates, AR(1) correlation 0.5^|i-j|, shared by scenarios 2-4.
Eigen::MatrixXd draw_ar_covariates(int n, Rng& rng) {
  const int p = 30;
  Eigen::MatrixXd cov(p, p);
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j) cov(i, j) = std::pow(0.5, std::abs(i - j));
  return draw_mvn_rows(n, Eigen::VectorXd::Zero(p), cov, rng);
}

std::vector<std::string> make_names(int p_covs) {
  std::vector<std::string> names{"a"};
  for (int j = 1; j <= p_covs; ++j) names.push_back("x" + std::to_string(j));
  return names;
}

LinearTermSpec treatment_only() { return LinearTermSpec{{{0}}}; }

LinearTermSpec treatment_with_modifier() { return LinearTermSpec{{{0}, {0, 1}, {1}}}; }

GeneratedDataset generate_s1(int n, Rng& rng) {
  Eigen::VectorXd mean(20);
  Eigen::MatrixXd cov = Eigen::MatrixXd::Identity(20, 20);
  const double block_mean[4] = {2.0, 1.5, 1.0, 0.0};
  const double block_corr[4] = {0.20, 0.15, 0.10, 0.05};
  for (int b = 0; b < 4; ++b)
    for (int i = 0; i < 5; ++i) {
      mean[5 * b + i] = block_mean[b];
      for (int j = 0; j < 5; ++j)
        if (i != j) cov(5 * b + i, 5 * b + j) = block_corr[b];
    }
  const Eigen::MatrixXd cont = draw_mvn_rows(n, mean, cov, rng);

  Eigen::MatrixXd X(n, 25);
  const double bin_prob[5] = {0.25, 0.5, 0.5, 0.75, 0.75};
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < n; ++i) X(i, j) = rng.bernoulli(bin_prob[j]) ? 1.0 : 0.0;
  X.rightCols(20) = cont;

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto c = [&](int k) { return X(i, k); };
    const double mu = 1.0 + 2.0 * c(0) + 2.0 * c(5) + std::sin(M_PI * c(1) * c(6)) -
                      2.0 * std::exp(c(2) * c(4)) + std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) -
                      1.8 * std::cos(c(8)) + 3.0 * c(2) * std::pow(std::abs(c(6)), 1.5);
    y[i] = mu + rng.normal();
  }

  GeneratedDataset out{make_dataset(std::move(X), std::move(y), make_names(24), OutcomeKind::continuous),
                       treatment_only(), Eigen::VectorXd::Constant(1, 2.0)};
  return out;
}

Eigen::MatrixXd with_treatment(const Eigen::MatrixXd& v, const Eigen::VectorXd& prob_a, Rng& rng) {
  Eigen::MatrixXd X(v.rows(), v.cols() + 1);
  for (Eigen::Index i = 0; i < v.rows(); ++i) X(i, 0) = rng.bernoulli(prob_a[i]) ? 1.0 : 0.0;
  X.rightCols(v.cols()) = v;
  return X;
}

Eigen::VectorXd simple_treatment_prob(const Eigen::MatrixXd& v) {
  Eigen::VectorXd prob(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i)
    prob[i] = expit(0.1 + 0.2 * v(i, 0) - std::sin(v(i, 2)) / 3.0 - 0.1 * v(i, 21));
  return prob;
}

GeneratedDataset generate_s2a(int n, Rng& rng) {
  const Eigen::MatrixXd v = draw_ar_covariates(n, rng);
  const Eigen::MatrixXd X = with_treatment(v, simple_treatment_prob(v), rng);

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto c = [&](int k) { return X(i, k); };
    const double mu = 1.0 + 2.0 * c(0) - c(0) * c(1) + 2.0 * c(1) +
                      std::sin(M_PI * c(21) * c(6)) - std::exp(c(5) / 5.0 * c(4)) +
                      std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) - 1.8 * std::cos(c(8)) +
                      0.2 * c(10) * std::pow(std::abs(c(6)), 1.5);
    y[i] = mu + rng.normal();
  }

  Eigen::VectorXd psi(3);
  psi << 2.0, -1.0, 2.0;
  return {make_dataset(X, std::move(y), make_names(30), OutcomeKind::continuous),
          treatment_with_modifier(), psi};
}

GeneratedDataset generate_s2b(int n, Rng& rng) {
  const Eigen::MatrixXd v = draw_ar_covariates(n, rng);
  Eigen::VectorXd prob(n);
  for (int i = 0; i < n; ++i) {
    const auto w = [&](int k) { return v(i, k); };
    prob[i] = expit(0.1 + 0.2 * w(0) - 0.5 * w(1) - 0.1 * w(0) * w(1) + 0.3 * w(3) +
                    0.1 * w(4) + 0.7 * w(3) * w(4) - 0.4 * w(10) * w(21) -
                    0.4 * w(9) * w(9) * w(14) - 0.1 * w(21));
  }
  const Eigen::MatrixXd X = with_treatment(v, prob, rng);

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto c = [&](int k) { return X(i, k); };
    const double mu =
        1.0 + 2.0 * c(0) - c(0) * c(1) + 2.0 * c(1) - c(2) + 2.0 * c(3) - 1.5 * c(4) -
        0.5 * c(5) - 2.0 * c(6) + c(3) * c(3) - c(6) * c(6) + 2.0 * c(3) * c(4) -
        c(2) * c(6) + 0.5 * c(5) * c(6) - 0.2 * c(2) * c(3) * c(4) + c(6) * c(8) * c(9) -
        c(7) * c(21) * c(24) * c(25) + c(10) * c(13) * c(14) * c(26) -
        c(24) * c(25) * c(25) * c(10) + 3.0 * c(3) * c(16) * c(16) -
        3.0 * c(4) * c(17) * c(17) + c(3) * c(4) * c(9) * c(14) -
        c(3) * c(4) * c(9) * c(14) * c(14) + 1.5 * c(10) * c(21);
    y[i] = mu + rng.normal();
  }

  Eigen::VectorXd psi(3);
  psi << 2.0, -1.0, 2.0;
  return {make_dataset(X, std::move(y), make_names(30), OutcomeKind::continuous),
          treatment_with_modifier(), psi};
}

GeneratedDataset generate_s3(int n, Rng& rng) {
  const Eigen::MatrixXd v = draw_ar_covariates(n, rng);
  const Eigen::MatrixXd X = with_treatment(v, simple_treatment_prob(v), rng);

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto c = [&](int k) { return X(i, k); };
    const double py = normal_cdf(0.1 + 0.3 * c(0) - 0.1 * c(0) * c(1) + 0.1 * c(1) -
                                 std::sin(M_PI / 4.0 * c(21) * c(6)) +
                                 std::exp(c(6) / 5.0) * c(10) / 4.0 -
                                 0.12 * c(21) * c(8) * c(9) + 0.05 * c(7) * c(9) * c(10) * c(10));
    y[i] = rng.bernoulli(py) ? 1.0 : 0.0;
  }

  Eigen::VectorXd psi(3);
  psi << 0.3, -0.1, 0.1;
  return {make_dataset(X, std::move(y), make_names(30), OutcomeKind::binary),
          treatment_with_modifier(), psi};
}

GeneratedDataset generate_s4(int n, Rng& rng) {
  const Eigen::MatrixXd v = draw_ar_covariates(n, rng);
  const Eigen::MatrixXd X = with_treatment(v, simple_treatment_prob(v), rng);

  Eigen::VectorXd y(n);
  for (int i = 0; i < n; ++i) {
    const auto c = [&](int k) { return X(i, k); };
    const double mu = 1.0 + 2.0 * c(0) + std::sin(M_PI * c(21) * c(6)) -
                      std::exp(c(5) / 5.0 * c(4)) +
                      std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) - 1.8 * std::cos(c(8)) +
                      0.2 * c(10) * std::pow(std::abs(c(6)), 1.5) + c(1) * c(2) -
                      0.5 * c(1) * c(1) - std::cos(c(1));
    y[i] = mu + rng.normal();
  }

  // The analyst model still carries the modifier terms; the generating model
  // holds only the treatment effect, so their pseudo-true values are zero.
  Eigen::VectorXd psi(3);
  psi << 2.0, 0.0, 0.0;
  return {make_dataset(X, std::move(y), make_names(30), OutcomeKind::continuous),
          treatment_with_modifier(), psi};
}

}  // namespace

GeneratedDataset generate(const ScenarioSpec& spec) {
  spec.validate();
  Rng rng(spec.seed);
  switch (spec.id) {
    case ScenarioId::s1: return generate_s1(spec.n, rng);
    case ScenarioId::s2a: return generate_s2a(spec.n, rng);
    case ScenarioId::s2b: return generate_s2b(spec.n, rng);
    case ScenarioId::s3: return generate_s3(spec.n, rng);
    case ScenarioId::s4: return generate_s4(spec.n, rng);
  }
  throw std::logic_error("generate: unreachable");
}

double true_h(ScenarioId id, double a, const Eigen::VectorXd& x) {
  switch (id) {
    case ScenarioId::s1:
      if (x.size() != 24) throw std::invalid_argument("true_h: s1 expects 24 covariates");
      return 2.0 * a;
    case ScenarioId::s2a:
    case ScenarioId::s2b:
      if (x.size() != 30) throw std::invalid_argument("true_h: expected 30 covariates");
      return 2.0 * a - a * x[0] + 2.0 * x[0];
    case ScenarioId::s3:
      if (x.size() != 30) throw std::invalid_argument("true_h: expected 30 covariates");
      return 0.3 * a - 0.1 * a * x[0] + 0.1 * x[0];
    case ScenarioId::s4:
      if (x.size() != 30) throw std::invalid_argument("true_h: expected 30 covariates");
      return 2.0 * a;
  }
  throw std::logic_error("true_h: unreachable");
}

}  // namespace semibart
