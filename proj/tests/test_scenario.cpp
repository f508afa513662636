#include <doctest.h>

#include <semibart/scenario.hpp>
#include <semibart/stats.hpp>

#include <cmath>
#include <stdexcept>

using namespace semibart;
using doctest::Contains;

namespace {

// The generating surfaces, re-transcribed here term by term so the tests can
// subtract them from y and inspect the leftover noise. Row layout matches the
// dataset: column 0 is the treatment a, column j is covariate xj.
double s1_mu(const Eigen::MatrixXd& X, int i) {
  const auto c = [&](int k) { return X(i, k); };
  return 1.0 + 2.0 * c(0) + 2.0 * c(5) + std::sin(M_PI * c(1) * c(6)) -
         2.0 * std::exp(c(2) * c(4)) + std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) -
         1.8 * std::cos(c(8)) + 3.0 * c(2) * std::pow(std::abs(c(6)), 1.5);
}

double s2a_mu(const Eigen::MatrixXd& X, int i) {
  const auto c = [&](int k) { return X(i, k); };
  return 1.0 + 2.0 * c(0) - c(0) * c(1) + 2.0 * c(1) + std::sin(M_PI * c(21) * c(6)) -
         std::exp(c(5) / 5.0 * c(4)) + std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) -
         1.8 * std::cos(c(8)) + 0.2 * c(10) * std::pow(std::abs(c(6)), 1.5);
}

double s2b_mu(const Eigen::MatrixXd& X, int i) {
  const auto c = [&](int k) { return X(i, k); };
  return 1.0 + 2.0 * c(0) - c(0) * c(1) + 2.0 * c(1) - c(2) + 2.0 * c(3) - 1.5 * c(4) -
         0.5 * c(5) - 2.0 * c(6) + c(3) * c(3) - c(6) * c(6) + 2.0 * c(3) * c(4) -
         c(2) * c(6) + 0.5 * c(5) * c(6) - 0.2 * c(2) * c(3) * c(4) + c(6) * c(8) * c(9) -
         c(7) * c(21) * c(24) * c(25) + c(10) * c(13) * c(14) * c(26) -
         c(24) * c(25) * c(25) * c(10) + 3.0 * c(3) * c(16) * c(16) -
         3.0 * c(4) * c(17) * c(17) + c(3) * c(4) * c(9) * c(14) -
         c(3) * c(4) * c(9) * c(14) * c(14) + 1.5 * c(10) * c(21);
}

double s4_mu(const Eigen::MatrixXd& X, int i) {
  const auto c = [&](int k) { return X(i, k); };
  return 1.0 + 2.0 * c(0) + std::sin(M_PI * c(21) * c(6)) - std::exp(c(5) / 5.0 * c(4)) +
         std::log(std::abs(std::cos(M_PI / 2.0 * c(7)))) - 1.8 * std::cos(c(8)) +
         0.2 * c(10) * std::pow(std::abs(c(6)), 1.5) + c(1) * c(2) - 0.5 * c(1) * c(1) -
         std::cos(c(1));
}

double s3_py(const Eigen::MatrixXd& X, int i) {
  const auto c = [&](int k) { return X(i, k); };
  return normal_cdf(0.1 + 0.3 * c(0) - 0.1 * c(0) * c(1) + 0.1 * c(1) -
                    std::sin(M_PI / 4.0 * c(21) * c(6)) + std::exp(c(6) / 5.0) * c(10) / 4.0 -
                    0.12 * c(21) * c(8) * c(9) + 0.05 * c(7) * c(9) * c(10) * c(10));
}

double expit(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Treatment assignment probability shared by s2a, s3, and s4.
double simple_prob_a(const Eigen::MatrixXd& X, int i) {
  return expit(0.1 + 0.2 * X(i, 1) - std::sin(X(i, 3)) / 3.0 - 0.1 * X(i, 22));
}

double s2b_prob_a(const Eigen::MatrixXd& X, int i) {
  const auto x = [&](int k) { return X(i, k); };
  return expit(0.1 + 0.2 * x(1) - 0.5 * x(2) - 0.1 * x(1) * x(2) + 0.3 * x(4) + 0.1 * x(5) +
               0.7 * x(4) * x(5) - 0.4 * x(11) * x(22) - 0.4 * x(10) * x(10) * x(15) -
               0.1 * x(22));
}

GeneratedDataset gen(ScenarioId id, int n, std::uint64_t seed) {
  return generate(ScenarioSpec{id, n, seed});
}

double column_corr(const Eigen::MatrixXd& X, int j, int k) {
  const auto cj = X.col(j).array() - X.col(j).mean();
  const auto ck = X.col(k).array() - X.col(k).mean();
  return (cj * ck).sum() / std::sqrt(cj.square().sum() * ck.square().sum());
}

}  // namespace

TEST_CASE("scenario names round-trip and bad input is caught") {
  for (const auto id : {ScenarioId::s1, ScenarioId::s2a, ScenarioId::s2b, ScenarioId::s3,
                        ScenarioId::s4}) {
    CHECK(parse_scenario(scenario_name(id)) == id);
  }
  CHECK_THROWS_WITH_AS(parse_scenario("s5"),
                       Contains("unknown scenario \"s5\" (expected s1, s2a, s2b, s3, or s4)"),
                       std::runtime_error);
  CHECK_THROWS_WITH_AS(generate(ScenarioSpec{ScenarioId::s1, 1, 0}),
                       Contains("n must be at least 2"), std::runtime_error);
}

TEST_CASE("generated datasets have the documented shape") {
  const GeneratedDataset s1 = gen(ScenarioId::s1, 50, 3);
  CHECK(s1.data.n() == 50);
  CHECK(s1.data.p() == 25);
  CHECK(s1.data.column_names[0] == "a");
  CHECK(s1.data.column_names[1] == "x1");
  CHECK(s1.data.column_names[24] == "x24");
  CHECK(s1.data.outcome_kind == OutcomeKind::continuous);
  CHECK(s1.linear_spec.terms == std::vector<std::vector<int>>{{0}});
  REQUIRE(s1.true_psi.size() == 1);
  CHECK(s1.true_psi[0] == 2.0);

  for (const auto id : {ScenarioId::s2a, ScenarioId::s2b, ScenarioId::s4}) {
    const GeneratedDataset g = gen(id, 40, 4);
    CHECK(g.data.p() == 31);
    CHECK(g.data.outcome_kind == OutcomeKind::continuous);
    CHECK(g.linear_spec.terms == std::vector<std::vector<int>>{{0}, {0, 1}, {1}});
    CHECK(term_names(g.linear_spec, g.data.column_names) ==
          std::vector<std::string>{"a", "a:x1", "x1"});
  }
  const GeneratedDataset s2a = gen(ScenarioId::s2a, 40, 4);
  REQUIRE(s2a.true_psi.size() == 3);
  CHECK(s2a.true_psi[0] == 2.0);
  CHECK(s2a.true_psi[1] == -1.0);
  CHECK(s2a.true_psi[2] == 2.0);
  const GeneratedDataset s3 = gen(ScenarioId::s3, 40, 4);
  CHECK(s3.data.outcome_kind == OutcomeKind::binary);
  CHECK(s3.true_psi[0] == 0.3);
  CHECK(s3.true_psi[1] == -0.1);
  CHECK(s3.true_psi[2] == 0.1);
  const GeneratedDataset s4 = gen(ScenarioId::s4, 40, 4);
  CHECK(s4.true_psi[0] == 2.0);
  CHECK(s4.true_psi[1] == 0.0);
  CHECK(s4.true_psi[2] == 0.0);

  // Treatment is 0/1 in every scenario.
  for (const auto id : {ScenarioId::s1, ScenarioId::s2a, ScenarioId::s2b, ScenarioId::s3,
                        ScenarioId::s4}) {
    const GeneratedDataset g = gen(id, 60, 9);
    for (int i = 0; i < 60; ++i) {
      const double a = g.data.X(i, 0);
      CHECK((a == 0.0 || a == 1.0));
    }
  }
}

TEST_CASE("generation is deterministic in the seed") {
  const GeneratedDataset a = gen(ScenarioId::s2b, 200, 42);
  const GeneratedDataset b = gen(ScenarioId::s2b, 200, 42);
  const GeneratedDataset c = gen(ScenarioId::s2b, 200, 43);
  CHECK((a.data.X.array() == b.data.X.array()).all());
  CHECK((a.data.y.array() == b.data.y.array()).all());
  CHECK_FALSE((a.data.X.array() == c.data.X.array()).all());
}

TEST_CASE("covariate moments follow the documented design") {
  const int n = 40000;
  const GeneratedDataset s1 = gen(ScenarioId::s1, n, 9);
  const Eigen::MatrixXd& X = s1.data.X;
  const double se3 = 3.0 / std::sqrt(double(n));

  // Binary prevalences 0.25, .5, .5, .75, .75 on columns a, x1..x4.
  const double want_prev[5] = {0.25, 0.5, 0.5, 0.75, 0.75};
  for (int j = 0; j < 5; ++j) {
    const double p = want_prev[j];
    CHECK(std::abs(X.col(j).mean() - p) < 3.0 * std::sqrt(p * (1 - p) / n));
  }

  // Continuous blocks of five share a mean and an exchangeable correlation.
  const double want_mean[4] = {2.0, 1.5, 1.0, 0.0};
  const double want_corr[4] = {0.20, 0.15, 0.10, 0.05};
  for (int b = 0; b < 4; ++b) {
    const int first = 5 + 5 * b;
    CHECK(std::abs(X.col(first).mean() - want_mean[b]) < se3);
    CHECK(std::abs(X.col(first + 4).mean() - want_mean[b]) < se3);
    CHECK(std::abs(column_corr(X, first, first + 1) - want_corr[b]) < se3);
    CHECK(std::abs(column_corr(X, first + 2, first + 4) - want_corr[b]) < se3);
  }
  CHECK(std::abs(column_corr(X, 5, 10)) < se3);   // across blocks: independent
  CHECK(std::abs(column_corr(X, 5, 1)) < se3);    // binary and continuous: independent

  // AR(1) decay at lag one and two for the shared 30-column design.
  const GeneratedDataset s2a = gen(ScenarioId::s2a, n, 8);
  const Eigen::MatrixXd& Z = s2a.data.X;
  CHECK(std::abs(column_corr(Z, 1, 2) - 0.5) < se3);
  CHECK(std::abs(column_corr(Z, 2, 3) - 0.5) < se3);
  CHECK(std::abs(column_corr(Z, 1, 3) - 0.25) < se3);
  CHECK(std::abs(column_corr(Z, 10, 30) - std::pow(0.5, 20)) < se3);
  CHECK(std::abs(Z.col(1).mean()) < se3);
  CHECK(std::abs(Z.col(30).mean()) < se3);
}

TEST_CASE("treatment assignment follows its stated propensity") {
  const int n = 50000;
  for (const auto id : {ScenarioId::s2a, ScenarioId::s3, ScenarioId::s4}) {
    const GeneratedDataset g = gen(id, n, 11);
    double prevalence = 0.0, want = 0.0, var = 0.0;
    for (int i = 0; i < n; ++i) {
      const double p = simple_prob_a(g.data.X, i);
      prevalence += g.data.X(i, 0);
      want += p;
      var += p * (1.0 - p);
    }
    CHECK(std::abs(prevalence - want) / n < 3.0 * std::sqrt(var) / n);
  }
  const GeneratedDataset g = gen(ScenarioId::s2b, n, 12);
  double prevalence = 0.0, want = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double p = s2b_prob_a(g.data.X, i);
    prevalence += g.data.X(i, 0);
    want += p;
    var += p * (1.0 - p);
  }
  CHECK(std::abs(prevalence - want) / n < 3.0 * std::sqrt(var) / n);
}

TEST_CASE("outcomes equal the documented surface plus unit Gaussian noise") {
  const int n = 50000;
  const struct {
    ScenarioId id;
    double (*mu)(const Eigen::MatrixXd&, int);
  } cases[] = {{ScenarioId::s1, s1_mu},
               {ScenarioId::s2a, s2a_mu},
               {ScenarioId::s2b, s2b_mu},
               {ScenarioId::s4, s4_mu}};
  for (const auto& cs : cases) {
    const GeneratedDataset g = gen(cs.id, n, 13);
    Eigen::VectorXd resid(n);
    for (int i = 0; i < n; ++i) resid[i] = g.data.y[i] - cs.mu(g.data.X, i);
    const double mean = resid.mean();
    const double var = (resid.array() - mean).square().sum() / (n - 1);
    CHECK(std::abs(mean) < 3.0 / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
  }
}

TEST_CASE("binary outcomes match their probit probabilities") {
  const int n = 50000;
  const GeneratedDataset g = gen(ScenarioId::s3, n, 14);
  double sum_y = 0.0, sum_p = 0.0, var = 0.0;
  for (int i = 0; i < n; ++i) {
    const double y = g.data.y[i];
    CHECK((y == 0.0 || y == 1.0));
    const double p = s3_py(g.data.X, i);
    sum_y += y;
    sum_p += p;
    var += p * (1.0 - p);
  }
  CHECK(std::abs(sum_y - sum_p) < 3.0 * std::sqrt(var));
}

TEST_CASE("true_h evaluates the generating treatment component") {
  Eigen::VectorXd x24 = Eigen::VectorXd::Zero(24);
  CHECK(true_h(ScenarioId::s1, 1.0, x24) == 2.0);
  CHECK(true_h(ScenarioId::s1, 0.0, x24) == 0.0);

  Eigen::VectorXd x30 = Eigen::VectorXd::Zero(30);
  x30[0] = 0.5;
  CHECK(true_h(ScenarioId::s2a, 1.0, x30) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(true_h(ScenarioId::s2b, 1.0, x30) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(true_h(ScenarioId::s2a, 0.0, x30) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(true_h(ScenarioId::s3, 1.0, x30) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(true_h(ScenarioId::s4, 1.0, x30) == 2.0);
  CHECK(true_h(ScenarioId::s4, 0.0, x30) == 0.0);

  CHECK_THROWS_AS(true_h(ScenarioId::s1, 1.0, x30), std::invalid_argument);
  CHECK_THROWS_AS(true_h(ScenarioId::s2a, 1.0, x24), std::invalid_argument);
}
