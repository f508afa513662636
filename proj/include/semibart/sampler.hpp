#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "semibart/dataset.hpp"
#include "semibart/rng.hpp"
#include "semibart/tree.hpp"

namespace semibart {

// Backfitting sampler for g(E[y | L1, L2]) = omega(L1) + L2 * psi, with
// omega a sum of m regularized trees, identity link plus Gaussian noise for
// continuous outcomes, probit link with latent Gaussians for binary ones.
struct SamplerConfig {
  int m = 50;            // trees in the sum
  int n_iter = 10000;    // total sweeps
  int n_burn = 2500;     // discarded sweeps
  double nu0 = 3.0;      // error-variance prior df (continuous only)
  double q_cal = 0.9;    // prior mass below the sample variance (continuous only)
  double k_scale = 2.0;  // leaf shrinkage: sigma_mu = span / (k_scale * sqrt(m))
  double sigma2_psi = 16.0;  // prior variance of each linear coefficient
  Eigen::VectorXd psi0;      // prior mean; empty means zero
  std::uint64_t seed = 1;

  // Tree-shape prior; alpha = 0 collapses every tree to a root leaf, which is
  // a library-level switch for conjugate cross-checks, not a CLI option.
  double tree_alpha = 0.95;
  double tree_beta = 2.0;
  int n_min = 5;

  void validate() const;
};

struct SamplerState {
  Forest forest;
  Eigen::VectorXd psi;
  double sigma2 = 1.0;     // pinned to 1 in binary mode
  Eigen::VectorXd z;       // probit latents; empty in continuous mode
};

struct PosteriorDraws {
  std::vector<std::string> names;  // one per linear term
  Eigen::MatrixXd psi;             // stored draws x terms, original outcome scale
  Eigen::VectorXd sigma2;          // per stored draw; empty in binary mode
  int first_iteration = 1;         // 1-based sweep index of the first stored draw
  std::array<long, 4> proposed{};  // per MoveKind tallies across all sweeps
  std::array<long, 4> accepted{};
};

struct ParamSummary {
  std::string name;
  double mean = 0.0, sd = 0.0, lower95 = 0.0, upper95 = 0.0;
};

// Prior scale for sigma2 such that Pr(sigma2 < sample_var) = q_cal under
// sigma2 ~ nu0 * lambda0 / chisq(nu0).
double calibrate_lambda0(double sample_var, double nu0, double q_cal);

struct PsiPosterior {
  Eigen::VectorXd mean;
  Eigen::MatrixXd cov;
};

// Conditional for psi given the tree fit: precision L2'L2/sigma2 + I/sigma2_psi,
// mean solving precision * mean = L2'ystar/sigma2 + psi0/sigma2_psi.
PsiPosterior psi_posterior(const Eigen::MatrixXd& L2, const Eigen::VectorXd& ystar,
                           double sigma2, double sigma2_psi, const Eigen::VectorXd& psi0);

class Sampler {
 public:
  Sampler(const Dataset& ds, const LinearTermSpec& spec, SamplerConfig cfg);

  // One full sweep: every tree, then psi, then sigma2 or the probit latents.
  void sweep();

  // Individual conditional updates, exposed for targeted testing.
  void backfit_tree_step(int tree_index);
  void update_psi();
  void update_sigma2();
  void update_latent_probit();

  // Runs the configured burn-in and sampling sweeps from the initial state
  // and returns draws mapped back to the original outcome scale.
  PosteriorDraws run();

  const SamplerState& state() const { return state_; }
  const DesignSplit& design() const { return design_; }
  const Standardization& standardization() const { return st_; }
  const TreePrior& tree_prior() const { return prior_; }
  double lambda0() const { return lambda0_; }

  // Working response: the standardized outcome, or the current latents.
  const Eigen::VectorXd& target() const;
  const Eigen::VectorXd& total_fit() const { return total_fit_; }

  // Residual target - omega(L1) - L2*psi as of the last sweep's variance or
  // latent update.
  const Eigen::VectorXd& last_residual() const { return last_resid_; }

  const std::array<long, 4>& proposed() const { return proposed_; }
  const std::array<long, 4>& accepted() const { return accepted_; }

 private:
  void refresh_total_fit();
  void check_finite() const;

  SamplerConfig cfg_;
  OutcomeKind kind_;
  DesignSplit design_;
  Standardization st_;
  Eigen::VectorXd y_std_;        // standardized outcome (continuous mode)
  Eigen::VectorXd y_raw_;        // original outcome (binary mode truncation sides)
  SamplerState state_;
  std::vector<Eigen::VectorXd> fits_;  // per-tree fitted values
  Eigen::VectorXd total_fit_;
  Eigen::VectorXd l2psi_;
  Eigen::VectorXd last_resid_;
  Eigen::VectorXd resid_scratch_;
  Eigen::VectorXd psi0_;
  Eigen::MatrixXd gram_;         // L2'L2
  TreePrior prior_;
  double lambda0_ = 0.0;
  Rng rng_;
  int iteration_ = 0;
  std::array<long, 4> proposed_{};
  std::array<long, 4> accepted_{};
};

// Multiplies draws back to the original outcome scale (psi by the range,
// sigma2 by its square); the identity when standardization was not applied.
void destandardize_draws(PosteriorDraws& draws, const Standardization& st);

// Mean, sd, and equal-tailed 95% interval per column; needs >= 2 stored draws.
std::vector<ParamSummary> summarize(const PosteriorDraws& draws);

// Convenience wrapper: standardize, sample, destandardize.
PosteriorDraws fit(const Dataset& ds, const LinearTermSpec& spec, const SamplerConfig& cfg);

}  // namespace semibart
