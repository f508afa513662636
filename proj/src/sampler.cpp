#include "semibart/sampler.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semibart/stats.hpp"

namespace semibart {

void SamplerConfig::validate() const {
  if (m < 1) throw std::runtime_error("sampler config: m must be at least 1");
  if (n_iter < 1) throw std::runtime_error("sampler config: n_iter must be at least 1");
  if (n_burn < 0 || n_burn >= n_iter)
    throw std::runtime_error("sampler config: need 0 <= n_burn < n_iter");
  if (!(nu0 > 0.0)) throw std::runtime_error("sampler config: nu0 must be positive");
  if (!(q_cal > 0.0 && q_cal < 1.0)) throw std::runtime_error("sampler config: q_cal must lie in (0,1)");
  if (!(k_scale > 0.0)) throw std::runtime_error("sampler config: k_scale must be positive");
  if (!(sigma2_psi > 0.0)) throw std::runtime_error("sampler config: sigma2_psi must be positive");
  if (!(tree_alpha >= 0.0 && tree_alpha < 1.0))
    throw std::runtime_error("sampler config: tree_alpha must lie in [0,1)");
  if (!(tree_beta >= 0.0)) throw std::runtime_error("sampler config: tree_beta must be nonnegative");
  if (n_min < 1) throw std::runtime_error("sampler config: n_min must be at least 1");
}

double calibrate_lambda0(double sample_var, double nu0, double q_cal) {
  if (!(sample_var > 0.0)) throw std::runtime_error("calibrate_lambda0: sample variance must be positive");
  // Pr(nu0*lambda0/X < V) = q_cal with X ~ chisq(nu0) puts the quantile at
  // the lower tail: nu0*lambda0/V = Q_chisq(1 - q_cal).
  return sample_var * chi2_quantile(1.0 - q_cal, nu0) / nu0;
}

PsiPosterior psi_posterior(const Eigen::MatrixXd& L2, const Eigen::VectorXd& ystar,
                           double sigma2, double sigma2_psi, const Eigen::VectorXd& psi0) {
  const Eigen::Index q = L2.cols();
  if (ystar.size() != L2.rows()) throw std::invalid_argument("psi_posterior: length mismatch");
  if (psi0.size() != q) throw std::invalid_argument("psi_posterior: psi0 length mismatch");

  Eigen::MatrixXd precision = (L2.transpose() * L2) / sigma2;
  precision.diagonal().array() += 1.0 / sigma2_psi;

  Eigen::LLT<Eigen::MatrixXd> llt(precision);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "psi update: precision Cholesky failed; linear-term columns are collinear (";
    for (Eigen::Index a = 0; a < q; ++a)
      for (Eigen::Index b = a + 1; b < q; ++b) {
        const double ca = L2.col(a).norm(), cb = L2.col(b).norm();
        if (ca == 0.0 || cb == 0.0) continue;
        if (std::abs(L2.col(a).dot(L2.col(b))) / (ca * cb) > 1.0 - 1e-10)
          msg << " " << a << "~" << b;
      }
    msg << " )";
    throw std::runtime_error(msg.str());
  }

  PsiPosterior out;
  out.mean = llt.solve(L2.transpose() * ystar / sigma2 + psi0 / sigma2_psi);
  out.cov = llt.solve(Eigen::MatrixXd::Identity(q, q));
  return out;
}

Sampler::Sampler(const Dataset& ds, const LinearTermSpec& spec, SamplerConfig cfg)
    : cfg_(std::move(cfg)), kind_(ds.outcome_kind), rng_(cfg_.seed) {
  cfg_.validate();
  design_ = build_design(ds, spec);
  const Eigen::Index n = ds.n();
  const Eigen::Index q = design_.L2.cols();

  if (kind_ == OutcomeKind::continuous && n <= q)
    throw std::runtime_error("sampler: continuous outcomes need more rows than linear terms");

  auto [std_ds, st] = standardize(ds);
  st_ = st;
  y_std_ = std_ds.y;
  y_raw_ = ds.y;

  psi0_ = cfg_.psi0.size() ? cfg_.psi0 : Eigen::VectorXd::Zero(q);
  if (psi0_.size() != q) throw std::runtime_error("sampler config: psi0 length does not match term count");

  prior_.alpha = cfg_.tree_alpha;
  prior_.beta = cfg_.tree_beta;
  prior_.n_min = cfg_.n_min;
  const double span = (kind_ == OutcomeKind::binary) ? 3.0 : 0.5;
  prior_.sigma_mu = span / (cfg_.k_scale * std::sqrt(static_cast<double>(cfg_.m)));

  state_.forest.trees.assign(static_cast<std::size_t>(cfg_.m), Tree{});
  state_.psi = psi0_;
  fits_.assign(static_cast<std::size_t>(cfg_.m), Eigen::VectorXd::Zero(n));
  total_fit_ = Eigen::VectorXd::Zero(n);
  l2psi_ = design_.L2 * state_.psi;
  last_resid_ = Eigen::VectorXd::Zero(n);

  if (kind_ == OutcomeKind::continuous) {
    const double v = sample_sd(y_std_);
    lambda0_ = calibrate_lambda0(v * v, cfg_.nu0, cfg_.q_cal);
    state_.sigma2 = v * v;
  } else {
    state_.sigma2 = 1.0;
    state_.z.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) state_.z[i] = (y_raw_[i] == 1.0) ? 0.5 : -0.5;
  }
}

const Eigen::VectorXd& Sampler::target() const {
  return kind_ == OutcomeKind::binary ? state_.z : y_std_;
}

void Sampler::refresh_total_fit() {
  total_fit_.setZero();
  for (const auto& f : fits_) total_fit_ += f;
}

void Sampler::backfit_tree_step(int tree_index) {
  if (tree_index < 0 || tree_index >= cfg_.m)
    throw std::invalid_argument("backfit_tree_step: tree index out of range");
  const auto j = static_cast<std::size_t>(tree_index);
  Tree& tree = state_.forest.trees[j];

  resid_scratch_ = target() - total_fit_ + fits_[j] - l2psi_;

  const MoveKind kind = pick_move(tree.root().is_leaf(), rng_);
  const auto res = apply_move(tree, kind, design_.L1, resid_scratch_, state_.sigma2, prior_, rng_);
  ++proposed_[static_cast<std::size_t>(kind)];
  if (res.accepted) ++accepted_[static_cast<std::size_t>(kind)];

  Eigen::VectorXd new_fit;
  draw_leaf_means(tree, design_.L1, resid_scratch_, state_.sigma2, prior_.sigma_mu, rng_, new_fit);
  total_fit_ += new_fit - fits_[j];
  fits_[j] = std::move(new_fit);
}

void Sampler::update_psi() {
  const auto post = psi_posterior(design_.L2, target() - total_fit_, state_.sigma2,
                                  cfg_.sigma2_psi, psi0_);
  Eigen::LLT<Eigen::MatrixXd> llt(post.cov);
  Eigen::VectorXd eta(post.mean.size());
  for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = rng_.normal();
  state_.psi = post.mean + llt.matrixL() * eta;
  l2psi_ = design_.L2 * state_.psi;
}

void Sampler::update_sigma2() {
  if (kind_ == OutcomeKind::binary)
    throw std::runtime_error("update_sigma2: binary mode keeps sigma2 fixed at 1");
  last_resid_ = y_std_ - total_fit_ - l2psi_;
  const double n = static_cast<double>(y_std_.size());
  const double nu_n = cfg_.nu0 + n;
  const double lambda_n = cfg_.nu0 * lambda0_ + last_resid_.squaredNorm();
  state_.sigma2 = lambda_n / rng_.chi2(nu_n);
}

void Sampler::update_latent_probit() {
  if (kind_ == OutcomeKind::continuous)
    throw std::runtime_error("update_latent_probit: continuous mode has no latents");
  for (Eigen::Index i = 0; i < state_.z.size(); ++i) {
    const double mean = total_fit_[i] + l2psi_[i];
    state_.z[i] = (y_raw_[i] == 1.0) ? rng_.trunc_normal_lower(mean, 1.0, 0.0)
                                     : rng_.trunc_normal_upper(mean, 1.0, 0.0);
  }
  last_resid_ = state_.z - total_fit_ - l2psi_;
}

void Sampler::check_finite() const {
  if (total_fit_.allFinite() && last_resid_.allFinite() && state_.psi.allFinite() &&
      std::isfinite(state_.sigma2))
    return;
  throw std::runtime_error("sampler: non-finite state at iteration " + std::to_string(iteration_) +
                           " (numerical blowup)");
}

void Sampler::sweep() {
  ++iteration_;
  refresh_total_fit();  // resynchronize the running sum once per sweep
  for (int j = 0; j < cfg_.m; ++j) backfit_tree_step(j);
  update_psi();
  if (kind_ == OutcomeKind::continuous) update_sigma2();
  else update_latent_probit();
  check_finite();
}

PosteriorDraws Sampler::run() {
  const int kept = cfg_.n_iter - cfg_.n_burn;
  PosteriorDraws draws;
  draws.names = design_.term_names;
  draws.psi.resize(kept, design_.L2.cols());
  if (kind_ == OutcomeKind::continuous) draws.sigma2.resize(kept);
  draws.first_iteration = cfg_.n_burn + 1;

  for (int it = 1; it <= cfg_.n_iter; ++it) {
    sweep();
    if (it > cfg_.n_burn) {
      const int r = it - cfg_.n_burn - 1;
      draws.psi.row(r) = state_.psi.transpose();
      if (kind_ == OutcomeKind::continuous) draws.sigma2[r] = state_.sigma2;
    }
  }
  draws.proposed = proposed_;
  draws.accepted = accepted_;
  destandardize_draws(draws, st_);
  return draws;
}

void destandardize_draws(PosteriorDraws& draws, const Standardization& st) {
  if (!st.applied) return;
  draws.psi *= st.scale;
  if (draws.sigma2.size()) draws.sigma2 *= st.scale * st.scale;
}

std::vector<ParamSummary> summarize(const PosteriorDraws& draws) {
  const Eigen::Index kept = draws.psi.rows();
  if (kept == 0) throw std::runtime_error("summarize: no stored draws");
  if (kept < 2) throw std::runtime_error("summarize: need at least 2 stored draws");

  std::vector<ParamSummary> out;
  auto add = [&](const std::string& name, const Eigen::VectorXd& col) {
    ParamSummary s;
    s.name = name;
    s.mean = sample_mean(col);
    s.sd = sample_sd(col);
    std::vector<double> v(col.data(), col.data() + col.size());
    s.lower95 = quantile_type7(v, 0.025);
    s.upper95 = quantile_type7(std::move(v), 0.975);
    out.push_back(std::move(s));
  };
  for (Eigen::Index c = 0; c < draws.psi.cols(); ++c)
    add(draws.names[static_cast<std::size_t>(c)], draws.psi.col(c));
  if (draws.sigma2.size()) add("sigma2", draws.sigma2);
  return out;
}

PosteriorDraws fit(const Dataset& ds, const LinearTermSpec& spec, const SamplerConfig& cfg) {
  Sampler sampler(ds, spec, cfg);
  return sampler.run();
}

}  // namespace semibart
