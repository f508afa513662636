#include "semibart/tree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "semibart/stats.hpp"

namespace semibart {

double TreePrior::split_prob(int depth) const {
  return alpha * std::pow(1.0 + depth, -beta);
}

double move_prob(bool single_leaf, MoveKind kind) {
  if (single_leaf) return kind == MoveKind::grow ? 1.0 : 0.0;
  switch (kind) {
    case MoveKind::grow: return 0.25;
    case MoveKind::prune: return 0.25;
    case MoveKind::change: return 0.40;
    case MoveKind::swap: return 0.10;
  }
  return 0.0;
}

MoveKind pick_move(bool single_leaf, Rng& rng) {
  if (single_leaf) return MoveKind::grow;
  const double u = rng.uniform01();
  if (u < 0.25) return MoveKind::grow;
  if (u < 0.50) return MoveKind::prune;
  if (u < 0.90) return MoveKind::change;
  return MoveKind::swap;
}

namespace {

std::unique_ptr<TreeNode> clone(const TreeNode& nd) {
  auto out = std::make_unique<TreeNode>();
  out->split_var = nd.split_var;
  out->split_cut = nd.split_cut;
  out->mu = nd.mu;
  if (nd.left) out->left = clone(*nd.left);
  if (nd.right) out->right = clone(*nd.right);
  return out;
}

struct NodeInfo {
  TreeNode* node;
  TreeNode* parent;
  int depth;
};

void collect(TreeNode* nd, TreeNode* parent, int depth, std::vector<NodeInfo>& out) {
  out.push_back({nd, parent, depth});
  if (!nd->is_leaf()) {
    collect(nd->left.get(), nd, depth + 1, out);
    collect(nd->right.get(), nd, depth + 1, out);
  }
}

bool prunable(const TreeNode* nd) {
  return !nd->is_leaf() && nd->left->is_leaf() && nd->right->is_leaf();
}

void collect_leaves(TreeNode* nd, std::vector<TreeNode*>& out) {
  if (nd->is_leaf()) {
    out.push_back(nd);
    return;
  }
  collect_leaves(nd->left.get(), out);
  collect_leaves(nd->right.get(), out);
}

void dump_node(const TreeNode& nd, int depth, std::ostringstream& out) {
  for (int i = 0; i < depth; ++i) out << "  ";
  if (nd.is_leaf()) {
    out << "leaf mu=" << format_full(nd.mu) << "\n";
  } else {
    out << "split col=" << nd.split_var << " cut=" << format_full(nd.split_cut) << "\n";
    dump_node(*nd.left, depth + 1, out);
    dump_node(*nd.right, depth + 1, out);
  }
}

// Distinct sorted values of column `var` over `rows`; candidate cutpoints are
// the midpoints between consecutive distinct values.
std::vector<double> distinct_values(const Eigen::MatrixXd& X, const std::vector<int>& rows, int var) {
  std::vector<double> vals;
  vals.reserve(rows.size());
  for (int i : rows) vals.push_back(X(i, var));
  std::sort(vals.begin(), vals.end());
  vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
  return vals;
}

bool has_two_values(const Eigen::MatrixXd& X, const std::vector<int>& rows, int var) {
  if (rows.size() < 2) return false;
  const double first = X(rows.front(), var);
  for (std::size_t i = 1; i < rows.size(); ++i)
    if (X(rows[i], var) != first) return true;
  return false;
}

std::vector<int> available_vars(const Eigen::MatrixXd& X, const std::vector<int>& rows) {
  std::vector<int> avail;
  for (int v = 0; v < static_cast<int>(X.cols()); ++v)
    if (has_two_values(X, rows, v)) avail.push_back(v);
  return avail;
}

struct LeafStats {
  double k = 0.0, s = 0.0, s2 = 0.0;
};

// Up to two nodes may have their rule overridden while routing (change uses
// one, swap uses two).
struct RuleOverride {
  const TreeNode* node = nullptr;
  int var = -1;
  double cut = 0.0;
};

const TreeNode* route_one(const TreeNode* top, const Eigen::MatrixXd& X, int row,
                          const RuleOverride& o1, const RuleOverride& o2) {
  const TreeNode* nd = top;
  while (!nd->is_leaf()) {
    int var = nd->split_var;
    double cut = nd->split_cut;
    if (nd == o1.node) { var = o1.var; cut = o1.cut; }
    else if (nd == o2.node) { var = o2.var; cut = o2.cut; }
    nd = (X(row, var) < cut) ? nd->left.get() : nd->right.get();
  }
  return nd;
}

// Per-leaf sufficient statistics of `rows` routed through the subtree at
// `top`, in depth-first leaf order.
std::vector<LeafStats> subtree_stats(TreeNode* top, const Eigen::MatrixXd& X,
                                     const Eigen::VectorXd& resid, const std::vector<int>& rows,
                                     const std::vector<TreeNode*>& leaves,
                                     const RuleOverride& o1, const RuleOverride& o2) {
  std::vector<LeafStats> stats(leaves.size());
  for (int i : rows) {
    const TreeNode* leaf = route_one(top, X, i, o1, o2);
    const auto it = std::find(leaves.begin(), leaves.end(), leaf);
    auto& st = stats[static_cast<std::size_t>(it - leaves.begin())];
    const double r = resid[i];
    st.k += 1.0;
    st.s += r;
    st.s2 += r * r;
  }
  return stats;
}

double sum_log_marginal(const std::vector<LeafStats>& stats, double sigma2, double sigma_mu) {
  double total = 0.0;
  for (const auto& st : stats) total += log_marginal_suff(st.k, st.s, st.s2, sigma2, sigma_mu);
  return total;
}

// Rows whose routing path passes through `target`.
std::vector<int> rows_through(const TreeNode* root, const TreeNode* target,
                              const Eigen::MatrixXd& X) {
  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(X.rows()); ++i) {
    const TreeNode* nd = root;
    for (;;) {
      if (nd == target) {
        rows.push_back(i);
        break;
      }
      if (nd->is_leaf()) break;
      nd = (X(i, nd->split_var) < nd->split_cut) ? nd->left.get() : nd->right.get();
    }
  }
  return rows;
}

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

Tree::Tree(const Tree& other) : root_(clone(*other.root_)) {}

Tree& Tree::operator=(const Tree& other) {
  if (this != &other) root_ = clone(*other.root_);
  return *this;
}

int Tree::leaf_count() const {
  std::vector<TreeNode*> leaves;
  collect_leaves(const_cast<TreeNode*>(root_.get()), leaves);
  return static_cast<int>(leaves.size());
}

int Tree::internal_count() const {
  std::vector<NodeInfo> infos;
  collect(const_cast<TreeNode*>(root_.get()), nullptr, 0, infos);
  int count = 0;
  for (const auto& info : infos)
    if (!info.node->is_leaf()) ++count;
  return count;
}

double Tree::predict_row(const Eigen::MatrixXd& X, Eigen::Index i) const {
  const TreeNode* nd = root_.get();
  while (!nd->is_leaf())
    nd = (X(i, nd->split_var) < nd->split_cut) ? nd->left.get() : nd->right.get();
  return nd->mu;
}

void Tree::route(const Eigen::MatrixXd& X, std::vector<TreeNode*>& leaf_of) {
  leaf_of.resize(static_cast<std::size_t>(X.rows()));
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    TreeNode* nd = root_.get();
    while (!nd->is_leaf())
      nd = (X(i, nd->split_var) < nd->split_cut) ? nd->left.get() : nd->right.get();
    leaf_of[static_cast<std::size_t>(i)] = nd;
  }
}

std::string Tree::dump() const {
  std::ostringstream out;
  dump_node(*root_, 0, out);
  return out.str();
}

Eigen::VectorXd Forest::predict(const Eigen::MatrixXd& X) const {
  Eigen::VectorXd fit = Eigen::VectorXd::Zero(X.rows());
  for (const auto& tree : trees)
    for (Eigen::Index i = 0; i < X.rows(); ++i) fit[i] += tree.predict_row(X, i);
  return fit;
}

double log_marginal_leaf(const Eigen::VectorXd& resid, double sigma2, double sigma_mu) {
  if (resid.size() == 0) throw std::invalid_argument("log_marginal_leaf: empty residual vector");
  return log_marginal_suff(static_cast<double>(resid.size()), resid.sum(),
                           resid.squaredNorm(), sigma2, sigma_mu);
}

double log_marginal_suff(double k, double s, double s2, double sigma2, double sigma_mu) {
  if (!(sigma2 > 0.0) || !(sigma_mu > 0.0))
    throw std::invalid_argument("log_marginal_suff: variances must be positive");
  const double sm2 = sigma_mu * sigma_mu;
  const double denom = sigma2 + k * sm2;
  return -0.5 * k * std::log(2.0 * M_PI * sigma2) + 0.5 * std::log(sigma2 / denom) -
         s2 / (2.0 * sigma2) + sm2 * s * s / (2.0 * sigma2 * denom);
}

namespace {

MoveResult grow_move(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, const TreePrior& prior, Rng& rng) {
  std::vector<NodeInfo> infos;
  collect(&tree.root(), nullptr, 0, infos);

  std::vector<NodeInfo> leaves;
  int w2_now = 0;
  for (const auto& info : infos) {
    if (info.node->is_leaf()) leaves.push_back(info);
    else if (prunable(info.node)) ++w2_now;
  }
  const int b = static_cast<int>(leaves.size());
  const NodeInfo target = leaves[static_cast<std::size_t>(rng.index(b))];

  std::vector<int> rows;
  for (int i = 0; i < static_cast<int>(L1.rows()); ++i) {
    const TreeNode* nd = &tree.root();
    while (!nd->is_leaf()) nd = (L1(i, nd->split_var) < nd->split_cut) ? nd->left.get() : nd->right.get();
    if (nd == target.node) rows.push_back(i);
  }

  const auto avail = available_vars(L1, rows);
  if (avail.empty()) return {};  // nothing to split on

  const int var = avail[static_cast<std::size_t>(rng.index(static_cast<int>(avail.size())))];
  const auto vals = distinct_values(L1, rows, var);
  const int cut_idx = rng.index(static_cast<int>(vals.size()) - 1);
  const double cut = 0.5 * (vals[static_cast<std::size_t>(cut_idx)] + vals[static_cast<std::size_t>(cut_idx) + 1]);

  LeafStats all, left, right;
  for (int i : rows) {
    const double r = resid[i];
    all.k += 1.0; all.s += r; all.s2 += r * r;
    auto& side = (L1(i, var) < cut) ? left : right;
    side.k += 1.0; side.s += r; side.s2 += r * r;
  }

  MoveResult res;
  res.valid = true;
  const int n_min = std::max(prior.n_min, 1);
  if (left.k < n_min || right.k < n_min) return res;

  // Pruning the new node from the grown tree must undo this exact move.
  const int w2_after = w2_now + 1 - ((target.parent != nullptr && prunable(target.parent)) ? 1 : 0);
  const double ps_d = prior.split_prob(target.depth);
  const double ps_d1 = prior.split_prob(target.depth + 1);

  res.log_alpha = std::log(move_prob(false, MoveKind::prune)) -
                  std::log(move_prob(b == 1, MoveKind::grow)) +
                  std::log(static_cast<double>(b)) - std::log(static_cast<double>(w2_after)) +
                  std::log(ps_d) + 2.0 * std::log(1.0 - ps_d1) - std::log(1.0 - ps_d) +
                  log_marginal_suff(left.k, left.s, left.s2, sigma2, prior.sigma_mu) +
                  log_marginal_suff(right.k, right.s, right.s2, sigma2, prior.sigma_mu) -
                  log_marginal_suff(all.k, all.s, all.s2, sigma2, prior.sigma_mu);

  if (std::log(rng.uniform01()) < res.log_alpha) {
    res.accepted = true;
    target.node->split_var = var;
    target.node->split_cut = cut;
    target.node->left = std::make_unique<TreeNode>();
    target.node->right = std::make_unique<TreeNode>();
  }
  return res;
}

MoveResult prune_move(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                      double sigma2, const TreePrior& prior, Rng& rng) {
  std::vector<NodeInfo> infos;
  collect(&tree.root(), nullptr, 0, infos);

  std::vector<NodeInfo> prunables;
  int b = 0;
  for (const auto& info : infos) {
    if (info.node->is_leaf()) ++b;
    else if (prunable(info.node)) prunables.push_back(info);
  }
  if (prunables.empty()) return {};
  const int w2_now = static_cast<int>(prunables.size());
  const NodeInfo target = prunables[static_cast<std::size_t>(rng.index(w2_now))];

  LeafStats all, left, right;
  for (int i = 0; i < static_cast<int>(L1.rows()); ++i) {
    const TreeNode* nd = &tree.root();
    while (!nd->is_leaf()) nd = (L1(i, nd->split_var) < nd->split_cut) ? nd->left.get() : nd->right.get();
    if (nd != target.node->left.get() && nd != target.node->right.get()) continue;
    const double r = resid[i];
    all.k += 1.0; all.s += r; all.s2 += r * r;
    auto& side = (nd == target.node->left.get()) ? left : right;
    side.k += 1.0; side.s += r; side.s2 += r * r;
  }

  const bool root_after = (target.node == &tree.root());
  const double ps_d = prior.split_prob(target.depth);
  const double ps_d1 = prior.split_prob(target.depth + 1);

  MoveResult res;
  res.valid = true;
  res.log_alpha = std::log(move_prob(root_after, MoveKind::grow)) -
                  std::log(move_prob(false, MoveKind::prune)) +
                  std::log(static_cast<double>(w2_now)) - std::log(static_cast<double>(b - 1)) +
                  std::log(1.0 - ps_d) - std::log(ps_d) - 2.0 * std::log(1.0 - ps_d1) +
                  log_marginal_suff(all.k, all.s, all.s2, sigma2, prior.sigma_mu) -
                  log_marginal_suff(left.k, left.s, left.s2, sigma2, prior.sigma_mu) -
                  log_marginal_suff(right.k, right.s, right.s2, sigma2, prior.sigma_mu);

  if (std::log(rng.uniform01()) < res.log_alpha) {
    res.accepted = true;
    target.node->left.reset();
    target.node->right.reset();
    target.node->split_var = -1;
  }
  return res;
}

// Shared tail of change and swap: candidate rules at one or two nodes with the
// subtree shape fixed. Row sets above `top` are untouched, the uniform rule
// proposal cancels the uniform rule prior, and the depth factors are
// unchanged, so only the integrated likelihood over `top`'s leaves remains.
MoveResult rules_move(Tree& tree, TreeNode* top, const Eigen::MatrixXd& L1,
                      const Eigen::VectorXd& resid, double sigma2, const TreePrior& prior,
                      Rng& rng, const RuleOverride& o1, const RuleOverride& o2) {
  const auto rows = rows_through(&tree.root(), top, L1);

  std::vector<TreeNode*> leaves;
  collect_leaves(top, leaves);

  const RuleOverride none;
  const auto old_stats = subtree_stats(top, L1, resid, rows, leaves, none, none);
  const auto new_stats = subtree_stats(top, L1, resid, rows, leaves, o1, o2);

  MoveResult res;
  res.valid = true;
  const int n_min = std::max(prior.n_min, 1);
  for (const auto& st : new_stats)
    if (st.k < n_min) return res;

  res.log_alpha = sum_log_marginal(new_stats, sigma2, prior.sigma_mu) -
                  sum_log_marginal(old_stats, sigma2, prior.sigma_mu);

  if (std::log(rng.uniform01()) < res.log_alpha) {
    res.accepted = true;
    const_cast<TreeNode*>(o1.node)->split_var = o1.var;
    const_cast<TreeNode*>(o1.node)->split_cut = o1.cut;
    if (o2.node) {
      const_cast<TreeNode*>(o2.node)->split_var = o2.var;
      const_cast<TreeNode*>(o2.node)->split_cut = o2.cut;
    }
  }
  return res;
}

MoveResult change_move(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                       double sigma2, const TreePrior& prior, Rng& rng) {
  std::vector<NodeInfo> infos;
  collect(&tree.root(), nullptr, 0, infos);
  std::vector<TreeNode*> internals;
  for (const auto& info : infos)
    if (!info.node->is_leaf()) internals.push_back(info.node);
  if (internals.empty()) return {};

  TreeNode* target = internals[static_cast<std::size_t>(rng.index(static_cast<int>(internals.size())))];
  const auto rows = rows_through(&tree.root(), target, L1);

  const auto avail = available_vars(L1, rows);
  if (avail.empty()) return {};
  const int var = avail[static_cast<std::size_t>(rng.index(static_cast<int>(avail.size())))];
  const auto vals = distinct_values(L1, rows, var);
  const int cut_idx = rng.index(static_cast<int>(vals.size()) - 1);
  const double cut = 0.5 * (vals[static_cast<std::size_t>(cut_idx)] + vals[static_cast<std::size_t>(cut_idx) + 1]);

  return rules_move(tree, target, L1, resid, sigma2, prior, rng,
                    RuleOverride{target, var, cut}, RuleOverride{});
}

MoveResult swap_move(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, const TreePrior& prior, Rng& rng) {
  std::vector<NodeInfo> infos;
  collect(&tree.root(), nullptr, 0, infos);
  std::vector<std::pair<TreeNode*, TreeNode*>> pairs;
  for (const auto& info : infos) {
    if (info.node->is_leaf()) continue;
    if (!info.node->left->is_leaf()) pairs.emplace_back(info.node, info.node->left.get());
    if (!info.node->right->is_leaf()) pairs.emplace_back(info.node, info.node->right.get());
  }
  if (pairs.empty()) return {};

  const auto [parent, child] = pairs[static_cast<std::size_t>(rng.index(static_cast<int>(pairs.size())))];
  return rules_move(tree, parent, L1, resid, sigma2, prior, rng,
                    RuleOverride{parent, child->split_var, child->split_cut},
                    RuleOverride{child, parent->split_var, parent->split_cut});
}

}  // namespace

MoveResult apply_move(Tree& tree, MoveKind kind, const Eigen::MatrixXd& L1,
                      const Eigen::VectorXd& resid, double sigma2,
                      const TreePrior& prior, Rng& rng) {
  if (resid.size() != L1.rows()) throw std::invalid_argument("apply_move: residual length mismatch");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("apply_move: sigma2 must be positive");
  switch (kind) {
    case MoveKind::grow: return grow_move(tree, L1, resid, sigma2, prior, rng);
    case MoveKind::prune:
      if (tree.root().is_leaf()) return {};  // nothing to prune
      return prune_move(tree, L1, resid, sigma2, prior, rng);
    case MoveKind::change:
      if (tree.root().is_leaf()) return {};
      return change_move(tree, L1, resid, sigma2, prior, rng);
    case MoveKind::swap:
      if (tree.root().is_leaf()) return {};
      return swap_move(tree, L1, resid, sigma2, prior, rng);
  }
  return {};
}

void draw_leaf_means(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, double sigma_mu, Rng& rng, Eigen::VectorXd& fit_out) {
  std::vector<TreeNode*> leaf_of;
  tree.route(L1, leaf_of);

  std::vector<TreeNode*> leaves;
  collect_leaves(&tree.root(), leaves);
  std::vector<LeafStats> stats(leaves.size());
  for (Eigen::Index i = 0; i < resid.size(); ++i) {
    const auto it = std::find(leaves.begin(), leaves.end(), leaf_of[static_cast<std::size_t>(i)]);
    auto& st = stats[static_cast<std::size_t>(it - leaves.begin())];
    st.k += 1.0;
    st.s += resid[i];
  }

  const double sm2 = sigma_mu * sigma_mu;
  for (std::size_t j = 0; j < leaves.size(); ++j) {
    if (stats[j].k == 0.0) throw std::runtime_error("draw_leaf_means: leaf with no rows");
    const double v = 1.0 / (stats[j].k / sigma2 + 1.0 / sm2);
    const double m = v * stats[j].s / sigma2;
    leaves[j]->mu = m + std::sqrt(v) * rng.normal();
  }

  fit_out.resize(resid.size());
  for (Eigen::Index i = 0; i < resid.size(); ++i)
    fit_out[i] = leaf_of[static_cast<std::size_t>(i)]->mu;
}

void draw_leaf_means(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, double sigma_mu, Rng& rng) {
  Eigen::VectorXd fit;
  draw_leaf_means(tree, L1, resid, sigma2, sigma_mu, rng, fit);
}

}  // namespace semibart
