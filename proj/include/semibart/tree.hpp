#pragma once

#include <Eigen/Dense>

#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "semibart/rng.hpp"

namespace semibart {

// Regularization prior over tree shapes: a node at depth d splits with
// probability alpha * (1 + d)^(-beta). alpha = 0 freezes every tree at a lone
// root leaf, which reduces the sum of trees to a plain random intercept.
struct TreePrior {
  double alpha = 0.95;
  double beta = 2.0;
  double sigma_mu = 0.1;  // leaf-mean prior sd
  int n_min = 5;          // fewest rows a leaf may hold

  double split_prob(int depth) const;
};

enum class MoveKind { grow = 0, prune = 1, change = 2, swap = 3 };

// Mixture over move kinds; grow is forced while the tree is a lone root leaf.
double move_prob(bool single_leaf, MoveKind kind);
MoveKind pick_move(bool single_leaf, Rng& rng);

struct TreeNode {
  int split_var = -1;  // -1 marks a leaf
  double split_cut = 0.0;
  double mu = 0.0;     // leaf mean; internal nodes ignore it
  std::unique_ptr<TreeNode> left, right;

  bool is_leaf() const { return !left; }
};

class Tree {
 public:
  Tree() : root_(std::make_unique<TreeNode>()) {}
  Tree(const Tree& other);
  Tree& operator=(const Tree& other);
  Tree(Tree&&) = default;
  Tree& operator=(Tree&&) = default;

  TreeNode& root() { return *root_; }
  const TreeNode& root() const { return *root_; }

  int leaf_count() const;
  int internal_count() const;

  // Rows route left when x[split_var] < split_cut.
  double predict_row(const Eigen::MatrixXd& X, Eigen::Index i) const;
  void route(const Eigen::MatrixXd& X, std::vector<TreeNode*>& leaf_of);

  // Indented text form, one node per line; leaf means at full precision.
  std::string dump() const;

 private:
  std::unique_ptr<TreeNode> root_;
};

struct Forest {
  std::vector<Tree> trees;

  Eigen::VectorXd predict(const Eigen::MatrixXd& X) const;
};

// Log of integral prod_i N(r_i; mu, sigma2) * N(mu; 0, sigma_mu^2) dmu for the
// residuals landing on one leaf.
double log_marginal_leaf(const Eigen::VectorXd& resid, double sigma2, double sigma_mu);

// Same quantity from sufficient statistics (count, sum, sum of squares).
double log_marginal_suff(double k, double s, double s2, double sigma2, double sigma_mu);

struct MoveResult {
  bool valid = false;     // a concrete candidate was formed
  bool accepted = false;
  double log_alpha = -std::numeric_limits<double>::infinity();
};

// One Metropolis-Hastings step of the requested kind against the integrated
// leaf-mean likelihood. The tree is mutated only on acceptance; candidates
// that would leave any leaf under prior.n_min rows are rejected outright.
MoveResult apply_move(Tree& tree, MoveKind kind, const Eigen::MatrixXd& L1,
                      const Eigen::VectorXd& resid, double sigma2,
                      const TreePrior& prior, Rng& rng);

// Gibbs redraw of every leaf mean from its conjugate normal conditional.
// Requires each leaf to hold at least one row.
void draw_leaf_means(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, double sigma_mu, Rng& rng);

// As above, additionally writing the per-row fitted values.
void draw_leaf_means(Tree& tree, const Eigen::MatrixXd& L1, const Eigen::VectorXd& resid,
                     double sigma2, double sigma_mu, Rng& rng, Eigen::VectorXd& fit_out);

}  // namespace semibart
