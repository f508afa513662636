#pragma once

#include <Eigen/Dense>

#include <string>
#include <utility>
#include <vector>

namespace semibart {

enum class OutcomeKind { continuous, binary };

struct Dataset {
  Eigen::VectorXd y;
  Eigen::MatrixXd X;                       // n x p, all covariates incl. treatment
  std::vector<std::string> column_names;   // one per X column
  OutcomeKind outcome_kind = OutcomeKind::continuous;

  Eigen::Index n() const { return X.rows(); }
  Eigen::Index p() const { return X.cols(); }
};

// Validates shapes, finiteness, n >= 2, p >= 1, and 0/1 coding for binary y.
Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                     std::vector<std::string> column_names, OutcomeKind kind);

// Loads a strict numeric CSV; `outcome_column` becomes y, the rest becomes X
// in file order.
Dataset load_csv(const std::string& path, const std::string& outcome_column, OutcomeKind kind);

struct Table;
Dataset dataset_from_table(const Table& t, const std::string& source,
                           const std::string& outcome_column, OutcomeKind kind);

// Binary iff every outcome value is exactly 0 or 1.
OutcomeKind detect_outcome_kind(const Eigen::VectorXd& y);

// Linear predictor h(L2; psi) = sum_t psi_t * prod_{c in terms[t]} X(., c).
// The first term must be the treatment main effect (a single column); that
// convention is what identifies the treatment for the L1/L2 split.
struct LinearTermSpec {
  std::vector<std::vector<int>> terms;  // 1-3 column indices each

  void validate(Eigen::Index p) const;
};

// Parses "a,a:x1,x1" against the dataset's column names.
LinearTermSpec parse_linear_terms(const std::string& text,
                                  const std::vector<std::string>& column_names);

std::vector<std::string> term_names(const LinearTermSpec& spec,
                                    const std::vector<std::string>& column_names);

struct DesignSplit {
  Eigen::MatrixXd L1;                   // tree covariates
  Eigen::MatrixXd L2;                   // one column per linear term, no intercept
  std::vector<int> l1_columns;          // X column index behind each L1 column
  std::vector<std::string> l1_names;
  std::vector<std::string> term_names;
  int treatment_column = -1;            // X column of the treatment
};

// L1 drops the treatment column and any effect modifier that also has its own
// main-effect term; everything else stays available to the trees.
DesignSplit build_design(const Dataset& ds, const LinearTermSpec& spec);

// Midrange/range standardization: (y - center) / range maps y onto [-0.5, 0.5].
// Binary outcomes are left untouched (applied = false, identity transform).
struct Standardization {
  double center = 0.0;
  double scale = 1.0;   // identity when not applied
  bool applied = false;
};

std::pair<Dataset, Standardization> standardize(const Dataset& ds);

}  // namespace semibart
