#include "semibart/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "semibart/io.hpp"

namespace semibart {

Dataset make_dataset(Eigen::MatrixXd X, Eigen::VectorXd y,
                     std::vector<std::string> column_names, OutcomeKind kind) {
  if (y.size() != X.rows()) throw std::runtime_error("dataset: outcome length does not match row count");
  if (X.rows() < 2) throw std::runtime_error("dataset: need at least 2 rows");
  if (X.cols() < 1) throw std::runtime_error("dataset: need at least 1 covariate column");
  if (static_cast<Eigen::Index>(column_names.size()) != X.cols())
    throw std::runtime_error("dataset: column name count does not match covariate count");
  if (!X.allFinite()) throw std::runtime_error("dataset: covariates contain non-finite values");
  if (!y.allFinite()) throw std::runtime_error("dataset: outcome contains non-finite values");
  if (kind == OutcomeKind::binary) {
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      if (y[i] != 0.0 && y[i] != 1.0)
        throw std::runtime_error("dataset: binary outcome has value " + std::to_string(y[i]) +
                                 " at row " + std::to_string(i + 1) + "; expected 0 or 1");
    }
  }
  std::set<std::string> seen;
  for (const auto& name : column_names) {
    if (!seen.insert(name).second)
      throw std::runtime_error("dataset: duplicate column name \"" + name + "\"");
  }
  return Dataset{std::move(y), std::move(X), std::move(column_names), kind};
}

Dataset load_csv(const std::string& path, const std::string& outcome_column, OutcomeKind kind) {
  return dataset_from_table(read_table(path), path, outcome_column, kind);
}

Dataset dataset_from_table(const Table& t, const std::string& source,
                           const std::string& outcome_column, OutcomeKind kind) {
  const auto it = std::find(t.header.begin(), t.header.end(), outcome_column);
  if (it == t.header.end())
    throw std::runtime_error(source + ": outcome column \"" + outcome_column + "\" not found");
  const Eigen::Index yc = it - t.header.begin();

  const Eigen::Index n = t.values.rows();
  const Eigen::Index p = t.values.cols() - 1;
  Eigen::MatrixXd X(n, p);
  std::vector<std::string> names;
  names.reserve(static_cast<std::size_t>(p));
  Eigen::Index out = 0;
  for (Eigen::Index c = 0; c < t.values.cols(); ++c) {
    if (c == yc) continue;
    X.col(out++) = t.values.col(c);
    names.push_back(t.header[static_cast<std::size_t>(c)]);
  }
  return make_dataset(std::move(X), t.values.col(yc), std::move(names), kind);
}

OutcomeKind detect_outcome_kind(const Eigen::VectorXd& y) {
  for (Eigen::Index i = 0; i < y.size(); ++i)
    if (y[i] != 0.0 && y[i] != 1.0) return OutcomeKind::continuous;
  return OutcomeKind::binary;
}

void LinearTermSpec::validate(Eigen::Index p) const {
  if (terms.empty()) throw std::runtime_error("linear terms: empty term list");
  if (terms.front().size() != 1)
    throw std::runtime_error("linear terms: first term must be the treatment main effect (a single column)");
  std::set<std::vector<int>> seen;
  for (const auto& term : terms) {
    if (term.empty() || term.size() > 3)
      throw std::runtime_error("linear terms: each term must use 1 to 3 columns");
    std::set<int> cols;
    for (int c : term) {
      if (c < 0 || c >= p)
        throw std::runtime_error("linear terms: column index " + std::to_string(c) + " out of range");
      if (!cols.insert(c).second)
        throw std::runtime_error("linear terms: repeated column inside one term");
    }
    std::vector<int> key(cols.begin(), cols.end());
    if (!seen.insert(key).second) throw std::runtime_error("linear terms: duplicate term");
  }
}

LinearTermSpec parse_linear_terms(const std::string& text,
                                  const std::vector<std::string>& column_names) {
  auto column_of = [&](const std::string& name) -> int {
    const auto it = std::find(column_names.begin(), column_names.end(), name);
    if (it == column_names.end())
      throw std::runtime_error("linear terms: unknown column \"" + name + "\"");
    return static_cast<int>(it - column_names.begin());
  };

  LinearTermSpec spec;
  std::stringstream terms_in(text);
  std::string term_text;
  while (std::getline(terms_in, term_text, ',')) {
    std::vector<int> term;
    std::stringstream cols_in(term_text);
    std::string col;
    while (std::getline(cols_in, col, ':')) {
      col.erase(0, col.find_first_not_of(" \t"));
      col.erase(col.find_last_not_of(" \t") + 1);
      if (col.empty()) throw std::runtime_error("linear terms: empty column name in \"" + term_text + "\"");
      term.push_back(column_of(col));
    }
    if (term.empty()) throw std::runtime_error("linear terms: empty term in \"" + text + "\"");
    spec.terms.push_back(std::move(term));
  }
  spec.validate(static_cast<Eigen::Index>(column_names.size()));
  return spec;
}

std::vector<std::string> term_names(const LinearTermSpec& spec,
                                    const std::vector<std::string>& column_names) {
  std::vector<std::string> names;
  names.reserve(spec.terms.size());
  for (const auto& term : spec.terms) {
    std::string name;
    for (std::size_t i = 0; i < term.size(); ++i) {
      if (i) name += ":";
      name += column_names[static_cast<std::size_t>(term[i])];
    }
    names.push_back(name);
  }
  return names;
}

DesignSplit build_design(const Dataset& ds, const LinearTermSpec& spec) {
  spec.validate(ds.p());
  const int treatment = spec.terms.front().front();

  std::set<int> main_effects;
  for (const auto& term : spec.terms)
    if (term.size() == 1) main_effects.insert(term.front());

  // Modifiers: columns sharing a term with the treatment.
  std::set<int> modifiers;
  for (const auto& term : spec.terms) {
    if (term.size() < 2) continue;
    if (std::find(term.begin(), term.end(), treatment) == term.end()) continue;
    for (int c : term)
      if (c != treatment) modifiers.insert(c);
  }

  DesignSplit out;
  out.treatment_column = treatment;
  out.term_names = term_names(spec, ds.column_names);

  std::vector<int> keep;
  for (int c = 0; c < static_cast<int>(ds.p()); ++c) {
    if (c == treatment) continue;
    if (modifiers.count(c) && main_effects.count(c)) continue;
    keep.push_back(c);
  }
  if (keep.empty()) throw std::runtime_error("design split: no covariates left for the tree component");

  out.L1.resize(ds.n(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j) {
    out.L1.col(static_cast<Eigen::Index>(j)) = ds.X.col(keep[j]);
    out.l1_columns.push_back(keep[j]);
    out.l1_names.push_back(ds.column_names[static_cast<std::size_t>(keep[j])]);
  }

  out.L2.resize(ds.n(), static_cast<Eigen::Index>(spec.terms.size()));
  for (std::size_t t = 0; t < spec.terms.size(); ++t) {
    Eigen::VectorXd col = Eigen::VectorXd::Ones(ds.n());
    for (int c : spec.terms[t]) col = col.cwiseProduct(ds.X.col(c));
    out.L2.col(static_cast<Eigen::Index>(t)) = col;
  }
  return out;
}

std::pair<Dataset, Standardization> standardize(const Dataset& ds) {
  if (ds.outcome_kind == OutcomeKind::binary) return {ds, Standardization{0.0, 1.0, false}};

  const double ymin = ds.y.minCoeff();
  const double ymax = ds.y.maxCoeff();
  if (ymax == ymin) throw std::runtime_error("standardize: degenerate outcome (all values identical)");
  Standardization st{0.5 * (ymin + ymax), ymax - ymin, true};
  Dataset out = ds;
  out.y = (ds.y.array() - st.center) / st.scale;
  return {std::move(out), st};
}

}  // namespace semibart
