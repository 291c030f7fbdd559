#pragma once

#include <filesystem>
#include <iosfwd>

#include <Eigen/Core>

#include "actctx/prior/vocabulary.hpp"

namespace actctx {

/// Dense activity-context scores phi(object, aco).
///
/// Rows index every class plus the null token (row `null_id()`); columns index
/// the real classes. Rows of fixed classes stay zero, the diagonal is zero,
/// and any row carrying mass sums to one.
class CompatibilityTable {
 public:
  CompatibilityTable() = default;
  explicit CompatibilityTable(Vocabulary vocab);
  CompatibilityTable(Vocabulary vocab, Eigen::MatrixXd scores);

  const Vocabulary& vocabulary() const { return vocab_; }
  const Eigen::MatrixXd& scores() const { return scores_; }
  Eigen::MatrixXd& mutable_scores() { return scores_; }

  double operator()(ClassId object, ClassId aco) const { return scores_(object, aco); }

  /// Largest score any movable class (null included) gives to `aco`.
  double max_over_objects(ClassId aco) const;

  /// Zeroes the diagonal and fixed rows, then scales rows with mass to sum 1.
  void normalize_rows();

  /// First violated invariant as text, or empty when the table is valid.
  std::string check_invariants(double tol = 1e-9) const;

 private:
  Vocabulary vocab_;
  Eigen::MatrixXd scores_;
};

/// CSV: header `object,movable,<class_1>,...,<class_n>`, then one row per
/// class and a final `null` row; scores use 17 significant digits.
void write_table_csv(const CompatibilityTable& table, std::ostream& out);
void write_table_csv(const CompatibilityTable& table, const std::filesystem::path& path);
CompatibilityTable read_table_csv(std::istream& in);
CompatibilityTable read_table_csv(const std::filesystem::path& path);

}  // namespace actctx
