#include "actctx/prior/compatibility.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace actctx {

CompatibilityTable::CompatibilityTable(Vocabulary vocab)
    : vocab_(std::move(vocab)), scores_(Eigen::MatrixXd::Zero(vocab_.size() + 1, vocab_.size())) {}

CompatibilityTable::CompatibilityTable(Vocabulary vocab, Eigen::MatrixXd scores)
    : vocab_(std::move(vocab)), scores_(std::move(scores)) {
  if (scores_.rows() != vocab_.size() + 1 || scores_.cols() != vocab_.size()) {
    throw ValidationError("compatibility table shape does not match vocabulary");
  }
}

double CompatibilityTable::max_over_objects(ClassId aco) const {
  double best = 0;
  for (ClassId o = 0; o <= vocab_.size(); ++o) {
    if (vocab_.movable(o)) best = std::max(best, scores_(o, aco));
  }
  return best;
}

void CompatibilityTable::normalize_rows() {
  for (ClassId r = 0; r < scores_.rows(); ++r) {
    if (!vocab_.movable(r)) {
      scores_.row(r).setZero();
      continue;
    }
    if (r < scores_.cols()) scores_(r, r) = 0;
    const double total = scores_.row(r).sum();
    // Rows already normalized up to summation rounding are left bit-identical.
    if (total > 0 && std::abs(total - 1.0) > 8 * std::numeric_limits<double>::epsilon()) {
      scores_.row(r) /= total;
    }
  }
}

std::string CompatibilityTable::check_invariants(double tol) const {
  for (ClassId r = 0; r < scores_.rows(); ++r) {
    const auto row = scores_.row(r);
    if ((row.array() < 0).any()) return "negative score in row " + vocab_.name(r);
    if (!row.allFinite()) return "non-finite score in row " + vocab_.name(r);
    if (r < scores_.cols() && row(r) != 0) return "non-zero diagonal for " + vocab_.name(r);
    const double total = row.sum();
    if (!vocab_.movable(r) && total != 0) return "fixed class row " + vocab_.name(r) + " has mass";
    if (total != 0 && std::abs(total - 1.0) > tol) {
      return "row " + vocab_.name(r) + " sums to " + std::to_string(total);
    }
  }
  return {};
}

void write_table_csv(const CompatibilityTable& table, std::ostream& out) {
  const Vocabulary& vocab = table.vocabulary();
  out << "object,movable";
  for (const auto& n : vocab.names()) out << ',' << n;
  out << '\n';
  out << std::setprecision(17);
  for (ClassId r = 0; r <= vocab.size(); ++r) {
    out << vocab.name(r) << ',' << (vocab.movable(r) ? 1 : 0);
    for (ClassId c = 0; c < vocab.size(); ++c) out << ',' << table(r, c);
    out << '\n';
  }
}

void write_table_csv(const CompatibilityTable& table, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_table_csv(table, out);
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

CompatibilityTable read_table_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ParseError("compatibility table: missing header");
  auto header = split_csv(line);
  if (header.size() < 3 || header[0] != "object" || header[1] != "movable") {
    throw ParseError("compatibility table: bad header");
  }
  std::vector<std::string> names(header.begin() + 2, header.end());
  const auto n = static_cast<Eigen::Index>(names.size());
  std::vector<bool> movable(names.size(), false);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n + 1, n);
  for (Eigen::Index r = 0; r <= n; ++r) {
    if (!std::getline(in, line)) throw ParseError("compatibility table: truncated");
    auto cells = split_csv(line);
    if (static_cast<Eigen::Index>(cells.size()) != n + 2) {
      throw ParseError("compatibility table: row " + std::to_string(r) + " has wrong width");
    }
    const std::string expected = r < n ? names[r] : std::string(Vocabulary::kNullName);
    if (cells[0] != expected) throw ParseError("compatibility table: row order mismatch at " + cells[0]);
    if (r < n) movable[r] = cells[1] == "1";
    for (Eigen::Index c = 0; c < n; ++c) {
      try {
        scores(r, c) = std::stod(cells[c + 2]);
      } catch (const std::exception&) {
        throw ParseError("compatibility table: bad number '" + cells[c + 2] + "'");
      }
    }
  }
  return CompatibilityTable(Vocabulary(std::move(names), std::move(movable)), std::move(scores));
}

CompatibilityTable read_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open compatibility table " + path.string());
  return read_table_csv(in);
}

}  // namespace actctx
