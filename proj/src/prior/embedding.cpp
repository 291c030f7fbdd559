#include "actctx/prior/embedding.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace actctx {

EmbeddingTable::EmbeddingTable(std::vector<std::string> names, Eigen::MatrixXd vectors)
    : names_(std::move(names)), vectors_(std::move(vectors)) {
  if (static_cast<Eigen::Index>(names_.size()) != vectors_.cols()) {
    throw ValidationError("embedding table: name count does not match vector count");
  }
  for (Eigen::Index c = 0; c < vectors_.cols(); ++c) {
    const double norm = vectors_.col(c).norm();
    if (!(norm > 0) || !std::isfinite(norm)) {
      throw ValidationError("embedding for '" + names_[c] + "' has zero or non-finite norm");
    }
    vectors_.col(c) /= norm;
    if (!index_.emplace(names_[c], c).second) {
      throw ValidationError("duplicate embedding for '" + names_[c] + "'");
    }
  }
}

std::optional<Eigen::Index> EmbeddingTable::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Eigen::VectorXd EmbeddingTable::vector(const std::string& name) const {
  if (auto i = find(name)) return vectors_.col(*i);
  throw ValidationError("no embedding for class '" + name + "'");
}

double EmbeddingTable::similarity(const std::string& a, const std::string& b) const {
  return vector(a).dot(vector(b));
}

EmbeddingTable read_embeddings(std::istream& in) {
  std::vector<std::string> names;
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream ss(line);
    std::string name;
    if (!(ss >> name)) continue;
    std::vector<double> values;
    std::string token;
    while (ss >> token) {
      try {
        std::size_t used = 0;
        values.push_back(std::stod(token, &used));
        if (used != token.size()) throw std::invalid_argument(token);
      } catch (const std::exception&) {
        throw ParseError("embeddings line " + std::to_string(line_no) + ": bad number '" + token + "'");
      }
    }
    if (values.empty()) throw ParseError("embeddings line " + std::to_string(line_no) + ": no values");
    if (!rows.empty() && values.size() != rows.front().size()) {
      throw ParseError("embeddings line " + std::to_string(line_no) + ": dimension mismatch");
    }
    names.push_back(std::move(name));
    rows.push_back(std::move(values));
  }
  const Eigen::Index dim = rows.empty() ? 0 : static_cast<Eigen::Index>(rows.front().size());
  Eigen::MatrixXd vectors(dim, static_cast<Eigen::Index>(rows.size()));
  for (std::size_t c = 0; c < rows.size(); ++c) {
    vectors.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXd>(rows[c].data(), dim);
  }
  return EmbeddingTable(std::move(names), std::move(vectors));
}

EmbeddingTable read_embeddings(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open embeddings " + path.string());
  return read_embeddings(in);
}

CompatibilityTable map_vocabulary(const CompatibilityTable& video_table,
                                  const EmbeddingTable& video_emb, const Vocabulary& env_vocab,
                                  const EmbeddingTable& env_emb, double similarity_threshold,
                                  MappingReport* report) {
  if (!(similarity_threshold > 0 && similarity_threshold < 1)) {
    throw ValidationError("similarity threshold must lie in (0,1)");
  }
  const Vocabulary& video_vocab = video_table.vocabulary();
  const int n_env = env_vocab.size();
  const int n_video = video_vocab.size();

  // neighbors(m, i) = sigma(m, i) when video class i is a neighbor of env class m.
  Eigen::MatrixXd neighbors = Eigen::MatrixXd::Zero(n_env, n_video);
  for (ClassId m = 0; m < n_env; ++m) {
    const auto env_col = env_emb.find(env_vocab.name(m));
    if (!env_col) {
      if (report) report->missing_embedding.push_back(env_vocab.name(m));
      continue;
    }
    for (ClassId i = 0; i < n_video; ++i) {
      const auto video_col = video_emb.find(video_vocab.name(i));
      if (!video_col) continue;
      const double sigma = env_emb.vectors().col(*env_col).dot(video_emb.vectors().col(*video_col));
      if (sigma >= similarity_threshold) neighbors(m, i) = sigma;
    }
    if (report && env_emb.find(env_vocab.name(m)) && neighbors.row(m).isZero(0)) {
      report->no_neighbors.push_back(env_vocab.name(m));
    }
  }

  // Row side additionally carries null -> null.
  Eigen::MatrixXd row_neighbors = Eigen::MatrixXd::Zero(n_env + 1, n_video + 1);
  row_neighbors.topLeftCorner(n_env, n_video) = neighbors;
  row_neighbors(n_env, n_video) = 1.0;

  Eigen::MatrixXd mapped = row_neighbors * video_table.scores() * neighbors.transpose();
  CompatibilityTable table(env_vocab, std::move(mapped));
  table.normalize_rows();
  return table;
}

}  // namespace actctx
