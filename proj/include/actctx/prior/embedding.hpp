#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Core>

#include "actctx/prior/compatibility.hpp"

namespace actctx {

/// Word vectors keyed by class name, stored unit-normalized as matrix columns
/// so dot products are cosine similarities.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  EmbeddingTable(std::vector<std::string> names, Eigen::MatrixXd vectors);

  int dim() const { return static_cast<int>(vectors_.rows()); }
  int size() const { return static_cast<int>(vectors_.cols()); }
  const std::vector<std::string>& names() const { return names_; }
  const Eigen::MatrixXd& vectors() const { return vectors_; }

  std::optional<Eigen::Index> find(const std::string& name) const;
  bool contains(const std::string& name) const { return find(name).has_value(); }
  /// Throws ValidationError for names without a vector.
  Eigen::VectorXd vector(const std::string& name) const;
  double similarity(const std::string& a, const std::string& b) const;

 private:
  std::vector<std::string> names_;
  Eigen::MatrixXd vectors_;
  std::unordered_map<std::string, Eigen::Index> index_;
};

/// One line per class: `<class> <v1> ... <vd>`.
EmbeddingTable read_embeddings(std::istream& in);
EmbeddingTable read_embeddings(const std::filesystem::path& path);

struct MappingReport {
  std::vector<std::string> missing_embedding;  // environment classes without a vector
  std::vector<std::string> no_neighbors;       // classes with nothing above threshold
};

/// Re-expresses a video-vocabulary table over the environment vocabulary:
///   S(m, n) = sum_{i in N(m)} sum_{j in N(n)} sigma(m,i) sigma(n,j) phi(i, j)
/// with N(o) the video classes whose similarity to o is at least
/// `similarity_threshold`; the null token maps to the null token with weight 1.
/// The result is row-normalized. Classes without neighbors keep zero rows.
CompatibilityTable map_vocabulary(const CompatibilityTable& video_table,
                                  const EmbeddingTable& video_emb, const Vocabulary& env_vocab,
                                  const EmbeddingTable& env_emb, double similarity_threshold = 0.6,
                                  MappingReport* report = nullptr);

}  // namespace actctx
