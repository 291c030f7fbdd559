#include "actctx/prior/baseline_priors.hpp"

#include <algorithm>

namespace actctx {

CompatibilityTable uniform_prior(const Vocabulary& vocab) {
  CompatibilityTable table(vocab);
  auto& scores = table.mutable_scores();
  for (ClassId r = 0; r <= vocab.size(); ++r) {
    if (!vocab.movable(r)) continue;
    scores.row(r).setOnes();
    if (r < vocab.size()) scores(r, r) = 0;
  }
  table.normalize_rows();
  return table;
}

CompatibilityTable embed_prior(const Vocabulary& vocab, const EmbeddingTable& emb) {
  CompatibilityTable table(vocab);
  auto& scores = table.mutable_scores();
  Eigen::MatrixXd vectors(emb.dim(), vocab.size());
  for (ClassId c = 0; c < vocab.size(); ++c) vectors.col(c) = emb.vector(vocab.name(c));
  const Eigen::MatrixXd cosine = (vectors.transpose() * vectors).cwiseMax(0.0);
  for (ClassId r = 0; r < vocab.size(); ++r) {
    if (vocab.movable(r)) scores.row(r) = cosine.row(r);
  }
  if (const auto null_col = emb.find(std::string(Vocabulary::kNullName))) {
    scores.row(vocab.null_id()) =
        (emb.vectors().col(*null_col).transpose() * vectors).cwiseMax(0.0);
  }
  table.normalize_rows();
  return table;
}

CompatibilityTable cooc_prior(std::span<const std::set<ClassId>> colocation_records,
                              const Vocabulary& vocab) {
  CompatibilityTable table(vocab);
  auto& scores = table.mutable_scores();
  for (const auto& record : colocation_records) {
    for (ClassId a : record) {
      if (!vocab.movable(a)) continue;
      for (ClassId b : record) {
        if (a != b && b < vocab.size()) scores(a, b) += 1.0;
      }
    }
  }
  table.normalize_rows();
  return table;
}

CompatibilityTable intseq_prior(std::span<const std::vector<ClassId>> sequences,
                                const Vocabulary& vocab) {
  CompatibilityTable table(vocab);
  auto& scores = table.mutable_scores();
  for (const auto& seq : sequences) {
    for (std::size_t t = 1; t < seq.size(); ++t) {
      const ClassId from = seq[t - 1];
      const ClassId to = seq[t];
      if (from == to || !vocab.movable(from) || to >= vocab.size()) continue;
      scores(from, to) += 1.0;
    }
  }
  table.normalize_rows();
  return table;
}

}  // namespace actctx
