#pragma once

#include <set>
#include <span>
#include <string>
#include <vector>

#include "actctx/prior/compatibility.hpp"
#include "actctx/prior/embedding.hpp"

namespace actctx {

// Alternative compatibility sources used for ablations. All return
// row-normalized tables with zero fixed-class rows and zero diagonal.

/// Every movable row (null included) spreads its mass evenly over the
/// other classes.
CompatibilityTable uniform_prior(const Vocabulary& vocab);

/// phi(i, j) proportional to max(0, cosine(i, j)). The null row stays zero
/// unless the embedding table carries a "null" vector. Throws on classes
/// without an embedding.
CompatibilityTable embed_prior(const Vocabulary& vocab, const EmbeddingTable& emb);

/// phi(i, j) proportional to the number of records in which i and j are
/// both present. Each record is the set of classes found together in one
/// static scene neighborhood.
CompatibilityTable cooc_prior(std::span<const std::set<ClassId>> colocation_records,
                              const Vocabulary& vocab);

/// phi(i, j) proportional to how often an interaction with i is directly
/// followed by an interaction with j in a labeled clip sequence. Self
/// transitions are ignored.
CompatibilityTable intseq_prior(std::span<const std::vector<ClassId>> sequences,
                                const Vocabulary& vocab);

}  // namespace actctx
