#pragma once

#include <random>

#include "common.hpp"
#include "dataset.hpp"

namespace ctxrec {

struct EmbeddingTable {
  uint32_t rows = 0;
  uint32_t dim = 0;
  Mat values;
};

// One table per field group; all tables share the embedding size.
struct EmbeddingSet {
  EmbeddingTable user;
  EmbeddingTable item;
  EmbeddingTable context;
  uint32_t dim() const { return user.dim; }
};

struct NodeEmbeddings {
  Mat users;  // N x D
  Mat items;  // M x D
};

// Entries ~ Normal(0, scale^2), drawn deterministically from the rng.
EmbeddingTable init_embedding_table(uint32_t rows, uint32_t dim, double scale,
                                    std::mt19937_64& rng);

EmbeddingSet init_embeddings(uint32_t user_rows, uint32_t item_rows, uint32_t context_rows,
                             uint32_t dim, uint64_t seed, double scale);

// Arithmetic mean of the selected rows. Ids must be in range, non-empty and
// free of duplicates (multi-hot inputs are 0/1).
std::vector<double> pool_field(std::span<const uint32_t> feature_ids, const EmbeddingTable& table);

// Same as pool_field but an empty id list pools to the zero vector.
std::vector<double> pool_context(std::span<const uint32_t> feature_ids,
                                 const EmbeddingTable& table);

NodeEmbeddings encode_all(const std::vector<std::vector<uint32_t>>& user_features,
                          const std::vector<std::vector<uint32_t>>& item_features,
                          const EmbeddingSet& tables);

}  // namespace ctxrec
