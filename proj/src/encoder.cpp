#include "encoder.hpp"

#include <algorithm>

namespace ctxrec {

EmbeddingTable init_embedding_table(uint32_t rows, uint32_t dim, double scale,
                                    std::mt19937_64& rng) {
  require(dim >= 1, Errc::invalid_argument, "embedding dim must be >= 1");
  require(scale > 0.0, Errc::invalid_argument, "init scale must be > 0");
  EmbeddingTable t;
  t.rows = rows;
  t.dim = dim;
  t.values = Mat(rows, dim);
  std::normal_distribution<double> dist(0.0, scale);
  for (double& x : t.values.data()) x = dist(rng);
  return t;
}

EmbeddingSet init_embeddings(uint32_t user_rows, uint32_t item_rows, uint32_t context_rows,
                             uint32_t dim, uint64_t seed, double scale) {
  std::mt19937_64 rng(seed);
  EmbeddingSet s;
  s.user = init_embedding_table(user_rows, dim, scale, rng);
  s.item = init_embedding_table(item_rows, dim, scale, rng);
  s.context = init_embedding_table(context_rows, dim, scale, rng);
  return s;
}

namespace {

void check_ids(std::span<const uint32_t> ids, const EmbeddingTable& table) {
  for (std::size_t k = 0; k < ids.size(); ++k) {
    require(ids[k] < table.rows, Errc::unknown_id,
            "feature id " + std::to_string(ids[k]) + " out of range");
    for (std::size_t j = k + 1; j < ids.size(); ++j)
      require(ids[j] != ids[k], Errc::contract,
              "duplicate feature id " + std::to_string(ids[k]) + " in multi-hot input");
  }
}

std::vector<double> mean_rows(std::span<const uint32_t> ids, const EmbeddingTable& table) {
  std::vector<double> out(table.dim, 0.0);
  for (uint32_t id : ids) axpy(1.0, table.values.row_span(id), out);
  const double inv = 1.0 / static_cast<double>(ids.size());
  for (double& x : out) x *= inv;
  return out;
}

}  // namespace

std::vector<double> pool_field(std::span<const uint32_t> feature_ids,
                               const EmbeddingTable& table) {
  require(!feature_ids.empty(), Errc::contract, "pool_field: empty feature list");
  check_ids(feature_ids, table);
  return mean_rows(feature_ids, table);
}

std::vector<double> pool_context(std::span<const uint32_t> feature_ids,
                                 const EmbeddingTable& table) {
  if (feature_ids.empty()) return std::vector<double>(table.dim, 0.0);
  check_ids(feature_ids, table);
  return mean_rows(feature_ids, table);
}

NodeEmbeddings encode_all(const std::vector<std::vector<uint32_t>>& user_features,
                          const std::vector<std::vector<uint32_t>>& item_features,
                          const EmbeddingSet& tables) {
  NodeEmbeddings e;
  e.users = Mat(user_features.size(), tables.dim());
  e.items = Mat(item_features.size(), tables.dim());
  for (std::size_t u = 0; u < user_features.size(); ++u) {
    std::vector<double> v = pool_field(user_features[u], tables.user);
    std::copy(v.begin(), v.end(), e.users.row(u));
  }
  for (std::size_t i = 0; i < item_features.size(); ++i) {
    std::vector<double> v = pool_field(item_features[i], tables.item);
    std::copy(v.begin(), v.end(), e.items.row(i));
  }
  return e;
}

}  // namespace ctxrec
