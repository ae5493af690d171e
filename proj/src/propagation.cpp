#include "propagation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace ctxrec {

namespace instrument {
std::atomic<uint64_t> propagation_passes{0};
}

const char* normalization_name(Normalization n) {
  switch (n) {
    case Normalization::sqrt_single_side: return "sqrt";
    case Normalization::symmetric: return "sym";
    case Normalization::l1: return "l1";
  }
  return "?";
}

Normalization normalization_from_name(const std::string& s) {
  if (s == "sqrt") return Normalization::sqrt_single_side;
  if (s == "sym") return Normalization::symmetric;
  if (s == "l1") return Normalization::l1;
  fail(Errc::invalid_argument, "unknown normalization: " + s);
}

LayerWeights LayerWeights::uniform(uint32_t layers) {
  LayerWeights w;
  w.alphas.assign(layers + 1, 1.0 / static_cast<double>(layers + 1));
  return w;
}

void LayerWeights::validate() const {
  require(!alphas.empty(), Errc::invalid_argument, "layer weights must not be empty");
  double sum = 0.0;
  for (double a : alphas) {
    require(a >= 0.0, Errc::invalid_argument, "layer weights must be non-negative");
    sum += a;
  }
  require(std::abs(sum - 1.0) <= 1e-9, Errc::invalid_argument, "layer weights must sum to 1");
}

ContextCatalog build_context_catalog(const AttributedGraph& graph, bool use_context) {
  ContextCatalog cat;
  cat.edge_node.assign(graph.edge_count(), ContextCatalog::kNoContext);
  if (!use_context) return cat;
  std::map<std::vector<uint32_t>, uint32_t> index;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    std::vector<uint32_t> combo = graph.edge_contexts[e];
    if (combo.empty()) continue;
    std::sort(combo.begin(), combo.end());
    auto [it, inserted] = index.emplace(combo, cat.size());
    if (inserted) cat.combos.push_back(it->first);
    cat.edge_node[e] = it->second;
  }
  return cat;
}

Mat compute_context_rows(const ContextCatalog& catalog, const EmbeddingTable& context_table) {
  Mat rows(catalog.size(), context_table.dim);
  for (uint32_t c = 0; c < catalog.size(); ++c) {
    std::vector<double> v = pool_context(catalog.combos[c], context_table);
    std::copy(v.begin(), v.end(), rows.row(c));
  }
  return rows;
}

Mat compute_edge_context_vectors(const AttributedGraph& graph,
                                 const EmbeddingTable& context_table, bool use_context) {
  Mat vecs(graph.edge_count(), context_table.dim);
  if (!use_context) return vecs;
  for (std::size_t e = 0; e < graph.edge_count(); ++e) {
    std::vector<double> v = pool_context(graph.edge_contexts[e], context_table);
    std::copy(v.begin(), v.end(), vecs.row(e));
  }
  return vecs;
}

namespace {

// Message coefficients for one edge (u, i), by variant.
struct EdgeCoef {
  double user_side;  // applied in the update of p_u
  double item_side;  // applied in the update of q_i
};

EdgeCoef edge_coefficient(std::size_t deg_u, std::size_t deg_i, Normalization norm) {
  // Degrees are >= 1 whenever an edge exists, but guard anyway.
  if (deg_u == 0 || deg_i == 0) return {0.0, 0.0};
  const double du = static_cast<double>(deg_u);
  const double di = static_cast<double>(deg_i);
  switch (norm) {
    case Normalization::sqrt_single_side:
      return {1.0 / std::sqrt(du), 1.0 / std::sqrt(di)};
    case Normalization::symmetric: {
      double c = 1.0 / (std::sqrt(du) * std::sqrt(di));
      return {c, c};
    }
    case Normalization::l1:
      return {1.0 / du, 1.0 / di};
  }
  return {0.0, 0.0};
}

}  // namespace

Csr build_normalized_adjacency(const AttributedGraph& graph, const ContextCatalog& catalog,
                               Normalization norm) {
  require(catalog.edge_node.size() == graph.edge_count(), Errc::contract,
          "context assignment does not cover every edge");
  const uint32_t n = graph.n_users;
  const uint32_t m = graph.n_items;
  const uint32_t n_total = n + m + catalog.size();

  std::vector<std::tuple<uint32_t, uint32_t, double>> triplets;
  triplets.reserve(graph.edge_count() * 4 + catalog.size());
  for (uint32_t u = 0; u < n; ++u) {
    for (const auto& [i, e] : graph.user_adj[u]) {
      EdgeCoef c = edge_coefficient(graph.user_adj[u].size(), graph.item_adj[i].size(), norm);
      triplets.emplace_back(u, n + i, c.user_side);
      triplets.emplace_back(n + i, u, c.item_side);
      uint32_t ctx = catalog.edge_node[e];
      if (ctx != ContextCatalog::kNoContext) {
        triplets.emplace_back(u, n + m + ctx, c.user_side);
        triplets.emplace_back(n + i, n + m + ctx, c.item_side);
      }
    }
  }
  // Identity context rows: context embeddings are unchanged by every layer.
  for (uint32_t c = 0; c < catalog.size(); ++c)
    triplets.emplace_back(n + m + c, n + m + c, 1.0);
  return Csr::from_triplets(n_total, std::move(triplets));
}

std::vector<NodeEmbeddings> propagate_edge_list(const NodeEmbeddings& init,
                                                const AttributedGraph& graph,
                                                const Mat& edge_context_vectors, uint32_t layers,
                                                Normalization norm) {
  require(edge_context_vectors.rows() == graph.edge_count(), Errc::contract,
          "edge context vectors do not cover every edge");
  instrument::propagation_passes.fetch_add(1, std::memory_order_relaxed);

  const std::size_t d = init.users.cols();
  std::vector<NodeEmbeddings> out;
  out.reserve(layers + 1);
  out.push_back({init.users, init.items});
  for (uint32_t l = 0; l < layers; ++l) {
    const NodeEmbeddings& prev = out.back();
    NodeEmbeddings next;
    next.users = Mat(graph.n_users, d);
    next.items = Mat(graph.n_items, d);
    for (uint32_t u = 0; u < graph.n_users; ++u) {
      double* dst = next.users.row(u);
      for (const auto& [i, e] : graph.user_adj[u]) {
        EdgeCoef c = edge_coefficient(graph.user_adj[u].size(), graph.item_adj[i].size(), norm);
        const double* q = prev.items.row(i);
        const double* v = edge_context_vectors.row(e);
        for (std::size_t j = 0; j < d; ++j) dst[j] += c.user_side * (q[j] + v[j]);
      }
    }
    for (uint32_t i = 0; i < graph.n_items; ++i) {
      double* dst = next.items.row(i);
      for (const auto& [u, e] : graph.item_adj[i]) {
        EdgeCoef c = edge_coefficient(graph.user_adj[u].size(), graph.item_adj[i].size(), norm);
        const double* p = prev.users.row(u);
        const double* v = edge_context_vectors.row(e);
        for (std::size_t j = 0; j < d; ++j) dst[j] += c.item_side * (p[j] + v[j]);
      }
    }
    out.push_back(std::move(next));
  }
  return out;
}

Mat assemble_initial_matrix(const NodeEmbeddings& init, const Mat& context_rows) {
  const std::size_t d = init.users.cols();
  require(context_rows.empty() || context_rows.cols() == d, Errc::contract,
          "context rows dimension mismatch");
  Mat e0(init.users.rows() + init.items.rows() + context_rows.rows(), d);
  std::size_t r = 0;
  for (std::size_t u = 0; u < init.users.rows(); ++u, ++r)
    std::copy(init.users.row(u), init.users.row(u) + d, e0.row(r));
  for (std::size_t i = 0; i < init.items.rows(); ++i, ++r)
    std::copy(init.items.row(i), init.items.row(i) + d, e0.row(r));
  for (std::size_t c = 0; c < context_rows.rows(); ++c, ++r)
    std::copy(context_rows.row(c), context_rows.row(c) + d, e0.row(r));
  return e0;
}

std::vector<Mat> propagate_matrix(const Csr& adjacency, const Mat& initial, uint32_t layers) {
  require(adjacency.n == initial.rows(), Errc::contract,
          "adjacency and embedding matrix sizes differ");
  instrument::propagation_passes.fetch_add(1, std::memory_order_relaxed);
  std::vector<Mat> out;
  out.reserve(layers + 1);
  out.push_back(initial);
  for (uint32_t l = 0; l < layers; ++l) out.push_back(adjacency.multiply(out.back()));
  return out;
}

PropagatedEmbeddings combine_layers(const std::vector<Mat>& layers, uint32_t n_users,
                                    uint32_t n_items, const LayerWeights& weights) {
  require(layers.size() == weights.alphas.size(), Errc::invalid_argument,
          "layer count does not match layer weights");
  weights.validate();
  const std::size_t d = layers[0].cols();
  PropagatedEmbeddings out;
  out.users = Mat(n_users, d);
  out.items = Mat(n_items, d);
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const double a = weights.alphas[l];
    for (uint32_t u = 0; u < n_users; ++u) axpy(a, {layers[l].row(u), d}, out.users.row_span(u));
    for (uint32_t i = 0; i < n_items; ++i)
      axpy(a, {layers[l].row(n_users + i), d}, out.items.row_span(i));
  }
  return out;
}

PropagatedEmbeddings combine_layers(const std::vector<NodeEmbeddings>& layers,
                                    const LayerWeights& weights) {
  require(layers.size() == weights.alphas.size(), Errc::invalid_argument,
          "layer count does not match layer weights");
  weights.validate();
  PropagatedEmbeddings out;
  out.users = Mat(layers[0].users.rows(), layers[0].users.cols());
  out.items = Mat(layers[0].items.rows(), layers[0].items.cols());
  for (std::size_t l = 0; l < layers.size(); ++l) {
    out.users.add_scaled(layers[l].users, weights.alphas[l]);
    out.items.add_scaled(layers[l].items, weights.alphas[l]);
  }
  return out;
}

}  // namespace ctxrec
