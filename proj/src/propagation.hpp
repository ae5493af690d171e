#pragma once

#include <atomic>

#include "csr.hpp"
#include "dataset.hpp"
#include "encoder.hpp"

namespace ctxrec {

// Per-row coefficient applied to each neighbor message.
//   sqrt_single_side: 1/sqrt(|N_u|)            (resp. 1/sqrt(|N_i|))
//   symmetric:        1/(sqrt(|N_u|)*sqrt(|N_i|))
//   l1:               1/|N_u|                  (resp. 1/|N_i|)
// Degree-0 nodes get coefficient 0 and stay at the zero vector.
enum class Normalization { sqrt_single_side, symmetric, l1 };

const char* normalization_name(Normalization n);
Normalization normalization_from_name(const std::string& s);

struct LayerWeights {
  std::vector<double> alphas;  // alpha_0 .. alpha_L

  static LayerWeights uniform(uint32_t layers);
  uint32_t layers() const { return static_cast<uint32_t>(alphas.size()) - 1; }
  void validate() const;  // alpha_l >= 0, sum = 1 within 1e-9
};

// One context node per distinct combination of context feature values seen on
// training edges. Edges with no context features map to no node at all.
struct ContextCatalog {
  static constexpr uint32_t kNoContext = UINT32_MAX;
  std::vector<std::vector<uint32_t>> combos;  // node -> sorted context feature ids
  std::vector<uint32_t> edge_node;            // edge -> context node or kNoContext

  uint32_t size() const { return static_cast<uint32_t>(combos.size()); }
};

// use_context = false strips all context from the graph (plain user-item
// propagation); the decoder is unaffected.
ContextCatalog build_context_catalog(const AttributedGraph& graph, bool use_context);

// Pooled vector r_c for every context node (mean of its feature embeddings).
Mat compute_context_rows(const ContextCatalog& catalog, const EmbeddingTable& context_table);

// Pooled vector per edge, for the edge-list propagation form.
Mat compute_edge_context_vectors(const AttributedGraph& graph, const EmbeddingTable& context_table,
                                 bool use_context);

// Normalized adjacency over user, item and context nodes, in that block
// order, shape (N+M+L_ctx)^2. Context rows are identity rows so context
// embeddings pass through every layer unchanged; multi-edges accumulate.
Csr build_normalized_adjacency(const AttributedGraph& graph, const ContextCatalog& catalog,
                               Normalization norm);

struct PropagatedEmbeddings {
  Mat users;  // N x D
  Mat items;  // M x D
};

// Reference form: synchronous neighborhood aggregation per layer, returning
// embeddings for layers 0..L.
std::vector<NodeEmbeddings> propagate_edge_list(const NodeEmbeddings& init,
                                                const AttributedGraph& graph,
                                                const Mat& edge_context_vectors, uint32_t layers,
                                                Normalization norm);

// E0 = [users; items; context rows].
Mat assemble_initial_matrix(const NodeEmbeddings& init, const Mat& context_rows);

// Production form: E^(l) = A_hat * E^(l-1), returning E^(0)..E^(L).
std::vector<Mat> propagate_matrix(const Csr& adjacency, const Mat& initial, uint32_t layers);

PropagatedEmbeddings combine_layers(const std::vector<Mat>& layers, uint32_t n_users,
                                    uint32_t n_items, const LayerWeights& weights);
PropagatedEmbeddings combine_layers(const std::vector<NodeEmbeddings>& layers,
                                    const LayerWeights& weights);

namespace instrument {
// Incremented by every propagation pass; lets tests assert that the serving
// path never propagates.
extern std::atomic<uint64_t> propagation_passes;
}  // namespace instrument

}  // namespace ctxrec
