#pragma once

#include <optional>

#include "decoder.hpp"
#include "propagation.hpp"

namespace ctxrec {

struct TrainConfig {
  uint32_t dim = 64;
  uint32_t layers = 2;
  std::optional<std::vector<double>> alphas;  // default: uniform over layers+1
  Normalization norm = Normalization::sqrt_single_side;
  DecoderKind decoder = DecoderKind::fm;
  bool use_context_graph = true;  // false: plain user-item propagation
  bool use_bias = false;
  double learning_rate = 1e-3;
  uint32_t batch_size = 2048;
  uint32_t negatives_per_positive = 4;
  double l2_lambda = 0.0;
  uint32_t epochs = 20;
  uint64_t seed = 1;
  double init_scale = 0.01;
  uint32_t eval_every = 0;  // 0 = no in-training evaluation
  std::vector<uint32_t> eval_ks = {10, 50};

  LayerWeights layer_weights() const;
  void validate() const;
  std::string to_json() const;  // canonical: keys sorted, no whitespace
  static TrainConfig from_json(const std::string& json);
};

struct ModelState {
  TrainConfig cfg;
  EmbeddingSet tables;
  Biases biases;
  uint64_t run_id = 0;
  uint64_t dataset_id = 0;
};

// Graph-side structures fixed for the lifetime of a training or inference
// session; adjacency values depend on structure and normalization only.
struct TrainingGraph {
  AttributedGraph graph;
  ContextCatalog catalog;
  Csr adjacency;
  Csr adjoint;  // transpose of adjacency
  std::vector<std::vector<uint32_t>> consumed;  // per user, sorted train item ids
};

TrainingGraph build_training_graph(const InteractionLog& train, bool use_context,
                                   Normalization norm);

ModelState init_model(const TrainConfig& cfg, const Dataset& ds);

// Encoder + propagation + layer combination, the one inference path shared by
// the trainer, the evaluator and precompute-before-serving.
PropagatedEmbeddings compute_embeddings(const ModelState& model, const Dataset& ds,
                                        const TrainingGraph& tg);

uint64_t compute_run_id(uint64_t dataset_id, const TrainConfig& cfg);

}  // namespace ctxrec
