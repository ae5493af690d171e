#include "model.hpp"

#include <algorithm>

#include <json.hpp>

namespace ctxrec {

LayerWeights TrainConfig::layer_weights() const {
  if (!alphas) return LayerWeights::uniform(layers);
  LayerWeights w{*alphas};
  require(w.alphas.size() == layers + 1, Errc::invalid_argument,
          "alphas must have layers + 1 entries");
  w.validate();
  return w;
}

void TrainConfig::validate() const {
  require(dim >= 1, Errc::invalid_argument, "dim must be >= 1");
  require(learning_rate > 0.0, Errc::invalid_argument, "learning_rate must be > 0");
  require(batch_size >= 1, Errc::invalid_argument, "batch_size must be >= 1");
  require(negatives_per_positive >= 1, Errc::invalid_argument, "negatives must be >= 1");
  require(l2_lambda >= 0.0, Errc::invalid_argument, "l2 must be >= 0");
  require(init_scale > 0.0, Errc::invalid_argument, "init_scale must be > 0");
  layer_weights();  // validates alphas against layers
}

std::string TrainConfig::to_json() const {
  nlohmann::json j;
  j["dim"] = dim;
  j["layers"] = layers;
  if (alphas) j["alphas"] = *alphas;
  j["norm"] = normalization_name(norm);
  j["decoder"] = decoder_name(decoder);
  j["use_context_graph"] = use_context_graph;
  j["use_bias"] = use_bias;
  j["learning_rate"] = learning_rate;
  j["batch_size"] = batch_size;
  j["negatives"] = negatives_per_positive;
  j["l2"] = l2_lambda;
  j["epochs"] = epochs;
  j["seed"] = seed;
  j["init_scale"] = init_scale;
  j["eval_every"] = eval_every;
  j["eval_ks"] = eval_ks;
  return j.dump();  // nlohmann keeps keys sorted: canonical
}

TrainConfig TrainConfig::from_json(const std::string& json) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("bad config json: ") + e.what());
  }
  TrainConfig c;
  try {
    if (j.contains("dim")) c.dim = j["dim"].get<uint32_t>();
    if (j.contains("layers")) c.layers = j["layers"].get<uint32_t>();
    if (j.contains("alphas") && !j["alphas"].is_null())
      c.alphas = j["alphas"].get<std::vector<double>>();
    if (j.contains("norm")) c.norm = normalization_from_name(j["norm"].get<std::string>());
    if (j.contains("decoder")) c.decoder = decoder_from_name(j["decoder"].get<std::string>());
    if (j.contains("use_context_graph")) c.use_context_graph = j["use_context_graph"].get<bool>();
    if (j.contains("use_bias")) c.use_bias = j["use_bias"].get<bool>();
    if (j.contains("learning_rate")) c.learning_rate = j["learning_rate"].get<double>();
    if (j.contains("batch_size")) c.batch_size = j["batch_size"].get<uint32_t>();
    if (j.contains("negatives")) c.negatives_per_positive = j["negatives"].get<uint32_t>();
    if (j.contains("l2")) c.l2_lambda = j["l2"].get<double>();
    if (j.contains("epochs")) c.epochs = j["epochs"].get<uint32_t>();
    if (j.contains("seed")) c.seed = j["seed"].get<uint64_t>();
    if (j.contains("init_scale")) c.init_scale = j["init_scale"].get<double>();
    if (j.contains("eval_every")) c.eval_every = j["eval_every"].get<uint32_t>();
    if (j.contains("eval_ks")) c.eval_ks = j["eval_ks"].get<std::vector<uint32_t>>();
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::parse, std::string("bad config value: ") + e.what());
  }
  c.validate();
  return c;
}

TrainingGraph build_training_graph(const InteractionLog& train, bool use_context,
                                   Normalization norm) {
  TrainingGraph tg;
  tg.graph = build_graph(train);
  tg.catalog = build_context_catalog(tg.graph, use_context);
  tg.adjacency = build_normalized_adjacency(tg.graph, tg.catalog, norm);
  tg.adjoint = tg.adjacency.transpose();
  tg.consumed.resize(train.n_users);
  for (const auto& r : train.records) tg.consumed[r.user].push_back(r.item);
  for (auto& c : tg.consumed) {
    std::sort(c.begin(), c.end());
    c.erase(std::unique(c.begin(), c.end()), c.end());
  }
  return tg;
}

ModelState init_model(const TrainConfig& cfg, const Dataset& ds) {
  cfg.validate();
  ModelState m;
  m.cfg = cfg;
  m.tables = init_embeddings(ds.user_vocab.size(), ds.item_vocab.size(), ds.context_vocab.size(),
                             cfg.dim, cfg.seed, cfg.init_scale);
  if (cfg.use_bias) {
    m.biases.enabled = true;
    m.biases.user.assign(ds.n_users(), 0.0);
    m.biases.item.assign(ds.n_items(), 0.0);
    m.biases.context.assign(ds.context_vocab.size(), 0.0);
  }
  m.dataset_id = ds.dataset_id;
  m.run_id = compute_run_id(ds.dataset_id, cfg);
  return m;
}

PropagatedEmbeddings compute_embeddings(const ModelState& model, const Dataset& ds,
                                        const TrainingGraph& tg) {
  NodeEmbeddings init = encode_all(ds.user_features, ds.item_features, model.tables);
  Mat context_rows = compute_context_rows(tg.catalog, model.tables.context);
  Mat e0 = assemble_initial_matrix(init, context_rows);
  std::vector<Mat> layers = propagate_matrix(tg.adjacency, e0, model.cfg.layers);
  return combine_layers(layers, tg.graph.n_users, tg.graph.n_items, model.cfg.layer_weights());
}

uint64_t compute_run_id(uint64_t dataset_id, const TrainConfig& cfg) {
  Fnv1a h;
  h.update_pod(dataset_id);
  h.update(cfg.to_json());
  return h.digest();
}

}  // namespace ctxrec
