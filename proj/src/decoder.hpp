#pragma once

#include "common.hpp"
#include "encoder.hpp"
#include "propagation.hpp"

namespace ctxrec {

enum class DecoderKind { fm, inner };

const char* decoder_name(DecoderKind d);
DecoderKind decoder_from_name(const std::string& s);

// Optional first-order terms: global + per user + per item + per context
// feature. Off by default; the second-order decoder alone matches the model
// definition.
struct Biases {
  bool enabled = false;
  double global = 0.0;
  std::vector<double> user;     // per user node
  std::vector<double> item;     // per item node
  std::vector<double> context;  // per context feature id
};

struct ScoringInput {
  std::span<const double> user_vec;
  std::span<const double> item_vec;
  std::vector<std::span<const double>> context_vecs;  // one per context feature, un-pooled
  double first_order = 0.0;                           // pre-summed bias terms, 0 when disabled
};

// 0.5 * (||sum v||^2 - sum ||v||^2): the sum of inner products over unordered
// distinct pairs of V = contexts + user + item. Self-interactions excluded.
double score_fm(const ScoringInput& input);

double score_inner(std::span<const double> user_vec, std::span<const double> item_vec);

double bias_sum(const Biases& biases, uint32_t user, uint32_t item,
                std::span<const uint32_t> context_ids);

// Scores every candidate under a fixed (user, context). Context partial sums
// are computed once per call, not per candidate.
std::vector<double> score_candidates(uint32_t user, std::span<const uint32_t> candidate_items,
                                     std::span<const uint32_t> context_ids,
                                     const PropagatedEmbeddings& embeddings,
                                     const EmbeddingTable& context_table, DecoderKind decoder,
                                     const Biases* biases = nullptr);

}  // namespace ctxrec
