#include "decoder.hpp"

namespace ctxrec {

const char* decoder_name(DecoderKind d) { return d == DecoderKind::fm ? "fm" : "inner"; }

DecoderKind decoder_from_name(const std::string& s) {
  if (s == "fm") return DecoderKind::fm;
  if (s == "inner" || s == "mf") return DecoderKind::inner;
  fail(Errc::invalid_argument, "unknown decoder: " + s);
}

double score_fm(const ScoringInput& input) {
  const std::size_t d = input.user_vec.size();
  require(input.item_vec.size() == d, Errc::contract, "score_fm: dimension mismatch");
  for (const auto& v : input.context_vecs)
    require(v.size() == d, Errc::contract, "score_fm: dimension mismatch");

  std::vector<double> sum(d, 0.0);
  double sum_sq = 0.0;
  auto absorb = [&](std::span<const double> v) {
    for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
    sum_sq += dot(v, v);
  };
  absorb(input.user_vec);
  absorb(input.item_vec);
  for (const auto& v : input.context_vecs) absorb(v);
  return 0.5 * (dot(sum, sum) - sum_sq) + input.first_order;
}

double score_inner(std::span<const double> user_vec, std::span<const double> item_vec) {
  require(user_vec.size() == item_vec.size(), Errc::contract, "score_inner: dimension mismatch");
  return dot(user_vec, item_vec);
}

double bias_sum(const Biases& biases, uint32_t user, uint32_t item,
                std::span<const uint32_t> context_ids) {
  if (!biases.enabled) return 0.0;
  double s = biases.global + biases.user[user] + biases.item[item];
  for (uint32_t c : context_ids) s += biases.context[c];
  return s;
}

std::vector<double> score_candidates(uint32_t user, std::span<const uint32_t> candidate_items,
                                     std::span<const uint32_t> context_ids,
                                     const PropagatedEmbeddings& embeddings,
                                     const EmbeddingTable& context_table, DecoderKind decoder,
                                     const Biases* biases) {
  require(user < embeddings.users.rows(), Errc::unknown_id,
          "unknown user id " + std::to_string(user));
  for (uint32_t i : candidate_items)
    require(i < embeddings.items.rows(), Errc::unknown_id,
            "unknown item id " + std::to_string(i));
  for (uint32_t c : context_ids)
    require(c < context_table.rows, Errc::unknown_id,
            "unknown context feature id " + std::to_string(c));

  const std::size_t d = embeddings.users.cols();
  std::span<const double> p = embeddings.users.row_span(user);
  std::vector<double> scores;
  scores.reserve(candidate_items.size());

  if (decoder == DecoderKind::inner) {
    for (uint32_t i : candidate_items) {
      double s = dot(p, embeddings.items.row_span(i));
      if (biases && biases->enabled) s += bias_sum(*biases, user, i, context_ids);
      scores.push_back(s);
    }
    return scores;
  }

  // Context-dependent partial sums, shared across candidates:
  //   score(i) = q_i . (p + cs) + [p . cs + 0.5 (||cs||^2 - csq)] + biases
  std::vector<double> ctx_sum(d, 0.0);
  double ctx_sq = 0.0;
  for (uint32_t c : context_ids) {
    std::span<const double> v = context_table.values.row_span(c);
    for (std::size_t j = 0; j < d; ++j) ctx_sum[j] += v[j];
    ctx_sq += dot(v, v);
  }
  std::vector<double> p_plus_ctx(d);
  for (std::size_t j = 0; j < d; ++j) p_plus_ctx[j] = p[j] + ctx_sum[j];
  const double base =
      dot(p, ctx_sum) + 0.5 * (dot(std::span<const double>(ctx_sum), ctx_sum) - ctx_sq);
  double base_bias = 0.0;
  if (biases && biases->enabled) {
    base_bias = biases->global + biases->user[user];
    for (uint32_t c : context_ids) base_bias += biases->context[c];
  }

  for (uint32_t i : candidate_items) {
    double s = dot(std::span<const double>(p_plus_ctx), embeddings.items.row_span(i)) + base;
    if (biases && biases->enabled) s += base_bias + biases->item[i];
    scores.push_back(s);
  }
  return scores;
}

}  // namespace ctxrec
