#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "common.hpp"

namespace ctxrec {

enum class FieldKind { user, item, context };

struct FieldSpec {
  std::string name;
  FieldKind kind;
};

const char* field_kind_name(FieldKind k);
FieldKind field_kind_from_name(const std::string& s);

// Dense feature id space for one field group (user / item / context).
// Values are namespaced by field name, so "5" in `stars` and "5" in `month`
// get distinct ids. Ids are assigned in first-seen order and are contiguous
// in [0, size).
class FeatureVocabulary {
 public:
  FeatureVocabulary() = default;
  explicit FeatureVocabulary(FieldKind kind) : kind_(kind) {}

  FieldKind kind() const { return kind_; }
  uint32_t size() const { return static_cast<uint32_t>(entries_.size()); }

  uint32_t get_or_add(const std::string& field, const std::string& value);
  std::optional<uint32_t> find(const std::string& field, const std::string& value) const;
  const std::pair<std::string, std::string>& entry(uint32_t id) const { return entries_[id]; }

  // Rebuild from (field, value, id) rows; ids must be contiguous from 0.
  void load(std::vector<std::pair<std::string, std::string>> entries);

 private:
  FieldKind kind_ = FieldKind::user;
  std::vector<std::pair<std::string, std::string>> entries_;  // id -> (field, value)
  std::unordered_map<std::string, uint32_t> index_;           // "field\tvalue" -> id
};

struct InteractionRecord {
  uint32_t user = 0;
  uint32_t item = 0;
  std::vector<uint32_t> context;  // context-group feature ids, at most one per field
  int64_t ts = 0;

  bool operator==(const InteractionRecord&) const = default;
};

struct InteractionLog {
  std::vector<InteractionRecord> records;
  uint32_t n_users = 0;
  uint32_t n_items = 0;

  bool operator==(const InteractionLog&) const = default;
};

// Bipartite user-item multigraph; each edge keeps the context feature ids of
// the interaction it came from.
struct AttributedGraph {
  uint32_t n_users = 0;
  uint32_t n_items = 0;
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> user_adj;  // (item, edge)
  std::vector<std::vector<std::pair<uint32_t, uint32_t>>> item_adj;  // (user, edge)
  std::vector<std::vector<uint32_t>> edge_contexts;                  // edge -> context ids

  std::size_t edge_count() const { return edge_contexts.size(); }
};

// Interaction log together with the vocabularies and per-node feature
// assignments produced while ingesting it. The injected ID features live in
// fields named "user" / "item".
struct ParsedLog {
  std::vector<FieldSpec> schema;  // extra columns only (not user/item/ts)
  FeatureVocabulary user_vocab{FieldKind::user};
  FeatureVocabulary item_vocab{FieldKind::item};
  FeatureVocabulary context_vocab{FieldKind::context};
  std::vector<std::string> user_raw, item_raw;                   // node -> raw id
  std::vector<std::vector<uint32_t>> user_features, item_features;  // node -> feature ids, sorted
  InteractionLog log;
};

// Fully prepared dataset: filtered, split, ready for training/evaluation.
struct Dataset {
  std::vector<FieldSpec> schema;
  FeatureVocabulary user_vocab{FieldKind::user};
  FeatureVocabulary item_vocab{FieldKind::item};
  FeatureVocabulary context_vocab{FieldKind::context};
  std::vector<std::string> user_raw, item_raw;
  std::vector<std::vector<uint32_t>> user_features, item_features;
  InteractionLog train;
  InteractionLog test;  // exactly one record per user
  uint32_t kcore_k = 0;
  uint32_t users_dropped_in_split = 0;
  uint64_t dataset_id = 0;

  uint32_t n_users() const { return train.n_users; }
  uint32_t n_items() const { return train.n_items; }
};

// --- parsing ---------------------------------------------------------------

// Input: TSV with header `user	item	ts	<field>...`. Empty cell = feature
// absent. Dense ids are assigned in first-seen order.
ParsedLog parse_interaction_log(std::istream& in, const std::vector<FieldSpec>& schema);

void write_interaction_tsv(std::ostream& out, const ParsedLog& parsed);

// --- filtering and splitting ------------------------------------------------

struct KCoreResult {
  InteractionLog log;
  std::vector<uint32_t> user_keep;  // new id -> old id
  std::vector<uint32_t> item_keep;
};

// User-side only, single pass: keep users with >= k records, then drop items
// left with no records. Ids re-densified preserving order.
KCoreResult apply_user_k_core(const InteractionLog& log, uint32_t k);

struct SplitResult {
  InteractionLog train;
  InteractionLog test;
  std::vector<uint32_t> user_keep;  // new id -> old id
  uint32_t dropped_users = 0;       // users with < 2 records
};

// Leave-last-out: per user the latest record (ties broken by file order,
// later row wins) goes to test; train drops every record whose (user, item)
// pair appears in test. Item id space is unchanged.
SplitResult split_leave_last_out(const InteractionLog& log);

AttributedGraph build_graph(const InteractionLog& train);

// K-core + split + remapping of node-level side data.
Dataset ingest(const ParsedLog& parsed, uint32_t kcore_k);

// --- synthetic corpus -------------------------------------------------------

struct SynthParams {
  uint32_t n_users = 500;
  uint32_t n_items = 200;
  uint32_t n_context_values = 4;  // per context field; two fields are emitted
  uint32_t records_per_user = 12;
  std::string planted_rule = "group-context";
  double noise_rate = 0.1;
};

// Deterministic per seed. Under "group-context" the preferred item is a
// function of (user group, value of c0, value of c1); with probability
// noise_rate the item is uniform instead.
ParsedLog generate_synthetic(const SynthParams& params, uint64_t seed);

uint64_t compute_dataset_id(const Dataset& ds);

}  // namespace ctxrec
