#include "dataset.hpp"

#include <algorithm>
#include <charconv>
#include <istream>
#include <ostream>
#include <random>

namespace ctxrec {

const char* field_kind_name(FieldKind k) {
  switch (k) {
    case FieldKind::user: return "user";
    case FieldKind::item: return "item";
    case FieldKind::context: return "context";
  }
  return "?";
}

FieldKind field_kind_from_name(const std::string& s) {
  if (s == "user") return FieldKind::user;
  if (s == "item") return FieldKind::item;
  if (s == "context") return FieldKind::context;
  fail(Errc::schema, "unknown field kind: " + s);
}

uint32_t FeatureVocabulary::get_or_add(const std::string& field, const std::string& value) {
  std::string key = field + '\t' + value;
  auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  uint32_t id = size();
  index_.emplace(std::move(key), id);
  entries_.emplace_back(field, value);
  return id;
}

std::optional<uint32_t> FeatureVocabulary::find(const std::string& field,
                                               const std::string& value) const {
  auto it = index_.find(field + '\t' + value);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

void FeatureVocabulary::load(std::vector<std::pair<std::string, std::string>> entries) {
  entries_ = std::move(entries);
  index_.clear();
  for (uint32_t id = 0; id < entries_.size(); ++id)
    index_.emplace(entries_[id].first + '\t' + entries_[id].second, id);
  require(index_.size() == entries_.size(), Errc::format, "vocabulary has duplicate entries");
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cells;
}

void insert_sorted_unique(std::vector<uint32_t>& v, uint32_t x) {
  auto it = std::lower_bound(v.begin(), v.end(), x);
  if (it == v.end() || *it != x) v.insert(it, x);
}

}  // namespace

ParsedLog parse_interaction_log(std::istream& in, const std::vector<FieldSpec>& schema) {
  ParsedLog out;
  out.schema = schema;

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), Errc::parse, "empty input: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_tabs(line);
  require(header.size() >= 3 && header[0] == "user" && header[1] == "item" && header[2] == "ts",
          Errc::schema, "header must start with user, item, ts");

  // Map each extra column to its declared field.
  std::vector<const FieldSpec*> columns;
  for (std::size_t c = 3; c < header.size(); ++c) {
    const FieldSpec* found = nullptr;
    for (const auto& f : schema)
      if (f.name == header[c]) found = &f;
    require(found != nullptr, Errc::schema, "column not declared in schema: " + header[c]);
    columns.push_back(found);
  }
  for (const auto& f : schema) {
    bool present = std::any_of(columns.begin(), columns.end(),
                               [&](const FieldSpec* c) { return c->name == f.name; });
    require(present, Errc::schema, "schema field missing from header: " + f.name);
  }
  const std::size_t n_cols = header.size();

  std::unordered_map<std::string, uint32_t> user_index, item_index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() && in.peek() == std::char_traits<char>::eof()) break;
    std::vector<std::string> cells = split_tabs(line);
    require(cells.size() == n_cols, Errc::parse,
            "line " + std::to_string(line_no) + ": expected " + std::to_string(n_cols) +
                " columns, got " + std::to_string(cells.size()));

    InteractionRecord rec;
    auto user_it = user_index.find(cells[0]);
    if (user_it == user_index.end()) {
      rec.user = static_cast<uint32_t>(out.user_raw.size());
      user_index.emplace(cells[0], rec.user);
      out.user_raw.push_back(cells[0]);
      out.user_features.emplace_back();
      // Inject the ID feature so every user has at least one feature.
      insert_sorted_unique(out.user_features.back(), out.user_vocab.get_or_add("user", cells[0]));
    } else {
      rec.user = user_it->second;
    }
    auto item_it = item_index.find(cells[1]);
    if (item_it == item_index.end()) {
      rec.item = static_cast<uint32_t>(out.item_raw.size());
      item_index.emplace(cells[1], rec.item);
      out.item_raw.push_back(cells[1]);
      out.item_features.emplace_back();
      insert_sorted_unique(out.item_features.back(), out.item_vocab.get_or_add("item", cells[1]));
    } else {
      rec.item = item_it->second;
    }

    auto [p, ec] = std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), rec.ts);
    require(ec == std::errc() && p == cells[2].data() + cells[2].size(), Errc::parse,
            "line " + std::to_string(line_no) + ": bad timestamp '" + cells[2] + "'");

    for (std::size_t c = 0; c < columns.size(); ++c) {
      const std::string& value = cells[c + 3];
      if (value.empty()) continue;  // feature absent
      const FieldSpec& f = *columns[c];
      switch (f.kind) {
        case FieldKind::user:
          insert_sorted_unique(out.user_features[rec.user],
                               out.user_vocab.get_or_add(f.name, value));
          break;
        case FieldKind::item:
          insert_sorted_unique(out.item_features[rec.item],
                               out.item_vocab.get_or_add(f.name, value));
          break;
        case FieldKind::context:
          rec.context.push_back(out.context_vocab.get_or_add(f.name, value));
          break;
      }
    }
    out.log.records.push_back(std::move(rec));
  }
  out.log.n_users = static_cast<uint32_t>(out.user_raw.size());
  out.log.n_items = static_cast<uint32_t>(out.item_raw.size());
  return out;
}

void write_interaction_tsv(std::ostream& out, const ParsedLog& parsed) {
  out << "user\titem\tts";
  for (const auto& f : parsed.schema) out << '\t' << f.name;
  out << '\n';

  auto first_value_for = [](const FeatureVocabulary& vocab, const std::vector<uint32_t>& features,
                            const std::string& field) -> std::string {
    for (uint32_t id : features)
      if (vocab.entry(id).first == field) return vocab.entry(id).second;
    return {};
  };

  for (const auto& rec : parsed.log.records) {
    out << parsed.user_raw[rec.user] << '\t' << parsed.item_raw[rec.item] << '\t' << rec.ts;
    for (const auto& f : parsed.schema) {
      out << '\t';
      switch (f.kind) {
        case FieldKind::user:
          out << first_value_for(parsed.user_vocab, parsed.user_features[rec.user], f.name);
          break;
        case FieldKind::item:
          out << first_value_for(parsed.item_vocab, parsed.item_features[rec.item], f.name);
          break;
        case FieldKind::context:
          for (uint32_t id : rec.context)
            if (parsed.context_vocab.entry(id).first == f.name) {
              out << parsed.context_vocab.entry(id).second;
              break;
            }
          break;
      }
    }
    out << '\n';
  }
}

KCoreResult apply_user_k_core(const InteractionLog& log, uint32_t k) {
  require(k >= 1, Errc::invalid_argument, "k-core requires k >= 1");
  std::vector<uint32_t> user_count(log.n_users, 0);
  for (const auto& r : log.records) ++user_count[r.user];

  constexpr uint32_t kDropped = UINT32_MAX;
  KCoreResult res;
  std::vector<uint32_t> user_map(log.n_users, kDropped);
  for (uint32_t u = 0; u < log.n_users; ++u)
    if (user_count[u] >= k) {
      user_map[u] = static_cast<uint32_t>(res.user_keep.size());
      res.user_keep.push_back(u);
    }

  std::vector<bool> item_seen(log.n_items, false);
  for (const auto& r : log.records)
    if (user_map[r.user] != kDropped) item_seen[r.item] = true;
  std::vector<uint32_t> item_map(log.n_items, kDropped);
  for (uint32_t i = 0; i < log.n_items; ++i)
    if (item_seen[i]) {
      item_map[i] = static_cast<uint32_t>(res.item_keep.size());
      res.item_keep.push_back(i);
    }

  for (const auto& r : log.records) {
    if (user_map[r.user] == kDropped) continue;
    InteractionRecord rec = r;
    rec.user = user_map[r.user];
    rec.item = item_map[r.item];
    res.log.records.push_back(std::move(rec));
  }
  res.log.n_users = static_cast<uint32_t>(res.user_keep.size());
  res.log.n_items = static_cast<uint32_t>(res.item_keep.size());
  return res;
}

SplitResult split_leave_last_out(const InteractionLog& log) {
  std::vector<std::vector<std::size_t>> per_user(log.n_users);
  for (std::size_t k = 0; k < log.records.size(); ++k)
    per_user[log.records[k].user].push_back(k);

  constexpr uint32_t kDropped = UINT32_MAX;
  SplitResult res;
  std::vector<uint32_t> user_map(log.n_users, kDropped);
  std::vector<std::size_t> test_idx;
  for (uint32_t u = 0; u < log.n_users; ++u) {
    if (per_user[u].size() < 2) {
      if (!per_user[u].empty()) ++res.dropped_users;
      continue;
    }
    // Latest timestamp wins; ties broken by file order (later row wins).
    std::size_t best = per_user[u][0];
    for (std::size_t idx : per_user[u])
      if (log.records[idx].ts >= log.records[best].ts) best = idx;
    user_map[u] = static_cast<uint32_t>(res.user_keep.size());
    res.user_keep.push_back(u);
    test_idx.push_back(best);
  }

  res.train.n_users = res.test.n_users = static_cast<uint32_t>(res.user_keep.size());
  res.train.n_items = res.test.n_items = log.n_items;

  for (uint32_t u_new = 0; u_new < res.user_keep.size(); ++u_new) {
    InteractionRecord rec = log.records[test_idx[u_new]];
    rec.user = u_new;
    res.test.records.push_back(std::move(rec));
  }
  for (std::size_t k = 0; k < log.records.size(); ++k) {
    const auto& r = log.records[k];
    if (user_map[r.user] == kDropped) continue;
    uint32_t u_new = user_map[r.user];
    // Drop train records whose (user, item) pair is held out in test.
    if (r.item == res.test.records[u_new].item) continue;
    InteractionRecord rec = r;
    rec.user = u_new;
    res.train.records.push_back(std::move(rec));
  }
  return res;
}

AttributedGraph build_graph(const InteractionLog& train) {
  AttributedGraph g;
  g.n_users = train.n_users;
  g.n_items = train.n_items;
  g.user_adj.resize(g.n_users);
  g.item_adj.resize(g.n_items);
  g.edge_contexts.reserve(train.records.size());
  for (const auto& r : train.records) {
    uint32_t e = static_cast<uint32_t>(g.edge_contexts.size());
    g.user_adj[r.user].emplace_back(r.item, e);
    g.item_adj[r.item].emplace_back(r.user, e);
    g.edge_contexts.push_back(r.context);
  }
  return g;
}

Dataset ingest(const ParsedLog& parsed, uint32_t kcore_k) {
  KCoreResult cored = apply_user_k_core(parsed.log, kcore_k);
  SplitResult split = split_leave_last_out(cored.log);

  Dataset ds;
  ds.schema = parsed.schema;
  ds.user_vocab = parsed.user_vocab;
  ds.item_vocab = parsed.item_vocab;
  ds.context_vocab = parsed.context_vocab;
  ds.kcore_k = kcore_k;
  ds.users_dropped_in_split = split.dropped_users;
  ds.train = std::move(split.train);
  ds.test = std::move(split.test);

  for (uint32_t u_new : split.user_keep) {
    uint32_t u_orig = cored.user_keep[u_new];
    ds.user_raw.push_back(parsed.user_raw[u_orig]);
    ds.user_features.push_back(parsed.user_features[u_orig]);
  }
  for (uint32_t i_orig : cored.item_keep) {
    ds.item_raw.push_back(parsed.item_raw[i_orig]);
    ds.item_features.push_back(parsed.item_features[i_orig]);
  }
  ds.dataset_id = compute_dataset_id(ds);
  return ds;
}

namespace {

uint32_t rnd_below(std::mt19937_64& rng, uint32_t n) { return static_cast<uint32_t>(rng() % n); }

double rnd_unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ParsedLog generate_synthetic(const SynthParams& p, uint64_t seed) {
  require(p.n_users >= 1 && p.n_items >= 1 && p.n_context_values >= 1 && p.records_per_user >= 1,
          Errc::invalid_argument, "synthetic counts must be >= 1");
  require(p.noise_rate >= 0.0 && p.noise_rate <= 1.0, Errc::invalid_argument,
          "noise_rate must be in [0, 1]");
  require(p.planted_rule == "group-context", Errc::invalid_argument,
          "unknown planted rule: " + p.planted_rule);

  const uint32_t v = p.n_context_values;
  // Group count keeps one item per (group, c0, c1) cell where the catalog
  // allows, so the planted preference stays distinguishable.
  uint32_t groups = std::min<uint32_t>(p.n_users / 20, p.n_items / (v * v));
  groups = std::clamp<uint32_t>(groups, 1, 64);
  groups = std::min(groups, p.n_users);
  auto preferred = [&](uint32_t user, uint32_t c0, uint32_t c1) {
    uint32_t g = user % groups;
    return (g * v * v + c0 * v + c1) % p.n_items;
  };

  std::mt19937_64 rng(seed);
  ParsedLog out;
  out.schema = {{"c0", FieldKind::context}, {"c1", FieldKind::context}};
  out.user_raw.reserve(p.n_users);
  for (uint32_t u = 0; u < p.n_users; ++u) {
    out.user_raw.push_back("u" + std::to_string(u));
    out.user_features.push_back({out.user_vocab.get_or_add("user", out.user_raw.back())});
    for (uint32_t k = 0; k < p.records_per_user; ++k) {
      uint32_t c0 = rnd_below(rng, v);
      uint32_t c1 = rnd_below(rng, v);
      uint32_t item = rnd_unit(rng) < p.noise_rate ? rnd_below(rng, p.n_items)
                                                   : preferred(u, c0, c1);
      InteractionRecord rec;
      rec.user = u;
      rec.ts = static_cast<int64_t>(k) + 1;
      rec.item = item;  // re-densified below
      rec.context = {out.context_vocab.get_or_add("c0", "a" + std::to_string(c0)),
                     out.context_vocab.get_or_add("c1", "b" + std::to_string(c1))};
      out.log.records.push_back(std::move(rec));
    }
  }

  // Re-assign item ids in first-seen order so that writing the log to TSV and
  // re-parsing it reproduces the same dense ids.
  std::unordered_map<uint32_t, uint32_t> item_map;
  for (auto& rec : out.log.records) {
    auto it = item_map.find(rec.item);
    if (it == item_map.end()) {
      uint32_t dense = static_cast<uint32_t>(out.item_raw.size());
      std::string raw = "i" + std::to_string(rec.item);
      item_map.emplace(rec.item, dense);
      out.item_raw.push_back(raw);
      out.item_features.push_back({out.item_vocab.get_or_add("item", raw)});
      rec.item = dense;
    } else {
      rec.item = it->second;
    }
  }
  out.log.n_users = p.n_users;
  out.log.n_items = static_cast<uint32_t>(out.item_raw.size());
  return out;
}

uint64_t compute_dataset_id(const Dataset& ds) {
  Fnv1a h;
  for (const auto& f : ds.schema) {
    h.update(f.name);
    h.update_pod(static_cast<int>(f.kind));
  }
  auto hash_vocab = [&h](const FeatureVocabulary& v) {
    for (uint32_t id = 0; id < v.size(); ++id) {
      h.update(v.entry(id).first);
      h.update(v.entry(id).second);
    }
  };
  hash_vocab(ds.user_vocab);
  hash_vocab(ds.item_vocab);
  hash_vocab(ds.context_vocab);
  for (const auto& s : ds.user_raw) h.update(s);
  for (const auto& s : ds.item_raw) h.update(s);
  auto hash_features = [&h](const std::vector<std::vector<uint32_t>>& fs) {
    for (const auto& f : fs)
      for (uint32_t id : f) h.update_pod(id);
  };
  hash_features(ds.user_features);
  hash_features(ds.item_features);
  auto hash_log = [&h](const InteractionLog& log) {
    h.update_pod(log.n_users);
    h.update_pod(log.n_items);
    for (const auto& r : log.records) {
      h.update_pod(r.user);
      h.update_pod(r.item);
      h.update_pod(r.ts);
      for (uint32_t c : r.context) h.update_pod(c);
    }
  };
  hash_log(ds.train);
  hash_log(ds.test);
  h.update_pod(ds.kcore_k);
  return h.digest();
}

}  // namespace ctxrec
