#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "turnhash/errors.hpp"
#include "turnhash/families.hpp"
#include "turnhash/rng.hpp"
#include "turnhash/threads.hpp"

namespace turnhash {

// Amplified (r, cr)-near-neighbor structure: concat_k hash draws are combined
// into one composite key per table (AND), tables_L independent tables are
// probed per query (OR), and candidates are post-filtered by the exact target
// distance, so nothing beyond cr is ever returned.

struct IndexParams {
  double r = 0.0;
  double c = 0.0;
  double p1 = 0.0;
  double p2 = 0.0;
  double rho = 0.0;
  int concat_k = 1;
  int tables_L = 1;
  double delta = 0.1;
  std::uint64_t seed = 0;
};

// concat_k = ceil(ln n / ln(1/p2)), tables_L = ceil(ln(1/delta) / p1^k),
// both with a rounding guard; n <= 1 degenerates to concat_k = 1 and
// p1 = 1 to tables_L = 1.
IndexParams derive_params(std::size_t n, double p1, double p2, double delta);

// How a family hashes and measures items of a given type. begin_draw, when
// set, prepares shared per-draw state (e.g. Gaussian prefix sums); build and
// query sweep draw-major, call it once, then hash many items against it.
template <class Item>
struct FamilyAdapter {
  double p1 = 0.0;
  double p2 = 0.0;
  std::function<void(std::uint64_t)> begin_draw;
  std::function<HashValue(const Item&, std::uint64_t)> data_hash;
  std::function<HashValue(const Item&, std::uint64_t)> query_hash;  // empty: symmetric
  std::function<double(const Item&, const Item&)> distance;
};

FamilyAdapter<StepFunction> make_step_adapter(const HashFamily& fam);
FamilyAdapter<std::vector<double>> make_vector_adapter(const HashFamily& fam);
// DiscreteSample family hashing step functions through the implicit embedding.
FamilyAdapter<StepFunction> make_embedding_adapter(const HashFamily& fam);

// One bucket entry: composite key plus the stored item's id. Tables are
// sorted by (key, id), so a bucket is a contiguous run.
struct IndexEntry {
  std::uint64_t key = 0;
  std::uint32_t id = 0;
};

template <class Item>
class LshIndex {
 public:
  using Entry = IndexEntry;
  struct Hit {
    std::uint32_t id = 0;
    double distance = 0.0;
  };
  struct QueryResult {
    std::optional<Hit> hit;
    std::size_t candidates_scanned = 0;
  };
  struct Stats {
    std::map<std::size_t, std::size_t> bucket_size_counts;
    std::size_t table_entries = 0;
    std::size_t queries_run = 0;
    std::size_t candidates_scanned = 0;
  };
  // Distance used instead of adapter.distance for candidate filtering;
  // receives (query position in the batch, item id).
  using DistanceOverride =
      std::function<double(std::size_t, std::uint32_t)>;

  LshIndex(std::vector<Item> items, FamilyAdapter<Item> adapter, double r,
           double c, double delta, std::uint64_t seed)
      : items_(std::move(items)), adapter_(std::move(adapter)) {
    if (!(adapter_.p1 > adapter_.p2 && adapter_.p2 > 0.0))
      throw ParamError("LshIndex: family must declare p1 > p2 > 0");
    params_ = derive_params(items_.size(), adapter_.p1, adapter_.p2, delta);
    params_.r = r;
    params_.c = c;
    params_.seed = seed;
    build();
  }

  // The atomic query counters block the defaulted move.
  LshIndex(LshIndex&& o) noexcept
      : params_(o.params_),
        items_(std::move(o.items_)),
        adapter_(std::move(o.adapter_)),
        tables_(std::move(o.tables_)),
        queries_run_(o.queries_run_.load()),
        candidates_scanned_(o.candidates_scanned_.load()) {}

  static LshIndex from_parts(std::vector<Item> items,
                             FamilyAdapter<Item> adapter, IndexParams params,
                             std::vector<std::vector<Entry>> tables) {
    LshIndex idx(std::move(items), std::move(adapter), std::move(params),
                 std::move(tables));
    if (idx.tables_.size() != static_cast<std::size_t>(idx.params_.tables_L))
      throw ValidationError("LshIndex: table count does not match params");
    return idx;
  }

  QueryResult query(const Item& q) const {
    return query_batch(std::vector<Item>{q}).front();
  }

  // One draw sweep shared by all queries. threshold < 0 means c * r.
  std::vector<QueryResult> query_batch(const std::vector<Item>& qs,
                                       const DistanceOverride& dist = {},
                                       double threshold = -1.0) const {
    const double limit = threshold < 0.0 ? params_.c * params_.r : threshold;
    const auto& qhash = adapter_.query_hash ? adapter_.query_hash
                                            : adapter_.data_hash;
    const std::size_t L = tables_.size();
    std::vector<std::uint64_t> keys(qs.size() * L);
    for (std::size_t t = 0; t < L; ++t) {
      std::vector<std::uint64_t> acc(qs.size(), table_salt(t));
      for (int j = 0; j < params_.concat_k; ++j) {
        const std::uint64_t draw =
            static_cast<std::uint64_t>(t) * params_.concat_k + j;
        if (adapter_.begin_draw) adapter_.begin_draw(draw);
        for (std::size_t qi = 0; qi < qs.size(); ++qi)
          acc[qi] = combine_value(acc[qi], qhash(qs[qi], draw));
      }
      for (std::size_t qi = 0; qi < qs.size(); ++qi)
        keys[qi * L + t] = acc[qi];
    }

    std::vector<QueryResult> results(qs.size());
    const std::size_t budget = 3 * static_cast<std::size_t>(params_.tables_L);
    for (std::size_t qi = 0; qi < qs.size(); ++qi) {
      QueryResult& res = results[qi];
      std::unordered_map<std::uint32_t, double> memo;
      for (std::size_t t = 0; t < L && !res.hit; ++t) {
        const auto& table = tables_[t];
        const std::uint64_t key = keys[qi * L + t];
        auto it = std::lower_bound(
            table.begin(), table.end(), key,
            [](const Entry& e, std::uint64_t k) { return e.key < k; });
        for (; it != table.end() && it->key == key; ++it) {
          if (res.candidates_scanned >= budget) break;
          ++res.candidates_scanned;
          auto found = memo.find(it->id);
          double d;
          if (found != memo.end()) {
            d = found->second;
          } else {
            d = dist ? dist(qi, it->id)
                     : adapter_.distance(items_[it->id], qs[qi]);
            memo.emplace(it->id, d);
          }
          if (d <= limit) {
            res.hit = Hit{it->id, d};
            break;
          }
        }
        if (res.candidates_scanned >= budget) break;
      }
      queries_run_.fetch_add(1, std::memory_order_relaxed);
      candidates_scanned_.fetch_add(res.candidates_scanned,
                                    std::memory_order_relaxed);
    }
    return results;
  }

  const IndexParams& params() const { return params_; }
  const std::vector<Item>& items() const { return items_; }
  const std::vector<std::vector<Entry>>& tables() const { return tables_; }
  const FamilyAdapter<Item>& adapter() const { return adapter_; }

  Stats stats() const {
    Stats s;
    for (const auto& table : tables_) {
      s.table_entries += table.size();
      std::size_t run = 0;
      for (std::size_t i = 0; i < table.size(); ++i) {
        ++run;
        if (i + 1 == table.size() || table[i + 1].key != table[i].key) {
          ++s.bucket_size_counts[run];
          run = 0;
        }
      }
    }
    s.queries_run = queries_run_.load();
    s.candidates_scanned = candidates_scanned_.load();
    return s;
  }

 private:
  LshIndex(std::vector<Item> items, FamilyAdapter<Item> adapter,
           IndexParams params, std::vector<std::vector<Entry>> tables)
      : params_(params),
        items_(std::move(items)),
        adapter_(std::move(adapter)),
        tables_(std::move(tables)) {}

  static std::uint64_t table_salt(std::size_t t) {
    return hash_combine(0x7461626c6573ULL, t);
  }

  static std::uint64_t combine_value(std::uint64_t acc, const HashValue& hv) {
    acc = hash_combine(acc, static_cast<std::uint64_t>(hv.s0));
    return hash_combine(acc, static_cast<std::uint64_t>(hv.s1));
  }

  void build() {
    tables_.assign(static_cast<std::size_t>(params_.tables_L), {});
    const std::size_t n = items_.size();
    std::vector<std::uint64_t> acc(n);
    for (std::size_t t = 0; t < tables_.size(); ++t) {
      std::fill(acc.begin(), acc.end(), table_salt(t));
      for (int j = 0; j < params_.concat_k; ++j) {
        const std::uint64_t draw =
            static_cast<std::uint64_t>(t) * params_.concat_k + j;
        if (adapter_.begin_draw) adapter_.begin_draw(draw);
        parallel_for(n, [&](std::size_t i) {
          acc[i] = combine_value(acc[i], adapter_.data_hash(items_[i], draw));
        });
      }
      auto& table = tables_[t];
      table.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        table[i] = Entry{acc[i], static_cast<std::uint32_t>(i)};
      std::sort(table.begin(), table.end(), [](const Entry& a, const Entry& b) {
        return a.key != b.key ? a.key < b.key : a.id < b.id;
      });
    }
  }

  IndexParams params_;
  std::vector<Item> items_;
  FamilyAdapter<Item> adapter_;
  std::vector<std::vector<Entry>> tables_;
  mutable std::atomic<std::size_t> queries_run_{0};
  mutable std::atomic<std::size_t> candidates_scanned_{0};
};

}  // namespace turnhash
