#include "wishart/treewords.hpp"

#include "wishart/error.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace wishart::treewords {

std::string to_string(const Letter& letter) {
  return (letter.side == Side::I ? "i" : "j") + std::to_string(letter.index);
}

std::string CanonicalWord::to_string() const {
  std::string out;
  for (const auto& l : letters_) {
    if (!out.empty()) out += ' ';
    out += treewords::to_string(l);
  }
  return out;
}

std::string to_string(const WordClassKey& key) {
  std::ostringstream os;
  os << "k=" << key.k << " a=" << key.edges << " s=" << key.vertices << " l=" << key.j_vertices << " b=(";
  for (std::size_t i = 0; i < key.multiplicities.size(); ++i) os << (i ? "," : "") << key.multiplicities[i];
  os << ")";
  return os.str();
}

CountTable::CountTable(int k, std::map<WordClassKey, Count> entries) : k_(k), entries_(std::move(entries)) {}

Count CountTable::count(const WordClassKey& key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? Count(0) : it->second;
}

Count CountTable::total() const {
  Count sum = 0;
  for (const auto& [key, c] : entries_) sum += c;
  return sum;
}

AlphaPolynomial CountTable::weighted_by_j_vertices(const std::vector<int>& b) const {
  AlphaPolynomial out;
  for (const auto& [key, c] : entries_)
    if (key.multiplicities == b) out += AlphaPolynomial::monomial(c, static_cast<std::size_t>(key.j_vertices));
  return out;
}

AlphaPolynomial CountTable::weighted_by_i_edges(const std::vector<int>& b) const {
  AlphaPolynomial out;
  for (const auto& [key, c] : entries_)
    if (key.multiplicities == b)
      out += AlphaPolynomial::monomial(c, static_cast<std::size_t>(key.edges - key.j_vertices));
  return out;
}

CanonicalWord canonicalize(std::span<const Letter> raw) {
  if (raw.size() < 3 || raw.size() % 2 == 0)
    throw InvalidParameter("malformed word: length must be odd and >= 3, got " + std::to_string(raw.size()));
  if (raw.front() != raw.back()) throw InvalidParameter("malformed word: not closed");
  std::unordered_map<std::uint32_t, std::uint32_t> relabel_i, relabel_j;
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (std::size_t p = 0; p < raw.size(); ++p) {
    const Letter& l = raw[p];
    Side expected = p % 2 == 0 ? Side::I : Side::J;
    if (l.side != expected) throw InvalidParameter("malformed word: sides must alternate starting with I");
    if (l.index == 0) throw InvalidParameter("malformed word: indices are 1-based");
    auto& table = l.side == Side::I ? relabel_i : relabel_j;
    auto [it, inserted] = table.try_emplace(l.index, static_cast<std::uint32_t>(table.size() + 1));
    out.push_back({l.side, it->second});
  }
  return CanonicalWord(std::move(out));
}

WordClassKey classify(const CanonicalWord& word) { return classify(word.letters()); }

WordClassKey classify(std::span<const Letter> word) {
  WordClassKey key;
  key.k = static_cast<int>(word.size() / 2);
  std::map<std::pair<std::uint32_t, std::uint32_t>, int> edges;  // (i, j) -> multiplicity
  std::uint32_t max_i = 0, max_j = 0;
  std::vector<bool> seen_i, seen_j;
  auto mark = [](std::vector<bool>& seen, std::uint32_t idx) {
    if (seen.size() <= idx) seen.resize(idx + 1, false);
    seen[idx] = true;
  };
  for (std::size_t p = 0; p + 1 < word.size(); ++p) {
    const Letter& a = word[p];
    const Letter& b = word[p + 1];
    const Letter& row = a.side == Side::I ? a : b;
    const Letter& col = a.side == Side::I ? b : a;
    ++edges[{row.index, col.index}];
  }
  for (const auto& l : word) {
    if (l.side == Side::I) mark(seen_i, l.index), max_i = std::max(max_i, l.index);
    else mark(seen_j, l.index), max_j = std::max(max_j, l.index);
  }
  int distinct_i = static_cast<int>(std::count(seen_i.begin(), seen_i.end(), true));
  int distinct_j = static_cast<int>(std::count(seen_j.begin(), seen_j.end(), true));
  key.edges = static_cast<int>(edges.size());
  key.vertices = distinct_i + distinct_j;
  key.j_vertices = distinct_j;
  for (const auto& [e, m] : edges) key.multiplicities.push_back(m);
  std::sort(key.multiplicities.rbegin(), key.multiplicities.rend());
  return key;
}

namespace {

void check_guard(int k, int max_k_guard) {
  if (k < 1) throw InvalidParameter("half-length k must be >= 1, got " + std::to_string(k));
  if (k > max_k_guard)
    throw ResourceLimit("k=" + std::to_string(k) + " exceeds the enumeration guard " + std::to_string(max_k_guard) +
                        " (class counts grow like k^k)");
}

}  // namespace

// Tree grown along the walk. Vertex 0 is the I-root; every other vertex v has
// a parent and owns the edge (parent(v), v), so edge multiplicities are
// indexed by the child vertex.
class Enumerator {
 public:
  Enumerator(int k, const WordVisitor& visit) : steps_(2 * k), visit_(visit) {
    const std::size_t cap = static_cast<std::size_t>(steps_) + 1;
    side_.reserve(cap);
    label_.reserve(cap);
    parent_.reserve(cap);
    depth_.reserve(cap);
    children_.reserve(cap);
    word_.reserve(cap);
    add_vertex(Side::I, 1, -1, 0);
    next_label_[0] = 2;
    next_label_[1] = 1;
    word_.push_back({Side::I, 1});
  }

  void run() { step(0, 0); }

 private:
  void add_vertex(Side side, std::uint32_t label, int parent, int depth) {
    side_.push_back(side);
    label_.push_back(label);
    parent_.push_back(parent);
    depth_.push_back(depth);
    children_.emplace_back();
  }

  void move_to(int v, int taken) {
    word_.push_back({side_[v], label_[v]});
    step(v, taken + 1);
    word_.pop_back();
  }

  void step(int v, int taken) {
    const int remaining = steps_ - taken;
    if (remaining == 0) {
      if (v == 0) visit_(word_);
      return;
    }
    // Odd-multiplicity edges are exactly the path back to the root.
    if (depth_[v] > remaining) return;

    // Neighbors in increasing label order: the parent was labeled before any
    // child of v, and children are labeled in creation order.
    if (parent_[v] >= 0) move_to(parent_[v], taken);
    for (std::size_t c = 0; c < children_[v].size(); ++c) move_to(children_[v][c], taken);

    // A new child needs one step out and depth+1 steps home.
    if (depth_[v] + 2 > remaining) return;
    const Side child_side = side_[v] == Side::I ? Side::J : Side::I;
    const int slot = child_side == Side::I ? 0 : 1;
    const int child = static_cast<int>(side_.size());
    add_vertex(child_side, next_label_[slot]++, v, depth_[v] + 1);
    children_[v].push_back(child);
    move_to(child, taken);
    children_[v].pop_back();
    --next_label_[slot];
    side_.pop_back();
    label_.pop_back();
    parent_.pop_back();
    depth_.pop_back();
    children_.pop_back();
  }

  int steps_;
  const WordVisitor& visit_;
  std::vector<Side> side_;
  std::vector<std::uint32_t> label_;
  std::vector<int> parent_;
  std::vector<int> depth_;
  std::vector<std::vector<int>> children_;
  std::uint32_t next_label_[2] = {1, 1};
  std::vector<Letter> word_;

  friend std::vector<CanonicalWord> enumerate_tree_words(int, int);
  static CanonicalWord wrap(std::span<const Letter> letters) {
    return CanonicalWord(std::vector<Letter>(letters.begin(), letters.end()));
  }
};

void for_each_tree_word(int k, const WordVisitor& visit, int max_k_guard) {
  check_guard(k, max_k_guard);
  Enumerator(k, visit).run();
}

std::vector<CanonicalWord> enumerate_tree_words(int k, int max_k_guard) {
  std::vector<CanonicalWord> out;
  for_each_tree_word(
      k, [&out](std::span<const Letter> w) { out.push_back(Enumerator::wrap(w)); }, max_k_guard);
  return out;
}

namespace {

// Key for a tree word: tallying multiplicities along the walk. The map keeps
// machine-word tallies; one increment per visited word cannot overflow in any
// feasible run.
std::map<WordClassKey, std::uint64_t> tally_tree_words(int k, int max_k_guard,
                                                        const std::function<bool(const WordClassKey&)>& keep) {
  std::map<WordClassKey, std::uint64_t> tallies;
  for_each_tree_word(
      k,
      [&](std::span<const Letter> w) {
        WordClassKey key = classify(w);
        if (keep(key)) ++tallies[key];
      },
      max_k_guard);
  return tallies;
}

}  // namespace

CountTable count_table(int k, int max_k_guard) {
  auto tallies = tally_tree_words(k, max_k_guard, [](const WordClassKey&) { return true; });
  std::map<WordClassKey, Count> entries;
  for (auto& [key, n] : tallies) entries.emplace(key, Count(n));
  return CountTable(k, std::move(entries));
}

std::map<int, Count> count_quadruple_words(int k, int max_k_guard) {
  if (k < 2) throw InvalidParameter("quadruple-edge words need k >= 2, got " + std::to_string(k));
  check_guard(k, max_k_guard);
  auto tallies = tally_tree_words(k, max_k_guard, [k](const WordClassKey& key) {
    return key.edges == k - 1 && key.multiplicities.front() == 4;
  });
  std::map<int, Count> out;
  for (auto& [key, n] : tallies) out[key.j_vertices] += n;
  return out;
}

Count cardinality_bound(int k) {
  Count pow = 1;
  for (int i = 0; i < k; ++i) pow *= 2 * k;
  Count binom = 1;  // binomial(2k, k), exact at every step
  for (int i = 1; i <= k; ++i) binom = binom * (k + i) / i;
  return pow * binom / (k + 1);
}

nlohmann::json to_json(const CountTable& table) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [key, c] : table.entries()) {
    entries.push_back({{"a", key.edges},
                       {"l", key.j_vertices},
                       {"b", key.multiplicities},
                       {"count", c.convert_to<std::string>()}});
  }
  return {{"k", table.k()}, {"schema", kCountTableSchema}, {"entries", std::move(entries)}};
}

CountTable count_table_from_json(const nlohmann::json& doc) {
  try {
    if (doc.value("schema", kCountTableSchema) != kCountTableSchema)
      throw InvalidParameter("count table schema mismatch");
    const int k = doc.at("k").get<int>();
    std::map<WordClassKey, Count> entries;
    for (const auto& e : doc.at("entries")) {
      WordClassKey key;
      key.k = k;
      key.edges = e.at("a").get<int>();
      key.vertices = key.edges + 1;
      key.j_vertices = e.at("l").get<int>();
      key.multiplicities = e.at("b").get<std::vector<int>>();
      if (static_cast<int>(key.multiplicities.size()) != key.edges)
        throw InvalidParameter("count table entry has |b| != a");
      entries.emplace(std::move(key), Count(e.at("count").get<std::string>()));
    }
    return CountTable(k, std::move(entries));
  } catch (const nlohmann::json::exception& ex) {
    throw InvalidParameter(std::string("malformed count table JSON: ") + ex.what());
  }
}

CountTableCache::CountTableCache(std::optional<std::filesystem::path> directory, int max_k_guard)
    : directory_(std::move(directory)), max_k_guard_(max_k_guard) {}

std::optional<std::filesystem::path> CountTableCache::file_for(int k) const {
  if (!directory_) return std::nullopt;
  return *directory_ / ("count_table_k" + std::to_string(k) + "_v" + std::to_string(kCountTableSchema) + ".json");
}

const CountTable& CountTableCache::table(int k) {
  std::lock_guard lock(mutex_);
  if (auto it = tables_.find(k); it != tables_.end()) return *it->second;
  check_guard(k, max_k_guard_);

  std::unique_ptr<CountTable> loaded;
  auto path = file_for(k);
  if (path && std::filesystem::exists(*path)) {
    try {
      std::ifstream in(*path);
      auto candidate = count_table_from_json(nlohmann::json::parse(in));
      if (candidate.k() == k) loaded = std::make_unique<CountTable>(std::move(candidate));
    } catch (const std::exception&) {
      // stale or corrupt: recompute below
    }
  }
  if (!loaded) {
    loaded = std::make_unique<CountTable>(count_table(k, max_k_guard_));
    if (path) {
      std::filesystem::create_directories(path->parent_path());
      std::ofstream out(*path);
      out << to_json(*loaded).dump() << '\n';
    }
  }
  return *tables_.emplace(k, std::move(loaded)).first->second;
}

}  // namespace wishart::treewords
