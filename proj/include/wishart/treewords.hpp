#pragma once

// Closed words i1 j1 i2 j2 ... jk i1 on bipartite trees, up to independent
// relabeling of the row (I) and column (J) indices, and the exact class counts
// |W_k(a, a+1, l, b)| that enter the limiting moment formula.

#include "wishart/alpha_polynomial.hpp"

#include <compare>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace wishart::treewords {

inline constexpr int kDefaultMaxK = 10;
inline constexpr int kCountTableSchema = 1;

enum class Side : std::uint8_t { I, J };

struct Letter {
  Side side;
  std::uint32_t index;  // 1-based

  friend auto operator<=>(const Letter&, const Letter&) = default;
};

inline Letter I(std::uint32_t index) { return {Side::I, index}; }
inline Letter J(std::uint32_t index) { return {Side::J, index}; }

std::string to_string(const Letter& letter);

/// A closed alternating word in first-appearance labeling. Only
/// canonicalize() and the enumerator construct these.
class CanonicalWord {
 public:
  std::span<const Letter> letters() const { return letters_; }
  /// Number of J positions.
  int half_length() const { return static_cast<int>(letters_.size() / 2); }
  std::string to_string() const;

  friend auto operator<=>(const CanonicalWord&, const CanonicalWord&) = default;

 private:
  friend CanonicalWord canonicalize(std::span<const Letter>);
  friend class Enumerator;
  explicit CanonicalWord(std::vector<Letter> letters) : letters_(std::move(letters)) {}
  std::vector<Letter> letters_;
};

struct WordClassKey {
  int k = 0;
  int edges = 0;      // a
  int vertices = 0;   // s
  int j_vertices = 0; // l
  std::vector<int> multiplicities;  // b, non-increasing

  friend auto operator<=>(const WordClassKey&, const WordClassKey&) = default;
};

std::string to_string(const WordClassKey& key);

using Count = BigInt;

/// Exact counts of enumerated classes for one half-length k. Immutable once
/// built.
class CountTable {
 public:
  CountTable() = default;
  CountTable(int k, std::map<WordClassKey, Count> entries);

  int k() const { return k_; }
  const std::map<WordClassKey, Count>& entries() const { return entries_; }
  Count count(const WordClassKey& key) const;
  Count total() const;

  /// Σ_l α^l · |W_k(a, a+1, l, b)| over the keys with multiplicity vector b.
  AlphaPolynomial weighted_by_j_vertices(const std::vector<int>& b) const;
  /// Same slice weighted by α^(a - l) (the role-swapped count).
  AlphaPolynomial weighted_by_i_edges(const std::vector<int>& b) const;

  friend bool operator==(const CountTable&, const CountTable&) = default;

 private:
  int k_ = 0;
  std::map<WordClassKey, Count> entries_;
};

/// First-appearance relabeling per side. Throws InvalidParameter on words that
/// are too short, even-length, non-alternating, not starting on I, not closed,
/// or that use index 0.
CanonicalWord canonicalize(std::span<const Letter> raw);

/// Callback receives each canonical tree word of half-length k (2k+1 letters)
/// in lexicographic order.
using WordVisitor = std::function<void(std::span<const Letter>)>;

/// Depth-first generation of every closed walk of length 2k on a tree grown
/// on the fly from an I-root. Labels are issued in first-appearance order, so
/// each equivalence class is produced exactly once. Closed tree walks traverse
/// every edge an even number of times, hence at least twice.
void for_each_tree_word(int k, const WordVisitor& visit, int max_k_guard = kDefaultMaxK);

std::vector<CanonicalWord> enumerate_tree_words(int k, int max_k_guard = kDefaultMaxK);

WordClassKey classify(const CanonicalWord& word);
WordClassKey classify(std::span<const Letter> word);

CountTable count_table(int k, int max_k_guard = kDefaultMaxK);

/// |W_k(k-1, k, l, (4,2,...,2))| indexed by l. Requires k >= 2.
std::map<int, Count> count_quadruple_words(int k, int max_k_guard = kDefaultMaxK);

/// (2k)^k / (k+1) · binomial(2k, k), rounded down.
Count cardinality_bound(int k);

nlohmann::json to_json(const CountTable& table);
/// Throws InvalidParameter on schema mismatches.
CountTable count_table_from_json(const nlohmann::json& doc);

/// Memoizes count tables in memory and, if a directory is configured, on disk
/// as count_table_k<K>_v<schema>.json. Files with another schema version or a
/// mismatched k are ignored and rewritten. Thread-safe.
class CountTableCache {
 public:
  explicit CountTableCache(std::optional<std::filesystem::path> directory = std::nullopt,
                           int max_k_guard = kDefaultMaxK);

  const CountTable& table(int k);
  int max_k_guard() const { return max_k_guard_; }
  std::optional<std::filesystem::path> file_for(int k) const;

 private:
  std::optional<std::filesystem::path> directory_;
  int max_k_guard_;
  std::mutex mutex_;
  std::map<int, std::unique_ptr<CountTable>> tables_;
};

}  // namespace wishart::treewords
