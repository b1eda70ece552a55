#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace microtext {

using LabelId = std::uint32_t;

/// The selected hashtag labels, ordered by descending tweet count with
/// lexicographic tie-break. A label's position in that order is its id.
class LabelIndex {
 public:
  LabelIndex() = default;

  /// Builds an index from (label, count) pairs. The pairs are reordered
  /// into canonical order; duplicate labels are rejected.
  static LabelIndex from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts);

  std::size_t size() const { return labels_.size(); }
  bool empty() const { return labels_.empty(); }

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::uint64_t>& counts() const { return counts_; }
  const std::string& label(LabelId id) const { return labels_.at(id); }
  std::uint64_t count(LabelId id) const { return counts_.at(id); }

  std::optional<LabelId> find(std::string_view label) const;
  bool contains(std::string_view label) const { return find(label).has_value(); }

  /// Two-column CSV with a `label,count` header row.
  void save_csv(const std::filesystem::path& path) const;
  static LabelIndex load_csv(const std::filesystem::path& path);

  friend bool operator==(const LabelIndex& a, const LabelIndex& b) {
    return a.labels_ == b.labels_ && a.counts_ == b.counts_;
  }

 private:
  std::vector<std::string> labels_;
  std::vector<std::uint64_t> counts_;
  std::unordered_map<std::string, LabelId> ids_;
};

}  // namespace microtext
