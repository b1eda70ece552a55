#include "microtext/label_index.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include <fmt/format.h>

#include "microtext/csv.hpp"
#include "microtext/error.hpp"

namespace microtext {

LabelIndex LabelIndex::from_counts(std::vector<std::pair<std::string, std::uint64_t>> counts) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  LabelIndex index;
  index.labels_.reserve(counts.size());
  index.counts_.reserve(counts.size());
  for (auto& [label, count] : counts) {
    if (label.empty()) throw InvalidArgument("empty label");
    const auto id = static_cast<LabelId>(index.labels_.size());
    if (!index.ids_.emplace(label, id).second) {
      throw InvalidArgument(fmt::format("duplicate label '{}'", label));
    }
    index.labels_.push_back(std::move(label));
    index.counts_.push_back(count);
  }
  return index;
}

std::optional<LabelId> LabelIndex::find(std::string_view label) const {
  auto it = ids_.find(std::string(label));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

void LabelIndex::save_csv(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out << "label,count\n";
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    out << csv::escape(labels_[i]) << ',' << counts_[i] << '\n';
  }
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

LabelIndex LabelIndex::load_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::string line;
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("label,count", 0) == 0) continue;
    if (line.empty()) continue;
    auto fields = csv::split_record(line);
    std::uint64_t count = 0;
    if (fields.size() != 2) {
      throw InvalidArgument(fmt::format("{}:{}: expected 2 fields", path.string(), line_no));
    }
    auto [ptr, ec] = std::from_chars(fields[1].data(), fields[1].data() + fields[1].size(), count);
    if (ec != std::errc() || ptr != fields[1].data() + fields[1].size()) {
      throw InvalidArgument(fmt::format("{}:{}: bad count '{}'", path.string(), line_no, fields[1]));
    }
    counts.emplace_back(std::move(fields[0]), count);
  }
  return from_counts(std::move(counts));
}

}  // namespace microtext
