#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "microtext/corpus.hpp"

namespace microtext::synthetic {

struct CorpusSpec {
  std::size_t n_docs = 2000;
  std::uint64_t seed = 7;
  double misspell_rate = 0.8;     // chance that a class word gets 1-2 random edits
  double second_label_rate = 0.1; // chance of an extra, unrelated class hashtag
};

/// Class hashtags of the generated corpus.
const std::vector<std::string>& class_names();

/// Tweets whose class is carried only by a few topic words, each inflected
/// and usually misspelled, among filler words shared by all classes. Texts
/// also carry retweet markers, URLs, shouting, repeated letters and accents.
/// Texts are distinct, so ingest keeps all `n_docs` records. Deterministic
/// for a given spec on every platform.
std::vector<corpus::Tweet> generate(const CorpusSpec& spec = {});

/// One `{"id","text","hashtags"}` JSON object per line.
void write_jsonl(const std::filesystem::path& path, std::span<const corpus::Tweet> tweets);

}  // namespace microtext::synthetic
