#include "microtext/model_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <fmt/format.h>
#include <zlib.h>

namespace microtext::models {
namespace {

static_assert(std::endian::native == std::endian::little,
              "model files are written with native little-endian stores");

constexpr std::uint8_t kMagic[4] = {'M', 'T', 'X', 'T'};
constexpr std::size_t kHeaderSize = 32;
constexpr std::size_t kCrcSize = 4;

enum Kind : std::uint8_t { kMnbKind = 1, kSvmKind = 2, kLrKind = 3 };

class Writer {
 public:
  template <typename T>
  void put(T value) {
    const auto* p = reinterpret_cast<const std::uint8_t*>(&value);
    bytes_.insert(bytes_.end(), p, p + sizeof(T));
  }
  void put_doubles(std::span<const double> values) {
    for (double v : values) put(v);
  }
  std::vector<std::uint8_t> finish() && {
    const auto crc = static_cast<std::uint32_t>(
        crc32_z(0L, bytes_.data(), bytes_.size()));
    put(crc);
    return std::move(bytes_);
  }

 private:
  std::vector<std::uint8_t> bytes_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get() {
    T value;
    std::memcpy(&value, bytes_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }
  void get_doubles(std::vector<double>& out, std::size_t n) {
    out.resize(n);
    for (auto& v : out) v = get<double>();
  }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

// Overflow-checked n_classes * n_features.
std::size_t checked_product(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > (std::uint64_t{1} << 60) / a) {
    throw ModelTruncatedError(fmt::format("implausible model dimensions {} x {}", a, b));
  }
  return static_cast<std::size_t>(a * b);
}

}  // namespace

std::size_t model_classes(const Model& model) {
  return std::visit([](const auto& m) { return m.n_classes; }, model);
}

std::size_t model_features(const Model& model) {
  return std::visit([](const auto& m) { return m.n_features; }, model);
}

Prediction predict(const Model& model, const SparseVector& x) {
  if (const auto* mnb = std::get_if<MnbModel>(&model)) return mnb_predict(*mnb, x);
  return linear_predict(std::get<LinearModel>(model), x);
}

std::vector<std::uint8_t> serialize_model(const Model& model) {
  Writer w;
  for (auto b : kMagic) w.put(b);
  w.put(kModelFormatVersion);
  if (const auto* mnb = std::get_if<MnbModel>(&model)) {
    w.put(std::uint8_t{kMnbKind});
    w.put(std::uint8_t{0});
    w.put(static_cast<std::uint64_t>(mnb->n_classes));
    w.put(static_cast<std::uint64_t>(mnb->n_features));
    w.put(mnb->alpha);
    w.put_doubles(mnb->log_prior);
    w.put_doubles(mnb->log_likelihood);
  } else {
    const auto& lin = std::get<LinearModel>(model);
    w.put(std::uint8_t{lin.kind == LinearKind::kSvm ? kSvmKind : kLrKind});
    w.put(std::uint8_t{0});
    w.put(static_cast<std::uint64_t>(lin.n_classes));
    w.put(static_cast<std::uint64_t>(lin.n_features));
    w.put(lin.c_reg);
    w.put_doubles(lin.bias);
    w.put_doubles(lin.weights);
    const std::size_t n_meta = lin.kind == LinearKind::kSvm ? lin.n_classes : 1;
    for (std::size_t i = 0; i < n_meta; ++i) {
      const TrainingMeta meta = i < lin.meta.size() ? lin.meta[i] : TrainingMeta{};
      w.put(static_cast<std::uint64_t>(meta.iterations));
      w.put(meta.objective);
    }
  }
  return std::move(w).finish();
}

Model deserialize_model(std::span<const std::uint8_t> bytes) {
  const std::size_t magic_len = std::min<std::size_t>(bytes.size(), 4);
  if (std::memcmp(bytes.data(), kMagic, magic_len) != 0) {
    throw ModelVersionError("not a model file (bad magic bytes)");
  }
  if (bytes.size() < 6) throw ModelTruncatedError("model file header is truncated");
  std::uint16_t version;
  std::memcpy(&version, bytes.data() + 4, sizeof version);
  if (version != kModelFormatVersion) {
    throw ModelVersionError(fmt::format("unsupported model format version {} (expected {})",
                                        version, kModelFormatVersion));
  }
  if (bytes.size() < kHeaderSize + kCrcSize) throw ModelTruncatedError("model file header is truncated");

  Reader r(bytes.subspan(6));
  const auto kind = r.get<std::uint8_t>();
  r.get<std::uint8_t>();
  const auto n_classes = r.get<std::uint64_t>();
  const auto n_features = r.get<std::uint64_t>();
  const auto scalar = r.get<double>();
  if (kind != kMnbKind && kind != kSvmKind && kind != kLrKind) {
    throw ModelVersionError(fmt::format("unknown model kind {}", kind));
  }

  const std::size_t n_weights = checked_product(n_classes, n_features);
  std::size_t payload = (n_classes + n_weights) * sizeof(double);
  if (kind != kMnbKind) payload += (kind == kSvmKind ? n_classes : 1) * 16;
  const std::size_t expected = kHeaderSize + payload + kCrcSize;
  if (bytes.size() < expected) {
    throw ModelTruncatedError(
        fmt::format("model file has {} bytes, header implies {}", bytes.size(), expected));
  }
  std::uint32_t stored_crc;
  std::memcpy(&stored_crc, bytes.data() + bytes.size() - kCrcSize, kCrcSize);
  const auto actual_crc = static_cast<std::uint32_t>(
      crc32_z(0L, bytes.data(), bytes.size() - kCrcSize));
  if (bytes.size() != expected || stored_crc != actual_crc) {
    throw ModelChecksumError("model file checksum mismatch");
  }

  Reader body(bytes.subspan(kHeaderSize));
  if (kind == kMnbKind) {
    MnbModel m;
    m.n_classes = n_classes;
    m.n_features = n_features;
    m.alpha = scalar;
    body.get_doubles(m.log_prior, n_classes);
    body.get_doubles(m.log_likelihood, n_weights);
    return m;
  }
  LinearModel m;
  m.kind = kind == kSvmKind ? LinearKind::kSvm : LinearKind::kLr;
  m.n_classes = n_classes;
  m.n_features = n_features;
  m.c_reg = scalar;
  body.get_doubles(m.bias, n_classes);
  body.get_doubles(m.weights, n_weights);
  m.meta.resize(kind == kSvmKind ? n_classes : 1);
  for (auto& meta : m.meta) {
    meta.iterations = static_cast<int>(body.get<std::uint64_t>());
    meta.objective = body.get<double>();
  }
  return m;
}

void save_model(const std::filesystem::path& path, const Model& model) {
  const auto bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError(fmt::format("cannot write {}", path.string()));
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError(fmt::format("write failed: {}", path.string()));
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError(fmt::format("cannot read {}", path.string()));
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize_model(bytes);
}

}  // namespace microtext::models
