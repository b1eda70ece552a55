#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

#include "microtext/error.hpp"
#include "microtext/models.hpp"

namespace microtext::models {

// Model file layout, all integers and floats little-endian:
//
//   offset  size  field
//   0       4     magic "MTXT"
//   4       2     format version (u16), currently 1
//   6       1     kind: 1 = naive Bayes, 2 = SVM, 3 = logistic regression
//   7       1     reserved, 0
//   8       8     n_classes (u64)
//   16      8     n_features (u64)
//   24      8     alpha (naive Bayes) or C (linear), f64
//   32      ...   naive Bayes: log_prior[K], log_likelihood[K*V] (f64)
//                 linear: bias[K], weights[K*V] (f64), then M meta
//                 records {iterations u64, objective f64} where M = K for
//                 the SVM and 1 for logistic regression
//   end-4   4     CRC-32 (zlib polynomial) of every preceding byte

inline constexpr std::uint16_t kModelFormatVersion = 1;

/// Base for malformed model files.
class ModelFormatError : public Error {
 public:
  using Error::Error;
};

/// Wrong magic bytes, unknown kind, or unsupported format version.
class ModelVersionError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

/// The file ends before the sizes in its header say it should.
class ModelTruncatedError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

/// The trailing CRC-32 does not match the content.
class ModelChecksumError : public ModelFormatError {
 public:
  using ModelFormatError::ModelFormatError;
};

using Model = std::variant<MnbModel, LinearModel>;

std::size_t model_classes(const Model& model);
std::size_t model_features(const Model& model);
Prediction predict(const Model& model, const SparseVector& x);

std::vector<std::uint8_t> serialize_model(const Model& model);
/// Throws the ModelFormatError subclasses above.
Model deserialize_model(std::span<const std::uint8_t> bytes);

void save_model(const std::filesystem::path& path, const Model& model);
Model load_model(const std::filesystem::path& path);

}  // namespace microtext::models
