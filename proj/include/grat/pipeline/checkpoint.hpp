#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "grat/autodiff/adam.hpp"
#include "grat/pipeline/model.hpp"

namespace grat::pipe {

// Layout: "GRATCKPT", u32 version, u64 manifest length, JSON manifest,
// u64 blob length, blob of little-endian f64. The manifest maps each tensor
// name to dtype, shape and byte offset into the blob.
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct TensorRecord {
  ad::Shape shape;
  std::vector<double> values;
  bool operator==(const TensorRecord&) const = default;
};

struct Checkpoint {
  RunConfig config;
  ModelSpec spec;
  std::vector<double> target_mean;
  std::vector<double> target_std;
  std::map<std::string, TensorRecord> params;
  std::optional<ad::AdamState> adam;
};

Checkpoint make_checkpoint(const GratModel& model, const ad::AdamState* adam = nullptr);
std::string encode_checkpoint(const Checkpoint& ckpt);
/// Throws CheckpointError naming the defect: "bad magic", "unsupported
/// version", "truncated ...", "overlapping offsets", ...
Checkpoint decode_checkpoint(const std::string& bytes);

void save_checkpoint(const std::string& path, const GratModel& model, const ad::AdamState* adam = nullptr);
Checkpoint load_checkpoint(const std::string& path);

/// Rebuilds the model and copies every parameter in. Throws CheckpointError
/// when the stored tensors do not match the model's registry.
GratModel model_from_checkpoint(const Checkpoint& ckpt);

}  // namespace grat::pipe
