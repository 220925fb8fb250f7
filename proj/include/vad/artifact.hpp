#pragma once

// Model artifact directory:
//
//   artifact.json            config snapshot, calibration, pose target, dims, model list
//   <feature>_<kind>.json    per-model header: kind, hyperparameters, seed, tensor files
//   <feature>_<kind>.*.vadt  float64 parameter tensors
//
// Everything is written deterministically, so refitting with the same seed
// reproduces the directory byte for byte.

#include <filesystem>

#include "vad/pipeline.hpp"

namespace vad {

void save_artifact(const FittedModels& models, const std::filesystem::path& dir);
FittedModels load_artifact(const std::filesystem::path& dir);

}  // namespace vad
