#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "vad/dataset.hpp"
#include "vad/scores_io.hpp"

namespace vad {

// Exact AUROC via the Mann–Whitney rank statistic with midranks for ties.
// Throws SingleClassError when only one label class is present.
double auroc(std::span<const double> scores, std::span<const int> labels);

// AUROC over the concatenation of all clips' frames (clips in id order).
double micro_auroc(const ClipScores& scores, const GroundTruth& truth);

struct ClipAuroc {
  std::string clip_id;
  double auroc = 0;

  friend bool operator==(const ClipAuroc&, const ClipAuroc&) = default;
};

struct MacroAuroc {
  double value = 0;
  std::vector<ClipAuroc> per_clip;
  std::vector<std::string> skipped;  // single-class clips
};

// Unweighted mean of per-clip AUROCs over clips with both classes.
MacroAuroc macro_auroc(const ClipScores& scores, const GroundTruth& truth);

struct EvalReport {
  double micro_auroc = 0;
  double macro_auroc = 0;
  std::vector<ClipAuroc> per_clip;
  std::vector<std::string> skipped_clips;
  std::size_t num_clips = 0;
  std::size_t num_frames = 0;
  std::size_t num_anomalous_frames = 0;

  friend bool operator==(const EvalReport&, const EvalReport&) = default;
};

EvalReport evaluate(const ClipScores& scores, const GroundTruth& truth);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_table(const EvalReport& report);

}  // namespace vad
