#include "vad/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "vad/error.hpp"
#include "vad/version.hpp"

namespace vad {
namespace {

void check_inputs(const ClipScores& scores, const GroundTruth& truth) {
  for (const auto& [clip, labels] : truth) {
    auto it = scores.find(clip);
    if (it == scores.end()) throw ValidationError("no scores for clip '" + clip + "'");
    if (it->second.size() != labels.size()) {
      throw ValidationError("clip '" + clip + "': " + std::to_string(it->second.size()) + " scores for " +
                            std::to_string(labels.size()) + " labels");
    }
  }
}

}  // namespace

double auroc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("auroc: scores and labels differ in length");
  const std::size_t n = scores.size();
  std::size_t positives = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw ValidationError("auroc: labels must be 0 or 1");
    positives += static_cast<std::size_t>(l);
  }
  for (double s : scores)
    if (!std::isfinite(s)) throw ValidationError("auroc: non-finite score");
  const std::size_t negatives = n - positives;
  if (positives == 0 || negatives == 0) throw SingleClassError("auroc: labels contain a single class");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of midranks (1-based) of the positives; ranks are kept doubled so they stay integral.
  double doubled_rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double doubled_midrank = static_cast<double>(i + 1 + j);
    for (std::size_t t = i; t < j; ++t)
      if (labels[order[t]] == 1) doubled_rank_sum += doubled_midrank;
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double u = doubled_rank_sum / 2.0 - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(negatives));
}

double micro_auroc(const ClipScores& scores, const GroundTruth& truth) {
  check_inputs(scores, truth);
  std::vector<double> all_scores;
  std::vector<int> all_labels;
  for (const auto& [clip, labels] : truth) {
    const auto& s = scores.at(clip);
    all_scores.insert(all_scores.end(), s.begin(), s.end());
    all_labels.insert(all_labels.end(), labels.begin(), labels.end());
  }
  return auroc(all_scores, all_labels);
}

MacroAuroc macro_auroc(const ClipScores& scores, const GroundTruth& truth) {
  check_inputs(scores, truth);
  MacroAuroc out;
  double sum = 0.0;
  for (const auto& [clip, labels] : truth) {
    const bool has_pos = std::find(labels.begin(), labels.end(), 1) != labels.end();
    const bool has_neg = std::find(labels.begin(), labels.end(), 0) != labels.end();
    if (!has_pos || !has_neg) {
      out.skipped.push_back(clip);
      continue;
    }
    const double a = auroc(scores.at(clip), labels);
    out.per_clip.push_back({clip, a});
    sum += a;
  }
  if (out.per_clip.empty()) throw ValidationError("macro_auroc: no clip contains both normal and anomalous frames");
  out.value = sum / static_cast<double>(out.per_clip.size());
  return out;
}

EvalReport evaluate(const ClipScores& scores, const GroundTruth& truth) {
  EvalReport r;
  r.micro_auroc = micro_auroc(scores, truth);
  auto macro = macro_auroc(scores, truth);
  r.macro_auroc = macro.value;
  r.per_clip = std::move(macro.per_clip);
  r.skipped_clips = std::move(macro.skipped);
  r.num_clips = truth.size();
  for (const auto& [clip, labels] : truth) {
    r.num_frames += labels.size();
    r.num_anomalous_frames += static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
  }
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json per_clip = nlohmann::json::array();
  for (const auto& c : r.per_clip) per_clip.push_back({{"clip_id", c.clip_id}, {"auroc", c.auroc}});
  nlohmann::json j = {{"tool", kToolName},
                      {"tool_version", kToolVersion},
                      {"format_version", kFormatVersion},
                      {"micro_auroc", r.micro_auroc},
                      {"macro_auroc", r.macro_auroc},
                      {"per_clip", per_clip},
                      {"skipped_clips", r.skipped_clips},
                      {"num_clips", r.num_clips},
                      {"num_frames", r.num_frames},
                      {"num_anomalous_frames", r.num_anomalous_frames}};
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  EvalReport r;
  try {
    const auto j = nlohmann::json::parse(text);
    r.micro_auroc = j.at("micro_auroc").get<double>();
    r.macro_auroc = j.at("macro_auroc").get<double>();
    for (const auto& c : j.at("per_clip")) r.per_clip.push_back({c.at("clip_id"), c.at("auroc")});
    r.skipped_clips = j.at("skipped_clips").get<std::vector<std::string>>();
    r.num_clips = j.at("num_clips");
    r.num_frames = j.at("num_frames");
    r.num_anomalous_frames = j.at("num_anomalous_frames");
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("malformed evaluation report: ") + e.what());
  }
  return r;
}

std::string report_table(const EvalReport& r) {
  std::ostringstream out;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "micro AUROC  %.4f\nmacro AUROC  %.4f\n", r.micro_auroc, r.macro_auroc);
  out << buf;
  out << "frames " << r.num_frames << " (" << r.num_anomalous_frames << " anomalous) in " << r.num_clips
      << " clips\n\n";
  out << "clip                     AUROC\n";
  for (const auto& c : r.per_clip) {
    std::snprintf(buf, sizeof(buf), "%-24s %.4f\n", c.clip_id.c_str(), c.auroc);
    out << buf;
  }
  for (const auto& s : r.skipped_clips) {
    std::snprintf(buf, sizeof(buf), "%-24s skipped (single class)\n", s.c_str());
    out << buf;
  }
  return out.str();
}

}  // namespace vad
