#pragma once

// Per-frame score files: text, one "clip_id frame_index score" line per frame,
// clips in lexicographic order, frames ascending. Lines starting with '#' are
// comments; the first line stamps the format and tool version. Scores use the
// shortest decimal form that round-trips the double exactly.

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace vad {

using ClipScores = std::map<std::string, std::vector<double>>;

// Sparse form as read back from disk: clip -> frame -> score.
using ScoreTable = std::map<std::string, std::map<int, double>>;

void write_scores(const ClipScores& scores, const std::filesystem::path& path);
std::string format_scores(const ClipScores& scores);

ScoreTable read_scores(const std::filesystem::path& path);

// Densifies a table, requiring frames 0..n-1 for every clip in `frame_counts`.
// Throws ValidationError listing the missing (clip, frame) pairs.
ClipScores align_scores(const ScoreTable& table, const std::map<std::string, std::size_t>& frame_counts);

}  // namespace vad
