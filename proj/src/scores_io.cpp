#include "vad/scores_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vad/error.hpp"
#include "vad/version.hpp"

namespace vad {
namespace {

std::string shortest(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

bool valid_clip_id(const std::string& id) {
  return !id.empty() && id.find_first_of(" \t\r\n#") == std::string::npos;
}

}  // namespace

std::string format_scores(const ClipScores& scores) {
  std::ostringstream out;
  out << "# vad-scores format_version=" << kFormatVersion << " tool=" << kToolName << ' ' << kToolVersion << '\n';
  for (const auto& [clip, values] : scores) {
    if (!valid_clip_id(clip)) throw ValidationError("write_scores: invalid clip_id '" + clip + "'");
    for (std::size_t f = 0; f < values.size(); ++f) {
      if (!std::isfinite(values[f])) {
        throw ValidationError("write_scores: non-finite score at clip '" + clip + "' frame " + std::to_string(f));
      }
      out << clip << ' ' << f << ' ' << shortest(values[f]) << '\n';
    }
  }
  return out.str();
}

void write_scores(const ClipScores& scores, const std::filesystem::path& path) {
  const std::string text = format_scores(scores);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open scores file '" + path.string() + "' for writing");
  out << text;
  if (!out) throw std::runtime_error("write failed for scores file '" + path.string() + "'");
}

ScoreTable read_scores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open scores file '" + path.string() + "'");
  ScoreTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    std::string clip, frame_text, score_text, extra;
    auto fail = [&](const std::string& what) {
      throw ValidationError("scores file '" + path.string() + "' line " + std::to_string(line_no) + ": " + what);
    };
    if (!(fields >> clip >> frame_text >> score_text) || (fields >> extra)) {
      fail("expected 'clip_id frame_index score'");
    }
    int frame = -1;
    auto fr = std::from_chars(frame_text.data(), frame_text.data() + frame_text.size(), frame);
    if (fr.ec != std::errc() || fr.ptr != frame_text.data() + frame_text.size() || frame < 0) {
      fail("bad frame index '" + frame_text + "'");
    }
    double score = 0;
    auto sr = std::from_chars(score_text.data(), score_text.data() + score_text.size(), score);
    if (sr.ec != std::errc() || sr.ptr != score_text.data() + score_text.size() || !std::isfinite(score)) {
      fail("bad score '" + score_text + "'");
    }
    if (!table[clip].emplace(frame, score).second) fail("duplicate frame " + frame_text + " for clip '" + clip + "'");
  }
  return table;
}

ClipScores align_scores(const ScoreTable& table, const std::map<std::string, std::size_t>& frame_counts) {
  ClipScores out;
  std::vector<std::string> missing;
  std::size_t missing_total = 0;
  for (const auto& [clip, n] : frame_counts) {
    auto it = table.find(clip);
    std::vector<double> values(n, 0.0);
    for (std::size_t f = 0; f < n; ++f) {
      const double* v = nullptr;
      if (it != table.end()) {
        auto fit = it->second.find(static_cast<int>(f));
        if (fit != it->second.end()) v = &fit->second;
      }
      if (v) {
        values[f] = *v;
      } else {
        if (missing.size() < 20) missing.push_back("(" + clip + ", " + std::to_string(f) + ")");
        ++missing_total;
      }
    }
    out.emplace(clip, std::move(values));
  }
  if (missing_total > 0) {
    std::string msg = "scores do not cover " + std::to_string(missing_total) + " labeled frame(s):";
    for (const auto& m : missing) msg += " " + m;
    if (missing_total > missing.size()) msg += " ...";
    throw ValidationError(msg);
  }
  return out;
}

}  // namespace vad
