#include "vad/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "vad/artifact.hpp"
#include "vad/error.hpp"
#include "vad/evaluation.hpp"
#include "vad/pipeline.hpp"
#include "vad/synthetic.hpp"
#include "vad/version.hpp"

namespace vad::cli {
namespace fs = std::filesystem;

namespace {

struct Options {
  std::string config_file;
  std::string profile;
  unsigned threads = 1;
  std::optional<std::uint64_t> seed;

  std::string data;
  std::string out;
  std::string artifact;
  std::string scores;
  std::string raw_out;
  std::string split = "all";
};

PipelineConfig resolve_config(const Options& o) {
  PipelineConfig c = profile_config(o.profile.empty() ? "default" : o.profile);
  if (!o.config_file.empty()) c = load_config_file(o.config_file, c);
  // An explicit --profile wins over the file's profile key.
  if (!o.profile.empty() && c.profile != o.profile) {
    const auto file = c;
    c = profile_config(o.profile);
    c.seed = file.seed;
  }
  if (o.seed) c.seed = *o.seed;
  c.validate();
  return c;
}

int cmd_gen_synthetic(const Options& o, std::ostream& out) {
  SynthConfig sc;
  if (!o.config_file.empty()) {
    std::ifstream in(o.config_file);
    if (!in) throw ValidationError("cannot open synthetic config '" + o.config_file + "'");
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("synthetic config '" + o.config_file + "': " + e.what());
    }
    sc = synth_config_from_json(j);
  }
  if (o.seed) sc.seed = *o.seed;
  const fs::path root(o.out);
  const SynthSummary s = generate_synthetic(sc, root);
  const nlohmann::json stamp = {{"tool", kToolName},
                                {"tool_version", kToolVersion},
                                {"format_version", kFormatVersion},
                                {"synthetic_config", synth_config_to_json(sc)}};
  std::ofstream(root / "synthetic.json", std::ios::trunc) << stamp.dump(2) << '\n';
  out << "wrote synthetic dataset to " << root.string() << ": " << s.train_objects << " train objects, "
      << s.test_objects << " test objects, " << s.anomalous_frames << "/" << s.test_frames
      << " anomalous test frames\n";
  return kExitOk;
}

int cmd_validate(const Options& o, std::ostream& out) {
  std::vector<Split> splits;
  if (o.split == "all" || o.split == "train") splits.push_back(Split::Train);
  if (o.split == "all" || o.split == "test") splits.push_back(Split::Test);
  for (Split split : splits) {
    const Dataset ds = load_dataset(o.data, split, LoadOptions{true, o.threads});
    out << to_string(split) << ": " << ds.clips.size() << " clips, " << ds.object_count() << " objects"
        << ", keypoint_count " << ds.manifest.keypoint_count << ", embedding_dim "
        << (ds.manifest.embedding_dim ? std::to_string(*ds.manifest.embedding_dim) : "none") << '\n';
    if (split == Split::Test) {
      const GroundTruth gt = load_ground_truth(o.data, ds.manifest);
      std::size_t frames = 0, anomalous = 0;
      for (const auto& [clip, labels] : gt) {
        frames += labels.size();
        for (int l : labels) anomalous += static_cast<std::size_t>(l);
      }
      out << "test labels: " << anomalous << "/" << frames << " anomalous frames\n";
    }
  }
  out << "validation passed with 0 errors\n";
  return kExitOk;
}

int cmd_fit(const Options& o, std::ostream& out) {
  const PipelineConfig config = resolve_config(o);
  const Dataset train = load_dataset(o.data, Split::Train, LoadOptions{true, o.threads});
  const FittedModels models = fit_dataset(train, config, o.threads);
  save_artifact(models, o.out);
  out << "fitted " << models.calibration.bounds.size() << " feature model(s) on " << train.object_count()
      << " training objects (profile " << config.profile << ", seed " << config.seed << ")\n";
  for (const auto& [f, b] : models.calibration.bounds) {
    out << "  " << feature_name(f) << ": train score range [" << b.min << ", " << b.max << "]"
        << (b.degenerate() ? " (degenerate, contributes 0)" : "") << '\n';
  }
  out << "artifact written to " << o.out << '\n';
  return kExitOk;
}

int cmd_score(const Options& o, std::ostream& out) {
  const FittedModels models = load_artifact(o.artifact);
  const Dataset test = load_dataset(o.data, Split::Test, LoadOptions{true, o.threads});
  const ScoreResult result = score_dataset(models, test, o.threads);
  write_scores(result.smoothed, o.out);
  if (!o.raw_out.empty()) write_scores(result.raw, o.raw_out);
  std::size_t frames = 0;
  for (const auto& [clip, s] : result.smoothed) frames += s.size();
  out << "scored " << frames << " frames in " << result.smoothed.size() << " clips -> " << o.out << '\n';
  return kExitOk;
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const DatasetManifest manifest = load_manifest(o.data, Split::Test);
  const GroundTruth gt = load_ground_truth(o.data, manifest);
  std::map<std::string, std::size_t> counts;
  for (const auto& [clip, labels] : gt) counts[clip] = labels.size();
  const ClipScores scores = align_scores(read_scores(o.scores), counts);
  const EvalReport report = evaluate(scores, gt);
  const std::string json = report_to_json(report);
  if (!o.out.empty()) {
    std::ofstream f(o.out, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot open report '" + o.out + "' for writing");
    f << json;
  }
  out << report_table(report);
  if (o.out.empty()) out << '\n' << json;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Object-level video anomaly detection: velocity, pose, and deep-feature density scoring"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", std::string(kToolName) + " " + kToolVersion);

  Options o;
  app.add_option("--config", o.config_file, "JSON config file (pipeline config, or synthetic config for gen-synthetic)");
  app.add_option("--profile", o.profile, "Preset: default, ped2-like, shanghaitech-like");
  app.add_option("--threads", o.threads, "Worker threads; results do not depend on it")->check(CLI::Range(1u, 1024u));
  app.add_option("--seed", o.seed, "Override the configured seed");

  auto* gen = app.add_subcommand("gen-synthetic", "Generate a labeled synthetic dataset");
  gen->add_option("--out", o.out, "Dataset root to create")->required();

  auto* validate = app.add_subcommand("validate", "Validate a dataset directory");
  validate->add_option("--data", o.data, "Dataset root")->required();
  validate->add_option("--split", o.split, "train, test, or all")->check(CLI::IsMember({"train", "test", "all"}));

  auto* fit = app.add_subcommand("fit", "Fit density models and calibration on the train split");
  fit->add_option("--data", o.data, "Dataset root")->required();
  fit->add_option("--out", o.out, "Artifact directory to write")->required();

  auto* score = app.add_subcommand("score", "Score the test split with a fitted artifact");
  score->add_option("--data", o.data, "Dataset root")->required();
  score->add_option("--artifact", o.artifact, "Artifact directory")->required();
  score->add_option("--out", o.out, "Scores file to write")->required();
  score->add_option("--raw-out", o.raw_out, "Also write unsmoothed frame scores here");

  auto* eval = app.add_subcommand("evaluate", "Frame-level micro/macro AUROC of a scores file");
  eval->add_option("--scores", o.scores, "Scores file")->required();
  eval->add_option("--data", o.data, "Dataset root holding test labels")->required();
  eval->add_option("--out", o.out, "Write the JSON report here");

  std::vector<std::string> argv_store{kToolName};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_store) argv.push_back(a.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*gen) return cmd_gen_synthetic(o, out);
    if (*validate) return cmd_validate(o, out);
    if (*fit) return cmd_fit(o, out);
    if (*score) return cmd_score(o, out);
    if (*eval) return cmd_evaluate(o, out);
  } catch (const ValidationError& e) {
    err << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const CompatibilityError& e) {
    err << "compatibility error: " << e.what() << '\n';
    return kExitCompatibility;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitInternal;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace vad::cli
