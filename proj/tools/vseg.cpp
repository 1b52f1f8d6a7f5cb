// vseg command line: the full pipeline, its individual stages, evaluation and the synthetic
// scene generator.

#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vseg/vseg.hpp"

namespace {

enum Exit { kOk = 0, kUsage = 1, kData = 2, kInternal = 3 };

struct PipelineArgs {
  std::string input;
  std::string output;
  std::string config;
  std::string truth;
  std::string debug_dir;
  std::string trimap;
  std::string name;
  int threads = 1;
  std::vector<std::string> overrides;
};

void add_pipeline_options(CLI::App* cmd, PipelineArgs& a, bool with_truth) {
  cmd->add_option("--input", a.input, "Folder of indexed frame images")->required()->check(CLI::ExistingDirectory);
  cmd->add_option("--output", a.output, "Output folder")->required();
  cmd->add_option("--config", a.config, "key = value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--set", a.overrides, "Configuration override key=value (repeatable)");
  cmd->add_option("--debug-dir", a.debug_dir, "Write per-stage debug images here");
  cmd->add_option("--threads", a.threads, "Worker threads")->check(CLI::PositiveNumber);
  if (with_truth) {
    cmd->add_option("--truth", a.truth, "Ground-truth mask folder; writes report.csv")->check(CLI::ExistingDirectory);
    cmd->add_option("--name", a.name, "Sequence name in the report (default: input folder name)");
  }
}

vseg::PipelineConfig build_config(const PipelineArgs& a) {
  vseg::PipelineConfig cfg;
  if (!a.config.empty()) cfg = vseg::load_config(a.config);
  for (const auto& o : a.overrides) vseg::apply_override(cfg, o);
  vseg::validate(cfg);
  return cfg;
}

int run_stage(const PipelineArgs& a, vseg::Stage last) {
  const vseg::PipelineConfig cfg = build_config(a);
  vseg::RunOptions opt;
  opt.input = a.input;
  opt.output = a.output;
  if (!a.truth.empty()) opt.truth = a.truth;
  if (!a.debug_dir.empty()) opt.debug_dir = a.debug_dir;
  if (!a.trimap.empty()) opt.trimap = a.trimap;
  opt.name = a.name;
  opt.last = last;
  opt.threads = a.threads;
  opt.log = &std::cerr;
  const auto rep = vseg::run_pipeline(opt, cfg);
  std::cout << rep.result.frames << " frames -> " << a.output << '\n';
  if (rep.report) std::cout << vseg::report_table({*rep.report});
  return kOk;
}

struct EvalArgs {
  std::vector<std::string> results;
  std::vector<std::string> truths;
  std::vector<std::string> names;
  std::string output;
};

int run_eval(const EvalArgs& a) {
  if (a.results.size() != a.truths.size() || (!a.names.empty() && a.names.size() != a.results.size())) {
    throw vseg::config_error("--result, --truth and --name must be given the same number of times");
  }
  std::vector<vseg::SequenceReport> reports;
  for (std::size_t i = 0; i < a.results.size(); ++i) {
    std::string name = a.names.empty() ? "" : a.names[i];
    if (name.empty()) {
      std::filesystem::path p = std::filesystem::absolute(a.truths[i]).lexically_normal();
      if (p.filename().empty()) p = p.parent_path();
      name = p.filename().string();
    }
    reports.push_back(vseg::xor_error(vseg::read_ground_truth(a.results[i]), vseg::read_ground_truth(a.truths[i]), name));
  }
  std::cout << vseg::report_table(reports);
  const std::filesystem::path dir = a.output.empty() ? std::filesystem::path(".") : std::filesystem::path(a.output);
  std::filesystem::create_directories(dir);
  std::ofstream csv(dir / "report.csv");
  if (!csv) throw vseg::io_error("cannot write " + (dir / "report.csv").string());
  csv << vseg::report_csv(reports);
  return kOk;
}

int run_synth(const std::string& output, const vseg::SceneSpec& spec) {
  const auto clip = vseg::make_synthetic(spec);
  vseg::write_synthetic(clip, output);
  std::cout << clip.frames.size() << " frames -> " << output << "/frames, truth -> " << output << "/truth\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Video object segmentation from point trajectories and motion supervoxels"};
  app.require_subcommand(1);

  PipelineArgs args;
  struct StageCommand {
    const char* name;
    const char* help;
    vseg::Stage last;
    bool truth;
  };
  const StageCommand stages[] = {
      {"run", "Full pipeline: masks/ (plus report.csv with --truth)", vseg::Stage::fine, true},
      {"track", "Tracking and motion clustering only: tracks.csv", vseg::Stage::track, false},
      {"supervoxel", "Supervoxels only: supervoxels/", vseg::Stage::supervoxel, false},
      {"coarse", "Through coarse fusion: trimap/", vseg::Stage::coarse, false},
      {"fine", "Fine segmentation: masks/ (from --trimap when given)", vseg::Stage::fine, true},
  };
  std::vector<std::pair<CLI::App*, vseg::Stage>> stage_cmds;
  for (const auto& s : stages) {
    CLI::App* cmd = app.add_subcommand(s.name, s.help);
    add_pipeline_options(cmd, args, s.truth);
    if (std::string(s.name) == "fine") {
      cmd->add_option("--trimap", args.trimap, "Trimap folder (0 bg, 128 undetermined, 255 fg) to refine")
          ->check(CLI::ExistingDirectory);
    }
    stage_cmds.emplace_back(cmd, s.last);
  }

  EvalArgs eval;
  CLI::App* eval_cmd = app.add_subcommand("eval", "Mean per-frame pixel error of result masks: table and report.csv");
  eval_cmd->add_option("--result", eval.results, "Result mask folder (repeatable)")->required();
  eval_cmd->add_option("--truth", eval.truths, "Ground-truth mask folder (repeatable)")->required();
  eval_cmd->add_option("--name", eval.names, "Sequence name (repeatable)");
  eval_cmd->add_option("--output", eval.output, "Folder for report.csv (default: current folder)");

  vseg::SceneSpec scene;
  std::string synth_out;
  CLI::App* synth_cmd = app.add_subcommand("synth", "Write a synthetic moving-square sequence with truth masks");
  synth_cmd->add_option("--output", synth_out, "Output folder (frames/ and truth/)")->required();
  synth_cmd->add_option("--width", scene.width)->capture_default_str();
  synth_cmd->add_option("--height", scene.height)->capture_default_str();
  synth_cmd->add_option("--frames", scene.frames)->capture_default_str();
  synth_cmd->add_option("--size", scene.object_width, "Side of the square")->capture_default_str();
  synth_cmd->add_option("--speed-x", scene.speed_x, "Pixels per frame")->capture_default_str();
  synth_cmd->add_option("--speed-y", scene.speed_y, "Pixels per frame")->capture_default_str();
  synth_cmd->add_option("--seed", scene.seed)->capture_default_str();
  bool flat = false;
  synth_cmd->add_flag("--flat", flat, "Untextured background");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    for (const auto& [cmd, last] : stage_cmds) {
      if (cmd->parsed()) return run_stage(args, last);
    }
    if (eval_cmd->parsed()) return run_eval(eval);
    if (synth_cmd->parsed()) {
      scene.object_height = scene.object_width;
      scene.textured_background = !flat;
      return run_synth(synth_out, scene);
    }
  } catch (const vseg::config_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const vseg::data_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kData;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternal;
  }
  return kInternal;
}
