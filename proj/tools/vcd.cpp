// vcd — video copy detection toolkit command line.
//
// Subcommands: probe, curve, select, describe, attack, match, eval,
// gen-corpus, bench. Exit codes: 0 success, 2 usage error, 3 data/format
// error, 4 internal invariant violation.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "vcd/attack.hpp"
#include "vcd/corpus.hpp"
#include "vcd/curve.hpp"
#include "vcd/descriptor.hpp"
#include "vcd/experiment.hpp"
#include "vcd/match.hpp"
#include "vcd/media.hpp"
#include "vcd/metrics.hpp"
#include "vcd/parallel.hpp"
#include "vcd/select.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct GlobalOptions {
  unsigned threads = 0;  // 0 = all hardware threads
  std::uint64_t seed = 1;
  std::string format = "json";
};

std::string default_video_id(const std::string& path) {
  return fs::path(path).stem().string();
}

vcd::FrameSequence load_input(const std::string& path,
                              const std::string& id_flag,
                              const std::string& fps_flag) {
  std::optional<vcd::Rational> fps;
  if (!fps_flag.empty()) fps = vcd::Rational::parse(fps_flag);
  if (path == "-") {
    // Y4M on stdin; pairs with an external decoder, e.g.
    //   ffmpeg -i clip.mp4 -f yuv4mpegpipe - | vcd probe --input -
    vcd::FrameSequence seq =
        vcd::parse_y4m(std::cin, id_flag.empty() ? "stdin" : id_flag);
    if (fps) seq.fps = *fps;
    return seq;
  }
  const std::string id = id_flag.empty() ? default_video_id(path) : id_flag;
  return vcd::load_video(path, id, fps);
}

void emit(const ordered_json& doc, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::cout << doc.dump(2) << "\n";
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw vcd::DataError("cannot create " + out_path);
  out << doc.dump(2) << "\n";
}

ordered_json selection_to_json(const vcd::SelectionResult& sel) {
  ordered_json doc;
  doc["video_id"] = sel.video_id;
  doc["policy"] = {{"kind", vcd::policy_kind_name(sel.policy.kind)},
                   {"window", sel.policy.window_size}};
  doc["frame_count"] = sel.source_frame_count;
  doc["indices"] = sel.indices;
  doc["timestamps"] = sel.timestamps;
  doc["reduction_factor"] = vcd::reduction_factor(sel);
  return doc;
}

std::vector<vcd::DescriptorSet> describe_paths(
    const std::vector<std::string>& inputs, const std::string& manifest_path,
    const vcd::SelectionPolicy& policy, int block, unsigned threads) {
  std::vector<vcd::DescriptorSet> sets;
  if (!manifest_path.empty()) {
    const vcd::Manifest manifest = vcd::load_manifest(manifest_path);
    const std::string base =
        fs::path(manifest_path).parent_path().string();
    sets.resize(manifest.entries.size());
    vcd::parallel_for(manifest.entries.size(), threads, [&](std::size_t i) {
      const vcd::FrameSequence seq =
          vcd::load_video(manifest.entries[i], base);
      sets[i] = vcd::describe_video(seq, policy, block);
    });
    return sets;
  }
  sets.resize(inputs.size());
  vcd::parallel_for(inputs.size(), threads, [&](std::size_t i) {
    const vcd::FrameSequence seq =
        vcd::load_video(inputs[i], default_video_id(inputs[i]));
    sets[i] = vcd::describe_video(seq, policy, block);
  });
  return sets;
}

int run(int argc, char** argv) {
  CLI::App app{"video copy detection toolkit"};
  app.require_subcommand(1);
  GlobalOptions global;
  app.add_option("--threads", global.threads,
                 "worker threads (0 = all hardware threads)");
  app.add_option("--seed", global.seed, "base random seed");
  app.add_option("--format", global.format, "output format: json or csv")
      ->check(CLI::IsMember({"json", "csv"}));

  // probe
  auto* probe = app.add_subcommand("probe", "inspect a video input");
  std::string probe_input, probe_id, probe_fps, probe_out;
  probe->add_option("--input", probe_input)->required();
  probe->add_option("--id", probe_id);
  probe->add_option("--fps", probe_fps, "fps override, e.g. 24 or 30000/1001");
  probe->add_option("--out", probe_out);

  // curve
  auto* curve_cmd = app.add_subcommand(
      "curve", "interframe difference curve, raw and smoothed");
  std::string curve_input, curve_id, curve_fps, curve_out;
  int curve_window = 30;
  curve_cmd->add_option("--input", curve_input)->required();
  curve_cmd->add_option("--window", curve_window, "Hanning window size");
  curve_cmd->add_option("--id", curve_id);
  curve_cmd->add_option("--fps", curve_fps);
  curve_cmd->add_option("--out", curve_out);

  // select
  auto* select_cmd = app.add_subcommand("select", "choose representative frames");
  std::string select_input, select_id, select_fps, select_out;
  std::string select_policy = "local-max";
  int select_window = 30;
  select_cmd->add_option("--input", select_input)->required();
  select_cmd->add_option("--policy", select_policy,
                         "uniform | local-max | local-max-mid");
  select_cmd->add_option("--window", select_window);
  select_cmd->add_option("--id", select_id);
  select_cmd->add_option("--fps", select_fps);
  select_cmd->add_option("--out", select_out);

  // describe
  auto* describe_cmd =
      app.add_subcommand("describe", "build a descriptor store");
  std::vector<std::string> describe_inputs;
  std::string describe_manifest, describe_out;
  std::string describe_policy = "local-max-mid";
  int describe_window = 30;
  int describe_block = vcd::kDefaultDctBlock;
  describe_cmd->add_option("--input", describe_inputs)
      ->take_all()
      ->expected(-1);
  describe_cmd->add_option("--manifest", describe_manifest);
  describe_cmd->add_option("--policy", describe_policy);
  describe_cmd->add_option("--window", describe_window);
  describe_cmd->add_option("--block", describe_block,
                           "DCT block size (dim = block^2 - 1)");
  describe_cmd->add_option("--out", describe_out)->required();

  // attack
  auto* attack_cmd = app.add_subcommand("attack", "apply a temporal attack");
  std::string attack_input, attack_output, attack_id, attack_fps;
  std::string attack_kind = "targeted";
  double attack_p = 0.1;
  std::string attack_factor = "1.0";
  int attack_bleed = 0;
  attack_cmd->add_option("--input", attack_input)->required();
  attack_cmd->add_option("--out", attack_output)->required();
  attack_cmd->add_option("--kind", attack_kind, "random | targeted | speed");
  attack_cmd->add_option("--p", attack_p, "blackout probability");
  attack_cmd->add_option("--factor", attack_factor, "speed factor, e.g. 1.2");
  attack_cmd->add_option("--bleed", attack_bleed,
                         "frames blended toward black on each side");
  attack_cmd->add_option("--id", attack_id);
  attack_cmd->add_option("--fps", attack_fps);

  // match
  auto* match_cmd = app.add_subcommand("match", "score query/reference pairs");
  std::string match_queries, match_references, match_background, match_out;
  double match_beta = 1.0;
  int match_top_k = 1;
  match_cmd->add_option("--queries", match_queries)->required();
  match_cmd->add_option("--references", match_references)->required();
  match_cmd->add_option("--background", match_background,
                        "descriptor store for score normalization");
  match_cmd->add_option("--beta", match_beta);
  match_cmd->add_option("--top-k", match_top_k);
  match_cmd->add_option("--out", match_out)->required();

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "micro-average precision report");
  std::string eval_scores, eval_gt, eval_out;
  eval_cmd->add_option("--scores", eval_scores)->required();
  eval_cmd->add_option("--gt", eval_gt)->required();
  eval_cmd->add_option("--out", eval_out);

  // gen-corpus
  auto* gen_cmd = app.add_subcommand("gen-corpus", "synthetic corpus");
  vcd::SyntheticCorpusSpec spec;
  std::string gen_out, gen_fps = "24";
  gen_cmd->add_option("--out", gen_out)->required();
  gen_cmd->add_option("--references", spec.num_references);
  gen_cmd->add_option("--positives", spec.num_queries_positive);
  gen_cmd->add_option("--distractors", spec.num_distractors);
  gen_cmd->add_option("--fps", gen_fps);
  gen_cmd->add_option("--width", spec.width);
  gen_cmd->add_option("--height", spec.height);
  gen_cmd->add_option("--scene-len-mean", spec.scene_len_mean_s);
  gen_cmd->add_option("--scene-len-jitter", spec.scene_len_jitter_s);
  gen_cmd->add_option("--scenes-min", spec.scenes_min);
  gen_cmd->add_option("--scenes-max", spec.scenes_max);
  gen_cmd->add_option("--span-min", spec.span_scenes_min);
  gen_cmd->add_option("--span-max", spec.span_scenes_max);
  gen_cmd->add_option("--noise-sigma", spec.noise_sigma);
  gen_cmd->add_option("--brightness-jitter", spec.brightness_jitter);
  gen_cmd->add_flag("--align-seconds", spec.align_scenes_to_seconds,
                    "align scene cuts to whole seconds");

  // bench
  auto* bench_cmd =
      app.add_subcommand("bench", "full policy x attack experiment grid");
  std::string bench_config, bench_out;
  bool bench_no_timing = false;
  bench_cmd->add_option("--config", bench_config)->required();
  bench_cmd->add_option("--out", bench_out, "overrides config output_dir");
  bench_cmd->add_flag("--no-timing", bench_no_timing,
                      "report zero wall times (byte-stable outputs)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (probe->parsed()) {
    const vcd::FrameSequence seq = load_input(probe_input, probe_id, probe_fps);
    ordered_json doc;
    doc["video_id"] = seq.video_id;
    doc["width"] = seq.width;
    doc["height"] = seq.height;
    doc["fps"] = {{"num", seq.fps.num}, {"den", seq.fps.den}};
    doc["frames"] = seq.frames.size();
    doc["duration_seconds"] = seq.duration_seconds();
    emit(doc, probe_out);
    return 0;
  }

  if (curve_cmd->parsed()) {
    const vcd::FrameSequence seq = load_input(curve_input, curve_id, curve_fps);
    const vcd::DiffCurve curve = vcd::compute_curve(seq);
    ordered_json doc;
    doc["video_id"] = seq.video_id;
    doc["fps"] = {{"num", seq.fps.num}, {"den", seq.fps.den}};
    if (curve.degenerate()) {
      doc["raw"] = ordered_json::array();
      doc["smoothed"] = ordered_json::array();
      doc["window"] = 0;
      doc["degenerate"] = true;
    } else {
      const vcd::DiffCurve smoothed = vcd::smooth(curve, curve_window);
      doc["raw"] = smoothed.values;
      doc["smoothed"] = smoothed.smoothed;
      doc["window"] = smoothed.window_size;
    }
    emit(doc, curve_out);
    return 0;
  }

  if (select_cmd->parsed()) {
    const vcd::FrameSequence seq =
        load_input(select_input, select_id, select_fps);
    vcd::SelectionPolicy policy;
    policy.kind = vcd::policy_kind_from_name(select_policy);
    policy.window_size =
        policy.kind == vcd::PolicyKind::uniform_per_second ? 0 : select_window;
    const vcd::SelectionResult sel = vcd::select_frames(seq, policy);
    if (global.format == "csv") {
      std::ostream* os = &std::cout;
      std::ofstream file;
      if (!select_out.empty() && select_out != "-") {
        file.open(select_out, std::ios::binary);
        if (!file) throw vcd::DataError("cannot create " + select_out);
        os = &file;
      }
      *os << "index,timestamp\n";
      for (std::size_t i = 0; i < sel.indices.size(); ++i) {
        *os << sel.indices[i] << ',' << sel.timestamps[i] << '\n';
      }
    } else {
      emit(selection_to_json(sel), select_out);
    }
    return 0;
  }

  if (describe_cmd->parsed()) {
    if (describe_inputs.empty() == describe_manifest.empty()) {
      std::cerr << "describe: provide either --input files or --manifest\n";
      return 2;
    }
    vcd::SelectionPolicy policy;
    policy.kind = vcd::policy_kind_from_name(describe_policy);
    policy.window_size =
        policy.kind == vcd::PolicyKind::uniform_per_second ? 0
                                                           : describe_window;
    const auto sets =
        describe_paths(describe_inputs, describe_manifest, policy,
                       describe_block, global.threads);
    vcd::write_store_file(describe_out, sets);
    const std::uint64_t bytes = vcd::store_size_bytes(sets);
    if (bytes != fs::file_size(describe_out)) {
      throw vcd::InvariantError("store size accounting mismatch");
    }
    ordered_json doc;
    doc["videos"] = sets.size();
    std::size_t frames = 0;
    for (const auto& s : sets) frames += s.descriptors.size();
    doc["descriptors"] = frames;
    doc["bytes"] = bytes;
    doc["out"] = describe_out;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  if (attack_cmd->parsed()) {
    const vcd::FrameSequence seq =
        load_input(attack_input, attack_id, attack_fps);
    vcd::AttackSpec atk;
    atk.kind = vcd::attack_kind_from_name(attack_kind);
    atk.p = attack_p;
    atk.factor = vcd::Rational::parse(attack_factor);
    atk.seed = global.seed;
    atk.bleed = attack_bleed;
    vcd::save_video(attack_output, vcd::apply_attack(seq, atk));
    return 0;
  }

  if (match_cmd->parsed()) {
    const auto queries = vcd::read_store_file(match_queries);
    const auto references = vcd::read_store_file(match_references);
    vcd::BackgroundPool pool;
    if (!match_background.empty()) {
      for (const auto& set : vcd::read_store_file(match_background)) {
        pool.descriptors.insert(pool.descriptors.end(),
                                set.descriptors.begin(),
                                set.descriptors.end());
      }
    }
    vcd::MatchOptions options;
    options.beta = match_beta;
    options.top_k = match_top_k;
    options.threads = global.threads;
    const vcd::PredictionList predictions = vcd::match_all(
        queries, references, match_background.empty() ? nullptr : &pool,
        options);
    vcd::write_scores_csv_file(match_out, predictions);
    return 0;
  }

  if (eval_cmd->parsed()) {
    const vcd::EvalReport report = vcd::evaluate_run(eval_scores, eval_gt);
    if (eval_out.empty()) {
      std::cout << vcd::report_to_json(report);
    } else {
      vcd::write_report_file(eval_out, report);
    }
    return 0;
  }

  if (gen_cmd->parsed()) {
    spec.fps = vcd::Rational::parse(gen_fps);
    spec.seed = global.seed;
    const vcd::GeneratedCorpus corpus =
        vcd::generate_corpus(spec, gen_out, global.threads);
    ordered_json doc;
    doc["dir"] = corpus.dir;
    doc["videos"] = corpus.manifest.entries.size();
    doc["positives"] = corpus.gt.positives.size();
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  if (bench_cmd->parsed()) {
    vcd::ExperimentConfig config = vcd::load_experiment_config(bench_config);
    if (!bench_out.empty()) config.output_dir = bench_out;
    if (bench_no_timing) config.timing = false;
    config.threads = global.threads;
    if (app.count("--seed")) config.seed = global.seed;
    const vcd::ExperimentResult result = vcd::run_experiment(config);
    ordered_json doc;
    doc["cells"] = result.cells.size();
    doc["summary_csv"] = result.summary_csv_path;
    doc["summary_json"] = result.summary_json_path;
    std::cout << doc.dump(2) << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const vcd::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const vcd::InvariantError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
