#include "vcd/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "vcd/parallel.hpp"

namespace fs = std::filesystem;

namespace vcd {
namespace {

struct VideoRef {
  const ManifestEntry* entry;
  std::string base_dir;
};

struct DescribeOutcome {
  std::vector<DescriptorSet> sets;
  std::uint64_t selected_frames = 0;
  double reduction_sum = 0.0;
  double seconds = 0.0;  // wall seconds of the selection+description batch
};

// Describes every video in `videos`, optionally applying `attack` first
// (with a per-video seed derived from `attack_seed` and the video id).
// Videos process in parallel; all aggregates are order-independent sums.
// Loading and attacking run as a separate untimed pass; the timed region is
// the whole selection+description batch, one wall-clock measurement —
// per-video stamps on this machine class drown in scheduler quanta.
DescribeOutcome describe_videos(const std::vector<VideoRef>& videos,
                                const SelectionPolicy& policy,
                                const AttackSpec* attack,
                                std::uint64_t attack_seed, int dct_block,
                                unsigned threads) {
  DescribeOutcome out;
  out.sets.resize(videos.size());
  std::vector<std::uint64_t> counts(videos.size(), 0);
  std::vector<double> reductions(videos.size(), 0.0);
  std::vector<FrameSequence> prepared(videos.size());
  parallel_for(videos.size(), threads, [&](std::size_t i) {
    FrameSequence seq = load_video(*videos[i].entry, videos[i].base_dir);
    if (attack && attack->kind != AttackKind::none) {
      AttackSpec spec = *attack;
      spec.seed = derive_seed(attack_seed, seq.video_id);
      seq = apply_attack(seq, spec);
    }
    prepared[i] = std::move(seq);
  });
  const StageTimer timer;
  parallel_for(videos.size(), threads, [&](std::size_t i) {
    const SelectionResult selection = select_frames(prepared[i], policy);
    out.sets[i] = describe_selection(prepared[i], selection, dct_block);
    counts[i] = selection.indices.size();
    reductions[i] = reduction_factor(selection);
  });
  out.seconds = timer.seconds();
  for (std::size_t i = 0; i < videos.size(); ++i) {
    out.selected_frames += counts[i];
    out.reduction_sum += reductions[i];
  }
  return out;
}

std::string csv_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string attack_param(const AttackSpec& attack) {
  switch (attack.kind) {
    case AttackKind::random_blackout:
      return csv_double(attack.p);
    case AttackKind::speed:
      return attack.factor.str();
    default:
      return "";
  }
}

SelectionPolicy policy_from_json(const nlohmann::json& j) {
  SelectionPolicy p;
  p.kind = policy_kind_from_name(j.at("kind").get<std::string>());
  if (p.kind != PolicyKind::uniform_per_second) {
    p.window_size = j.at("window").get<int>();
    if (p.window_size < 2) throw DataError("policy window must be >= 2");
  }
  return p;
}

AttackSpec attack_from_json(const nlohmann::json& j) {
  AttackSpec a;
  a.kind = attack_kind_from_name(j.at("kind").get<std::string>());
  if (a.kind == AttackKind::random_blackout) {
    a.p = j.at("p").get<double>();
    if (a.p < 0.0 || a.p > 1.0) throw DataError("attack p outside [0,1]");
  }
  if (a.kind == AttackKind::speed) {
    const auto& f = j.at("factor");
    a.factor = f.is_string() ? Rational::parse(f.get<std::string>())
                             : Rational(f.get<std::int64_t>(), 1);
    if (!a.factor.positive()) throw DataError("speed factor must be positive");
  }
  if (j.contains("bleed")) a.bleed = j["bleed"].get<int>();
  return a;
}

SyntheticCorpusSpec synthetic_from_json(const nlohmann::json& j,
                                        std::uint64_t default_seed) {
  SyntheticCorpusSpec s;
  s.seed = default_seed;
  if (j.contains("references")) s.num_references = j["references"].get<int>();
  if (j.contains("positives")) {
    s.num_queries_positive = j["positives"].get<int>();
  }
  if (j.contains("distractors")) s.num_distractors = j["distractors"].get<int>();
  if (j.contains("fps")) {
    if (j["fps"].is_string()) {
      s.fps = Rational::parse(j["fps"].get<std::string>());
    } else {
      s.fps = Rational(j["fps"].get<std::int64_t>(), 1);
    }
  }
  if (j.contains("width")) s.width = j["width"].get<std::uint32_t>();
  if (j.contains("height")) s.height = j["height"].get<std::uint32_t>();
  if (j.contains("scene_len_mean_s")) {
    s.scene_len_mean_s = j["scene_len_mean_s"].get<double>();
  }
  if (j.contains("scene_len_jitter_s")) {
    s.scene_len_jitter_s = j["scene_len_jitter_s"].get<double>();
  }
  if (j.contains("scenes_min")) s.scenes_min = j["scenes_min"].get<int>();
  if (j.contains("scenes_max")) s.scenes_max = j["scenes_max"].get<int>();
  if (j.contains("span_min")) s.span_scenes_min = j["span_min"].get<int>();
  if (j.contains("span_max")) s.span_scenes_max = j["span_max"].get<int>();
  if (j.contains("noise_sigma")) s.noise_sigma = j["noise_sigma"].get<double>();
  if (j.contains("brightness_jitter")) {
    s.brightness_jitter = j["brightness_jitter"].get<int>();
  }
  if (j.contains("drift_min")) s.drift_min = j["drift_min"].get<double>();
  if (j.contains("drift_max")) s.drift_max = j["drift_max"].get<double>();
  if (j.contains("distractor_echo_prob")) {
    s.distractor_echo_prob = j["distractor_echo_prob"].get<double>();
  }
  if (j.contains("distractor_echo_mix")) {
    s.distractor_echo_mix = j["distractor_echo_mix"].get<double>();
  }
  if (j.contains("align_scenes_to_seconds")) {
    s.align_scenes_to_seconds = j["align_scenes_to_seconds"].get<bool>();
  }
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  return s;
}

}  // namespace

std::uint64_t cell_seed(std::uint64_t base, const SelectionPolicy& policy,
                        const AttackSpec& attack, int repeat) {
  return derive_seed(base, policy.label() + "|" + attack.label() +
                               "|rep=" + std::to_string(repeat));
}

double videos_per_second(std::size_t video_count, double seconds) {
  return static_cast<double>(video_count) / std::max(seconds, 1e-9);
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  if (config.policies.empty() || config.attacks.empty()) {
    throw DataError("experiment needs at least one policy and one attack");
  }
  if (config.output_dir.empty()) throw DataError("experiment output_dir unset");
  fs::create_directories(fs::path(config.output_dir) / "cells");

  // Corpus.
  std::string manifest_path = config.corpus.manifest_path;
  std::string gt_path = config.corpus.gt_path;
  if (config.corpus.synthetic) {
    const std::string corpus_dir =
        (fs::path(config.output_dir) / "corpus").string();
    generate_corpus(*config.corpus.synthetic, corpus_dir, config.threads);
    manifest_path = (fs::path(corpus_dir) / "manifest.json").string();
    gt_path = (fs::path(corpus_dir) / "gt.csv").string();
  } else if (manifest_path.empty()) {
    throw DataError("experiment corpus is neither a manifest nor synthetic");
  }
  if (gt_path.empty()) {
    gt_path = (fs::path(manifest_path).parent_path() / "gt.csv").string();
  }
  const Manifest manifest = load_manifest(manifest_path);
  const GroundTruth gt = read_ground_truth_csv_file(gt_path);
  const std::string base_dir = fs::path(manifest_path).parent_path().string();

  std::vector<VideoRef> references, queries, distractors;
  for (const auto& entry : manifest.entries) {
    if (entry.role == "reference") {
      references.push_back({&entry, base_dir});
    } else if (entry.role == "query") {
      queries.push_back({&entry, base_dir});
      if (entry.distractor) distractors.push_back({&entry, base_dir});
    } else {
      throw DataError("manifest entry without a reference/query role: " +
                      entry.video_id);
    }
  }
  if (references.empty() || queries.empty()) {
    throw DataError("experiment corpus needs references and queries");
  }
  const bool use_pool = config.matcher.background == "distractors";
  if (!config.matcher.background.empty() && !use_pool) {
    throw DataError("unknown matcher background '" +
                    config.matcher.background + "'");
  }
  if (use_pool && distractors.empty()) {
    throw DataError("matcher background requested but no distractors flagged");
  }

  ExperimentResult result;
  for (const SelectionPolicy& policy : config.policies) {
    // References and the normalization pool are attack-free; build them once
    // per policy.
    const DescribeOutcome refs = describe_videos(
        references, policy, nullptr, 0, config.dct_block, config.threads);
    BackgroundPool pool;
    if (use_pool) {
      const DescribeOutcome bg = describe_videos(
          distractors, policy, nullptr, 0, config.dct_block, config.threads);
      for (const auto& set : bg.sets) {
        pool.descriptors.insert(pool.descriptors.end(),
                                set.descriptors.begin(),
                                set.descriptors.end());
      }
    }

    for (const AttackSpec& attack : config.attacks) {
      CellResult cell;
      cell.policy = policy;
      cell.attack = attack;
      const int repeats =
          attack.kind == AttackKind::random_blackout
              ? std::max(1, config.repeats)
              : 1;
      const auto run_repeat = [&](int rep) {
        RepeatResult run;
        run.seed = cell_seed(config.seed, policy, attack, rep);
        const DescribeOutcome qs =
            describe_videos(queries, policy, &attack, run.seed,
                            config.dct_block, config.threads);

        MatchOptions options;
        options.beta = config.matcher.beta;
        options.top_k = config.matcher.top_k;
        options.threads = config.threads;
        const PredictionList predictions =
            match_all(qs.sets, refs.sets, use_pool ? &pool : nullptr, options);

        const std::size_t video_count = references.size() + queries.size();
        MethodStats stats;
        stats.selected_frames_total = refs.selected_frames + qs.selected_frames;
        stats.reduction_factor_mean =
            (refs.reduction_sum + qs.reduction_sum) /
            static_cast<double>(video_count);
        stats.descriptor_bytes =
            store_size_bytes(refs.sets) + store_size_bytes(qs.sets);
        if (config.timing) {
          stats.wall_time_seconds = refs.seconds + qs.seconds;
          stats.videos_per_second =
              videos_per_second(video_count, stats.wall_time_seconds);
        }

        std::string cell_name = policy.label() + "__" + attack.label();
        if (attack.kind == AttackKind::random_blackout) {
          cell_name += "__rep" + std::to_string(rep);
        }
        const fs::path cell_dir =
            fs::path(config.output_dir) / "cells" / cell_name;
        fs::create_directories(cell_dir);
        run.scores_path = (cell_dir / "scores.csv").string();
        run.report_path = (cell_dir / "report.json").string();
        write_scores_csv_file(run.scores_path, predictions);

        EvalReport report =
            evaluate(predictions, gt, {{policy.label(), stats}});
        write_report_file(run.report_path, report);
        run.uap = report.uap;

        if (rep == 0) cell.stats = stats;
        cell.repeats.push_back(std::move(run));
      };
      for (int rep = 0; rep < repeats; ++rep) {
        try {
          run_repeat(rep);
        } catch (const DataError& e) {
          // A failed cell aborts the whole run, naming the cell.
          throw DataError("cell " + policy.label() + " x " + attack.label() +
                          " rep " + std::to_string(rep) + ": " + e.what());
        }
      }
      double mean = 0.0;
      for (const auto& r : cell.repeats) mean += r.uap;
      mean /= static_cast<double>(cell.repeats.size());
      double var = 0.0;
      if (cell.repeats.size() > 1) {
        for (const auto& r : cell.repeats) {
          var += (r.uap - mean) * (r.uap - mean);
        }
        var /= static_cast<double>(cell.repeats.size() - 1);
      }
      cell.uap_mean = mean;
      cell.uap_std = std::sqrt(var);
      result.cells.push_back(std::move(cell));
    }
  }

  // Summary table.
  result.summary_csv_path =
      (fs::path(config.output_dir) / "summary.csv").string();
  result.summary_json_path =
      (fs::path(config.output_dir) / "summary.json").string();
  {
    std::ofstream csv(result.summary_csv_path, std::ios::binary);
    if (!csv) throw DataError("cannot create " + result.summary_csv_path);
    csv << "method,window,attack,param,uap_mean,uap_std,frames_selected,"
           "reduction_factor,descriptor_bytes,vid_per_s\n";
    nlohmann::ordered_json rows = nlohmann::ordered_json::array();
    for (const CellResult& cell : result.cells) {
      const std::string window =
          cell.policy.kind == PolicyKind::uniform_per_second
              ? ""
              : std::to_string(cell.policy.window_size);
      csv << policy_kind_name(cell.policy.kind) << ',' << window << ','
          << attack_kind_name(cell.attack.kind) << ','
          << attack_param(cell.attack) << ',' << csv_double(cell.uap_mean)
          << ',' << csv_double(cell.uap_std) << ','
          << cell.stats.selected_frames_total << ','
          << csv_double(cell.stats.reduction_factor_mean) << ','
          << cell.stats.descriptor_bytes << ','
          << csv_double(cell.stats.videos_per_second) << '\n';
      nlohmann::ordered_json row;
      row["method"] = policy_kind_name(cell.policy.kind);
      row["window"] = cell.policy.window_size;
      row["attack"] = attack_kind_name(cell.attack.kind);
      row["param"] = attack_param(cell.attack);
      row["uap_mean"] = cell.uap_mean;
      row["uap_std"] = cell.uap_std;
      nlohmann::ordered_json reps = nlohmann::ordered_json::array();
      for (const auto& r : cell.repeats) {
        reps.push_back({{"seed", r.seed}, {"uap", r.uap}});
      }
      row["repeats"] = std::move(reps);
      row["frames_selected"] = cell.stats.selected_frames_total;
      row["reduction_factor"] = cell.stats.reduction_factor_mean;
      row["descriptor_bytes"] = cell.stats.descriptor_bytes;
      row["vid_per_s"] = cell.stats.videos_per_second;
      rows.push_back(std::move(row));
    }
    std::ofstream json(result.summary_json_path, std::ios::binary);
    if (!json) throw DataError("cannot create " + result.summary_json_path);
    json << rows.dump(2) << "\n";
  }
  return result;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("bad config JSON: " + std::string(e.what()));
  }
  ExperimentConfig config;
  if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
  const auto& corpus = doc.at("corpus");
  if (corpus.contains("manifest")) {
    config.corpus.manifest_path = corpus["manifest"].get<std::string>();
    if (corpus.contains("gt")) {
      config.corpus.gt_path = corpus["gt"].get<std::string>();
    }
  } else if (corpus.contains("synthetic")) {
    config.corpus.synthetic =
        synthetic_from_json(corpus["synthetic"], config.seed);
  } else {
    throw DataError("config corpus needs 'manifest' or 'synthetic'");
  }
  for (const auto& p : doc.at("policies")) {
    config.policies.push_back(policy_from_json(p));
  }
  for (const auto& a : doc.at("attacks")) {
    config.attacks.push_back(attack_from_json(a));
  }
  if (doc.contains("matcher")) {
    const auto& m = doc["matcher"];
    if (m.contains("beta")) config.matcher.beta = m["beta"].get<double>();
    if (m.contains("top_k")) config.matcher.top_k = m["top_k"].get<int>();
    if (m.contains("background")) {
      config.matcher.background = m["background"].get<std::string>();
    }
  }
  if (doc.contains("repeats")) config.repeats = doc["repeats"].get<int>();
  if (doc.contains("output_dir")) {
    config.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("timing")) config.timing = doc["timing"].get<bool>();
  if (doc.contains("dct_block")) {
    config.dct_block = doc["dct_block"].get<int>();
  }
  return config;
}

}  // namespace vcd
