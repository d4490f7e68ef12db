// Command line front end: generate | pipeline | detect | terrain | rows |
// graph | plan | eval. Exit codes: 0 ok, 2 config, 3 I/O, 4 pipeline stage,
// 5 planning.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "orchardnav/cloud_io.hpp"
#include "orchardnav/evaluation.hpp"
#include "orchardnav/pipeline.hpp"
#include "orchardnav/rng.hpp"
#include "orchardnav/synthetic.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using namespace orchard;

namespace {

struct PipelineCliOptions {
  PipelineConfig config;
  double heading_tolerance_deg = 15.0;
  std::string input;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
};

void add_window_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--window_size_m", cfg.window.window_size,
                  "Local window side length (m)")
      ->capture_default_str();
  app->add_option("--stride_m", cfg.window.stride, "Window stride (m)")
      ->capture_default_str();
}

void add_encoder_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--encoder.resolution", cfg.encoder.resolution,
                  "Pillar grid cells per side")
      ->capture_default_str();
  app->add_option("--encoder.min_points", cfg.encoder.min_points,
                  "Pillar point floor; cells need more points than this")
      ->capture_default_str();
  app->add_option("--encoder.density_cap", cfg.encoder.density_cap,
                  "Point count mapped to full density")
      ->capture_default_str();
}

void add_detector_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--detector", cfg.detector, "Detector backend")
      ->check(CLI::IsMember({"baseline", "external"}))
      ->capture_default_str();
  app->add_option("--external_dir", cfg.external_dir,
                  "Directory of per-window detection JSON for --detector external")
      ->capture_default_str();
  app->add_option("--baseline.density_floor", cfg.baseline.density_floor,
                  "Density channel threshold")
      ->capture_default_str();
  app->add_option("--baseline.min_cells", cfg.baseline.min_cells,
                  "Minimum component size in cells")
      ->capture_default_str();
  app->add_option("--baseline.box_padding", cfg.baseline.box_padding,
                  "Padding added around component bounds (m)")
      ->capture_default_str();
  app->add_option("--nms_iou", cfg.nms_iou, "Merge NMS IoU threshold")
      ->capture_default_str();
}

void add_csf_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--csf.resolution_m", cfg.csf.cloth_resolution,
                  "Cloth particle spacing (m)")
      ->capture_default_str();
  app->add_option("--csf.class_threshold_m", cfg.csf.class_threshold,
                  "Ground distance threshold (m)")
      ->capture_default_str();
  app->add_option("--csf.iterations", cfg.csf.iterations, "Simulation iterations")
      ->capture_default_str();
  app->add_option("--csf.rigidness", cfg.csf.rigidness,
                  "Relaxation passes per iteration (1..3)")
      ->capture_default_str();
  app->add_option("--csf.time_step_s", cfg.csf.time_step, "Integration step (s)")
      ->capture_default_str();
  app->add_option("--csf.gravity", cfg.csf.gravity, "Gravity (m/s^2)")
      ->capture_default_str();
  app->add_option("--csf.damping", cfg.csf.damping, "Velocity damping factor")
      ->capture_default_str();
}

void add_rows_options(CLI::App* app, PipelineConfig& cfg) {
  app->add_option("--rows.lateral_tolerance_m", cfg.rows.lateral_tolerance,
                  "Row membership tolerance (m)")
      ->capture_default_str();
  app->add_option("--rows.min_trees_per_row", cfg.rows.min_trees_per_row,
                  "Minimum trees forming a row")
      ->capture_default_str();
}

void add_graph_options(CLI::App* app, PipelineCliOptions& opts) {
  app->add_option("--graph.lane_offset_m", opts.config.graph.lane_offset,
                  "Lane offset from the row line (m); 0 = auto quarter split")
      ->capture_default_str();
  app->add_option("--graph.end_extension_m", opts.config.graph.end_extension,
                  "End node distance beyond the outermost tree (m)")
      ->capture_default_str();
  app->add_option("--graph.heading_tolerance_deg", opts.heading_tolerance_deg,
                  "Heading match tolerance (degrees)")
      ->capture_default_str();
  app->add_option("--graph.clearance_min_m", opts.config.graph.clearance_min,
                  "Minimum lateral clearance per lane (m)")
      ->capture_default_str();
  app->add_option("--graph.snap_radius_m", opts.config.graph.snap_radius,
                  "Pose snapping radius (m)")
      ->capture_default_str();
}

void finish_options(PipelineCliOptions& opts) {
  opts.config.graph.heading_tolerance =
      opts.heading_tolerance_deg * std::numbers::pi / 180.0;
}

void print_timings(const PipelineResult& result) {
  for (const auto& [stage, seconds] : result.stage_seconds) {
    std::ostringstream os;
    os << "  " << stage << ": " << seconds * 1e3 << " ms";
    std::cout << os.str() << "\n";
  }
}

GraphParams graph_params_of(const PipelineCliOptions& opts) {
  return opts.config.graph;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Orchard semantic mapping and navigation toolkit"};
  app.require_subcommand(1);

  // ---- generate ----
  auto* gen = app.add_subcommand("generate", "Generate a synthetic orchard cloud");
  std::string gen_spec_path, gen_out = "orchard.xyz", gen_truth = "truth.json";
  std::uint64_t gen_seed = 0;
  int gen_rows = 0, gen_trees = 0;
  gen->add_option("--spec", gen_spec_path, "Orchard spec JSON");
  gen->add_option("--out", gen_out, "Output cloud (.xyz/.ply/.pcd)")
      ->capture_default_str();
  gen->add_option("--truth", gen_truth, "Ground truth JSON output")
      ->capture_default_str();
  gen->add_option("--seed", gen_seed, "Override spec seed");
  gen->add_option("--rows", gen_rows, "Override row count");
  gen->add_option("--trees", gen_trees, "Override trees per row");

  // ---- pipeline ----
  PipelineCliOptions pl;
  auto* pipe = app.add_subcommand("pipeline", "Run the full processing pipeline");
  pipe->set_config("--config", "", "Config file (INI, sections match option groups)");
  pipe->allow_config_extras(CLI::config_extras_mode::error);
  pipe->add_option("--input", pl.input, "Input cloud")->required();
  pipe->add_option("--out-dir", pl.out_dir, "Artifact directory")
      ->capture_default_str();
  pipe->add_option("--threads", pl.config.threads, "Worker cap for per-window work")
      ->capture_default_str();
  pipe->add_option("--seed", pl.seed, "Run seed recorded in the config echo")
      ->capture_default_str();
  add_window_options(pipe, pl.config);
  add_encoder_options(pipe, pl.config);
  add_detector_options(pipe, pl.config);
  add_csf_options(pipe, pl.config);
  add_rows_options(pipe, pl.config);
  add_graph_options(pipe, pl);

  // ---- detect ----
  PipelineCliOptions det_opts;
  auto* det = app.add_subcommand("detect", "Windowed detection only");
  std::string det_out = "detections.json";
  det->add_option("--input", det_opts.input, "Input cloud")->required();
  det->add_option("--out", det_out, "Detections JSON output")->capture_default_str();
  det->add_option("--threads", det_opts.config.threads, "Worker cap")
      ->capture_default_str();
  add_window_options(det, det_opts.config);
  add_encoder_options(det, det_opts.config);
  add_detector_options(det, det_opts.config);

  // ---- terrain ----
  PipelineCliOptions ter_opts;
  auto* ter = app.add_subcommand("terrain", "Cloth-simulation ground segmentation");
  std::string ter_out = "segmentation.json", ter_labeled;
  ter->add_option("--input", ter_opts.input, "Input cloud")->required();
  ter->add_option("--out", ter_out, "Segmentation JSON output")->capture_default_str();
  ter->add_option("--labeled", ter_labeled, "Optional labeled cloud output (.xyz)");
  add_csf_options(ter, ter_opts.config);

  // ---- rows ----
  PipelineCliOptions row_opts;
  auto* rows_cmd = app.add_subcommand("rows", "Tree row detection from detections");
  std::string rows_dets, rows_out = "rows.json";
  rows_cmd->add_option("--detections", rows_dets, "Detections JSON")->required();
  rows_cmd->add_option("--out", rows_out, "Rows JSON output")->capture_default_str();
  add_rows_options(rows_cmd, row_opts.config);

  // ---- graph ----
  PipelineCliOptions graph_opts;
  auto* graph_cmd = app.add_subcommand("graph", "Build the navigation graph");
  std::string graph_semantic, graph_centers, graph_out = "graph.json";
  graph_cmd->add_option("--semantic", graph_semantic,
                        "Semantic map JSON (trees + rows)");
  graph_cmd->add_option("--centers", graph_centers,
                        "Manual tree centers JSON: {\"rows\":[[[x,y],...],...]}");
  graph_cmd->add_option("--out", graph_out, "Graph JSON output")->capture_default_str();
  add_graph_options(graph_cmd, graph_opts);

  // ---- plan ----
  PipelineCliOptions plan_opts;
  auto* plan_cmd = app.add_subcommand("plan", "Plan a path on a graph");
  std::string plan_graph, plan_out = "path.json";
  std::vector<double> plan_start, plan_goal;
  int plan_batch = 0;
  std::uint64_t plan_seed = 1;
  plan_cmd->add_option("--graph", plan_graph, "Graph JSON")->required();
  plan_cmd->add_option("--start", plan_start, "Start pose: x y heading")
      ->expected(3)
      ->required();
  plan_cmd->add_option("--goal", plan_goal, "Goal pose: x y heading")->expected(3);
  plan_cmd->add_option("--out", plan_out, "Path JSON output")->capture_default_str();
  plan_cmd->add_option("--batch", plan_batch,
                       "Plan to N random goal nodes and report latency");
  plan_cmd->add_option("--seed", plan_seed, "Batch goal sampling seed")
      ->capture_default_str();

  // ---- eval ----
  auto* eval_cmd = app.add_subcommand("eval", "Detection metrics and studies");
  std::string eval_pred, eval_truth, eval_out, eval_input;
  std::string study_csv, study_json;
  double eval_iou = 0.5;
  bool eval_study = false;
  eval_cmd->add_option("--pred", eval_pred, "Predicted detections JSON");
  eval_cmd->add_option("--truth", eval_truth,
                       "Truth JSON (ground truth file or detections array)");
  eval_cmd->add_option("--iou", eval_iou, "Match IoU threshold")->capture_default_str();
  eval_cmd->add_option("--out", eval_out, "Metrics JSON output");
  eval_cmd->add_flag("--study", eval_study, "Run the window/resolution sweep");
  eval_cmd->add_option("--input", eval_input, "Input cloud for --study");
  eval_cmd->add_option("--out-csv", study_csv, "Study CSV output");
  eval_cmd->add_option("--out-json", study_json, "Study JSON output");

  try {
    app.parse(argc, argv);

    if (*gen) {
      OrchardSpec spec;
      if (!gen_spec_path.empty()) spec = load_orchard_spec(gen_spec_path);
      if (gen->count("--seed")) spec.seed = gen_seed;
      if (gen_rows > 0) spec.rows = gen_rows;
      if (gen_trees > 0) spec.trees_per_row = gen_trees;
      auto [map, truth] = generate(spec);
      save_pointcloud(map, gen_out);
      save_ground_truth(truth, gen_truth);
      std::cout << "generated " << map.size() << " points, "
                << truth.tree_boxes.size() << " trees -> " << gen_out << "\n";
      return 0;
    }

    if (*pipe) {
      finish_options(pl);
      pl.config.validate();
      const PointCloudMap map = load_pointcloud(pl.input);
      fs::create_directories(pl.out_dir);
      {
        std::ofstream cfg_out(fs::path(pl.out_dir) / "resolved_config.ini");
        cfg_out << pipe->config_to_str(true, true);
      }
      const PipelineResult result = run_pipeline(map, pl.config, pl.out_dir);
      std::cout << "pipeline complete: " << result.detections.size()
                << " trees, " << result.semantic.rows.size() << " rows, "
                << result.graph.nodes.size() << " graph nodes\n";
      for (const auto& w : result.warnings) std::cout << "  warning: " << w << "\n";
      print_timings(result);
      return 0;
    }

    if (*det) {
      finish_options(det_opts);
      const PointCloudMap map = load_pointcloud(det_opts.input);
      std::vector<std::string> warnings;
      const auto dets = run_detection(map, det_opts.config, &warnings);
      save_detections(dets, det_out);
      std::cout << dets.size() << " detections -> " << det_out << "\n";
      for (const auto& w : warnings) std::cout << "  warning: " << w << "\n";
      return 0;
    }

    if (*ter) {
      const PointCloudMap map = load_pointcloud(ter_opts.input);
      const auto seg = csf_segment(map, ter_opts.config.csf);
      json j;
      j["ground"] = seg.ground_indices;
      j["nonground"] = seg.nonground_indices;
      j["settled"] = seg.settled;
      j["residual"] = seg.residual;
      std::ofstream out(ter_out);
      if (!out) throw IoError(ter_out + ": cannot open for writing");
      out << j.dump() << "\n";
      if (!ter_labeled.empty()) {
        std::vector<PointClass> labels(map.size(), PointClass::Obstacle);
        for (std::size_t i : seg.ground_indices) labels[i] = PointClass::Ground;
        save_labeled_cloud(map, labels, ter_labeled);
      }
      std::cout << seg.ground_indices.size() << " ground / "
                << seg.nonground_indices.size() << " non-ground";
      if (!seg.settled) std::cout << " (unsettled, residual " << seg.residual << ")";
      std::cout << "\n";
      return 0;
    }

    if (*rows_cmd) {
      const auto dets = load_detections(rows_dets);
      SemanticMap semantic;
      semantic.trees = dets;
      semantic.rows = detect_tree_rows(dets, row_opts.config.rows);
      std::set<std::size_t> assigned;
      for (const auto& r : semantic.rows)
        assigned.insert(r.member_trees.begin(), r.member_trees.end());
      for (std::size_t t = 0; t < dets.size(); ++t)
        if (!assigned.count(t)) semantic.unassigned_trees.push_back(t);
      save_semantic_map(semantic, rows_out);
      std::cout << semantic.rows.size() << " rows ("
                << semantic.unassigned_trees.size() << " unassigned trees) -> "
                << rows_out << "\n";
      return 0;
    }

    if (*graph_cmd) {
      finish_options(graph_opts);
      VisibilityGraph graph;
      if (!graph_centers.empty()) {
        std::ifstream in(graph_centers);
        if (!in) throw IoError(graph_centers + ": cannot open for reading");
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw IoError(graph_centers + ": invalid JSON");
        std::vector<std::vector<std::array<double, 2>>> rows;
        for (const auto& row : j.at("rows")) {
          std::vector<std::array<double, 2>> centers;
          for (const auto& c : row)
            centers.push_back({c[0].get<double>(), c[1].get<double>()});
          rows.push_back(std::move(centers));
        }
        graph = build_graph_from_centers(rows, graph_params_of(graph_opts));
      } else if (!graph_semantic.empty()) {
        const SemanticMap semantic = load_semantic_map(graph_semantic);
        graph = build_graph(semantic.rows, semantic.trees, graph_params_of(graph_opts));
      } else {
        throw ConfigError("graph: provide --semantic or --centers");
      }
      save_graph(graph, graph_out);
      std::cout << graph.nodes.size() << " nodes, " << graph.edges.size()
                << " edges -> " << graph_out << "\n";
      for (const auto& w : graph.warnings) std::cout << "  warning: " << w << "\n";
      return 0;
    }

    if (*plan_cmd) {
      const VisibilityGraph graph = load_graph(plan_graph);
      using clock = std::chrono::steady_clock;
      if (plan_batch > 0) {
        Xoshiro256ss rng(plan_seed, 0);
        std::vector<double> times_ms;
        int successes = 0;
        double total_len = 0;
        for (int i = 0; i < plan_batch; ++i) {
          const auto& node =
              graph.nodes[static_cast<std::size_t>(rng.uniform() * graph.nodes.size())];
          PlanRequest req;
          req.start_x = plan_start[0];
          req.start_y = plan_start[1];
          req.start_heading = plan_start[2];
          req.goal_x = node.x;
          req.goal_y = node.y;
          req.goal_heading = node.heading;
          const auto t0 = clock::now();
          try {
            const Path path = plan_path(graph, req);
            total_len += path.length;
            ++successes;
          } catch (const PlanError&) {
          }
          const auto t1 = clock::now();
          times_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        }
        std::sort(times_ms.begin(), times_ms.end());
        const double med = times_ms.empty() ? 0
                           : times_ms.size() % 2 ? times_ms[times_ms.size() / 2]
                                                 : 0.5 * (times_ms[times_ms.size() / 2 - 1] +
                                                          times_ms[times_ms.size() / 2]);
        std::cout << "batch " << plan_batch << ": " << successes << " ok, median "
                  << med << " ms, max " << times_ms.back() << " ms\n";
        return 0;
      }
      if (plan_goal.size() != 3)
        throw ConfigError("plan: --goal x y heading is required without --batch");
      PlanRequest req;
      req.start_x = plan_start[0];
      req.start_y = plan_start[1];
      req.start_heading = plan_start[2];
      req.goal_x = plan_goal[0];
      req.goal_y = plan_goal[1];
      req.goal_heading = plan_goal[2];
      const auto t0 = clock::now();
      const Path path = plan_path(graph, req);
      const auto t1 = clock::now();
      save_path(graph, path, plan_out);
      std::cout << "path: " << path.node_ids.size() << " nodes, " << path.length
                << " m, planned in "
                << std::chrono::duration<double, std::milli>(t1 - t0).count()
                << " ms -> " << plan_out << "\n";
      return 0;
    }

    if (*eval_cmd) {
      if (eval_study) {
        if (eval_input.empty() || eval_truth.empty())
          throw ConfigError("eval --study needs --input and --truth");
        const PointCloudMap map = load_pointcloud(eval_input);
        const GroundTruth truth = load_ground_truth(eval_truth);
        std::vector<Box2D> boxes;
        for (const auto& b : truth.tree_boxes) boxes.push_back(b.footprint);
        const auto cells = run_subdivision_study(map, boxes, StudyOptions{});
        if (!study_csv.empty()) {
          std::ofstream out(study_csv);
          out << study_to_csv(cells);
        }
        if (!study_json.empty()) {
          std::ofstream out(study_json);
          out << study_to_json(cells) << "\n";
        }
        std::cout << study_to_csv(cells);
        return 0;
      }
      if (eval_pred.empty() || eval_truth.empty())
        throw ConfigError("eval needs --pred and --truth");
      const auto preds = load_detections(eval_pred);
      std::vector<Box2D> boxes;
      {
        std::ifstream in(eval_truth);
        if (!in) throw IoError(eval_truth + ": cannot open for reading");
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded()) throw IoError(eval_truth + ": invalid JSON");
        if (j.is_object() && j.contains("tree_boxes")) {
          for (const auto& b : j["tree_boxes"])
            boxes.emplace_back(b.at("x_min").get<double>(), b.at("y_min").get<double>(),
                               b.at("x_max").get<double>(), b.at("y_max").get<double>());
        } else {
          for (const auto& d : load_detections(eval_truth)) boxes.push_back(d.box);
        }
      }
      const auto result = eval_detections(preds, boxes, eval_iou);
      json j;
      j["miou"] = result.miou;
      j["miou_defined"] = result.miou_defined;
      j["map50"] = result.map50;
      j["matches"] = result.matches.size();
      j["predictions"] = preds.size();
      j["truths"] = boxes.size();
      if (!eval_out.empty()) {
        std::ofstream out(eval_out);
        out << j.dump(2) << "\n";
      }
      std::cout << j.dump(2) << "\n";
      return 0;
    }
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  } catch (const PlanError& e) {
    std::cerr << "planning error: " << e.what() << "\n";
    return 5;
  } catch (const PipelineError& e) {
    std::cerr << "pipeline error in stage '" << e.stage() << "': " << e.what()
              << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
