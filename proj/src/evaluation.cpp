#include "orchardnav/evaluation.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orchard {

using json = nlohmann::ordered_json;

namespace {

std::vector<std::size_t> confidence_order(const std::vector<Detection>& preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (preds[a].confidence != preds[b].confidence)
      return preds[a].confidence > preds[b].confidence;
    if (preds[a].box.x_min != preds[b].box.x_min)
      return preds[a].box.x_min < preds[b].box.x_min;
    return preds[a].box.y_min < preds[b].box.y_min;
  });
  return order;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  if (n == 0) return 0;
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

DetectionEvalResult eval_detections(const std::vector<Detection>& preds,
                                    const std::vector<Box2D>& truths,
                                    double iou_threshold) {
  if (truths.empty()) throw ConfigError("eval_detections: empty truth set");

  const auto order = confidence_order(preds);
  std::vector<bool> truth_used(truths.size(), false);
  std::vector<bool> is_tp(preds.size(), false);

  DetectionEvalResult result;
  for (std::size_t oi = 0; oi < order.size(); ++oi) {
    const std::size_t pi = order[oi];
    double best_iou = 0.0;
    int best_truth = -1;
    for (std::size_t ti = 0; ti < truths.size(); ++ti) {
      if (truth_used[ti]) continue;
      const double v = iou_2d(preds[pi].box, truths[ti]);
      if (v >= iou_threshold && v > best_iou) {
        best_iou = v;
        best_truth = static_cast<int>(ti);
      }
    }
    if (best_truth >= 0) {
      truth_used[best_truth] = true;
      is_tp[oi] = true;
      result.matches.push_back(
          {static_cast<int>(pi), best_truth, best_iou});
    }
  }

  if (!result.matches.empty()) {
    double sum = 0;
    for (const auto& m : result.matches) sum += m.iou;
    result.miou = sum / result.matches.size();
    result.miou_defined = true;
  }

  // 11-point interpolated AP over the confidence-ranked PR curve.
  std::vector<double> precision, recall;
  int tp = 0;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (is_tp[i]) ++tp;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
    recall.push_back(static_cast<double>(tp) / static_cast<double>(truths.size()));
  }
  double ap = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double r = k / 10.0;
    double p_max = 0.0;
    for (std::size_t i = 0; i < recall.size(); ++i)
      if (recall[i] >= r) p_max = std::max(p_max, precision[i]);
    ap += p_max;
  }
  result.map50 = ap / 11.0;
  return result;
}

std::vector<StudyCell> run_subdivision_study(const PointCloudMap& map,
                                             const std::vector<Box2D>& truths,
                                             const StudyOptions& options) {
  using clock = std::chrono::steady_clock;
  if (map.empty()) throw ConfigError("run_subdivision_study: empty map");
  if (options.timing_runs < 1)
    throw ConfigError("run_subdivision_study: timing_runs must be >= 1");

  std::vector<StudyCell> cells;
  for (double size : options.window_sizes) {
    WindowSpec wspec;
    wspec.window_size = size;
    wspec.stride = std::max(size - options.overlap, size / 2.0);
    const auto windows = generate_windows(map, wspec);

    for (int resolution : options.resolutions) {
      EncoderParams enc = options.encoder;
      enc.resolution = resolution;

      StudyCell cell;
      cell.window_size = size;
      cell.resolution = resolution;
      cell.n_windows = static_cast<int>(windows.size());

      std::vector<double> encode_totals, predict_totals;
      std::vector<std::pair<const LocalWindow*, std::vector<Detection>>> per_window;
      for (int run = 0; run < options.timing_runs; ++run) {
        per_window.clear();
        std::vector<FeatureImage> images;
        images.reserve(windows.size());
        const auto t0 = clock::now();
        for (const auto& w : windows) images.push_back(encode_pillars(map, w, enc));
        const auto t1 = clock::now();
        for (std::size_t i = 0; i < windows.size(); ++i)
          per_window.emplace_back(&windows[i],
                                  baseline_detect(images[i], options.detector));
        const auto t2 = clock::now();
        encode_totals.push_back(std::chrono::duration<double>(t1 - t0).count());
        predict_totals.push_back(std::chrono::duration<double>(t2 - t1).count());
      }
      cell.feature_time_total_s = median(encode_totals);
      cell.feature_time_window_s = cell.feature_time_total_s / windows.size();
      cell.predict_time_total_s = median(predict_totals);
      cell.predict_time_window_s = cell.predict_time_total_s / windows.size();

      const auto merged = merge_window_detections(per_window, options.nms_iou);
      cell.detections = static_cast<int>(merged.size());
      const auto eval = eval_detections(merged, truths, options.eval_iou);
      cell.miou = eval.miou;
      cell.miou_defined = eval.miou_defined;
      cells.push_back(cell);
    }
  }
  return cells;
}

std::string study_to_csv(const std::vector<StudyCell>& cells) {
  std::ostringstream os;
  os << "strategy,n_windows,feature_time_window_s,feature_time_total_s,"
        "predict_time_window_s,predict_time_total_s,miou,detections\n";
  for (const auto& c : cells) {
    os << c.window_size << "mx" << c.window_size << "m+" << c.resolution << "x"
       << c.resolution << "," << c.n_windows << "," << c.feature_time_window_s
       << "," << c.feature_time_total_s << "," << c.predict_time_window_s << ","
       << c.predict_time_total_s << "," << c.miou << "," << c.detections << "\n";
  }
  return os.str();
}

std::string study_to_json(const std::vector<StudyCell>& cells) {
  json arr = json::array();
  for (const auto& c : cells) {
    json j;
    j["window_size"] = c.window_size;
    j["resolution"] = c.resolution;
    j["n_windows"] = c.n_windows;
    j["feature_time_window_s"] = c.feature_time_window_s;
    j["feature_time_total_s"] = c.feature_time_total_s;
    j["predict_time_window_s"] = c.predict_time_window_s;
    j["predict_time_total_s"] = c.predict_time_total_s;
    j["miou"] = c.miou;
    j["miou_defined"] = c.miou_defined;
    j["detections"] = c.detections;
    arr.push_back(j);
  }
  return arr.dump(2);
}

}  // namespace orchard
