#include "nplb/detmetrics.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>
#include <string_view>
#include <utility>

#include <fmt/format.h>
#include <json.hpp>

#include "nplb/error.hpp"
#include "number_format.hpp"

namespace nplb {
namespace {

using nlohmann::json;

std::string image_id_of(const json& j, std::size_t line) {
  const auto it = j.find("image_id");
  if (it == j.end()) throw ParseError("missing \"image_id\"", line);
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  throw ParseError("\"image_id\" must be a string or integer", line);
}

Box box_of(const json& j, std::size_t line) {
  const auto it = j.find("box");
  if (it == j.end() || !it->is_array() || it->size() != 4 ||
      !std::all_of(it->begin(), it->end(), [](const json& v) { return v.is_number(); })) {
    throw ParseError("\"box\" must be [x1, y1, x2, y2]", line);
  }
  Box b{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>(), (*it)[3].get<double>()};
  if (b.x_max < b.x_min || b.y_max < b.y_min) throw ParseError("box has x2 < x1 or y2 < y1", line);
  return b;
}

int class_of(const json& j, std::size_t line) {
  const auto it = j.find("class_index");
  if (it == j.end() || !it->is_number_integer() || it->get<std::int64_t>() < 0) {
    throw ParseError("\"class_index\" must be a non-negative integer", line);
  }
  return static_cast<int>(it->get<std::int64_t>());
}

template <typename Fn>
void for_each_record(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(fmt::format("malformed JSON: {}", e.what()), number);
    }
    if (!j.is_object()) throw ParseError("record must be a JSON object", number);
    fn(j, number);
  }
}

}  // namespace

double iou(const Box& a, const Box& b) noexcept {
  const double iw = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
  const double ih = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni > 0.0 ? inter / uni : 0.0;
}

std::vector<MatchedPrediction> match_predictions(std::span<const Prediction> preds,
                                                 std::span<const GroundTruth> gts,
                                                 double iou_threshold) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return preds[a].score > preds[b].score; });

  // Candidate ground truths per (image, class), in input order.
  std::map<std::pair<std::string_view, int>, std::vector<std::size_t>> candidates;
  for (std::size_t g = 0; g < gts.size(); ++g) candidates[{gts[g].image_id, gts[g].class_index}].push_back(g);

  std::vector<bool> taken(gts.size(), false);
  std::vector<MatchedPrediction> out;
  out.reserve(preds.size());
  for (std::size_t p : order) {
    const Prediction& pred = preds[p];
    std::optional<std::size_t> best;
    double best_iou = -1.0;
    const auto it = candidates.find({pred.image_id, pred.class_index});
    if (it == candidates.end()) {
      out.push_back({pred, false, std::nullopt});
      continue;
    }
    for (std::size_t g : it->second) {
      if (taken[g]) continue;
      const double overlap = iou(pred.box, gts[g].box);
      if (overlap >= iou_threshold && overlap > best_iou) {
        best = g;
        best_iou = overlap;
      }
    }
    if (best) taken[*best] = true;
    out.push_back({pred, best.has_value(), best});
  }
  return out;
}

double average_precision(const std::vector<bool>& flags, std::size_t n_gt) {
  if (n_gt == 0) return flags.empty() ? 1.0 : 0.0;

  const std::size_t n = flags.size();
  std::vector<double> precision(n);
  std::vector<double> recall(n);
  std::size_t tp = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (flags[i]) ++tp;
    precision[i] = static_cast<double>(tp) / static_cast<double>(i + 1);
    recall[i] = static_cast<double>(tp) / static_cast<double>(n_gt);
  }
  // Precision envelope: best precision at any equal-or-higher recall.
  for (std::size_t i = n; i-- > 1;) precision[i - 1] = std::max(precision[i - 1], precision[i]);

  double ap = 0.0;
  double previous_recall = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (recall[i] > previous_recall) {
      ap += (recall[i] - previous_recall) * precision[i];
      previous_recall = recall[i];
    }
  }
  return ap;
}

double mean_ap(std::span<const double> per_class_ap) {
  if (per_class_ap.empty()) throw ValidationError("mAP is undefined over zero classes");
  return std::accumulate(per_class_ap.begin(), per_class_ap.end(), 0.0) /
         static_cast<double>(per_class_ap.size());
}

std::vector<double> coco_iou_thresholds() {
  std::vector<double> t;
  for (int pct = 50; pct <= 95; pct += 5) t.push_back(pct / 100.0);
  return t;
}

EvalResult map_over_range(std::span<const Prediction> preds, std::span<const GroundTruth> gts,
                          const EvalOptions& options) {
  if (options.thresholds.empty()) throw ValidationError("at least one IoU threshold is required");
  for (double t : options.thresholds) {
    if (!(t > 0.0 && t <= 1.0)) throw ValidationError(fmt::format("IoU threshold {} outside (0, 1]", t));
  }

  std::set<int> classes;
  for (const GroundTruth& g : gts) classes.insert(g.class_index);
  for (const Prediction& p : preds) classes.insert(p.class_index);
  if (options.n_classes) {
    for (int c = 0; c < *options.n_classes; ++c) classes.insert(c);
  }

  EvalResult result;
  result.thresholds = options.thresholds;

  // Matching is independent across classes, so one pass per threshold
  // yields every class's flag sequence.
  auto flags_by_class = [&](double threshold) {
    std::map<int, std::vector<bool>> flags;
    for (const MatchedPrediction& m : match_predictions(preds, gts, threshold)) {
      flags[m.prediction.class_index].push_back(m.is_tp);
    }
    return flags;
  };

  for (int cls : classes) {
    ClassAp entry;
    entry.class_index = cls;
    entry.n_gt = static_cast<std::size_t>(
        std::count_if(gts.begin(), gts.end(), [cls](const GroundTruth& g) { return g.class_index == cls; }));
    entry.n_pred = static_cast<std::size_t>(
        std::count_if(preds.begin(), preds.end(), [cls](const Prediction& p) { return p.class_index == cls; }));
    entry.vacuous = entry.n_gt == 0 && entry.n_pred == 0;
    result.per_class.push_back(std::move(entry));
  }

  auto fill = [&](double threshold, auto&& store) {
    auto flags = flags_by_class(threshold);
    for (ClassAp& c : result.per_class) store(c, average_precision(flags[c.class_index], c.n_gt));
  };
  for (double t : options.thresholds) fill(t, [](ClassAp& c, double ap) { c.ap.push_back(ap); });
  fill(0.5, [](ClassAp& c, double ap) { c.ap_50 = ap; });

  auto mean_over_classes = [&](auto ap_of) {
    std::vector<double> aps;
    for (const ClassAp& c : result.per_class) {
      if (c.vacuous && !options.include_vacuous) continue;
      aps.push_back(ap_of(c));
    }
    return mean_ap(aps);
  };

  for (std::size_t t = 0; t < options.thresholds.size(); ++t) {
    result.map_per_threshold.push_back(mean_over_classes([t](const ClassAp& c) { return c.ap[t]; }));
  }
  result.map_50 = mean_over_classes([](const ClassAp& c) { return c.ap_50; });
  result.map_50_95 = mean_ap(result.map_per_threshold);
  return result;
}

std::vector<Prediction> read_predictions(std::istream& in) {
  std::vector<Prediction> out;
  for_each_record(in, [&](const json& j, std::size_t line) {
    Prediction p{image_id_of(j, line), class_of(j, line), box_of(j, line), 0.0};
    const auto score = j.find("score");
    if (score == j.end() || !score->is_number()) throw ParseError("\"score\" must be a number", line);
    p.score = score->get<double>();
    if (p.score < 0.0 || p.score > 1.0) throw ParseError(fmt::format("score {} outside [0, 1]", p.score), line);
    out.push_back(std::move(p));
  });
  return out;
}

std::vector<GroundTruth> read_ground_truth(std::istream& in) {
  std::vector<GroundTruth> out;
  for_each_record(in, [&](const json& j, std::size_t line) {
    out.push_back({image_id_of(j, line), class_of(j, line), box_of(j, line)});
  });
  return out;
}

std::string to_json(const EvalResult& result) {
  using detail::round_sig6;
  nlohmann::ordered_json j;
  j["thresholds"] = nlohmann::ordered_json::array();
  for (double t : result.thresholds) j["thresholds"].push_back(round_sig6(t));
  j["map_50"] = round_sig6(result.map_50);
  j["map_50_95"] = round_sig6(result.map_50_95);
  j["map_per_threshold"] = nlohmann::ordered_json::array();
  for (double m : result.map_per_threshold) j["map_per_threshold"].push_back(round_sig6(m));
  j["per_class"] = nlohmann::ordered_json::array();
  for (const ClassAp& c : result.per_class) {
    nlohmann::ordered_json row;
    row["class_index"] = c.class_index;
    row["n_gt"] = c.n_gt;
    row["n_pred"] = c.n_pred;
    row["vacuous"] = c.vacuous;
    row["ap_50"] = round_sig6(c.ap_50);
    row["ap"] = nlohmann::ordered_json::array();
    for (double a : c.ap) row["ap"].push_back(round_sig6(a));
    j["per_class"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

}  // namespace nplb
