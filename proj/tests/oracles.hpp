#pragma once

// Independent reference computations for tests. Nothing here calls into the
// library code paths it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <vector>

#include "nplb/detmetrics.hpp"

namespace nplb::oracle {

/// IoU of integer-coordinate boxes by counting unit cells.
inline double iou_by_cells(const Box& a, const Box& b) {
  const int lo_x = static_cast<int>(std::min(a.x_min, b.x_min));
  const int hi_x = static_cast<int>(std::max(a.x_max, b.x_max));
  const int lo_y = static_cast<int>(std::min(a.y_min, b.y_min));
  const int hi_y = static_cast<int>(std::max(a.y_max, b.y_max));
  auto inside = [](const Box& box, double cx, double cy) {
    return cx > box.x_min && cx < box.x_max && cy > box.y_min && cy < box.y_max;
  };
  long inter = 0;
  long uni = 0;
  for (int x = lo_x; x < hi_x; ++x) {
    for (int y = lo_y; y < hi_y; ++y) {
      const bool in_a = inside(a, x + 0.5, y + 0.5);
      const bool in_b = inside(b, x + 0.5, y + 0.5);
      inter += (in_a && in_b) ? 1 : 0;
      uni += (in_a || in_b) ? 1 : 0;
    }
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

/// Prediction indices by descending score, ties by input position
/// (insertion sort, deliberately naive).
inline std::vector<std::size_t> score_order(const std::vector<Prediction>& preds) {
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    auto pos = order.begin();
    while (pos != order.end() && preds[*pos].score >= preds[i].score) ++pos;
    order.insert(pos, i);
  }
  return order;
}

/// Enumerates every injective assignment of predictions (in score order) to
/// eligible ground truths and keeps the lexicographically best one, where
/// prediction k's key is (matched, IoU, -gt index). Returns TP flags in
/// score order.
inline std::vector<bool> exhaustive_match(const std::vector<Prediction>& preds,
                                          const std::vector<GroundTruth>& gts, double threshold) {
  const std::vector<std::size_t> order = score_order(preds);
  const std::size_t n = order.size();

  struct Key {
    int matched;
    double overlap;
    long neg_index;
  };
  auto key_less = [](const std::vector<Key>& a, const std::vector<Key>& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].matched != b[i].matched) return a[i].matched < b[i].matched;
      if (a[i].overlap != b[i].overlap) return a[i].overlap < b[i].overlap;
      if (a[i].neg_index != b[i].neg_index) return a[i].neg_index < b[i].neg_index;
    }
    return false;
  };

  std::optional<std::vector<Key>> best;
  std::vector<Key> current(n);
  std::vector<bool> used(gts.size(), false);

  auto recurse = [&](auto&& self, std::size_t k) -> void {
    if (k == n) {
      if (!best || key_less(*best, current)) best = current;
      return;
    }
    const Prediction& p = preds[order[k]];
    current[k] = {0, 0.0, 0};
    self(self, k + 1);
    for (std::size_t g = 0; g < gts.size(); ++g) {
      if (used[g] || gts[g].image_id != p.image_id || gts[g].class_index != p.class_index) continue;
      // Plain-arithmetic IoU, written out independently.
      const Box& a = p.box;
      const Box& b = gts[g].box;
      const double w = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
      const double h = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
      const double inter = w * h;
      const double uni = (a.x_max - a.x_min) * (a.y_max - a.y_min) + (b.x_max - b.x_min) * (b.y_max - b.y_min) - inter;
      const double overlap = (inter > 0.0 && uni > 0.0) ? inter / uni : 0.0;
      if (overlap < threshold) continue;
      used[g] = true;
      current[k] = {1, overlap, -static_cast<long>(g)};
      self(self, k + 1);
      used[g] = false;
    }
  };
  recurse(recurse, 0);

  std::vector<bool> flags;
  for (const Key& k : *best) flags.push_back(k.matched == 1);
  return flags;
}

/// AP as the mean over ground truths of the best precision at or beyond the
/// rank where each one is recalled; unrecalled ground truths contribute 0.
inline double ap_by_ranks(const std::vector<bool>& flags, std::size_t n_gt) {
  if (n_gt == 0) return flags.empty() ? 1.0 : 0.0;
  std::vector<double> precision;
  std::size_t tp = 0;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    tp += flags[i] ? 1 : 0;
    precision.push_back(static_cast<double>(tp) / static_cast<double>(i + 1));
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < flags.size(); ++k) {
    if (!flags[k]) continue;
    double best = 0.0;
    for (std::size_t j = k; j < flags.size(); ++j) best = std::max(best, precision[j]);
    sum += best;
  }
  return sum / static_cast<double>(n_gt);
}

/// Fixed-time stranding probability at deterministic nominal speeds, by
/// brute-force midpoint integration of the stranding indicator over
/// crosswalk length U[30, 60] x entry delay U[0, 3], weighted by type share.
inline double deterministic_fixed_stranding(double p_general, double p_elderly, double p_wheelchair,
                                            double design_speed, double buffer, int cells = 2000) {
  const double speeds[3] = {4.00, 2.80, 3.55};
  const double shares[3] = {p_general, p_elderly, p_wheelchair};
  double total = 0.0;
  for (int t = 0; t < 3; ++t) {
    long stranded = 0;
    for (int i = 0; i < cells; ++i) {
      const double length = 30.0 + 30.0 * (i + 0.5) / cells;
      for (int j = 0; j < cells; ++j) {
        const double delay = 3.0 * (j + 0.5) / cells;
        if (delay + length / speeds[t] > length / design_speed + buffer) ++stranded;
      }
    }
    total += shares[t] * static_cast<double>(stranded) / (static_cast<double>(cells) * cells);
  }
  return total;
}

}  // namespace nplb::oracle
