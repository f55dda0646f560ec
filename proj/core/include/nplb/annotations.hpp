#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nplb {

struct CocoImage {
  std::int64_t id = 0;
  std::string file_name;
  int width = 0;
  int height = 0;
};

/// COCO bbox: x_min, y_min, width, height in absolute pixels.
using CocoBox = std::array<double, 4>;

struct CocoAnnotation {
  std::int64_t id = 0;
  std::int64_t image_id = 0;
  std::int64_t category_id = 0;
  CocoBox bbox{};
};

struct CocoCategory {
  std::int64_t id = 0;
  std::string name;
};

struct CocoDataset {
  std::vector<CocoImage> images;
  std::vector<CocoAnnotation> annotations;
  std::vector<CocoCategory> categories;
};

/// Parses a COCO document and checks referential integrity and box bounds.
/// Throws ParseError for malformed JSON or missing fields and
/// ValidationError naming the offending record otherwise.
CocoDataset parse_coco(std::string_view document);

/// Normalized YOLO label: class index and box center/size in [0, 1].
struct YoloLabel {
  int class_index = 0;
  double cx = 0.0;
  double cy = 0.0;
  double w = 0.0;
  double h = 0.0;
};

/// COCO category id -> 0-based class index.
using CategoryIndexMap = std::map<std::int64_t, int>;

/// Category ids sorted ascending, assigned 0, 1, 2, ...
CategoryIndexMap default_id_map(const CocoDataset& dataset);

/// Throws ValidationError unless the map's values are exactly 0..n-1.
void check_id_map(const CategoryIndexMap& id_map);

/// Class index -> COCO category id. Add one for a 1-indexed scheme with an
/// implicit background class 0.
std::vector<std::int64_t> invert_id_map(const CategoryIndexMap& id_map);

/// Class names in index order, taken from the dataset categories.
std::vector<std::string> class_names(const CocoDataset& dataset, const CategoryIndexMap& id_map);

/// Throws ValidationError for non-positive image sizes or unmapped
/// categories.
YoloLabel coco_box_to_yolo(const CocoBox& bbox, double img_w, double img_h,
                           std::int64_t category_id, const CategoryIndexMap& id_map);

CocoBox yolo_box_to_coco(const YoloLabel& label, double img_w, double img_h);

/// "<class> <cx> <cy> <w> <h>" with 6 decimals, no trailing newline.
std::string format_label_line(const YoloLabel& label);

struct SplitLayout {
  std::string name;
  std::filesystem::path image_dir;
  std::filesystem::path label_dir;
  std::vector<std::string> class_names;
};

struct ConversionSummary {
  std::string split;
  std::size_t images = 0;
  std::size_t label_files = 0;
  std::size_t objects = 0;
  std::vector<std::size_t> per_class_counts;
};

/// Writes one label file per image (empty when the image has no objects)
/// into layout.label_dir.
ConversionSummary convert_split(const CocoDataset& dataset, const SplitLayout& layout,
                                const CategoryIndexMap& id_map);

struct SplitValidation {
  std::string split;
  std::size_t image_count = 0;
  std::size_t label_count = 0;
  /// Image stems with no label file.
  std::vector<std::string> missing_labels;
  /// Label stems with no image.
  std::vector<std::string> orphan_labels;

  bool ok() const noexcept {
    return image_count == label_count && missing_labels.empty() && orphan_labels.empty();
  }
};

struct ValidationReport {
  std::vector<SplitValidation> rows;

  bool ok() const noexcept;
};

/// Compares image files and `.txt` label files per split. Missing
/// directories count as empty.
ValidationReport validate_counts(std::span<const SplitLayout> layouts);

std::string to_json(const ValidationReport& report);

/// Minimal dataset YAML: root path, split directories, `nc` and `names`.
std::string dataset_config_text(const std::filesystem::path& root,
                                std::span<const SplitLayout> layouts,
                                const std::vector<std::string>& class_names);

inline constexpr std::array<std::string_view, 3> kStandardSplits{"train", "validation", "test"};

bool is_image_file(const std::filesystem::path& path);

}  // namespace nplb
