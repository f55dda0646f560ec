#include "nplb/annotations.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "nplb/error.hpp"
#include "nplb/report_io.hpp"

namespace nplb {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Slack for exporters that round boxes to a few decimals.
constexpr double kBoundsSlackPx = 1e-6;

const json& require(const json& obj, const char* key, const std::string& where) {
  const auto it = obj.find(key);
  if (it == obj.end()) throw ParseError(fmt::format("{}: missing \"{}\"", where, key));
  return *it;
}

std::int64_t require_int(const json& obj, const char* key, const std::string& where) {
  const json& v = require(obj, key, where);
  if (!v.is_number_integer()) throw ParseError(fmt::format("{}: \"{}\" must be an integer", where, key));
  return v.get<std::int64_t>();
}

const json& require_array(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end() || !it->is_array()) {
    throw ParseError(fmt::format("document needs a \"{}\" array", key));
  }
  return *it;
}

std::string stem_of(const std::string& file_name) { return fs::path(file_name).stem().string(); }

std::set<std::string> stems_in(const fs::path& dir, bool images) {
  std::set<std::string> stems;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) return stems;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (images ? is_image_file(p) : p.extension() == ".txt") stems.insert(p.stem().string());
  }
  return stems;
}

}  // namespace

bool is_image_file(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".jpg" || ext == ".jpeg" || ext == ".png" || ext == ".bmp" || ext == ".webp" ||
         ext == ".tif" || ext == ".tiff";
}

CocoDataset parse_coco(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ParseError(fmt::format("malformed COCO document: {}", e.what()));
  }
  if (!doc.is_object()) throw ParseError("COCO document must be a JSON object");

  CocoDataset ds;
  const json& images = require_array(doc, "images");
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = fmt::format("images[{}]", i);
    const json& img = images[i];
    if (!img.is_object()) throw ParseError(where + ": must be an object");
    CocoImage out;
    out.id = require_int(img, "id", where);
    const json& name = require(img, "file_name", where);
    if (!name.is_string()) throw ParseError(where + ": \"file_name\" must be a string");
    out.file_name = name.get<std::string>();
    out.width = static_cast<int>(require_int(img, "width", where));
    out.height = static_cast<int>(require_int(img, "height", where));
    if (out.width <= 0 || out.height <= 0) {
      throw ValidationError(fmt::format("{} (id {}): image size {}x{} must be positive", where,
                                        out.id, out.width, out.height));
    }
    ds.images.push_back(std::move(out));
  }

  const json& categories = require_array(doc, "categories");
  for (std::size_t i = 0; i < categories.size(); ++i) {
    const std::string where = fmt::format("categories[{}]", i);
    const json& cat = categories[i];
    if (!cat.is_object()) throw ParseError(where + ": must be an object");
    CocoCategory out;
    out.id = require_int(cat, "id", where);
    const json& name = require(cat, "name", where);
    if (!name.is_string()) throw ParseError(where + ": \"name\" must be a string");
    out.name = name.get<std::string>();
    ds.categories.push_back(std::move(out));
  }

  std::unordered_map<std::int64_t, std::size_t> image_index;
  for (std::size_t i = 0; i < ds.images.size(); ++i) {
    if (!image_index.emplace(ds.images[i].id, i).second) {
      throw ValidationError(fmt::format("images[{}]: duplicate image id {}", i, ds.images[i].id));
    }
  }
  std::set<std::int64_t> category_ids;
  for (std::size_t i = 0; i < ds.categories.size(); ++i) {
    if (!category_ids.insert(ds.categories[i].id).second) {
      throw ValidationError(
          fmt::format("categories[{}]: duplicate category id {}", i, ds.categories[i].id));
    }
  }

  const json& annotations = require_array(doc, "annotations");
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    std::string where = fmt::format("annotations[{}]", i);
    const json& ann = annotations[i];
    if (!ann.is_object()) throw ParseError(where + ": must be an object");
    CocoAnnotation out;
    if (const auto id = ann.find("id"); id != ann.end() && id->is_number_integer()) {
      out.id = id->get<std::int64_t>();
      where += fmt::format(" (id {})", out.id);
    }
    out.image_id = require_int(ann, "image_id", where);
    out.category_id = require_int(ann, "category_id", where);
    const json& bbox = require(ann, "bbox", where);
    if (!bbox.is_array() || bbox.size() != 4 ||
        !std::all_of(bbox.begin(), bbox.end(), [](const json& v) { return v.is_number(); })) {
      throw ParseError(where + ": \"bbox\" must be 4 numbers");
    }
    for (std::size_t k = 0; k < 4; ++k) out.bbox[k] = bbox[k].get<double>();

    const auto img = image_index.find(out.image_id);
    if (img == image_index.end()) {
      throw ValidationError(fmt::format("{}: image_id {} does not reference an image", where, out.image_id));
    }
    if (!category_ids.contains(out.category_id)) {
      throw ValidationError(fmt::format("{}: category_id {} is not declared", where, out.category_id));
    }
    const CocoImage& image = ds.images[img->second];
    const auto& [x, y, w, h] = out.bbox;
    if (x < 0.0 || y < 0.0 || w < 0.0 || h < 0.0 || x + w > image.width + kBoundsSlackPx ||
        y + h > image.height + kBoundsSlackPx) {
      throw ValidationError(fmt::format("{}: bbox [{}, {}, {}, {}] does not fit image {} ({}x{})", where,
                                        x, y, w, h, image.id, image.width, image.height));
    }
    ds.annotations.push_back(out);
  }
  return ds;
}

CategoryIndexMap default_id_map(const CocoDataset& dataset) {
  std::vector<std::int64_t> ids;
  ids.reserve(dataset.categories.size());
  for (const CocoCategory& c : dataset.categories) ids.push_back(c.id);
  std::sort(ids.begin(), ids.end());
  CategoryIndexMap map;
  for (std::size_t i = 0; i < ids.size(); ++i) map.emplace(ids[i], static_cast<int>(i));
  return map;
}

void check_id_map(const CategoryIndexMap& id_map) {
  std::vector<bool> seen(id_map.size(), false);
  for (const auto& [category, index] : id_map) {
    if (index < 0 || static_cast<std::size_t>(index) >= id_map.size() || seen[static_cast<std::size_t>(index)]) {
      throw ValidationError(fmt::format(
          "category {} maps to index {}; indices must be a permutation of 0..{}", category, index,
          static_cast<int>(id_map.size()) - 1));
    }
    seen[static_cast<std::size_t>(index)] = true;
  }
}

std::vector<std::int64_t> invert_id_map(const CategoryIndexMap& id_map) {
  check_id_map(id_map);
  std::vector<std::int64_t> inverse(id_map.size());
  for (const auto& [category, index] : id_map) inverse[static_cast<std::size_t>(index)] = category;
  return inverse;
}

std::vector<std::string> class_names(const CocoDataset& dataset, const CategoryIndexMap& id_map) {
  const std::vector<std::int64_t> inverse = invert_id_map(id_map);
  std::vector<std::string> names;
  names.reserve(inverse.size());
  for (std::int64_t id : inverse) {
    const auto it = std::find_if(dataset.categories.begin(), dataset.categories.end(),
                                 [id](const CocoCategory& c) { return c.id == id; });
    names.push_back(it != dataset.categories.end() ? it->name : fmt::format("class_{}", id));
  }
  return names;
}

YoloLabel coco_box_to_yolo(const CocoBox& bbox, double img_w, double img_h, std::int64_t category_id,
                           const CategoryIndexMap& id_map) {
  if (!(img_w > 0.0) || !(img_h > 0.0)) {
    throw ValidationError(fmt::format("image size {}x{} must be positive", img_w, img_h));
  }
  const auto it = id_map.find(category_id);
  if (it == id_map.end()) throw ValidationError(fmt::format("unknown category_id {}", category_id));

  const auto& [x, y, w, h] = bbox;
  auto unit = [](double v) { return std::clamp(v, 0.0, 1.0); };
  return YoloLabel{it->second, unit((x + w / 2.0) / img_w), unit((y + h / 2.0) / img_h),
                   unit(w / img_w), unit(h / img_h)};
}

CocoBox yolo_box_to_coco(const YoloLabel& label, double img_w, double img_h) {
  const double w = label.w * img_w;
  const double h = label.h * img_h;
  return {label.cx * img_w - w / 2.0, label.cy * img_h - h / 2.0, w, h};
}

std::string format_label_line(const YoloLabel& label) {
  return fmt::format("{} {:.6f} {:.6f} {:.6f} {:.6f}", label.class_index, label.cx, label.cy, label.w,
                     label.h);
}

ConversionSummary convert_split(const CocoDataset& dataset, const SplitLayout& layout,
                                const CategoryIndexMap& id_map) {
  ConversionSummary summary;
  summary.split = layout.name;
  summary.per_class_counts.assign(id_map.size(), 0);

  std::error_code ec;
  fs::create_directories(layout.label_dir, ec);
  if (ec) throw IoError(fmt::format("cannot create {}: {}", layout.label_dir.string(), ec.message()));

  std::unordered_map<std::int64_t, std::vector<const CocoAnnotation*>> by_image;
  for (const CocoAnnotation& a : dataset.annotations) by_image[a.image_id].push_back(&a);

  for (const CocoImage& image : dataset.images) {
    std::string body;
    if (const auto it = by_image.find(image.id); it != by_image.end()) {
      for (const CocoAnnotation* a : it->second) {
        const YoloLabel label = coco_box_to_yolo(a->bbox, image.width, image.height, a->category_id, id_map);
        body += format_label_line(label);
        body += '\n';
        ++summary.objects;
        ++summary.per_class_counts[static_cast<std::size_t>(label.class_index)];
      }
    }
    write_text_file(layout.label_dir / (stem_of(image.file_name) + ".txt"), body);
    ++summary.images;
    ++summary.label_files;
  }
  return summary;
}

bool ValidationReport::ok() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const SplitValidation& r) { return r.ok(); });
}

ValidationReport validate_counts(std::span<const SplitLayout> layouts) {
  ValidationReport report;
  for (const SplitLayout& layout : layouts) {
    const std::set<std::string> images = stems_in(layout.image_dir, true);
    const std::set<std::string> labels = stems_in(layout.label_dir, false);
    SplitValidation row;
    row.split = layout.name;
    row.image_count = images.size();
    row.label_count = labels.size();
    std::set_difference(images.begin(), images.end(), labels.begin(), labels.end(),
                        std::back_inserter(row.missing_labels));
    std::set_difference(labels.begin(), labels.end(), images.begin(), images.end(),
                        std::back_inserter(row.orphan_labels));
    report.rows.push_back(std::move(row));
  }
  return report;
}

std::string to_json(const ValidationReport& report) {
  nlohmann::ordered_json j;
  j["ok"] = report.ok();
  j["splits"] = nlohmann::ordered_json::array();
  for (const SplitValidation& r : report.rows) {
    nlohmann::ordered_json row;
    row["split"] = r.split;
    row["images"] = r.image_count;
    row["labels"] = r.label_count;
    row["ok"] = r.ok();
    row["missing_labels"] = r.missing_labels;
    row["orphan_labels"] = r.orphan_labels;
    j["splits"].push_back(std::move(row));
  }
  return j.dump(2) + "\n";
}

std::string dataset_config_text(const fs::path& root, std::span<const SplitLayout> layouts,
                                const std::vector<std::string>& names) {
  std::string out = fmt::format("path: {}\n", root.string());
  for (const SplitLayout& layout : layouts) {
    out += fmt::format("{}: {}\n", layout.name, layout.image_dir.lexically_relative(root).string());
  }
  out += fmt::format("nc: {}\nnames:\n", names.size());
  for (std::size_t i = 0; i < names.size(); ++i) out += fmt::format("  {}: {}\n", i, names[i]);
  return out;
}

}  // namespace nplb
