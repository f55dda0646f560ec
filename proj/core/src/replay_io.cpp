#include "nplb/replay_io.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include "nplb/error.hpp"
#include "number_format.hpp"

namespace nplb {
namespace {

using ordered_json = nlohmann::ordered_json;

bool is_blank(std::string_view line) {
  return line.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

Detection parse_detection(const nlohmann::json& j, std::size_t line_number) {
  if (!j.is_object()) throw ParseError("detection must be an object", line_number);

  Detection d;
  const auto cls = j.find("class");
  if (cls == j.end() || !cls->is_string()) {
    throw ParseError("detection needs a string \"class\"", line_number);
  }
  const auto parsed = parse_class_name(cls->get_ref<const std::string&>());
  if (!parsed) {
    throw ParseError(fmt::format("unknown class \"{}\"", cls->get<std::string>()),
                     line_number);
  }
  d.object_class = *parsed;

  const auto id = j.find("track_id");
  if (id != j.end() && !id->is_null()) {
    if (!id->is_number_integer()) {
      throw ParseError("track_id must be an integer", line_number);
    }
    d.track_id = id->get<std::int64_t>();
    if (d.track_id < kUntrackedId) {
      throw ParseError(fmt::format("track_id {} is below -1", d.track_id), line_number);
    }
  }

  const auto conf = j.find("confidence");
  if (conf != j.end() && !conf->is_null()) {
    if (!conf->is_number()) throw ParseError("confidence must be a number", line_number);
    const double value = conf->get<double>();
    if (value < 0.0 || value > 1.0) {
      throw ParseError(fmt::format("confidence {} outside [0, 1]", value), line_number);
    }
    d.confidence = value;
  }
  return d;
}

}  // namespace

DetectionFrame parse_frame_line(std::string_view line, std::size_t line_number) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(fmt::format("malformed JSON: {}", e.what()), line_number);
  }
  if (!j.is_object()) throw ParseError("record must be a JSON object", line_number);

  DetectionFrame frame;
  const auto index = j.find("frame");
  if (index == j.end() || !index->is_number_integer()) {
    throw ParseError("record needs an integer \"frame\"", line_number);
  }
  frame.frame_index = index->get<std::int64_t>();
  if (frame.frame_index < 0) {
    throw ParseError("frame index must be non-negative", line_number);
  }

  const auto dets = j.find("detections");
  if (dets == j.end() || !dets->is_array()) {
    throw ParseError("record needs a \"detections\" array", line_number);
  }
  frame.detections.reserve(dets->size());
  for (const auto& d : *dets) frame.detections.push_back(parse_detection(d, line_number));
  return frame;
}

std::vector<DetectionFrame> read_frames(std::istream& in) {
  std::vector<DetectionFrame> frames;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (is_blank(line)) continue;
    frames.push_back(parse_frame_line(line, line_number));
  }
  return frames;
}

std::string format_frame_line(const DetectionFrame& frame) {
  ordered_json j;
  j["frame"] = frame.frame_index;
  j["detections"] = ordered_json::array();
  for (const Detection& d : frame.detections) {
    ordered_json det;
    det["class"] = std::string(class_name(d.object_class));
    det["track_id"] = d.track_id;
    if (d.confidence) {
      det["confidence"] = *d.confidence;
    } else {
      det["confidence"] = nullptr;
    }
    j["detections"].push_back(std::move(det));
  }
  return j.dump();
}

std::string format_command_line(const CommandRecord& record) {
  ordered_json j;
  j["frame"] = record.frame_index;
  j["command"] = "EXTEND_SIGNAL";
  j["time_left"] = detail::round_sig6(record.command.new_time_left_s);
  j["extension_index"] = record.command.extension_index;
  return j.dump();
}

std::string format_trace_line(const FrameTrace& trace) {
  ordered_json j;
  j["frame"] = trace.frame_index;
  j["vru_detected"] = trace.vru_detected;
  j["vru_ids"] = trace.vru_ids;
  j["vru_timeout"] = trace.vru_timeout;
  j["extension_count"] = trace.extension_count;
  j["time_left"] = detail::round_sig6(trace.time_left_s);
  return j.dump();
}

std::string replay_summary_json(const ReplayReport& report) {
  ordered_json j;
  j["initial_signal"] = detail::round_sig6(report.initial_signal_s);
  j["frames"] = report.trace.size();
  j["commands"] = report.commands.size();
  j["extensions_granted"] = report.extensions_granted;
  j["final_time_left"] = detail::round_sig6(report.final_time_left_s);
  j["final_duration"] = detail::round_sig6(report.final_duration_s);
  return j.dump(2) + "\n";
}

}  // namespace nplb
