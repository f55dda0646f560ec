#pragma once

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "nplb/controller.hpp"

namespace nplb {

/// Parses one replay record:
///   {"frame": 3, "detections": [{"class": "with_disability", "track_id": 2,
///    "confidence": 0.91}]}
/// Throws ParseError tagged with `line_number` on malformed input, unknown
/// class names or track IDs below -1.
DetectionFrame parse_frame_line(std::string_view line, std::size_t line_number = 0);

/// Reads a whole stream, skipping blank lines.
std::vector<DetectionFrame> read_frames(std::istream& in);

std::string format_frame_line(const DetectionFrame& frame);

/// {"frame":481,"command":"EXTEND_SIGNAL","time_left":6.96667,"extension_index":1}
std::string format_command_line(const CommandRecord& record);

std::string format_trace_line(const FrameTrace& trace);

/// Summary document: initial signal, final time left and duration, and the
/// command count. The per-frame ID history lives in the trace log.
std::string replay_summary_json(const ReplayReport& report);

}  // namespace nplb
