#include <sstream>

#include <gtest/gtest.h>

#include "nplb/error.hpp"
#include "nplb/replay_io.hpp"

namespace nplb {
namespace {

TEST(ParseFrameLine, ReadsDetections) {
  const DetectionFrame f = parse_frame_line(
      R"({"frame": 12, "detections": [{"class": "with_disability", "track_id": 4, "confidence": 0.75},)"
      R"( {"class": "non_vulnerable", "track_id": -1, "confidence": null}]})");
  EXPECT_EQ(f.frame_index, 12);
  ASSERT_EQ(f.detections.size(), 2u);
  EXPECT_EQ(f.detections[0].object_class, ObjectClass::WithDisability);
  EXPECT_EQ(f.detections[0].track_id, 4);
  EXPECT_DOUBLE_EQ(*f.detections[0].confidence, 0.75);
  EXPECT_EQ(f.detections[1].track_id, kUntrackedId);
  EXPECT_FALSE(f.detections[1].confidence.has_value());
}

TEST(ParseFrameLine, RejectsUnknownClass) {
  try {
    parse_frame_line(R"({"frame": 1, "detections": [{"class": "cyclist", "track_id": 1}]})", 7);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 7u);
    EXPECT_NE(std::string(e.what()).find("cyclist"), std::string::npos);
  }
}

TEST(ParseFrameLine, RejectsTrackIdBelowMinusOne) {
  EXPECT_THROW(parse_frame_line(R"({"frame": 1, "detections": [{"class": "with_disability", "track_id": -2}]})"),
               ParseError);
}

TEST(ParseFrameLine, RejectsMissingFields) {
  EXPECT_THROW(parse_frame_line(R"({"detections": []})"), ParseError);
  EXPECT_THROW(parse_frame_line(R"({"frame": 1})"), ParseError);
  EXPECT_THROW(parse_frame_line(R"({"frame": 1, "detections": [)"), ParseError);
}

TEST(ReadFrames, ReportsLineNumberOfMalformedRecord) {
  std::istringstream in("{\"frame\": 0, \"detections\": []}\n\n{\"frame\": 1, \"detections\": [}\n");
  try {
    read_frames(in);
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u);
  }
}

TEST(ReadFrames, EmptyStream) {
  std::istringstream in("");
  EXPECT_TRUE(read_frames(in).empty());
}

TEST(FormatCommandLine, MatchesWireFormat) {
  EXPECT_EQ(format_command_line({481, {20.0 + 3.0 - 481.0 / 30.0, 1}}),
            R"({"frame":481,"command":"EXTEND_SIGNAL","time_left":6.96667,"extension_index":1})");
  EXPECT_EQ(format_command_line({13, {6.0, 2}}),
            R"({"frame":13,"command":"EXTEND_SIGNAL","time_left":6.0,"extension_index":2})");
}

TEST(FormatFrameLine, ParsesBack) {
  const DetectionFrame f{5, {{ObjectClass::ChildWithoutDisability, 3, 0.5}, {ObjectClass::NonVulnerable, -1, {}}}};
  const DetectionFrame back = parse_frame_line(format_frame_line(f));
  EXPECT_EQ(back.frame_index, 5);
  ASSERT_EQ(back.detections.size(), 2u);
  EXPECT_EQ(back.detections[0].object_class, ObjectClass::ChildWithoutDisability);
  EXPECT_EQ(back.detections[1].track_id, -1);
}

}  // namespace
}  // namespace nplb
