#pragma once

#include <stdexcept>
#include <string>

namespace xwalk {

/// Base of every error the toolkit raises. `kind()` is a stable
/// machine-readable tag used by the CLI's JSON error output.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define XWALK_DEFINE_ERROR(Name, tag)                                  \
  class Name : public Error {                                          \
   public:                                                             \
    explicit Name(const std::string& message) : Error(tag, message) {} \
  }

XWALK_DEFINE_ERROR(GeoError, "geo_error");
XWALK_DEFINE_ERROR(DecodeError, "decode_error");
XWALK_DEFINE_ERROR(QueryError, "query_error");
XWALK_DEFINE_ERROR(TransportError, "transport_error");
XWALK_DEFINE_ERROR(FetchError, "fetch_error");
XWALK_DEFINE_ERROR(PlanningError, "planning_error");
XWALK_DEFINE_ERROR(RouteNotFound, "route_not_found");
XWALK_DEFINE_ERROR(ProjectionError, "projection_error");
XWALK_DEFINE_ERROR(ShapeError, "shape_error");
XWALK_DEFINE_ERROR(ImageError, "image_error");
XWALK_DEFINE_ERROR(QuotaExceeded, "quota_exceeded");
XWALK_DEFINE_ERROR(SplitError, "split_error");
XWALK_DEFINE_ERROR(MergeError, "merge_error");
XWALK_DEFINE_ERROR(SpecError, "spec_error");
XWALK_DEFINE_ERROR(AuditError, "audit_error");
XWALK_DEFINE_ERROR(TallyError, "tally_error");
XWALK_DEFINE_ERROR(UndefinedMetric, "undefined_metric");
XWALK_DEFINE_ERROR(ConfigError, "config_error");
XWALK_DEFINE_ERROR(InputError, "missing_input");
XWALK_DEFINE_ERROR(FormatError, "format_error");

#undef XWALK_DEFINE_ERROR

/// Malformed response body; carries the byte offset reported by the parser.
class ParseError : public Error {
 public:
  ParseError(const std::string& message, std::size_t byte_offset)
      : Error("parse_error", message + " (at byte " + std::to_string(byte_offset) + ")"),
        byte_offset_(byte_offset) {}

  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

}  // namespace xwalk
