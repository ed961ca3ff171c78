#pragma once

#include "hometwin/core/types.hpp"
#include "hometwin/ingestion/http.hpp"
#include "hometwin/ingestion/source.hpp"
#include "hometwin/ingestion/token.hpp"

#include <string_view>
#include <vector>

namespace hometwin::ingestion {

struct PollResult {
    std::vector<core::Observation> observations;
    std::size_t skipped = 0; // malformed records
};

/// Maps one provider payload into observations. Payload shapes per kind:
///
///   poll-bearer          {"sensors":[{"id":s,"lastupdated":rfc3339,"value":x}]}
///   poll-oauth-password  {"body":[{"id":s,"time_utc":epoch_seconds,"value":x}]}
///   poll-jwt-assertion   {"events":[{"device":s,"timestamp":rfc3339,"data":{"value":x}}]}
///
/// An empty body or missing top-level array is an empty poll. Records that fail
/// to map are counted in `skipped`. A body that is not JSON throws Error(source).
PollResult parse_payload(SourceKind kind, std::string_view body);

/// GETs the source endpoint with `Authorization: Bearer <token>`.
/// 401 throws Error(unauthorized); other non-2xx statuses throw Error(source).
PollResult poll_once(const SourceConfig& config, const TokenState& token, HttpTransport& transport);

} // namespace hometwin::ingestion
