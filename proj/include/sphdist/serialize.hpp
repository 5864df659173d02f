#pragma once

#include <json.hpp>

#include "sphdist/report.hpp"
#include "sphdist/swap.hpp"

namespace sphdist {

// JSON schemas for exported reports and decomposition traces. The readers
// ignore unknown keys, so callers may add envelope fields (version, seed).

nlohmann::json report_to_json(const VerificationReport& report);
VerificationReport report_from_json(const nlohmann::json& j);

nlohmann::json swap_to_json(const SwapRecord& swap);
SwapRecord swap_from_json(const nlohmann::json& j);

/// The final region, if any, is stored as region-grammar text.
nlohmann::json trace_to_json(const DecompositionTrace& trace);
DecompositionTrace trace_from_json(const nlohmann::json& j);

}  // namespace sphdist
