#pragma once

#include <optional>
#include <span>
#include <vector>

#include "gemn/ids/alert.hpp"
#include "gemn/ids/features.hpp"
#include "gemn/ids/rules.hpp"

namespace gemn::ids {

struct MatchContext {
  NodeId reporter = sim::kNoNode;
  std::optional<NodeId> mcc;
  SimTime start;
  SimTime end;
};

// At most one alert per rule per window, in ruleset order. The suspect is
// the rule's source when specific, otherwise the heaviest matching source.
std::vector<Alert> signature_match(std::span<const IngressRecord> window, const std::vector<Rule>& rules,
                                   const MatchContext& ctx);

}  // namespace gemn::ids
