#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "gemn/net/packet.hpp"

namespace gemn::ids {

using net::AppClass;
using net::NodeId;

enum class RuleAction { kAlert, kBlock };
enum class Proto { kAny, kUdp, kTcp };

const char* to_string(Proto p);
Proto proto_of(AppClass app);

struct NodeMatch {
  enum class Kind { kAny, kNode, kMcc } kind = Kind::kAny;
  NodeId id = 0;

  [[nodiscard]] bool matches(NodeId node, std::optional<NodeId> mcc) const;
  [[nodiscard]] std::string to_string() const;
};

enum class PredicateKind { kRateAbove, kSizeBelow, kSizeAbove, kClass, kTag };

struct Predicate {
  PredicateKind kind = PredicateKind::kRateAbove;
  double threshold = 0.0;  // bps for rate, bits for size
  AppClass app = AppClass::kSignaling;
  std::string tag;
};

struct Rule {
  std::string id;
  RuleAction action = RuleAction::kAlert;
  Proto proto = Proto::kAny;
  NodeMatch src;
  NodeMatch dst;
  Predicate predicate;
  int severity = 1;
  int line = 0;
};

class RuleParseError : public std::runtime_error {
 public:
  RuleParseError(int line, int column, const std::string& message);
  [[nodiscard]] int line() const { return line_; }
  [[nodiscard]] int column() const { return column_; }

 private:
  int line_;
  int column_;
};

// One rule per line; blank lines and lines starting with '#' are skipped:
//   <action> [<proto>] <src> -> <dst> <predicate> sev=<1..5> id=<token>
std::vector<Rule> parse_rules(std::string_view text);
// Canonical text form; parse_rules(format_rule(r)) reproduces r.
std::string format_rule(const Rule& rule);

}  // namespace gemn::ids
