#include "gemn/ids/rules.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace gemn::ids {

const char* to_string(Proto p) {
  switch (p) {
    case Proto::kAny: return "any";
    case Proto::kUdp: return "udp";
    case Proto::kTcp: return "tcp";
  }
  return "any";
}

Proto proto_of(AppClass app) {
  switch (app) {
    case AppClass::kSignaling:
    case AppClass::kVideo:
    case AppClass::kAttack: return Proto::kUdp;
    case AppClass::kText:
    case AppClass::kImage:
    case AppClass::kControl: return Proto::kTcp;
  }
  return Proto::kAny;
}

bool NodeMatch::matches(NodeId node, std::optional<NodeId> mcc) const {
  switch (kind) {
    case Kind::kAny: return true;
    case Kind::kNode: return node == id;
    case Kind::kMcc: return mcc && node == *mcc;
  }
  return false;
}

std::string NodeMatch::to_string() const {
  switch (kind) {
    case Kind::kAny: return "any";
    case Kind::kNode: return "node" + std::to_string(id);
    case Kind::kMcc: return "mcc";
  }
  return "any";
}

RuleParseError::RuleParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message),
      line_{line},
      column_{column} {}

namespace {

struct Token {
  std::string_view text;
  int column;
};

std::vector<Token> tokenize(std::string_view line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i >= line.size()) break;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
  }
  return out;
}

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

class LineParser {
 public:
  LineParser(int line_no, std::vector<Token> tokens) : line_{line_no}, tokens_{std::move(tokens)} {}

  Rule parse() {
    Rule r;
    r.line = line_;
    std::size_t arrow = tokens_.size();
    for (std::size_t i = 0; i < tokens_.size(); ++i) {
      if (tokens_[i].text == "->") {
        arrow = i;
        break;
      }
    }
    if (arrow == tokens_.size()) fail(tokens_.back().column + static_cast<int>(tokens_.back().text.size()), "expected '->'");

    const auto action = lower(tokens_[0].text);
    if (action == "alert") {
      r.action = RuleAction::kAlert;
    } else if (action == "block") {
      r.action = RuleAction::kBlock;
    } else {
      fail(tokens_[0].column, "unknown action '" + std::string(tokens_[0].text) + "' (expected alert or block)");
    }

    if (arrow == 2) {
      r.src = node(tokens_[1]);
    } else if (arrow == 3) {
      r.proto = proto(tokens_[1]);
      r.src = node(tokens_[2]);
    } else if (arrow < 2) {
      fail(tokens_[arrow].column, "expected source before '->'");
    } else {
      fail(tokens_[3].column, "unexpected token '" + std::string(tokens_[3].text) + "' before '->'");
    }

    std::size_t i = arrow + 1;
    if (i >= tokens_.size()) fail(end_column(), "expected destination after '->'");
    r.dst = node(tokens_[i++]);
    if (i >= tokens_.size()) fail(end_column(), "expected predicate");
    r.predicate = predicate(tokens_[i++]);

    bool have_sev = false;
    bool have_id = false;
    for (; i < tokens_.size(); ++i) {
      const auto& t = tokens_[i];
      if (starts_with(t.text, "sev=")) {
        if (have_sev) fail(t.column, "duplicate sev");
        int v = 0;
        const auto digits = t.text.substr(4);
        auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
        if (ec != std::errc{} || p != digits.data() + digits.size() || v < 1 || v > 5) {
          fail(t.column + 4, "severity must be an integer 1..5");
        }
        r.severity = v;
        have_sev = true;
      } else if (starts_with(t.text, "id=")) {
        if (have_id) fail(t.column, "duplicate id field");
        const auto id = t.text.substr(3);
        if (id.empty()) fail(t.column + 3, "empty rule id");
        for (std::size_t k = 0; k < id.size(); ++k) {
          const char c = id[k];
          if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '-' && c != '.' && c != ':') {
            fail(t.column + 3 + static_cast<int>(k), "invalid character in rule id");
          }
        }
        r.id = std::string(id);
        have_id = true;
      } else {
        fail(t.column, "unexpected token '" + std::string(t.text) + "'");
      }
    }
    if (!have_sev) fail(end_column(), "missing sev=<1..5>");
    if (!have_id) fail(end_column(), "missing id=<token>");
    return r;
  }

 private:
  [[noreturn]] void fail(int column, const std::string& msg) const { throw RuleParseError(line_, column, msg); }

  int end_column() const {
    const auto& t = tokens_.back();
    return t.column + static_cast<int>(t.text.size());
  }

  Proto proto(const Token& t) const {
    const auto p = lower(t.text);
    if (p == "any") return Proto::kAny;
    if (p == "udp") return Proto::kUdp;
    if (p == "tcp") return Proto::kTcp;
    fail(t.column, "unknown protocol '" + std::string(t.text) + "' (expected any, udp or tcp)");
  }

  NodeMatch node(const Token& t) const {
    const auto s = lower(t.text);
    if (s == "any") return {};
    if (s == "mcc") return {NodeMatch::Kind::kMcc, 0};
    for (std::string_view prefix : {"wsr", "node"}) {
      if (starts_with(s, prefix) && s.size() > prefix.size()) {
        NodeId id = 0;
        const char* b = s.data() + prefix.size();
        auto [p, ec] = std::from_chars(b, s.data() + s.size(), id);
        if (ec == std::errc{} && p == s.data() + s.size()) return {NodeMatch::Kind::kNode, id};
        fail(t.column + static_cast<int>(prefix.size()), "invalid node number");
      }
    }
    fail(t.column, "unknown node '" + std::string(t.text) + "' (expected any, mcc, wsr<N> or node<N>)");
  }

  double number(std::string_view text, int column) const {
    double v = 0.0;
    auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p == text.data()) fail(column, "expected a number");
    return v;
  }

  Predicate predicate(const Token& t) const {
    Predicate pr;
    const auto s = std::string(t.text);
    auto split_unit = [&](std::size_t from, std::string_view& digits, std::string& unit) {
      std::size_t k = from;
      while (k < s.size() && (std::isdigit(static_cast<unsigned char>(s[k])) || s[k] == '.' || s[k] == '-' || s[k] == '+' ||
                              s[k] == 'e' || s[k] == 'E')) {
        // Stop at an exponent marker that begins a unit rather than a number.
        if ((s[k] == 'e' || s[k] == 'E') && (k + 1 >= s.size() || !std::isdigit(static_cast<unsigned char>(s[k + 1])))) break;
        ++k;
      }
      digits = std::string_view(s).substr(from, k - from);
      unit = lower(std::string_view(s).substr(k));
    };

    if (starts_with(s, "rate>")) {
      pr.kind = PredicateKind::kRateAbove;
      std::string_view digits;
      std::string unit;
      split_unit(5, digits, unit);
      const double v = number(digits, t.column + 5);
      double scale = 0.0;
      if (unit == "bps") scale = 1.0;
      else if (unit == "kbps") scale = 1e3;
      else if (unit == "mbps") scale = 1e6;
      else fail(t.column + 5 + static_cast<int>(digits.size()), "rate unit must be bps, kbps or mbps");
      if (!(v > 0.0)) fail(t.column + 5, "threshold must be positive");
      pr.threshold = v * scale;
      return pr;
    }
    if (starts_with(s, "size<") || starts_with(s, "size>")) {
      pr.kind = s[4] == '<' ? PredicateKind::kSizeBelow : PredicateKind::kSizeAbove;
      std::string_view digits;
      std::string unit;
      split_unit(5, digits, unit);
      const double v = number(digits, t.column + 5);
      double scale = 0.0;
      if (unit == "bit" || unit == "bits") scale = 1.0;
      else if (unit == "byte" || unit == "bytes") scale = 8.0;
      else fail(t.column + 5 + static_cast<int>(digits.size()), "size unit must be bit or byte");
      if (!(v > 0.0)) fail(t.column + 5, "threshold must be positive");
      pr.threshold = v * scale;
      return pr;
    }
    if (starts_with(s, "class=")) {
      pr.kind = PredicateKind::kClass;
      const auto app = net::parse_app_class(lower(std::string_view(s).substr(6)));
      if (!app || *app == AppClass::kControl || *app == AppClass::kAttack) {
        fail(t.column + 6, "class must be signaling, text, image or video");
      }
      pr.app = *app;
      return pr;
    }
    if (starts_with(s, "tag=")) {
      pr.kind = PredicateKind::kTag;
      pr.tag = s.substr(4);
      if (pr.tag.empty()) fail(t.column + 4, "empty tag");
      return pr;
    }
    const auto name_end = s.find_first_of("<>=");
    fail(t.column, "unknown predicate '" + s.substr(0, name_end) + "'");
  }

  int line_;
  std::vector<Token> tokens_;
};

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(15);
  os << v;
  return os.str();
}

}  // namespace

std::vector<Rule> parse_rules(std::string_view text) {
  std::vector<Rule> rules;
  std::set<std::string> ids;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    auto tokens = tokenize(line);
    if (!tokens.empty() && tokens.front().text.front() != '#') {
      Rule r = LineParser(line_no, std::move(tokens)).parse();
      if (!ids.insert(r.id).second) {
        throw RuleParseError(line_no, static_cast<int>(line.find("id=")) + 4, "duplicate rule id '" + r.id + "'");
      }
      rules.push_back(std::move(r));
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  return rules;
}

std::string format_rule(const Rule& r) {
  std::ostringstream os;
  os << (r.action == RuleAction::kAlert ? "alert" : "block") << ' ' << to_string(r.proto) << ' ' << r.src.to_string()
     << " -> " << r.dst.to_string() << ' ';
  switch (r.predicate.kind) {
    case PredicateKind::kRateAbove: os << "rate>" << format_number(r.predicate.threshold) << "bps"; break;
    case PredicateKind::kSizeBelow: os << "size<" << format_number(r.predicate.threshold) << "bit"; break;
    case PredicateKind::kSizeAbove: os << "size>" << format_number(r.predicate.threshold) << "bit"; break;
    case PredicateKind::kClass: os << "class=" << net::to_string(r.predicate.app); break;
    case PredicateKind::kTag: os << "tag=" << r.predicate.tag; break;
  }
  os << " sev=" << r.severity << " id=" << r.id;
  return os.str();
}

}  // namespace gemn::ids
