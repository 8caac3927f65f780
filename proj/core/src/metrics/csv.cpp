#include "gemn/metrics/csv.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gemn::metrics {

namespace {

std::string escape(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::vector<std::string> split_row(const std::string& line) {
  std::vector<std::string> cells;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  cells.push_back(std::move(cur));
  return cells;
}

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '-' || c == '_' ||
                    c == '.';
    out += ok ? c : '_';
  }
  return out.empty() ? "run" : out;
}

}  // namespace

std::string render_csv(const MetricSeries& s) {
  std::ostringstream os;
  os << "name,unit,label\n";
  os << escape(s.name()) << ',' << escape(s.unit()) << ',' << escape(s.label()) << '\n';
  os << escape(s.key_column()) << ',' << escape(s.value_column()) << '\n';
  for (const auto& r : s.rows()) {
    os << (s.categorical() ? escape(r.key) : format_value(r.t)) << ',' << format_value(r.value) << '\n';
  }
  return os.str();
}

std::string render_csv(const Table& t) {
  std::ostringstream os;
  os << "name,unit,label\n";
  os << escape(t.name) << ",," << escape(t.label) << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) os << (i ? "," : "") << escape(t.columns[i]);
  os << '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << escape(row[i]);
    os << '\n';
  }
  return os.str();
}

MetricSeries parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  auto next = [&](const char* what) {
    if (!std::getline(in, line)) throw std::runtime_error(std::string("csv: missing ") + what);
    return split_row(line);
  };
  if (next("header") != std::vector<std::string>{"name", "unit", "label"}) {
    throw std::runtime_error("csv: header must be name,unit,label");
  }
  const auto meta = next("metadata row");
  const auto cols = next("column header");
  if (meta.size() != 3 || cols.size() != 2) throw std::runtime_error("csv: malformed series preamble");
  MetricSeries s(meta[0], meta[1], meta[2], cols[0], cols[1]);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_row(line);
    if (cells.size() != 2) throw std::runtime_error("csv: row must have 2 cells: " + line);
    char* vend = nullptr;
    const double v = std::strtod(cells[1].c_str(), &vend);
    if (cells[1].empty() || *vend != '\0') throw std::runtime_error("csv: value is not a number: " + line);
    char* end = nullptr;
    const double t = std::strtod(cells[0].c_str(), &end);
    if (end && *end == '\0' && !cells[0].empty() && !s.categorical()) {
      s.add(t, v);
    } else {
      s.add(cells[0], v);
    }
  }
  return s;
}

std::string artifact_name(const std::string& label, const std::string& name, const std::string& extension) {
  return sanitize(label) + "_" + sanitize(name) + "." + extension;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

std::filesystem::path write_csv(const std::filesystem::path& dir, const MetricSeries& series) {
  const auto path = dir / artifact_name(series.label(), series.name(), "csv");
  write_file(path, render_csv(series));
  return path;
}

std::filesystem::path write_csv(const std::filesystem::path& dir, const Table& table) {
  const auto path = dir / artifact_name(table.label, table.name, "csv");
  write_file(path, render_csv(table));
  return path;
}

}  // namespace gemn::metrics
