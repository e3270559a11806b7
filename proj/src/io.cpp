#include "dagscore/io.hpp"

#include "dagscore/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace dagscore {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (true) {
    const auto next = line.find(sep, pos);
    out.push_back(trim(std::string_view(line).substr(pos, next == std::string::npos ? std::string::npos : next - pos)));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::string unquote(std::string s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  return s;
}

int parse_vertex(const std::string& token, int q, int line) {
  char* end = nullptr;
  const long v = std::strtol(token.c_str(), &end, 10);
  if (token.empty() || *end != '\0') throw ParseError("line " + std::to_string(line) + ": bad vertex '" + token + "'", line);
  if (v < 1 || v > q)
    throw ParseError("line " + std::to_string(line) + ": vertex " + token + " outside 1.." + std::to_string(q), line);
  return static_cast<int>(v - 1);
}

}  // namespace

CsvTable parse_csv(std::istream& in, const std::string& source) {
  CsvTable table;
  std::string line;
  int line_no = 0;
  bool have_header = false;
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto fields = split(line, ',');
    if (!have_header) {
      for (auto& f : fields) table.header.push_back(unquote(f));
      have_header = true;
      continue;
    }
    if (fields.size() != table.header.size())
      throw ParseError(source + ":" + std::to_string(line_no) + ": expected " +
                           std::to_string(table.header.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    std::vector<double> row;
    row.reserve(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      char* end = nullptr;
      const double v = std::strtod(fields[c].c_str(), &end);
      if (fields[c].empty() || *end != '\0')
        throw ParseError(source + ":" + std::to_string(line_no) + ": column " +
                             std::to_string(c + 1) + " is not a number: '" + fields[c] + "'",
                         line_no);
      if (!std::isfinite(v))
        throw ValidationError(source + ": non-finite value at data row " +
                              std::to_string(rows.size() + 1) + ", column " + std::to_string(c + 1) +
                              " (line " + std::to_string(line_no) + ")");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw ParseError(source + ": empty file, header row required", 0);
  if (rows.empty()) throw ParseError(source + ": no data rows", line_no);
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.header.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c) table.values(r, c) = rows[r][c];
  return table;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  return parse_csv(in, path);
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& header) {
  std::ostringstream os;
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << header[c];
  os << '\n';
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) os << (c ? "," : "") << format_double(values(r, c));
    os << '\n';
  }
  write_text_file(path, os.str());
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::pair<ResponseMatrix, PredictorPool> ingest(const std::string& y_path,
                                                const std::optional<std::string>& z_path) {
  auto yt = read_csv(y_path);
  ResponseMatrix y(std::move(yt.values), std::move(yt.header));
  if (!z_path) return {std::move(y), PredictorPool::empty(y.n())};
  auto zt = read_csv(*z_path);
  if (zt.values.rows() != y.n())
    throw DimensionError("response file has " + std::to_string(y.n()) +
                         " rows but predictor file has " + std::to_string(zt.values.rows()));
  return {std::move(y), PredictorPool{std::move(zt.values), std::move(zt.header)}};
}

Dag parse_dag_text(const std::string& text, int q) {
  std::vector<VertexList> parents(q);
  std::vector<bool> seen(q, false);
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'j: parents'", line_no);
    const int j = parse_vertex(trim(std::string_view(t).substr(0, colon)), q, line_no);
    if (seen[j])
      throw ParseError("line " + std::to_string(line_no) + ": vertex " + std::to_string(j + 1) + " listed twice", line_no);
    seen[j] = true;
    const auto rest = trim(std::string_view(t).substr(colon + 1));
    if (rest.empty()) continue;
    for (const auto& tok : split(rest, ',')) parents[j].push_back(parse_vertex(tok, q, line_no));
  }
  return validate_dag(std::move(parents));
}

Adjacency parse_undirected_text(const std::string& text, int q) {
  std::vector<std::pair<int, int>> edges;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    const auto dash = t.find("--");
    if (dash == std::string::npos)
      throw ParseError("line " + std::to_string(line_no) + ": expected 'j -- k'", line_no);
    const int a = parse_vertex(trim(std::string_view(t).substr(0, dash)), q, line_no);
    const int b = parse_vertex(trim(std::string_view(t).substr(dash + 2)), q, line_no);
    if (a == b) throw ParseError("line " + std::to_string(line_no) + ": self-loop", line_no);
    edges.emplace_back(a, b);
  }
  return Adjacency::from_edges(q, edges);
}

std::string dag_to_text(const Dag& d) {
  std::ostringstream os;
  for (int j = 0; j < d.q(); ++j) {
    os << j + 1 << ':';
    const auto& pa = d.parents(j);
    for (std::size_t i = 0; i < pa.size(); ++i) os << (i ? "," : " ") << pa[i] + 1;
    os << '\n';
  }
  return os.str();
}

std::string undirected_to_text(const Adjacency& g) {
  std::ostringstream os;
  for (auto [i, j] : g.edges()) os << i + 1 << " -- " << j + 1 << '\n';
  return os.str();
}

VertexList parse_index_list(const std::string& text, int limit) {
  VertexList out;
  if (trim(text).empty()) return out;
  for (const auto& tok : split(text, ',')) {
    char* end = nullptr;
    const long v = std::strtol(tok.c_str(), &end, 10);
    if (tok.empty() || *end != '\0') throw ConfigError("bad index '" + tok + "'");
    if (v < 1 || v > limit)
      throw ConfigError("index " + tok + " outside 1.." + std::to_string(limit));
    out.push_back(static_cast<int>(v - 1));
  }
  std::sort(out.begin(), out.end());
  if (std::adjacent_find(out.begin(), out.end()) != out.end()) throw ConfigError("duplicate index in list");
  return out;
}

}  // namespace dagscore
