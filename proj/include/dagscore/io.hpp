#pragma once

// Tabular and graph text formats.
//
// CSV: mandatory header row, comma separated numeric body, doubles written
// with 17 significant digits.
// DAG text: one line per vertex "j: p1,p2,..." (1-based; omitted vertices
// have no parents). Undirected text: one edge per line "j -- k".
// Blank lines and lines starting with '#' are ignored in graph files.

#include "dagscore/graphs.hpp"
#include "dagscore/mnw.hpp"
#include "dagscore/search.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace dagscore {

struct CsvTable {
  Matrix values;
  std::vector<std::string> header;
};

/// Throws ParseError (with line number) on malformed input, "no data rows"
/// for a header-only file, and ValidationError naming row/column for
/// non-finite entries.
CsvTable parse_csv(std::istream& in, const std::string& source);
CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const Matrix& values,
               const std::vector<std::string>& header);
std::string format_double(double x);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Responses and (optional) predictor pool with equal row counts.
std::pair<ResponseMatrix, PredictorPool> ingest(const std::string& y_path,
                                                const std::optional<std::string>& z_path);

Dag parse_dag_text(const std::string& text, int q);
Adjacency parse_undirected_text(const std::string& text, int q);
std::string dag_to_text(const Dag& d);
std::string undirected_to_text(const Adjacency& g);

/// "1,4,7" -> {0,3,6}; validates range against `limit`.
VertexList parse_index_list(const std::string& text, int limit);

}  // namespace dagscore
