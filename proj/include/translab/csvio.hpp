#pragma once

#include <string>
#include <variant>
#include <vector>

namespace translab::cli {

// CSV contract: comma-separated, '.' decimal, header row, LF endings,
// floats at 17 significant digits so reruns are byte-identical.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);

  void row(const std::vector<std::variant<std::string, double, long long>>& cells);
  void save(const std::string& path) const;
  const std::string& text() const { return buf_; }

 private:
  std::string buf_;
  std::size_t columns_ = 0;
};

// minimal SVG polyline plot, one metric per file
std::string svg_plot(const std::string& title, const std::vector<double>& x,
                     const std::vector<double>& y, bool log_log);

// dense matrix as CSV: header row,col,value then one long-format row per entry
std::string matrix_csv(const double* data, int rows, int cols);

// time-series trace in long format: experiment_id,t,node_index,value
std::string trace_csv(const std::string& experiment_id, const std::vector<double>& times,
                      const std::vector<int>& node_indices, const double* values_nodes_by_time);

}  // namespace translab::cli
