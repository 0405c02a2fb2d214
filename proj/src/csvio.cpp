#include "translab/csvio.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace translab::cli {

namespace {
std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
}  // namespace

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) buf_ += ',';
    buf_ += header[i];
  }
  buf_ += '\n';
}

void CsvWriter::row(const std::vector<std::variant<std::string, double, long long>>& cells) {
  if (cells.size() != columns_) throw std::logic_error("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) buf_ += ',';
    if (std::holds_alternative<std::string>(cells[i])) {
      buf_ += std::get<std::string>(cells[i]);
    } else if (std::holds_alternative<double>(cells[i])) {
      buf_ += fmt_double(std::get<double>(cells[i]));
    } else {
      buf_ += std::to_string(std::get<long long>(cells[i]));
    }
  }
  buf_ += '\n';
}

void CsvWriter::save(const std::string& path) const {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("CsvWriter: cannot open " + path);
  os.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
}

std::string matrix_csv(const double* data, int rows, int cols) {
  CsvWriter csv({"row", "col", "value"});
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      csv.row({static_cast<long long>(i), static_cast<long long>(j), data[i + static_cast<std::ptrdiff_t>(rows) * j]});
  return csv.text();
}

std::string trace_csv(const std::string& experiment_id, const std::vector<double>& times,
                      const std::vector<int>& node_indices, const double* values_nodes_by_time) {
  CsvWriter csv({"experiment_id", "t", "node_index", "value"});
  const auto n = static_cast<std::ptrdiff_t>(node_indices.size());
  for (std::size_t j = 0; j < times.size(); ++j)
    for (std::size_t i = 0; i < node_indices.size(); ++i)
      csv.row({experiment_id, times[j], static_cast<long long>(node_indices[i]),
               values_nodes_by_time[static_cast<std::ptrdiff_t>(i) + n * static_cast<std::ptrdiff_t>(j)]});
  return csv.text();
}

std::string svg_plot(const std::string& title, const std::vector<double>& x,
                     const std::vector<double>& y, bool log_log) {
  if (x.size() != y.size() || x.empty()) throw std::invalid_argument("svg_plot: bad series");
  const double W = 640, H = 420, m = 60;
  auto tx = [&](double v) { return log_log ? std::log10(v) : v; };
  double x0 = tx(x.front()), x1 = tx(x.front()), y0 = tx(y.front()), y1 = tx(y.front());
  for (std::size_t i = 0; i < x.size(); ++i) {
    x0 = std::min(x0, tx(x[i]));
    x1 = std::max(x1, tx(x[i]));
    y0 = std::min(y0, tx(y[i]));
    y1 = std::max(y1, tx(y[i]));
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  std::string svg = "<svg xmlns='http://www.w3.org/2000/svg' width='640' height='420'>\n";
  svg += "<rect width='640' height='420' fill='white'/>\n";
  svg += "<text x='20' y='24' font-size='14'>" + title + "</text>\n<polyline fill='none' stroke='black' points='";
  char buf[64];
  for (std::size_t i = 0; i < x.size(); ++i) {
    double px = m + (W - 2 * m) * (tx(x[i]) - x0) / (x1 - x0);
    double py = H - m - (H - 2 * m) * (tx(y[i]) - y0) / (y1 - y0);
    std::snprintf(buf, sizeof(buf), "%.2f,%.2f ", px, py);
    svg += buf;
  }
  svg += "'/>\n</svg>\n";
  return svg;
}

}  // namespace translab::cli
