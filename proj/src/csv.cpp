#include "sqreg/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

namespace sqreg::csv {

namespace {

constexpr char kTraceHeader[] =
    "k,sigma,mu,objective,smoothed_lagrangian,exact_lagrangian,primal_res,"
    "dw_sq,dz_sq,dpsi_sq,lemma7_slack,subgrad_bound,mse,accuracy";
constexpr char kSummaryHeader[] = "solver,k,trials,mean_mse,mean_accuracy";

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

void finish_out(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split_comma(const std::string& line) {
  std::vector<std::string> cells;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    if (pos == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return cells;
}

double parse_cell(const std::string& cell, const std::string& path, long line_no,
                  bool allow_nonfinite) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end == ' ') ++end;
  if (end == begin || (end && *end != '\0')) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": not a number: '" + cell +
                     "'");
  }
  if (!allow_nonfinite && !std::isfinite(v)) {
    throw ParseError(path + ":" + std::to_string(line_no) + ": non-finite value: '" +
                     cell + "'");
  }
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trace_csv(const std::string& path,
                     const std::vector<solver::IterationRecord>& trace) {
  std::ofstream out = open_out(path);
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.sigma) << ',' << format_double(r.mu) << ','
        << format_double(r.objective) << ',' << format_double(r.smoothed_lagrangian)
        << ',' << format_double(r.exact_lagrangian) << ','
        << format_double(r.primal_res) << ',' << format_double(r.dw_sq) << ','
        << format_double(r.dz_sq) << ',' << format_double(r.dpsi_sq) << ','
        << format_double(r.lemma7_slack) << ',' << format_double(r.subgrad_bound) << ','
        << format_double(r.mse) << ',' << format_double(r.accuracy) << '\n';
  }
  finish_out(out, path);
}

std::vector<solver::IterationRecord> read_trace_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  ++line_no;
  if (strip_cr(line) != kTraceHeader) {
    throw ParseError(path + ":1: unexpected trace header");
  }
  std::vector<solver::IterationRecord> trace;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_comma(line);
    if (cells.size() != 14) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 14 columns, got " +
                       std::to_string(cells.size()));
    }
    solver::IterationRecord r;
    r.k = static_cast<long>(parse_cell(cells[0], path, line_no, false));
    r.sigma = parse_cell(cells[1], path, line_no, true);
    r.mu = parse_cell(cells[2], path, line_no, true);
    r.objective = parse_cell(cells[3], path, line_no, true);
    r.smoothed_lagrangian = parse_cell(cells[4], path, line_no, true);
    r.exact_lagrangian = parse_cell(cells[5], path, line_no, true);
    r.primal_res = parse_cell(cells[6], path, line_no, true);
    r.dw_sq = parse_cell(cells[7], path, line_no, true);
    r.dz_sq = parse_cell(cells[8], path, line_no, true);
    r.dpsi_sq = parse_cell(cells[9], path, line_no, true);
    r.lemma7_slack = parse_cell(cells[10], path, line_no, true);
    r.subgrad_bound = parse_cell(cells[11], path, line_no, true);
    r.mse = parse_cell(cells[12], path, line_no, true);
    r.accuracy = parse_cell(cells[13], path, line_no, true);
    trace.push_back(r);
  }
  return trace;
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out = open_out(path);
  out << kSummaryHeader << '\n';
  for (const auto& r : rows) {
    out << r.solver << ',' << r.k << ',' << r.trials << ',' << format_double(r.mean_mse)
        << ',' << format_double(r.mean_accuracy) << '\n';
  }
  finish_out(out, path);
}

std::vector<SummaryRow> read_summary_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  ++line_no;
  if (strip_cr(line) != kSummaryHeader) {
    throw ParseError(path + ":1: unexpected summary header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_comma(line);
    if (cells.size() != 5) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected 5 columns, got " +
                       std::to_string(cells.size()));
    }
    SummaryRow r;
    r.solver = cells[0];
    r.k = static_cast<long>(parse_cell(cells[1], path, line_no, false));
    r.trials = static_cast<long>(parse_cell(cells[2], path, line_no, false));
    r.mean_mse = parse_cell(cells[3], path, line_no, true);
    r.mean_accuracy = parse_cell(cells[4], path, line_no, true);
    rows.push_back(r);
  }
  return rows;
}

void write_problem_csv(const std::string& path, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y) {
  if (X.rows() != y.size()) throw std::invalid_argument("write_problem_csv: row mismatch");
  std::ofstream out = open_out(path);
  out << 'y';
  for (Eigen::Index p = 0; p < X.cols(); ++p) out << ",x" << (p + 1);
  out << '\n';
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    out << format_double(y(i));
    for (Eigen::Index p = 0; p < X.cols(); ++p) out << ',' << format_double(X(i, p));
    out << '\n';
  }
  finish_out(out, path);
}

LoadedProblem read_problem_csv(const std::string& path) {
  std::ifstream in = open_in(path);
  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(path + ":1: empty file");
  ++line_no;
  const auto header = split_comma(strip_cr(line));
  if (header.size() < 2) {
    throw ParseError(path + ":1: need a response column and at least one feature");
  }
  const std::size_t cols = header.size();

  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    ++line_no;
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto cells = split_comma(line);
    if (cells.size() != cols) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(cols) + " columns, got " +
                       std::to_string(cells.size()));
    }
    std::vector<double> row(cols);
    for (std::size_t j = 0; j < cols; ++j) {
      row[j] = parse_cell(cells[j], path, line_no, false);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError(path + ": no data rows");

  LoadedProblem lp;
  const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
  const Eigen::Index P = static_cast<Eigen::Index>(cols - 1);
  lp.X.resize(n, P);
  lp.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    lp.y(i) = rows[static_cast<std::size_t>(i)][0];
    for (Eigen::Index p = 0; p < P; ++p) {
      lp.X(i, p) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(p) + 1];
    }
  }
  return lp;
}

}  // namespace sqreg::csv
