#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "sqreg/errors.hpp"
#include "sqreg/solver.hpp"

namespace sqreg::csv {

// Shortest decimal with 17 significant digits: round-trips every finite
// double through strtod; non-finite values print as nan/inf/-inf.
std::string format_double(double v);

// Header k,sigma,mu,objective,smoothed_lagrangian,exact_lagrangian,
// primal_res,dw_sq,dz_sq,dpsi_sq,lemma7_slack,subgrad_bound,mse,accuracy.
void write_trace_csv(const std::string& path,
                     const std::vector<solver::IterationRecord>& trace);
std::vector<solver::IterationRecord> read_trace_csv(const std::string& path);

struct SummaryRow {
  std::string solver;
  long k = 0;
  long trials = 0;  // trials contributing a row at this k
  double mean_mse = 0.0;
  double mean_accuracy = 0.0;
};
// Header solver,k,trials,mean_mse,mean_accuracy.
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(const std::string& path);

// Regression data as y,x1,...,xP with one header row.
void write_problem_csv(const std::string& path, const Eigen::MatrixXd& X,
                       const Eigen::VectorXd& y);

struct LoadedProblem {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
};
// Rejects ragged rows, non-numeric cells and non-finite values; ParseError
// messages carry the 1-based line number.
LoadedProblem read_problem_csv(const std::string& path);

}  // namespace sqreg::csv
