#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "opreg/cvxreg.hpp"
#include "opreg/opreg.hpp"

namespace opreg::io {

/// Parsed anchor file. `ids` are the values of the `i` column, in file order.
struct OperatorSamples {
  std::vector<long long> ids;
  RegressionDataset data;
};

struct FunctionSamples {
  std::vector<long long> ids;
  CvxRegDataset data;
};

/// Header `i,x_1..x_n,y_1..y_n`, one row per anchor. The first row is the
/// distinguished anchor. Throws InvalidArgument on malformed input.
OperatorSamples read_operator_samples(std::istream& in);
/// Header `i,x_1..x_n,f,z_1..z_n`.
FunctionSamples read_function_samples(std::istream& in);
/// True when the header line names a function-sample file (has an `f` column).
bool is_function_header(const std::string& header_line);

/// `i,t_1..t_n`.
void write_operator_fit(std::ostream& out, const std::vector<long long>& ids,
                        const Matrix& values);
/// `i,f,z_1..z_n` with the fitted values and gradients.
void write_function_fit(std::ostream& out, const std::vector<long long>& ids,
                        const CvxRegSolution& fit);

/// {iterations, residual, max_violation, objective, converged}.
void write_diagnostics(std::ostream& out, const PrsDiagnostics& diagnostics);

}  // namespace opreg::io
