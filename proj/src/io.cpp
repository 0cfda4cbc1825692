#include "opreg/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "json.hpp"

namespace opreg::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    out.push_back(trim(std::string_view(line).substr(start, comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& field, std::size_t line_no) {
  T value{};
  const char* end = field.data() + field.size();
  const auto res = std::from_chars(field.data(), end, value);
  if (res.ec != std::errc() || res.ptr != end) {
    throw InvalidArgument("line " + std::to_string(line_no) + ": cannot parse '" + field + "'");
  }
  return value;
}

/// Checks that names[first, first + n) are prefix_1 .. prefix_n.
void expect_block(const std::vector<std::string>& names, std::size_t first, std::size_t n,
                  const std::string& prefix) {
  for (std::size_t j = 0; j < n; ++j) {
    const std::string want = prefix + "_" + std::to_string(j + 1);
    if (names[first + j] != want) {
      throw InvalidArgument("header: expected column '" + want + "', found '" +
                            names[first + j] + "'");
    }
  }
}

struct Table {
  std::vector<long long> ids;
  std::vector<std::vector<double>> rows;
};

Table read_table(std::istream& in, std::size_t width) {
  Table t;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto fields = split(line);
    if (fields.size() != width) {
      throw InvalidArgument("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(width) + " fields, found " +
                            std::to_string(fields.size()));
    }
    t.ids.push_back(parse_number<long long>(fields[0], line_no));
    std::vector<double> row(width - 1);
    for (std::size_t j = 1; j < width; ++j) row[j - 1] = parse_number<double>(fields[j], line_no);
    t.rows.push_back(std::move(row));
  }
  return t;
}

std::vector<std::string> read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("dataset: empty input");
  auto names = split(line);
  if (names.empty() || names[0] != "i") throw InvalidArgument("header: first column must be 'i'");
  return names;
}

std::string format(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool is_function_header(const std::string& header_line) {
  for (const auto& name : split(header_line)) {
    if (name == "f") return true;
  }
  return false;
}

OperatorSamples read_operator_samples(std::istream& in) {
  const auto names = read_header(in);
  if (names.size() < 3 || (names.size() - 1) % 2 != 0) {
    throw InvalidArgument("header: expected i,x_1..x_n,y_1..y_n");
  }
  const std::size_t n = (names.size() - 1) / 2;
  expect_block(names, 1, n, "x");
  expect_block(names, 1 + n, n, "y");
  const Table t = read_table(in, names.size());

  OperatorSamples out;
  out.ids = t.ids;
  const auto ell = static_cast<Index>(t.rows.size());
  const auto dim = static_cast<Index>(n);
  out.data.points.resize(dim, ell);
  out.data.evaluations.resize(dim, ell);
  for (Index c = 0; c < ell; ++c) {
    const auto& row = t.rows[static_cast<std::size_t>(c)];
    for (Index r = 0; r < dim; ++r) {
      out.data.points(r, c) = row[static_cast<std::size_t>(r)];
      out.data.evaluations(r, c) = row[static_cast<std::size_t>(dim + r)];
    }
  }
  out.data.validate();
  return out;
}

FunctionSamples read_function_samples(std::istream& in) {
  const auto names = read_header(in);
  if (names.size() < 4 || (names.size() - 2) % 2 != 0) {
    throw InvalidArgument("header: expected i,x_1..x_n,f,z_1..z_n");
  }
  const std::size_t n = (names.size() - 2) / 2;
  expect_block(names, 1, n, "x");
  if (names[1 + n] != "f") throw InvalidArgument("header: expected column 'f'");
  expect_block(names, 2 + n, n, "z");
  const Table t = read_table(in, names.size());

  FunctionSamples out;
  out.ids = t.ids;
  const auto ell = static_cast<Index>(t.rows.size());
  const auto dim = static_cast<Index>(n);
  out.data.points.resize(dim, ell);
  out.data.values.resize(ell);
  out.data.gradients.resize(dim, ell);
  for (Index c = 0; c < ell; ++c) {
    const auto& row = t.rows[static_cast<std::size_t>(c)];
    for (Index r = 0; r < dim; ++r) {
      out.data.points(r, c) = row[static_cast<std::size_t>(r)];
      out.data.gradients(r, c) = row[static_cast<std::size_t>(dim + 1 + r)];
    }
    out.data.values[c] = row[n];
  }
  out.data.validate();
  return out;
}

void write_operator_fit(std::ostream& out, const std::vector<long long>& ids,
                        const Matrix& values) {
  if (static_cast<Index>(ids.size()) != values.cols()) {
    throw InvalidArgument("write_operator_fit: one id per column required");
  }
  out << 'i';
  for (Index r = 0; r < values.rows(); ++r) out << ",t_" << (r + 1);
  out << '\n';
  for (Index c = 0; c < values.cols(); ++c) {
    out << ids[static_cast<std::size_t>(c)];
    for (Index r = 0; r < values.rows(); ++r) out << ',' << format(values(r, c));
    out << '\n';
  }
}

void write_function_fit(std::ostream& out, const std::vector<long long>& ids,
                        const CvxRegSolution& fit) {
  if (static_cast<Index>(ids.size()) != fit.gradients.cols() ||
      fit.values.size() != fit.gradients.cols()) {
    throw InvalidArgument("write_function_fit: one id per point required");
  }
  out << "i,f";
  for (Index r = 0; r < fit.gradients.rows(); ++r) out << ",z_" << (r + 1);
  out << '\n';
  for (Index c = 0; c < fit.gradients.cols(); ++c) {
    out << ids[static_cast<std::size_t>(c)] << ',' << format(fit.values[c]);
    for (Index r = 0; r < fit.gradients.rows(); ++r) out << ',' << format(fit.gradients(r, c));
    out << '\n';
  }
}

void write_diagnostics(std::ostream& out, const PrsDiagnostics& d) {
  nlohmann::ordered_json j = {{"iterations", d.iterations},
                              {"residual", d.residual},
                              {"max_violation", d.max_violation},
                              {"objective", d.objective},
                              {"converged", d.converged}};
  out << j.dump(2) << '\n';
}

}  // namespace opreg::io
