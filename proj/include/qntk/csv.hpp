#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qntk/dynamics.hpp"

namespace qntk {

/// Lossless rendering with 17 significant digits.
std::string format_double(double v);
/// Parses the whole field as a double; throws ParseError.
double parse_double(std::string_view text, std::size_t line = 0);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');
void write_row(std::ostream& out, std::span<const double> values);

/// `t,loss,eps_<i>...,theta_<l>...`, one row per recorded step.
void write_trace_csv(std::ostream& out, const TrainingTrace& trace);
/// `t,lambda_1,...`; steps without recorded eigenvalues are skipped.
void write_spectrum_csv(std::ostream& out, const TrainingTrace& trace);
void write_spectrum_csv(std::ostream& out, std::span<const KernelSnapshot> snapshots);
/// `t,<name>...` with one column per matrix column; row t is row t of every block.
void write_series_csv(std::ostream& out, std::span<const std::string> names, std::span<const Eigen::MatrixXd> blocks);

/// Writes through a temporary file, then renames; throws std::runtime_error on I/O failure.
void write_file(const std::string& path, std::string_view contents);
std::string read_file(const std::string& path);

}  // namespace qntk
