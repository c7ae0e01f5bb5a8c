#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "waveop/imagtime.hpp"
#include "waveop/phasespace.hpp"

namespace waveop::io {

// Shortest text form that round-trips a double exactly.
std::string format_double(double v);

// Dense complex matrix snapshot: magic "WOPM", format version, dimension,
// dtype tag, then the row-major complex128 little-endian payload.
void write_matrix(const std::string& path, const Eigen::MatrixXcd& A);
Eigen::MatrixXcd read_matrix(const std::string& path);

// Field snapshot: magic "WOPF", format version, nx, np, the four grid bounds
// and hbar, then the row-major complex128 payload.
void write_field(const std::string& path,
                 const phasespace::PhaseSpaceField& f);
phasespace::PhaseSpaceField read_field(const std::string& path);

// Headered CSV of checkpoint rows, one row per checkpoint per series, the
// tier column distinguishing concatenated series. RFC-4180 quoting.
std::string series_csv(
    const std::vector<const imagtime::ObservableSeries*>& series);

// JSON mirror of the same rows (an array of row objects).
std::string series_json_rows(
    const std::vector<const imagtime::ObservableSeries*>& series);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

// Hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace waveop::io
