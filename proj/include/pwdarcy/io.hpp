#pragma once

#include <filesystem>
#include <string>
#include <Eigen/Core>

namespace pwdarcy {

/// Shortest decimal that round-trips a double (up to 17 significant digits).
std::string format_double(double x);

/// CSV matrix file: first line "rows,cols", then one comma-separated line per
/// row, values formatted with format_double.
void save_csv_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_csv_matrix(const std::filesystem::path& path);

void save_csv_matrix_int(const std::filesystem::path& path, const Eigen::MatrixXi& m);
Eigen::MatrixXi load_csv_matrix_int(const std::filesystem::path& path);

/// Binary grid file: magic "PWDG", u32 rows, u32 cols (little-endian),
/// followed by rows*cols little-endian f64 values in row-major order.
void save_bin_matrix(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd load_bin_matrix(const std::filesystem::path& path);

void write_text_file(const std::filesystem::path& path, const std::string& content);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace pwdarcy
