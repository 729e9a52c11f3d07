#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "edmshrink/sorted_eigen.hpp"
#include "edmshrink/types.hpp"

namespace edmshrink::io {

/// Absolute tolerance for symmetry/hollowness of loaded distance matrices.
inline constexpr double kLoadTol = 1e-9;

/// Dense numeric CSV: comma-separated floats, '#' lines ignored anywhere, blank
/// lines skipped. Every row must have the same number of fields.
Matrix<double> read_csv_matrix(const std::filesystem::path& path);

/// n x n squared-distance matrix. Asymmetry / diagonal up to kLoadTol is
/// averaged / zeroed, anything larger is rejected with InputError.
SymHollowMatrix<double> read_distance_csv(const std::filesystem::path& path);

/// Writes `m` with 17 significant digits; `header` (if non-empty) is written
/// as a single line prefixed by "# ".
void write_csv_matrix(const std::filesystem::path& path, const Matrix<double>& m,
                      std::string_view header = {});

enum class CoordFormat { csv, xyz, pdb };

CoordFormat parse_coord_format(std::string_view name);

/// Point coordinates, one row per point (not centered).
///  - csv: numeric rows, any number of columns.
///  - xyz: either the standard "count / comment / symbol x y z" layout, or bare
///    whitespace-separated numeric rows.
///  - pdb: ATOM records of the first model, columns 31-54 (Angstrom), file order.
/// Throws InputError (with line number where applicable); requires n >= 2.
Matrix<double> load_coords(const std::filesystem::path& path, CoordFormat format);

/// PDB parsing on an in-memory text, exposed for tests.
Matrix<double> parse_pdb(std::string_view text);

/// 17 significant digits; parses back to the identical double.
std::string format_double(double v);

}  // namespace edmshrink::io
