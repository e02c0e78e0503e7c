#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "mixtopo/egp.hpp"
#include "mixtopo/gaussian.hpp"
#include "mixtopo/geometry.hpp"
#include "mixtopo/uhlmann.hpp"

namespace mixtopo {

/// 17 significant digits; round-trips every double.
std::string format_double(double v);
double parse_double(const std::string& s);

/// Minimal CSV table: header plus rows of fields. Fields containing commas or
/// quotes are quoted on output.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const;
};

void write_csv(std::ostream& os, const CsvTable& table);
CsvTable read_csv(std::istream& is);

// Phase profiles. EGP profiles use the columns transverse_k, phase, modulus,
// N, beta; other kinds use parameter, value.
CsvTable phase_profile_table(const PhaseProfile& profile);
PhaseProfile phase_profile_from_table(const CsvTable& table, PhaseKind kind, Direction direction);
nlohmann::json phase_profile_json(const PhaseProfile& profile);
PhaseProfile phase_profile_from_json(const nlohmann::json& j);

// Curvature field: kx, ky, F_plaq with kx outer.
CsvTable curvature_table(const CurvatureField& field);
CurvatureField curvature_from_table(const CsvTable& table);
nlohmann::json curvature_json(const CurvatureField& field, int chern);

// Scan rows: T, beta, Cx_uhlmann, Cy_uhlmann, Cx_egp, Cy_egp, C_ground, status, T_gap.
CsvTable invariant_report_table(const std::vector<InvariantReport>& rows);
std::vector<InvariantReport> invariant_reports_from_table(const CsvTable& table);
nlohmann::json invariant_report_json(const InvariantReport& row);

/// Text matrix-grid format:
///   line 1: p Nx Ny
///   then Nx*Ny matrices, kx index outer, each p*p entries row-major as
///   "re im" pairs of decimal floats, whitespace separated. '#' starts a comment.
MatrixGrid read_matrix_grid(std::istream& is);
void write_matrix_grid(std::ostream& os, const MatrixGrid& grid);

}  // namespace mixtopo
