#include "mixtopo/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace mixtopo {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (used != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw ConfigError("CSV column '" + name + "' missing");
}

static std::string quote(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void write_csv(std::ostream& os, const CsvTable& table) {
  auto line = [&os](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) os << (i ? "," : "") << quote(fields[i]);
    os << '\n';
  };
  line(table.header);
  for (const auto& row : table.rows) line(row);
}

static std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  return fields;
}

CsvTable read_csv(std::istream& is) {
  CsvTable table;
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("empty CSV input");
  table.header = split_csv_line(line);
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != table.header.size()) {
      throw ConfigError("CSV row has " + std::to_string(fields.size()) + " fields, expected " +
                        std::to_string(table.header.size()));
    }
    table.rows.push_back(std::move(fields));
  }
  return table;
}

CsvTable phase_profile_table(const PhaseProfile& profile) {
  CsvTable t;
  if (profile.kind == PhaseKind::egp) {
    t.header = {"transverse_k", "phase", "modulus", "N", "beta"};
    const double beta = profile.temperature == 0.0 ? std::numeric_limits<double>::infinity()
                                                   : 1.0 / profile.temperature;
    for (std::size_t i = 0; i < profile.size(); ++i) {
      t.rows.push_back({format_double(profile.parameters[i]), format_double(profile.phases[i]),
                        format_double(i < profile.moduli.size() ? profile.moduli[i]
                                                                : std::numeric_limits<double>::quiet_NaN()),
                        std::to_string(profile.cells), format_double(beta)});
    }
  } else {
    t.header = {"parameter", "value"};
    for (std::size_t i = 0; i < profile.size(); ++i) {
      t.rows.push_back({format_double(profile.parameters[i]), format_double(profile.phases[i])});
    }
  }
  return t;
}

PhaseProfile phase_profile_from_table(const CsvTable& table, PhaseKind kind, Direction direction) {
  PhaseProfile p;
  p.kind = kind;
  p.direction = direction;
  if (kind == PhaseKind::egp) {
    const auto ck = table.column("transverse_k"), cp = table.column("phase"),
               cm = table.column("modulus"), cn = table.column("N"), cb = table.column("beta");
    for (const auto& row : table.rows) {
      p.parameters.push_back(parse_double(row[ck]));
      p.phases.push_back(parse_double(row[cp]));
      p.moduli.push_back(parse_double(row[cm]));
      p.cells = std::stoi(row[cn]);
      const double beta = parse_double(row[cb]);
      p.temperature = std::isinf(beta) ? 0.0 : 1.0 / beta;
    }
  } else {
    const auto ck = table.column("parameter"), cv = table.column("value");
    for (const auto& row : table.rows) {
      p.parameters.push_back(parse_double(row[ck]));
      p.phases.push_back(parse_double(row[cv]));
    }
  }
  return p;
}

nlohmann::json phase_profile_json(const PhaseProfile& profile) {
  nlohmann::json j;
  j["kind"] = to_string(profile.kind);
  j["direction"] = to_string(profile.direction);
  j["temperature"] = profile.temperature;
  j["N"] = profile.cells;
  j["parameters"] = profile.parameters;
  j["phases"] = profile.phases;
  if (!profile.moduli.empty()) j["moduli"] = profile.moduli;
  return j;
}

PhaseProfile phase_profile_from_json(const nlohmann::json& j) {
  PhaseProfile p;
  p.kind = phase_kind_from_string(j.at("kind").get<std::string>());
  p.direction = direction_from_string(j.at("direction").get<std::string>());
  p.temperature = j.at("temperature").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : j.at("temperature").get<double>();
  p.cells = j.at("N").get<int>();
  p.parameters = j.at("parameters").get<std::vector<double>>();
  p.phases = j.at("phases").get<std::vector<double>>();
  if (j.contains("moduli")) p.moduli = j.at("moduli").get<std::vector<double>>();
  return p;
}

CsvTable curvature_table(const CurvatureField& field) {
  CsvTable t;
  t.header = {"kx", "ky", "F_plaq"};
  for (int i = 0; i < field.grid.nx(); ++i) {
    for (int j = 0; j < field.grid.ny(); ++j) {
      t.rows.push_back({format_double(field.grid.kx(i)), format_double(field.grid.ky(j)),
                        format_double(field.at(i, j))});
    }
  }
  return t;
}

CurvatureField curvature_from_table(const CsvTable& table) {
  const auto cx = table.column("kx"), cy = table.column("ky"), cf = table.column("F_plaq");
  std::set<double> xs, ys;
  for (const auto& row : table.rows) {
    xs.insert(parse_double(row[cx]));
    ys.insert(parse_double(row[cy]));
  }
  const int nx = static_cast<int>(xs.size());
  const int ny = static_cast<int>(ys.size());
  if (static_cast<std::size_t>(nx) * ny != table.rows.size()) {
    throw ConfigError("curvature CSV is not a full grid");
  }
  CurvatureField field;
  field.grid = MomentumGrid(nx, ny);
  field.flux.resize(field.grid.size());
  for (const auto& row : table.rows) {
    const int i = static_cast<int>(std::distance(xs.begin(), xs.find(parse_double(row[cx]))));
    const int j = static_cast<int>(std::distance(ys.begin(), ys.find(parse_double(row[cy]))));
    field.flux[field.grid.index(i, j)] = parse_double(row[cf]);
  }
  return field;
}

nlohmann::json curvature_json(const CurvatureField& field, int chern) {
  nlohmann::json j;
  j["nx"] = field.grid.nx();
  j["ny"] = field.grid.ny();
  j["chern"] = chern;
  j["total_flux"] = field.total();
  j["flux"] = field.flux;
  return j;
}

static std::string optional_int(const std::optional<int>& v) {
  return v ? std::to_string(*v) : "";
}

static std::optional<int> parse_optional_int(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return std::stoi(s);
}

CsvTable invariant_report_table(const std::vector<InvariantReport>& rows) {
  CsvTable t;
  t.header = {"T", "beta", "Cx_uhlmann", "Cy_uhlmann", "Cx_egp", "Cy_egp", "C_ground", "status", "T_gap"};
  for (const auto& r : rows) {
    t.rows.push_back({format_double(r.temperature), format_double(r.beta), optional_int(r.cx_uhlmann),
                      optional_int(r.cy_uhlmann), optional_int(r.cx_egp), optional_int(r.cy_egp),
                      optional_int(r.c_ground), r.status, format_double(r.temperature / r.gap)});
  }
  return t;
}

std::vector<InvariantReport> invariant_reports_from_table(const CsvTable& table) {
  const auto ct = table.column("T"), cb = table.column("beta"), cxu = table.column("Cx_uhlmann"),
             cyu = table.column("Cy_uhlmann"), cxe = table.column("Cx_egp"),
             cye = table.column("Cy_egp"), cg = table.column("C_ground"),
             cs = table.column("status"), cgap = table.column("T_gap");
  std::vector<InvariantReport> out;
  for (const auto& row : table.rows) {
    InvariantReport r;
    r.temperature = parse_double(row[ct]);
    r.beta = parse_double(row[cb]);
    r.cx_uhlmann = parse_optional_int(row[cxu]);
    r.cy_uhlmann = parse_optional_int(row[cyu]);
    r.cx_egp = parse_optional_int(row[cxe]);
    r.cy_egp = parse_optional_int(row[cye]);
    r.c_ground = parse_optional_int(row[cg]);
    r.status = row[cs];
    r.gap = r.temperature / parse_double(row[cgap]);
    out.push_back(std::move(r));
  }
  return out;
}

nlohmann::json invariant_report_json(const InvariantReport& r) {
  auto opt = [](const std::optional<int>& v) { return v ? nlohmann::json(*v) : nlohmann::json(); };
  return {{"T", r.temperature},         {"beta", r.beta},
          {"T_gap", r.temperature / r.gap},
          {"Cx_uhlmann", opt(r.cx_uhlmann)}, {"Cy_uhlmann", opt(r.cy_uhlmann)},
          {"Cx_egp", opt(r.cx_egp)},     {"Cy_egp", opt(r.cy_egp)},
          {"C_ground", opt(r.c_ground)}, {"status", r.status},
          {"uhlmann_asymmetric", r.uhlmann_asymmetric()}};
}

MatrixGrid read_matrix_grid(std::istream& is) {
  std::stringstream clean;
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    clean << (hash == std::string::npos ? line : line.substr(0, hash)) << '\n';
  }
  int p = 0, nx = 0, ny = 0;
  if (!(clean >> p >> nx >> ny) || p < 1) throw ConfigError("matrix grid header must be 'p Nx Ny'");
  MatrixGrid grid;
  grid.grid = MomentumGrid(nx, ny);
  grid.p = p;
  grid.values.reserve(grid.grid.size());
  for (std::size_t n = 0; n < grid.grid.size(); ++n) {
    Matrix m(p, p);
    for (int a = 0; a < p; ++a) {
      for (int b = 0; b < p; ++b) {
        std::string re, im;
        if (!(clean >> re >> im)) {
          throw ConfigError("matrix grid ends early at matrix " + std::to_string(n));
        }
        m(a, b) = cplx(parse_double(re), parse_double(im));
      }
    }
    grid.values.push_back(std::move(m));
  }
  std::string extra;
  if (clean >> extra) throw ConfigError("trailing data after matrix grid");
  return grid;
}

void write_matrix_grid(std::ostream& os, const MatrixGrid& grid) {
  os << grid.p << ' ' << grid.grid.nx() << ' ' << grid.grid.ny() << '\n';
  for (const Matrix& m : grid.values) {
    for (int a = 0; a < grid.p; ++a) {
      for (int b = 0; b < grid.p; ++b) {
        os << (b ? "  " : "") << format_double(m(a, b).real()) << ' ' << format_double(m(a, b).imag());
      }
      os << '\n';
    }
  }
}

}  // namespace mixtopo
