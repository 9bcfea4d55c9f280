#include "rfimg/io.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include <json.hpp>

namespace rfimg::io {
namespace {

using nlohmann::json;

double parse_real(const std::string& field, const std::string& context) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (end == begin || *end != '\0')
    throw ParseError(context + ": not a number: '" + field + "'");
  return value;
}

long long parse_integer(const std::string& field, const std::string& context) {
  const char* begin = field.c_str();
  char* end = nullptr;
  const long long value = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0')
    throw ParseError(context + ": not an integer: '" + field + "'");
  return value;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(current);
  return fields;
}

std::string trimmed(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  return in;
}

std::ofstream open_output(const std::string& path, bool append = false) {
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw ParseError("cannot write file: " + path);
  return out;
}

void require_keys(const json& obj, const std::vector<std::string>& allowed,
                  const std::string& context) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
      throw ParseError(context + ": unknown key '" + key + "'");
  }
}

double number_field(const json& obj, const std::string& key,
                    const std::string& context) {
  const json& v = obj.at(key);
  if (!v.is_number())
    throw ParseError(context + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d))
    throw ParseError(context + ": '" + key + "' must be finite");
  return d;
}

Vec3 vertex_field(const json& obj, const std::string& key,
                  const std::string& context) {
  const json& v = obj.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ParseError(context + ": '" + key + "' must be an array of 3 numbers");
  Vec3 p;
  double* coords[3] = {&p.x, &p.y, &p.z};
  for (std::size_t i = 0; i < 3; ++i) {
    if (!v[i].is_number())
      throw ParseError(context + ": '" + key + "' must be an array of 3 numbers");
    *coords[i] = v[i].get<double>();
    if (!std::isfinite(*coords[i]))
      throw ParseError(context + ": '" + key + "' has a non-finite coordinate");
  }
  return p;
}

pathgen::Material parse_material(const std::string& name, const json& spec) {
  const std::string context = "material '" + name + "'";
  if (!spec.is_object()) throw ParseError(context + ": must be an object");
  require_keys(spec, {"kind", "eps_r", "sigma_a", "sigma_b", "scattering"},
               context);
  if (!spec.contains("kind") || !spec.at("kind").is_string())
    throw ParseError(context + ": missing string 'kind'");

  pathgen::Material m;
  m.name = name;
  const std::string kind = spec.at("kind").get<std::string>();
  if (kind == "perfect-conductor") {
    m.kind = pathgen::Material::Kind::PerfectConductor;
    for (const char* banned : {"eps_r", "sigma_a", "sigma_b"})
      if (spec.contains(banned))
        throw ParseError(context + ": '" + banned +
                         "' is not valid for a perfect conductor");
  } else if (kind == "dielectric") {
    m.kind = pathgen::Material::Kind::Dielectric;
    if (!spec.contains("eps_r"))
      throw ParseError(context + ": dielectric requires 'eps_r'");
    m.eps_r = number_field(spec, "eps_r", context);
    if (m.eps_r < 1.0)
      throw ParseError(context + ": 'eps_r' must be >= 1");
    if (spec.contains("sigma_a")) {
      m.sigma_a = number_field(spec, "sigma_a", context);
      if (m.sigma_a < 0.0) throw ParseError(context + ": 'sigma_a' must be >= 0");
    }
    if (spec.contains("sigma_b")) m.sigma_b = number_field(spec, "sigma_b", context);
  } else {
    throw ParseError(context + ": unknown kind '" + kind + "'");
  }
  if (spec.contains("scattering")) {
    m.scattering = number_field(spec, "scattering", context);
    if (m.scattering < 0.0 || m.scattering > 1.0)
      throw ParseError(context + ": 'scattering' must be in [0, 1]");
  }
  return m;
}

} // namespace

std::string format_real(double value) {
  if (std::isnan(value)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

pathgen::Scene load_scene(const std::string& path) {
  std::ifstream in = open_input(path);
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ParseError("scene '" + path + "': " + e.what());
  }
  if (!root.is_object())
    throw ParseError("scene '" + path + "': top level must be an object");
  require_keys(root, {"materials", "triangles"}, "scene");
  if (!root.contains("materials") || !root.at("materials").is_object())
    throw ParseError("scene: missing 'materials' object");
  if (!root.contains("triangles") || !root.at("triangles").is_array())
    throw ParseError("scene: missing 'triangles' array");

  pathgen::Scene scene;
  std::map<std::string, std::uint32_t> material_index;
  for (const auto& [name, spec] : root.at("materials").items()) {
    material_index[name] = static_cast<std::uint32_t>(scene.materials.size());
    scene.materials.push_back(parse_material(name, spec));
  }

  const json& triangles = root.at("triangles");
  for (std::size_t i = 0; i < triangles.size(); ++i) {
    const std::string context = "triangle " + std::to_string(i);
    const json& t = triangles[i];
    if (!t.is_object()) throw ParseError(context + ": must be an object");
    require_keys(t, {"v0", "v1", "v2", "material"}, context);
    for (const char* key : {"v0", "v1", "v2", "material"})
      if (!t.contains(key))
        throw ParseError(context + ": missing '" + std::string(key) + "'");
    if (!t.at("material").is_string())
      throw ParseError(context + ": 'material' must be a string");

    Triangle tri;
    tri.v0 = vertex_field(t, "v0", context);
    tri.v1 = vertex_field(t, "v1", context);
    tri.v2 = vertex_field(t, "v2", context);
    const std::string mat = t.at("material").get<std::string>();
    const auto it = material_index.find(mat);
    if (it == material_index.end())
      throw ParseError(context + ": undefined material '" + mat + "'");
    tri.material_id = it->second;
    if (tri.raw_normal().norm() <= 1e-12)
      throw ParseError(context + ": degenerate (zero-area) triangle");
    scene.triangles.push_back(tri);
  }
  return scene;
}

std::vector<DropGeometry> load_drops(const std::string& path) {
  std::ifstream in = open_input(path);
  std::vector<DropGeometry> drops;
  std::string line;
  std::size_t line_no = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trimmed(line);
    if (body.empty() || body[0] == '#') continue;
    const std::string context = "drops '" + path + "' line " + std::to_string(line_no);
    const auto fields = split_csv(body);
    if (!seen_data) {
      // A single leading header row is tolerated.
      const bool numeric_start = !fields.empty() &&
          fields[0].find_first_not_of(" \t+-.0123456789eE") == std::string::npos &&
          !trimmed(fields[0]).empty();
      seen_data = true;
      if (!numeric_start) continue;
    }
    if (fields.size() != 6)
      throw ParseError(context + ": expected 6 comma-separated values");
    double v[6];
    for (int i = 0; i < 6; ++i) v[i] = parse_real(trimmed(fields[i]), context);
    DropGeometry d{{v[0], v[1], v[2]}, {v[3], v[4], v[5]}};
    if (d.tx == d.rx)
      throw ParseError(context + ": tx equals rx");
    drops.push_back(d);
  }
  return drops;
}

namespace {

const char* kPathsHeader =
    "drop_id,path_id,bounces,is_los,aod_az,aod_zen,aoa_az,aoa_zen,toa_s,"
    "gain_db,phase_rad,gt_x,gt_y,gt_z";

} // namespace

void write_paths_csv(const std::string& path,
                     const std::vector<pathgen::Drop>& drops) {
  std::ofstream out = open_output(path);
  out << kPathsHeader << '\n';
  for (const pathgen::Drop& drop : drops) {
    for (std::size_t i = 0; i < drop.paths.size(); ++i) {
      const pathgen::PathComponent& p = drop.paths[i];
      out << drop.drop_id << ',' << i << ',' << p.bounce_count << ','
          << (p.is_los ? 1 : 0) << ',' << format_real(p.aod.azimuth) << ','
          << format_real(p.aod.zenith) << ',' << format_real(p.aoa.azimuth)
          << ',' << format_real(p.aoa.zenith) << ',' << format_real(p.toa_s)
          << ',' << format_real(pathgen::received_power_dbm(p)) << ','
          << format_real(std::arg(p.gain)) << ',';
      if (p.is_los) {
        out << ",,";
      } else {
        out << format_real(p.interaction.x) << ','
            << format_real(p.interaction.y) << ','
            << format_real(p.interaction.z);
      }
      out << '\n';
    }
  }
}

std::vector<TracedPath> read_paths_csv(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  if (!std::getline(in, line) || trimmed(line) != kPathsHeader)
    throw ParseError("paths '" + path + "': missing or wrong header");

  std::vector<TracedPath> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trimmed(line);
    if (body.empty()) continue;
    const std::string context = "paths '" + path + "' line " + std::to_string(line_no);
    const auto fields = split_csv(body);
    if (fields.size() != 14)
      throw ParseError(context + ": expected 14 fields");

    TracedPath row;
    row.drop_id = static_cast<int>(parse_integer(fields[0], context));
    row.path_id = static_cast<int>(parse_integer(fields[1], context));
    pathgen::PathComponent& p = row.path;
    p.bounce_count = static_cast<int>(parse_integer(fields[2], context));
    const long long los = parse_integer(fields[3], context);
    if (los != 0 && los != 1)
      throw ParseError(context + ": is_los must be 0 or 1");
    p.is_los = los == 1;
    p.aod.azimuth = parse_real(fields[4], context);
    p.aod.zenith = parse_real(fields[5], context);
    p.aoa.azimuth = parse_real(fields[6], context);
    p.aoa.zenith = parse_real(fields[7], context);
    p.toa_s = parse_real(fields[8], context);
    const double gain_db = parse_real(fields[9], context);
    const double phase = parse_real(fields[10], context);
    p.gain = std::polar(std::pow(10.0, gain_db / 20.0), phase);
    const bool gt_empty = fields[11].empty() && fields[12].empty() &&
                          fields[13].empty();
    if (p.is_los) {
      if (!gt_empty)
        throw ParseError(context + ": line-of-sight rows must leave gt_* empty");
    } else {
      if (gt_empty)
        throw ParseError(context + ": reflection rows need gt_* coordinates");
      p.interaction.x = parse_real(fields[11], context);
      p.interaction.y = parse_real(fields[12], context);
      p.interaction.z = parse_real(fields[13], context);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_ply(const std::string& path, const cloud::PointCloud& cloud) {
  std::ofstream out = open_output(path);
  out << "ply\n"
         "format ascii 1.0\n"
         "element vertex "
      << cloud.size()
      << "\n"
         "property double x\n"
         "property double y\n"
         "property double z\n"
         "property double gain_db\n"
         "property double residual\n"
         "property int drop_id\n"
         "property int path_id\n"
         "end_header\n";
  for (const cloud::CloudPoint& p : cloud.points) {
    out << format_real(p.position.x) << ' ' << format_real(p.position.y) << ' '
        << format_real(p.position.z) << ' ' << format_real(p.gain_db) << ' '
        << format_real(p.residual) << ' ' << p.drop_id << ' ' << p.path_id
        << '\n';
  }
}

cloud::PointCloud read_ply(const std::string& path) {
  std::ifstream in = open_input(path);
  std::string line;
  const std::vector<std::string> expected = {
      "ply",
      "format ascii 1.0",
      "", // element vertex N
      "property double x",
      "property double y",
      "property double z",
      "property double gain_db",
      "property double residual",
      "property int drop_id",
      "property int path_id",
      "end_header",
  };
  std::size_t count = 0;
  for (std::size_t i = 0; i < expected.size(); ++i) {
    if (!std::getline(in, line))
      throw ParseError("ply '" + path + "': truncated header");
    const std::string body = trimmed(line);
    if (i == 2) {
      std::istringstream hs(body);
      std::string el, vx;
      if (!(hs >> el >> vx >> count) || el != "element" || vx != "vertex")
        throw ParseError("ply '" + path + "': expected 'element vertex N'");
    } else if (body != expected[i]) {
      throw ParseError("ply '" + path + "': unexpected header line '" + body + "'");
    }
  }

  cloud::PointCloud cloud;
  cloud.points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (!std::getline(in, line))
      throw ParseError("ply '" + path + "': truncated body");
    std::istringstream row(line);
    cloud::CloudPoint p;
    if (!(row >> p.position.x >> p.position.y >> p.position.z >> p.gain_db >>
          p.residual >> p.drop_id >> p.path_id))
      throw ParseError("ply '" + path + "': bad vertex row " + std::to_string(i));
    cloud.points.push_back(p);
  }
  return cloud;
}

void write_tradeoff_csv(const std::string& path,
                        const std::vector<cloud::TradeoffRow>& rows) {
  std::ofstream out = open_output(path);
  out << "num_pairs,chamfer_m,points_kept\n";
  for (const cloud::TradeoffRow& r : rows)
    out << r.num_pairs << ',' << format_real(r.chamfer_m) << ','
        << r.points_kept << '\n';
}

void write_cir_csv(const std::string& path, int drop_id,
                   const std::vector<channel::CirTap>& taps, bool append) {
  std::ofstream out = open_output(path, append);
  if (!append) out << "drop_id,tap,delay_s,rx_ant,tx_ant,re,im\n";
  for (std::size_t t = 0; t < taps.size(); ++t) {
    const channel::CirTap& tap = taps[t];
    for (int r = 0; r < tap.rows; ++r)
      for (int c = 0; c < tap.cols; ++c)
        out << drop_id << ',' << t << ',' << format_real(tap.delay_s) << ','
            << r << ',' << c << ',' << format_real(tap.at(r, c).real()) << ','
            << format_real(tap.at(r, c).imag()) << '\n';
  }
}

} // namespace rfimg::io
