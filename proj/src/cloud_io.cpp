#include "orchardnav/cloud_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace orchard {

using json = nlohmann::ordered_json;

namespace {

std::string lower_ext(const std::string& path) {
  auto dot = path.find_last_of('.');
  if (dot == std::string::npos) return "";
  std::string ext = path.substr(dot + 1);
  for (auto& c : ext) c = static_cast<char>(std::tolower(c));
  return ext;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& what) {
  std::ostringstream os;
  os << path << ":" << line << ": " << what;
  throw IoError(os.str());
}

// Parses one whitespace-separated coordinate row. Accepts 3 or 4 columns.
bool parse_point_row(const std::string& line, Point3& out, bool& had_intensity) {
  std::istringstream is(line);
  double x, y, z;
  if (!(is >> x >> y >> z)) return false;
  double intensity = 0.0;
  had_intensity = static_cast<bool>(is >> intensity);
  std::string trailing;
  if (is >> trailing) return false;
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) ||
      !std::isfinite(intensity))
    return false;
  out = Point3(x, y, z, intensity);
  return true;
}

PointCloudMap load_xyz(const std::string& path, std::ifstream& in) {
  std::vector<Point3> pts;
  bool any_intensity = false;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    if (line[first] == '#') continue;
    Point3 p;
    bool has_i = false;
    if (!parse_point_row(line, p, has_i))
      parse_fail(path, lineno, "malformed or non-finite point '" + line + "'");
    any_intensity = any_intensity || has_i;
    pts.push_back(p);
  }
  if (pts.empty()) throw IoError(path + ": no valid points");
  PointCloudMap map(std::move(pts));
  map.set_has_intensity(any_intensity);
  return map;
}

PointCloudMap load_ply(const std::string& path, std::ifstream& in) {
  std::string line;
  std::size_t lineno = 0;
  if (!std::getline(in, line) || line.rfind("ply", 0) != 0)
    parse_fail(path, 1, "missing 'ply' magic");
  ++lineno;

  std::size_t vertex_count = 0;
  bool in_vertex_element = false;
  std::vector<std::string> vertex_props;
  bool ascii = false;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    std::string tok;
    is >> tok;
    if (tok == "comment") continue;
    if (tok == "format") {
      std::string fmt;
      is >> fmt;
      ascii = (fmt == "ascii");
      if (!ascii) parse_fail(path, lineno, "only ascii PLY is supported");
    } else if (tok == "element") {
      std::string name;
      std::size_t count;
      is >> name >> count;
      in_vertex_element = (name == "vertex");
      if (in_vertex_element) vertex_count = count;
      else if (count > 0)
        parse_fail(path, lineno, "unsupported element '" + name + "'");
    } else if (tok == "property") {
      if (!in_vertex_element) continue;
      std::string type, name;
      is >> type >> name;
      if (type != "float" && type != "double" && type != "float32" &&
          type != "float64")
        parse_fail(path, lineno, "unsupported vertex property type '" + type + "'");
      vertex_props.push_back(name);
    } else if (tok == "end_header") {
      break;
    }
  }
  auto index_of = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < vertex_props.size(); ++i)
      if (vertex_props[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
  const int ii = index_of("intensity");
  if (ix < 0 || iy < 0 || iz < 0)
    throw IoError(path + ": vertex element lacks x/y/z properties");

  std::vector<Point3> pts;
  pts.reserve(vertex_count);
  for (std::size_t v = 0; v < vertex_count; ++v) {
    if (!std::getline(in, line))
      parse_fail(path, lineno + v + 1, "unexpected end of file in vertex data");
    std::istringstream is(line);
    std::vector<double> vals(vertex_props.size());
    for (auto& val : vals)
      if (!(is >> val))
        parse_fail(path, lineno + v + 1, "malformed vertex row '" + line + "'");
    Point3 p(vals[ix], vals[iy], vals[iz], ii >= 0 ? vals[ii] : 0.0);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      parse_fail(path, lineno + v + 1, "non-finite vertex coordinates");
    pts.push_back(p);
  }
  if (pts.empty()) throw IoError(path + ": no valid points");
  PointCloudMap map(std::move(pts));
  map.set_has_intensity(ii >= 0);
  return map;
}

PointCloudMap load_pcd(const std::string& path, std::ifstream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> fields;
  std::size_t point_count = 0;
  bool data_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line[0] == '#') continue;
    std::istringstream is(line);
    std::string tok;
    is >> tok;
    if (tok == "FIELDS") {
      std::string f;
      while (is >> f) fields.push_back(f);
    } else if (tok == "POINTS") {
      is >> point_count;
    } else if (tok == "DATA") {
      std::string kind;
      is >> kind;
      if (kind != "ascii") parse_fail(path, lineno, "only ascii PCD is supported");
      data_seen = true;
      break;
    }
    // VERSION/SIZE/TYPE/COUNT/WIDTH/HEIGHT/VIEWPOINT are accepted and ignored.
  }
  if (!data_seen) throw IoError(path + ": missing DATA ascii header");
  auto index_of = [&](const std::string& name) -> int {
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (fields[i] == name) return static_cast<int>(i);
    return -1;
  };
  const int ix = index_of("x"), iy = index_of("y"), iz = index_of("z");
  const int ii = index_of("intensity");
  if (ix < 0 || iy < 0 || iz < 0)
    throw IoError(path + ": FIELDS lacks x y z");

  std::vector<Point3> pts;
  pts.reserve(point_count);
  for (std::size_t v = 0; v < point_count; ++v) {
    if (!std::getline(in, line))
      parse_fail(path, lineno + v + 1, "unexpected end of file in point data");
    std::istringstream is(line);
    std::vector<double> vals(fields.size());
    for (auto& val : vals)
      if (!(is >> val))
        parse_fail(path, lineno + v + 1, "malformed point row '" + line + "'");
    Point3 p(vals[ix], vals[iy], vals[iz], ii >= 0 ? vals[ii] : 0.0);
    if (!std::isfinite(p.x) || !std::isfinite(p.y) || !std::isfinite(p.z))
      parse_fail(path, lineno + v + 1, "non-finite point coordinates");
    pts.push_back(p);
  }
  if (pts.empty()) throw IoError(path + ": no valid points");
  PointCloudMap map(std::move(pts));
  map.set_has_intensity(ii >= 0);
  return map;
}

void write_value(std::ostream& os, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  os << buf;
}

void write_row(std::ostream& os, const Point3& p, bool intensity) {
  write_value(os, p.x);
  os << ' ';
  write_value(os, p.y);
  os << ' ';
  write_value(os, p.z);
  if (intensity) {
    os << ' ';
    write_value(os, p.intensity);
  }
  os << '\n';
}

}  // namespace

CloudFormat cloud_format_from_path(const std::string& path) {
  const std::string ext = lower_ext(path);
  if (ext == "xyz" || ext == "txt") return CloudFormat::XyzAscii;
  if (ext == "ply") return CloudFormat::PlyAscii;
  if (ext == "pcd") return CloudFormat::PcdAscii;
  throw IoError(path + ": cannot infer cloud format from extension");
}

PointCloudMap load_pointcloud(const std::string& path, CloudFormat format) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  switch (format) {
    case CloudFormat::XyzAscii: return load_xyz(path, in);
    case CloudFormat::PlyAscii: return load_ply(path, in);
    case CloudFormat::PcdAscii: return load_pcd(path, in);
  }
  throw IoError(path + ": unknown format");
}

PointCloudMap load_pointcloud(const std::string& path) {
  return load_pointcloud(path, cloud_format_from_path(path));
}

void save_pointcloud(const PointCloudMap& map, const std::string& path,
                     CloudFormat format) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  const bool intensity = map.has_intensity();
  switch (format) {
    case CloudFormat::XyzAscii: {
      for (const auto& p : map.points()) write_row(out, p, intensity);
      break;
    }
    case CloudFormat::PlyAscii: {
      out << "ply\nformat ascii 1.0\n";
      out << "element vertex " << map.size() << "\n";
      out << "property double x\nproperty double y\nproperty double z\n";
      if (intensity) out << "property double intensity\n";
      out << "end_header\n";
      for (const auto& p : map.points()) write_row(out, p, intensity);
      break;
    }
    case CloudFormat::PcdAscii: {
      const int n_fields = intensity ? 4 : 3;
      out << "# .PCD v0.7 - Point Cloud Data file format\nVERSION 0.7\n";
      out << "FIELDS x y z" << (intensity ? " intensity" : "") << "\n";
      out << "SIZE";
      for (int i = 0; i < n_fields; ++i) out << " 8";
      out << "\nTYPE";
      for (int i = 0; i < n_fields; ++i) out << " F";
      out << "\nCOUNT";
      for (int i = 0; i < n_fields; ++i) out << " 1";
      out << "\nWIDTH " << map.size() << "\nHEIGHT 1\n";
      out << "VIEWPOINT 0 0 0 1 0 0 0\nPOINTS " << map.size() << "\nDATA ascii\n";
      for (const auto& p : map.points()) write_row(out, p, intensity);
      break;
    }
  }
  if (!out) throw IoError(path + ": write failed");
}

void save_pointcloud(const PointCloudMap& map, const std::string& path) {
  save_pointcloud(map, path, cloud_format_from_path(path));
}

std::string detections_to_json(const std::vector<Detection>& dets) {
  json arr = json::array();
  for (const auto& d : dets) {
    json box;
    box["x_min"] = d.box.x_min;
    box["y_min"] = d.box.y_min;
    box["x_max"] = d.box.x_max;
    box["y_max"] = d.box.y_max;
    if (d.has_z()) {
      box["z_min"] = *d.z_min;
      box["z_max"] = *d.z_max;
    }
    json j;
    j["box"] = box;
    j["confidence"] = d.confidence;
    j["class_id"] = d.class_id;
    arr.push_back(j);
  }
  return arr.dump(2);
}

std::vector<Detection> detections_from_json(const std::string& text) {
  json arr;
  try {
    arr = json::parse(text);
  } catch (const json::exception& e) {
    throw IoError(std::string("detections JSON parse error: ") + e.what());
  }
  if (!arr.is_array()) throw IoError("detections JSON must be an array");
  std::vector<Detection> dets;
  dets.reserve(arr.size());
  for (const auto& j : arr) {
    const auto& box = j.at("box");
    Detection d(Box2D(box.at("x_min").get<double>(), box.at("y_min").get<double>(),
                      box.at("x_max").get<double>(), box.at("y_max").get<double>()),
                j.at("confidence").get<double>(),
                j.value("class_id", 0));
    if (box.contains("z_min") && box.contains("z_max")) {
      d.z_min = box.at("z_min").get<double>();
      d.z_max = box.at("z_max").get<double>();
    }
    dets.push_back(d);
  }
  return dets;
}

void save_detections(const std::vector<Detection>& dets, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError(path + ": cannot open for writing");
  out << detections_to_json(dets) << "\n";
}

std::vector<Detection> load_detections(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path + ": cannot open for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return detections_from_json(ss.str());
}

}  // namespace orchard
