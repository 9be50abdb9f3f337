#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

#include "artic/error.hpp"
#include "artic/geometry.hpp"
#include "artic/text_format.hpp"

namespace artic {

namespace {

struct Property {
  std::string name;
  bool is_list = false;
};

struct Element {
  std::string name;
  long long count = 0;
  std::vector<Property> properties;
  int header_line = 0;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) tokens.push_back(line.substr(start, i - start));
  }
  return tokens;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  bool next(std::string_view& line) {
    if (pos_ >= text_.size()) return false;
    const std::size_t end = text_.find('\n', pos_);
    const std::size_t stop = end == std::string_view::npos ? text_.size() : end;
    line = text_.substr(pos_, stop - pos_);
    pos_ = stop + 1;
    ++line_no_;
    return true;
  }

  int line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  int line_no_ = 0;
};

const std::vector<std::string> kScalarTypes = {"char",  "uchar",  "short",   "ushort",
                                               "int",   "uint",   "float",   "double",
                                               "int8",  "uint8",  "int16",   "uint16",
                                               "int32", "uint32", "float32", "float64"};

bool is_scalar_type(std::string_view t) {
  for (const auto& s : kScalarTypes)
    if (s == t) return true;
  return false;
}

double color_channel(std::string_view token, int line) {
  long long v = 0;
  if (!parse_int(token, v) || v < 0 || v > 255)
    throw ParseError("color channel must be an integer in 0..255, got '" + std::string(token) + "'",
                     line);
  return static_cast<double>(v) / 255.0;
}

int color_byte(double c) {
  const long long v = std::llround(c * 255.0);
  return static_cast<int>(std::clamp<long long>(v, 0, 255));
}

}  // namespace

TriMesh load_ply(std::string_view text) {
  LineReader reader(text);
  std::string_view line;
  if (!reader.next(line) || split_ws(line) != std::vector<std::string_view>{"ply"})
    throw ParseError("missing 'ply' magic", 1);

  std::vector<Element> elements;
  bool saw_format = false;
  bool saw_end = false;
  while (reader.next(line)) {
    const int ln = reader.line_no();
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "comment" || tok[0] == "obj_info") continue;
    if (tok[0] == "format") {
      if (tok.size() != 3) throw ParseError("malformed format line", ln);
      if (tok[1] != "ascii")
        throw ParseError("unsupported PLY format '" + std::string(tok[1]) +
                             "' (only ascii is supported)",
                         ln);
      if (tok[2] != "1.0") throw ParseError("unsupported PLY version", ln);
      saw_format = true;
    } else if (tok[0] == "element") {
      long long count = 0;
      if (tok.size() != 3 || !parse_int(tok[2], count) || count < 0)
        throw ParseError("malformed element line", ln);
      elements.push_back({std::string(tok[1]), count, {}, ln});
    } else if (tok[0] == "property") {
      if (elements.empty()) throw ParseError("property before any element", ln);
      if (tok.size() == 3 && is_scalar_type(tok[1])) {
        elements.back().properties.push_back({std::string(tok[2]), false});
      } else if (tok.size() == 5 && tok[1] == "list" && is_scalar_type(tok[2]) &&
                 is_scalar_type(tok[3])) {
        elements.back().properties.push_back({std::string(tok[4]), true});
      } else {
        throw ParseError("malformed property line", ln);
      }
    } else if (tok[0] == "end_header") {
      saw_end = true;
      break;
    } else {
      throw ParseError("unexpected header keyword '" + std::string(tok[0]) + "'", ln);
    }
  }
  if (!saw_format) throw ParseError("missing format line", reader.line_no());
  if (!saw_end) throw ParseError("missing end_header", reader.line_no());

  TriMesh mesh;
  bool have_vertices = false;
  for (const Element& el : elements) {
    if (el.name == "vertex") {
      if (have_vertices) throw ParseError("duplicate vertex element", el.header_line);
      have_vertices = true;
      int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1;
      for (int i = 0; i < static_cast<int>(el.properties.size()); ++i) {
        const Property& p = el.properties[i];
        if (p.is_list) throw ParseError("list property on vertex element", el.header_line);
        if (p.name == "x") ix = i;
        if (p.name == "y") iy = i;
        if (p.name == "z") iz = i;
        if (p.name == "red") ir = i;
        if (p.name == "green") ig = i;
        if (p.name == "blue") ib = i;
      }
      if (ix < 0 || iy < 0 || iz < 0)
        throw ParseError("vertex element lacks x/y/z properties", el.header_line);
      const int n_color = (ir >= 0) + (ig >= 0) + (ib >= 0);
      if (n_color != 0 && n_color != 3)
        throw ParseError("vertex colors need all of red, green, blue", el.header_line);
      const bool colored = n_color == 3;
      mesh.vertices.reserve(static_cast<std::size_t>(el.count));
      for (long long v = 0; v < el.count; ++v) {
        if (!reader.next(line)) throw ParseError("unexpected end of file in vertex data", reader.line_no() + 1);
        const int ln = reader.line_no();
        const auto tok = split_ws(line);
        if (tok.size() != el.properties.size())
          throw ParseError("vertex line has " + std::to_string(tok.size()) + " values, expected " +
                               std::to_string(el.properties.size()),
                           ln);
        Vec3 p;
        const int idx[3] = {ix, iy, iz};
        for (int a = 0; a < 3; ++a)
          if (!parse_real(tok[idx[a]], p[a]))
            throw ParseError("bad coordinate '" + std::string(tok[idx[a]]) + "'", ln);
        mesh.vertices.push_back(p);
        if (colored)
          mesh.vertex_colors.emplace_back(color_channel(tok[ir], ln), color_channel(tok[ig], ln),
                                          color_channel(tok[ib], ln));
      }
    } else if (el.name == "face") {
      if (!have_vertices) throw ParseError("face element before vertex element", el.header_line);
      if (el.properties.size() != 1 || !el.properties[0].is_list)
        throw ParseError("face element must have exactly one list property", el.header_line);
      const auto n_vertices = static_cast<long long>(mesh.vertices.size());
      mesh.faces.reserve(static_cast<std::size_t>(el.count));
      for (long long f = 0; f < el.count; ++f) {
        if (!reader.next(line)) throw ParseError("unexpected end of file in face data", reader.line_no() + 1);
        const int ln = reader.line_no();
        const auto tok = split_ws(line);
        long long arity = 0;
        if (tok.empty() || !parse_int(tok[0], arity)) throw ParseError("malformed face line", ln);
        if (arity != 3)
          throw ParseError("non-triangular face with " + std::to_string(arity) + " vertices", ln);
        if (tok.size() != 4) throw ParseError("face line has wrong number of indices", ln);
        Face tri{};
        for (int i = 0; i < 3; ++i) {
          long long idx = 0;
          if (!parse_int(tok[i + 1], idx)) throw ParseError("bad vertex index", ln);
          if (idx < 0 || idx >= n_vertices)
            throw ParseError("face references vertex " + std::to_string(idx) + " of " +
                                 std::to_string(n_vertices),
                             ln);
          tri[i] = static_cast<int>(idx);
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
          throw ParseError("degenerate face (repeated vertex index)", ln);
        mesh.faces.push_back(tri);
      }
    } else {
      for (long long i = 0; i < el.count; ++i)
        if (!reader.next(line))
          throw ParseError("unexpected end of file in element '" + el.name + "'", reader.line_no() + 1);
    }
  }
  if (!have_vertices) throw ParseError("missing vertex element", reader.line_no());
  while (reader.next(line))
    if (!split_ws(line).empty()) throw ParseError("trailing data after last element", reader.line_no());

  orient_consistently(mesh);
  return mesh;
}

std::string save_ply(const TriMesh& mesh) {
  validate_mesh(mesh);
  std::ostringstream out;
  out << "ply\nformat ascii 1.0\n";
  out << "element vertex " << mesh.vertices.size() << "\n";
  out << "property double x\nproperty double y\nproperty double z\n";
  if (mesh.has_colors()) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.faces.size() << "\n";
  out << "property list uchar int vertex_indices\n";
  out << "end_header\n";
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3& v = mesh.vertices[i];
    out << format_real(v.x()) << ' ' << format_real(v.y()) << ' ' << format_real(v.z());
    if (mesh.has_colors()) {
      const Color& c = mesh.vertex_colors[i];
      out << ' ' << color_byte(c[0]) << ' ' << color_byte(c[1]) << ' ' << color_byte(c[2]);
    }
    out << '\n';
  }
  for (const Face& f : mesh.faces) out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
  return out.str();
}

std::string save_ply(const PointCloud& cloud) {
  TriMesh points;
  points.vertices = cloud.points;
  points.vertex_colors = cloud.colors;
  std::string text = save_ply(points);
  // Point clouds carry no face element.
  const std::string face_header = "element face 0\nproperty list uchar int vertex_indices\n";
  text.erase(text.find(face_header), face_header.size());
  return text;
}

}  // namespace artic
