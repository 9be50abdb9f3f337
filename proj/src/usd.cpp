#include "artic/usd.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>

#include "artic/error.hpp"
#include "artic/text_format.hpp"

namespace artic {

namespace {

constexpr std::string_view kBody0 = "physics:body0";
constexpr std::string_view kBody1 = "physics:body1";
constexpr std::string_view kAxis = "artic:axis";
constexpr std::string_view kOrigin = "artic:origin";
constexpr std::string_view kLower = "physics:lowerLimit";
constexpr std::string_view kUpper = "physics:upperLimit";
constexpr std::string_view kInteractable = "artic:interactable";
constexpr std::string_view kAttachment = "artic:attachmentPoint";

bool is_ident_start(char c) { return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }

// Attribute names are identifiers joined by ':' (e.g. physics:body0).
bool is_attr_name(std::string_view name) {
  std::size_t start = 0;
  while (true) {
    const std::size_t colon = name.find(':', start);
    if (!is_identifier(name.substr(start, colon - start))) return false;
    if (colon == std::string_view::npos) return true;
    start = colon + 1;
  }
}

bool is_prim_path(std::string_view path) {
  if (path.size() < 2 || path.front() != '/') return false;
  std::size_t start = 1;
  while (true) {
    const std::size_t slash = path.find('/', start);
    if (!is_identifier(path.substr(start, slash - start))) return false;
    if (slash == std::string_view::npos) return true;
    start = slash + 1;
  }
}

std::vector<std::string_view> split_path(std::string_view path) {
  std::vector<std::string_view> names;
  std::size_t start = 1;
  while (start <= path.size()) {
    const std::size_t slash = std::min(path.find('/', start), path.size());
    names.push_back(path.substr(start, slash - start));
    start = slash + 1;
  }
  return names;
}

PrimAttribute rel(std::string path, bool custom = false) {
  return {AttrType::kRel, custom, std::move(path)};
}
PrimAttribute real_attr(double v) { return {AttrType::kFloat, false, v}; }
PrimAttribute string_attr(std::string s) { return {AttrType::kString, true, std::move(s)}; }

struct AttrShape {
  AttrType type;
  bool custom;
  bool required;
};

std::map<std::string_view, AttrShape> joint_shape(PrimSchema schema) {
  std::map<std::string_view, AttrShape> shape{
      {kBody0, {AttrType::kRel, false, true}},
      {kBody1, {AttrType::kRel, false, true}},
  };
  if (schema == PrimSchema::kFixedJoint) {
    shape.emplace(kAttachment, AttrShape{AttrType::kPoint3f, true, true});
    return shape;
  }
  shape.emplace(kAxis, AttrShape{AttrType::kVector3f, true, true});
  if (schema == PrimSchema::kRevoluteJoint)
    shape.emplace(kOrigin, AttrShape{AttrType::kPoint3f, true, true});
  shape.emplace(kLower, AttrShape{AttrType::kFloat, false, true});
  shape.emplace(kUpper, AttrShape{AttrType::kFloat, false, true});
  shape.emplace(kInteractable, AttrShape{AttrType::kRel, true, false});
  return shape;
}

bool all_finite(const AttrValue& value) {
  if (const auto* d = std::get_if<double>(&value)) return std::isfinite(*d);
  if (const auto* v = std::get_if<Vec3>(&value)) return v->allFinite();
  if (const auto* pts = std::get_if<std::vector<Vec3>>(&value))
    return std::all_of(pts->begin(), pts->end(), [](const Vec3& p) { return p.allFinite(); });
  return true;
}

// ---------------------------------------------------------------------------
// Invariant checking, shared by check_stage and parse_usda. `fail` must throw.

using FailFn = std::function<void(const std::string& prim_path, const std::string& attr,
                                  const std::string& message)>;

void collect_paths(const Prim& prim, const std::string& parent, std::set<std::string>& out) {
  const std::string path = parent + "/" + prim.name;
  out.insert(path);
  for (const Prim& c : prim.children) collect_paths(c, path, out);
}

[[noreturn]] void raise(const FailFn& fail, const std::string& prim_path, const std::string& attr,
                        const std::string& message) {
  fail(prim_path, attr, message);
  throw Error(message);  // unreachable when fail throws as required
}

void check_mesh(const Prim& prim, const std::string& path, const FailFn& fail) {
  const PrimAttribute* points = prim.attribute("points");
  const PrimAttribute* counts = prim.attribute("faceVertexCounts");
  const PrimAttribute* indices = prim.attribute("faceVertexIndices");
  if (!points && !counts && !indices) return;
  if (!points || !counts || !indices)
    raise(fail, path, "", "mesh needs points, faceVertexCounts and faceVertexIndices together");
  if (points->type != AttrType::kPoint3fArray) raise(fail, path, "points", "expected point3f[]");
  if (counts->type != AttrType::kIntArray) raise(fail, path, "faceVertexCounts", "expected int[]");
  if (indices->type != AttrType::kIntArray) raise(fail, path, "faceVertexIndices", "expected int[]");
  const auto& pts = std::get<std::vector<Vec3>>(points->value);
  const auto& cnt = std::get<std::vector<int>>(counts->value);
  const auto& idx = std::get<std::vector<int>>(indices->value);
  long long total = 0;
  for (int c : cnt) {
    if (c < 3) raise(fail, path, "faceVertexCounts", "face with fewer than 3 vertices");
    total += c;
  }
  if (total != static_cast<long long>(idx.size()))
    raise(fail, path, "faceVertexIndices",
          "has " + std::to_string(idx.size()) + " entries, faceVertexCounts sum to " +
              std::to_string(total));
  for (int i : idx)
    if (i < 0 || i >= static_cast<int>(pts.size()))
      raise(fail, path, "faceVertexIndices",
            "index " + std::to_string(i) + " out of range for " + std::to_string(pts.size()) +
                " points");
}

void check_prim(const Prim& prim, const std::string& parent, const std::set<std::string>& paths,
                const FailFn& fail) {
  const std::string path = parent + "/" + prim.name;
  if (!is_identifier(prim.name)) raise(fail, path, "", "invalid prim name '" + prim.name + "'");

  std::set<std::string_view> seen;
  for (const auto& [name, attr] : prim.attributes) {
    if (!seen.insert(name).second) raise(fail, path, name, "duplicate attribute '" + name + "'");
    if (!is_attr_name(name)) raise(fail, path, name, "invalid attribute name '" + name + "'");
    if (!attr.well_typed())
      raise(fail, path, name, "value does not match declared type " + std::string(to_string(attr.type)));
    if (!all_finite(attr.value)) raise(fail, path, name, "non-finite value");
    if (attr.type == AttrType::kRel) {
      const auto& target = std::get<std::string>(attr.value);
      if (!is_prim_path(target)) raise(fail, path, name, "malformed path <" + target + ">");
      if (!paths.count(target)) raise(fail, path, name, "unresolved rel <" + target + ">");
    }
  }

  if (is_joint(prim.schema)) {
    if (!prim.children.empty()) raise(fail, path, "", "joint prims cannot have children");
    JointSpec spec;
    try {
      spec = read_joint(prim);
    } catch (const ValidationError& e) {
      raise(fail, path, "", e.what());
    }
    if (spec.body0 == spec.body1) raise(fail, path, std::string(kBody1), "body0 and body1 are the same prim");
    if (spec.lower && spec.upper && *spec.lower > *spec.upper)
      raise(fail, path, std::string(kUpper), "lowerLimit exceeds upperLimit");
    if (spec.axis && std::abs(spec.axis->norm() - 1.0) > 1e-9)
      raise(fail, path, std::string(kAxis), "axis is not a unit vector");
  } else if (prim.schema == PrimSchema::kMesh) {
    check_mesh(prim, path, fail);
  }

  std::set<std::string_view> names;
  for (const Prim& c : prim.children) {
    if (!names.insert(c.name).second)
      raise(fail, path + "/" + c.name, "", "duplicate sibling name '" + c.name + "'");
    check_prim(c, path, paths, fail);
  }
}

void check_stage_with(const UsdStage& stage, const FailFn& fail) {
  std::set<std::string> paths;
  for (const Prim& p : stage.root_prims) collect_paths(p, "", paths);
  std::set<std::string_view> names;
  for (const Prim& p : stage.root_prims) {
    if (!names.insert(p.name).second)
      raise(fail, "/" + p.name, "", "duplicate sibling name '" + p.name + "'");
    check_prim(p, "", paths, fail);
  }
  if (stage.default_prim &&
      std::none_of(stage.root_prims.begin(), stage.root_prims.end(),
                   [&](const Prim& p) { return p.name == *stage.default_prim; }))
    raise(fail, "", "", "defaultPrim '" + *stage.default_prim + "' names no root prim");
}

// ---------------------------------------------------------------------------
// Emission.

void indent(std::string& out, int depth) { out.append(static_cast<std::size_t>(depth) * 4, ' '); }

void emit_quoted(std::string& out, std::string_view s) {
  static constexpr char kHex[] = "0123456789abcdef";
  out += '"';
  for (char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          out += "\\x";
          out += kHex[c >> 4];
          out += kHex[c & 15];
        } else {
          out += ch;
        }
    }
  }
  out += '"';
}

void emit_tuple(std::string& out, const Vec3& v) {
  out += '(';
  out += format_real(v.x());
  out += ", ";
  out += format_real(v.y());
  out += ", ";
  out += format_real(v.z());
  out += ')';
}

void emit_value(std::string& out, const PrimAttribute& attr) {
  switch (attr.type) {
    case AttrType::kPoint3fArray: {
      const auto& pts = std::get<std::vector<Vec3>>(attr.value);
      out += '[';
      for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i) out += ", ";
        emit_tuple(out, pts[i]);
      }
      out += ']';
      break;
    }
    case AttrType::kIntArray: {
      const auto& ints = std::get<std::vector<int>>(attr.value);
      out += '[';
      for (std::size_t i = 0; i < ints.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(ints[i]);
      }
      out += ']';
      break;
    }
    case AttrType::kVector3f:
    case AttrType::kPoint3f:
      emit_tuple(out, std::get<Vec3>(attr.value));
      break;
    case AttrType::kFloat:
      out += format_real(std::get<double>(attr.value));
      break;
    case AttrType::kString:
      emit_quoted(out, std::get<std::string>(attr.value));
      break;
    case AttrType::kRel:
      out += '<';
      out += std::get<std::string>(attr.value);
      out += '>';
      break;
  }
}

void emit_prim(std::string& out, const Prim& prim, int depth) {
  indent(out, depth);
  out += "def ";
  out += to_string(prim.schema);
  out += ' ';
  emit_quoted(out, prim.name);
  out += '\n';
  indent(out, depth);
  out += "{\n";
  for (const auto& [name, attr] : prim.attributes) {
    indent(out, depth + 1);
    if (attr.custom) out += "custom ";
    out += to_string(attr.type);
    out += ' ';
    out += name;
    out += " = ";
    emit_value(out, attr);
    out += '\n';
  }
  for (const Prim& c : prim.children) emit_prim(out, c, depth + 1);
  indent(out, depth);
  out += "}\n";
}

// ---------------------------------------------------------------------------
// Parsing.

class Cursor {
 public:
  Cursor(std::string_view text, std::size_t pos, int line) : text_(text), pos_(pos), line_(line) {}

  [[noreturn]] void fail(const std::string& message) const { fail_at(pos_, message); }
  [[noreturn]] void fail_at(std::size_t pos, const std::string& message) const {
    throw ParseError(message, line_, static_cast<int>(pos) + 1);
  }

  std::size_t pos() const { return pos_; }
  bool done() const { return pos_ >= text_.size(); }
  bool peek(char c) const { return !done() && text_[pos_] == c; }

  bool consume(std::string_view literal) {
    if (text_.substr(pos_).starts_with(literal)) {
      pos_ += literal.size();
      return true;
    }
    return false;
  }

  void expect(std::string_view literal, std::string_view context = {}) {
    if (consume(literal)) return;
    std::string msg = "expected '" + std::string(literal) + "'";
    if (!context.empty()) msg = std::string(context) + ": " + msg;
    fail(msg);
  }

  void expect_end() {
    if (!done()) fail("unexpected trailing text '" + std::string(text_.substr(pos_)) + "'");
  }

  // Characters up to the next space (or end of line).
  std::string_view word() {
    const std::size_t start = pos_;
    while (!done() && text_[pos_] != ' ') ++pos_;
    return text_.substr(start, pos_ - start);
  }

  std::string quoted() {
    if (!consume("\"")) fail("expected a quoted string");
    std::string out;
    while (true) {
      if (done()) fail("unterminated string");
      const char c = text_[pos_];
      if (c == '"') {
        ++pos_;
        return out;
      }
      if (static_cast<unsigned char>(c) < 0x20) fail("control character in string");
      if (c != '\\') {
        out += c;
        ++pos_;
        continue;
      }
      const std::size_t esc = pos_++;
      if (done()) fail("unterminated string");
      switch (text_[pos_++]) {
        case '"': out += '"'; break;
        case '\\': out += '\\'; break;
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        case 'x': {
          unsigned value = 0;
          const std::string_view hex = text_.substr(pos_, 2);
          auto [ptr, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), value, 16);
          if (hex.size() != 2 || ec != std::errc() || ptr != hex.data() + 2)
            fail_at(esc, "malformed \\x escape");
          pos_ += 2;
          out += static_cast<char>(value);
          break;
        }
        default:
          fail_at(esc, "unknown escape sequence");
      }
    }
  }

  std::string_view number_token() {
    const std::size_t start = pos_;
    while (!done() && text_[pos_] != ',' && text_[pos_] != ')' && text_[pos_] != ']' &&
           text_[pos_] != ' ')
      ++pos_;
    return text_.substr(start, pos_ - start);
  }

  double real() {
    const std::size_t start = pos_;
    const std::string_view tok = number_token();
    double value = 0.0;
    if (!parse_real(tok, value)) fail_at(start, "malformed number '" + std::string(tok) + "'");
    return value;
  }

  int integer() {
    const std::size_t start = pos_;
    const std::string_view tok = number_token();
    long long value = 0;
    if (!parse_int(tok, value) || value < std::numeric_limits<int>::min() ||
        value > std::numeric_limits<int>::max())
      fail_at(start, "malformed integer '" + std::string(tok) + "'");
    return static_cast<int>(value);
  }

  Vec3 tuple() {
    Vec3 v;
    expect("(", "malformed tuple");
    v.x() = real();
    expect(", ", "malformed tuple");
    v.y() = real();
    expect(", ", "malformed tuple");
    v.z() = real();
    expect(")", "malformed tuple");
    return v;
  }

  template <typename Item>
  std::vector<Item> list(Item (Cursor::*item)()) {
    std::vector<Item> out;
    expect("[", "malformed list");
    if (consume("]")) return out;
    while (true) {
      out.push_back((this->*item)());
      if (consume("]")) return out;
      expect(", ", "malformed list");
    }
  }

  std::string path() {
    const std::size_t start = pos_;
    expect("<", "malformed path");
    const std::size_t close = text_.find('>', pos_);
    if (close == std::string_view::npos) fail_at(start, "malformed path: missing '>'");
    std::string p(text_.substr(pos_, close - pos_));
    if (!is_prim_path(p)) fail_at(start, "malformed path <" + p + ">");
    pos_ = close + 1;
    return p;
  }

 private:
  std::string_view text_;
  std::size_t pos_;
  int line_;
};

using Position = std::pair<int, int>;  // line, column (1-based)

std::string attr_key(const std::string& prim_path, const std::string& attr) {
  return prim_path + '\n' + attr;
}

class UsdaParser {
 public:
  explicit UsdaParser(std::string_view text) {
    std::size_t start = 0;
    while (start < text.size()) {
      std::size_t end = text.find('\n', start);
      if (end == std::string_view::npos) end = text.size();
      std::string_view line = text.substr(start, end - start);
      if (line.ends_with('\r')) line.remove_suffix(1);
      lines_.push_back(line);
      start = end + 1;
    }
  }

  UsdStage parse() {
    std::size_t i = 0;
    if (lines_.empty() || lines_[0] != "#usda 1.0") throw ParseError("expected '#usda 1.0' header", 1, 1);
    i = 1;
    if (i >= lines_.size() || lines_[i] != "(") throw ParseError("expected '(' opening layer metadata", 2, 1);
    for (++i;; ++i) {
      if (i >= lines_.size()) throw ParseError("unterminated layer metadata", static_cast<int>(i) + 1, 1);
      if (lines_[i] == ")") break;
      parse_meta(i);
    }
    for (++i; i < lines_.size(); ++i) parse_body_line(i);
    if (awaiting_brace_ || !stack_.empty())
      throw ParseError("unexpected end of document: prim '" + paths_.back() + "' is not closed",
                       static_cast<int>(lines_.size()) + 1, 1);

    check_stage_with(stage_, [this](const std::string& prim_path, const std::string& attr,
                                     const std::string& message) {
      Position at{1, 1};
      if (prim_path.empty()) {
        at = default_prim_pos_;
      } else if (!attr.empty() && attr_pos_.count(attr_key(prim_path, attr))) {
        at = attr_pos_.at(attr_key(prim_path, attr));
      } else if (prim_pos_.count(prim_path)) {
        at = prim_pos_.at(prim_path);
      }
      const std::string where = prim_path.empty() ? "" : prim_path + (attr.empty() ? "" : "." + attr) + ": ";
      throw ParseError(where + message, at.first, at.second);
    });
    return std::move(stage_);
  }

 private:
  static std::size_t indentation(std::string_view line) {
    std::size_t n = 0;
    while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
    return n;
  }

  void parse_meta(std::size_t i) {
    const int lineno = static_cast<int>(i) + 1;
    Cursor c(lines_[i], indentation(lines_[i]), lineno);
    if (c.done()) return;
    const std::size_t start = c.pos();
    std::string key;
    if (c.consume("defaultPrim = ")) {
      key = "defaultPrim";
      default_prim_pos_ = {lineno, static_cast<int>(start) + 1};
      stage_.default_prim = c.quoted();
    } else if (c.consume("metersPerUnit = ")) {
      key = "metersPerUnit";
      if (!c.consume("1")) c.fail("metersPerUnit must be 1");
    } else if (c.consume("upAxis = ")) {
      key = "upAxis";
      if (!c.consume("\"Z\"")) c.fail("upAxis must be \"Z\"");
    } else {
      c.fail("unknown layer metadata");
    }
    c.expect_end();
    if (!meta_seen_.insert(key).second) c.fail_at(start, "duplicate layer metadata '" + key + "'");
  }

  std::vector<Prim>& container() { return stack_.empty() ? stage_.root_prims : stack_.back()->children; }

  void parse_body_line(std::size_t i) {
    const int lineno = static_cast<int>(i) + 1;
    const std::string_view line = lines_[i];
    Cursor c(line, indentation(line), lineno);
    if (c.done()) return;  // blank line

    if (awaiting_brace_) {
      c.expect("{", "prim body");
      c.expect_end();
      awaiting_brace_ = false;
      return;
    }
    if (c.consume("def ")) return parse_def(c, lineno);
    if (c.peek('}')) {
      c.expect("}");
      c.expect_end();
      if (stack_.empty()) c.fail_at(c.pos() - 1, "unmatched '}'");
      stack_.pop_back();
      paths_.pop_back();
      return;
    }
    if (c.peek('{')) c.fail("'{' without a prim definition");
    if (stack_.empty()) c.fail("attribute outside of a prim");
    parse_attribute(c, lineno);
  }

  void parse_def(Cursor& c, int lineno) {
    const std::size_t schema_pos = c.pos();
    const std::string_view schema_name = c.word();
    PrimSchema schema;
    try {
      schema = prim_schema_from_string(schema_name);
    } catch (const Error&) {
      c.fail_at(schema_pos, "unknown schema '" + std::string(schema_name) + "'");
    }
    c.expect(" ");
    const std::size_t name_pos = c.pos();
    std::string name = c.quoted();
    c.expect_end();
    if (!is_identifier(name)) c.fail_at(name_pos, "invalid prim name '" + name + "'");
    std::vector<Prim>& siblings = container();
    for (const Prim& s : siblings)
      if (s.name == name) c.fail_at(name_pos, "duplicate sibling name '" + name + "'");

    const std::string path = (paths_.empty() ? "" : paths_.back()) + "/" + name;
    siblings.push_back(Prim{std::move(name), schema, {}, {}});
    stack_.push_back(&siblings.back());
    paths_.push_back(path);
    prim_pos_[path] = {lineno, static_cast<int>(name_pos) + 1};
    awaiting_brace_ = true;
  }

  void parse_attribute(Cursor& c, int lineno) {
    PrimAttribute attr;
    attr.custom = c.consume("custom ");
    const std::size_t type_pos = c.pos();
    const std::string_view type_name = c.word();
    const auto type = attr_type_from_string(type_name);
    if (!type) c.fail_at(type_pos, "unknown attribute type '" + std::string(type_name) + "'");
    attr.type = *type;
    c.expect(" ");
    const std::size_t name_pos = c.pos();
    std::string name(c.word());
    if (!is_attr_name(name)) c.fail_at(name_pos, "invalid attribute name '" + name + "'");
    c.expect(" = ");
    switch (attr.type) {
      case AttrType::kPoint3fArray: attr.value = c.list<Vec3>(&Cursor::tuple); break;
      case AttrType::kIntArray: attr.value = c.list<int>(&Cursor::integer); break;
      case AttrType::kVector3f:
      case AttrType::kPoint3f: attr.value = c.tuple(); break;
      case AttrType::kFloat: attr.value = c.real(); break;
      case AttrType::kString: attr.value = c.quoted(); break;
      case AttrType::kRel: attr.value = c.path(); break;
    }
    c.expect_end();

    Prim& prim = *stack_.back();
    if (prim.attribute(name)) c.fail_at(name_pos, "duplicate attribute '" + name + "'");
    attr_pos_[attr_key(paths_.back(), name)] = {lineno, static_cast<int>(name_pos) + 1};
    prim.attributes.emplace_back(std::move(name), std::move(attr));
  }

  std::vector<std::string_view> lines_;
  UsdStage stage_;
  std::vector<Prim*> stack_;
  std::vector<std::string> paths_;
  bool awaiting_brace_ = false;
  std::set<std::string> meta_seen_;
  Position default_prim_pos_{2, 1};
  std::map<std::string, Position> prim_pos_;
  std::map<std::string, Position> attr_pos_;
};

// ---------------------------------------------------------------------------
// Assembly helpers.

Prim* find_prim_mut(UsdStage& stage, std::string_view path) {
  if (!is_prim_path(path)) return nullptr;
  std::vector<Prim>* level = &stage.root_prims;
  Prim* found = nullptr;
  for (std::string_view name : split_path(path)) {
    auto it = std::find_if(level->begin(), level->end(), [&](const Prim& p) { return p.name == name; });
    if (it == level->end()) return nullptr;
    found = &*it;
    level = &found->children;
  }
  return found;
}

std::string unique_child_name(const std::vector<Prim>& siblings, std::string_view id) {
  const std::string base = sanitize_identifier(id);
  auto taken = [&](const std::string& n) {
    return std::any_of(siblings.begin(), siblings.end(), [&](const Prim& p) { return p.name == n; });
  };
  if (!taken(base)) return base;
  for (int k = 1;; ++k) {
    std::string candidate = base + "_" + std::to_string(k);
    if (!taken(candidate)) return candidate;
  }
}

Prim mesh_prim(std::string name, const TriMesh& mesh, const PartSegment& part) {
  const TriMesh piece = extract_faces(mesh, part.face_indices);
  std::vector<int> counts(piece.faces.size(), 3);
  std::vector<int> indices;
  indices.reserve(piece.faces.size() * 3);
  for (const Face& f : piece.faces) indices.insert(indices.end(), f.begin(), f.end());
  Prim prim{std::move(name), PrimSchema::kMesh, {}, {}};
  prim.set("points", {AttrType::kPoint3fArray, false, piece.vertices});
  prim.set("faceVertexCounts", {AttrType::kIntArray, false, std::move(counts)});
  prim.set("faceVertexIndices", {AttrType::kIntArray, false, std::move(indices)});
  prim.set("artic:label", string_attr(part.label));
  prim.set("artic:role", string_attr(std::string(to_string(part.role))));
  return prim;
}

std::optional<std::string> rebase(std::string_view path, std::string_view old_root,
                                  std::string_view new_root) {
  if (path == old_root) return std::string(new_root);
  if (path.starts_with(old_root) && path.size() > old_root.size() && path[old_root.size()] == '/')
    return std::string(new_root) + std::string(path.substr(old_root.size()));
  return std::nullopt;
}

void rebase_subtree(Prim& prim, const std::string& old_prefix, const std::string& new_path,
                    std::string_view old_root, std::string_view new_root,
                    std::vector<std::string>& warnings) {
  std::vector<std::pair<std::string, PrimAttribute>> kept;
  for (auto& [name, attr] : prim.attributes) {
    if (attr.type == AttrType::kRel) {
      auto& target = std::get<std::string>(attr.value);
      auto moved = rebase(target, old_root, new_root);
      if (!moved) {
        warnings.push_back("dropped " + name + " on " + old_prefix + ": <" + target +
                           "> is outside the extracted object");
        continue;
      }
      target = *moved;
    }
    kept.emplace_back(std::move(name), std::move(attr));
  }
  prim.attributes = std::move(kept);

  std::vector<Prim> children;
  for (Prim& c : prim.children) {
    const std::string child_old = old_prefix + "/" + c.name;
    if (is_joint(c.schema)) {
      const auto* b0 = c.attribute(kBody0);
      const auto* b1 = c.attribute(kBody1);
      auto outside = [&](const PrimAttribute* a) {
        return a && !rebase(std::get<std::string>(a->value), old_root, new_root);
      };
      if (outside(b0) || outside(b1)) {
        const PrimAttribute* culprit = outside(b0) ? b0 : b1;
        warnings.push_back("dropped joint " + child_old + ": body <" +
                           std::get<std::string>(culprit->value) + "> is outside the extracted object");
        continue;
      }
    }
    rebase_subtree(c, child_old, new_path + "/" + c.name, old_root, new_root, warnings);
    children.push_back(std::move(c));
  }
  prim.children = std::move(children);
}

void collect_joints(const Prim& prim, const std::string& parent,
                    std::vector<std::pair<std::string, JointSpec>>& out) {
  const std::string path = parent + "/" + prim.name;
  if (is_joint(prim.schema)) out.emplace_back(path, read_joint(prim));
  for (const Prim& c : prim.children) collect_joints(c, path, out);
}

}  // namespace

// ---------------------------------------------------------------------------

std::string_view to_string(PrimSchema schema) {
  switch (schema) {
    case PrimSchema::kXform: return "Xform";
    case PrimSchema::kMesh: return "Mesh";
    case PrimSchema::kRevoluteJoint: return "PhysicsRevoluteJoint";
    case PrimSchema::kPrismaticJoint: return "PhysicsPrismaticJoint";
    case PrimSchema::kFixedJoint: return "PhysicsFixedJoint";
  }
  return "?";
}

PrimSchema prim_schema_from_string(std::string_view text) {
  for (PrimSchema s : {PrimSchema::kXform, PrimSchema::kMesh, PrimSchema::kRevoluteJoint,
                       PrimSchema::kPrismaticJoint, PrimSchema::kFixedJoint})
    if (to_string(s) == text) return s;
  throw Error("unknown schema '" + std::string(text) + "'");
}

bool is_joint(PrimSchema schema) {
  return schema == PrimSchema::kRevoluteJoint || schema == PrimSchema::kPrismaticJoint ||
         schema == PrimSchema::kFixedJoint;
}

std::string_view to_string(AttrType type) {
  switch (type) {
    case AttrType::kPoint3fArray: return "point3f[]";
    case AttrType::kIntArray: return "int[]";
    case AttrType::kVector3f: return "vector3f";
    case AttrType::kPoint3f: return "point3f";
    case AttrType::kFloat: return "float";
    case AttrType::kString: return "string";
    case AttrType::kRel: return "rel";
  }
  return "?";
}

std::optional<AttrType> attr_type_from_string(std::string_view text) {
  for (AttrType t : {AttrType::kPoint3fArray, AttrType::kIntArray, AttrType::kVector3f,
                     AttrType::kPoint3f, AttrType::kFloat, AttrType::kString, AttrType::kRel})
    if (to_string(t) == text) return t;
  return std::nullopt;
}

bool PrimAttribute::well_typed() const {
  switch (type) {
    case AttrType::kPoint3fArray: return std::holds_alternative<std::vector<Vec3>>(value);
    case AttrType::kIntArray: return std::holds_alternative<std::vector<int>>(value);
    case AttrType::kVector3f:
    case AttrType::kPoint3f: return std::holds_alternative<Vec3>(value);
    case AttrType::kFloat: return std::holds_alternative<double>(value);
    case AttrType::kString:
    case AttrType::kRel: return std::holds_alternative<std::string>(value);
  }
  return false;
}

const PrimAttribute* Prim::attribute(std::string_view attr_name) const {
  for (const auto& [name, attr] : attributes)
    if (name == attr_name) return &attr;
  return nullptr;
}

void Prim::set(std::string attr_name, PrimAttribute attr) {
  for (auto& [name, existing] : attributes)
    if (name == attr_name) {
      existing = std::move(attr);
      return;
    }
  attributes.emplace_back(std::move(attr_name), std::move(attr));
}

const Prim* Prim::child(std::string_view child_name) const {
  for (const Prim& c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

Prim* Prim::child(std::string_view child_name) {
  for (Prim& c : children)
    if (c.name == child_name) return &c;
  return nullptr;
}

PrimSchema joint_schema(JointKind kind) {
  switch (kind) {
    case JointKind::kRevolute: return PrimSchema::kRevoluteJoint;
    case JointKind::kPrismatic: return PrimSchema::kPrismaticJoint;
    case JointKind::kFixed: return PrimSchema::kFixedJoint;
  }
  return PrimSchema::kFixedJoint;
}

Prim make_joint_prim(std::string name, const JointSpec& spec) {
  Prim prim{std::move(name), joint_schema(spec.kind), {}, {}};
  prim.set(std::string(kBody0), rel(spec.body0));
  prim.set(std::string(kBody1), rel(spec.body1));
  if (spec.kind == JointKind::kFixed) {
    if (!spec.attachment_point) throw ValidationError("fixed joint needs an attachment point");
    prim.set(std::string(kAttachment), {AttrType::kPoint3f, true, *spec.attachment_point});
    return prim;
  }
  if (!spec.axis || !spec.lower || !spec.upper)
    throw ValidationError("movable joint needs axis and limits");
  prim.set(std::string(kAxis), {AttrType::kVector3f, true, *spec.axis});
  if (spec.kind == JointKind::kRevolute) {
    if (!spec.origin) throw ValidationError("revolute joint needs an origin");
    prim.set(std::string(kOrigin), {AttrType::kPoint3f, true, *spec.origin});
  }
  prim.set(std::string(kLower), real_attr(*spec.lower));
  prim.set(std::string(kUpper), real_attr(*spec.upper));
  if (spec.interactable) prim.set(std::string(kInteractable), rel(*spec.interactable, true));
  return prim;
}

JointSpec read_joint(const Prim& prim) {
  if (!is_joint(prim.schema)) throw ValidationError("'" + prim.name + "' is not a joint prim");
  const auto shape = joint_shape(prim.schema);
  for (const auto& [name, attr] : prim.attributes) {
    auto it = shape.find(name);
    if (it == shape.end())
      throw ValidationError("unexpected attribute '" + name + "' on " + std::string(to_string(prim.schema)));
    if (it->second.type != attr.type || it->second.custom != attr.custom)
      throw ValidationError("attribute '" + name + "' must be declared as " +
                            (it->second.custom ? "custom " : "") + std::string(to_string(it->second.type)));
    if (!attr.well_typed()) throw ValidationError("attribute '" + name + "' has a mistyped value");
  }
  for (const auto& [name, s] : shape)
    if (s.required && !prim.attribute(name))
      throw ValidationError("missing attribute '" + std::string(name) + "' on " +
                            std::string(to_string(prim.schema)));

  auto vec = [&](std::string_view n) { return std::get<Vec3>(prim.attribute(n)->value); };
  auto str = [&](std::string_view n) { return std::get<std::string>(prim.attribute(n)->value); };
  auto num = [&](std::string_view n) { return std::get<double>(prim.attribute(n)->value); };

  JointSpec spec;
  spec.body0 = str(kBody0);
  spec.body1 = str(kBody1);
  switch (prim.schema) {
    case PrimSchema::kFixedJoint:
      spec.kind = JointKind::kFixed;
      spec.attachment_point = vec(kAttachment);
      return spec;
    case PrimSchema::kRevoluteJoint:
      spec.kind = JointKind::kRevolute;
      spec.origin = vec(kOrigin);
      break;
    default:
      spec.kind = JointKind::kPrismatic;
      break;
  }
  spec.axis = vec(kAxis);
  spec.lower = num(kLower);
  spec.upper = num(kUpper);
  if (prim.attribute(kInteractable)) spec.interactable = str(kInteractable);
  return spec;
}

bool is_identifier(std::string_view name) {
  if (name.empty() || !is_ident_start(name.front())) return false;
  return std::all_of(name.begin(), name.end(), is_ident_char);
}

std::string sanitize_identifier(std::string_view id) {
  std::string out;
  out.reserve(id.size() + 1);
  for (char c : id) out += is_ident_char(c) ? c : '_';
  if (out.empty() || !is_ident_start(out.front())) out.insert(out.begin(), '_');
  return out;
}

const Prim* find_prim(const UsdStage& stage, std::string_view path) {
  return find_prim_mut(const_cast<UsdStage&>(stage), path);
}

std::vector<std::pair<std::string, JointSpec>> stage_joints(const UsdStage& stage) {
  std::vector<std::pair<std::string, JointSpec>> out;
  for (const Prim& p : stage.root_prims) collect_joints(p, "", out);
  return out;
}

void check_stage(const UsdStage& stage) {
  check_stage_with(stage, [](const std::string& prim_path, const std::string& attr,
                             const std::string& message) {
    std::string where = prim_path.empty() ? "stage" : prim_path;
    if (!attr.empty()) where += "." + attr;
    throw ValidationError(where + ": " + message);
  });
}

UsdStage assemble_stage(const TriMesh& mesh, const SceneAnnotation& annotation) {
  check_annotation(annotation, mesh.faces.size());

  UsdStage stage;
  stage.default_prim = "World";
  stage.root_prims.push_back(Prim{"World", PrimSchema::kXform, {}, {}});

  std::map<std::string, std::string, std::less<>> path_of;    // object or part id -> prim path
  std::map<std::string, std::string, std::less<>> object_of;  // object or part id -> object id

  for (const ObjectInstance& object : annotation.objects) {
    Prim& world = stage.root_prims.front();
    Prim xform{unique_child_name(world.children, object.id), PrimSchema::kXform, {}, {}};
    xform.set("artic:label", string_attr(object.label));
    if (object.mass) xform.set("physics:mass", real_attr(*object.mass));
    const std::string object_path = "/World/" + xform.name;
    world.children.push_back(std::move(xform));
    path_of[object.id] = object_path;
    object_of[object.id] = object.id;

    // Parts in declaration order; a part's prim is created once its parent exists.
    std::vector<const PartSegment*> pending;
    for (const PartSegment& part : object.parts) pending.push_back(&part);
    while (!pending.empty()) {
      std::vector<const PartSegment*> next;
      for (const PartSegment* part : pending) {
        std::string container_path = object_path;
        if (part->parent_part) {
          auto it = path_of.find(*part->parent_part);
          if (it == path_of.end()) {
            next.push_back(part);
            continue;
          }
          container_path = it->second;
        }
        Prim* container = find_prim_mut(stage, container_path);
        Prim prim = mesh_prim(unique_child_name(container->children, part->id), mesh, *part);
        path_of[part->id] = container_path + "/" + prim.name;
        object_of[part->id] = object.id;
        container->children.push_back(std::move(prim));
      }
      if (next.size() == pending.size())
        throw ValidationError("object '" + object.id + "': part hierarchy is not a forest");
      pending = std::move(next);
    }

    for (const PartSegment& part : object.parts) {
      if (!part.articulation) continue;
      const Articulation& a = *part.articulation;
      JointSpec spec;
      spec.kind = a.type == MotionType::kRotation ? JointKind::kRevolute : JointKind::kPrismatic;
      spec.body0 = part.parent_part ? path_of.at(*part.parent_part) : object_path;
      spec.body1 = path_of.at(part.id);
      spec.axis = a.axis;
      if (spec.kind == JointKind::kRevolute) spec.origin = a.origin;
      spec.lower = a.lower;
      spec.upper = a.upper;
      for (const PartSegment& other : object.parts)
        if (other.interactable_for == part.id) {
          spec.interactable = path_of.at(other.id);
          break;
        }
      const std::string container_path = spec.body1.substr(0, spec.body1.rfind('/'));
      Prim* container = find_prim_mut(stage, container_path);
      container->children.push_back(
          make_joint_prim(unique_child_name(container->children, part.id + "_joint"), spec));
    }
  }

  for (std::size_t i = 0; i < annotation.fixtures.size(); ++i) {
    const Fixture& fx = annotation.fixtures[i];
    const std::string where = "$.fixtures[" + std::to_string(i) + "]";
    auto item = path_of.find(fx.id);
    if (item == path_of.end()) throw ValidationError(where + ".id: unresolved reference '" + fx.id + "'");
    auto anchor = path_of.find(fx.attached_to);
    if (anchor == path_of.end())
      throw ValidationError(where + ".attached_to: unresolved reference '" + fx.attached_to + "'");
    JointSpec spec;
    spec.kind = JointKind::kFixed;
    spec.body0 = anchor->second;
    spec.body1 = item->second;
    spec.attachment_point = fx.attachment_point;
    Prim* owner = find_prim_mut(stage, path_of.at(object_of.at(fx.id)));
    owner->children.push_back(
        make_joint_prim(unique_child_name(owner->children, fx.id + "_fixed_joint"), spec));
  }
  return stage;
}

std::string emit_usda(const UsdStage& stage) {
  std::string out = "#usda 1.0\n(\n";
  if (stage.default_prim) {
    out += "    defaultPrim = ";
    emit_quoted(out, *stage.default_prim);
    out += '\n';
  }
  out += "    metersPerUnit = 1\n    upAxis = \"Z\"\n)\n";
  for (const Prim& p : stage.root_prims) emit_prim(out, p, 0);
  return out;
}

UsdStage parse_usda(std::string_view text) { return UsdaParser(text).parse(); }

ExtractedObject extract_object(const UsdStage& stage, std::string_view object_path) {
  const Prim* source = find_prim(stage, object_path);
  if (!source) throw Error("prim not found: " + std::string(object_path));
  ExtractedObject result;
  Prim copy = *source;
  const std::string new_root = "/" + copy.name;
  rebase_subtree(copy, std::string(object_path), new_root, object_path, new_root, result.warnings);
  result.stage.default_prim = copy.name;
  result.stage.root_prims.push_back(std::move(copy));
  return result;
}

}  // namespace artic
