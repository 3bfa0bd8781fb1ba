#include "sphap/mesh.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

namespace sphap {

namespace {

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

MeshFormat format_from_extension(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (ext == ".obj") return MeshFormat::obj;
  if (ext == ".off") return MeshFormat::off;
  throw ParseError("cannot infer mesh format from extension '" + ext + "'");
}

[[noreturn]] void parse_fail(std::size_t line, const std::string& what) {
  throw ParseError("parse error at line " + std::to_string(line) + ": " + what);
}

double parse_double(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) parse_fail(line, "bad number '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "bad number '" + token + "'");
  }
}

long parse_long(const std::string& token, std::size_t line) {
  try {
    std::size_t used = 0;
    const long v = std::stol(token, &used);
    if (used != token.size()) parse_fail(line, "bad integer '" + token + "'");
    return v;
  } catch (const std::logic_error&) {
    parse_fail(line, "bad integer '" + token + "'");
  }
}

std::vector<std::string> tokens_of(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

std::string strip_comment(const std::string& line) {
  const auto hash = line.find('#');
  return hash == std::string::npos ? line : line.substr(0, hash);
}

SimplicialSurface parse_obj(const std::string& text, TopologyCheck check) {
  std::vector<Vector3> verts;
  std::vector<std::array<int, 3>> faces;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = tokens_of(strip_comment(line));
    if (tok.empty()) continue;
    if (tok[0] == "v") {
      if (tok.size() < 4) parse_fail(lineno, "vertex needs 3 coordinates");
      verts.emplace_back(parse_double(tok[1], lineno), parse_double(tok[2], lineno),
                         parse_double(tok[3], lineno));
    } else if (tok[0] == "f") {
      if (tok.size() != 4) {
        throw ParseError("non-triangle face at line " + std::to_string(lineno) + " (" +
                         std::to_string(tok.size() - 1) + " vertices)");
      }
      std::array<int, 3> f{};
      for (int c = 0; c < 3; ++c) {
        // v, v/vt, v//vn, v/vt/vn
        const std::string head = tok[c + 1].substr(0, tok[c + 1].find('/'));
        long idx = parse_long(head, lineno);
        if (idx < 0) idx += static_cast<long>(verts.size()) + 1;  // relative index
        if (idx < 1) parse_fail(lineno, "face index out of range");
        f[c] = static_cast<int>(idx - 1);
      }
      faces.push_back(f);
    }
    // vt, vn, o, g, s, usemtl, mtllib: ignored
  }
  MatrixX3 V(verts.size(), 3);
  for (std::size_t i = 0; i < verts.size(); ++i) V.row(i) = verts[i].transpose();
  FaceMatrix F(faces.size(), 3);
  for (std::size_t t = 0; t < faces.size(); ++t) F.row(t) << faces[t][0], faces[t][1], faces[t][2];
  return SimplicialSurface(std::move(V), std::move(F), check);
}

SimplicialSurface parse_off(const std::string& text, TopologyCheck check) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;

  auto next_tokens = [&]() -> std::vector<std::string> {
    while (std::getline(in, line)) {
      ++lineno;
      auto tok = tokens_of(strip_comment(line));
      if (!tok.empty()) return tok;
    }
    parse_fail(lineno, "unexpected end of file");
  };

  auto header = next_tokens();
  if (header[0] != "OFF") parse_fail(lineno, "missing OFF header");
  std::vector<std::string> counts(header.begin() + 1, header.end());
  if (counts.empty()) counts = next_tokens();
  if (counts.size() < 2) parse_fail(lineno, "OFF header needs vertex and face counts");
  const long nv = parse_long(counts[0], lineno);
  const long nf = parse_long(counts[1], lineno);
  if (nv <= 0 || nf <= 0) parse_fail(lineno, "OFF counts must be positive");

  MatrixX3 V(nv, 3);
  for (long i = 0; i < nv; ++i) {
    const auto tok = next_tokens();
    if (tok.size() < 3) parse_fail(lineno, "vertex needs 3 coordinates");
    for (int c = 0; c < 3; ++c) V(i, c) = parse_double(tok[c], lineno);
  }
  FaceMatrix F(nf, 3);
  for (long t = 0; t < nf; ++t) {
    const auto tok = next_tokens();
    const long k = parse_long(tok[0], lineno);
    if (k != 3) {
      throw ParseError("non-triangle face at line " + std::to_string(lineno) + " (" +
                       std::to_string(k) + " vertices)");
    }
    if (tok.size() < 4) parse_fail(lineno, "face line too short");
    for (int c = 0; c < 3; ++c) {
      const long idx = parse_long(tok[c + 1], lineno);
      if (idx < 0 || idx >= nv) parse_fail(lineno, "face index out of range");
      F(t, c) = static_cast<int>(idx);
    }
  }
  return SimplicialSurface(std::move(V), std::move(F), check);
}

}  // namespace

SimplicialSurface parse_mesh(const std::string& text, MeshFormat format, TopologyCheck check) {
  switch (format) {
    case MeshFormat::obj:
      return parse_obj(text, check);
    case MeshFormat::off:
      return parse_off(text, check);
    case MeshFormat::automatic:
      break;
  }
  throw ContractError("parse_mesh needs an explicit format");
}

SimplicialSurface load_mesh(const std::filesystem::path& path, MeshFormat format,
                            TopologyCheck check) {
  if (format == MeshFormat::automatic) format = format_from_extension(path);
  return parse_mesh(read_file(path), format, check);
}

void save_mesh(const std::filesystem::path& path, const MatrixX3& vertices,
               const FaceMatrix& faces, MeshFormat format) {
  if (format == MeshFormat::automatic) format = format_from_extension(path);
  std::ofstream out(path);
  if (!out) throw Error("cannot write file: " + path.string());
  out << std::setprecision(17);
  if (format == MeshFormat::off) {
    out << "OFF\n" << vertices.rows() << ' ' << faces.rows() << " 0\n";
    for (Index i = 0; i < vertices.rows(); ++i)
      out << vertices(i, 0) << ' ' << vertices(i, 1) << ' ' << vertices(i, 2) << '\n';
    for (Index t = 0; t < faces.rows(); ++t)
      out << "3 " << faces(t, 0) << ' ' << faces(t, 1) << ' ' << faces(t, 2) << '\n';
  } else {
    for (Index i = 0; i < vertices.rows(); ++i)
      out << "v " << vertices(i, 0) << ' ' << vertices(i, 1) << ' ' << vertices(i, 2) << '\n';
    for (Index t = 0; t < faces.rows(); ++t)
      out << "f " << faces(t, 0) + 1 << ' ' << faces(t, 1) + 1 << ' ' << faces(t, 2) + 1 << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

void save_mesh(const std::filesystem::path& path, const SimplicialSurface& surface,
               MeshFormat format) {
  save_mesh(path, surface.vertices(), surface.faces(), format);
}

std::vector<LandmarkPair> parse_landmarks(const std::string& text, Index source_vertices,
                                          Index target_vertices) {
  std::vector<LandmarkPair> pairs;
  std::set<std::pair<int, int>> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto tok = tokens_of(strip_comment(line));
    if (tok.empty()) continue;
    if (tok.size() != 2) parse_fail(lineno, "landmark line needs exactly two indices");
    const long p = parse_long(tok[0], lineno);
    const long q = parse_long(tok[1], lineno);
    if (p < 1 || p > source_vertices) parse_fail(lineno, "source landmark index out of range");
    if (q < 1 || q > target_vertices) parse_fail(lineno, "target landmark index out of range");
    LandmarkPair pair{static_cast<int>(p - 1), static_cast<int>(q - 1)};
    if (!seen.insert({pair.source_index, pair.target_index}).second)
      parse_fail(lineno, "duplicate landmark pair");
    pairs.push_back(pair);
  }
  return pairs;
}

std::vector<LandmarkPair> load_landmarks(const std::filesystem::path& path,
                                         Index source_vertices, Index target_vertices) {
  return parse_landmarks(read_file(path), source_vertices, target_vertices);
}

}  // namespace sphap
