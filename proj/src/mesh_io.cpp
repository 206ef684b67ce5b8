#include <algorithm>
#include <cctype>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "isomush/error.hpp"
#include "isomush/mesh.hpp"

namespace isomush {

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string origin) : in_(in), origin_(std::move(origin)) {}

  // Next non-empty line with '#' comments stripped; false at end of input.
  bool next(std::string& line) {
    while (std::getline(in_, line)) {
      ++line_no_;
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      if (std::any_of(line.begin(), line.end(), [](unsigned char ch) { return !std::isspace(ch); })) return true;
    }
    return false;
  }

  std::string require(const char* what) {
    std::string line;
    if (!next(line)) fail(std::string("unexpected end of file while reading ") + what);
    return line;
  }

  [[noreturn]] void fail(const std::string& what) const {
    std::ostringstream msg;
    msg << origin_ << ":" << line_no_ << ": " << what;
    throw io_error(msg.str());
  }

 private:
  std::istream& in_;
  std::string origin_;
  int line_no_ = 0;
};

Shape make_shape(Vertices vertices, Faces faces, const std::string& origin) {
  try {
    Shape shape(std::move(vertices), std::move(faces));
    shape.require_connected();
    return shape;
  } catch (const Error& e) {
    throw io_error(origin + ": " + e.what());
  }
}

void read_face(LineReader& reader, const std::string& line, int f, Faces& faces) {
  std::istringstream ls(line);
  int count = 0;
  if (!(ls >> count)) reader.fail("cannot parse face " + std::to_string(f));
  if (count != 3) reader.fail("face " + std::to_string(f) + " has " + std::to_string(count) + " vertices; only triangles are supported");
  for (int c = 0; c < 3; ++c) {
    if (!(ls >> faces(f, c))) reader.fail("cannot parse index " + std::to_string(c) + " of face " + std::to_string(f));
  }
}

}  // namespace

MeshFormat format_from_path(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".off") return MeshFormat::kOff;
  if (ext == ".ply") return MeshFormat::kPlyAscii;
  throw usage_error("unknown mesh extension '" + ext + "' for " + path.string() + " (expected .off or .ply)");
}

Shape parse_off(std::istream& in, const std::string& origin) {
  LineReader reader(in, origin);
  std::string line = reader.require("OFF header");
  std::istringstream header(line);
  std::string magic;
  header >> magic;
  if (magic != "OFF" && magic != "COFF") reader.fail("expected OFF header, got '" + magic + "'");

  long nv = -1, nf = -1;
  if (!(header >> nv >> nf)) {
    std::istringstream counts(reader.require("OFF counts"));
    if (!(counts >> nv >> nf)) reader.fail("cannot parse vertex/face counts");
  }
  if (nv <= 0 || nf < 0) reader.fail("invalid vertex/face counts");

  Vertices vertices(nv, 3);
  for (long v = 0; v < nv; ++v) {
    std::istringstream ls(reader.require("vertex"));
    if (!(ls >> vertices(v, 0) >> vertices(v, 1) >> vertices(v, 2))) {
      reader.fail("cannot parse vertex " + std::to_string(v));
    }
  }
  Faces faces(nf, 3);
  for (long f = 0; f < nf; ++f) read_face(reader, reader.require("face"), static_cast<int>(f), faces);
  return make_shape(std::move(vertices), std::move(faces), origin);
}

Shape parse_ply_ascii(std::istream& in, const std::string& origin) {
  LineReader reader(in, origin);
  if (reader.require("PLY magic").find("ply") == std::string::npos) reader.fail("missing 'ply' magic");

  struct Element {
    std::string name;
    long count = 0;
    std::vector<std::string> properties;
  };
  std::vector<Element> elements;
  bool ascii = false;
  for (;;) {
    std::istringstream ls(reader.require("PLY header"));
    std::string keyword;
    ls >> keyword;
    if (keyword == "end_header") break;
    if (keyword == "format") {
      std::string kind;
      ls >> kind;
      ascii = kind == "ascii";
    } else if (keyword == "element") {
      Element e;
      if (!(ls >> e.name >> e.count)) reader.fail("malformed element line");
      elements.push_back(e);
    } else if (keyword == "property") {
      if (elements.empty()) reader.fail("property before any element");
      std::string type, name;
      ls >> type;
      if (type == "list") {
        std::string count_type, item_type;
        ls >> count_type >> item_type;
      }
      ls >> name;
      elements.back().properties.push_back(name);
    }
  }
  if (!ascii) reader.fail("only ASCII PLY is supported");

  Vertices vertices;
  Faces faces;
  bool have_vertices = false;
  for (const auto& e : elements) {
    if (e.name == "vertex") {
      const auto find = [&](const char* p) {
        const auto it = std::find(e.properties.begin(), e.properties.end(), p);
        if (it == e.properties.end()) reader.fail(std::string("vertex element lacks property ") + p);
        return static_cast<int>(it - e.properties.begin());
      };
      const int ix = find("x"), iy = find("y"), iz = find("z");
      vertices.resize(e.count, 3);
      std::vector<double> row(e.properties.size());
      for (long v = 0; v < e.count; ++v) {
        std::istringstream ls(reader.require("vertex"));
        for (auto& value : row) {
          if (!(ls >> value)) reader.fail("cannot parse vertex " + std::to_string(v));
        }
        vertices.row(v) << row[ix], row[iy], row[iz];
      }
      have_vertices = true;
    } else if (e.name == "face") {
      faces.resize(e.count, 3);
      for (long f = 0; f < e.count; ++f) read_face(reader, reader.require("face"), static_cast<int>(f), faces);
    } else {
      for (long skip = 0; skip < e.count; ++skip) reader.require(e.name.c_str());
    }
  }
  if (!have_vertices) reader.fail("no vertex element");
  return make_shape(std::move(vertices), std::move(faces), origin);
}

Shape load_mesh(const std::filesystem::path& path, MeshFormat format) {
  std::ifstream in(path);
  if (!in) throw io_error("cannot open mesh file " + path.string());
  return format == MeshFormat::kOff ? parse_off(in, path.string()) : parse_ply_ascii(in, path.string());
}

Shape load_mesh(const std::filesystem::path& path) { return load_mesh(path, format_from_path(path)); }

void save_mesh(const std::filesystem::path& path, const Shape& shape, MeshFormat format, const Colors* colors) {
  if (colors && colors->rows() != shape.num_vertices()) {
    throw usage_error("color count does not match vertex count for " + path.string());
  }
  std::ofstream out(path);
  if (!out) throw io_error("cannot write mesh file " + path.string());
  out << std::setprecision(std::numeric_limits<double>::max_digits10);

  const auto& V = shape.vertices();
  const auto& F = shape.faces();
  const auto write_color = [&](int v) {
    if (colors) out << ' ' << int((*colors)(v, 0)) << ' ' << int((*colors)(v, 1)) << ' ' << int((*colors)(v, 2));
  };
  if (format == MeshFormat::kOff) {
    out << (colors ? "COFF\n" : "OFF\n") << V.rows() << ' ' << F.rows() << " 0\n";
    for (int v = 0; v < V.rows(); ++v) {
      out << V(v, 0) << ' ' << V(v, 1) << ' ' << V(v, 2);
      write_color(v);
      if (colors) out << " 255";
      out << '\n';
    }
  } else {
    out << "ply\nformat ascii 1.0\nelement vertex " << V.rows()
        << "\nproperty double x\nproperty double y\nproperty double z\n";
    if (colors) out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
    out << "element face " << F.rows() << "\nproperty list uchar int vertex_indices\nend_header\n";
    for (int v = 0; v < V.rows(); ++v) {
      out << V(v, 0) << ' ' << V(v, 1) << ' ' << V(v, 2);
      write_color(v);
      out << '\n';
    }
  }
  for (int f = 0; f < F.rows(); ++f) out << "3 " << F(f, 0) << ' ' << F(f, 1) << ' ' << F(f, 2) << '\n';
  if (!out) throw io_error("failed while writing " + path.string());
}

}  // namespace isomush
