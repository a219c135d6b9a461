#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "miscible/mesh.hpp"

namespace miscible {

namespace {

class LineReader {
public:
    explicit LineReader(std::istream& in) : in_(in) {}

    // Next non-blank line; false at end of input.
    bool next(std::string& line)
    {
        while (std::getline(in_, line)) {
            ++number_;
            if (line.find_first_not_of(" \t\r") != std::string::npos) {
                return true;
            }
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) const
    {
        throw MeshError("line " + std::to_string(number_) + ": " + what);
    }

    [[nodiscard]] int line_number() const { return number_; }

private:
    std::istream& in_;
    int number_ = 0;
};

int read_section_header(LineReader& reader, const std::string& name)
{
    std::string line;
    if (!reader.next(line)) {
        if (name == "#vertices") {
            throw MeshError("no vertices");
        }
        reader.fail("missing section " + name);
    }
    std::istringstream ss(line);
    std::string tag;
    long long count = -1;
    ss >> tag >> count;
    if (tag != name) {
        reader.fail("expected section " + name + ", found '" + tag + "'");
    }
    if (!ss || count < 0) {
        reader.fail("section " + name + " needs a non-negative entry count");
    }
    std::string trailing;
    if (ss >> trailing) {
        reader.fail("unexpected token '" + trailing + "' after section header");
    }
    return static_cast<int>(count);
}

template <typename T, std::size_t N>
std::array<T, N> read_row(LineReader& reader, const std::string& what)
{
    std::string line;
    if (!reader.next(line)) {
        reader.fail("unexpected end of file while reading " + what);
    }
    std::istringstream ss(line);
    std::array<T, N> row{};
    for (auto& value : row) {
        if (!(ss >> value)) {
            reader.fail("malformed " + what + ": '" + line + "'");
        }
    }
    std::string trailing;
    if (ss >> trailing) {
        reader.fail("unexpected token '" + trailing + "' in " + what);
    }
    return row;
}

}  // namespace

void write_mesh(const Mesh& mesh, std::ostream& out)
{
    out << std::setprecision(17);
    out << "#vertices " << mesh.n_vertices() << '\n';
    for (const Vec2& p : mesh.vertices()) {
        out << p.x << ' ' << p.y << '\n';
    }
    out << "#triangles " << mesh.n_triangles() << '\n';
    for (const auto& t : mesh.triangles()) {
        out << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    }
    out << "#boundary " << mesh.boundary_edges().size() << '\n';
    for (int e : mesh.boundary_edges()) {
        out << mesh.edge(e)[0] << ' ' << mesh.edge(e)[1] << '\n';
    }
}

Mesh read_mesh(std::istream& in)
{
    LineReader reader(in);

    const int nv = read_section_header(reader, "#vertices");
    if (nv == 0) {
        throw MeshError("no vertices");
    }
    std::vector<Vec2> vertices(nv);
    for (int v = 0; v < nv; ++v) {
        const auto xy = read_row<double, 2>(reader, "vertex " + std::to_string(v));
        if (!std::isfinite(xy[0]) || !std::isfinite(xy[1])) {
            reader.fail("vertex " + std::to_string(v) + " has a non-finite coordinate");
        }
        vertices[v] = {xy[0], xy[1]};
    }

    const int nt = read_section_header(reader, "#triangles");
    std::vector<std::array<int, 3>> triangles(nt);
    for (int t = 0; t < nt; ++t) {
        triangles[t] = read_row<int, 3>(reader, "triangle " + std::to_string(t));
        for (int v : triangles[t]) {
            if (v < 0 || v >= nv) {
                reader.fail("triangle " + std::to_string(t) + " references vertex " + std::to_string(v) +
                            " out of range [0, " + std::to_string(nv) + ")");
            }
        }
    }

    const int nb = read_section_header(reader, "#boundary");
    std::vector<std::array<int, 2>> boundary(nb);
    for (int b = 0; b < nb; ++b) {
        auto pair = read_row<int, 2>(reader, "boundary edge " + std::to_string(b));
        if (pair[0] > pair[1]) {
            std::swap(pair[0], pair[1]);
        }
        boundary[b] = pair;
    }
    std::string extra;
    if (reader.next(extra)) {
        reader.fail("unexpected content after #boundary section");
    }

    Mesh mesh(std::move(vertices), std::move(triangles));

    std::vector<std::array<int, 2>> actual;
    for (int e : mesh.boundary_edges()) {
        actual.push_back(mesh.edge(e));
    }
    std::sort(actual.begin(), actual.end());
    for (std::size_t b = 0; b < boundary.size(); ++b) {
        if (!std::binary_search(actual.begin(), actual.end(), boundary[b])) {
            throw MeshError("boundary edge " + std::to_string(b) + " (" + std::to_string(boundary[b][0]) +
                            ", " + std::to_string(boundary[b][1]) +
                            ") is not on the boundary of the triangulation");
        }
    }
    if (boundary.size() != actual.size()) {
        throw MeshError("#boundary lists " + std::to_string(boundary.size()) +
                        " edges but the triangulation has " + std::to_string(actual.size()));
    }
    return mesh;
}

void save_mesh(const Mesh& mesh, const std::filesystem::path& path)
{
    std::ofstream out(path);
    if (!out) {
        throw MeshError("cannot open " + path.string() + " for writing");
    }
    write_mesh(mesh, out);
    if (!out) {
        throw MeshError("failed writing " + path.string());
    }
}

Mesh load_mesh(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw MeshError("cannot open " + path.string());
    }
    return read_mesh(in);
}

}  // namespace miscible
