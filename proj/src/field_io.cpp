#include "field_io.hpp"

#include "common.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace parakkt {

namespace {

constexpr const char* magic = "PARAKKT-FIELD v1";

[[noreturn]] void io_error(const std::string& what)
{
    fail(ErrorKind::io, "field file: " + what);
}

std::vector<std::string> tokens(const std::string& line)
{
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string t;
    while (is >> t)
        out.push_back(t);
    return out;
}

template <class T>
T parse_token(const std::string& tok, const char* what)
{
    T v{};
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size())
        io_error(std::string("malformed ") + what + " '" + tok + "'");
    return v;
}

bool next_line(std::istream& in, std::string& line)
{
    if (!std::getline(in, line))
        return false;
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    return true;
}

} // namespace

void write_field(std::ostream& out, const Field& field)
{
    const Grid& g = field.grid();
    out << magic << '\n';
    out << g.space.dim() << ' ' << g.space.nodes(0);
    if (g.space.dim() == 2)
        out << ' ' << g.space.nodes(1);
    out << ' ' << g.levels() << '\n';
    out << format17(g.space.extent(0));
    if (g.space.dim() == 2)
        out << ' ' << format17(g.space.extent(1));
    out << ' ' << format17(g.time.horizon()) << '\n';
    for (double v : field.values())
        out << format17(v) << '\n';
}

void write_field(const std::filesystem::path& path, const Field& field)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        fail(ErrorKind::io, "cannot open " + path.string() + " for writing");
    write_field(out, field);
    out.flush();
    if (!out)
        fail(ErrorKind::io, "error writing " + path.string());
}

Field read_field(std::istream& in, const Grid* expected)
{
    std::string line;
    if (!next_line(in, line) || line != magic)
        io_error("malformed header (expected '" + std::string(magic) + "')");

    if (!next_line(in, line))
        io_error("malformed header (missing size line)");
    auto sizes = tokens(line);
    if (sizes.empty())
        io_error("malformed header (empty size line)");
    const int dim = parse_token<int>(sizes[0], "dimension");
    if (dim != 1 && dim != 2)
        io_error("malformed header (dim must be 1 or 2)");
    if (static_cast<int>(sizes.size()) != dim + 2)
        io_error("malformed header (size line needs dim, nodes per axis, levels)");
    std::array<int, 2> nodes{parse_token<int>(sizes[1], "node count"), 1};
    if (dim == 2)
        nodes[1] = parse_token<int>(sizes[2], "node count");
    const int levels = parse_token<int>(sizes[dim + 1], "level count");

    if (!next_line(in, line))
        io_error("malformed header (missing extent line)");
    auto ext = tokens(line);
    if (static_cast<int>(ext.size()) != dim + 1)
        io_error("malformed header (extent line needs one extent per axis and T)");
    std::array<double, 2> extent{parse_token<double>(ext[0], "extent"), 1.0};
    if (dim == 2)
        extent[1] = parse_token<double>(ext[1], "extent");
    const double horizon = parse_token<double>(ext[dim], "horizon");

    Grid grid;
    try {
        grid = Grid{SpatialGrid(dim, nodes, extent), TimeGrid(levels, horizon)};
    } catch (const Error& e) {
        io_error(std::string("malformed header (") + e.what() + ")");
    }
    if (expected && *expected != grid)
        io_error("dimension mismatch: file grid differs from the expected grid");

    Field f(grid);
    std::size_t k = 0;
    while (next_line(in, line)) {
        if (line.empty())
            continue;
        if (k == f.size())
            io_error("dimension mismatch: more values than the header announces");
        double v = parse_token<double>(line, "value");
        if (!std::isfinite(v))
            io_error("non-finite entry at value " + std::to_string(k + 1));
        f.values()[k++] = v;
    }
    if (k != f.size())
        io_error("dimension mismatch: expected " + std::to_string(f.size()) + " values, found " +
                 std::to_string(k));
    return f;
}

Field read_field(const std::filesystem::path& path, const Grid* expected)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::io, "cannot open " + path.string());
    return read_field(in, expected);
}

} // namespace parakkt
