#include "problem_file.hpp"

#include "common.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace parakkt {

namespace {

struct Entry {
    std::string value;
    int line = 0;
};

using Section = std::vector<std::pair<std::string, Entry>>;

std::string_view trim(std::string_view s)
{
    const char* ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
        return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

[[noreturn]] void file_error(int line, const std::string& what)
{
    fail(ErrorKind::config, "problem file line " + std::to_string(line) + ": " + what);
}

expr::Expression parse_at(const Entry& e, const expr::ConstantTable& table)
{
    try {
        return expr::Expression::parse(e.value, table);
    } catch (const Error& err) {
        file_error(e.line, err.what());
    }
}

std::map<std::string, Section> split_sections(std::string_view text)
{
    std::map<std::string, Section> out;
    std::string current;
    int line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                file_error(line_no, "malformed section header");
            current = std::string(trim(line.substr(1, line.size() - 2)));
            static const std::set<std::string> known{"domain", "f", "L", "g", "constants", "reference"};
            if (!known.count(current))
                file_error(line_no, "unknown section [" + current + "]");
            if (out.count(current))
                file_error(line_no, "duplicate section [" + current + "]");
            out[current];
            continue;
        }
        if (current.empty())
            file_error(line_no, "key outside of any section");
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            file_error(line_no, "expected 'key = value'");
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (key.empty() || value.empty())
            file_error(line_no, "empty key or value");
        Section& sec = out[current];
        for (const auto& [k, _] : sec)
            if (k == key)
                file_error(line_no, "duplicate key '" + key + "'");
        sec.emplace_back(key, Entry{value, line_no});
    }
    return out;
}

const Entry* find(const Section& sec, std::string_view key)
{
    for (const auto& [k, e] : sec)
        if (k == key)
            return &e;
    return nullptr;
}

const Entry& require(const std::map<std::string, Section>& secs, const std::string& section,
                     std::string_view key)
{
    auto it = secs.find(section);
    if (it == secs.end())
        fail(ErrorKind::config, "problem file: missing section [" + section + "]");
    const Entry* e = find(it->second, key);
    if (!e)
        fail(ErrorKind::config,
             "problem file: missing key '" + std::string(key) + "' in [" + section + "]");
    return *e;
}

std::vector<double> parse_numbers(const Entry& e)
{
    std::vector<double> out;
    std::istringstream is(e.value);
    std::string tok;
    while (is >> tok) {
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v))
            file_error(e.line, "expected a number, got '" + tok + "'");
        out.push_back(v);
    }
    return out;
}

double parse_number(const Entry& e)
{
    auto v = parse_numbers(e);
    if (v.size() != 1)
        file_error(e.line, "expected exactly one number");
    return v[0];
}

void check_vars(const expr::Expression& ex, std::initializer_list<expr::Var> allowed, const Entry& e,
                const char* what)
{
    static constexpr const char* names[] = {"x1", "x2", "t", "y", "u"};
    for (int k = 0; k < 5; ++k) {
        auto v = static_cast<expr::Var>(k);
        bool ok = false;
        for (auto a : allowed)
            ok = ok || a == v;
        if (!ok && ex.uses(v))
            file_error(e.line, std::string(what) + " may not depend on " + names[k]);
    }
}

constexpr std::array<const char*, 6> partial_suffix{"", "_y", "_u", "_yy", "_yu", "_uu"};

double eval_constant(const expr::Expression& ex)
{
    return ex.eval({});
}

} // namespace

ProblemDocument parse_problem_document(std::string_view text)
{
    using expr::Var;
    const auto secs = split_sections(text);
    ProblemDocument doc;

    // Constants come first since every other expression may use them.
    expr::ConstantTable table;
    bool have_g1 = false, have_g2 = false;
    if (auto it = secs.find("constants"); it != secs.end()) {
        for (const auto& [key, e] : it->second) {
            if (key == "audit_y" || key == "audit_u") {
                auto v = parse_numbers(e);
                if (v.size() != 2 || !(v[0] <= v[1]))
                    file_error(e.line, key + " needs two numbers lo <= hi");
                (key == "audit_y" ? doc.audit_box.y : doc.audit_box.u) = {v[0], v[1]};
                continue;
            }
            auto ex = parse_at(e, table);
            check_vars(ex, {}, e, key.c_str());
            if (key == "gamma1") {
                doc.gamma1 = ex;
                have_g1 = true;
            } else if (key == "gamma2") {
                doc.gamma2 = ex;
                have_g2 = true;
            } else {
                if (key == "pi" || key == "x1" || key == "x2" || key == "t" || key == "y" ||
                    key == "u")
                    file_error(e.line, "constant name '" + key + "' is reserved");
                for (char c : key)
                    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_'))
                        file_error(e.line, "invalid constant name '" + key + "'");
                if (std::isdigit(static_cast<unsigned char>(key[0])))
                    file_error(e.line, "invalid constant name '" + key + "'");
                table[key] = eval_constant(ex);
                doc.constants.emplace_back(key, ex);
            }
        }
    }
    if (!have_g1 || !have_g2)
        fail(ErrorKind::config, "problem file: [constants] must define gamma1 and gamma2");

    auto expression = [&](const std::string& section, const char* key,
                          std::initializer_list<Var> allowed) {
        const Entry& e = require(secs, section, key);
        auto ex = parse_at(e, table);
        check_vars(ex, allowed, e, key);
        return ex;
    };
    auto check_keys = [&](const std::string& section, const std::set<std::string>& allowed) {
        auto it = secs.find(section);
        if (it == secs.end())
            return;
        for (const auto& [k, e] : it->second)
            if (!allowed.count(k))
                file_error(e.line, "unknown key '" + k + "' in [" + section + "]");
    };

    // [domain]
    check_keys("domain", {"name", "dim", "extent", "T", "a11", "a12", "a21", "a22", "y0"});
    if (auto it = secs.find("domain"); it != secs.end())
        if (const Entry* e = find(it->second, "name"))
            doc.name = e->value;
    {
        const Entry& e = require(secs, "domain", "dim");
        double d = parse_number(e);
        if (d != 1.0 && d != 2.0)
            file_error(e.line, "dim must be 1 or 2");
        doc.dim = static_cast<int>(d);
    }
    {
        const Entry& e = require(secs, "domain", "extent");
        auto v = parse_numbers(e);
        if (static_cast<int>(v.size()) != doc.dim)
            file_error(e.line, "extent needs one value per axis");
        for (std::size_t k = 0; k < v.size(); ++k) {
            if (!(v[k] > 0.0))
                file_error(e.line, "extent must be positive");
            doc.extent[k] = v[k];
        }
    }
    {
        const Entry& e = require(secs, "domain", "T");
        doc.horizon = parse_number(e);
        if (!(doc.horizon > 0.0))
            file_error(e.line, "T must be positive");
    }
    for (const char* key : {"a11", "a12", "a21", "a22"}) {
        const Entry* e = find(secs.at("domain"), key);
        if (!e)
            continue;
        if (doc.dim == 1 && std::string_view(key) != "a11")
            file_error(e->line, std::string(key) + " given for a one-dimensional problem");
        auto ex = parse_at(*e, table);
        check_vars(ex, {Var::x1, Var::x2}, *e, key);
        doc.coefficients.emplace_back(key, ex);
    }
    doc.y0 = expression("domain", "y0", {Var::x1, Var::x2});

    // [f]
    check_keys("f", {"f", "df", "ddf", "C_f"});
    doc.f = expression("f", "f", {Var::y});
    doc.df = expression("f", "df", {Var::y});
    doc.ddf = expression("f", "ddf", {Var::y});
    doc.c_f = expression("f", "C_f", {});

    // [L], [g]
    for (auto [section, target] : {std::pair{"L", &doc.L}, std::pair{"g", &doc.g}}) {
        std::set<std::string> keys;
        for (const char* s : partial_suffix)
            keys.insert(std::string(section) + s);
        check_keys(section, keys);
        for (std::size_t k = 0; k < 6; ++k) {
            std::string key = std::string(section) + partial_suffix[k];
            (*target)[k] = expression(section, key.c_str(), {Var::x1, Var::x2, Var::t, Var::y, Var::u});
        }
    }

    // [reference]
    if (secs.count("reference")) {
        check_keys("reference", {"state", "forcing"});
        doc.reference.emplace(expression("reference", "state", {Var::x1, Var::x2, Var::t}),
                              expression("reference", "forcing", {Var::x1, Var::x2, Var::t}));
    }
    return doc;
}

std::string write_problem_document(const ProblemDocument& doc)
{
    std::ostringstream os;
    os << "[domain]\n";
    os << "name = " << doc.name << "\n";
    os << "dim = " << doc.dim << "\n";
    os << "extent = " << format_roundtrip(doc.extent[0]);
    if (doc.dim == 2)
        os << " " << format_roundtrip(doc.extent[1]);
    os << "\nT = " << format_roundtrip(doc.horizon) << "\n";
    for (const auto& [k, ex] : doc.coefficients)
        os << k << " = " << ex.str() << "\n";
    os << "y0 = " << doc.y0.str() << "\n\n";

    os << "[f]\n";
    os << "f = " << doc.f.str() << "\n";
    os << "df = " << doc.df.str() << "\n";
    os << "ddf = " << doc.ddf.str() << "\n";
    os << "C_f = " << doc.c_f.str() << "\n";

    for (auto [section, maps] : {std::pair{"L", &doc.L}, std::pair{"g", &doc.g}}) {
        os << "\n[" << section << "]\n";
        for (std::size_t k = 0; k < 6; ++k)
            os << section << partial_suffix[k] << " = " << (*maps)[k].str() << "\n";
    }

    os << "\n[constants]\n";
    for (const auto& [k, ex] : doc.constants)
        os << k << " = " << ex.str() << "\n";
    os << "gamma1 = " << doc.gamma1.str() << "\n";
    os << "gamma2 = " << doc.gamma2.str() << "\n";
    os << "audit_y = " << format_roundtrip(doc.audit_box.y.lo) << " "
       << format_roundtrip(doc.audit_box.y.hi) << "\n";
    os << "audit_u = " << format_roundtrip(doc.audit_box.u.lo) << " "
       << format_roundtrip(doc.audit_box.u.hi) << "\n";

    if (doc.reference) {
        os << "\n[reference]\n";
        os << "state = " << doc.reference->first.str() << "\n";
        os << "forcing = " << doc.reference->second.str() << "\n";
    }
    return os.str();
}

namespace {

PointwiseMap pointwise(const expr::Expression& ex)
{
    return [ex](const Point& x, double t, double y, double u) {
        return ex.eval({x[0], x[1], t, y, u});
    };
}

PointMap spatial(const expr::Expression& ex)
{
    return [ex](const Point& x) { return ex.eval({x[0], x[1], 0.0, 0.0, 0.0}); };
}

SpaceTimeMap space_time(const expr::Expression& ex)
{
    return [ex](const Point& x, double t) { return ex.eval({x[0], x[1], t, 0.0, 0.0}); };
}

std::function<double(double)> scalar(const expr::Expression& ex)
{
    return [ex](double y) { return ex.eval({0.0, 0.0, 0.0, y, 0.0}); };
}

ScalarMap2 scalar_map(const std::array<expr::Expression, 6>& e)
{
    return {pointwise(e[0]), pointwise(e[1]), pointwise(e[2]),
            pointwise(e[3]), pointwise(e[4]), pointwise(e[5])};
}

} // namespace

ProblemSpec to_spec(const ProblemDocument& doc)
{
    ProblemSpec spec;
    spec.name = doc.name;
    spec.dim = doc.dim;
    spec.extent = doc.extent;
    if (doc.dim == 1)
        spec.extent[1] = 1.0;
    spec.horizon = doc.horizon;
    for (const auto& [k, ex] : doc.coefficients) {
        int i = k[1] - '1';
        int j = k[2] - '1';
        spec.coeff[i][j] = spatial(ex);
    }
    spec.set_identity_coefficients();
    spec.f = {scalar(doc.f), scalar(doc.df), scalar(doc.ddf), eval_constant(doc.c_f)};
    spec.L = scalar_map(doc.L);
    spec.g = scalar_map(doc.g);
    spec.y0 = spatial(doc.y0);
    spec.gamma1 = eval_constant(doc.gamma1);
    spec.gamma2 = eval_constant(doc.gamma2);
    if (!(spec.gamma1 > 0.0) || !(spec.gamma2 > 0.0))
        fail(ErrorKind::config, "problem file: gamma1 and gamma2 must be positive");
    spec.audit_box = doc.audit_box;
    if (doc.reference)
        spec.manufactured = ManufacturedSolution{space_time(doc.reference->first),
                                                 space_time(doc.reference->second)};
    spec.source = write_problem_document(doc);
    return spec;
}

ProblemSpec parse_problem(std::string_view text)
{
    return to_spec(parse_problem_document(text));
}

ProblemSpec load_problem_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        fail(ErrorKind::io, "cannot open problem file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad())
        fail(ErrorKind::io, "error reading problem file " + path.string());
    return parse_problem(ss.str());
}

} // namespace parakkt
