#include "brane/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <system_error>

#include <json.hpp>

#include "brane/error.hpp"

namespace brane {

using nlohmann::json;

namespace {

// 1-based line of the first occurrence of "key" in text; 0 if absent.
std::size_t line_of(const std::string& text, const std::string& key) {
    const auto pos = text.find('"' + key + '"');
    if (pos == std::string::npos) return 0;
    return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

json parse_document(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        const std::size_t upto = std::min(text.size(), e.byte == 0 ? 0 : e.byte - 1);
        const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(upto), '\n'));
        throw FormatError(std::string("malformed JSON: ") + e.what(), "", line);
    }
}

class Doc {
public:
    explicit Doc(const std::string& text) : text_(text) {}

    [[noreturn]] void fail(const std::string& what, const std::string& key) const {
        throw FormatError(what, key, line_of(text_, key));
    }

    const json& object(const json& parent, const std::string& key) const {
        const json& v = parent.at(key);
        if (!v.is_object()) fail("expected an object", key);
        return v;
    }

    double number(const json& v, const std::string& key) const {
        if (!v.is_number()) fail("expected a number", key);
        return v.get<double>();
    }

    std::int64_t integer(const json& v, const std::string& key) const {
        if (!v.is_number_integer()) fail("expected an integer", key);
        return v.get<std::int64_t>();
    }

    std::vector<double> numbers(const json& v, const std::string& key) const {
        if (!v.is_array()) fail("expected an array", key);
        std::vector<double> out;
        out.reserve(v.size());
        for (const json& x : v) out.push_back(number(x, key));
        return out;
    }

    std::vector<std::size_t> counts(const json& v, const std::string& key) const {
        if (!v.is_array()) fail("expected an array", key);
        std::vector<std::size_t> out;
        for (const json& x : v) {
            const std::int64_t k = integer(x, key);
            if (k < 0) fail("expected a non-negative integer", key);
            out.push_back(static_cast<std::size_t>(k));
        }
        return out;
    }

    std::string string(const json& v, const std::string& key) const {
        if (!v.is_string()) fail("expected a string", key);
        return v.get<std::string>();
    }

private:
    const std::string& text_;
};

void only_keys(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& item : obj.items())
        if (!ok.count(item.key())) throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

void require_keys(const json& obj, std::initializer_list<const char*> required, const std::string& where) {
    for (const char* k : required)
        if (!obj.contains(k)) throw ConfigError(std::string("config: missing key '") + k + "' in " + where);
}

std::string array_of(std::span<const double> v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out + "]";
}

std::string array_of(std::span<const std::size_t> v) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(v[i]);
    }
    return out + "]";
}

}  // namespace

Grid ExperimentConfig::grid() const {
    return Grid::make(n, length);
}

FieldState ExperimentConfig::initial_state() const {
    return make_initial(grid(), initial, solver.gamma_min);
}

ExperimentConfig parse_config(const std::string& text) {
    const json root = parse_document(text);
    const Doc doc(text);
    if (!root.is_object()) throw FormatError("config must be a JSON object");
    only_keys(root, {"m", "domain", "initial", "solver", "guards"}, "root");
    require_keys(root, {"m", "domain", "initial", "solver"}, "root");

    ExperimentConfig cfg;
    const std::int64_t m = doc.integer(root.at("m"), "m");
    if (m != 1 && m != 2) throw ConfigError("config: m must be 1 or 2");
    cfg.m = static_cast<int>(m);

    const json& domain = doc.object(root, "domain");
    only_keys(domain, {"length", "n"}, "domain");
    require_keys(domain, {"length", "n"}, "domain");
    cfg.length = doc.numbers(domain.at("length"), "length");
    cfg.n = doc.counts(domain.at("n"), "n");
    if (cfg.length.size() != static_cast<std::size_t>(m) || cfg.n.size() != static_cast<std::size_t>(m))
        throw ConfigError("config: domain.length and domain.n need exactly m entries");

    const json& init = doc.object(root, "initial");
    only_keys(init, {"kind", "amplitude", "width", "center", "velocity", "seed"}, "initial");
    require_keys(init, {"kind"}, "initial");
    cfg.initial.kind = initial_kind_from_string(doc.string(init.at("kind"), "kind"));
    if (init.contains("amplitude")) cfg.initial.amplitude = doc.number(init.at("amplitude"), "amplitude");
    if (init.contains("width")) cfg.initial.width = doc.number(init.at("width"), "width");
    if (init.contains("center")) cfg.initial.center = doc.numbers(init.at("center"), "center");
    if (init.contains("velocity")) cfg.initial.velocity = doc.number(init.at("velocity"), "velocity");
    if (init.contains("seed")) {
        const std::int64_t seed = doc.integer(init.at("seed"), "seed");
        if (seed < 0) throw ConfigError("config: seed must be non-negative");
        cfg.initial.seed = static_cast<std::uint64_t>(seed);
    }

    const json& solver = doc.object(root, "solver");
    only_keys(solver, {"scheme", "cfl", "t_end", "snapshot_every", "dissipation"}, "solver");
    require_keys(solver, {"t_end"}, "solver");
    if (solver.contains("scheme")) cfg.solver.scheme = scheme_from_string(doc.string(solver.at("scheme"), "scheme"));
    if (solver.contains("cfl")) cfg.solver.cfl = doc.number(solver.at("cfl"), "cfl");
    cfg.solver.t_end = doc.number(solver.at("t_end"), "t_end");
    cfg.solver.snapshot_every = solver.contains("snapshot_every")
                                    ? doc.number(solver.at("snapshot_every"), "snapshot_every")
                                    : cfg.solver.t_end;
    if (solver.contains("dissipation")) cfg.solver.dissipation = doc.number(solver.at("dissipation"), "dissipation");

    if (root.contains("guards")) {
        const json& guards = doc.object(root, "guards");
        only_keys(guards, {"gamma_min", "boundary_tol"}, "guards");
        if (guards.contains("gamma_min")) cfg.solver.gamma_min = doc.number(guards.at("gamma_min"), "gamma_min");
        if (guards.contains("boundary_tol"))
            cfg.solver.boundary_tol = doc.number(guards.at("boundary_tol"), "boundary_tol");
    }

    cfg.solver.validate();
    (void)cfg.grid();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path));
}

std::string config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["m"] = cfg.m;
    j["domain"] = {{"length", cfg.length}, {"n", cfg.n}};
    j["initial"] = {{"kind", to_string(cfg.initial.kind)},
                    {"amplitude", cfg.initial.amplitude},
                    {"width", cfg.initial.width},
                    {"center", cfg.initial.center},
                    {"velocity", cfg.initial.velocity},
                    {"seed", cfg.initial.seed}};
    j["solver"] = {{"scheme", to_string(cfg.solver.scheme)},
                   {"cfl", cfg.solver.cfl},
                   {"t_end", cfg.solver.t_end},
                   {"snapshot_every", cfg.solver.snapshot_every},
                   {"dissipation", cfg.solver.dissipation}};
    j["guards"] = {{"gamma_min", cfg.solver.gamma_min}, {"boundary_tol", cfg.solver.boundary_tol}};
    return j.dump(2) + "\n";
}

std::string format_double(double v) {
    if (!std::isfinite(v)) throw NonFiniteError("format_double: non-finite value");
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    std::string out(buf, res.ptr);
    if (out.find_first_of(".e") == std::string::npos) out += ".0";
    return out;
}

std::string snapshot_to_json(const FieldState& s) {
    const Grid& g = s.grid;
    std::vector<std::size_t> n;
    std::vector<double> dx, origin;
    for (int a = 0; a < g.m(); ++a) {
        n.push_back(g.n(a));
        dx.push_back(g.dx(a));
        origin.push_back(g.origin(a));
    }
    std::string out = "{\n";
    out += "  \"m\": " + std::to_string(g.m()) + ",\n";
    out += "  \"t\": " + format_double(s.t) + ",\n";
    out += "  \"n\": " + array_of(n) + ",\n";
    out += "  \"dx\": " + array_of(dx) + ",\n";
    out += "  \"origin\": " + array_of(origin) + ",\n";
    out += "  \"z\": " + array_of(s.z.values()) + ",\n";
    out += "  \"p\": " + array_of(s.p.values()) + "\n";
    out += "}\n";
    return out;
}

FieldState snapshot_from_json(const std::string& text) {
    const json root = parse_document(text);
    const Doc doc(text);
    if (!root.is_object()) throw FormatError("snapshot must be a JSON object");
    for (const char* k : {"m", "t", "n", "dx", "origin", "z", "p"})
        if (!root.contains(k)) throw FormatError("snapshot: missing key", k);
    for (const auto& item : root.items())
        if (std::set<std::string>{"m", "t", "n", "dx", "origin", "z", "p"}.count(item.key()) == 0)
            doc.fail("snapshot: unknown key", item.key());

    const std::int64_t m = doc.integer(root.at("m"), "m");
    if (m != 1 && m != 2) doc.fail("snapshot: unsupported dimension m=" + std::to_string(m), "m");
    const double t = doc.number(root.at("t"), "t");
    const auto n = doc.counts(root.at("n"), "n");
    const auto dx = doc.numbers(root.at("dx"), "dx");
    const auto origin = doc.numbers(root.at("origin"), "origin");
    const auto m_sz = static_cast<std::size_t>(m);
    if (n.size() != m_sz) doc.fail("snapshot: n needs m entries", "n");
    if (dx.size() != m_sz) doc.fail("snapshot: dx needs m entries", "dx");
    if (origin.size() != m_sz) doc.fail("snapshot: origin needs m entries", "origin");

    Grid g = [&] {
        try {
            return Grid::from_spacing(n, dx, origin);
        } catch (const Error& e) {
            doc.fail(std::string("snapshot: invalid grid: ") + e.what(), "n");
        }
    }();
    auto z = doc.numbers(root.at("z"), "z");
    auto p = doc.numbers(root.at("p"), "p");
    if (z.size() != g.size()) doc.fail("snapshot: z has " + std::to_string(z.size()) + " values, expected " + std::to_string(g.size()), "z");
    if (p.size() != g.size()) doc.fail("snapshot: p has " + std::to_string(p.size()) + " values, expected " + std::to_string(g.size()), "p");
    return FieldState(g, t, ScalarLattice(g, std::move(z)), ScalarLattice(g, std::move(p)));
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw FormatError("cannot open " + tmp.string() + " for writing");
        out << content;
        out.flush();
        if (!out) throw FormatError("write failed for " + tmp.string());
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        throw FormatError("cannot move " + tmp.string() + " into place");
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_snapshot(const FieldState& s, const std::filesystem::path& path) {
    write_file_atomic(path, snapshot_to_json(s));
}

FieldState read_snapshot(const std::filesystem::path& path) {
    return snapshot_from_json(read_file(path));
}

std::vector<std::string> diagnostics_header(int m) {
    const int r = m + 2;
    std::vector<std::string> h{"t"};
    for (int mu = 0; mu < r; ++mu) h.push_back("P_" + std::to_string(mu));
    for (int mu = 0; mu < r; ++mu)
        for (int nu = mu + 1; nu < r; ++nu) h.push_back("L_" + std::to_string(mu) + std::to_string(nu));
    for (int mu = 0; mu < r; ++mu) h.push_back("moment_" + std::to_string(mu));
    h.insert(h.end(), {"min_gamma", "identity_resid", "harmonic_resid"});
    for (int mu = 0; mu < r; ++mu) h.push_back("eq4_resid_" + std::to_string(mu));
    h.push_back("eq5_resid_max");
    return h;
}

std::string diagnostics_csv(const std::vector<DiagnosticsRow>& rows, int m) {
    const int r = m + 2;
    std::string out;
    const auto header = diagnostics_header(m);
    for (std::size_t i = 0; i < header.size(); ++i) out += (i ? "," : "") + header[i];
    out += "\n";
    double last_t = -INFINITY;
    for (const DiagnosticsRow& row : rows) {
        const ChargeSet& c = row.charges;
        const ResidualReport& res = row.residuals;
        if (c.m != m || static_cast<int>(res.eq4.size()) != r)
            throw GridMismatch("diagnostics_csv: row dimension differs from header");
        if (!(row.t() > last_t)) throw GridMismatch("diagnostics_csv: rows must be strictly time-ordered");
        last_t = row.t();
        std::vector<double> cells{row.t()};
        cells.insert(cells.end(), c.P.begin(), c.P.end());
        for (int mu = 0; mu < r; ++mu)
            for (int nu = mu + 1; nu < r; ++nu) cells.push_back(c.lorentz(mu, nu));
        cells.insert(cells.end(), c.moments.begin(), c.moments.end());
        cells.insert(cells.end(), {res.min_gamma, res.identity, res.harmonic});
        cells.insert(cells.end(), res.eq4.begin(), res.eq4.end());
        cells.push_back(res.eq5_max());
        for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + format_double(cells[i]);
        out += "\n";
    }
    return out;
}

void write_diagnostics(const std::vector<DiagnosticsRow>& rows, int m, const std::filesystem::path& path) {
    write_file_atomic(path, diagnostics_csv(rows, m));
}

}  // namespace brane
