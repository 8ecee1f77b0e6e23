#include "quasisym/io.hpp"

#include "quasisym/errors.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <vector>

namespace quasisym::io {

std::string fmt12(double x) {
    if (x == 0.0) x = 0.0 * std::abs(x); // normalize -0
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.11e", x);
    return buf;
}

void write_text_atomic(const std::string &path, const std::string &content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw io_error("cannot open " + tmp + " for writing");
        out << content;
        out.flush();
        if (!out) throw io_error("short write to " + tmp);
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw io_error("cannot move " + tmp + " into place");
    }
}

std::string read_text(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw io_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw io_error("read failure on " + path);
    return ss.str();
}

namespace {

struct CsvDoc {
    std::map<std::string, std::string> meta;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

CsvDoc parse_csv(const std::string &path) {
    CsvDoc doc;
    std::istringstream in(read_text(path));
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream ls(line.substr(1));
            std::string tok;
            while (ls >> tok) {
                const auto eq = tok.find('=');
                if (eq != std::string::npos) doc.meta[tok.substr(0, eq)] = tok.substr(eq + 1);
            }
            continue;
        }
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!have_header) {
            doc.columns = cells;
            have_header = true;
            continue;
        }
        std::vector<double> row;
        row.reserve(cells.size());
        for (const auto &c : cells) {
            char *end = nullptr;
            const double val = std::strtod(c.c_str(), &end);
            if (end == c.c_str()) throw io_error("bad numeric cell '" + c + "' in " + path);
            row.push_back(val);
        }
        if (row.size() != doc.columns.size())
            throw io_error("ragged row in " + path);
        doc.rows.push_back(std::move(row));
    }
    if (!have_header) throw io_error("no header row in " + path);
    return doc;
}

double meta_num(const CsvDoc &doc, const std::string &key, const std::string &path) {
    const auto it = doc.meta.find(key);
    if (it == doc.meta.end()) throw io_error("missing '" + key + "' metadata in " + path);
    return std::strtod(it->second.c_str(), nullptr);
}

std::string meta_str(const CsvDoc &doc, const std::string &key, const std::string &path) {
    const auto it = doc.meta.find(key);
    if (it == doc.meta.end()) throw io_error("missing '" + key + "' metadata in " + path);
    return it->second;
}

int column_of(const CsvDoc &doc, const std::string &name, const std::string &path) {
    for (std::size_t c = 0; c < doc.columns.size(); ++c)
        if (doc.columns[c] == name) return static_cast<int>(c);
    throw io_error("missing column '" + name + "' in " + path);
}

} // namespace

void write_profile_csv(const std::string &path, const ProfileTable &table) {
    std::ostringstream out;
    out << "# order=" << table.order << " min_value=" << fmt12(table.min_value)
        << " arg_min=" << fmt12(table.arg_min) << "\n";
    out << "s,value\n";
    for (std::size_t i = 0; i < table.s.size(); ++i)
        out << fmt12(table.s[i]) << ',' << fmt12(table.value[i]) << "\n";
    write_text_atomic(path, out.str());
}

void write_g_table_csv(const std::string &path, const GFunction &g) {
    std::ostringstream out;
    out << "# s_max=" << fmt12(g.s_max()) << " u_max=" << fmt12(g.u_max())
        << " exact=" << (g.exact() ? 1 : 0) << "\n";
    out << "s,g,slope\n";
    const auto &s = g.nodes();
    const auto &gv = g.node_values();
    for (std::size_t i = 0; i < s.size(); ++i)
        out << fmt12(s[i]) << ',' << fmt12(gv[i]) << ',' << fmt12(g.slope(s[i])) << "\n";
    write_text_atomic(path, out.str());
}

void write_solution_csv(const std::string &path, const RadialSolution &sol) {
    std::ostringstream out;
    out << "# domain=" << (sol.domain.is_ball ? "ball" : "annulus")
        << " inner=" << fmt12(sol.domain.inner) << " outer=" << fmt12(sol.domain.outer) << "\n";
    out << "# dim=" << sol.dim << " target_nodes=" << sol.target_nodes
        << " node_count=" << sol.node_count << " polished=" << (sol.polished ? 1 : 0) << "\n";
    out << "# shoot_param=" << fmt12(sol.shoot_param)
        << " scheme_residual=" << fmt12(sol.scheme_residual) << "\n";
    out << "r,v,u,dv\n";
    for (std::size_t i = 0; i < sol.r.size(); ++i)
        out << fmt12(sol.r[i]) << ',' << fmt12(sol.v[i]) << ',' << fmt12(sol.u[i]) << ','
            << fmt12(sol.dv[i]) << "\n";
    write_text_atomic(path, out.str());
}

RadialSolution read_solution_csv(const std::string &path) {
    const CsvDoc doc = parse_csv(path);
    RadialSolution sol;
    const std::string kind = meta_str(doc, "domain", path);
    const double inner = meta_num(doc, "inner", path);
    const double outer = meta_num(doc, "outer", path);
    sol.domain = kind == "ball" ? RadialDomain::ball(outer) : RadialDomain::annulus(inner, outer);
    sol.dim = static_cast<int>(meta_num(doc, "dim", path));
    sol.target_nodes = static_cast<int>(meta_num(doc, "target_nodes", path));
    sol.node_count = static_cast<int>(meta_num(doc, "node_count", path));
    sol.polished = meta_num(doc, "polished", path) != 0;
    sol.shoot_param = meta_num(doc, "shoot_param", path);
    sol.scheme_residual = meta_num(doc, "scheme_residual", path);
    const int cr = column_of(doc, "r", path), cv = column_of(doc, "v", path);
    const int cu = column_of(doc, "u", path), cd = column_of(doc, "dv", path);
    if (doc.rows.size() < 2) throw io_error("solution table too short in " + path);
    sol.r.reserve(doc.rows.size());
    for (const auto &row : doc.rows) {
        sol.r.push_back(row[cr]);
        sol.v.push_back(row[cv]);
        sol.u.push_back(row[cu]);
        sol.dv.push_back(row[cd]);
    }
    return sol;
}

void write_field_csv(const std::string &path, const PlanarField &field) {
    std::ostringstream out;
    out << "# mesh L=" << fmt12(field.L) << " H=" << fmt12(field.H) << " n1=" << field.n1
        << " n2=" << field.n2 << "\n";
    out << "# residual=" << fmt12(field.residual) << " trivial=" << (field.trivial ? 1 : 0)
        << " converged=" << (field.converged ? 1 : 0) << " newton_iters=" << field.newton_iters
        << "\n";
    out << "x1,x2,v,u\n";
    for (int i = 0; i <= field.n1; ++i)
        for (int j = 0; j <= field.n2; ++j) {
            const std::size_t q = field.idx(i, j);
            out << fmt12(field.x1(i)) << ',' << fmt12(field.x2(j)) << ',' << fmt12(field.v[q])
                << ',' << fmt12(field.u[q]) << "\n";
        }
    write_text_atomic(path, out.str());
}

PlanarField read_field_csv(const std::string &path) {
    const CsvDoc doc = parse_csv(path);
    PlanarField field;
    field.L = meta_num(doc, "L", path);
    field.H = meta_num(doc, "H", path);
    field.n1 = static_cast<int>(meta_num(doc, "n1", path));
    field.n2 = static_cast<int>(meta_num(doc, "n2", path));
    field.residual = meta_num(doc, "residual", path);
    field.trivial = meta_num(doc, "trivial", path) != 0;
    field.converged = meta_num(doc, "converged", path) != 0;
    field.newton_iters = static_cast<int>(meta_num(doc, "newton_iters", path));
    if (field.n1 < 1 || field.n2 < 1) throw io_error("bad mesh metadata in " + path);
    const std::size_t nn = static_cast<std::size_t>(field.n1 + 1) * (field.n2 + 1);
    if (doc.rows.size() != nn) throw io_error("node count mismatch in " + path);
    field.v.assign(nn, 0.0);
    field.u.assign(nn, 0.0);
    const int cv = column_of(doc, "v", path), cu = column_of(doc, "u", path);
    std::size_t q = 0;
    for (const auto &row : doc.rows) {
        field.v[q] = row[cv];
        field.u[q] = row[cu];
        ++q;
    }
    return field;
}

} // namespace quasisym::io
