#include "linmso/problems.hpp"
#include "linmso/errors.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace linmso {

namespace {

const char* kVc = "all x. all y. (~adj(x,y) | x in C | y in C)";
const char* kDs = "all x. (x in D | ex y. (y in D & adj(x,y)))";
const char* k3col =
    "ex R1. ex R2. ex R3. ("
    "(all x. ((x in R1 | x in R2 | x in R3) & (~x in R1 | ~x in R2) & (~x in R1 | ~x in R3) & (~x in R2 | ~x in R3)))"
    " & (all x. all y. (~adj(x,y) | ((~x in R1 | ~y in R1) & (~x in R2 | ~y in R2) & (~x in R3 | ~y in R3)))))";

Problem make(const std::string& name, std::vector<FreeSymbol> free, const std::string& text) {
    Problem p;
    p.name = name;
    p.base.add({"adj", 2});
    p.free = std::move(free);
    p.formula = to_nnf(parse_formula(text, p.vocabulary()));
    p.validate();
    return p;
}

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool is_ident(const std::string& s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    return true;
}

int64_t parse_int(const std::string& s, int line, int col) {
    size_t pos = 0;
    int64_t v = 0;
    try {
        v = std::stoll(s, &pos);
    } catch (const std::exception&) {
        throw ParseError("expected an integer, got '" + s + "'", line, col);
    }
    if (pos != s.size()) throw ParseError("expected an integer, got '" + s + "'", line, col);
    return v;
}

} // namespace

Problem builtin(const std::string& name) {
    if (name == "vc") return make("vc", {{"C", 1}}, kVc);
    if (name == "ds") return make("ds", {{"D", 1}}, kDs);
    if (name == "3col") return make("3col", {}, k3col);
    throw InputError("unknown problem '" + name + "' (expected vc, ds or 3col)");
}

std::vector<std::string> builtin_names() { return {"vc", "ds", "3col"}; }

Problem load_problem(const std::string& text, const std::string& name) {
    // Blank out comments, keeping offsets so locations stay valid.
    std::string src = text;
    for (size_t i = 0; i < src.size(); ++i)
        if (src[i] == '#')
            while (i < src.size() && src[i] != '\n') src[i++] = ' ';

    auto location = [&](size_t off, int& line, int& col) {
        line = 1;
        col = 1;
        for (size_t i = 0; i < off; ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };

    Problem p;
    p.name = name;
    bool have_objective = false;
    std::string formula_text;
    size_t formula_off = 0;
    bool have_formula = false;

    size_t pos = 0;
    while (true) {
        while (pos < src.size() && std::isspace(static_cast<unsigned char>(src[pos]))) ++pos;
        if (pos >= src.size()) break;
        size_t semi = src.find(';', pos);
        int line, col;
        location(pos, line, col);
        if (semi == std::string::npos) throw ParseError("statement is not terminated by ';'", line, col);
        std::string stmt = src.substr(pos, semi - pos);
        size_t start = pos;
        pos = semi + 1;

        size_t sp = 0;
        while (sp < stmt.size() && !std::isspace(static_cast<unsigned char>(stmt[sp]))) ++sp;
        std::string kw = stmt.substr(0, sp);
        std::string rest = stmt.substr(sp);
        std::istringstream words(rest);

        if (kw == "vocabulary") {
            std::string item;
            std::stringstream items(rest);
            while (std::getline(items, item, ',')) {
                item = trim(item);
                size_t slash = item.find('/');
                if (slash == std::string::npos) throw ParseError("expected name/arity in vocabulary", line, col);
                std::string sym = trim(item.substr(0, slash));
                if (!is_ident(sym)) throw ParseError("invalid symbol name '" + sym + "'", line, col);
                int64_t ar = parse_int(trim(item.substr(slash + 1)), line, col);
                if (ar < 1) throw ParseError("base vocabulary symbols must have positive arity", line, col);
                if (p.base.contains(sym)) throw ParseError("symbol '" + sym + "' declared twice", line, col);
                p.base.add({sym, static_cast<int>(ar)});
            }
        } else if (kw == "free") {
            std::string sym, wkw, wval, extra;
            words >> sym >> wkw >> wval >> extra;
            if (!is_ident(sym)) throw ParseError("expected a free symbol name", line, col);
            FreeSymbol f{sym, 1};
            if (!wkw.empty()) {
                if (wkw != "weight" || wval.empty() || !extra.empty())
                    throw ParseError("expected 'free <name> weight <integer>'", line, col);
                f.weight = parse_int(wval, line, col);
            }
            p.free.push_back(f);
        } else if (kw == "objective") {
            std::string obj, extra;
            words >> obj >> extra;
            if ((obj != "min" && obj != "max") || !extra.empty())
                throw ParseError("objective must be 'min' or 'max'", line, col);
            if (have_objective) throw ParseError("objective declared twice", line, col);
            have_objective = true;
            p.maximize = obj == "max";
        } else if (kw == "formula") {
            if (have_formula) throw ParseError("formula declared twice", line, col);
            have_formula = true;
            formula_text = rest;
            formula_off = start + sp;
        } else {
            throw ParseError("unknown statement '" + kw + "'", line, col);
        }
    }
    if (!have_formula) throw InputError("problem file has no formula");

    for (const auto& f : p.free)
        if (p.base.contains(f.name))
            throw InputError("free symbol '" + f.name + "' clashes with the base vocabulary");
    int fline, fcol;
    location(formula_off, fline, fcol);
    try {
        p.formula = to_nnf(parse_formula(formula_text, p.vocabulary()));
    } catch (const ParseError& e) {
        // Re-anchor the location at the statement inside the file.
        int line = fline + e.line() - 1;
        int col = e.line() == 1 ? fcol + e.column() - 1 : e.column();
        std::string msg = e.what();
        size_t cut = msg.find(": ");
        throw ParseError(cut == std::string::npos ? msg : msg.substr(cut + 2), line, col);
    }
    if (p.maximize)
        for (auto& f : p.free) f.weight = -f.weight;
    p.validate();
    return p;
}

std::string serialize_problem(const Problem& p) {
    std::ostringstream out;
    if (!p.name.empty()) out << "# " << p.name << "\n";
    auto rels = p.base.relations();
    if (!rels.empty()) {
        out << "vocabulary ";
        for (size_t i = 0; i < rels.size(); ++i) out << (i ? ", " : "") << rels[i].name << "/" << rels[i].arity;
        out << ";\n";
    }
    for (const auto& f : p.free) out << "free " << f.name << " weight " << (p.maximize ? -f.weight : f.weight) << ";\n";
    out << "objective " << (p.maximize ? "max" : "min") << ";\n";
    out << "formula " << to_string(p.formula) << ";\n";
    return out.str();
}

Problem resolve_problem(const std::string& spec) {
    for (const auto& n : builtin_names())
        if (spec == n) return builtin(n);
    std::ifstream in(spec);
    if (!in) throw InputError("cannot read problem file '" + spec + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    std::string name = spec;
    size_t slash = name.find_last_of('/');
    if (slash != std::string::npos) name = name.substr(slash + 1);
    return load_problem(buf.str(), name);
}

} // namespace linmso
