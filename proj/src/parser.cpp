#include "linmso/errors.hpp"
#include "linmso/logic.hpp"

#include <cctype>

namespace linmso {

namespace {

enum class Tok { Ident, LParen, RParen, Comma, Dot, Tilde, Amp, Bar, Arrow, DArrow, End };

struct Token {
    Tok type;
    std::string text;
    int line;
    int col;
};

std::vector<Token> tokenize(const std::string& s) {
    std::vector<Token> out;
    int line = 1, col = 1;
    size_t i = 0;
    auto advance = [&](size_t n) {
        for (size_t k = 0; k < n; ++k) {
            if (s[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < s.size()) {
        char c = s[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < s.size() && s[i] != '\n') advance(1);
            continue;
        }
        int l = line, cl = col;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t j = i;
            while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, s.substr(i, j - i), l, cl});
            advance(j - i);
            continue;
        }
        if (s.compare(i, 3, "<->") == 0) {
            out.push_back({Tok::DArrow, "<->", l, cl});
            advance(3);
            continue;
        }
        if (s.compare(i, 2, "->") == 0) {
            out.push_back({Tok::Arrow, "->", l, cl});
            advance(2);
            continue;
        }
        Tok t;
        switch (c) {
        case '(': t = Tok::LParen; break;
        case ')': t = Tok::RParen; break;
        case ',': t = Tok::Comma; break;
        case '.': t = Tok::Dot; break;
        case '~': t = Tok::Tilde; break;
        case '&': t = Tok::Amp; break;
        case '|': t = Tok::Bar; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", l, cl);
        }
        out.push_back({t, std::string(1, c), l, cl});
        advance(1);
    }
    out.push_back({Tok::End, "", line, col});
    return out;
}

bool is_keyword(const std::string& s) { return s == "all" || s == "ex" || s == "in"; }

bool is_set_name(const std::string& s) { return std::isupper(static_cast<unsigned char>(s[0])) != 0; }

class Parser {
public:
    Parser(const std::string& text, const Vocabulary& vocab) : toks_(tokenize(text)), vocab_(vocab) {}

    Formula run() {
        int r = formula();
        expect(Tok::End, "end of formula");
        f_.set_root(r);
        return std::move(f_);
    }

private:
    struct Binding {
        std::string name;
        bool set;
    };

    std::vector<Token> toks_;
    size_t pos_ = 0;
    const Vocabulary& vocab_;
    std::vector<Binding> scope_;
    Formula f_;

    const Token& peek() const { return toks_[pos_]; }
    bool at(Tok t) const { return peek().type == t; }
    bool at_word(const char* w) const { return at(Tok::Ident) && peek().text == w; }
    Token take() { return toks_[pos_++]; }

    [[noreturn]] void fail(const std::string& msg, const Token& t) const {
        throw ParseError(msg, t.line, t.col);
    }

    Token expect(Tok t, const char* what) {
        if (!at(t)) {
            const Token& cur = peek();
            fail(std::string("expected ") + what + ", found " +
                     (cur.type == Tok::End ? std::string("end of input") : "'" + cur.text + "'"),
                 cur);
        }
        return take();
    }

    const Binding* lookup(const std::string& name) const {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
            if (it->name == name) return &*it;
        return nullptr;
    }

    int node(Kind k, const Token& t, int l = -1, int r = -1) {
        FormulaNode n;
        n.kind = k;
        n.left = l;
        n.right = r;
        n.line = t.line;
        n.col = t.col;
        return f_.add(std::move(n));
    }

    int formula() {
        if (at_word("all") || at_word("ex")) return quant();
        const Token& start = peek();
        int l = disj();
        if (at(Tok::Arrow)) {
            take();
            int r = formula();
            return node(Kind::Or, start, node(Kind::Not, start, l), r);
        }
        if (at(Tok::DArrow)) {
            take();
            int r = formula();
            int l2 = f_.clone_from(f_, l);
            int r2 = f_.clone_from(f_, r);
            int fw = node(Kind::Or, start, node(Kind::Not, start, l), r);
            int bw = node(Kind::Or, start, node(Kind::Not, start, r2), l2);
            return node(Kind::And, start, fw, bw);
        }
        return l;
    }

    int quant() {
        Token kw = take();
        Token name = expect(Tok::Ident, "variable name");
        if (is_keyword(name.text)) fail("keyword '" + name.text + "' used as variable", name);
        if (lookup(name.text)) fail("symbol '" + name.text + "' is already bound in this scope", name);
        if (vocab_.contains(name.text))
            fail("symbol '" + name.text + "' is declared in the vocabulary and cannot be bound", name);
        expect(Tok::Dot, "'.'");
        bool set = is_set_name(name.text);
        scope_.push_back({name.text, set});
        int body = formula();
        scope_.pop_back();
        Kind k = kw.text == "all" ? (set ? Kind::ForallSet : Kind::ForallObj)
                                  : (set ? Kind::ExistsSet : Kind::ExistsObj);
        FormulaNode n;
        n.kind = k;
        n.symbol = name.text;
        n.left = body;
        n.line = kw.line;
        n.col = kw.col;
        return f_.add(std::move(n));
    }

    int disj() {
        const Token& start = peek();
        int l = conj();
        while (at(Tok::Bar)) {
            take();
            int r = conj();
            l = node(Kind::Or, start, l, r);
        }
        return l;
    }

    int conj() {
        const Token& start = peek();
        int l = unit();
        while (at(Tok::Amp)) {
            take();
            int r = unit();
            l = node(Kind::And, start, l, r);
        }
        return l;
    }

    int unit() {
        if (at(Tok::Tilde)) {
            Token t = take();
            return node(Kind::Not, t, unit());
        }
        if (at_word("all") || at_word("ex")) return quant();
        if (at(Tok::LParen)) {
            take();
            int r = formula();
            expect(Tok::RParen, "')'");
            return r;
        }
        return atom();
    }

    void check_object(const Token& t) {
        if (is_keyword(t.text)) fail("keyword '" + t.text + "' used as argument", t);
        if (const Binding* b = lookup(t.text)) {
            if (b->set) fail("set variable '" + t.text + "' used as an object argument", t);
            return;
        }
        const Symbol* s = vocab_.find(t.text);
        if (!s) fail("undeclared symbol '" + t.text + "'", t);
        if (s->arity != 0) fail("symbol '" + t.text + "' is not a nullary symbol", t);
    }

    void check_relation(const Token& t, size_t nargs) {
        if (const Binding* b = lookup(t.text)) {
            if (!b->set) fail("object variable '" + t.text + "' used as a relation", t);
            if (nargs != 1) fail("set variable '" + t.text + "' takes exactly one argument", t);
            return;
        }
        const Symbol* s = vocab_.find(t.text);
        if (!s) fail("undeclared symbol '" + t.text + "'", t);
        if (s->arity == 0) fail("nullary symbol '" + t.text + "' used as a relation", t);
        if (static_cast<size_t>(s->arity) != nargs)
            fail("arity mismatch for '" + t.text + "': expected " + std::to_string(s->arity) +
                     " arguments, got " + std::to_string(nargs),
                 t);
    }

    int atom() {
        Token first = expect(Tok::Ident, "atom");
        if (is_keyword(first.text)) fail("unexpected keyword '" + first.text + "'", first);
        FormulaNode n;
        n.kind = Kind::Atom;
        n.line = first.line;
        n.col = first.col;
        if (at_word("in")) {
            take();
            Token rel = expect(Tok::Ident, "set name");
            check_object(first);
            check_relation(rel, 1);
            n.symbol = rel.text;
            n.args = {first.text};
        } else {
            expect(Tok::LParen, "'(' or 'in'");
            std::vector<Token> args;
            args.push_back(expect(Tok::Ident, "argument"));
            while (at(Tok::Comma)) {
                take();
                args.push_back(expect(Tok::Ident, "argument"));
            }
            expect(Tok::RParen, "')'");
            check_relation(first, args.size());
            for (const auto& a : args) {
                check_object(a);
                n.args.push_back(a.text);
            }
            n.symbol = first.text;
        }
        return f_.add(std::move(n));
    }
};

} // namespace

Formula parse_formula(const std::string& text, const Vocabulary& base_vocab) {
    return Parser(text, base_vocab).run();
}

} // namespace linmso
