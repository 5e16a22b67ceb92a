#include "ordo/sexpr.hpp"

#include <cctype>
#include <stdexcept>

namespace ordo {

ParseError::ParseError(std::string msg, int ln)
    : message("line " + std::to_string(ln) + ": " + std::move(msg)), line(ln) {}

const Sexpr& Sexpr::at(size_t i) const {
    if (is_atom || i >= items.size())
        throw ParseError("expected list element " + std::to_string(i), line);
    return items[i];
}

const std::string& Sexpr::head() const {
    if (is_atom || items.empty() || !items[0].is_atom)
        throw ParseError("expected a list headed by an atom", line);
    return items[0].atom;
}

namespace {

struct Cursor {
    const std::string& s;
    size_t i = 0;
    int line = 1;

    void skip_ws() {
        while (i < s.size()) {
            char c = s[i];
            if (c == ';') {
                while (i < s.size() && s[i] != '\n') ++i;
            } else if (c == '\n') {
                ++line;
                ++i;
            } else if (std::isspace(static_cast<unsigned char>(c))) {
                ++i;
            } else {
                break;
            }
        }
    }

    bool done() {
        skip_ws();
        return i >= s.size();
    }

    Sexpr read() {
        skip_ws();
        if (i >= s.size()) throw ParseError("unexpected end of input", line);
        Sexpr e;
        e.line = line;
        char c = s[i];
        if (c == '(') {
            ++i;
            e.is_atom = false;
            while (true) {
                skip_ws();
                if (i >= s.size()) throw ParseError("unterminated list", e.line);
                if (s[i] == ')') {
                    ++i;
                    return e;
                }
                e.items.push_back(read());
            }
        }
        if (c == ')') throw ParseError("unexpected ')'", line);
        size_t start = i;
        while (i < s.size()) {
            char d = s[i];
            if (d == '(' || d == ')' || d == ';' ||
                std::isspace(static_cast<unsigned char>(d)))
                break;
            ++i;
        }
        e.is_atom = true;
        e.atom = s.substr(start, i - start);
        return e;
    }
};

}  // namespace

std::vector<Sexpr> parse_sexprs(const std::string& text) {
    Cursor cur{text};
    std::vector<Sexpr> out;
    while (!cur.done()) out.push_back(cur.read());
    return out;
}

}  // namespace ordo
