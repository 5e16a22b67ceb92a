#pragma once

#include <string>
#include <vector>

namespace ordo {

/// Minimal S-expression node: either an atom or a list of children.
struct Sexpr {
    bool is_atom = false;
    std::string atom;            // valid when is_atom
    std::vector<Sexpr> items;    // valid when !is_atom
    int line = 0;                // 1-based source line, for error reporting

    const Sexpr& at(size_t i) const;
    size_t size() const { return items.size(); }
    const std::string& head() const;  // atom of items[0]
};

/// Thrown on malformed input; what() includes the 1-based line number.
struct ParseError : std::exception {
    std::string message;
    int line;
    ParseError(std::string msg, int ln);
    const char* what() const noexcept override { return message.c_str(); }
};

/// Reads every top-level form in `text`. `;` starts a comment to end of line.
std::vector<Sexpr> parse_sexprs(const std::string& text);

}  // namespace ordo
