#pragma once

#include <memory>
#include <string>
#include <vector>

#include "gentwist/jet.hpp"
#include "gentwist/types.hpp"

namespace gentwist {

struct ParseError : Error {
    int line;
    int col;
    std::vector<std::string> expected;
    ParseError(const std::string& msg, int line_, int col_, std::vector<std::string> expected_)
        : Error(msg), line(line_), col(col_), expected(std::move(expected_)) {}
};

// Immutable scalar expression over named chart coordinates.
// Grammar (precedence low to high): sum, product, unary minus, power (right
// associative), atom.  Calls: sin cos exp log sqrt atan.
class Expr {
public:
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    Expr() = default;
    explicit Expr(NodePtr root) : root_(std::move(root)) {}

    bool empty() const { return root_ == nullptr; }
    const Node* node() const { return root_.get(); }

    double value(const Vec& p) const;
    Jet2 jet(const Vec& p) const;
    std::string print() const;

    // Structural constructors (used to assemble derived fields, e.g. symmetric
    // or antisymmetric completions).
    static Expr number(double v);
    static Expr coordinate(int index, const std::string& name);
    static Expr negate(const Expr& e);
    static Expr multiply(const Expr& a, const Expr& b);

private:
    NodePtr root_;
};

// Parses an expression in the given coordinate names.  Throws ParseError with
// line/column and the expected-token set on syntax errors; unknown identifiers
// are reported by name.
Expr parseExpr(const std::string& text, const std::vector<std::string>& coords);

}  // namespace gentwist
