#include "gentwist/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace gentwist {

enum class Fn { Sin, Cos, Exp, Log, Sqrt, Atan };

struct Expr::Node {
    enum class Kind { Number, Coord, Neg, Add, Sub, Mul, Div, Pow, Call } kind;
    double num = 0.0;
    int coord = -1;
    std::string name;  // coordinate or function name, for printing
    Fn fn = Fn::Sin;
    NodePtr a, b;
};

namespace {

using Node = Expr::Node;
using NodePtr = Expr::NodePtr;

NodePtr mk(Node n) { return std::make_shared<const Node>(std::move(n)); }

// ---------------------------------------------------------------- tokenizer

struct Token {
    enum class Kind { Number, Ident, Op, End } kind;
    double num = 0.0;
    std::string text;
    int line = 1;
    int col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }

    const Token& peek() const { return tok_; }
    Token take() {
        Token t = tok_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) bump();
        tok_.line = line_;
        tok_.col = col_;
        if (pos_ >= s_.size()) {
            tok_.kind = Token::Kind::End;
            tok_.text = "<end>";
            return;
        }
        const char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            size_t end = pos_;
            while (end < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.')) end++;
            if (end < s_.size() && (s_[end] == 'e' || s_[end] == 'E')) {
                size_t e = end + 1;
                if (e < s_.size() && (s_[e] == '+' || s_[e] == '-')) e++;
                if (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) {
                    e++;
                    while (e < s_.size() && std::isdigit(static_cast<unsigned char>(s_[e]))) e++;
                    end = e;
                }
            }
            tok_.kind = Token::Kind::Number;
            tok_.text = s_.substr(pos_, end - pos_);
            try {
                tok_.num = std::stod(tok_.text);
            } catch (const std::exception&) {
                throw ParseError("bad numeric literal '" + tok_.text + "'", line_, col_, {"number"});
            }
            while (pos_ < end) bump();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            size_t end = pos_;
            while (end < s_.size() &&
                   (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
                end++;
            tok_.kind = Token::Kind::Ident;
            tok_.text = s_.substr(pos_, end - pos_);
            while (pos_ < end) bump();
            return;
        }
        if (std::string("+-*/^()").find(c) != std::string::npos) {
            tok_.kind = Token::Kind::Op;
            tok_.text = std::string(1, c);
            bump();
            return;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_,
                         {"number", "identifier", "operator", "'('"});
    }

    void bump() {
        if (s_[pos_] == '\n') {
            line_++;
            col_ = 1;
        } else {
            col_++;
        }
        pos_++;
    }

    const std::string& s_;
    size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    Token tok_;
};

// ------------------------------------------------------- recursive descent

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& coords)
        : lex_(text), coords_(coords) {}

    NodePtr parse() {
        NodePtr e = sum();
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::End)
            throw ParseError("unexpected token '" + t.text + "'", t.line, t.col,
                             {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"});
        return e;
    }

private:
    bool isOp(const char* op) const {
        return lex_.peek().kind == Token::Kind::Op && lex_.peek().text == op;
    }

    NodePtr sum() {
        NodePtr e = product();
        while (isOp("+") || isOp("-")) {
            const bool add = isOp("+");
            lex_.take();
            Node n;
            n.kind = add ? Node::Kind::Add : Node::Kind::Sub;
            n.a = e;
            n.b = product();
            e = mk(std::move(n));
        }
        return e;
    }

    NodePtr product() {
        NodePtr e = unary();
        while (isOp("*") || isOp("/")) {
            const bool mul = isOp("*");
            lex_.take();
            Node n;
            n.kind = mul ? Node::Kind::Mul : Node::Kind::Div;
            n.a = e;
            n.b = unary();
            e = mk(std::move(n));
        }
        return e;
    }

    NodePtr unary() {
        if (isOp("-")) {
            lex_.take();
            Node n;
            n.kind = Node::Kind::Neg;
            n.a = unary();
            return mk(std::move(n));
        }
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (isOp("^")) {
            lex_.take();
            Node n;
            n.kind = Node::Kind::Pow;
            n.a = base;
            n.b = unary();  // right associative, and allows negated exponents
            return mk(std::move(n));
        }
        return base;
    }

    NodePtr atom() {
        const Token t = lex_.take();
        if (t.kind == Token::Kind::Number) {
            Node n;
            n.kind = Node::Kind::Number;
            n.num = t.num;
            return mk(std::move(n));
        }
        if (t.kind == Token::Kind::Ident) {
            static const std::pair<const char*, Fn> fns[] = {
                {"sin", Fn::Sin}, {"cos", Fn::Cos},   {"exp", Fn::Exp},
                {"log", Fn::Log}, {"sqrt", Fn::Sqrt}, {"atan", Fn::Atan}};
            for (const auto& [name, fn] : fns) {
                if (t.text == name) {
                    expect("(");
                    Node n;
                    n.kind = Node::Kind::Call;
                    n.fn = fn;
                    n.name = name;
                    n.a = sum();
                    expect(")");
                    return mk(std::move(n));
                }
            }
            for (size_t i = 0; i < coords_.size(); i++) {
                if (coords_[i] == t.text) {
                    Node n;
                    n.kind = Node::Kind::Coord;
                    n.coord = static_cast<int>(i);
                    n.name = t.text;
                    return mk(std::move(n));
                }
            }
            throw ParseError("unknown identifier '" + t.text + "'", t.line, t.col,
                             {"coordinate", "function"});
        }
        if (t.kind == Token::Kind::Op && t.text == "(") {
            NodePtr e = sum();
            expect(")");
            return e;
        }
        throw ParseError("unexpected token '" + t.text + "'", t.line, t.col,
                         {"number", "identifier", "'('", "'-'"});
    }

    void expect(const char* op) {
        const Token& t = lex_.peek();
        if (t.kind != Token::Kind::Op || t.text != op)
            throw ParseError("expected '" + std::string(op) + "', got '" + t.text + "'", t.line,
                             t.col, {std::string("'") + op + "'"});
        lex_.take();
    }

    Lexer lex_;
    const std::vector<std::string>& coords_;
};

// ------------------------------------------------------------- evaluation

double evalV(const Node* n, const Vec& p) {
    switch (n->kind) {
        case Node::Kind::Number: return n->num;
        case Node::Kind::Coord: return p(n->coord);
        case Node::Kind::Neg: return -evalV(n->a.get(), p);
        case Node::Kind::Add: return evalV(n->a.get(), p) + evalV(n->b.get(), p);
        case Node::Kind::Sub: return evalV(n->a.get(), p) - evalV(n->b.get(), p);
        case Node::Kind::Mul: return evalV(n->a.get(), p) * evalV(n->b.get(), p);
        case Node::Kind::Div: {
            const double d = evalV(n->b.get(), p);
            if (d == 0.0) throw DomainError("division by zero in '" + Expr(n->b).print() + "'");
            return evalV(n->a.get(), p) / d;
        }
        case Node::Kind::Pow: return std::pow(evalV(n->a.get(), p), evalV(n->b.get(), p));
        case Node::Kind::Call: {
            const double u = evalV(n->a.get(), p);
            switch (n->fn) {
                case Fn::Sin: return std::sin(u);
                case Fn::Cos: return std::cos(u);
                case Fn::Exp: return std::exp(u);
                case Fn::Atan: return std::atan(u);
                case Fn::Log:
                    if (u <= 0.0) throw DomainError("log of non-positive value in '" + Expr(n->a).print() + "'");
                    return std::log(u);
                case Fn::Sqrt:
                    if (u < 0.0) throw DomainError("sqrt of negative value in '" + Expr(n->a).print() + "'");
                    return std::sqrt(u);
            }
        }
    }
    throw Error("unreachable expression node");
}

Jet2 evalJ(const Node* n, const Vec& p) {
    const int dim = static_cast<int>(p.size());
    switch (n->kind) {
        case Node::Kind::Number: return Jet2::constant(n->num, dim);
        case Node::Kind::Coord: return Jet2::coordinate(p(n->coord), n->coord, dim);
        case Node::Kind::Neg: return -evalJ(n->a.get(), p);
        case Node::Kind::Add: return evalJ(n->a.get(), p) + evalJ(n->b.get(), p);
        case Node::Kind::Sub: return evalJ(n->a.get(), p) - evalJ(n->b.get(), p);
        case Node::Kind::Mul: return evalJ(n->a.get(), p) * evalJ(n->b.get(), p);
        case Node::Kind::Div: return evalJ(n->a.get(), p) / evalJ(n->b.get(), p);
        case Node::Kind::Pow: {
            Jet2 base = evalJ(n->a.get(), p);
            Jet2 ex = evalJ(n->b.get(), p);
            if (ex.g.isZero(0.0) && ex.h.isZero(0.0)) return pow(base, ex.v);
            // variable exponent: u^w = exp(w log u)
            return exp(ex * log(base));
        }
        case Node::Kind::Call: {
            Jet2 u = evalJ(n->a.get(), p);
            switch (n->fn) {
                case Fn::Sin: return sin(u);
                case Fn::Cos: return cos(u);
                case Fn::Exp: return exp(u);
                case Fn::Log: return log(u);
                case Fn::Sqrt: return sqrt(u);
                case Fn::Atan: return atan(u);
            }
        }
    }
    throw Error("unreachable expression node");
}

void printNode(const Node* n, std::ostream& os) {
    switch (n->kind) {
        case Node::Kind::Number: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", n->num);
            os << buf;
            return;
        }
        case Node::Kind::Coord: os << n->name; return;
        case Node::Kind::Neg:
            os << "(-";
            printNode(n->a.get(), os);
            os << ")";
            return;
        case Node::Kind::Add:
        case Node::Kind::Sub:
        case Node::Kind::Mul:
        case Node::Kind::Div:
        case Node::Kind::Pow: {
            const char* op = n->kind == Node::Kind::Add   ? "+"
                             : n->kind == Node::Kind::Sub ? "-"
                             : n->kind == Node::Kind::Mul ? "*"
                             : n->kind == Node::Kind::Div ? "/"
                                                          : "^";
            os << "(";
            printNode(n->a.get(), os);
            os << op;
            printNode(n->b.get(), os);
            os << ")";
            return;
        }
        case Node::Kind::Call:
            os << n->name << "(";
            printNode(n->a.get(), os);
            os << ")";
            return;
    }
}

}  // namespace

double Expr::value(const Vec& p) const {
    if (!root_) throw Error("evaluating empty expression");
    return evalV(root_.get(), p);
}

Jet2 Expr::jet(const Vec& p) const {
    if (!root_) throw Error("evaluating empty expression");
    return evalJ(root_.get(), p);
}

std::string Expr::print() const {
    if (!root_) return "";
    std::ostringstream os;
    printNode(root_.get(), os);
    return os.str();
}

Expr Expr::number(double v) {
    Node n;
    n.kind = Node::Kind::Number;
    n.num = v;
    return Expr(mk(std::move(n)));
}

Expr Expr::coordinate(int index, const std::string& name) {
    Node n;
    n.kind = Node::Kind::Coord;
    n.coord = index;
    n.name = name;
    return Expr(mk(std::move(n)));
}

Expr Expr::negate(const Expr& e) {
    if (!e.root_) throw Error("negating empty expression");
    Node n;
    n.kind = Node::Kind::Neg;
    n.a = e.root_;
    return Expr(mk(std::move(n)));
}

Expr Expr::multiply(const Expr& a, const Expr& b) {
    if (!a.root_ || !b.root_) throw Error("multiplying empty expression");
    Node n;
    n.kind = Node::Kind::Mul;
    n.a = a.root_;
    n.b = b.root_;
    return Expr(mk(std::move(n)));
}

Expr parseExpr(const std::string& text, const std::vector<std::string>& coords) {
    Parser p(text, coords);
    return Expr(p.parse());
}

}  // namespace gentwist
