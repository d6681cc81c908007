#include "ctk/expr.hpp"

#include <cctype>
#include <cmath>
#include <functional>
#include <vector>

namespace ctk {

struct Expr::Node {
    enum Kind { Num, VarX, VarY, Neg, Add, Sub, Mul, Div, Pow, Fun } kind;
    double value = 0.0;
    double (*fun)(double) = nullptr;
    std::unique_ptr<Node> a, b;

    double eval(double x, double y) const {
        switch (kind) {
        case Num: return value;
        case VarX: return x;
        case VarY: return y;
        case Neg: return -a->eval(x, y);
        case Add: return a->eval(x, y) + b->eval(x, y);
        case Sub: return a->eval(x, y) - b->eval(x, y);
        case Mul: return a->eval(x, y) * b->eval(x, y);
        case Div: return a->eval(x, y) / b->eval(x, y);
        case Pow: return std::pow(a->eval(x, y), b->eval(x, y));
        case Fun: return fun(a->eval(x, y));
        }
        return 0.0;
    }
};

namespace {

using NodePtr = std::unique_ptr<Expr::Node>;

class Parser {
  public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr run() {
        NodePtr e = sum();
        skip_ws();
        if (pos_ != s_.size())
            throw ExprError("unexpected trailing input at position " + std::to_string(pos_));
        return e;
    }

  private:
    const std::string& s_;
    size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    char peek() {
        skip_ws();
        return pos_ < s_.size() ? s_[pos_] : '\0';
    }
    bool consume(char c) {
        if (peek() == c) { ++pos_; return true; }
        return false;
    }

    static NodePtr make(Expr::Node::Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
        auto n = std::make_unique<Expr::Node>();
        n->kind = k;
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    NodePtr sum() {
        NodePtr e = term();
        for (;;) {
            if (consume('+')) e = make(Expr::Node::Add, std::move(e), term());
            else if (consume('-')) e = make(Expr::Node::Sub, std::move(e), term());
            else return e;
        }
    }

    NodePtr term() {
        NodePtr e = unary();
        for (;;) {
            if (consume('*')) e = make(Expr::Node::Mul, std::move(e), unary());
            else if (consume('/')) e = make(Expr::Node::Div, std::move(e), unary());
            else return e;
        }
    }

    NodePtr unary() {
        if (consume('-')) return make(Expr::Node::Neg, unary());
        if (consume('+')) return unary();
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (consume('^')) // right associative
            return make(Expr::Node::Pow, std::move(base), unary());
        return base;
    }

    NodePtr atom() {
        char c = peek();
        if (c == '(') {
            ++pos_;
            NodePtr e = sum();
            if (!consume(')')) throw ExprError("missing ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return ident();
        throw ExprError(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        skip_ws();
        size_t end = pos_;
        while (end < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                s_[end] == 'e' || s_[end] == 'E' ||
                ((s_[end] == '+' || s_[end] == '-') && end > pos_ &&
                 (s_[end - 1] == 'e' || s_[end - 1] == 'E'))))
            ++end;
        auto n = make(Expr::Node::Num);
        try {
            n->value = std::stod(s_.substr(pos_, end - pos_));
        } catch (const std::exception&) {
            throw ExprError("bad numeric literal at position " + std::to_string(pos_));
        }
        pos_ = end;
        return n;
    }

    NodePtr ident() {
        skip_ws();
        size_t end = pos_;
        while (end < s_.size() &&
               (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '_'))
            ++end;
        std::string name = s_.substr(pos_, end - pos_);
        pos_ = end;

        if (name == "x") return make(Expr::Node::VarX);
        if (name == "y") return make(Expr::Node::VarY);
        if (name == "pi") {
            auto n = make(Expr::Node::Num);
            n->value = M_PI;
            return n;
        }
        if (name == "e") {
            auto n = make(Expr::Node::Num);
            n->value = M_E;
            return n;
        }

        static const struct { const char* name; double (*f)(double); } funs[] = {
            {"sin", std::sin}, {"cos", std::cos},   {"tan", std::tan},
            {"exp", std::exp}, {"log", std::log},   {"sqrt", std::sqrt},
            {"abs", std::fabs}, {"sinh", std::sinh}, {"cosh", std::cosh},
            {"tanh", std::tanh},
        };
        for (const auto& f : funs) {
            if (name == f.name) {
                if (!consume('(')) throw ExprError("expected '(' after " + name);
                NodePtr arg = sum();
                if (!consume(')')) throw ExprError("missing ')' after " + name + " argument");
                auto n = make(Expr::Node::Fun, std::move(arg));
                n->fun = f.f;
                return n;
            }
        }
        throw ExprError("unknown identifier '" + name + "'");
    }
};

} // namespace

Expr::Expr() = default;
Expr::Expr(Expr&&) noexcept = default;
Expr& Expr::operator=(Expr&&) noexcept = default;
Expr::~Expr() = default;

Expr Expr::parse(const std::string& text) {
    Expr e;
    e.root_ = Parser(text).run();
    return e;
}

double Expr::eval(double x, double y) const { return root_->eval(x, y); }

} // namespace ctk
