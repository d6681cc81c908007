#pragma once
#include <memory>
#include <stdexcept>
#include <string>

namespace ctk {

// Parse error for analytic expression strings in configs.
struct ExprError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A compiled scalar expression in the variables x, y with constants pi and e.
// Grammar: + - * / ^ (right assoc), unary minus, parentheses, function calls
// (sin cos tan exp log sqrt abs sinh cosh tanh), numeric literals.
class Expr {
  public:
    // Throws ExprError on malformed input.
    static Expr parse(const std::string& text);

    double eval(double x, double y = 0.0) const;

    Expr(Expr&&) noexcept;
    Expr& operator=(Expr&&) noexcept;
    ~Expr();

    struct Node; // expression tree node (definition internal to the parser)

  private:
    Expr();
    std::unique_ptr<Node> root_;
};

} // namespace ctk
