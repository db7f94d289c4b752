#pragma once

#include <memory>
#include <string>

namespace polyagg {

/// Arithmetic expression in the variables x, y, z. Supports + - * / ^, parentheses,
/// the constants pi and e, and sin cos tan exp log sqrt abs atan atan2(a, b).
class Expression {
public:
    struct Node;

    Expression();
    /// Throws InputError naming the column of the first offending character.
    static Expression parse(const std::string& text);

    double operator()(double x, double y, double z) const;
    const std::string& text() const { return text_; }

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

}  // namespace polyagg
