#pragma once

#include <Eigen/Dense>

#include <memory>
#include <string>
#include <vector>

namespace geopid {

// Infix arithmetic over named state variables with {+, -, *, /, ^, sin, cos,
// sqrt} and the constant pi. Parsed by recursive descent into an evaluable
// tree; no user-defined functions.
class Expression {
public:
    Expression() = default;

    // Throws ParseError with a 1-based column on malformed input, unknown
    // functions, or undeclared variables.
    static Expression parse(const std::string& text,
                            const std::vector<std::string>& variables);

    double eval(const Eigen::VectorXd& vars) const;

    // True when the tree references no variables (constant folding is left
    // to the caller).
    bool is_constant() const;

    const std::string& text() const { return text_; }
    bool empty() const { return root_ == nullptr; }

    struct Node; // exposed for the implementation only

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
};

} // namespace geopid
