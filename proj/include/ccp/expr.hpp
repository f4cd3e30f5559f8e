#pragma once

#include <memory>
#include <string>
#include <vector>

namespace ccp {

/// Small arithmetic expressions over point coordinates, used by weight spec
/// files: "abs(x)^0.25", "1 + x*y", "exp(-((x-0.5)^2)/0.1)".
///
/// Variables: x, y, z, w map to coordinates 0..3; x0, x1, ... index directly.
/// Functions: abs, log, exp, sqrt, sin, cos, pow(a,b), min(a,b), max(a,b).
/// Operators: + - * / ^ (right-associative), unary minus, parentheses.
class Expr {
public:
    static Expr parse(const std::string& src);
    double eval(const std::vector<double>& coords) const;
    const std::string& source() const { return src_; }

    struct Node;  // exposed for the implementation file only

private:
    std::shared_ptr<const Node> root_;
    std::string src_;
};

}  // namespace ccp
