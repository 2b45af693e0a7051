#pragma once

#include "gkflow/linalg.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace gkflow::expr {

/// Complex-valued expression over chart coordinates.
///
/// Grammar: numbers, `i`, `pi`, variables `x1 y1 x2 y2 ...` (real) and `z1 z2 ...` (complex,
/// z_k = x_k + i y_k), binary `+ - * / ^` (right operand of `^` must be an integer literal),
/// unary minus, parentheses, and calls `exp log re im conj abs abs2`.
class Expression {
public:
    /// Throws ParseError with the offending column.
    [[nodiscard]] static Expression parse(std::string_view text, int complex_dim);

    [[nodiscard]] Complex evaluate(const Vec& point) const;
    [[nodiscard]] double real_value(const Vec& point) const { return evaluate(point).real(); }
    [[nodiscard]] const std::string& text() const noexcept { return text_; }

    struct Node;

private:
    std::shared_ptr<const Node> root_;
    std::string text_;
    int complex_dim_ = 0;
};

}  // namespace gkflow::expr
