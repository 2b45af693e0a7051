#include "gkflow/expression.hpp"

#include "gkflow/errors.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

namespace gkflow::expr {

struct Expression::Node {
    enum class Kind { constant, real_coord, imag_coord, complex_coord, unary_minus, binary, call };
    Kind kind = Kind::constant;
    Complex value{};
    int index = 0;
    char op = 0;
    std::string function;
    std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    Parser(std::string_view text, int complex_dim) : text_(text), complex_dim_(complex_dim) {}

    NodePtr parse() {
        NodePtr root = parse_sum();
        skip_space();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& what) const {
        throw ParseError("expression column " + std::to_string(pos_ + 1) + ": " + what + " in '" +
                         std::string(text_) + "'");
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr make_binary(char op, NodePtr lhs, NodePtr rhs) {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->children = {std::move(lhs), std::move(rhs)};
        return n;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        while (true) {
            if (accept('+')) lhs = make_binary('+', lhs, parse_product());
            else if (accept('-')) lhs = make_binary('-', lhs, parse_product());
            else return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        while (true) {
            if (accept('*')) lhs = make_binary('*', lhs, parse_unary());
            else if (accept('/')) lhs = make_binary('/', lhs, parse_unary());
            else return lhs;
        }
    }

    NodePtr parse_unary() {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::unary_minus;
            n->children = {parse_unary()};
            return n;
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        if (!accept('^')) return base;
        skip_space();
        const std::size_t start = pos_;
        bool negative = false;
        if (pos_ < text_.size() && text_[pos_] == '-') {
            negative = true;
            ++pos_;
        }
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            pos_ = start;
            fail("exponent must be an integer literal");
        }
        int exponent = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
            exponent = exponent * 10 + (text_[pos_++] - '0');
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = '^';
        n->index = negative ? -exponent : exponent;
        n->children = {std::move(base)};
        return n;
    }

    NodePtr parse_atom() {
        skip_space();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            if (!accept(')')) fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_identifier();
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr parse_number() {
        const char* begin = text_.data() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) fail("malformed number");
        pos_ += static_cast<std::size_t>(end - begin);
        auto n = std::make_shared<Node>();
        n->value = v;
        return n;
    }

    NodePtr parse_identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        auto n = std::make_shared<Node>();
        if (name == "i") {
            n->value = Complex(0.0, 1.0);
            return n;
        }
        if (name == "pi") {
            n->value = std::numbers::pi;
            return n;
        }
        if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y' || name[0] == 'z') &&
            name.find_first_not_of("0123456789", 1) == std::string::npos) {
            const int k = std::stoi(name.substr(1));
            if (k < 1 || k > complex_dim_) {
                pos_ = start;
                fail("coordinate '" + name + "' out of range");
            }
            n->kind = name[0] == 'x' ? Node::Kind::real_coord
                                     : (name[0] == 'y' ? Node::Kind::imag_coord : Node::Kind::complex_coord);
            n->index = k - 1;
            return n;
        }
        static const char* const kFunctions[] = {"exp", "log", "re", "im", "conj", "abs", "abs2"};
        for (const char* fn : kFunctions) {
            if (name == fn) {
                if (!accept('(')) fail("expected '(' after " + name);
                n->kind = Node::Kind::call;
                n->function = name;
                n->children = {parse_sum()};
                if (!accept(')')) fail("expected ')'");
                return n;
            }
        }
        pos_ = start;
        fail("unknown identifier '" + name + "'");
    }

    std::string_view text_;
    int complex_dim_;
    std::size_t pos_ = 0;
};

Complex eval(const Node& n, const Vec& x) {
    switch (n.kind) {
        case Node::Kind::constant: return n.value;
        case Node::Kind::real_coord: return x(2 * n.index);
        case Node::Kind::imag_coord: return x(2 * n.index + 1);
        case Node::Kind::complex_coord: return {x(2 * n.index), x(2 * n.index + 1)};
        case Node::Kind::unary_minus: return -eval(*n.children[0], x);
        case Node::Kind::binary: {
            const Complex a = eval(*n.children[0], x);
            if (n.op == '^') {
                Complex acc = 1.0;
                for (int k = 0; k < std::abs(n.index); ++k) acc *= a;
                return n.index < 0 ? 1.0 / acc : acc;
            }
            const Complex b = eval(*n.children[1], x);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                default: return a / b;
            }
        }
        case Node::Kind::call: {
            const Complex a = eval(*n.children[0], x);
            if (n.function == "exp") return std::exp(a);
            if (n.function == "log") return std::log(a);
            if (n.function == "re") return a.real();
            if (n.function == "im") return a.imag();
            if (n.function == "conj") return std::conj(a);
            if (n.function == "abs") return std::abs(a);
            return std::norm(a);
        }
    }
    return {};
}

}  // namespace

Expression Expression::parse(std::string_view text, int complex_dim) {
    if (complex_dim < 1) throw DimensionError("expression needs a positive complex dimension");
    Expression e;
    e.root_ = Parser(text, complex_dim).parse();
    e.text_ = std::string(text);
    e.complex_dim_ = complex_dim;
    return e;
}

Complex Expression::evaluate(const Vec& point) const {
    if (point.size() != 2 * complex_dim_) throw DimensionError("expression evaluated at a point of wrong dimension");
    return eval(*root_, point);
}

}  // namespace gkflow::expr
