#include "geopid/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>

#include "geopid/errors.hpp"

namespace geopid {

namespace {

enum class Fn { kSin, kCos, kSqrt };
enum class BinOp { kAdd, kSub, kMul, kDiv, kPow };

} // namespace

struct Expression::Node {
    enum class Kind { kNumber, kVariable, kUnaryMinus, kBinary, kCall } kind;
    double number = 0.0;
    int var_index = -1;
    BinOp op = BinOp::kAdd;
    Fn fn = Fn::kSin;
    std::shared_ptr<const Node> lhs;
    std::shared_ptr<const Node> rhs;
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

NodePtr make_number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kNumber;
    n->number = v;
    return n;
}

NodePtr make_var(int index) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kVariable;
    n->var_index = index;
    return n;
}

NodePtr make_unary(NodePtr child) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kUnaryMinus;
    n->lhs = std::move(child);
    return n;
}

NodePtr make_binary(BinOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kBinary;
    n->op = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

NodePtr make_call(Fn fn, NodePtr arg) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::kCall;
    n->fn = fn;
    n->lhs = std::move(arg);
    return n;
}

class Parser {
public:
    Parser(const std::string& text, const std::vector<std::string>& variables)
        : text_(text), vars_(variables) {}

    NodePtr run() {
        NodePtr e = expression();
        skip_space();
        if (pos_ != text_.size()) {
            fail("unexpected trailing input");
        }
        return e;
    }

private:
    [[noreturn]] void fail(const std::string& message) const {
        throw ParseError("expression: " + message, 0, static_cast<int>(pos_) + 1);
    }

    void skip_space() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
    }

    bool consume(char c) {
        skip_space();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    char peek() {
        skip_space();
        return pos_ < text_.size() ? text_[pos_] : '\0';
    }

    // expression := term (('+'|'-') term)*
    NodePtr expression() {
        NodePtr lhs = term();
        while (true) {
            if (consume('+')) {
                lhs = make_binary(BinOp::kAdd, lhs, term());
            } else if (consume('-')) {
                lhs = make_binary(BinOp::kSub, lhs, term());
            } else {
                return lhs;
            }
        }
    }

    // term := unary (('*'|'/') unary)*
    NodePtr term() {
        NodePtr lhs = unary();
        while (true) {
            if (consume('*')) {
                lhs = make_binary(BinOp::kMul, lhs, unary());
            } else if (consume('/')) {
                lhs = make_binary(BinOp::kDiv, lhs, unary());
            } else {
                return lhs;
            }
        }
    }

    // unary := ('+'|'-')* power
    NodePtr unary() {
        if (consume('-')) {
            return make_unary(unary());
        }
        if (consume('+')) {
            return unary();
        }
        return power();
    }

    // power := primary ('^' unary)?   (right associative)
    NodePtr power() {
        NodePtr base = primary();
        if (consume('^')) {
            return make_binary(BinOp::kPow, base, unary());
        }
        return base;
    }

    NodePtr primary() {
        skip_space();
        if (pos_ >= text_.size()) {
            fail("expected a value");
        }
        const char c = text_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return identifier();
        }
        if (consume('(')) {
            NodePtr inner = expression();
            if (!consume(')')) {
                fail("expected ')'");
            }
            return inner;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    NodePtr number() {
        const std::size_t start = pos_;
        std::size_t consumed = 0;
        double value = 0.0;
        try {
            value = std::stod(text_.substr(start), &consumed);
        } catch (const std::exception&) {
            fail("malformed number");
        }
        pos_ = start + consumed;
        return make_number(value);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (peek() == '(') {
            Fn fn;
            if (name == "sin") {
                fn = Fn::kSin;
            } else if (name == "cos") {
                fn = Fn::kCos;
            } else if (name == "sqrt") {
                fn = Fn::kSqrt;
            } else {
                pos_ = start;
                fail("unknown function '" + name + "'");
            }
            consume('(');
            NodePtr arg = expression();
            if (!consume(')')) {
                fail("expected ')' after function argument");
            }
            return make_call(fn, arg);
        }
        if (name == "pi") {
            return make_number(std::numbers::pi);
        }
        for (std::size_t i = 0; i < vars_.size(); ++i) {
            if (vars_[i] == name) {
                return make_var(static_cast<int>(i));
            }
        }
        pos_ = start;
        fail("unknown variable '" + name + "'");
    }

    const std::string& text_;
    const std::vector<std::string>& vars_;
    std::size_t pos_ = 0;
};

bool node_is_constant(const Node& n) {
    switch (n.kind) {
        case Node::Kind::kNumber:
            return true;
        case Node::Kind::kVariable:
            return false;
        case Node::Kind::kUnaryMinus:
        case Node::Kind::kCall:
            return node_is_constant(*n.lhs);
        case Node::Kind::kBinary:
            return node_is_constant(*n.lhs) && node_is_constant(*n.rhs);
    }
    return false;
}

double eval_node(const Node& n, const Eigen::VectorXd& vars) {
    switch (n.kind) {
        case Node::Kind::kNumber:
            return n.number;
        case Node::Kind::kVariable:
            if (n.var_index >= vars.size()) {
                throw DimensionError("expression: variable vector too short");
            }
            return vars[n.var_index];
        case Node::Kind::kUnaryMinus:
            return -eval_node(*n.lhs, vars);
        case Node::Kind::kBinary: {
            const double a = eval_node(*n.lhs, vars);
            const double b = eval_node(*n.rhs, vars);
            switch (n.op) {
                case BinOp::kAdd: return a + b;
                case BinOp::kSub: return a - b;
                case BinOp::kMul: return a * b;
                case BinOp::kDiv: return a / b;
                case BinOp::kPow: return std::pow(a, b);
            }
            return 0.0;
        }
        case Node::Kind::kCall: {
            const double a = eval_node(*n.lhs, vars);
            switch (n.fn) {
                case Fn::kSin: return std::sin(a);
                case Fn::kCos: return std::cos(a);
                case Fn::kSqrt: return std::sqrt(a);
            }
            return 0.0;
        }
    }
    return 0.0;
}

} // namespace

Expression Expression::parse(const std::string& text,
                             const std::vector<std::string>& variables) {
    Expression e;
    e.root_ = Parser(text, variables).run();
    e.text_ = text;
    return e;
}

double Expression::eval(const Eigen::VectorXd& vars) const {
    if (!root_) {
        throw ParameterError("expression: evaluating an empty expression");
    }
    return eval_node(*root_, vars);
}

bool Expression::is_constant() const {
    return root_ ? node_is_constant(*root_) : true;
}

} // namespace geopid
