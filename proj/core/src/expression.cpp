#include "polyagg/expression.hpp"

#include "polyagg/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

namespace polyagg {

struct Expression::Node {
    enum class Kind { number, variable, unary_minus, binary, call };
    Kind kind = Kind::number;
    double value = 0.0;
    int variable = 0;
    char op = 0;
    std::string function;
    std::vector<std::shared_ptr<const Node>> args;

    double eval(const double* xyz) const
    {
        switch (kind) {
        case Kind::number:
            return value;
        case Kind::variable:
            return xyz[variable];
        case Kind::unary_minus:
            return -args[0]->eval(xyz);
        case Kind::binary: {
            const double a = args[0]->eval(xyz);
            const double b = args[1]->eval(xyz);
            switch (op) {
            case '+': return a + b;
            case '-': return a - b;
            case '*': return a * b;
            case '/': return a / b;
            default: return std::pow(a, b);
            }
        }
        case Kind::call:
            break;
        }
        const double a = args[0]->eval(xyz);
        if (function == "atan2") return std::atan2(a, args[1]->eval(xyz));
        if (function == "sin") return std::sin(a);
        if (function == "cos") return std::cos(a);
        if (function == "tan") return std::tan(a);
        if (function == "exp") return std::exp(a);
        if (function == "log") return std::log(a);
        if (function == "sqrt") return std::sqrt(a);
        if (function == "abs") return std::abs(a);
        return std::atan(a);
    }
};

namespace {

using NodePtr = std::shared_ptr<const Expression::Node>;
using Node = Expression::Node;

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    NodePtr parse()
    {
        NodePtr n = expr();
        skip();
        if (pos_ != s_.size()) fail("unexpected character");
        return n;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw InputError("expression '" + s_ + "': " + what + " at column " +
                         std::to_string(pos_ + 1));
    }

    void skip()
    {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool accept(char c)
    {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static NodePtr binary(char op, NodePtr a, NodePtr b)
    {
        auto n = std::make_shared<Node>();
        n->kind = Node::Kind::binary;
        n->op = op;
        n->args = {std::move(a), std::move(b)};
        return n;
    }

    NodePtr expr()
    {
        NodePtr n = term();
        while (true) {
            if (accept('+')) n = binary('+', n, term());
            else if (accept('-')) n = binary('-', n, term());
            else return n;
        }
    }

    NodePtr term()
    {
        NodePtr n = unary();
        while (true) {
            if (accept('*')) n = binary('*', n, unary());
            else if (accept('/')) n = binary('/', n, unary());
            else return n;
        }
    }

    NodePtr unary()
    {
        if (accept('-')) {
            auto n = std::make_shared<Node>();
            n->kind = Node::Kind::unary_minus;
            n->args = {unary()};
            return n;
        }
        if (accept('+')) return unary();
        NodePtr base = primary();
        if (accept('^')) return binary('^', base, unary());
        return base;
    }

    NodePtr primary()
    {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        const char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr n = expr();
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(s_.substr(pos_), &used);
            } catch (const std::exception&) {
                fail("malformed number");
            }
            pos_ += used;
            auto n = std::make_shared<Node>();
            n->value = v;
            return n;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            const std::size_t start = pos_;
            while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
                ++pos_;
            }
            const std::string name = s_.substr(start, pos_ - start);
            auto n = std::make_shared<Node>();
            if (name == "x" || name == "y" || name == "z") {
                n->kind = Node::Kind::variable;
                n->variable = name[0] - 'x';
                return n;
            }
            if (name == "pi") {
                n->value = std::numbers::pi;
                return n;
            }
            if (name == "e") {
                n->value = std::numbers::e;
                return n;
            }
            static const std::vector<std::string> unary_functions{
                "sin", "cos", "tan", "exp", "log", "sqrt", "abs", "atan"};
            const bool is_atan2 = name == "atan2";
            if (!is_atan2 && std::find(unary_functions.begin(), unary_functions.end(), name) ==
                                 unary_functions.end()) {
                pos_ = start;
                fail("unknown identifier '" + name + "'");
            }
            n->kind = Node::Kind::call;
            n->function = name;
            if (!accept('(')) fail("expected '(' after " + name);
            n->args.push_back(expr());
            if (is_atan2) {
                if (!accept(',')) fail("atan2 takes two arguments");
                n->args.push_back(expr());
            }
            if (!accept(')')) fail("expected ')'");
            return n;
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    const std::string& s_;
    std::size_t pos_ = 0;
};

}  // namespace

Expression::Expression() : root_(std::make_shared<Node>()), text_("0") {}

Expression Expression::parse(const std::string& text)
{
    Expression e;
    e.root_ = Parser(text).parse();
    e.text_ = text;
    return e;
}

double Expression::operator()(double x, double y, double z) const
{
    const double xyz[3] = {x, y, z};
    return root_->eval(xyz);
}

}  // namespace polyagg
