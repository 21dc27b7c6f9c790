#pragma once

#include "eqlab/tensor.hpp"

#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

// Einstein-notation expressions over named tensors:
//
//   expr   := ['-'] term (('+'|'-') term)*
//   term   := factor ('*' factor)*
//   factor := rational | ref | 'd(' expr ',' index ')' | '(' expr ')'
//   ref    := name ['[' index (',' index)* ']']
//   index  := ('^'|'_') name
//
// A repeated index pairs one '^' with one '_' and is summed. A bare name is a scalar.
namespace eqlab::dsl {

struct Index {
    std::string name;
    Variance variance = Variance::Down;
    friend bool operator==(const Index&, const Index&) = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { Literal, Ref, Deriv, Product, Sum };
    Kind kind = Kind::Literal;
    Rational value;              // Literal
    std::string name;            // Ref
    std::vector<Index> indices;  // Ref slots, or the single Deriv index
    std::vector<NodePtr> children;
    std::vector<int> signs;      // Sum: +1 / -1 per child
    std::size_t position = 0;    // source offset, for messages

    /// Free indices in signature order.
    std::vector<Index> free;
    /// Names summed over somewhere inside this node.
    std::vector<std::string> bound;
};

bool operator==(const Node& a, const Node& b);

class ParseError : public std::invalid_argument {
public:
    ParseError(const std::string& what, std::size_t position)
        : std::invalid_argument(what + " at position " + std::to_string(position)), position_(position)
    {
    }
    std::size_t position() const { return position_; }

private:
    std::size_t position_;
};

class UnboundName : public std::invalid_argument {
public:
    explicit UnboundName(const std::string& name) : std::invalid_argument("unbound name: " + name), name_(name) {}
    const std::string& name() const { return name_; }

private:
    std::string name_;
};

struct ExpressionPlan {
    NodePtr root;
    const std::vector<Index>& free_indices() const { return root->free; }
    friend bool operator==(const ExpressionPlan& a, const ExpressionPlan& b) { return *a.root == *b.root; }
};

ExpressionPlan parse(std::string_view src);
std::string print(const ExpressionPlan& plan);

using Bindings = std::map<std::string, TensorField>;

/// Result slots follow plan.free_indices(). Throws UnboundName, ValenceMismatch, OrderExhausted.
TensorField evaluate(const ExpressionPlan& plan, const Bindings& bindings);

struct Assignment {
    std::string name;
    std::vector<Index> lhs;
    ExpressionPlan rhs;
    std::size_t line = 0;
};

/// Error tied to a 1-based line of a program.
class ProgramError : public std::runtime_error {
public:
    ProgramError(std::size_t line, const std::string& what, bool unbound = false)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line), unbound_(unbound)
    {
    }
    std::size_t line() const { return line_; }
    bool unbound() const { return unbound_; }

private:
    std::size_t line_;
    bool unbound_;
};

/// One `Name[indices] = expr` per line; '#' starts a comment; blank lines are skipped.
std::vector<Assignment> parse_program(std::string_view text);

/// Evaluates assignments in order. Each result is permuted to its left-hand index order and
/// bound under its name for later lines. Returns the results in order.
std::vector<std::pair<std::string, TensorField>> run_program(const std::vector<Assignment>& program,
                                                             Bindings bindings);

}  // namespace eqlab::dsl
