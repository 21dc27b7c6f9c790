#include "eqlab/dsl.hpp"

#include "eqlab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace eqlab::dsl {

bool operator==(const Node& a, const Node& b)
{
    if (a.kind != b.kind || a.value != b.value || a.name != b.name || a.indices != b.indices || a.signs != b.signs ||
        a.children.size() != b.children.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.children.size(); ++k) {
        if (!(*a.children[k] == *b.children[k])) {
            return false;
        }
    }
    return true;
}

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) { return std::find(v.begin(), v.end(), s) != v.end(); }

void add_bound(std::vector<std::string>& bound, const std::vector<std::string>& more)
{
    for (const auto& b : more) {
        if (!contains(bound, b)) {
            bound.push_back(b);
        }
    }
}

// Index bookkeeping shared by refs (one group of slots) and products (one group per factor).
// Fills node.free and node.bound; throws ParseError on discipline violations.
void resolve_indices(Node& node, const std::vector<std::vector<Index>>& groups,
                     const std::vector<std::vector<std::string>>& inner_bound)
{
    std::vector<std::string> bound;
    for (const auto& b : inner_bound) {
        for (const auto& name : b) {
            if (contains(bound, name)) {
                throw ParseError("index '" + name + "' is summed twice", node.position);
            }
            bound.push_back(name);
        }
    }
    std::vector<const Index*> all;
    for (const auto& g : groups) {
        for (const auto& idx : g) {
            all.push_back(&idx);
        }
    }
    std::vector<Index> free;
    std::vector<std::string> contracted;
    for (std::size_t k = 0; k < all.size(); ++k) {
        const Index& idx = *all[k];
        if (contains(bound, idx.name)) {
            throw ParseError("index '" + idx.name + "' appears more than twice", node.position);
        }
        std::size_t count = 0;
        const Index* other = nullptr;
        for (const Index* j : all) {
            if (j->name == idx.name) {
                ++count;
                if (j != &idx) {
                    other = j;
                }
            }
        }
        if (count > 2) {
            throw ParseError("index '" + idx.name + "' appears more than twice", node.position);
        }
        if (count == 2) {
            if (other->variance == idx.variance) {
                throw ParseError("repeated index '" + idx.name + "' must pair '^' with '_'", node.position);
            }
            if (!contains(contracted, idx.name)) {
                contracted.push_back(idx.name);
            }
            continue;
        }
        free.push_back(idx);
    }

    std::size_t indexed_groups = 0;
    for (const auto& g : groups) {
        indexed_groups += g.empty() ? 0 : 1;
    }
    const bool cross_contraction = groups.size() > 1 && !contracted.empty();
    if (groups.size() > 1 && (indexed_groups > 1 || cross_contraction)) {
        // Contravariant indices first, then covariant, each in order of appearance.
        std::stable_partition(free.begin(), free.end(), [](const Index& i) { return i.variance == Variance::Up; });
    }
    add_bound(bound, contracted);
    node.free = std::move(free);
    node.bound = std::move(bound);
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr parse_all()
    {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != src_.size()) {
            fail("unexpected '" + std::string(1, src_[pos_]) + "'");
        }
        return e;
    }

    std::string name_token()
    {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
            fail("expected a name");
        }
        while (pos_ < src_.size() &&
               (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
            ++pos_;
        }
        return std::string(src_.substr(start, pos_ - start));
    }

    std::vector<Index> index_list()
    {
        std::vector<Index> out;
        if (!peek('[')) {
            return out;
        }
        expect('[');
        do {
            out.push_back(index());
        } while (accept(','));
        expect(']');
        return out;
    }

    void skip_ws()
    {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
    }
    std::size_t pos() const { return pos_; }
    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    bool peek(char c)
    {
        skip_ws();
        return pos_ < src_.size() && src_[pos_] == c;
    }
    bool accept(char c)
    {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c)
    {
        if (!accept(c)) {
            fail(std::string("expected '") + c + "'");
        }
    }

    Index index()
    {
        skip_ws();
        Index idx;
        if (accept('^')) {
            idx.variance = Variance::Up;
        } else if (accept('_')) {
            idx.variance = Variance::Down;
        } else {
            fail("expected '^' or '_' before an index");
        }
        skip_ws();
        if (pos_ >= src_.size() || !std::isalpha(static_cast<unsigned char>(src_[pos_]))) {
            fail("expected an index name");
        }
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalnum(static_cast<unsigned char>(src_[pos_]))) {
            ++pos_;
        }
        idx.name = std::string(src_.substr(start, pos_ - start));
        return idx;
    }

    NodePtr expr()
    {
        skip_ws();
        auto node = std::make_shared<Node>();
        node->kind = Node::Kind::Sum;
        node->position = pos_;
        int sign = accept('-') ? -1 : 1;
        while (true) {
            node->children.push_back(term());
            node->signs.push_back(sign);
            if (accept('+')) {
                sign = 1;
            } else if (accept('-')) {
                sign = -1;
            } else {
                break;
            }
        }
        if (node->children.size() == 1 && node->signs.front() == 1) {
            return node->children.front();
        }
        // Summands agree slot by slot in variance and carry the same names; later summands are
        // aligned to the first by name.
        const auto& first = node->children.front()->free;
        for (const auto& c : node->children) {
            bool ok = c->free.size() == first.size();
            for (std::size_t k = 0; ok && k < first.size(); ++k) {
                ok = c->free[k].variance == first[k].variance &&
                     std::find(first.begin(), first.end(), c->free[k]) != first.end();
            }
            if (!ok) {
                throw ParseError("free indices of summands disagree in name, variance or order", c->position);
            }
            add_bound(node->bound, c->bound);
        }
        node->free = first;
        return node;
    }

    NodePtr term()
    {
        skip_ws();
        const std::size_t start = pos_;
        std::vector<NodePtr> factors{factor()};
        while (accept('*')) {
            factors.push_back(factor());
        }
        if (factors.size() == 1) {
            return factors.front();
        }
        auto node = std::make_shared<Node>();
        node->kind = Node::Kind::Product;
        node->position = start;
        std::vector<std::vector<Index>> groups;
        std::vector<std::vector<std::string>> inner;
        for (const auto& f : factors) {
            groups.push_back(f->free);
            inner.push_back(f->bound);
        }
        node->children = std::move(factors);
        resolve_indices(*node, groups, inner);
        return node;
    }

    NodePtr factor()
    {
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= src_.size()) {
            fail("unexpected end of input");
        }
        const char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            return literal();
        }
        if (accept('(')) {
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (!std::isalpha(static_cast<unsigned char>(c))) {
            fail("expected a number, name, 'd(' or '('");
        }
        std::string name = name_token();
        if (name == "d" && peek('(')) {
            expect('(');
            NodePtr inner = expr();
            expect(',');
            const std::size_t ipos = pos_;
            Index idx = index();
            if (idx.variance != Variance::Down) {
                throw ParseError("derivative index must be covariant ('_')", ipos);
            }
            expect(')');
            auto node = std::make_shared<Node>();
            node->kind = Node::Kind::Deriv;
            node->position = start;
            node->indices = {idx};
            node->children = {inner};
            if (contains(inner->bound, idx.name)) {
                throw ParseError("index '" + idx.name + "' appears more than twice", ipos);
            }
            node->bound = inner->bound;
            node->free = inner->free;
            auto hit = std::find_if(node->free.begin(), node->free.end(),
                                    [&](const Index& i) { return i.name == idx.name; });
            if (hit == node->free.end()) {
                node->free.push_back(idx);
            } else if (hit->variance == Variance::Up) {
                node->free.erase(hit);
                node->bound.push_back(idx.name);
            } else {
                throw ParseError("repeated index '" + idx.name + "' must pair '^' with '_'", ipos);
            }
            return node;
        }
        auto node = std::make_shared<Node>();
        node->kind = Node::Kind::Ref;
        node->position = start;
        node->name = std::move(name);
        node->indices = index_list();
        resolve_indices(*node, {node->indices}, {});
        return node;
    }

    NodePtr literal()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            const std::size_t s = pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                ++pos_;
            }
            return std::string(src_.substr(s, pos_ - s));
        };
        const std::string num = digits();
        std::string den = "1";
        // A '/' directly after the digits belongs to the literal.
        if (pos_ < src_.size() && src_[pos_] == '/') {
            ++pos_;
            den = digits();
            if (den.empty()) {
                fail("expected a denominator");
            }
        }
        auto node = std::make_shared<Node>();
        node->kind = Node::Kind::Literal;
        node->position = start;
        try {
            node->value = rational_from_strings(num, den);
        } catch (const std::exception&) {
            throw ParseError("invalid rational literal", start);
        }
        return node;
    }
};

void print_node(const Node& n, std::ostringstream& out)
{
    switch (n.kind) {
    case Node::Kind::Literal:
        out << to_string(n.value);
        break;
    case Node::Kind::Ref:
        out << n.name;
        if (!n.indices.empty()) {
            out << '[';
            for (std::size_t k = 0; k < n.indices.size(); ++k) {
                out << (k ? "," : "") << (n.indices[k].variance == Variance::Up ? '^' : '_') << n.indices[k].name;
            }
            out << ']';
        }
        break;
    case Node::Kind::Deriv:
        out << "d(";
        print_node(*n.children.front(), out);
        out << ",_" << n.indices.front().name << ')';
        break;
    case Node::Kind::Product:
        for (std::size_t k = 0; k < n.children.size(); ++k) {
            if (k) {
                out << '*';
            }
            const bool paren = n.children[k]->kind == Node::Kind::Sum;
            out << (paren ? "(" : "");
            print_node(*n.children[k], out);
            out << (paren ? ")" : "");
        }
        break;
    case Node::Kind::Sum:
        for (std::size_t k = 0; k < n.children.size(); ++k) {
            if (k) {
                out << (n.signs[k] < 0 ? " - " : " + ");
            } else if (n.signs[k] < 0) {
                out << '-';
            }
            const bool paren = n.children[k]->kind == Node::Kind::Sum;
            out << (paren ? "(" : "");
            print_node(*n.children[k], out);
            out << (paren ? ")" : "");
        }
        break;
    }
}

struct Labeled {
    TensorField t;
    std::vector<Index> labels;
};

// Sums the product of the factors over every label not in `out`.
TensorField einsum(const std::vector<Labeled>& factors, const std::vector<Index>& out,
                   const std::vector<std::string>& summed, std::size_t dim)
{
    std::vector<std::string> labels;
    for (const auto& i : out) {
        labels.push_back(i.name);
    }
    labels.insert(labels.end(), summed.begin(), summed.end());
    std::vector<std::vector<std::size_t>> slot_to_label;
    int order = 1 << 20;
    for (const auto& f : factors) {
        std::vector<std::size_t> map;
        for (const auto& l : f.labels) {
            map.push_back(static_cast<std::size_t>(std::find(labels.begin(), labels.end(), l.name) - labels.begin()));
        }
        slot_to_label.push_back(std::move(map));
        order = std::min(order, f.t.order());
    }
    Valence v;
    for (const auto& i : out) {
        v.push_back(i.variance);
    }
    TensorField result(dim, v, order);
    std::vector<std::vector<std::size_t>> idx(factors.size());
    for (std::size_t k = 0; k < factors.size(); ++k) {
        idx[k].resize(factors[k].labels.size());
    }
    const std::size_t n_out = out.size();
    for_each_index(dim, labels.size(), [&](std::span<const std::size_t> assign) {
        for (std::size_t k = 0; k < factors.size(); ++k) {
            for (std::size_t s = 0; s < idx[k].size(); ++s) {
                idx[k][s] = assign[slot_to_label[k][s]];
            }
        }
        const JetScalar& first = factors.front().t.at(idx.front());
        if (first.is_zero()) {
            return;
        }
        JetScalar prod = first;
        for (std::size_t k = 1; k < factors.size(); ++k) {
            prod = prod * factors[k].t.at(idx[k]);
        }
        result.at(assign.first(n_out)) += prod.truncated(order);
    });
    return result;
}

// Reorders slots labelled `from` into the order `to` (same names).
TensorField align(const TensorField& t, const std::vector<Index>& from, const std::vector<Index>& to)
{
    if (from == to) {
        return t;
    }
    std::vector<std::size_t> perm;
    for (const Index& i : to) {
        perm.push_back(static_cast<std::size_t>(std::find(from.begin(), from.end(), i) - from.begin()));
    }
    return permute_slots(t, perm);
}

class Evaluator {
public:
    explicit Evaluator(const Bindings& b) : bindings_(b)
    {
        for (const auto& [name, t] : b) {
            if (dim_ == 0) {
                dim_ = t.dim();
            } else if (dim_ != t.dim()) {
                throw DimensionMismatch("bindings disagree on dimension");
            }
            literal_order_ = std::max(literal_order_, t.order());
        }
    }

    TensorField eval(const Node& n)
    {
        switch (n.kind) {
        case Node::Kind::Literal: {
            if (dim_ == 0) {
                throw InvalidArgument("cannot evaluate without any bound tensor to fix the dimension");
            }
            return TensorField::scalar(JetScalar::constant(dim_, literal_order_, n.value));
        }
        case Node::Kind::Ref: {
            const auto it = bindings_.find(n.name);
            if (it == bindings_.end()) {
                throw UnboundName(n.name);
            }
            const TensorField& t = it->second;
            if (t.rank() != n.indices.size()) {
                throw ValenceMismatch(n.name + " has " + std::to_string(t.rank()) + " slots, written with " +
                                      std::to_string(n.indices.size()));
            }
            for (std::size_t k = 0; k < n.indices.size(); ++k) {
                if (t.valence()[k] != n.indices[k].variance) {
                    throw ValenceMismatch("slot " + std::to_string(k + 1) + " of " + n.name + " is " +
                                          to_string(t.valence()[k]));
                }
            }
            if (n.bound.empty()) {
                return t;
            }
            return einsum({{t, n.indices}}, n.free, n.bound, dim_);
        }
        case Node::Kind::Deriv: {
            const Node& inner = *n.children.front();
            TensorField t = eval(inner);
            Valence v = t.valence();
            v.push_back(Variance::Down);
            std::vector<TensorField> partials;
            for (std::size_t k = 0; k < dim_; ++k) {
                partials.push_back(partial_deriv_field(t, k));
            }
            const std::size_t r = t.rank();
            TensorField d = build_tensor(dim_, v, [&](std::span<const std::size_t> idx) {
                return partials[idx[r]].at(idx.first(r));
            });
            std::vector<Index> labels = inner.free;
            labels.push_back(n.indices.front());
            if (labels.size() == n.free.size()) {
                return d;
            }
            return einsum({{std::move(d), labels}}, n.free, {n.indices.front().name}, dim_);
        }
        case Node::Kind::Product: {
            std::vector<Labeled> factors;
            std::vector<std::string> summed;
            for (const auto& c : n.children) {
                factors.push_back({eval(*c), c->free});
                for (const auto& i : c->free) {
                    if (std::none_of(n.free.begin(), n.free.end(), [&](const Index& f) { return f.name == i.name; }) &&
                        !contains(summed, i.name)) {
                        summed.push_back(i.name);
                    }
                }
            }
            return einsum(factors, n.free, summed, dim_);
        }
        case Node::Kind::Sum: {
            TensorField acc = Rational(n.signs.front()) * eval(*n.children.front());
            for (std::size_t k = 1; k < n.children.size(); ++k) {
                TensorField t = align(eval(*n.children[k]), n.children[k]->free, n.free);
                acc = n.signs[k] < 0 ? acc - t : acc + t;
            }
            return acc;
        }
        }
        throw std::logic_error("unknown node kind");
    }

private:
    const Bindings& bindings_;
    std::size_t dim_ = 0;
    int literal_order_ = 0;
};

}  // namespace

ExpressionPlan parse(std::string_view src) { return {Parser(src).parse_all()}; }

std::string print(const ExpressionPlan& plan)
{
    std::ostringstream out;
    print_node(*plan.root, out);
    return out.str();
}

TensorField evaluate(const ExpressionPlan& plan, const Bindings& bindings) { return Evaluator(bindings).eval(*plan.root); }

std::vector<Assignment> parse_program(std::string_view text)
{
    std::vector<Assignment> out;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(start, end - start);
        ++line_no;
        start = end + 1;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (end == text.size()) {
                break;
            }
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ProgramError(line_no, "expected 'Name[indices] = expr'");
        }
        try {
            Assignment a;
            a.line = line_no;
            Parser lhs(line.substr(0, eq));
            a.name = lhs.name_token();
            a.lhs = lhs.index_list();
            lhs.skip_ws();
            if (lhs.pos() != eq) {
                lhs.fail("unexpected text before '='");
            }
            a.rhs = parse(line.substr(eq + 1));
            std::vector<Index> l = a.lhs, r = a.rhs.free_indices();
            auto by_name = [](const Index& x, const Index& y) { return x.name < y.name; };
            std::sort(l.begin(), l.end(), by_name);
            std::sort(r.begin(), r.end(), by_name);
            if (l != r) {
                throw ProgramError(line_no, "left-hand indices do not match the free indices of the right side");
            }
            out.push_back(std::move(a));
        } catch (const ParseError& e) {
            throw ProgramError(line_no, e.what());
        }
        if (end == text.size()) {
            break;
        }
    }
    return out;
}

std::vector<std::pair<std::string, TensorField>> run_program(const std::vector<Assignment>& program, Bindings bindings)
{
    std::vector<std::pair<std::string, TensorField>> results;
    for (const Assignment& a : program) {
        try {
            TensorField t = evaluate(a.rhs, bindings);
            const auto& free = a.rhs.free_indices();
            std::vector<std::size_t> perm;
            for (const Index& i : a.lhs) {
                perm.push_back(static_cast<std::size_t>(
                    std::find_if(free.begin(), free.end(), [&](const Index& f) { return f.name == i.name; }) -
                    free.begin()));
            }
            t = permute_slots(t, perm);
            bindings.insert_or_assign(a.name, t);
            results.emplace_back(a.name, std::move(t));
        } catch (const UnboundName& e) {
            throw ProgramError(a.line, e.what(), true);
        } catch (const std::exception& e) {
            throw ProgramError(a.line, e.what());
        }
    }
    return results;
}

}  // namespace eqlab::dsl
