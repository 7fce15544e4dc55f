/**
 * @file dsl.cpp
 * @brief Tokenizer, recursive-descent parser, printer, and compiler for the
 *        sequence expression language.
 */

#include "qhol/dsl.hpp"

#include "qhol/builtins.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>

namespace qhol {

namespace {

// ------------------------------------------------------------------ tokens ---

enum class Tok {
    Int,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Semi,
    Assign,
    DotDot,
    Arrow,
    End
};

struct Token {
    Tok kind = Tok::End;
    std::string text;
    std::int64_t ival = 0;
    std::size_t pos = 0;
};

std::vector<Token> tokenize(const std::string& text) {
    std::vector<Token> out;
    const std::size_t n = text.size();
    std::size_t i = 0;
    while (i < n) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            ++i;
            continue;
        }
        const std::size_t start = i;
        if (std::isdigit(static_cast<unsigned char>(c))) {
            std::size_t j = i;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
            Token t{Tok::Int, text.substr(i, j - i), 0, start};
            try {
                t.ival = std::stoll(t.text);
            } catch (const std::out_of_range&) {
                throw ParseError("integer literal out of range", start);
            }
            out.push_back(std::move(t));
            i = j;
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i;
            while (j < n && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_'))
                ++j;
            out.push_back({Tok::Ident, text.substr(i, j - i), 0, start});
            i = j;
            continue;
        }
        switch (c) {
            case '+': out.push_back({Tok::Plus, "+", 0, start}); ++i; break;
            case '-':
                if (i + 1 < n && text[i + 1] == '>') {
                    out.push_back({Tok::Arrow, "->", 0, start});
                    i += 2;
                } else {
                    out.push_back({Tok::Minus, "-", 0, start});
                    ++i;
                }
                break;
            case '*': out.push_back({Tok::Star, "*", 0, start}); ++i; break;
            case '/': out.push_back({Tok::Slash, "/", 0, start}); ++i; break;
            case '^': out.push_back({Tok::Caret, "^", 0, start}); ++i; break;
            case '(': out.push_back({Tok::LParen, "(", 0, start}); ++i; break;
            case ')': out.push_back({Tok::RParen, ")", 0, start}); ++i; break;
            case ',': out.push_back({Tok::Comma, ",", 0, start}); ++i; break;
            case ';': out.push_back({Tok::Semi, ";", 0, start}); ++i; break;
            case '=': out.push_back({Tok::Assign, "=", 0, start}); ++i; break;
            case '.':
                if (i + 1 < n && text[i + 1] == '.') {
                    out.push_back({Tok::DotDot, "..", 0, start});
                    i += 2;
                } else {
                    throw ParseError("stray '.'", start);
                }
                break;
            default:
                throw ParseError(std::string("unexpected character '") + c + "'", start);
        }
    }
    out.push_back({Tok::End, "", 0, n});
    return out;
}

// ------------------------------------------------------------ scalar utils ---

bool scalar_mentions(const Scalar& s, const std::string& name) {
    auto idx = s.ring()->index_of(name);
    if (!idx) return false;
    return s.num().degree_in(*idx) > 0 || s.den().degree_in(*idx) > 0;
}

/// Brings two constants over a common ring (k(q) or k(q, x)).
std::pair<Scalar, Scalar> common_ring(const Scalar& a, const Scalar& b) {
    if (same_ring(a.ring(), b.ring())) return {a, b};
    RingPtr u = ring_union(a.ring(), b.ring());
    return {a.promoted(u), b.promoted(u)};
}

/// Keeps folded constants over the smallest ring so that printing and
/// re-parsing reproduces the same node.
Scalar demoted(const Scalar& s) {
    if (!scalar_mentions(s, "x") && s.ring()->size() > 1)
        return Scalar::parse(q_ring(), s.str());
    return s;
}

DslNodePtr scalar_node(Scalar v) {
    auto n = std::make_shared<DslNode>();
    n->kind = DslNode::Kind::ScalarConst;
    n->value = std::move(v);
    return n;
}

bool is_scalar(const DslNodePtr& n) { return n->kind == DslNode::Kind::ScalarConst; }

std::string resolved_builtin(const std::string& name) {
    return name == "qbinom" ? std::string("Gseq") : name;
}

const std::set<std::string>& form_keywords() {
    static const std::set<std::string> kw{"subst", "sum", "sumZ", "conv", "rescale", "patch"};
    return kw;
}

bool reserved_name(const std::string& s) {
    return s == "q" || s == "x" || form_keywords().count(s) > 0 || is_builtin(s) ||
           s == "qbinom";
}

// ------------------------------------------------------------------ parser ---

struct Parser {
    std::vector<Token> toks;
    std::size_t i = 0;
    bool auto_declare = false;
    std::vector<std::string> declared;
    std::vector<std::string> binders;

    const Token& peek() const { return toks[i]; }
    bool at(Tok k) const { return toks[i].kind == k; }
    Token next() { return toks[i++]; }
    bool accept(Tok k) {
        if (!at(k)) return false;
        ++i;
        return true;
    }
    Token expect(Tok k, const char* what) {
        if (!at(k)) throw ParseError(std::string("expected ") + what, peek().pos);
        return next();
    }

    bool known_var(const std::string& s) const {
        return std::find(binders.begin(), binders.end(), s) != binders.end() ||
               std::find(declared.begin(), declared.end(), s) != declared.end();
    }

    /// Registers a variable use; auto-declares in permissive mode.
    void use_var(const std::string& s) {
        if (known_var(s)) return;
        if (!auto_declare) throw UndeclaredVariableError(s);
        declared.push_back(s);
    }

    void push_binder(const std::string& s, std::size_t pos) {
        if (reserved_name(s)) throw ParseError("'" + s + "' is reserved and cannot bind a sum", pos);
        if (known_var(s)) throw UsageError("sum binder '" + s + "' shadows a declared variable");
        binders.push_back(s);
    }
    void pop_binder() { binders.pop_back(); }

    // ---- affine forms ----

    AffineForm parse_affine() {
        AffineForm f;
        auto add = [&f](const std::string& var, std::int64_t coeff) {
            for (auto& [v, c] : f.terms)
                if (v == var) {
                    c += coeff;
                    return;
                }
            f.terms.emplace_back(var, coeff);
        };
        bool first = true;
        for (;;) {
            std::int64_t sign = 1;
            if (accept(Tok::Minus))
                sign = -1;
            else if (accept(Tok::Plus))
                sign = 1;
            else if (!first)
                break;
            if (at(Tok::Int)) {
                std::int64_t v = next().ival;
                if (accept(Tok::Star)) {
                    Token id = expect(Tok::Ident, "a variable after '*'");
                    if (reserved_name(id.text))
                        throw ParseError("'" + id.text + "' is not a variable", id.pos);
                    use_var(id.text);
                    add(id.text, sign * v);
                } else {
                    f.offset += sign * v;
                }
            } else if (at(Tok::Ident)) {
                Token id = next();
                if (reserved_name(id.text))
                    throw ParseError("'" + id.text + "' is not a variable", id.pos);
                use_var(id.text);
                add(id.text, sign);
            } else {
                throw ParseError("expected an affine term", peek().pos);
            }
            first = false;
            if (!at(Tok::Plus) && !at(Tok::Minus)) break;
        }
        std::erase_if(f.terms, [](const auto& t) { return t.second == 0; });
        return f;
    }

    Point parse_point() {
        Point p;
        auto one = [this]() {
            std::int64_t sign = accept(Tok::Minus) ? -1 : 1;
            return sign * expect(Tok::Int, "an integer coordinate").ival;
        };
        if (accept(Tok::LParen)) {
            p.push_back(one());
            while (accept(Tok::Comma)) p.push_back(one());
            expect(Tok::RParen, "')'");
        } else {
            p.push_back(one());
        }
        return p;
    }

    // ---- expressions ----

    DslNodePtr parse_expr() {
        DslNodePtr lhs;
        if (accept(Tok::Minus)) {
            DslNodePtr t = parse_term();
            lhs = combine(DslNode::Kind::Mul, scalar_node(Scalar::integer(q_ring(), -1)), t);
        } else {
            lhs = parse_term();
        }
        for (;;) {
            if (accept(Tok::Plus))
                lhs = combine(DslNode::Kind::Add, lhs, parse_term());
            else if (at(Tok::Minus) && toks[i].text == "-")
                (void)next(), lhs = combine(DslNode::Kind::Sub, lhs, parse_term());
            else
                break;
        }
        return lhs;
    }

    DslNodePtr parse_term() {
        DslNodePtr lhs = parse_factor();
        for (;;) {
            if (accept(Tok::Star)) {
                lhs = combine(DslNode::Kind::Mul, lhs, parse_factor());
            } else if (at(Tok::Slash)) {
                std::size_t pos = next().pos;
                DslNodePtr rhs = parse_factor();
                if (!is_scalar(rhs))
                    throw ParseError("division is only defined by scalar constants", pos);
                Scalar d = *rhs->value;
                if (d.is_zero()) throw ParseError("division by zero", pos);
                if (is_scalar(lhs)) {
                    auto [a, b] = common_ring(*lhs->value, d);
                    lhs = scalar_node(demoted(a / b));
                } else {
                    lhs = combine(DslNode::Kind::Mul, lhs, scalar_node(d.inverse()));
                }
            } else {
                break;
            }
        }
        return lhs;
    }

    DslNodePtr parse_factor() {
        DslNodePtr base = parse_atom();
        if (!accept(Tok::Caret)) return base;
        if (at(Tok::Ident)) {
            Token id = next();
            if (reserved_name(id.text))
                throw ParseError("'" + id.text + "' is not a variable", id.pos);
            if (!is_scalar(base))
                throw ParseError("an exponent variable needs a scalar constant base", id.pos);
            use_var(id.text);
            auto n = std::make_shared<DslNode>();
            n->kind = DslNode::Kind::ScalarExp;
            n->value = *base->value;
            n->var = id.text;
            return n;
        }
        std::int64_t sign = accept(Tok::Minus) ? -1 : 1;
        Token e = expect(Tok::Int, "an integer or variable exponent");
        std::int64_t exp = sign * e.ival;
        if (is_scalar(base)) {
            if (base->value->is_zero() && exp < 0)
                throw ParseError("zero cannot carry a negative exponent", e.pos);
            return scalar_node(demoted(base->value->pow(exp)));
        }
        if (exp < 0)
            throw ParseError("sequences only take nonnegative integer exponents", e.pos);
        if (exp == 1) return base;
        auto n = std::make_shared<DslNode>();
        n->kind = DslNode::Kind::Pow;
        n->kids = {base};
        n->power = exp;
        return n;
    }

    DslNodePtr parse_atom() {
        if (at(Tok::Int)) return scalar_node(Scalar::integer(q_ring(), next().ival));
        if (accept(Tok::LParen)) {
            DslNodePtr e = parse_expr();
            expect(Tok::RParen, "')'");
            return e;
        }
        if (!at(Tok::Ident)) throw ParseError("expected an expression", peek().pos);
        Token id = next();
        const std::string& s = id.text;
        if (s == "q") return scalar_node(Scalar::variable(q_ring(), "q"));
        if (s == "x") return scalar_node(Scalar::variable(qx_ring(), "x"));
        if (form_keywords().count(s)) return parse_form(s, id.pos);
        if (is_builtin(s) || s == "qbinom") {
            expect(Tok::LParen, "'(' after a builtin name");
            auto n = std::make_shared<DslNode>();
            n->kind = DslNode::Kind::Builtin;
            n->name = s;
            n->args.push_back(parse_affine());
            while (accept(Tok::Comma)) n->args.push_back(parse_affine());
            expect(Tok::RParen, "')'");
            int want = builtin_rank(resolved_builtin(s));
            if (static_cast<int>(n->args.size()) != want)
                throw ArityError(s, want, static_cast<int>(n->args.size()));
            return n;
        }
        if (at(Tok::LParen)) throw ParseError("unknown function '" + s + "'", id.pos);
        throw ParseError("a bare variable is not a sequence; variables may appear in builtin "
                         "arguments, sum ranges, substitutions, and exponents",
                         id.pos);
    }

    DslNodePtr parse_form(const std::string& kw, std::size_t pos) {
        expect(Tok::LParen, "'('");
        auto n = std::make_shared<DslNode>();
        if (kw == "subst") {
            n->kind = DslNode::Kind::Subst;
            n->kids = {parse_expr()};
            expect(Tok::Semi, "';' before the substitution maps");
            do {
                Token id = expect(Tok::Ident, "a variable to substitute");
                if (!known_var(id.text)) throw UndeclaredVariableError(id.text);
                for (const auto& [v, a] : n->maps)
                    if (v == id.text)
                        throw UsageError("variable '" + v + "' substituted twice");
                expect(Tok::Arrow, "'->'");
                n->maps.emplace_back(id.text, parse_affine());
            } while (accept(Tok::Comma));
        } else if (kw == "sum") {
            n->kind = DslNode::Kind::SumBounded;
            Token id = expect(Tok::Ident, "a summation variable");
            expect(Tok::Assign, "'='");
            n->lo = parse_affine();
            expect(Tok::DotDot, "'..'");
            n->hi = parse_affine();
            expect(Tok::Comma, "','");
            push_binder(id.text, id.pos);
            n->var = id.text;
            n->kids = {parse_expr()};
            pop_binder();
        } else if (kw == "sumZ") {
            n->kind = DslNode::Kind::SumLine;
            Token id = expect(Tok::Ident, "a summation variable");
            expect(Tok::Comma, "','");
            push_binder(id.text, id.pos);
            n->var = id.text;
            n->kids = {parse_expr()};
            pop_binder();
        } else if (kw == "conv") {
            n->kind = DslNode::Kind::Conv;
            n->kids.push_back(parse_expr());
            expect(Tok::Comma, "','");
            n->kids.push_back(parse_expr());
        } else if (kw == "rescale") {
            n->kind = DslNode::Kind::Rescale;
            std::int64_t sign = accept(Tok::Minus) ? -1 : 1;
            n->power = sign * expect(Tok::Int, "an integer rescale factor").ival;
            if (n->power == 0) throw ParseError("rescale factor must be nonzero", pos);
            expect(Tok::Comma, "','");
            n->kids = {parse_expr()};
        } else {  // patch
            n->kind = DslNode::Kind::Patch;
            n->kids = {parse_expr()};
            expect(Tok::Semi, "';' before the patch entries");
            do {
                Point p = parse_point();
                expect(Tok::Arrow, "'->'");
                std::size_t vpos = peek().pos;
                DslNodePtr v = parse_expr();
                if (!is_scalar(v))
                    throw ParseError("patch values must be scalar constants", vpos);
                n->patches.emplace_back(std::move(p), *v->value);
            } while (accept(Tok::Comma));
        }
        expect(Tok::RParen, "')'");
        return n;
    }

    /// Builds a binary node, folding when both operands are constants.
    DslNodePtr combine(DslNode::Kind k, DslNodePtr a, DslNodePtr b) {
        if (is_scalar(a) && is_scalar(b)) {
            auto [x, y] = common_ring(*a->value, *b->value);
            Scalar v = k == DslNode::Kind::Add   ? x + y
                       : k == DslNode::Kind::Sub ? x - y
                                                 : x * y;
            return scalar_node(demoted(v));
        }
        auto n = std::make_shared<DslNode>();
        n->kind = k;
        n->kids = {std::move(a), std::move(b)};
        return n;
    }
};

// ----------------------------------------------------------------- printer ---

/// Operator precedence for printing: additive 1, multiplicative 2,
/// power-like 3, atoms 4.
int node_prec(const DslNode& n) {
    switch (n.kind) {
        case DslNode::Kind::Add:
        case DslNode::Kind::Sub: return 1;
        case DslNode::Kind::Mul: return 2;
        case DslNode::Kind::Pow:
        case DslNode::Kind::ScalarExp: return 3;
        default: return 4;
    }
}

/// A scalar constant as expression text: bare digits or a variable when that
/// re-parses as an atom, otherwise parenthesized canonical text.
std::string scalar_text(const Scalar& v) {
    if (v.is_rational_constant()) {
        BigRat r = v.rational_value();
        if (denominator(r) == 1 && r >= 0) return numerator(r).str();
    }
    std::string s = v.str();
    if (s == "q" || s == "x") return s;
    return "(" + s + ")";
}

void print_node(std::ostream& os, const DslNode& n, int parent_prec);

void print_child(std::ostream& os, const DslNode& n, int parent_prec) {
    if (node_prec(n) < parent_prec) {
        os << "(";
        print_node(os, n, 1);
        os << ")";
    } else {
        print_node(os, n, parent_prec);
    }
}

void print_node(std::ostream& os, const DslNode& n, int parent_prec) {
    switch (n.kind) {
        case DslNode::Kind::ScalarConst: os << scalar_text(*n.value); break;
        case DslNode::Kind::ScalarExp: os << scalar_text(*n.value) << "^" << n.var; break;
        case DslNode::Kind::Builtin: {
            os << n.name << "(";
            for (std::size_t k = 0; k < n.args.size(); ++k)
                os << (k ? ", " : "") << n.args[k].str();
            os << ")";
            break;
        }
        case DslNode::Kind::Add:
            print_child(os, *n.kids[0], 1);
            os << " + ";
            print_child(os, *n.kids[1], 2);
            break;
        case DslNode::Kind::Sub:
            print_child(os, *n.kids[0], 1);
            os << " - ";
            print_child(os, *n.kids[1], 2);
            break;
        case DslNode::Kind::Mul:
            print_child(os, *n.kids[0], 2);
            os << " * ";
            print_child(os, *n.kids[1], 3);
            break;
        case DslNode::Kind::Pow:
            print_child(os, *n.kids[0], 4);
            os << "^" << n.power;
            break;
        case DslNode::Kind::Subst: {
            os << "subst(";
            print_node(os, *n.kids[0], 1);
            os << "; ";
            for (std::size_t k = 0; k < n.maps.size(); ++k)
                os << (k ? ", " : "") << n.maps[k].first << " -> " << n.maps[k].second.str();
            os << ")";
            break;
        }
        case DslNode::Kind::SumBounded:
            os << "sum(" << n.var << " = " << n.lo.str() << ".." << n.hi.str() << ", ";
            print_node(os, *n.kids[0], 1);
            os << ")";
            break;
        case DslNode::Kind::SumLine:
            os << "sumZ(" << n.var << ", ";
            print_node(os, *n.kids[0], 1);
            os << ")";
            break;
        case DslNode::Kind::Conv:
            os << "conv(";
            print_node(os, *n.kids[0], 1);
            os << ", ";
            print_node(os, *n.kids[1], 1);
            os << ")";
            break;
        case DslNode::Kind::Rescale:
            os << "rescale(" << n.power << ", ";
            print_node(os, *n.kids[0], 1);
            os << ")";
            break;
        case DslNode::Kind::Patch: {
            os << "patch(";
            print_node(os, *n.kids[0], 1);
            os << "; ";
            for (std::size_t k = 0; k < n.patches.size(); ++k) {
                os << (k ? ", " : "") << point_to_string(n.patches[k].first) << " -> "
                   << scalar_text(n.patches[k].second);
            }
            os << ")";
            break;
        }
    }
    (void)parent_prec;
}

// ---------------------------------------------------------------- compiler ---

bool node_needs_x(const DslNode& n) {
    if (n.value && scalar_mentions(*n.value, "x")) return true;
    if (n.kind == DslNode::Kind::Builtin &&
        !builtin_params(resolved_builtin(n.name)).empty())
        return true;
    for (const auto& [p, v] : n.patches)
        if (scalar_mentions(v, "x")) return true;
    for (const auto& k : n.kids)
        if (node_needs_x(*k)) return true;
    return false;
}

int axis_of(const std::vector<std::string>& vars, const std::string& v) {
    auto it = std::find(vars.begin(), vars.end(), v);
    if (it == vars.end())
        throw UsageError("variable '" + v + "' is not in scope");
    return static_cast<int>(it - vars.begin());
}

/// Affine form as a matrix row over `vars` plus its constant.
std::pair<std::vector<std::int64_t>, std::int64_t> affine_row(
    const AffineForm& f, const std::vector<std::string>& vars) {
    std::vector<std::int64_t> row(vars.size(), 0);
    for (const auto& [v, c] : f.terms) row[static_cast<std::size_t>(axis_of(vars, v))] += c;
    return {std::move(row), f.offset};
}

Sequence const_sequence(const Scalar& v, const std::vector<std::string>& vars,
                        const RingPtr& ring) {
    Scalar c = v.promoted(ring);
    return Sequence::make(static_cast<int>(vars.size()), ring, vars, v.str(),
                          [c](std::span<const std::int64_t>) { return c; });
}

Sequence compile_node(const DslNode& n, const std::vector<std::string>& vars,
                      const RingPtr& ring);

Sequence compile_builtin(const DslNode& n, const std::vector<std::string>& vars,
                         const RingPtr& ring) {
    Sequence bt = builtin_sequence(resolved_builtin(n.name), ring);
    const int br = bt.rank();
    bool identity = static_cast<int>(vars.size()) == br;
    for (int k = 0; identity && k < br; ++k)
        identity = n.args[static_cast<std::size_t>(k)].is_variable(vars[static_cast<std::size_t>(k)]);
    if (identity) return bt.with_vars(vars);
    std::vector<std::vector<std::int64_t>> A;
    std::vector<std::int64_t> b;
    for (const auto& arg : n.args) {
        auto [row, off] = affine_row(arg, vars);
        A.push_back(std::move(row));
        b.push_back(off);
    }
    return seq_affine(bt, A, b, vars);
}

Sequence compile_node(const DslNode& n, const std::vector<std::string>& vars,
                      const RingPtr& ring) {
    using K = DslNode::Kind;
    const int r = static_cast<int>(vars.size());
    switch (n.kind) {
        case K::ScalarConst: return const_sequence(*n.value, vars, ring);
        case K::ScalarExp: {
            int axis = axis_of(vars, n.var);
            Scalar base = n.value->promoted(ring);
            if (base.is_zero()) throw UsageError("exponential base must be nonzero");
            std::ostringstream name;
            name << scalar_text(*n.value) << "^" << n.var;
            return Sequence::make(r, ring, vars, name.str(),
                                  [base, axis](std::span<const std::int64_t> p) {
                                      return base.pow(p[static_cast<std::size_t>(axis)]);
                                  });
        }
        case K::Builtin: return compile_builtin(n, vars, ring);
        case K::Add: {
            Sequence a = compile_node(*n.kids[0], vars, ring);
            Sequence b = compile_node(*n.kids[1], vars, ring);
            return seq_add(a, b);
        }
        case K::Sub: {
            Sequence a = compile_node(*n.kids[0], vars, ring);
            Sequence b = compile_node(*n.kids[1], vars, ring);
            return seq_add(a, seq_scale(Scalar::integer(ring, -1), b));
        }
        case K::Mul: {
            if (is_scalar(n.kids[0]))
                return seq_scale(n.kids[0]->value->promoted(ring),
                                 compile_node(*n.kids[1], vars, ring));
            if (is_scalar(n.kids[1]))
                return seq_scale(n.kids[1]->value->promoted(ring),
                                 compile_node(*n.kids[0], vars, ring));
            return seq_mul(compile_node(*n.kids[0], vars, ring),
                           compile_node(*n.kids[1], vars, ring));
        }
        case K::Pow: {
            Sequence base = compile_node(*n.kids[0], vars, ring);
            Sequence acc = base;
            for (std::int64_t k = 1; k < n.power; ++k) acc = seq_mul(acc, base);
            return acc;
        }
        case K::Subst: {
            Sequence f = compile_node(*n.kids[0], vars, ring);
            std::vector<std::vector<std::int64_t>> A;
            std::vector<std::int64_t> b;
            for (int row = 0; row < r; ++row) {
                const std::string& v = vars[static_cast<std::size_t>(row)];
                const AffineForm* m = nullptr;
                for (const auto& [mv, ma] : n.maps)
                    if (mv == v) m = &ma;
                if (m) {
                    auto [rw, off] = affine_row(*m, vars);
                    A.push_back(std::move(rw));
                    b.push_back(off);
                } else {
                    std::vector<std::int64_t> rw(vars.size(), 0);
                    rw[static_cast<std::size_t>(row)] = 1;
                    A.push_back(std::move(rw));
                    b.push_back(0);
                }
            }
            return seq_affine(f, A, b, vars);
        }
        case K::SumBounded: {
            std::vector<std::string> inner = vars;
            inner.push_back(n.var);
            Sequence body = compile_node(*n.kids[0], inner, ring);
            Sequence h = seq_multisum_bounded(body);  // rank r + 2: (vars..., a, b)
            std::vector<std::vector<std::int64_t>> A;
            std::vector<std::int64_t> b;
            for (int row = 0; row < r; ++row) {
                std::vector<std::int64_t> rw(vars.size(), 0);
                rw[static_cast<std::size_t>(row)] = 1;
                A.push_back(std::move(rw));
                b.push_back(0);
            }
            for (const AffineForm* bound : {&n.lo, &n.hi}) {
                auto [rw, off] = affine_row(*bound, vars);
                A.push_back(std::move(rw));
                b.push_back(off);
            }
            return seq_affine(h, A, b, vars);
        }
        case K::SumLine: {
            std::vector<std::string> inner = vars;
            inner.push_back(n.var);
            Sequence body = compile_node(*n.kids[0], inner, ring);
            return seq_multisum_line(body).with_vars(vars);
        }
        case K::Conv: {
            Sequence f = compile_node(*n.kids[0], vars, ring);
            Sequence g = compile_node(*n.kids[1], vars, ring);
            for (int split = r; split >= 0; --split) {
                bool ok = (split == 0 || g.find_strict(split).has_value()) &&
                          (split == r || f.find_per_prefix(split).has_value());
                if (ok) return seq_convolve(f, g, split);
            }
            return seq_convolve(f, g, r);  // surfaces the library's error
        }
        case K::Rescale:
            return seq_rescale_q(compile_node(*n.kids[0], vars, ring), n.power);
        case K::Patch: {
            Sequence f = compile_node(*n.kids[0], vars, ring);
            std::vector<std::pair<Point, Scalar>> changes;
            for (const auto& [p, v] : n.patches) {
                if (static_cast<int>(p.size()) != r)
                    throw UsageError("patch point " + point_to_string(p) + " has rank " +
                                     std::to_string(p.size()) + ", expected " +
                                     std::to_string(r));
                changes.emplace_back(p, v.promoted(ring));
            }
            return seq_patch_finite(f, changes);
        }
    }
    throw Error("unreachable expression kind");
}

}  // namespace

// ------------------------------------------------------------- public API ---

std::string AffineForm::str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [v, c] : terms) {
        if (c == 0) continue;
        if (first) {
            if (c == -1)
                os << "-";
            else if (c != 1)
                os << c << "*";
        } else {
            os << (c < 0 ? " - " : " + ");
            std::int64_t a = c < 0 ? -c : c;
            if (a != 1) os << a << "*";
        }
        os << v;
        first = false;
    }
    if (first) {
        os << offset;
    } else if (offset != 0) {
        os << (offset < 0 ? " - " : " + ") << (offset < 0 ? -offset : offset);
    }
    return os.str();
}

bool AffineForm::is_variable(const std::string& var) const {
    return offset == 0 && terms.size() == 1 && terms[0].first == var && terms[0].second == 1;
}

bool DslNode::operator==(const DslNode& o) const {
    if (kind != o.kind || var != o.var || name != o.name || power != o.power) return false;
    if (value.has_value() != o.value.has_value()) return false;
    if (value && !(same_ring(value->ring(), o.value->ring()) && *value == *o.value)) return false;
    if (args != o.args || maps != o.maps || lo != o.lo || hi != o.hi) return false;
    if (patches.size() != o.patches.size()) return false;
    for (std::size_t k = 0; k < patches.size(); ++k) {
        if (patches[k].first != o.patches[k].first) return false;
        const Scalar& a = patches[k].second;
        const Scalar& b = o.patches[k].second;
        if (!(same_ring(a.ring(), b.ring()) && a == b)) return false;
    }
    if (kids.size() != o.kids.size()) return false;
    for (std::size_t k = 0; k < kids.size(); ++k)
        if (!(*kids[k] == *o.kids[k])) return false;
    return true;
}

bool DslExpression::operator==(const DslExpression& o) const {
    return vars == o.vars && root && o.root && *root == *o.root;
}

std::string DslExpression::str() const {
    std::ostringstream os;
    print_node(os, *root, 1);
    return os.str();
}

DslExpression dsl_parse(const std::string& text, std::vector<std::string> vars) {
    for (const auto& v : vars)
        if (reserved_name(v)) throw UsageError("'" + v + "' is reserved and cannot be a variable");
    Parser p;
    p.toks = tokenize(text);
    p.auto_declare = false;
    p.declared = vars;
    DslNodePtr root = p.parse_expr();
    if (!p.at(Tok::End)) throw ParseError("trailing input after the expression", p.peek().pos);
    return DslExpression{std::move(vars), std::move(root)};
}

DslExpression dsl_parse(const std::string& text) {
    Parser p;
    p.toks = tokenize(text);
    p.auto_declare = true;
    DslNodePtr root = p.parse_expr();
    if (!p.at(Tok::End)) throw ParseError("trailing input after the expression", p.peek().pos);
    return DslExpression{std::move(p.declared), std::move(root)};
}

AffineForm dsl_parse_affine(const std::string& text, const std::vector<std::string>& vars) {
    Parser p;
    p.toks = tokenize(text);
    p.auto_declare = false;
    p.declared = vars;
    AffineForm f = p.parse_affine();
    if (!p.at(Tok::End)) throw ParseError("trailing input after the affine form", p.peek().pos);
    return f;
}

RingPtr dsl_ring_for(const DslExpression& e) {
    return node_needs_x(*e.root) ? qx_ring() : q_ring();
}

Sequence dsl_compile(const DslExpression& e, RingPtr sring) {
    if (!e.root) throw UsageError("empty expression");
    RingPtr ring = sring ? std::move(sring) : dsl_ring_for(e);
    return compile_node(*e.root, e.vars, ring);
}

}  // namespace qhol
