#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "modval/tensor.hpp"

namespace modval {

// A small bra-ket expression language for states and observables.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/' | 'kron') unary | unary)*   -- juxtaposition multiplies
//   unary   := '-' unary | primary
//   primary := NUMBER | 'i' | 'sqrt' '(' expr ')' | 'proj' '(' expr ')'
//            | '|' LABEL '>' | NAME | '(' expr ')'
//
// 'kron' may also be written as the symbol U+2297 and '*' as U+00B7.  Kets
// name two-level basis states through an alias table; NAME refers to one of
// the built-in single-qubit operators I, sx, sy, sz, S (S being the Stokes
// operator, identical to sz in the H/V basis).  Values are scalars, kets or
// operators: '*' applies operators and scales, 'kron' builds product states
// and product operators, proj(k) is the normalized projector onto k.
//
// Examples:
//   (|up> kron |dn> - |dn> kron |up>) / sqrt(2)
//   0.5 * (sx kron I) + 0.5 * (I kron sy)
//   proj(|H> + i |V>)

struct SourcePos {
    std::size_t line = 1;
    std::size_t column = 1;
};

// Parse or evaluation failure, carrying the source position.
class ExprError : public Error {
public:
    ExprError(const std::string& message, SourcePos pos);
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

struct Ast {
    enum class Kind {
        Number,   // number
        Imag,     // i
        KetName,  // |name>
        OpName,   // bare identifier
        Sqrt,
        Proj,
        Neg,
        Add,
        Sub,
        Mul,
        Div,
        Kron,
    };

    Kind kind;
    SourcePos pos;
    double number = 0.0;
    std::string name;
    std::vector<Ast> children;
};

// Maps ket labels to basis indices of a two-level factor.  The default
// table covers 0/1, H/V, L/R, up/dn and O/NO.
class AliasTable {
public:
    static AliasTable defaults();

    // "A,B" maps |A> to index 0 and |B> to index 1 (overwriting earlier
    // entries); several pairs may be joined with ';'.
    void add_pairs(const std::string& spec);

    const std::map<std::string, std::size_t>& entries() const { return entries_; }

private:
    std::map<std::string, std::size_t> entries_;
};

using Value = std::variant<Complex, Ket, Operator>;

Ast parse(std::string_view source);

Value evaluate(const Ast& ast, const AliasTable& aliases = AliasTable::defaults());

// Canonical text form; parsing it back yields an equivalent expression, and
// printing is idempotent.
std::string to_text(const Ast& ast);

// Convenience wrappers that also check the result type.
Ket evaluate_ket(std::string_view source, const AliasTable& aliases = AliasTable::defaults());
Operator evaluate_operator(std::string_view source,
                           const AliasTable& aliases = AliasTable::defaults());

} // namespace modval
