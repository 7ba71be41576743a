#include "modval/expr.hpp"

#include <charconv>
#include <cmath>

#include "modval/json_io.hpp"

namespace modval {

namespace {

constexpr std::size_t kMaxNesting = 200;

enum class TokKind { Number, Ident, Ket, Plus, Minus, Star, Slash, Kron, LParen, RParen, End };

struct Token {
    TokKind kind;
    SourcePos pos;
    double number = 0.0;
    std::string text{};
};

bool is_label_char(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_';
}

bool is_ident_start(char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}

bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> tokens;
        while (true) {
            skip_whitespace();
            SourcePos pos{line_, column_};
            if (at_end()) {
                tokens.push_back({TokKind::End, pos});
                return tokens;
            }
            char c = peek();
            if (is_digit(c)) {
                tokens.push_back(lex_number(pos));
            } else if (is_ident_start(c)) {
                std::string word = lex_word();
                if (word == "kron")
                    tokens.push_back({TokKind::Kron, pos});
                else
                    tokens.push_back({TokKind::Ident, pos, 0.0, std::move(word)});
            } else if (c == '|') {
                tokens.push_back(lex_ket(pos));
            } else {
                tokens.push_back(lex_symbol(pos));
            }
        }
    }

private:
    bool at_end() const { return offset_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const {
        return offset_ + ahead < src_.size() ? src_[offset_ + ahead] : '\0';
    }

    void advance(std::size_t bytes = 1, std::size_t columns = 1) {
        offset_ += bytes;
        column_ += columns;
    }

    void skip_whitespace() {
        while (!at_end()) {
            char c = peek();
            if (c == '\n') {
                ++offset_;
                ++line_;
                column_ = 1;
            } else if (c == ' ' || c == '\t' || c == '\r') {
                advance();
            } else {
                break;
            }
        }
    }

    Token lex_number(SourcePos pos) {
        std::size_t start = offset_;
        while (is_digit(peek()))
            advance();
        if (peek() == '.' && is_digit(peek(1))) {
            advance();
            while (is_digit(peek()))
                advance();
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t probe = 1;
            if (peek(probe) == '+' || peek(probe) == '-')
                ++probe;
            if (is_digit(peek(probe))) {
                advance(probe, probe);
                while (is_digit(peek()))
                    advance();
            }
        }
        const char* first = src_.data() + start;
        const char* last = src_.data() + offset_;
        double value = 0.0;
        auto [end, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || end != last)
            throw ExprError("number out of range", pos);
        return {TokKind::Number, pos, value};
    }

    std::string lex_word() {
        std::size_t start = offset_;
        while (is_label_char(peek()))
            advance();
        return std::string(src_.substr(start, offset_ - start));
    }

    Token lex_ket(SourcePos pos) {
        advance(); // '|'
        std::size_t start = offset_;
        while (is_label_char(peek()))
            advance();
        std::string label(src_.substr(start, offset_ - start));
        if (label.empty())
            throw ExprError("empty ket label", pos);
        if (peek() != '>')
            throw ExprError("unterminated ket: expected '>' after |" + label, pos);
        advance();
        return {TokKind::Ket, pos, 0.0, std::move(label)};
    }

    Token lex_symbol(SourcePos pos) {
        char c = peek();
        switch (c) {
        case '+': advance(); return {TokKind::Plus, pos};
        case '-': advance(); return {TokKind::Minus, pos};
        case '*': advance(); return {TokKind::Star, pos};
        case '/': advance(); return {TokKind::Slash, pos};
        case '(': advance(); return {TokKind::LParen, pos};
        case ')': advance(); return {TokKind::RParen, pos};
        default: break;
        }
        // Two unicode spellings: U+2297 (circled times) and U+00B7 (middle dot).
        auto byte = [&](std::size_t k) { return static_cast<unsigned char>(peek(k)); };
        if (byte(0) == 0xE2 && byte(1) == 0x8A && byte(2) == 0x97) {
            advance(3, 1);
            return {TokKind::Kron, pos};
        }
        if (byte(0) == 0xC2 && byte(1) == 0xB7) {
            advance(2, 1);
            return {TokKind::Star, pos};
        }
        throw ExprError(std::string("unexpected character '") +
                            (static_cast<unsigned char>(c) < 0x80 ? std::string(1, c)
                                                                  : std::string("\\x")) +
                            "'",
                        pos);
    }

    std::string_view src_;
    std::size_t offset_ = 0;
    std::size_t line_ = 1;
    std::size_t column_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}

    Ast run() {
        Ast ast = parse_expr();
        if (current().kind != TokKind::End)
            throw ExprError("unexpected trailing input", current().pos);
        return ast;
    }

private:
    const Token& current() const { return tokens_[index_]; }
    const Token& take() { return tokens_[index_++]; }

    struct NestingGuard {
        explicit NestingGuard(std::size_t& depth) : depth_(depth) {
            if (++depth_ > kMaxNesting)
                throw ExprError("expression nests too deeply", SourcePos{});
        }
        ~NestingGuard() { --depth_; }
        std::size_t& depth_;
    };

    static Ast node(Ast::Kind kind, SourcePos pos) { return Ast{kind, pos, 0.0, {}, {}}; }

    static Ast binary(Ast::Kind kind, SourcePos pos, Ast lhs, Ast rhs) {
        Ast n = node(kind, pos);
        n.children.push_back(std::move(lhs));
        n.children.push_back(std::move(rhs));
        return n;
    }

    bool starts_primary(const Token& tok) const {
        switch (tok.kind) {
        case TokKind::Number:
        case TokKind::Ident:
        case TokKind::Ket:
        case TokKind::LParen:
            return true;
        default:
            return false;
        }
    }

    Ast parse_expr() {
        Ast lhs = parse_term();
        while (current().kind == TokKind::Plus || current().kind == TokKind::Minus) {
            const Token& op = take();
            Ast rhs = parse_term();
            lhs = binary(op.kind == TokKind::Plus ? Ast::Kind::Add : Ast::Kind::Sub, op.pos,
                         std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    Ast parse_term() {
        Ast lhs = parse_unary();
        while (true) {
            const Token& tok = current();
            if (tok.kind == TokKind::Star || tok.kind == TokKind::Slash ||
                tok.kind == TokKind::Kron) {
                take();
                Ast rhs = parse_unary();
                Ast::Kind kind = tok.kind == TokKind::Star   ? Ast::Kind::Mul
                                 : tok.kind == TokKind::Slash ? Ast::Kind::Div
                                                              : Ast::Kind::Kron;
                lhs = binary(kind, tok.pos, std::move(lhs), std::move(rhs));
            } else if (starts_primary(tok)) {
                Ast rhs = parse_primary();
                lhs = binary(Ast::Kind::Mul, tok.pos, std::move(lhs), std::move(rhs));
            } else {
                return lhs;
            }
        }
    }

    // The guard counts constructs that recurse (groups, calls, unary minus),
    // so the cap tracks source nesting depth rather than grammar levels.
    Ast parse_unary() {
        if (current().kind == TokKind::Minus) {
            NestingGuard guard(depth_);
            const Token& op = take();
            Ast n = node(Ast::Kind::Neg, op.pos);
            n.children.push_back(parse_unary());
            return n;
        }
        return parse_primary();
    }

    Ast parse_primary() {
        const Token& tok = take();
        switch (tok.kind) {
        case TokKind::Number: {
            Ast n = node(Ast::Kind::Number, tok.pos);
            n.number = tok.number;
            return n;
        }
        case TokKind::Ket: {
            Ast n = node(Ast::Kind::KetName, tok.pos);
            n.name = tok.text;
            return n;
        }
        case TokKind::Ident: {
            if (tok.text == "i")
                return node(Ast::Kind::Imag, tok.pos);
            if (tok.text == "sqrt" || tok.text == "proj") {
                if (current().kind != TokKind::LParen)
                    throw ExprError("expected '(' after " + tok.text, current().pos);
                NestingGuard guard(depth_);
                take();
                Ast arg = parse_expr();
                if (current().kind != TokKind::RParen)
                    throw ExprError("expected ')' to close " + tok.text, current().pos);
                take();
                Ast n = node(tok.text == "sqrt" ? Ast::Kind::Sqrt : Ast::Kind::Proj, tok.pos);
                n.children.push_back(std::move(arg));
                return n;
            }
            Ast n = node(Ast::Kind::OpName, tok.pos);
            n.name = tok.text;
            return n;
        }
        case TokKind::LParen: {
            NestingGuard guard(depth_);
            Ast inner = parse_expr();
            if (current().kind != TokKind::RParen)
                throw ExprError("expected ')'", current().pos);
            take();
            return inner;
        }
        case TokKind::Kron:
            throw ExprError("'kron' is an infix operator and needs a left operand", tok.pos);
        case TokKind::RParen:
            throw ExprError("unmatched ')'", tok.pos);
        case TokKind::End:
            throw ExprError("unexpected end of expression", tok.pos);
        default:
            throw ExprError("expected a value", tok.pos);
        }
    }

    std::vector<Token> tokens_;
    std::size_t index_ = 0;
    std::size_t depth_ = 0;
};

// With the article, for error messages.
const char* value_type_phrase(const Value& v) {
    switch (v.index()) {
    case 0: return "a scalar";
    case 1: return "a ket";
    default: return "an operator";
    }
}

class Evaluator {
public:
    explicit Evaluator(const AliasTable& aliases) : aliases_(aliases) {}

    Value eval(const Ast& ast) {
        switch (ast.kind) {
        case Ast::Kind::Number:
            return Complex(ast.number, 0.0);
        case Ast::Kind::Imag:
            return Complex(0.0, 1.0);
        case Ast::Kind::KetName:
            return eval_ket_name(ast);
        case Ast::Kind::OpName:
            return eval_op_name(ast);
        case Ast::Kind::Sqrt:
            return eval_sqrt(ast);
        case Ast::Kind::Proj:
            return eval_proj(ast);
        case Ast::Kind::Neg:
            return eval_neg(ast);
        case Ast::Kind::Add:
        case Ast::Kind::Sub:
            return eval_add_sub(ast);
        case Ast::Kind::Mul:
            return eval_mul(ast);
        case Ast::Kind::Div:
            return eval_div(ast);
        case Ast::Kind::Kron:
            return eval_kron(ast);
        }
        throw ExprError("malformed expression tree", ast.pos);
    }

private:
    Value eval_ket_name(const Ast& ast) {
        const auto& table = aliases_.entries();
        auto it = table.find(ast.name);
        if (it == table.end())
            throw ExprError("unknown ket label '" + ast.name +
                                "' (add a basis pair to name it)",
                            ast.pos);
        return basis_ket(2, it->second);
    }

    Value eval_op_name(const Ast& ast) {
        if (ast.name == "I")
            return identity_op(HilbertShape({2}));
        if (ast.name == "sx")
            return sigma_x();
        if (ast.name == "sy")
            return sigma_y();
        if (ast.name == "sz" || ast.name == "S")
            return sigma_z();
        throw ExprError("unknown operator '" + ast.name + "' (expected I, sx, sy, sz or S)",
                        ast.pos);
    }

    Value eval_sqrt(const Ast& ast) {
        Value arg = eval(ast.children[0]);
        if (auto* s = std::get_if<Complex>(&arg))
            return std::sqrt(*s);
        throw ExprError(std::string("sqrt expects a scalar, got ") + value_type_phrase(arg),
                        ast.pos);
    }

    Value eval_proj(const Ast& ast) {
        Value arg = eval(ast.children[0]);
        if (auto* k = std::get_if<Ket>(&arg))
            return wrap(ast.pos, [&] { return projector(*k); });
        throw ExprError(std::string("proj expects a ket, got ") + value_type_phrase(arg),
                        ast.pos);
    }

    Value eval_neg(const Ast& ast) {
        Value arg = eval(ast.children[0]);
        if (auto* s = std::get_if<Complex>(&arg))
            return -*s;
        if (auto* k = std::get_if<Ket>(&arg))
            return scale(Complex(-1.0), *k);
        return scale(Complex(-1.0), std::get<Operator>(arg));
    }

    Value eval_add_sub(const Ast& ast) {
        const bool is_add = ast.kind == Ast::Kind::Add;
        const char* verb = is_add ? "add" : "subtract";
        Value lhs = eval(ast.children[0]);
        Value rhs = eval(ast.children[1]);
        if (lhs.index() != rhs.index())
            throw ExprError(std::string("cannot ") + verb + " " + value_type_phrase(lhs) +
                                " and " + value_type_phrase(rhs),
                            ast.pos);
        if (auto* s = std::get_if<Complex>(&lhs))
            return is_add ? *s + std::get<Complex>(rhs) : *s - std::get<Complex>(rhs);
        if (auto* k = std::get_if<Ket>(&lhs))
            return wrap(ast.pos, [&] {
                return is_add ? add(*k, std::get<Ket>(rhs)) : sub(*k, std::get<Ket>(rhs));
            });
        return wrap(ast.pos, [&] {
            const auto& a = std::get<Operator>(lhs);
            const auto& b = std::get<Operator>(rhs);
            return is_add ? add(a, b) : sub(a, b);
        });
    }

    Value eval_mul(const Ast& ast) {
        Value lhs = eval(ast.children[0]);
        Value rhs = eval(ast.children[1]);
        if (auto* s = std::get_if<Complex>(&lhs)) {
            if (auto* t = std::get_if<Complex>(&rhs))
                return *s * *t;
            if (auto* k = std::get_if<Ket>(&rhs))
                return scale(*s, *k);
            return scale(*s, std::get<Operator>(rhs));
        }
        if (auto* s = std::get_if<Complex>(&rhs)) {
            if (auto* k = std::get_if<Ket>(&lhs))
                return scale(*s, *k);
            return scale(*s, std::get<Operator>(lhs));
        }
        if (auto* op = std::get_if<Operator>(&lhs)) {
            if (auto* k = std::get_if<Ket>(&rhs))
                return wrap(ast.pos, [&] { return apply(*op, *k); });
            return wrap(ast.pos, [&] { return matmul(*op, std::get<Operator>(rhs)); });
        }
        if (std::holds_alternative<Ket>(lhs) && std::holds_alternative<Ket>(rhs))
            throw ExprError("cannot multiply two kets; use 'kron' for a product state", ast.pos);
        throw ExprError("cannot multiply a ket by an operator from the left", ast.pos);
    }

    Value eval_div(const Ast& ast) {
        Value lhs = eval(ast.children[0]);
        Value rhs = eval(ast.children[1]);
        auto* s = std::get_if<Complex>(&rhs);
        if (!s)
            throw ExprError(std::string("right side of '/' must be a scalar, got ") +
                                value_type_phrase(rhs),
                            ast.pos);
        if (*s == Complex(0.0))
            throw ExprError("division by zero", ast.pos);
        Complex inv = Complex(1.0) / *s;
        if (auto* t = std::get_if<Complex>(&lhs))
            return *t * inv;
        if (auto* k = std::get_if<Ket>(&lhs))
            return scale(inv, *k);
        return scale(inv, std::get<Operator>(lhs));
    }

    Value eval_kron(const Ast& ast) {
        Value lhs = eval(ast.children[0]);
        Value rhs = eval(ast.children[1]);
        if (auto* k = std::get_if<Ket>(&lhs)) {
            if (auto* l = std::get_if<Ket>(&rhs))
                return wrap(ast.pos, [&] { return tensor_kets({*k, *l}); });
        }
        if (auto* a = std::get_if<Operator>(&lhs)) {
            if (auto* b = std::get_if<Operator>(&rhs))
                return wrap(ast.pos, [&] { return tensor_ops({*a, *b}); });
        }
        throw ExprError(std::string("kron needs two kets or two operators, got ") +
                            value_type_phrase(lhs) + " and " + value_type_phrase(rhs),
                        ast.pos);
    }

    // Re-throw library errors with the source position attached.
    template <typename Fn>
    Value wrap(SourcePos pos, Fn&& fn) {
        try {
            return fn();
        } catch (const ExprError&) {
            throw;
        } catch (const Error& e) {
            throw ExprError(e.what(), pos);
        }
    }

    const AliasTable& aliases_;
};

int precedence(Ast::Kind kind) {
    switch (kind) {
    case Ast::Kind::Add:
    case Ast::Kind::Sub:
        return 1;
    case Ast::Kind::Mul:
    case Ast::Kind::Div:
    case Ast::Kind::Kron:
        return 2;
    case Ast::Kind::Neg:
        return 3;
    default:
        return 4;
    }
}

void print(const Ast& ast, std::string& out);

void print_child(const Ast& child, const Ast& parent, bool right_side, std::string& out) {
    int cp = precedence(child.kind);
    int pp = precedence(parent.kind);
    bool parens = cp < pp;
    if (!parens && right_side && cp == pp) {
        // Same precedence on the right: keep only shapes that reassociate
        // freely (a + (b + c), a * (b * c), a kron (b kron c)).
        parens = child.kind != parent.kind || parent.kind == Ast::Kind::Sub ||
                 parent.kind == Ast::Kind::Div;
    }
    if (parens)
        out += '(';
    print(child, out);
    if (parens)
        out += ')';
}

void print(const Ast& ast, std::string& out) {
    switch (ast.kind) {
    case Ast::Kind::Number:
        out += format_double(ast.number);
        return;
    case Ast::Kind::Imag:
        out += 'i';
        return;
    case Ast::Kind::KetName:
        out += '|';
        out += ast.name;
        out += '>';
        return;
    case Ast::Kind::OpName:
        out += ast.name;
        return;
    case Ast::Kind::Sqrt:
    case Ast::Kind::Proj:
        out += ast.kind == Ast::Kind::Sqrt ? "sqrt(" : "proj(";
        print(ast.children[0], out);
        out += ')';
        return;
    case Ast::Kind::Neg:
        out += '-';
        print_child(ast.children[0], ast, true, out);
        return;
    case Ast::Kind::Add:
    case Ast::Kind::Sub:
    case Ast::Kind::Mul:
    case Ast::Kind::Div:
    case Ast::Kind::Kron: {
        const char* op = ast.kind == Ast::Kind::Add   ? " + "
                         : ast.kind == Ast::Kind::Sub ? " - "
                         : ast.kind == Ast::Kind::Mul ? " * "
                         : ast.kind == Ast::Kind::Div ? " / "
                                                      : " kron ";
        print_child(ast.children[0], ast, false, out);
        out += op;
        print_child(ast.children[1], ast, true, out);
        return;
    }
    }
}

} // namespace

ExprError::ExprError(const std::string& message, SourcePos pos)
    : Error("line " + std::to_string(pos.line) + ", column " + std::to_string(pos.column) + ": " +
            message),
      pos_(pos) {}

AliasTable AliasTable::defaults() {
    AliasTable table;
    table.entries_ = {
        {"0", 0}, {"1", 1}, {"H", 0}, {"V", 1},  {"L", 0},
        {"R", 1}, {"up", 0}, {"dn", 1}, {"O", 0}, {"NO", 1},
    };
    return table;
}

void AliasTable::add_pairs(const std::string& spec) {
    std::size_t start = 0;
    while (start <= spec.size()) {
        std::size_t end = spec.find(';', start);
        std::string pair = spec.substr(start, end == std::string::npos ? end : end - start);
        std::size_t comma = pair.find(',');
        if (comma == std::string::npos || comma == 0 || comma + 1 == pair.size())
            throw DomainError("AliasTable: basis pair '" + pair + "' is not of the form A,B");
        std::string zero = pair.substr(0, comma);
        std::string one = pair.substr(comma + 1);
        for (const std::string& label : {zero, one}) {
            if (label.empty())
                throw DomainError("AliasTable: empty basis label");
            for (char c : label)
                if (!is_label_char(c))
                    throw DomainError("AliasTable: label '" + label +
                                      "' may only use letters, digits and '_'");
        }
        entries_[zero] = 0;
        entries_[one] = 1;
        if (end == std::string::npos)
            break;
        start = end + 1;
    }
}

Ast parse(std::string_view source) {
    return Parser(Lexer(source).run()).run();
}

Value evaluate(const Ast& ast, const AliasTable& aliases) {
    return Evaluator(aliases).eval(ast);
}

std::string to_text(const Ast& ast) {
    std::string out;
    print(ast, out);
    return out;
}

Ket evaluate_ket(std::string_view source, const AliasTable& aliases) {
    Ast ast = parse(source);
    Value value = evaluate(ast, aliases);
    if (auto* k = std::get_if<Ket>(&value))
        return *k;
    throw ExprError(std::string("expression evaluates to ") + value_type_phrase(value) +
                        ", expected a ket",
                    ast.pos);
}

Operator evaluate_operator(std::string_view source, const AliasTable& aliases) {
    Ast ast = parse(source);
    Value value = evaluate(ast, aliases);
    if (auto* op = std::get_if<Operator>(&value))
        return *op;
    throw ExprError(std::string("expression evaluates to ") + value_type_phrase(value) +
                        ", expected an operator",
                    ast.pos);
}

} // namespace modval
