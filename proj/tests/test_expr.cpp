#include "support.hpp"

#include <fstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "modval/expr.hpp"
#include "modval/rng.hpp"
#include "modval/scenarios.hpp"

using namespace modval;
using testutil::kI;

namespace {

std::vector<std::string> load_corpus() {
    std::ifstream in(MODVAL_CORPUS_PATH);
    REQUIRE_MESSAGE(in.good(), "corpus file ", MODVAL_CORPUS_PATH, " is missing");
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        lines.push_back(line);
    }
    return lines;
}

void check_values_equal(const Value& got, const Value& want, const std::string& context) {
    REQUIRE_MESSAGE(got.index() == want.index(), context, ": value kinds differ");
    if (auto* s = std::get_if<Complex>(&want)) {
        CHECK_MESSAGE(std::abs(std::get<Complex>(got) - *s) <= 1e-12, context);
    } else if (auto* k = std::get_if<Ket>(&want)) {
        const Ket& g = std::get<Ket>(got);
        REQUIRE_MESSAGE(g.shape().dims() == k->shape().dims(), context, ": shapes differ");
        CHECK_MESSAGE((g.amplitudes() - k->amplitudes()).cwiseAbs().maxCoeff() <= 1e-12,
                      context);
    } else {
        const Operator& want_op = std::get<Operator>(want);
        const Operator& got_op = std::get<Operator>(got);
        REQUIRE_MESSAGE(got_op.shape().dims() == want_op.shape().dims(), context,
                        ": shapes differ");
        CHECK_MESSAGE((got_op.matrix() - want_op.matrix()).cwiseAbs().maxCoeff() <= 1e-12,
                      context);
    }
}

SourcePos error_pos(const std::string& source, const AliasTable& aliases) {
    try {
        evaluate(parse(source), aliases);
    } catch (const ExprError& e) {
        return e.pos();
    }
    FAIL("expected '", source, "' to fail");
    return {};
}

} // namespace

TEST_CASE("scalars, kets and operators evaluate to the expected values") {
    CHECK(std::get<Complex>(evaluate(parse("i"))) == kI);
    CHECK(std::abs(std::get<Complex>(evaluate(parse("(1 + i) * (1 - i)"))) - 2.0) < 1e-15);
    CHECK(std::abs(std::get<Complex>(evaluate(parse("sqrt(2)"))) - std::sqrt(2.0)) < 1e-15);
    CHECK(std::abs(std::get<Complex>(evaluate(parse("2e2 - 0.5"))) - 199.5) < 1e-15);
    CHECK(std::abs(std::get<Complex>(evaluate(parse("-i * i"))) - 1.0) < 1e-15);

    Ket zero = evaluate_ket("|0>");
    CHECK(zero.amplitudes()(0) == Complex(1.0));
    CHECK(zero.amplitudes()(1) == Complex(0.0));

    // All aliases of the two basis states.
    for (const char* label : {"|H>", "|L>", "|up>", "|O>"})
        CHECK((evaluate_ket(label).amplitudes() - zero.amplitudes()).cwiseAbs().maxCoeff() ==
              0.0);
    for (const char* label : {"|V>", "|R>", "|dn>", "|NO>", "|1>"})
        CHECK(evaluate_ket(label).amplitudes()(1) == Complex(1.0));

    Operator x = evaluate_operator("sx");
    CHECK((x.matrix() - sigma_x().matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((evaluate_operator("S").matrix() - sigma_z().matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((evaluate_operator("sx * sx").matrix() - Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() <
          1e-15);
    CHECK((evaluate_operator("sx sz").matrix() - (sigma_x().matrix() * sigma_z().matrix()))
              .cwiseAbs()
              .maxCoeff() < 1e-15);
    CHECK((evaluate_operator("proj(|H> + i |V>)").matrix() -
           projector(add(basis_ket(2, 0), scale(kI, basis_ket(2, 1)))).matrix())
              .cwiseAbs()
              .maxCoeff() < 1e-15);
}

TEST_CASE("juxtaposition multiplies") {
    Ket scaled = evaluate_ket("3 |0>");
    CHECK(scaled.amplitudes()(0) == Complex(3.0));

    Ket applied = evaluate_ket("(sx kron sy) (|0> kron |1>)");
    Ket expect = apply(tensor_ops({sigma_x(), sigma_y()}),
                       tensor_kets({basis_ket(2, 0), basis_ket(2, 1)}));
    CHECK((applied.amplitudes() - expect.amplitudes()).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("unicode spellings of the product operators") {
    Operator a = evaluate_operator("sz \xe2\x8a\x97 I");  // U+2297
    CHECK((a.matrix() - tensor_ops({sigma_z(), identity_op(HilbertShape({2}))}).matrix())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    Operator b = evaluate_operator("2 \xc2\xb7 sx");  // U+00B7
    CHECK((b.matrix() - scale(2.0, sigma_x()).matrix()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("scenario state strings evaluate to the scenario states") {
    const std::pair<std::string, PrePostEnsemble (*)()> cases[] = {
        {"epr", epr_ensemble},
        {"hardy", hardy_ensemble},
        {"cheshire", cheshire_ensemble},
        {"crz", crz_ensemble},
    };
    for (const auto& [name, build] : cases) {
        ScenarioReport report = run_scenario(name, name == "crz" ? 1.8 : 0.7);
        PrePostEnsemble ens = build();
        Ket pre = evaluate_ket(report.pre);
        Ket post = evaluate_ket(report.post);
        CHECK_MESSAGE((pre.amplitudes() - ens.pre().amplitudes()).cwiseAbs().maxCoeff() <= 1e-12,
                      name, " pre");
        CHECK_MESSAGE(
            (post.amplitudes() - ens.post().amplitudes()).cwiseAbs().maxCoeff() <= 1e-12, name,
            " post");
    }
}

TEST_CASE("every corpus entry parses, evaluates and round-trips") {
    std::vector<std::string> corpus = load_corpus();
    CHECK(corpus.size() >= 30);
    for (const std::string& source : corpus) {
        CAPTURE(source);
        Ast ast = parse(source);
        Value value = evaluate(ast);

        std::string text = to_text(ast);
        Ast reparsed = parse(text);
        check_values_equal(evaluate(reparsed), value, source);
        CHECK_MESSAGE(to_text(reparsed) == text, source, ": printing is not idempotent");
    }
}

TEST_CASE("parse errors carry positions") {
    CHECK_THROWS_AS(parse("(|0> + |1>"), ExprError);
    CHECK_THROWS_AS(parse("|0"), ExprError);
    CHECK_THROWS_AS(parse("|>"), ExprError);
    CHECK_THROWS_AS(parse("2 +"), ExprError);
    CHECK_THROWS_AS(parse(")"), ExprError);
    CHECK_THROWS_AS(parse("( )"), ExprError);
    CHECK_THROWS_AS(parse("2 )"), ExprError);
    CHECK_THROWS_AS(parse("kron sx"), ExprError);
    CHECK_THROWS_AS(parse("$"), ExprError);
    CHECK_THROWS_AS(parse("1e999"), ExprError);

    try {
        parse("2 +\n|foo");
        FAIL("expected a parse error");
    } catch (const ExprError& e) {
        CHECK(e.pos().line == 2);
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    // The nesting guard turns deep recursion into a clean error.
    std::string deep(300, '(');
    deep += "1";
    deep.append(300, ')');
    CHECK_THROWS_AS(parse(deep), ExprError);
    std::string shallow(50, '(');
    shallow += "1";
    shallow.append(50, ')');
    CHECK_NOTHROW(parse(shallow));
}

TEST_CASE("evaluation errors carry positions") {
    SourcePos pos = error_pos("|foo>", AliasTable::defaults());
    CHECK(pos.line == 1);
    CHECK(pos.column == 1);
    pos = error_pos("2 + |foo>", AliasTable::defaults());
    CHECK(pos.column == 5);

    CHECK_THROWS_WITH_AS(evaluate(parse("|0> * |1>")),
                         "line 1, column 5: cannot multiply two kets; use 'kron' for a product "
                         "state",
                         ExprError);
    CHECK_THROWS_AS(evaluate(parse("sqrt(|0>)")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("proj(2)")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("sx + |0>")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("bogus")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("1 / 0")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("1 / |0>")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("sx kron 2")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("|0> kron sx")), ExprError);
    CHECK_THROWS_AS(evaluate(parse("proj(0 * |0>)")), ExprError);  // zero vector
    CHECK_THROWS_AS(evaluate(parse("|0> + (|0> kron |0>)")), ExprError);  // shape clash

    CHECK_THROWS_AS(evaluate_ket("sx"), ExprError);
    CHECK_THROWS_AS(evaluate_operator("|0>"), ExprError);
}

TEST_CASE("alias tables rename the basis") {
    AliasTable table = AliasTable::defaults();
    table.add_pairs("g,e");
    Ket ground = evaluate_ket("|g>", table);
    CHECK(ground.amplitudes()(0) == Complex(1.0));
    Ket excited = evaluate_ket("|e>", table);
    CHECK(excited.amplitudes()(1) == Complex(1.0));
    CHECK_THROWS_AS(evaluate_ket("|g>"), ExprError);  // not in the defaults

    // Later pairs overwrite earlier entries.
    table.add_pairs("V,H");
    CHECK(evaluate_ket("|V>", table).amplitudes()(0) == Complex(1.0));

    AliasTable multi = AliasTable::defaults();
    multi.add_pairs("a,b;c,d");
    CHECK(evaluate_ket("|c>", multi).amplitudes()(0) == Complex(1.0));
    CHECK(evaluate_ket("|d>", multi).amplitudes()(1) == Complex(1.0));

    CHECK_THROWS_AS(table.add_pairs("nocomma"), DomainError);
    CHECK_THROWS_AS(table.add_pairs(",x"), DomainError);
    CHECK_THROWS_AS(table.add_pairs("x,"), DomainError);
    CHECK_THROWS_AS(table.add_pairs("a b,c"), DomainError);
}

TEST_CASE("random garbage never crashes the parser") {
    SplitMix64 rng(2026);
    const std::string alphabet = "0123456789+-*/()|<> .iIsxyzSprojkequn\t\n";
    int parsed = 0;
    for (int round = 0; round < 10000; ++round) {
        std::size_t len = static_cast<std::size_t>(rng.next() % 40);
        std::string source;
        for (std::size_t k = 0; k < len; ++k)
            source += alphabet[static_cast<std::size_t>(rng.next() % alphabet.size())];
        try {
            evaluate(parse(source));
            ++parsed;
        } catch (const ExprError&) {
            // expected for most draws
        }
    }
    // Sanity: some fraction of draws must be valid, otherwise the fuzz is
    // exercising nothing but the first character check.
    CHECK(parsed > 0);
}

TEST_CASE("round-trip printing normalizes whitespace only where it must") {
    CHECK(to_text(parse("|0>+|1>")) == to_text(parse("|0> + |1>")));
    CHECK(to_text(parse("( |0> )")) == to_text(parse("|0>")));
    // Left-associativity is preserved: a - b + c stays (a - b) + c.
    Ast ast = parse("1 - 2 + 3");
    CHECK(std::abs(std::get<Complex>(evaluate(ast)) - 2.0) < 1e-15);
    CHECK(std::abs(std::get<Complex>(evaluate(parse(to_text(ast)))) - 2.0) < 1e-15);
    // Parenthesized right subtraction survives the round trip.
    Ast nested = parse("1 - (2 - 3)");
    CHECK(std::abs(std::get<Complex>(evaluate(nested)) - 2.0) < 1e-15);
    CHECK(std::abs(std::get<Complex>(evaluate(parse(to_text(nested)))) - 2.0) < 1e-15);
}
