#include "support.hpp"

#include <doctest.h>

#include "modval/composite.hpp"
#include "modval/scenarios.hpp"

using namespace modval;
using testutil::kI;

namespace {

const double kPi = std::acos(-1.0);

SiteObservable random_two_level_site(testutil::Rand& rand, std::size_t site) {
    double l1 = rand.uniform(-2.0, 2.0);
    double l2 = l1 + rand.uniform(0.3, 2.0);
    return SiteObservable::with_eigenvalues(site, rand.two_level(l1, l2));
}

} // namespace

TEST_CASE("observable sums validate their terms") {
    HilbertShape shape({2, 2});
    SiteObservable a(0, sigma_x());
    SiteObservable b(1, sigma_y());
    CHECK_NOTHROW(ObservableSum(shape, {a, b}));
    CHECK_THROWS_AS(ObservableSum(shape, {}), ShapeError);
    CHECK_THROWS_AS(ObservableSum(shape, {a, SiteObservable(0, sigma_y())}), ShapeError);
    CHECK_THROWS_AS(ObservableSum(shape, {SiteObservable(2, sigma_x())}), ShapeError);
    CHECK_THROWS_AS(ObservableSum(HilbertShape({3, 2}), {a}), ShapeError);

    CHECK_FALSE(ObservableSum(shape, {a, b}).all_two_level());
    CHECK(ObservableSum(shape, {SiteObservable::with_eigenvalues(0, sigma_x()),
                                SiteObservable::with_eigenvalues(1, sigma_y())})
              .all_two_level());
}

TEST_CASE("the closed and exponential routes agree") {
    testutil::Rand rand(31);
    for (int round = 0; round < 60; ++round) {
        std::size_t sites = 2 + (round % 2);
        HilbertShape shape(std::vector<std::size_t>(sites, 2));
        PrePostEnsemble ens = rand.ensemble(shape);
        std::vector<SiteObservable> terms;
        for (std::size_t s = 0; s < sites; ++s)
            terms.push_back(random_two_level_site(rand, s));
        ObservableSum sum(shape, terms);
        double g = rand.uniform(-kPi, kPi);
        Complex closed = modular_of_sum_closed(sum, g, ens);
        Complex exponential = modular_of_sum_exponential(sum, g, ens);
        CHECK_CPLX(closed, exponential, 1e-11);
        CHECK_CPLX(modular_of_sum(sum, g, ens), closed, 1e-13);
    }
}

TEST_CASE("the exponential route matches a direct big-matrix exponential") {
    testutil::Rand rand(32);
    HilbertShape shape({2, 2});
    PrePostEnsemble ens = rand.ensemble(shape);
    SiteObservable a = random_two_level_site(rand, 0);
    SiteObservable b = random_two_level_site(rand, 1);
    double g = 0.9;

    Operator total = add(embed(a, shape), embed(b, shape));
    Complex direct = inner(ens.post(), apply(exp_spectral(total, g), ens.pre())) / ens.overlap();
    CHECK_CPLX(modular_of_sum_exponential(ObservableSum(shape, {a, b}), g, ens), direct, 1e-12);
}

TEST_CASE("sum rule report carries consistent per-term values") {
    testutil::Rand rand(33);
    HilbertShape shape({2, 2});
    PrePostEnsemble ens = rand.ensemble(shape);
    SiteObservable a = random_two_level_site(rand, 0);
    SiteObservable b = random_two_level_site(rand, 1);
    double g = 1.1;

    SumRuleReport report = sum_rule_report(ObservableSum(shape, {a, b}), g, ens);
    REQUIRE(report.per_term.size() == 2);
    CHECK(report.per_term[0].site == 0);
    CHECK(report.per_term[1].site == 1);
    CHECK_CPLX(report.per_term[0].weak, weak_value(embed(a, shape), ens), 1e-12);
    CHECK_CPLX(report.per_term[0].modular, modular_value(embed(a, shape), g, ens), 1e-12);
    CHECK_CPLX(report.sum_of_mods, report.per_term[0].modular + report.per_term[1].modular,
               1e-13);
    CHECK_CPLX(report.gap, report.mod_of_sum - report.sum_of_mods, 1e-13);
}

TEST_CASE("sum rule failure is generic") {
    testutil::Rand rand(34);
    int failures = 0;
    const int rounds = 1000;
    for (int round = 0; round < rounds; ++round) {
        HilbertShape shape({2, 2});
        PrePostEnsemble ens = rand.ensemble(shape);
        ObservableSum sum(shape,
                          {random_two_level_site(rand, 0), random_two_level_site(rand, 1)});
        double g = rand.uniform(0.3, kPi);
        SumRuleReport report = sum_rule_report(sum, g, ens);
        if (std::abs(report.gap) > 1e-6)
            ++failures;
    }
    // The rule essentially always fails on generic draws.
    CHECK(failures >= 990);
}

TEST_CASE("four-term expansion of the modular value of a sum") {
    testutil::Rand rand(35);
    for (int round = 0; round < 100; ++round) {
        HilbertShape shape({2, 2});
        PrePostEnsemble ens = rand.ensemble(shape);
        SiteObservable a = random_two_level_site(rand, 0);
        SiteObservable b = random_two_level_site(rand, 1);
        double g = rand.uniform(-kPi, kPi);

        ProductImpliesSumReport report = check_product_implies_sum(a, b, g, ens);
        Complex direct = modular_of_sum(ObservableSum(shape, {a, b}), g, ens);
        CHECK_CPLX(report.expansion, direct, 1e-11);
        CHECK_CPLX(report.mod_of_sum, direct, 1e-12);
    }
}

TEST_CASE("weak product rule holds on product selections and transfers to the sum") {
    testutil::Rand rand(36);
    for (int round = 0; round < 50; ++round) {
        HilbertShape q({2});
        // Product pre- and post-states factor the joint weak value exactly.
        Ket pre = tensor_kets({rand.ket(q), rand.ket(q)});
        Ket post = tensor_kets({rand.ket(q), rand.ket(q)});
        if (std::abs(inner(post.normalized(), pre.normalized())) < 0.05)
            continue;
        PrePostEnsemble ens(pre, post);
        SiteObservable a = random_two_level_site(rand, 0);
        SiteObservable b = random_two_level_site(rand, 1);
        double g = rand.uniform(-kPi, kPi);

        ProductImpliesSumReport report = check_product_implies_sum(a, b, g, ens);
        CHECK(report.premise_holds);
        CHECK(std::abs(report.premise.gap) <= 1e-10);
        CHECK_CPLX(report.mod_of_sum, report.product_of_mods, 1e-10);
    }
}

TEST_CASE("entangled selections generically break the premise") {
    testutil::Rand rand(37);
    int holds = 0;
    for (int round = 0; round < 200; ++round) {
        HilbertShape shape({2, 2});
        PrePostEnsemble ens = rand.ensemble(shape);
        ProductRuleReport report = product_rule_report(random_two_level_site(rand, 0),
                                                       random_two_level_site(rand, 1), ens);
        if (std::abs(report.gap) <= 1e-9)
            ++holds;
    }
    CHECK(holds <= 2);
}

TEST_CASE("weak_joint requires distinct sites") {
    testutil::Rand rand(38);
    PrePostEnsemble ens = rand.ensemble(HilbertShape({2, 2}));
    SiteObservable a(0, sigma_x());
    CHECK_THROWS_AS(weak_joint(a, SiteObservable(0, sigma_y()), ens), ShapeError);
}

TEST_CASE("epr ensemble: the textbook failure of both rules") {
    PrePostEnsemble ens = epr_ensemble();
    SiteObservable sx1 = SiteObservable::with_eigenvalues(0, sigma_x());
    SiteObservable sy2 = SiteObservable::with_eigenvalues(1, sigma_y());

    CHECK_CPLX(weak_value(embed(sx1, ens.shape()), ens), -1.0, 1e-13);
    CHECK_CPLX(weak_value(embed(sy2, ens.shape()), ens), -1.0, 1e-13);
    CHECK_CPLX(weak_joint(sx1, sy2, ens), -1.0, 1e-13);

    for (double g : {-2.5, -0.4, 0.0, 0.9, 2.2}) {
        SumRuleReport report = sum_rule_report(ObservableSum(ens.shape(), {sx1, sy2}), g, ens);
        Complex e_ig = std::exp(kI * g);
        CHECK_CPLX(report.per_term[0].modular, e_ig, 1e-12);
        CHECK_CPLX(report.per_term[1].modular, e_ig, 1e-12);
        CHECK_CPLX(report.mod_of_sum, 1.0 + kI * std::sin(2.0 * g), 1e-12);
        // The gap never closes: it equals 1 + i sin(2g) - 2 e^{ig}.
        CHECK(std::abs(report.gap) > 0.1);
    }
}

TEST_CASE("hardy ensemble: gap is exactly -1 at every coupling") {
    PrePostEnsemble ens = hardy_ensemble();
    Operator pi_o = projector(basis_ket(2, 0));
    SiteObservable pos = SiteObservable::with_eigenvalues(0, pi_o);
    SiteObservable ele = SiteObservable::with_eigenvalues(1, pi_o);

    CHECK_CPLX(ens.overlap(), -1.0 / (2.0 * std::sqrt(3.0)), 1e-14);
    CHECK_CPLX(weak_value(embed(pos, ens.shape()), ens), 1.0, 1e-13);
    CHECK_CPLX(weak_value(embed(ele, ens.shape()), ens), 1.0, 1e-13);
    CHECK_CPLX(weak_joint(pos, ele, ens), 0.0, 1e-13);

    ProductRuleReport product = product_rule_report(pos, ele, ens);
    CHECK_CPLX(product.gap, -1.0, 1e-13);

    for (double g : {-1.7, 0.3, 1.4, 2.8}) {
        SumRuleReport report = sum_rule_report(ObservableSum(ens.shape(), {pos, ele}), g, ens);
        Complex e_mig = std::exp(-kI * g);
        CHECK_CPLX(report.per_term[0].modular, e_mig, 1e-12);
        CHECK_CPLX(report.mod_of_sum, 2.0 * e_mig - 1.0, 1e-12);
        CHECK_CPLX(report.gap, -1.0, 1e-12);
    }
}
