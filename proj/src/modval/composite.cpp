#include "modval/composite.hpp"

#include <set>

namespace modval {

ObservableSum::ObservableSum(HilbertShape shape, std::vector<SiteObservable> terms)
    : shape_(std::move(shape)), terms_(std::move(terms)) {
    if (terms_.empty())
        throw ShapeError("ObservableSum: need at least one term");
    std::set<std::size_t> seen;
    for (const auto& term : terms_) {
        if (term.site >= shape_.factors())
            throw ShapeError("ObservableSum: site " + std::to_string(term.site) +
                             " out of range for shape " + shape_.to_string());
        if (term.local.dim() != shape_.dim(term.site))
            throw ShapeError("ObservableSum: term at site " + std::to_string(term.site) +
                             " has local dimension " + std::to_string(term.local.dim()) +
                             " but the factor has dimension " +
                             std::to_string(shape_.dim(term.site)));
        if (!seen.insert(term.site).second)
            throw ShapeError("ObservableSum: two terms act on site " + std::to_string(term.site));
    }
}

bool ObservableSum::all_two_level() const {
    for (const auto& term : terms_)
        if (!term.eigenvalues)
            return false;
    return true;
}

Complex modular_of_sum(const ObservableSum& sum, double g, const PrePostEnsemble& ens) {
    return sum.all_two_level() ? modular_of_sum_closed(sum, g, ens)
                               : modular_of_sum_exponential(sum, g, ens);
}

Complex modular_of_sum_exponential(const ObservableSum& sum, double g,
                                   const PrePostEnsemble& ens) {
    if (ens.shape() != sum.shape())
        throw ShapeError("modular_of_sum: ensemble shape " + ens.shape().to_string() +
                         " does not match observable shape " + sum.shape().to_string());
    // The terms commute, so the exponential of the sum is the product of the
    // embedded factor exponentials.
    Ket state = ens.pre();
    for (const auto& term : sum.terms()) {
        SiteObservable factor(term.site, exp_spectral(term.local, g));
        state = apply(embed(factor, sum.shape()), state);
    }
    return inner(ens.post(), state) / ens.overlap();
}

Complex modular_of_sum_closed(const ObservableSum& sum, double g, const PrePostEnsemble& ens) {
    if (ens.shape() != sum.shape())
        throw ShapeError("modular_of_sum: ensemble shape " + ens.shape().to_string() +
                         " does not match observable shape " + sum.shape().to_string());
    Ket state = ens.pre();
    for (const auto& term : sum.terms()) {
        if (!term.eigenvalues)
            throw DomainError("modular_of_sum_closed: term at site " + std::to_string(term.site) +
                              " has no eigenvalue metadata");
        auto [l1, l2] = *term.eigenvalues;
        TwoLevelCoeffs coeffs = two_level_coeffs(l1, l2, g);
        Operator factor = scale(coeffs.a, term.local) +
                          scale(coeffs.b, identity_op(term.local.shape()));
        state = apply(embed(SiteObservable(term.site, factor), sum.shape()), state);
    }
    return inner(ens.post(), state) / ens.overlap();
}

SumRuleReport sum_rule_report(const ObservableSum& sum, double g, const PrePostEnsemble& ens) {
    SumRuleReport report;
    report.g = g;
    report.mod_of_sum = modular_of_sum(sum, g, ens);
    report.sum_of_mods = 0;
    for (const auto& term : sum.terms()) {
        Operator full = embed(term, ens.shape());
        Complex weak = weak_value(full, ens);
        Complex modular = term.eigenvalues
                              ? modular_from_weak(weak, two_level_coeffs(term.eigenvalues->first,
                                                                         term.eigenvalues->second, g))
                              : modular_value(full, g, ens);
        report.per_term.push_back({term.site, weak, modular});
        report.sum_of_mods += modular;
    }
    report.gap = report.mod_of_sum - report.sum_of_mods;
    return report;
}

Complex weak_joint(const SiteObservable& a, const SiteObservable& b, const PrePostEnsemble& ens) {
    if (a.site == b.site)
        throw ShapeError("weak_joint: observables must act on distinct sites");
    Operator product = matmul(embed(a, ens.shape()), embed(b, ens.shape()));
    return weak_value(product, ens);
}

ProductRuleReport product_rule_report(const SiteObservable& a, const SiteObservable& b,
                                      const PrePostEnsemble& ens) {
    ProductRuleReport report;
    report.joint_weak = weak_joint(a, b, ens);
    report.product_of_weaks =
        weak_value(embed(a, ens.shape()), ens) * weak_value(embed(b, ens.shape()), ens);
    report.gap = report.joint_weak - report.product_of_weaks;
    return report;
}

ProductImpliesSumReport check_product_implies_sum(const SiteObservable& a, const SiteObservable& b,
                                                  double g, const PrePostEnsemble& ens,
                                                  double premise_eps) {
    if (!a.eigenvalues || !b.eigenvalues)
        throw DomainError("check_product_implies_sum: both observables need eigenvalue metadata");

    ProductImpliesSumReport report;
    report.premise = product_rule_report(a, b, ens);
    report.premise_eps = premise_eps;
    report.premise_holds = std::abs(report.premise.gap) <= premise_eps;

    TwoLevelCoeffs ca = two_level_coeffs(a.eigenvalues->first, a.eigenvalues->second, g);
    TwoLevelCoeffs cb = two_level_coeffs(b.eigenvalues->first, b.eigenvalues->second, g);
    Complex wa = weak_value(embed(a, ens.shape()), ens);
    Complex wb = weak_value(embed(b, ens.shape()), ens);

    report.mod_of_sum = modular_of_sum(ObservableSum(ens.shape(), {a, b}), g, ens);
    report.expansion = ca.a * cb.a * report.premise.joint_weak + ca.a * cb.b * wa +
                       cb.a * ca.b * wb + ca.b * cb.b;
    report.product_of_mods = modular_from_weak(wa, ca) * modular_from_weak(wb, cb);
    return report;
}

} // namespace modval
