#pragma once

#include <vector>

#include "modval/pps.hpp"

namespace modval {

// Sum of local observables A = sum_j A^(j), each acting on a distinct site
// of a shared space.  The summands commute, so
//
//   exp(-i g A) = prod_j exp(-i g A^(j))
//
// and for two-level terms each factor collapses to a_j A^(j) + b_j I,
// giving the closed form
//
//   (A)_mod = <phi| prod_j (a_j A^(j) + b_j I) |psi> / <phi|psi>.
//
// In general (A)_mod != sum_j (A^(j))_mod: modular values do not obey a sum
// rule.  The report types below quantify the failure.
class ObservableSum {
public:
    ObservableSum(HilbertShape shape, std::vector<SiteObservable> terms);

    const HilbertShape& shape() const { return shape_; }
    const std::vector<SiteObservable>& terms() const { return terms_; }

    // True when every term carries eigenvalue metadata, i.e. the two-level
    // closed form applies.
    bool all_two_level() const;

private:
    HilbertShape shape_;
    std::vector<SiteObservable> terms_;
};

struct SumRuleTerm {
    std::size_t site;
    Complex weak;
    Complex modular;
};

struct SumRuleReport {
    double g;
    Complex mod_of_sum;   // (sum_j A^(j))_mod
    Complex sum_of_mods;  // sum_j (A^(j))_mod
    Complex gap;          // mod_of_sum - sum_of_mods
    std::vector<SumRuleTerm> per_term;
};

struct ProductRuleReport {
    Complex joint_weak;        // <A B>_w
    Complex product_of_weaks;  // <A>_w <B>_w
    Complex gap;               // joint_weak - product_of_weaks
};

// For two two-level observables A, B on distinct sites,
//
//   (A + B)_mod = a a' <AB>_w + a b' <A>_w + a' b <B>_w + b b'
//
// and when the weak product rule <AB>_w = <A>_w <B>_w holds the right-hand
// side factorizes into (A)_mod (B)_mod.
struct ProductImpliesSumReport {
    ProductRuleReport premise;
    bool premise_holds;       // |premise.gap| <= premise_eps
    double premise_eps;
    Complex mod_of_sum;       // (A + B)_mod
    Complex expansion;        // the four-term form above
    Complex product_of_mods;  // (A)_mod (B)_mod
};

// Dispatches to the closed form when all terms are two-level, otherwise to
// the exponential-product route.
Complex modular_of_sum(const ObservableSum& sum, double g, const PrePostEnsemble& ens);

// The two routes, separately, for cross-checking.
Complex modular_of_sum_exponential(const ObservableSum& sum, double g, const PrePostEnsemble& ens);
Complex modular_of_sum_closed(const ObservableSum& sum, double g, const PrePostEnsemble& ens);

SumRuleReport sum_rule_report(const ObservableSum& sum, double g, const PrePostEnsemble& ens);

// <A B>_w for locals on distinct sites.
Complex weak_joint(const SiteObservable& a, const SiteObservable& b, const PrePostEnsemble& ens);

ProductRuleReport product_rule_report(const SiteObservable& a, const SiteObservable& b,
                                      const PrePostEnsemble& ens);

// Requires eigenvalue metadata on both observables.  Never throws when the
// premise fails; the report just records that it does not hold.
ProductImpliesSumReport check_product_implies_sum(const SiteObservable& a,
                                                  const SiteObservable& b, double g,
                                                  const PrePostEnsemble& ens,
                                                  double premise_eps = 1e-9);

} // namespace modval
