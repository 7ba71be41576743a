#include "modval/modval.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "modval/composite.hpp"
#include "modval/expr.hpp"
#include "modval/json_io.hpp"
#include "modval/meter.hpp"
#include "modval/pps.hpp"
#include "modval/scenarios.hpp"
#include "modval/tensor.hpp"

struct mv_ket {
    modval::Ket value;
};

struct mv_op {
    modval::Operator value;
};

struct mv_ensemble {
    modval::PrePostEnsemble value;
};

namespace {

thread_local std::string t_last_error;

mv_status fail(mv_status code, const std::string& message) {
    t_last_error = message;
    return code;
}

mv_status map_current_exception() {
    try {
        throw;
    } catch (const modval::ExprError& e) {
        return fail(MV_ERR_PARSE, e.what());
    } catch (const modval::DimensionLimitError& e) {
        return fail(MV_ERR_DIMENSION_LIMIT, e.what());
    } catch (const modval::ShapeError& e) {
        return fail(MV_ERR_SHAPE_MISMATCH, e.what());
    } catch (const modval::DegenerateSpectrumError& e) {
        return fail(MV_ERR_DEGENERATE_SPECTRUM, e.what());
    } catch (const modval::OrthogonalSelectionError& e) {
        return fail(MV_ERR_ORTHOGONAL_SELECTION, e.what());
    } catch (const modval::NotHermitianError& e) {
        return fail(MV_ERR_NOT_HERMITIAN, e.what());
    } catch (const modval::DomainError& e) {
        return fail(MV_ERR_DOMAIN, e.what());
    } catch (const std::exception& e) {
        return fail(MV_ERR_INTERNAL, e.what());
    } catch (...) {
        return fail(MV_ERR_INTERNAL, "unknown error");
    }
}

template <typename Fn>
mv_status guarded(Fn&& fn) {
    try {
        fn();
        return MV_OK;
    } catch (...) {
        return map_current_exception();
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out)
        throw std::bad_alloc();
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

modval::AliasTable make_aliases(const char* spec) {
    modval::AliasTable table = modval::AliasTable::defaults();
    if (spec && *spec)
        table.add_pairs(spec);
    return table;
}

mv_complex to_c(modval::Complex z) { return mv_complex{z.real(), z.imag()}; }
modval::Complex from_c(mv_complex z) { return modval::Complex(z.re, z.im); }

// Attach eigenvalue metadata whenever the local is a numerically Hermitian
// qubit observable, so the two-level closed forms kick in automatically.
modval::SiteObservable make_site_obs(size_t site, const char* expr,
                                     const modval::AliasTable& aliases) {
    modval::Operator local = modval::evaluate_operator(expr, aliases);
    if (local.dim() == 2 && modval::is_hermitian_matrix(local.matrix())) {
        modval::Matrix sym = (local.matrix() + local.matrix().adjoint()) / 2.0;
        return modval::SiteObservable::with_eigenvalues(
            site, modval::Operator(local.shape(), std::move(sym), true));
    }
    return modval::SiteObservable(site, std::move(local));
}

} // namespace

extern "C" {

const char* mv_version(void) { return "0.1.0"; }

const char* mv_last_error(void) { return t_last_error.c_str(); }

void mv_string_free(char* s) { std::free(s); }

mv_status mv_ket_create(const size_t* dims, size_t n_dims, const double* amplitudes_re_im,
                        mv_ket** out) {
    if (!dims || !amplitudes_re_im || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_create: null argument");
    return guarded([&] {
        modval::HilbertShape shape(std::vector<size_t>(dims, dims + n_dims));
        modval::Vector amps(static_cast<Eigen::Index>(shape.total_dim()));
        for (Eigen::Index k = 0; k < amps.size(); ++k)
            amps(k) = modval::Complex(amplitudes_re_im[2 * k], amplitudes_re_im[2 * k + 1]);
        *out = new mv_ket{modval::Ket(std::move(shape), std::move(amps))};
    });
}

mv_status mv_ket_parse(const char* expression, const char* basis_aliases, mv_ket** out) {
    if (!expression || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_parse: null argument");
    return guarded([&] {
        *out = new mv_ket{modval::evaluate_ket(expression, make_aliases(basis_aliases))};
    });
}

void mv_ket_free(mv_ket* k) { delete k; }

mv_status mv_ket_dims(const mv_ket* k, size_t* dims, size_t* n_dims) {
    if (!k || !n_dims)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_dims: null argument");
    const auto& d = k->value.shape().dims();
    if (dims) {
        if (*n_dims < d.size())
            return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_dims: buffer too small");
        std::memcpy(dims, d.data(), d.size() * sizeof(size_t));
    }
    *n_dims = d.size();
    return MV_OK;
}

mv_status mv_ket_amplitudes(const mv_ket* k, double* amplitudes_re_im, size_t* n_values) {
    if (!k || !n_values)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_amplitudes: null argument");
    const auto& amps = k->value.amplitudes();
    const size_t needed = 2 * static_cast<size_t>(amps.size());
    if (amplitudes_re_im) {
        if (*n_values < needed)
            return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_amplitudes: buffer too small");
        for (Eigen::Index i = 0; i < amps.size(); ++i) {
            amplitudes_re_im[2 * i] = amps(i).real();
            amplitudes_re_im[2 * i + 1] = amps(i).imag();
        }
    }
    *n_values = needed;
    return MV_OK;
}

mv_status mv_ket_to_json(const mv_ket* k, char** out_json) {
    if (!k || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ket_to_json: null argument");
    return guarded([&] { *out_json = dup_string(modval::to_json(k->value).dump(2)); });
}

mv_status mv_op_create(const size_t* dims, size_t n_dims, const double* entries_re_im,
                       int assert_hermitian, mv_op** out) {
    if (!dims || !entries_re_im || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_op_create: null argument");
    return guarded([&] {
        modval::HilbertShape shape(std::vector<size_t>(dims, dims + n_dims));
        const auto n = static_cast<Eigen::Index>(shape.total_dim());
        modval::Matrix m(n, n);
        for (Eigen::Index r = 0; r < n; ++r)
            for (Eigen::Index c = 0; c < n; ++c) {
                const size_t k = 2 * (static_cast<size_t>(r) * static_cast<size_t>(n) +
                                      static_cast<size_t>(c));
                m(r, c) = modval::Complex(entries_re_im[k], entries_re_im[k + 1]);
            }
        *out = new mv_op{modval::Operator(std::move(shape), std::move(m), assert_hermitian != 0)};
    });
}

mv_status mv_op_parse(const char* expression, const char* basis_aliases, mv_op** out) {
    if (!expression || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_op_parse: null argument");
    return guarded([&] {
        *out = new mv_op{modval::evaluate_operator(expression, make_aliases(basis_aliases))};
    });
}

void mv_op_free(mv_op* o) { delete o; }

mv_status mv_op_is_hermitian(const mv_op* o, int* out) {
    if (!o || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_op_is_hermitian: null argument");
    *out = (o->value.is_hermitian() || modval::is_hermitian_matrix(o->value.matrix())) ? 1 : 0;
    return MV_OK;
}

mv_status mv_op_to_json(const mv_op* o, char** out_json) {
    if (!o || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_op_to_json: null argument");
    return guarded([&] { *out_json = dup_string(modval::to_json(o->value).dump(2)); });
}

mv_status mv_ensemble_create(const mv_ket* pre, const mv_ket* post, double overlap_eps,
                             mv_ensemble** out) {
    if (!pre || !post || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ensemble_create: null argument");
    return guarded([&] {
        double eps = overlap_eps > 0.0 ? overlap_eps : modval::kDefaultOverlapEps;
        *out = new mv_ensemble{modval::PrePostEnsemble(pre->value, post->value, eps)};
    });
}

void mv_ensemble_free(mv_ensemble* e) { delete e; }

mv_status mv_ensemble_overlap(const mv_ensemble* e, mv_complex* out) {
    if (!e || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_ensemble_overlap: null argument");
    *out = to_c(e->value.overlap());
    return MV_OK;
}

mv_status mv_weak_value(const mv_op* obs, const mv_ensemble* e, mv_complex* out) {
    if (!obs || !e || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_weak_value: null argument");
    return guarded([&] { *out = to_c(modval::weak_value(obs->value, e->value)); });
}

mv_status mv_modular_value(const mv_op* obs, double g, const mv_ensemble* e, mv_complex* out) {
    if (!obs || !e || !out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_modular_value: null argument");
    return guarded([&] { *out = to_c(modval::modular_value(obs->value, g, e->value)); });
}

mv_status mv_two_level_coeffs(double lambda1, double lambda2, double g, mv_complex* a,
                              mv_complex* b) {
    if (!a || !b)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_two_level_coeffs: null argument");
    return guarded([&] {
        modval::TwoLevelCoeffs coeffs = modval::two_level_coeffs(lambda1, lambda2, g);
        *a = to_c(coeffs.a);
        *b = to_c(coeffs.b);
    });
}

mv_status mv_modular_from_weak(mv_complex weak, double lambda1, double lambda2, double g,
                               mv_complex* out) {
    if (!out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_modular_from_weak: null argument");
    return guarded([&] {
        modval::TwoLevelCoeffs coeffs = modval::two_level_coeffs(lambda1, lambda2, g);
        *out = to_c(modval::modular_from_weak(from_c(weak), coeffs));
    });
}

mv_status mv_weak_from_modular(mv_complex modular, double lambda1, double lambda2, double g,
                               mv_complex* out) {
    if (!out)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_weak_from_modular: null argument");
    return guarded([&] {
        modval::TwoLevelCoeffs coeffs = modval::two_level_coeffs(lambda1, lambda2, g);
        *out = to_c(modval::weak_from_modular(from_c(modular), coeffs));
    });
}

mv_status mv_sum_rule_json(const size_t* sites, const char* const* local_exprs, size_t n_terms,
                           double g, const mv_ensemble* e, const char* basis_aliases,
                           char** out_json) {
    if (!sites || !local_exprs || !e || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_sum_rule_json: null argument");
    return guarded([&] {
        modval::AliasTable aliases = make_aliases(basis_aliases);
        std::vector<modval::SiteObservable> terms;
        terms.reserve(n_terms);
        for (size_t k = 0; k < n_terms; ++k) {
            if (!local_exprs[k])
                throw modval::DomainError("mv_sum_rule_json: null term expression");
            terms.push_back(make_site_obs(sites[k], local_exprs[k], aliases));
        }
        modval::ObservableSum sum(e->value.shape(), std::move(terms));
        *out_json = dup_string(modval::to_json(modval::sum_rule_report(sum, g, e->value)).dump(2));
    });
}

mv_status mv_product_rule_json(size_t site_a, const char* expr_a, size_t site_b,
                               const char* expr_b, double g, const mv_ensemble* e,
                               const char* basis_aliases, char** out_json) {
    if (!expr_a || !expr_b || !e || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_product_rule_json: null argument");
    return guarded([&] {
        modval::AliasTable aliases = make_aliases(basis_aliases);
        modval::SiteObservable a = make_site_obs(site_a, expr_a, aliases);
        modval::SiteObservable b = make_site_obs(site_b, expr_b, aliases);
        *out_json = dup_string(
            modval::to_json(modval::check_product_implies_sum(a, b, g, e->value)).dump(2));
    });
}

mv_status mv_single_meter_json(size_t site, const char* obs_expr, double g, const mv_ensemble* e,
                               double gamma_bar, uint64_t shots, uint64_t seed,
                               const char* basis_aliases, char** out_json) {
    if (!obs_expr || !e || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_single_meter_json: null argument");
    return guarded([&] {
        modval::AliasTable aliases = make_aliases(basis_aliases);
        modval::SiteObservable obs = make_site_obs(site, obs_expr, aliases);
        modval::MeterPrep prep(gamma_bar);
        modval::MeterOutcome outcome = modval::run_single_meter(obs, g, e->value, prep);

        nlohmann::json out{
            {"meter", modval::to_json(outcome)},
            {"exact",
             nlohmann::json{
                 {"modular", modval::to_json(outcome.extracted.at("1"))},
                 {"weak",
                  modval::to_json(modval::weak_value(modval::embed(obs, e->value.shape()),
                                                     e->value))},
             }},
        };
        if (shots > 0) {
            modval::ShotRecord rx = modval::sample_meter(outcome, "X", shots, seed);
            modval::ShotRecord ry = modval::sample_meter(outcome, "Y", shots, seed + 1);
            modval::ShotRecord rz = modval::sample_meter(outcome, "Z", shots, seed + 2);
            modval::ModularEstimate est = modval::estimate_modular_from_shots(rx, ry, rz, prep);
            out["sampling"] = nlohmann::json{{"x", modval::to_json(rx)},
                                             {"y", modval::to_json(ry)},
                                             {"z", modval::to_json(rz)},
                                             {"estimate", modval::to_json(est)}};
        }
        *out_json = dup_string(out.dump(2));
    });
}

mv_status mv_scenario_json(const char* name, double coupling, char** out_json) {
    if (!name || !out_json)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_scenario_json: null argument");
    return guarded([&] {
        *out_json =
            dup_string(modval::to_json(modval::run_scenario(name, coupling)).dump(2));
    });
}

mv_status mv_scenario_sweep_csv(const char* name, double start, double stop, size_t count,
                                char** out_csv) {
    if (!name || !out_csv)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_scenario_sweep_csv: null argument");
    return guarded([&] {
        auto points = modval::scenario_sweep(name, start, stop, count);
        std::vector<modval::SweepRow> rows;
        rows.reserve(points.size());
        for (const auto& p : points)
            rows.push_back({p.g, p.modular, p.weak});
        *out_csv = dup_string(modval::sweep_csv(rows));
    });
}

mv_status mv_expr_sweep_csv(const char* obs_expr, const mv_ensemble* e, double g_start,
                            double g_stop, size_t count, const char* basis_aliases,
                            char** out_csv) {
    if (!obs_expr || !e || !out_csv)
        return fail(MV_ERR_INVALID_ARGUMENT, "mv_expr_sweep_csv: null argument");
    return guarded([&] {
        if (count == 0)
            throw modval::DomainError("mv_expr_sweep_csv: need at least one point");
        modval::Operator obs =
            modval::evaluate_operator(obs_expr, make_aliases(basis_aliases));
        modval::Complex weak = modval::weak_value(obs, e->value);
        std::vector<modval::SweepRow> rows;
        rows.reserve(count);
        for (size_t k = 0; k < count; ++k) {
            double g = count == 1 ? g_start
                                  : g_start + (g_stop - g_start) * static_cast<double>(k) /
                                                  static_cast<double>(count - 1);
            rows.push_back({g, modval::modular_value(obs, g, e->value), weak});
        }
        *out_csv = dup_string(modval::sweep_csv(rows));
    });
}

} // extern "C"
