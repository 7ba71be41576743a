/* modval - weak and modular values of pre-/post-selected quantum systems.
 *
 * C interface to the modval core.  All functions return an mv_status; out
 * parameters are only written on MV_OK.  A human-readable description of the
 * most recent failure on the calling thread is available from
 * mv_last_error().  Objects returned through handle out-parameters must be
 * released with the matching *_free function; strings returned through
 * char** out-parameters with mv_string_free().
 *
 * Conventions: the coupling unitary is U = exp(-i g A), so the modular
 * value is (A)_mod = <phi|exp(-i g A)|psi> / <phi|psi>.  Composite bases
 * are ordered row-major in the tensor factors (for dims (2,2): |00>, |01>,
 * |10>, |11>).  Complex arrays are interleaved re,im pairs; matrices are
 * additionally row-major.
 */

#ifndef MODVAL_H
#define MODVAL_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mv_status {
    MV_OK = 0,
    MV_ERR_INVALID_ARGUMENT = 1,
    MV_ERR_SHAPE_MISMATCH = 2,
    MV_ERR_DIMENSION_LIMIT = 3,
    MV_ERR_DEGENERATE_SPECTRUM = 4,
    MV_ERR_ORTHOGONAL_SELECTION = 5,
    MV_ERR_NOT_HERMITIAN = 6,
    MV_ERR_PARSE = 7,
    MV_ERR_DOMAIN = 8,
    MV_ERR_INTERNAL = 9
} mv_status;

typedef struct mv_complex {
    double re;
    double im;
} mv_complex;

typedef struct mv_ket mv_ket;
typedef struct mv_op mv_op;
typedef struct mv_ensemble mv_ensemble;

const char* mv_version(void);

/* Message for the most recent failure on this thread ("" if none). */
const char* mv_last_error(void);

void mv_string_free(char* s);

/* --- states ---------------------------------------------------------- */

mv_status mv_ket_create(const size_t* dims, size_t n_dims, const double* amplitudes_re_im,
                        mv_ket** out);

/* Evaluate a bra-ket expression to a state.  basis_aliases optionally adds
 * ket labels as "A,B" pairs joined with ';' (|A> -> index 0, |B> -> 1);
 * pass NULL for the defaults (0/1, H/V, L/R, up/dn, O/NO). */
mv_status mv_ket_parse(const char* expression, const char* basis_aliases, mv_ket** out);

void mv_ket_free(mv_ket* k);

/* Call with dims == NULL to query the factor count. */
mv_status mv_ket_dims(const mv_ket* k, size_t* dims, size_t* n_dims);

/* Call with amplitudes_re_im == NULL to query the length (2 * dimension). */
mv_status mv_ket_amplitudes(const mv_ket* k, double* amplitudes_re_im, size_t* n_values);

mv_status mv_ket_to_json(const mv_ket* k, char** out_json);

/* --- observables ------------------------------------------------------ */

mv_status mv_op_create(const size_t* dims, size_t n_dims, const double* entries_re_im,
                       int assert_hermitian, mv_op** out);

mv_status mv_op_parse(const char* expression, const char* basis_aliases, mv_op** out);

void mv_op_free(mv_op* o);

mv_status mv_op_is_hermitian(const mv_op* o, int* out);

mv_status mv_op_to_json(const mv_op* o, char** out_json);

/* --- pre-/post-selected ensembles ------------------------------------- */

/* Both states are normalized; |<phi|psi>| must exceed overlap_eps (pass a
 * value <= 0 for the default 1e-10). */
mv_status mv_ensemble_create(const mv_ket* pre, const mv_ket* post, double overlap_eps,
                             mv_ensemble** out);

void mv_ensemble_free(mv_ensemble* e);

mv_status mv_ensemble_overlap(const mv_ensemble* e, mv_complex* out);

/* --- weak and modular values ------------------------------------------ */

mv_status mv_weak_value(const mv_op* obs, const mv_ensemble* e, mv_complex* out);

mv_status mv_modular_value(const mv_op* obs, double g, const mv_ensemble* e, mv_complex* out);

/* exp(-i g A) = a A + b I for a two-level spectrum {lambda1, lambda2}. */
mv_status mv_two_level_coeffs(double lambda1, double lambda2, double g, mv_complex* a,
                              mv_complex* b);

mv_status mv_modular_from_weak(mv_complex weak, double lambda1, double lambda2, double g,
                               mv_complex* out);

/* Fails with MV_ERR_DOMAIN when g (lambda1 - lambda2) is a multiple of
 * 2 pi, where the conversion is not invertible. */
mv_status mv_weak_from_modular(mv_complex modular, double lambda1, double lambda2, double g,
                               mv_complex* out);

/* --- sums of local observables ---------------------------------------- */

/* Terms are local 2x2 observables given as expressions, acting on distinct
 * factors `sites[j]` of the ensemble's space.  The JSON reports the modular
 * value of the sum, the sum of modular values, their gap, and per-term weak
 * and modular values. */
mv_status mv_sum_rule_json(const size_t* sites, const char* const* local_exprs, size_t n_terms,
                           double g, const mv_ensemble* e, const char* basis_aliases,
                           char** out_json);

/* Weak product rule <AB>_w vs <A>_w <B>_w for locals on distinct sites,
 * plus the factorization check for the modular value of the sum. */
mv_status mv_product_rule_json(size_t site_a, const char* expr_a, size_t site_b,
                               const char* expr_b, double g, const mv_ensemble* e,
                               const char* basis_aliases, char** out_json);

/* --- qubit-meter protocol ---------------------------------------------- */

/* Couple the local observable to a meter qubit prepared with amplitude
 * gamma_bar on |1>, post-select, and report the meter state and extracted
 * modular value.  With shots > 0 the meter is also sampled in the X, Y and
 * Z bases (seeds seed, seed+1, seed+2) and the tomographic estimate with
 * its standard error is included. */
mv_status mv_single_meter_json(size_t site, const char* obs_expr, double g,
                               const mv_ensemble* e, double gamma_bar, uint64_t shots,
                               uint64_t seed, const char* basis_aliases, char** out_json);

/* --- worked scenarios --------------------------------------------------- */

/* name is one of "epr", "hardy", "cheshire", "crz".  The coupling is g,
 * except for "crz" where it is the gate angle theta (g = theta / 2). */
mv_status mv_scenario_json(const char* name, double coupling, char** out_json);

/* CSV sweep (header g,re_mod,im_mod,abs_mod,re_weak,im_weak) of the
 * scenario's headline sum observable over `count` evenly spaced couplings;
 * for "crz" the range is in theta and the g column holds theta / 2. */
mv_status mv_scenario_sweep_csv(const char* name, double start, double stop, size_t count,
                                char** out_csv);

/* Same CSV for an arbitrary observable expression on the ensemble's full
 * space, swept over g. */
mv_status mv_expr_sweep_csv(const char* obs_expr, const mv_ensemble* e, double g_start,
                            double g_stop, size_t count, const char* basis_aliases,
                            char** out_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* MODVAL_H */
