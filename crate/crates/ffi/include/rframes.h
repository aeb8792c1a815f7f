#ifndef RFRAMES_H
#define RFRAMES_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define RF_OK 0

/**
 * A required pointer argument was null.
 */
#define RF_ERR_NULL 1

/**
 * Invalid input: lengths, divisibility, index ranges, or a bank without the required structure.
 */
#define RF_ERR_PRECONDITION 2

/**
 * The optimisation step failed or a numerical check did not pass.
 */
#define RF_ERR_SOLVER 3

#define RF_ERR_IO 4

/**
 * The output buffer is shorter than the result. The required length is in the message.
 */
#define RF_ERR_BUFFER_TOO_SMALL 5

/**
 * A panic was caught at the boundary.
 */
#define RF_ERR_PANIC 6

/**
 * Opaque Ramanujan filter bank.
 */
typedef struct RfBank RfBank;

/**
 * Opaque polyphase frame report of a uniform bank.
 */
typedef struct RfFrameReport RfFrameReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null if none failed yet.
 *
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *rf_last_error_message(void);

/**
 * Euler's totient of `q`.
 *
 * # Safety
 * `out` must be valid for one write.
 */
int32_t rf_totient(size_t q, size_t *out);

/**
 * Writes `c_q(0..n)` to `out`.
 *
 * # Safety
 * `out` must be valid for `out_len` writes.
 */
int32_t rf_ramanujan_sum(size_t q, size_t n, int64_t *out, size_t out_len);

/**
 * Creates the uniform bank on length `n` with decimation `p` for every divisor channel.
 *
 * # Safety
 * `out` must be valid for one write. The handle must be released with [`rf_bank_free`].
 */
int32_t rf_bank_new_uniform(size_t n, size_t p, struct RfBank **out);

/**
 * Creates a bank with channels `(qs[j], ps[j])`.
 *
 * # Safety
 * `qs` and `ps` must be valid for `len` reads and `out` for one write. The handle must be
 * released with [`rf_bank_free`].
 */
int32_t rf_bank_new(size_t n, const size_t *qs, const size_t *ps, size_t len, struct RfBank **out);

/**
 * Releases a bank. Null is ignored.
 *
 * # Safety
 * `bank` must come from one of the `rf_bank_new*` functions and not have been freed.
 */
void rf_bank_free(struct RfBank *bank);

/**
 * Number of channels, or 0 for a null handle.
 *
 * # Safety
 * `bank` must be null or a live handle.
 */
size_t rf_bank_num_channels(const struct RfBank *bank);

/**
 * Total number of analysis coefficients, or 0 for a null handle.
 *
 * # Safety
 * `bank` must be null or a live handle.
 */
size_t rf_bank_total_coefficients(const struct RfBank *bank);

/**
 * Analysis coefficients of `x`, channel after channel.
 *
 * # Safety
 * `bank` must be a live handle, `x` valid for `len` reads and `out` for `out_len` writes.
 */
int32_t rf_bank_analyze(const struct RfBank *bank,
                        const double *x,
                        size_t len,
                        double *out,
                        size_t out_len);

/**
 * Reconstructs a signal from flat coefficients with the tight bound `a`.
 *
 * Fails with `RF_ERR_PRECONDITION` if the bank is not tight or `a` is not its bound.
 *
 * # Safety
 * `bank` must be a live handle, `coeffs` valid for `coeffs_len` reads and `out` for
 * `out_len` writes.
 */
int32_t rf_bank_synthesize(const struct RfBank *bank,
                           const double *coeffs,
                           size_t coeffs_len,
                           double a,
                           double *out,
                           size_t out_len);

/**
 * Energy of `x` in each channel, in channel order.
 *
 * # Safety
 * `bank` must be a live handle, `x` valid for `len` reads and `out` for `out_len` writes.
 */
int32_t rf_bank_channel_energies(const struct RfBank *bank,
                                 const double *x,
                                 size_t len,
                                 double *out,
                                 size_t out_len);

/**
 * Polyphase frame analysis of a uniform bank.
 *
 * # Safety
 * `bank` must be a live handle and `out` valid for one write. The report must be released
 * with [`rf_frame_report_free`].
 */
int32_t rf_frame_report_new(const struct RfBank *bank, struct RfFrameReport **out);

/**
 * Lower and upper frame bounds.
 *
 * # Safety
 * `report` must be a live handle; `a` and `b` must be valid for one write each.
 */
int32_t rf_frame_report_bounds(const struct RfFrameReport *report, double *a, double *b);

/**
 * Writes 1 if the bank is a tight frame, 0 otherwise.
 *
 * # Safety
 * `report` must be a live handle and `out` valid for one write.
 */
int32_t rf_frame_report_is_tight(const struct RfFrameReport *report, int32_t *out);

/**
 * JSON form of the report. The string is owned by the report.
 *
 * # Safety
 * `report` must be null or a live handle.
 */
const char *rf_frame_report_json(const struct RfFrameReport *report);

/**
 * Releases a frame report. Null is ignored.
 *
 * # Safety
 * `report` must come from [`rf_frame_report_new`] and not have been freed.
 */
void rf_frame_report_free(struct RfFrameReport *report);

/**
 * Period of `x` from the responding channels of the `p = 1` bank.
 *
 * # Safety
 * `x` must be valid for `len` reads and `period` for one write.
 */
int32_t rf_identify_period(const double *x, size_t len, double zero_tol, size_t *period);

/**
 * Recovers a signal from `observed = T_J x`, where `J` is every coefficient except the
 * `missing_len` pairs `(missing_k[j], missing_i[j])`.
 *
 * With `periods_len > 0` the estimate is constrained to the subspaces `S_q` of the given
 * divisors.
 *
 * # Safety
 * `bank` must be a live handle. `observed` must be valid for `len` reads, the pair arrays
 * for `missing_len` reads, `periods` for `periods_len` reads and `out` for `out_len` writes.
 */
int32_t rf_recover_missing(const struct RfBank *bank,
                           const double *observed,
                           size_t len,
                           const size_t *missing_k,
                           const size_t *missing_i,
                           size_t missing_len,
                           const size_t *periods,
                           size_t periods_len,
                           double *out,
                           size_t out_len);

/**
 * Denoises `y` against sparse noise. Active coefficients are detected with `threshold`
 * relative to the strongest channel.
 *
 * # Safety
 * `bank` must be a live handle, `y` valid for `len` reads and `out` for `out_len` writes.
 */
int32_t rf_denoise(const struct RfBank *bank,
                   const double *y,
                   size_t len,
                   double threshold,
                   double *out,
                   size_t out_len);

/**
 * Like [`rf_denoise`] with an explicit support set `M` of coefficient pairs.
 *
 * # Safety
 * As for [`rf_denoise`]; the pair arrays must be valid for `m_len` reads.
 */
int32_t rf_denoise_with_support(const struct RfBank *bank,
                                const double *y,
                                size_t len,
                                const size_t *m_k,
                                const size_t *m_i,
                                size_t m_len,
                                double *out,
                                size_t out_len);

/**
 * SNR in dB of `estimate` as an approximation of `x`.
 *
 * # Safety
 * `x` and `estimate` must be valid for `len` reads and `out` for one write.
 */
int32_t rf_snr_db(const double *x, const double *estimate, size_t len, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RFRAMES_H */
