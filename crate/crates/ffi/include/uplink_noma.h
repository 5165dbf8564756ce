#ifndef UPLINK_NOMA_H
#define UPLINK_NOMA_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Branch chosen by the adaptive full-CSI scheme.
 */
typedef enum NomaMode {
  NOMA_MODE_NOMA_BOTH = 0,
  NOMA_MODE_STRONG_ONLY_FREE = 1,
  NOMA_MODE_OMA_BOTH = 2,
  NOMA_MODE_WEAK_ONLY_FREE = 3,
  NOMA_MODE_STRONG_ONLY_FALLBACK = 4,
  NOMA_MODE_IDLE = 5,
} NomaMode;

/*
 Success probabilities of the fixed-rate schemes.
 */
typedef enum NomaPhi {
  NOMA_PHI_NOMA_WEAK = 0,
  NOMA_PHI_NOMA_STRONG = 1,
  NOMA_PHI_OMA_WEAK = 2,
  NOMA_PHI_OMA_STRONG = 3,
} NomaPhi;

/*
 Result code of every fallible call.
 */
typedef enum NomaStatus {
  NOMA_STATUS_OK = 0,
  /*
   A required pointer argument was null.
   */
  NOMA_STATUS_NULL_POINTER = 1,
  /*
   An argument is outside its domain or a name is unknown.
   */
  NOMA_STATUS_INVALID_ARGUMENT = 2,
  /*
   OMA never overtakes NOMA inside the search range; the value written is `+inf`.
   */
  NOMA_STATUS_NO_CROSSOVER = 3,
  NOMA_STATUS_INTERNAL = 4,
} NomaStatus;

typedef enum NomaStrategy {
  NOMA_STRATEGY_OMA = 0,
  NOMA_STRATEGY_NOMA = 1,
  NOMA_STRATEGY_NOMA_A = 2,
} NomaStrategy;

typedef enum NomaUser {
  NOMA_USER_WEAK = 0,
  NOMA_USER_STRONG = 1,
  NOMA_USER_SUM = 2,
} NomaUser;

/*
 Opaque two-user scenario.
 */
typedef struct NomaScenario NomaScenario;

/*
 Weak-user, strong-user and sum values of one metric.
 */
typedef struct NomaTriple {
  double weak;
  double strong;
  double sum;
} NomaTriple;

typedef struct NomaDecision {
  enum NomaMode mode;
  bool active_weak;
  bool active_strong;
  /*
   Instantaneous rates in bit/s/Hz.
   */
  double rate_weak;
  double rate_strong;
} NomaDecision;

typedef struct NomaEstimate {
  double mean;
  double std_error;
} NomaEstimate;

/*
 Monte Carlo estimates of one two-user metric.
 */
typedef struct NomaMcTriple {
  struct NomaEstimate weak;
  struct NomaEstimate strong;
  struct NomaEstimate sum;
} NomaMcTriple;

typedef struct NomaQuadCheck {
  double closed_form;
  double integral;
  double rel_err;
} NomaQuadCheck;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message describing the last failure on this thread, or an empty string.
 The pointer stays valid until the next call into this library on the
 same thread.
 */
const char *noma_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *noma_version(void);

/*
 Creates a scenario from linear powers and dB threshold / SNR.
 Requires `0 < p1 <= p2` and `gamma_db >= 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum NomaStatus noma_scenario_new(double p1,
                                  double p2,
                                  double gamma_db,
                                  double rho_db,
                                  struct NomaScenario **out);

/*
 Releases a handle. Null is accepted and ignored.

 # Safety
 `scenario` must be null or a handle not yet freed.
 */
void noma_scenario_free(struct NomaScenario *scenario);

/*
 Exponential integral `E1(x)` for `x > 0`.

 # Safety
 `out` must be null or valid for writes.
 */
enum NomaStatus noma_e1(double x, double *out);

/*
 `∫_{γ/ρ}^∞ ln(1+ρx) e^{-λx} dx` in nats.

 # Safety
 `out` must be null or valid for writes.
 */
enum NomaStatus noma_alpha(double gamma, double lambda, double rho, double *out);

/*
 Success probability of one user under a fixed-rate scheme.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_phi(const struct NomaScenario *scenario, enum NomaPhi which, double *out);

/*
 Fixed-rate throughput in bit/s/Hz. `A` applies the no-CSI selection.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_throughput(const struct NomaScenario *scenario,
                                enum NomaStrategy strategy,
                                struct NomaTriple *out);

/*
 Average data rates under full CSI, in bit/s/Hz.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_rates(const struct NomaScenario *scenario,
                           enum NomaStrategy strategy,
                           struct NomaTriple *out);

/*
 Probability that both users are active under full CSI.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_activity(const struct NomaScenario *scenario,
                              enum NomaStrategy strategy,
                              double *out);

/*
 No-CSI selection: NOMA or OMA, whichever has the larger sum throughput
 (ties go to NOMA).

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_select_no_csit(const struct NomaScenario *scenario, enum NomaStrategy *out);

/*
 Adaptive full-CSI decision for one realisation. The two received powers
 may be given in any order.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_decide(const struct NomaScenario *scenario,
                            double x1,
                            double x2,
                            struct NomaDecision *out);

/*
 Smallest linear SNR from which OMA's throughput for `target` is at least
 NOMA's. Only the scenario's powers and threshold matter. Writes `+inf` and
 returns `NOMA_STATUS_NO_CROSSOVER` when there is none.

 # Safety
 `scenario` must be null or a live handle; `out` null or writable.
 */
enum NomaStatus noma_rho_min(const struct NomaScenario *scenario,
                             enum NomaUser target,
                             double *out);

/*
 Monte Carlo estimates (`samples >= 1000` draws) of throughput and
 average rate for one strategy. Results are identical for a given seed
 whatever the number of threads.

 # Safety
 `scenario` must be null or a live handle; the out-pointers null or writable.
 */
enum NomaStatus noma_mc_two_user(const struct NomaScenario *scenario,
                                 enum NomaStrategy strategy,
                                 uint64_t samples,
                                 uint64_t seed,
                                 struct NomaMcTriple *throughput_out,
                                 struct NomaMcTriple *rate_out);

/*
 Compares a registered closed form with quadrature of its defining
 integral. `id` is a NUL-terminated identifier such as `"rate_noma_strong"`.

 # Safety
 `scenario` must be null or a live handle; `id` null or a C string;
 `out` null or writable.
 */
enum NomaStatus noma_quad_verify(const struct NomaScenario *scenario,
                                 const char *id,
                                 struct NomaQuadCheck *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* UPLINK_NOMA_H */
