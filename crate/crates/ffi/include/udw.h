#ifndef UDW_H
#define UDW_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum UdwMethod {
  UDW_METHOD_QUADRATURE = 0,
  UDW_METHOD_ANALYTIC_VACUUM = 1,
  UDW_METHOD_EXPANSION = 2,
} UdwMethod;

typedef enum UdwModel {
  UDW_MODEL_REL_FIRST = 0,
  UDW_MODEL_REL_SECOND_CORRECTED = 1,
  UDW_MODEL_REL_SECOND_RAW = 2,
  UDW_MODEL_SEMI_REL = 3,
  UDW_MODEL_NON_REL = 4,
  UDW_MODEL_CLASSICAL = 5,
} UdwModel;

typedef enum UdwStatus {
  UDW_STATUS_OK = 0,
  UDW_STATUS_DOMAIN = 1,
  UDW_STATUS_INVALID = 2,
  UDW_STATUS_PRECONDITION = 3,
  UDW_STATUS_NON_CONVERGENCE = 4,
  UDW_STATUS_NULL_POINTER = 5,
  UDW_STATUS_PANIC = 6,
} UdwStatus;

// A detector (rest mass, gap) in a medium with field speed ν.
typedef struct UdwDetector UdwDetector;

typedef struct UdwRateResult {
  double rate;
  double abs_error_estimate;
  enum UdwMethod method;
} UdwRateResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a validated detector. `*out` receives the handle.
//
// # Safety
// `out` must be null or valid for writes.
enum UdwStatus udw_detector_new(double rest_mass, double gap, double nu, struct UdwDetector **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `d` must be null or a handle from [`udw_detector_new`] not yet freed.
void udw_detector_free(struct UdwDetector *d);

// Closed-form template 𝒯(p).
//
// # Safety
// `d` must be a live handle and `out` valid for writes.
enum UdwStatus udw_template(const struct UdwDetector *d,
                            enum UdwModel model,
                            double p,
                            double *out);

// Template from the delta-resolved integral oracle.
//
// # Safety
// `d` must be a live handle and `out` valid for writes.
enum UdwStatus udw_template_oracle(const struct UdwDetector *d,
                                   enum UdwModel model,
                                   double p,
                                   double *out);

// Templates over `n` strictly increasing momenta, written to `out[0..n]`.
//
// # Safety
// `p_grid` must be valid for `n` reads and `out` for `n` writes.
enum UdwStatus udw_template_sweep(const struct UdwDetector *d,
                                  enum UdwModel model,
                                  const double *p_grid,
                                  size_t n,
                                  double *out);

// Rate for a Gaussian state by adaptive quadrature.
//
// # Safety
// `d` must be a live handle and `out` valid for writes.
enum UdwStatus udw_rate_quadrature(const struct UdwDetector *d,
                                   enum UdwModel model,
                                   double width_l,
                                   double mean_momentum,
                                   double lambda,
                                   double rel_tol,
                                   struct UdwRateResult *out);

// Closed-form vacuum rate for a Gaussian state at rest.
//
// # Safety
// `d` must be a live handle and `out` valid for writes.
enum UdwStatus udw_rate_analytic_vacuum(const struct UdwDetector *d,
                                        enum UdwModel model,
                                        double width_l,
                                        double lambda,
                                        struct UdwRateResult *out);

// Position-state overlap M·K₁(Mr)/((2π)²r).
//
// # Safety
// `out` must be valid for writes.
enum UdwStatus udw_overlap_kernel(double mass, double r, double *out);

// ℓ(a, b, c) with `c2 = c²`.
//
// # Safety
// `out` must be valid for writes.
enum UdwStatus udw_ell(double a, double b, double c2, double *out);

// eˣK₁(x).
//
// # Safety
// `out` must be valid for writes.
enum UdwStatus udw_bessel_k1_scaled(double x, double *out);

// Tricomi U(a, b, z).
//
// # Safety
// `out` must be valid for writes.
enum UdwStatus udw_hyp_u(double a, double b, double z, double *out);

// The last error message on this thread. Valid until the next failing call
// on the same thread; never null.
const char *udw_last_error_message(void);

// The library version as a static NUL-terminated string.
const char *udw_version(void);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* UDW_H */
