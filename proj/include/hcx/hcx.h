#ifndef HCX_H
#define HCX_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(HCX_BUILDING_LIBRARY)
#define HCX_API __attribute__((visibility("default")))
#else
#define HCX_API
#endif

typedef enum {
  HCX_OK = 0,
  HCX_INVALID_ARGUMENT = 1,
  HCX_PARSE = 2,
  HCX_SOLVER = 3,
  HCX_BAD_SEQUENCE = 4,
  HCX_IO = 5,
  HCX_BUFFER_TOO_SMALL = 6,
  HCX_INTERNAL = 7
} hcx_status;

/* Details of the most recent failure on the calling thread. The kind is the
   core error name ("ConvexInstance", "BadSequence", ...) or "" after success. */
HCX_API const char* hcx_last_error_kind(void);
HCX_API const char* hcx_last_error_message(void);
HCX_API const char* hcx_version(void);

/* ---- instances ---------------------------------------------------------- */

typedef struct hcx_instance hcx_instance;

enum { HCX_EXAMPLE1 = 0, HCX_EXAMPLE2D3 = 1 };

HCX_API hcx_status hcx_instance_load(const char* path, hcx_instance** out);
HCX_API hcx_status hcx_instance_from_json(const char* text, hcx_instance** out);
HCX_API hcx_status hcx_instance_canned(int which, hcx_instance** out);
HCX_API hcx_status hcx_instance_save(const hcx_instance* inst, const char* path);
/* Canonical text. *needed always receives the size including the NUL. */
HCX_API hcx_status hcx_instance_to_json(const hcx_instance* inst, char* buf, size_t cap, size_t* needed);
/* Newline-separated load warnings, same buffer protocol. */
HCX_API hcx_status hcx_instance_warnings(const hcx_instance* inst, char* buf, size_t cap, size_t* needed);
HCX_API size_t hcx_instance_dim(const hcx_instance* inst);
HCX_API void hcx_instance_free(hcx_instance* inst);

/* ---- global solve ------------------------------------------------------- */

typedef struct {
  double mu;
  double y;
  double objective;
  int hard_case;
  int certificate_valid; /* global optimality certificate holds */
  double min_eig;        /* of H + mu I */
} hcx_global_info;

/* x must hold hcx_instance_dim entries. */
HCX_API hcx_status hcx_solve(const hcx_instance* inst, hcx_global_info* info, double* x, size_t x_len);

/* ---- local non-global analysis ------------------------------------------ */

enum { HCX_ROOT_STRICT_LOCAL = 0, HCX_ROOT_REJECTED = 1, HCX_ROOT_INDETERMINATE = 2 };
enum {
  HCX_CERT_GLOBAL_MIN = 0,
  HCX_CERT_STRICT_LOCAL_NON_GLOBAL = 1,
  HCX_CERT_NOT_LOCAL_MIN = 2,
  HCX_CERT_INDETERMINATE = 3
};

HCX_API const char* hcx_root_class_name(int classification);
HCX_API const char* hcx_certificate_name(int kind);

typedef struct hcx_local_report hcx_local_report;

typedef struct {
  int proceed;
  const char* reason; /* "none", "convex", "g1=0", ...; owned by the library */
  double lo;
  double hi;
} hcx_precheck_info;

typedef struct {
  double mu;
  double residual; /* phi - psi */
  double gap_d1;   /* phi' - psi' */
  int classification;
  int tangential;
  double y;
  int kkt_ok;
  int certificate;
  int has_b;
  double b_min_eig;
  double det_direct;
  double det_formula;
} hcx_root_info;

HCX_API hcx_status hcx_local_run(const hcx_instance* inst, int grid_points, hcx_local_report** out);
HCX_API hcx_status hcx_local_precheck(const hcx_local_report* rep, hcx_precheck_info* info);
HCX_API size_t hcx_local_count(const hcx_local_report* rep);
/* x and b may be null. b receives the reduced Hessian row-major (n x n for scalar y). */
HCX_API hcx_status hcx_local_root(const hcx_local_report* rep, size_t i, hcx_root_info* info, double* x,
                                  size_t x_len, double* b, size_t b_cap);
HCX_API void hcx_local_free(hcx_local_report* rep);

/* ---- verification of a supplied candidate ------------------------------- */

typedef struct {
  int certificate;
  int kkt_ok;
  double stationarity_x;
  double stationarity_y;
  double coupling;
  int global_checked;
  int global_valid;
  int violation_count;
  char reason[160];
} hcx_verify_info;

HCX_API hcx_status hcx_verify(const hcx_instance* inst, const double* x, size_t x_len, double y, double mu,
                              hcx_verify_info* info);
/* Candidate file: {"x": [...], "y": number, "mu": number} */
HCX_API hcx_status hcx_verify_file(const hcx_instance* inst, const char* path, hcx_verify_info* info);

/* ---- construction and sampling ------------------------------------------ */

/* 2d ascending points; o (d - 1 entries) and eps > 0 are optional overrides.
   base defaults to the H and c of HCX_EXAMPLE1. */
HCX_API hcx_status hcx_generate(size_t d, const double* mus, size_t n_mus, const double* o, size_t n_o, double eps,
                                const hcx_instance* base, hcx_instance** out);

enum { HCX_SAMPLE_COLUMNS = 6 }; /* mu, phi, psi, phi_d1, psi_d1, gap; NaN where undefined */
HCX_API hcx_status hcx_sample(const hcx_instance* inst, double from, double to, size_t points, double* rows,
                              size_t cap);

enum { HCX_UNIQUE_PROVEN = 0, HCX_UNIQUE_SAMPLED = 1, HCX_MULTIPLE_POSSIBLE = 2 };
HCX_API hcx_status hcx_uniqueness(const hcx_instance* inst, int* kind, int* exact, double* witness_mu);

#ifdef __cplusplus
}
#endif

#endif
