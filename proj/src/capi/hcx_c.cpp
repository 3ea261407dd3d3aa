#include "hcx/hcx.h"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "hcx/builder.hpp"
#include "hcx/certify.hpp"
#include "hcx/error.hpp"
#include "hcx/global.hpp"
#include "hcx/instance_io.hpp"
#include "hcx/local.hpp"

struct hcx_instance {
  hcx::TrslInstance inst;
  std::vector<std::string> warnings;
};

struct hcx_local_report {
  hcx::Precheck pre;
  std::vector<hcx::RootRecord> roots;
  std::vector<hcx::CandidatePoint> points;
  std::vector<hcx::Certificate> certs;
};

namespace {

thread_local std::string g_kind;
thread_local std::string g_message;

enum class Context { Load, Solve };

hcx_status fail(hcx_status st, const std::string& kind, const std::string& msg) {
  g_kind = kind;
  g_message = msg;
  return st;
}

hcx_status status_of(hcx::ErrorCode code, Context ctx) {
  using hcx::ErrorCode;
  switch (code) {
    case ErrorCode::Parse: return HCX_PARSE;
    case ErrorCode::Io: return HCX_IO;
    case ErrorCode::BadSequence:
    case ErrorCode::PhiNotIncreasing: return HCX_BAD_SEQUENCE;
    case ErrorCode::NonSymmetric:
    case ErrorCode::InvalidInstance:
    case ErrorCode::NonMonotonePsi:
    case ErrorCode::DimensionMismatch: return ctx == Context::Load ? HCX_PARSE : HCX_INVALID_ARGUMENT;
    default: return HCX_SOLVER;
  }
}

template <class F>
hcx_status guard(Context ctx, F&& f) {
  g_kind.clear();
  g_message.clear();
  try {
    return f();
  } catch (const hcx::Error& e) {
    return fail(status_of(e.code(), ctx), hcx::to_string(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(HCX_INTERNAL, "OutOfMemory", "allocation failed");
  } catch (const std::exception& e) {
    return fail(HCX_INTERNAL, "Internal", e.what());
  }
}

hcx_status null_arg(const char* what) { return fail(HCX_INVALID_ARGUMENT, "InvalidArgument", std::string(what) + " is null"); }

hcx_status copy_text(const std::string& s, char* buf, size_t cap, size_t* needed) {
  if (needed) *needed = s.size() + 1;
  if (!buf || cap < s.size() + 1) return fail(HCX_BUFFER_TOO_SMALL, "BufferTooSmall", "buffer too small");
  std::memcpy(buf, s.c_str(), s.size() + 1);
  return HCX_OK;
}

hcx_status copy_vec(const hcx::Vec& v, double* out, size_t len) {
  if (v.size() == 0) return HCX_OK;
  if (!out || len < static_cast<size_t>(v.size()))
    return fail(HCX_BUFFER_TOO_SMALL, "BufferTooSmall", "output vector too short");
  for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = v(i);
  return HCX_OK;
}

int root_code(hcx::RootClass c) {
  switch (c) {
    case hcx::RootClass::StrictLocal: return HCX_ROOT_STRICT_LOCAL;
    case hcx::RootClass::RejectedNecessary: return HCX_ROOT_REJECTED;
    case hcx::RootClass::Indeterminate: return HCX_ROOT_INDETERMINATE;
  }
  return HCX_ROOT_INDETERMINATE;
}

int cert_code(hcx::CertificateKind k) {
  switch (k) {
    case hcx::CertificateKind::GlobalMin: return HCX_CERT_GLOBAL_MIN;
    case hcx::CertificateKind::StrictLocalNonGlobal: return HCX_CERT_STRICT_LOCAL_NON_GLOBAL;
    case hcx::CertificateKind::NotLocalMin: return HCX_CERT_NOT_LOCAL_MIN;
    case hcx::CertificateKind::Indeterminate: return HCX_CERT_INDETERMINATE;
  }
  return HCX_CERT_INDETERMINATE;
}

hcx_status new_instance(hcx::TrslInstance inst, std::vector<std::string> warnings, hcx_instance** out) {
  *out = new hcx_instance{std::move(inst), std::move(warnings)};
  return HCX_OK;
}

void fill_verify(const hcx::Certificate& cert, hcx_verify_info* info) {
  info->certificate = cert_code(cert.kind);
  info->kkt_ok = cert.kkt.ok;
  info->stationarity_x = cert.kkt.stationarity_x;
  info->stationarity_y = cert.kkt.stationarity_y;
  info->coupling = cert.kkt.coupling;
  info->global_checked = cert.global.has_value();
  info->global_valid = cert.global ? cert.global->valid : 0;
  info->violation_count = cert.global ? static_cast<int>(cert.global->violations.size()) : 0;
  std::snprintf(info->reason, sizeof info->reason, "%s", cert.reason.c_str());
}

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

extern "C" {

const char* hcx_last_error_kind(void) { return g_kind.c_str(); }
const char* hcx_last_error_message(void) { return g_message.c_str(); }
const char* hcx_version(void) { return "0.1.0"; }

hcx_status hcx_instance_load(const char* path, hcx_instance** out) {
  if (!path) return null_arg("path");
  if (!out) return null_arg("out");
  return guard(Context::Load, [&] {
    std::vector<std::string> w;
    hcx::TrslInstance inst = hcx::load_instance(path, &w);
    return new_instance(std::move(inst), std::move(w), out);
  });
}

hcx_status hcx_instance_from_json(const char* text, hcx_instance** out) {
  if (!text) return null_arg("text");
  if (!out) return null_arg("out");
  return guard(Context::Load, [&] {
    std::vector<std::string> w;
    hcx::TrslInstance inst = hcx::instance_from_json(text, &w);
    return new_instance(std::move(inst), std::move(w), out);
  });
}

hcx_status hcx_instance_canned(int which, hcx_instance** out) {
  if (!out) return null_arg("out");
  if (which != HCX_EXAMPLE1 && which != HCX_EXAMPLE2D3)
    return fail(HCX_INVALID_ARGUMENT, "InvalidArgument", "unknown canned example");
  return guard(Context::Solve, [&] {
    const auto w = which == HCX_EXAMPLE1 ? hcx::CannedExample::Example1 : hcx::CannedExample::Example2d3;
    return new_instance(hcx::canned_example(w), {}, out);
  });
}

hcx_status hcx_instance_save(const hcx_instance* inst, const char* path) {
  if (!inst) return null_arg("inst");
  if (!path) return null_arg("path");
  return guard(Context::Solve, [&] {
    hcx::save_instance(path, inst->inst);
    return HCX_OK;
  });
}

hcx_status hcx_instance_to_json(const hcx_instance* inst, char* buf, size_t cap, size_t* needed) {
  if (!inst) return null_arg("inst");
  return guard(Context::Solve, [&] { return copy_text(hcx::instance_to_json(inst->inst), buf, cap, needed); });
}

hcx_status hcx_instance_warnings(const hcx_instance* inst, char* buf, size_t cap, size_t* needed) {
  if (!inst) return null_arg("inst");
  std::string s;
  for (const auto& w : inst->warnings) s += w + "\n";
  return copy_text(s, buf, cap, needed);
}

size_t hcx_instance_dim(const hcx_instance* inst) { return inst ? static_cast<size_t>(inst->inst.n()) : 0; }

void hcx_instance_free(hcx_instance* inst) { delete inst; }

hcx_status hcx_solve(const hcx_instance* inst, hcx_global_info* info, double* x, size_t x_len) {
  if (!inst) return null_arg("inst");
  if (!info) return null_arg("info");
  return guard(Context::Solve, [&] {
    const hcx::GlobalSolution sol = hcx::solve_global(inst->inst);
    const hcx::GlobalCheck chk = hcx::check_global_certificate(hcx::as_general(inst->inst), sol.x, sol.y,
                                                               hcx::Vec::Constant(1, sol.mu));
    info->mu = sol.mu;
    info->y = sol.y(0);
    info->objective = sol.objective;
    info->hard_case = sol.hard_case;
    info->certificate_valid = chk.valid;
    info->min_eig = chk.min_eig;
    return copy_vec(sol.x, x, x_len);
  });
}

const char* hcx_root_class_name(int c) {
  switch (c) {
    case HCX_ROOT_STRICT_LOCAL: return "StrictLocal";
    case HCX_ROOT_REJECTED: return "RejectedNecessary";
    case HCX_ROOT_INDETERMINATE: return "Indeterminate";
  }
  return "Unknown";
}

const char* hcx_certificate_name(int k) {
  switch (k) {
    case HCX_CERT_GLOBAL_MIN: return "GlobalMin";
    case HCX_CERT_STRICT_LOCAL_NON_GLOBAL: return "StrictLocalNonGlobal";
    case HCX_CERT_NOT_LOCAL_MIN: return "NotLocalMin";
    case HCX_CERT_INDETERMINATE: return "Indeterminate";
  }
  return "Unknown";
}

hcx_status hcx_local_run(const hcx_instance* inst, int grid_points, hcx_local_report** out) {
  if (!inst) return null_arg("inst");
  if (!out) return null_arg("out");
  if (grid_points < 2) return fail(HCX_INVALID_ARGUMENT, "InvalidArgument", "grid needs at least 2 points");
  return guard(Context::Solve, [&] {
    auto rep = std::make_unique<hcx_local_report>();
    const hcx::Problem prob = hcx::Problem::from(inst->inst);
    rep->pre = hcx::precheck(prob);
    if (rep->pre.proceed) {
      rep->roots = hcx::enumerate_roots(prob, grid_points);
      for (const auto& r : rep->roots) {
        rep->points.push_back(hcx::materialize(prob, r));
        rep->certs.push_back(hcx::certify_local(prob, rep->points.back()));
      }
    }
    *out = rep.release();
    return HCX_OK;
  });
}

hcx_status hcx_local_precheck(const hcx_local_report* rep, hcx_precheck_info* info) {
  if (!rep) return null_arg("rep");
  if (!info) return null_arg("info");
  info->proceed = rep->pre.proceed;
  info->reason = hcx::to_string(rep->pre.reason);
  info->lo = rep->pre.lo;
  info->hi = rep->pre.hi;
  return HCX_OK;
}

size_t hcx_local_count(const hcx_local_report* rep) { return rep ? rep->roots.size() : 0; }

hcx_status hcx_local_root(const hcx_local_report* rep, size_t i, hcx_root_info* info, double* x, size_t x_len,
                          double* b, size_t b_cap) {
  if (!rep) return null_arg("rep");
  if (!info) return null_arg("info");
  if (i >= rep->roots.size()) return fail(HCX_INVALID_ARGUMENT, "InvalidArgument", "root index out of range");
  const auto& r = rep->roots[i];
  const auto& p = rep->points[i];
  const auto& c = rep->certs[i];
  info->mu = r.mu;
  info->residual = r.residual;
  info->gap_d1 = r.gap_d1;
  info->classification = root_code(r.classification);
  info->tangential = r.tangential;
  info->y = p.y(0);
  info->kkt_ok = p.residuals.ok;
  info->certificate = cert_code(c.kind);
  info->has_b = c.hessian.has_value();
  info->b_min_eig = c.hessian ? c.hessian->min_eig : kNaN;
  info->det_direct = c.hessian ? c.hessian->det_direct : kNaN;
  info->det_formula = c.hessian ? c.hessian->det_formula : kNaN;
  if (x)
    if (const hcx_status st = copy_vec(p.x, x, x_len); st != HCX_OK) return st;
  if (b && c.hessian) {
    const hcx::Mat& B = c.hessian->B;
    if (b_cap < static_cast<size_t>(B.size()))
      return fail(HCX_BUFFER_TOO_SMALL, "BufferTooSmall", "Hessian buffer too short");
    for (Eigen::Index r0 = 0; r0 < B.rows(); ++r0)
      for (Eigen::Index c0 = 0; c0 < B.cols(); ++c0) b[r0 * B.cols() + c0] = B(r0, c0);
  }
  return HCX_OK;
}

void hcx_local_free(hcx_local_report* rep) { delete rep; }

hcx_status hcx_verify(const hcx_instance* inst, const double* x, size_t x_len, double y, double mu,
                      hcx_verify_info* info) {
  if (!inst) return null_arg("inst");
  if (!x) return null_arg("x");
  if (!info) return null_arg("info");
  if (x_len != static_cast<size_t>(inst->inst.n()))
    return fail(HCX_INVALID_ARGUMENT, "DimensionMismatch", "x has the wrong length");
  return guard(Context::Solve, [&] {
    const hcx::Problem prob = hcx::Problem::from(inst->inst);
    hcx::CandidatePoint cand;
    cand.x = Eigen::Map<const hcx::Vec>(x, static_cast<Eigen::Index>(x_len));
    cand.y = hcx::Vec::Constant(1, y);
    cand.mu = mu;
    fill_verify(hcx::certify_local(prob, cand), info);
    return HCX_OK;
  });
}

hcx_status hcx_verify_file(const hcx_instance* inst, const char* path, hcx_verify_info* info) {
  if (!inst) return null_arg("inst");
  if (!path) return null_arg("path");
  if (!info) return null_arg("info");
  hcx::CandidateFile cand;
  if (const hcx_status st = guard(Context::Load, [&] {
        cand = hcx::load_candidate(path);
        return HCX_OK;
      });
      st != HCX_OK)
    return st;
  if (cand.y.size() != 1) return fail(HCX_PARSE, "Parse", "candidate y must be a scalar for this instance");
  return hcx_verify(inst, cand.x.data(), static_cast<size_t>(cand.x.size()), cand.y(0), cand.mu, info);
}

hcx_status hcx_generate(size_t d, const double* mus, size_t n_mus, const double* o, size_t n_o, double eps,
                        const hcx_instance* base, hcx_instance** out) {
  if (!out) return null_arg("out");
  if (!mus && n_mus) return null_arg("mus");
  if (!o && n_o) return null_arg("o");
  if (d == 0 || n_mus != 2 * d)
    return fail(HCX_BAD_SEQUENCE, "BadSequence", "need exactly 2d sequence points");
  return guard(Context::Solve, [&] {
    hcx::BuildOptions opts;
    opts.o_overrides.assign(o, o + n_o);
    if (eps > 0.0) opts.eps_override = eps;
    const hcx::TrslInstance b = base ? base->inst : hcx::canned_example(hcx::CannedExample::Example1);
    return new_instance(hcx::build_instance(b, std::vector<double>(mus, mus + n_mus), opts), {}, out);
  });
}

hcx_status hcx_sample(const hcx_instance* inst, double from, double to, size_t points, double* rows, size_t cap) {
  if (!inst) return null_arg("inst");
  if (!rows) return null_arg("rows");
  if (points < 2 || !(to > from))
    return fail(HCX_INVALID_ARGUMENT, "InvalidArgument", "need at least 2 points on a non-empty range");
  if (cap < points * HCX_SAMPLE_COLUMNS) return fail(HCX_BUFFER_TOO_SMALL, "BufferTooSmall", "rows buffer too short");
  return guard(Context::Solve, [&] {
    const hcx::Spectrum s = hcx::decompose(inst->inst.H, inst->inst.c);
    for (size_t k = 0; k < points; ++k) {
      const double mu = k + 1 == points ? to : from + (to - from) * static_cast<double>(k) / (points - 1);
      double* row = rows + k * HCX_SAMPLE_COLUMNS;
      row[0] = mu;
      for (int j = 1; j < HCX_SAMPLE_COLUMNS; ++j) row[j] = kNaN;
      try {
        row[1] = hcx::phi(s, mu);
        row[3] = hcx::phi_d1(s, mu);
      } catch (const hcx::Error&) {
      }
      try {
        row[2] = hcx::psi_trsl(inst->inst, mu);
        row[4] = hcx::psi_trsl_d1(inst->inst, mu);
      } catch (const hcx::Error&) {
      }
      row[5] = row[1] - row[2];
    }
    return HCX_OK;
  });
}

hcx_status hcx_uniqueness(const hcx_instance* inst, int* kind, int* exact, double* witness_mu) {
  if (!inst) return null_arg("inst");
  return guard(Context::Solve, [&] {
    const hcx::UniquenessReport rep = hcx::uniqueness_report(inst->inst);
    int k = HCX_MULTIPLE_POSSIBLE;
    if (rep.kind == hcx::UniquenessKind::AtMostOneProven) k = HCX_UNIQUE_PROVEN;
    if (rep.kind == hcx::UniquenessKind::AtMostOneSampled) k = HCX_UNIQUE_SAMPLED;
    if (kind) *kind = k;
    if (exact) *exact = rep.exact_classification;
    if (witness_mu) *witness_mu = rep.witness_mu;
    return HCX_OK;
  });
}

}  // extern "C"
