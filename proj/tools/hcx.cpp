// hcx: command-line front end over the C API.
//
// Exit codes: 0 ok, 1 certificate not valid, 2 unreadable or malformed input,
// 3 solver error, 4 bad construction sequence, 5 usage error.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "hcx/hcx.h"

namespace {

enum Exit { kOk = 0, kInvalid = 1, kParse = 2, kSolver = 3, kBadSequence = 4, kUsage = 5 };

int exit_for(hcx_status st) {
  switch (st) {
    case HCX_OK: return kOk;
    case HCX_PARSE:
    case HCX_IO: return kParse;
    case HCX_BAD_SEQUENCE: return kBadSequence;
    case HCX_INVALID_ARGUMENT: return kUsage;
    default: return kSolver;
  }
}

int report(hcx_status st) {
  std::cerr << "error: " << hcx_last_error_message() << "\n";
  return exit_for(st);
}

std::string num(double v, int digits = 17) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

std::string vec(const std::vector<double>& v, int digits) {
  std::string s = "(";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i], digits);
  return s + ")";
}

struct Instance {
  hcx_instance* p = nullptr;
  ~Instance() { hcx_instance_free(p); }
};

hcx_status load(const std::string& path, Instance& inst) {
  const hcx_status st = hcx_instance_load(path.c_str(), &inst.p);
  if (st != HCX_OK) return st;
  size_t need = 0;
  hcx_instance_warnings(inst.p, nullptr, 0, &need);
  std::string w(need, '\0');
  if (need > 1 && hcx_instance_warnings(inst.p, w.data(), w.size(), &need) == HCX_OK) {
    w.resize(need - 1);
    std::cerr << "warning: " << w;
  }
  return HCX_OK;
}

// -- solve -------------------------------------------------------------------

int solve_one(const std::string& path, std::ostream& out) {
  Instance inst;
  if (hcx_status st = load(path, inst); st != HCX_OK) return report(st);
  std::vector<double> x(hcx_instance_dim(inst.p));
  hcx_global_info info{};
  if (hcx_status st = hcx_solve(inst.p, &info, x.data(), x.size()); st != HCX_OK) {
    out << "error: " << hcx_last_error_message() << "\n";
    return exit_for(st);
  }
  out << "mu*         " << num(info.mu) << "\n";
  out << "x           " << vec(x, 17) << "\n";
  out << "y           " << num(info.y) << "\n";
  out << "objective   " << num(info.objective) << "\n";
  out << "hard_case   " << (info.hard_case ? "true" : "false") << "\n";
  out << "certificate " << (info.certificate_valid ? "Valid" : "Invalid") << " (min eig H + mu I = "
      << num(info.min_eig, 6) << ")\n";
  return info.certificate_valid ? kOk : kInvalid;
}

int cmd_solve(const std::string& path, const std::string& batch) {
  if (batch.empty()) return solve_one(path, std::cout);

  std::vector<std::string> files;
  std::error_code ec;
  for (const auto& e : std::filesystem::directory_iterator(batch, ec))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
  if (ec) {
    std::cerr << "error: cannot list " << batch << ": " << ec.message() << "\n";
    return kParse;
  }
  std::sort(files.begin(), files.end());

  std::vector<std::string> text(files.size());
  std::vector<int> codes(files.size(), kOk);
  std::size_t next = 0;
  std::mutex m;
  auto worker = [&] {
    for (;;) {
      std::size_t i;
      {
        std::lock_guard<std::mutex> lock(m);
        if (next == files.size()) return;
        i = next++;
      }
      std::ostringstream os;
      codes[i] = solve_one(files[i], os);
      text[i] = os.str();
    }
  };
  const unsigned nthreads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), files.size()));
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  int worst = kOk;
  for (std::size_t i = 0; i < files.size(); ++i) {
    std::cout << "== " << files[i] << " (exit " << codes[i] << ")\n" << text[i];
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

// -- local -------------------------------------------------------------------

int cmd_local(const std::string& path, int grid) {
  Instance inst;
  if (hcx_status st = load(path, inst); st != HCX_OK) return report(st);
  hcx_local_report* rep = nullptr;
  if (hcx_status st = hcx_local_run(inst.p, grid, &rep); st != HCX_OK) return report(st);
  std::unique_ptr<hcx_local_report, void (*)(hcx_local_report*)> guard(rep, hcx_local_free);

  hcx_precheck_info pre{};
  hcx_local_precheck(rep, &pre);
  if (!pre.proceed) {
    std::cout << "no local non-global minimizer (precheck: " << pre.reason << ")\n";
    return kOk;
  }
  const std::size_t n = hcx_instance_dim(inst.p);
  std::cout << "interval (" << num(pre.lo, 10) << ", " << num(pre.hi, 10) << "), " << hcx_local_count(rep)
            << " roots\n";
  std::printf("%-12s %-10s %-11s %-18s %-28s %-12s %-10s %s\n", "mu", "residual", "gap_d1", "class", "point (x, y)",
              "B min-eig", "kkt", "certificate");
  for (std::size_t i = 0; i < hcx_local_count(rep); ++i) {
    hcx_root_info r{};
    std::vector<double> x(n);
    if (hcx_status st = hcx_local_root(rep, i, &r, x.data(), x.size(), nullptr, 0); st != HCX_OK) return report(st);
    x.push_back(r.y);
    std::printf("%-12.8f %-10.2e %-11.4g %-18s %-28s %-12s %-10s %s%s\n", r.mu, r.residual, r.gap_d1,
                hcx_root_class_name(r.classification), vec(x, 5).c_str(), r.has_b ? num(r.b_min_eig, 6).c_str() : "-",
                r.kkt_ok ? "ok" : "fail", hcx_certificate_name(r.certificate), r.tangential ? " (tangential)" : "");
  }
  return kOk;
}

// -- verify ------------------------------------------------------------------

int cmd_verify(const std::string& path, const std::string& candidate) {
  Instance inst;
  if (hcx_status st = load(path, inst); st != HCX_OK) return report(st);
  hcx_verify_info v{};
  if (hcx_status st = hcx_verify_file(inst.p, candidate.c_str(), &v); st != HCX_OK) return report(st);
  std::cout << "certificate " << hcx_certificate_name(v.certificate) << "\n";
  std::cout << "reason      " << v.reason << "\n";
  std::cout << "kkt         " << (v.kkt_ok ? "ok" : "fail") << " (|Lx| " << num(v.stationarity_x, 3) << ", |Ly| "
            << num(v.stationarity_y, 3) << ", |x'x + f| " << num(v.coupling, 3) << ")\n";
  if (v.global_checked)
    std::cout << "global      " << (v.global_valid ? "valid" : "invalid") << ", " << v.violation_count
              << " violations\n";
  const bool ok = v.certificate == HCX_CERT_GLOBAL_MIN || v.certificate == HCX_CERT_STRICT_LOCAL_NON_GLOBAL;
  return ok ? kOk : kInvalid;
}

// -- generate ----------------------------------------------------------------

int cmd_generate(int d, const std::vector<double>& mus, const std::vector<double>& o, double eps,
                 const std::string& base_path, const std::string& out) {
  Instance base;
  if (!base_path.empty())
    if (hcx_status st = load(base_path, base); st != HCX_OK) return report(st);
  Instance inst;
  if (hcx_status st = hcx_generate(static_cast<size_t>(d), mus.data(), mus.size(), o.empty() ? nullptr : o.data(),
                                   o.size(), eps, base.p, &inst.p);
      st != HCX_OK)
    return report(st);
  if (hcx_status st = hcx_instance_save(inst.p, out.c_str()); st != HCX_OK) {
    std::cerr << "error: " << hcx_last_error_message() << "\n";
    return kParse;
  }
  std::cout << "wrote " << out << " (d = " << d << ")\n";
  return kOk;
}

// -- sample ------------------------------------------------------------------

int cmd_sample(const std::string& path, double from, double to, int points, const std::string& out, bool with_log) {
  Instance inst;
  if (hcx_status st = load(path, inst); st != HCX_OK) return report(st);
  if (points < 2) {
    std::cerr << "error: --points must be at least 2\n";
    return kUsage;
  }
  std::vector<double> rows(static_cast<size_t>(points) * HCX_SAMPLE_COLUMNS);
  if (hcx_status st = hcx_sample(inst.p, from, to, points, rows.data(), rows.size()); st != HCX_OK) return report(st);

  std::ofstream file;
  if (!out.empty()) {
    file.open(out, std::ios::binary);
    if (!file) {
      std::cerr << "error: cannot write " << out << "\n";
      return kParse;
    }
  }
  std::ostream& os = out.empty() ? std::cout : file;
  os << "mu,phi,psi,phi_d1,psi_d1,gap" << (with_log ? ",ln_phi,ln_psi" : "") << "\n";
  auto ln = [](double v) { return v > 0.0 ? std::log(v) : std::nan(""); };
  for (int k = 0; k < points; ++k) {
    const double* r = rows.data() + static_cast<size_t>(k) * HCX_SAMPLE_COLUMNS;
    for (int j = 0; j < HCX_SAMPLE_COLUMNS; ++j) os << (j ? "," : "") << num(r[j]);
    if (with_log) os << "," << num(ln(r[1])) << "," << num(ln(r[2]));
    os << "\n";
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local and global minimizers of TRS-L: min 1/2 x'Hx + c'x + f0(y) s.t. x'x <= a y + b"};
  app.require_subcommand(1);
  app.set_version_flag("--version", hcx_version());

  std::string instance, batch, candidate, out, base;
  int grid = 4096, d = 0, points = 200;
  std::vector<double> mus, overrides;
  double eps = 0.0, from = 0.0, to = 0.0;
  bool with_log = false;

  auto* solve = app.add_subcommand("solve", "global minimizer with its optimality certificate");
  auto* solve_in = solve->add_option("instance", instance, "instance file");
  auto* solve_batch = solve->add_option("--batch", batch, "solve every *.json in a directory")->check(CLI::ExistingDirectory);
  solve_in->excludes(solve_batch);

  auto* local = app.add_subcommand("local", "enumerate secular roots and classify local non-global minimizers");
  local->add_option("instance", instance, "instance file")->required();
  local->add_option("--grid", grid, "grid points on the candidate interval")->check(CLI::Range(2, 10000000));

  auto* verify = app.add_subcommand("verify", "certify a candidate point");
  verify->add_option("instance", instance, "instance file")->required();
  verify->add_option("candidate", candidate, "candidate file {x, y, mu}")->required();

  auto* generate = app.add_subcommand("generate", "build an instance with d local non-global minimizers");
  generate->add_option("--d", d, "number of local non-global minimizers")->required()->check(CLI::PositiveNumber);
  generate->add_option("--mus", mus, "2d ascending multipliers")->required()->delimiter(',');
  generate->add_option("--o-overrides", overrides, "d-1 blend centers")->delimiter(',');
  generate->add_option("--eps", eps, "blend half-width");
  generate->add_option("--base", base, "instance supplying H and c");
  generate->add_option("--out", out, "output instance file")->required();

  auto* sample = app.add_subcommand("sample", "tabulate phi and psi for plotting");
  sample->add_option("instance", instance, "instance file")->required();
  sample->add_option("--from", from, "first mu")->required();
  sample->add_option("--to", to, "last mu")->required();
  sample->add_option("--points", points, "number of rows");
  sample->add_option("--out", out, "CSV file (stdout if omitted)");
  sample->add_flag("--log", with_log, "append ln(phi) and ln(psi)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  if (solve->parsed()) {
    if (instance.empty() && batch.empty()) {
      std::cerr << "error: solve needs an instance file or --batch\n";
      return kUsage;
    }
    return cmd_solve(instance, batch);
  }
  if (local->parsed()) return cmd_local(instance, grid);
  if (verify->parsed()) return cmd_verify(instance, candidate);
  if (generate->parsed()) return cmd_generate(d, mus, overrides, eps, base, out);
  if (sample->parsed()) return cmd_sample(instance, from, to, points, out, with_log);
  return kUsage;
}
