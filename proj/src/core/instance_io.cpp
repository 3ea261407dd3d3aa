#include "hcx/instance_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hcx/error.hpp"
#include "json.hpp"

namespace hcx {

using nlohmann::json;

std::string format_number(double v) {
  if (!std::isfinite(v)) throw Error(ErrorCode::Parse, "non-finite number cannot be serialized");
  if (v == 0.0) v = 0.0;  // drop the sign of -0
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_error(const std::string& msg) { throw Error(ErrorCode::Parse, msg); }

std::string vec_text(const Vec& v) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) s += ", ";
    s += format_number(v(i));
  }
  return s + "]";
}

std::string list_text(const std::vector<double>& v) {
  return vec_text(Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size())));
}

std::string f0_text(const ConvexScalar& f0) {
  std::ostringstream os;
  os << "{\"kind\": \"" << f0.kind() << "\"";
  std::visit(
      [&](const auto& f) {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, Quadratic>) {
          os << ", \"alpha\": " << format_number(f.alpha) << ", \"beta\": " << format_number(f.beta);
        } else if constexpr (std::is_same_v<T, PowerLaw>) {
          os << ", \"alpha\": " << format_number(f.alpha) << ", \"d\": " << format_number(f.d);
        } else if constexpr (std::is_same_v<T, CubicPoly>) {
          os << ", \"alpha\": " << format_number(f.alpha) << ", \"beta\": " << format_number(f.beta)
             << ", \"gamma\": " << format_number(f.gamma);
        } else if constexpr (std::is_same_v<T, PiecewiseFromPsi>) {
          os << ", \"psi_breakpoints\": " << list_text(f.psi.breakpoints()) << ", \"psi_pieces\": [";
          const auto& ps = f.psi.pieces();
          for (std::size_t k = 0; k < ps.size(); ++k) {
            if (k) os << ", ";
            os << "[" << format_number(ps[k].q2) << ", " << format_number(ps[k].q1) << ", "
               << format_number(ps[k].q0) << "]";
          }
          os << "]";
        }
      },
      f0.form());
  os << "}";
  return os.str();
}

double number(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field \"") + key + "\"");
  if (!it->is_number()) parse_error(std::string("field \"") + key + "\" must be a number");
  return it->get<double>();
}

Vec vector_of(const json& j, const char* what) {
  if (!j.is_array()) parse_error(std::string(what) + " must be an array");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) parse_error(std::string(what) + " must hold numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

const json& field(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) parse_error(std::string("missing field \"") + key + "\"");
  return *it;
}

ConvexScalar f0_from(const json& j) {
  if (!j.is_object()) parse_error("f0 must be an object");
  const json& kind = field(j, "kind");
  if (!kind.is_string()) parse_error("f0.kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "quadratic") return ConvexScalar::quadratic(number(j, "alpha"), number(j, "beta"));
  if (k == "power_law") return ConvexScalar::power_law(number(j, "alpha"), number(j, "d"));
  if (k == "cubic") return ConvexScalar::cubic(number(j, "alpha"), number(j, "beta"), number(j, "gamma"));
  if (k == "quartic_example1") return ConvexScalar::quartic_example1();
  if (k == "piecewise_from_psi") {
    const Vec bps = vector_of(field(j, "psi_breakpoints"), "psi_breakpoints");
    const json& pj = field(j, "psi_pieces");
    if (!pj.is_array()) parse_error("psi_pieces must be an array");
    std::vector<PsiPiece> pieces;
    for (const json& p : pj) {
      const Vec q = vector_of(p, "psi piece");
      if (q.size() != 3) parse_error("each psi piece is [q2, q1, q0]");
      pieces.push_back({q(0), q(1), q(2)});
    }
    return ConvexScalar::from_psi(PiecewisePsi(std::vector<double>(bps.data(), bps.data() + bps.size()), pieces));
  }
  parse_error("unknown f0 kind \"" + k + "\"");
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    parse_error(e.what());
  }
}

}  // namespace

std::string instance_to_json(const TrslInstance& inst) {
  std::ostringstream os;
  os << "{\n";
  os << "  \"schema_version\": " << schema_version << ",\n";
  os << "  \"n\": " << inst.n() << ",\n";
  os << "  \"H\": [";
  for (Eigen::Index r = 0; r < inst.H.rows(); ++r) {
    os << (r ? ",\n    " : "\n    ") << vec_text(inst.H.row(r).transpose());
  }
  os << (inst.H.rows() ? "\n  ],\n" : "],\n");
  os << "  \"c\": " << vec_text(inst.c) << ",\n";
  os << "  \"constraint\": {\"a\": " << format_number(inst.a) << ", \"b\": " << format_number(inst.b) << "},\n";
  os << "  \"f0\": " << f0_text(inst.f0) << "\n";
  os << "}\n";
  return os.str();
}

TrslInstance instance_from_json(const std::string& text, std::vector<std::string>* warnings) {
  const json j = parse_text(text);
  if (!j.is_object()) parse_error("instance must be a JSON object");
  const json& ver = field(j, "schema_version");
  if (!ver.is_number_integer() || ver.get<int>() != schema_version)
    parse_error("unsupported schema_version (expected " + std::to_string(schema_version) + ")");
  const json& nj = field(j, "n");
  if (!nj.is_number_integer() || nj.get<long long>() < 1) parse_error("n must be a positive integer");
  const auto n = static_cast<Eigen::Index>(nj.get<long long>());

  TrslInstance inst;
  const json& hj = field(j, "H");
  if (!hj.is_array() || static_cast<Eigen::Index>(hj.size()) != n) parse_error("H must have n rows");
  inst.H.resize(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Vec row = vector_of(hj[static_cast<std::size_t>(r)], "H row");
    if (row.size() != n) parse_error("H must be n x n");
    inst.H.row(r) = row.transpose();
  }
  inst.c = vector_of(field(j, "c"), "c");
  if (inst.c.size() != n) parse_error("c must have n entries");
  const json& cj = field(j, "constraint");
  if (!cj.is_object()) parse_error("constraint must be an object");
  inst.a = number(cj, "a");
  inst.b = number(cj, "b");
  inst.f0 = f0_from(field(j, "f0"));
  inst.validate();

  if (warnings) {
    Eigen::SelfAdjointEigenSolver<Mat> es(inst.H, Eigen::EigenvaluesOnly);
    if (es.eigenvalues()(0) >= 0.0)
      warnings->push_back("H has no negative eigenvalue; the instance is convex");
  }
  return inst;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path);
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path);
}

TrslInstance load_instance(const std::string& path, std::vector<std::string>* warnings) {
  return instance_from_json(read_file(path), warnings);
}

void save_instance(const std::string& path, const TrslInstance& inst) { write_file(path, instance_to_json(inst)); }

CandidateFile candidate_from_json(const std::string& text) {
  const json j = parse_text(text);
  if (!j.is_object()) parse_error("candidate must be a JSON object");
  CandidateFile c;
  c.x = vector_of(field(j, "x"), "x");
  const json& y = field(j, "y");
  if (y.is_number())
    c.y = Vec::Constant(1, y.get<double>());
  else
    c.y = vector_of(y, "y");
  c.mu = number(j, "mu");
  return c;
}

std::string candidate_to_json(const CandidateFile& cand) {
  std::string s = "{\"x\": " + vec_text(cand.x) + ", \"y\": ";
  s += cand.y.size() == 1 ? format_number(cand.y(0)) : vec_text(cand.y);
  return s + ", \"mu\": " + format_number(cand.mu) + "}\n";
}

CandidateFile load_candidate(const std::string& path) { return candidate_from_json(read_file(path)); }

}  // namespace hcx
