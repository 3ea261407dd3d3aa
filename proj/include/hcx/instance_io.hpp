#pragma once

#include <string>
#include <vector>

#include "hcx/convex.hpp"

namespace hcx {

inline constexpr int schema_version = 1;

/// Canonical text: fixed field order, 17 significant digits, so that
/// write(read(write(x))) == write(x) byte for byte.
std::string instance_to_json(const TrslInstance& inst);

/// Throws Parse on malformed input; validation failures keep their own code.
/// Non-fatal observations (e.g. H without a negative eigenvalue) go to warnings.
TrslInstance instance_from_json(const std::string& text, std::vector<std::string>* warnings = nullptr);

TrslInstance load_instance(const std::string& path, std::vector<std::string>* warnings = nullptr);
void save_instance(const std::string& path, const TrslInstance& inst);

/// {"x": [...], "y": number or [...], "mu": number}
struct CandidateFile {
  Vec x;
  Vec y;
  double mu = 0.0;
};
CandidateFile candidate_from_json(const std::string& text);
std::string candidate_to_json(const CandidateFile& cand);
CandidateFile load_candidate(const std::string& path);

/// 17 significant digits, always with a "." decimal point.
std::string format_number(double v);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace hcx
