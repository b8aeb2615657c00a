#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "qdecon/linalg.hpp"
#include "qdecon/protocols.hpp"

namespace qdecon::cli {

using Json = nlohmann::ordered_json;

/// Bad flags, missing files or inconsistent arguments (exit code 2).
class UsageError : public Error {
 public:
  using Error::Error;
};

/// Defaults overridden by QDECON_TOL_HERM, QDECON_TOL_TRACE, QDECON_TOL_PSD
/// and QDECON_TOL_GAP.
Tolerances tolerances_from_env();

/// Accumulates a report. Every scalar carries the tolerance it is judged by,
/// and each check stores value, relation and bound so its verdict can be
/// recomputed from the document alone.
class Report {
 public:
  Report(std::vector<std::string> command, const Tolerances& tol,
         std::optional<std::uint64_t> seed);

  void input(const std::string& name, const std::string& path, const std::string& digest);
  void result(const std::string& name, double value, double tol);
  void result(const std::string& name, const Json& value);
  /// value >= bound - tol
  bool check_ge(const std::string& name, double value, double bound, double tol);
  /// value <= bound + tol
  bool check_le(const std::string& name, double value, double bound, double tol);
  void section(const std::string& name, Json value);

  bool pass() const { return pass_; }
  Json document() const;

 private:
  bool add_check(const std::string& name, double value, const char* rel, double bound,
                 double tol, bool ok);

  Json head_;
  Json inputs_ = Json::object();
  Json results_ = Json::object();
  Json sections_ = Json::object();
  Json checks_ = Json::array();
  bool pass_ = true;
};

Json to_json(const ConditionReport& r);

/// Runs one command line (without the program name). Writes the report to
/// `out` and diagnostics to `err`; returns 0 (pass), 1 (numerical failure)
/// or 2 (usage or parse error).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// The invariant corpus behind `suite`; fills `report` with one check per
/// family.
void run_suite(std::uint64_t seed, const Tolerances& tol, Report& report);

}  // namespace qdecon::cli
