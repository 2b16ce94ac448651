#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "tracekit/errors.hpp"
#include "tracekit/geometry.hpp"
#include "tracekit/lattice.hpp"
#include "tracekit/operators.hpp"
#include "tracekit/symbols.hpp"

namespace tracekit::cli {

using nlohmann::json;

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kGate = 2,      // exponent gates, resolution limits, invalid parameters
  kResource = 3,  // node, cube or pair caps
  kNumeric = 4,   // quadrature failures, unsupported requests
};

/// Bad command line or config; the message starts with the field path.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorKind kind) noexcept;

struct Invocation {
  std::string command;
  std::filesystem::path config;
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> depth;
  unsigned threads = 0;
};

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"symbols-check", "norms",           "whitney",
                                              "kernel",        "trace-roundtrip", "lemma31"};
  return names;
}

/// Full command line entry point; never throws.
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

/// Runs one experiment with an already parsed config. Writes <out>/<command>.csv
/// and a short summary to `out`. Throws UsageError or tracekit::Error.
void run(const Invocation& inv, const json& config, std::ostream& out);

/// 17 significant digits, shortest form for integers and non-finite values.
std::string format_number(double v);

// Config readers, exposed for tests. `path` is the field path used in messages.
BernsteinSymbol parse_symbol(const json& j, const std::string& path);
DSet parse_set(const json& j, const std::string& path);
LatticeSpec parse_lattice(const json& j, const std::string& path);
std::vector<TestFunction> parse_family(const json& j, int n, const std::string& path);

}  // namespace tracekit::cli
