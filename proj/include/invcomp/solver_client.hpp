#pragma once

/*
 * Child-process client for SMT-LIB v2 solvers running in incremental mode
 * (`(reset)` between queries).  The solver command is spawned once and kept
 * alive across queries; a query that times out kills the process, and the
 * next query respawns it.
 *
 * Framing: after each script the client sends `(echo "...")` with a nonce
 * and reads lines until the nonce appears, so replies never bleed between
 * queries.
 */

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace invcomp {

class SolverClient {
 public:
  // `command` is split on whitespace into argv for exec.
  SolverClient(std::string command, int timeout_ms);
  ~SolverClient();

  SolverClient(const SolverClient&) = delete;
  SolverClient& operator=(const SolverClient&) = delete;

  struct Reply {
    // "sat", "unsat", "unknown", "timeout", or "error".
    std::string status;
    // Values of the requested terms when status == "sat".
    std::map<std::string, std::int64_t> values;
  };

  // Sends (reset), the script, and (check-sat); on sat, additionally asks
  // (get-value ...) for `value_terms` (typically the declared variables).
  Reply query(const std::string& script,
              const std::vector<std::string>& value_terms);

  const std::string& command() const { return command_; }

 private:
  bool spawn();
  void shutdown();
  bool write_all(const std::string& data);
  // Reads lines until one equals `marker`; everything before it is appended
  // to `out`.  Returns false on timeout or stream end.
  bool read_until(const std::string& marker, std::string& out,
                  std::int64_t deadline_ms);

  std::string command_;
  int timeout_ms_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::uint64_t nonce_ = 0;
};

}  // namespace invcomp
