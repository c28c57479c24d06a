#include "invcomp/solver_client.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <mutex>
#include <sstream>

#include "invcomp/util.hpp"

namespace invcomp {

namespace {

std::int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(steady_clock::now().time_since_epoch())
      .count();
}

std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::istringstream is(cmd);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

// Writing to a solver that died mid-query must surface as a write error,
// not kill this process.
void ignore_sigpipe_once() {
  static std::once_flag flag;
  std::call_once(flag, [] { ::signal(SIGPIPE, SIG_IGN); });
}

// Minimal s-expression reader for (get-value ...) replies.
struct Sexpr {
  bool is_list = false;
  std::string atom;
  std::vector<Sexpr> kids;
};

bool parse_sexpr(const std::string& s, size_t& pos, Sexpr& out) {
  while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  if (pos >= s.size()) return false;
  if (s[pos] == '(') {
    ++pos;
    out.is_list = true;
    while (true) {
      while (pos < s.size() &&
             std::isspace(static_cast<unsigned char>(s[pos])))
        ++pos;
      if (pos < s.size() && s[pos] == ')') {
        ++pos;
        return true;
      }
      Sexpr kid;
      if (!parse_sexpr(s, pos, kid)) return false;
      out.kids.push_back(std::move(kid));
    }
  }
  if (s[pos] == ')') return false;
  const size_t start = pos;
  while (pos < s.size() && s[pos] != '(' && s[pos] != ')' &&
         !std::isspace(static_cast<unsigned char>(s[pos])))
    ++pos;
  out.atom = s.substr(start, pos - start);
  return pos > start;
}

bool sexpr_int(const Sexpr& e, std::int64_t& out) {
  try {
    if (!e.is_list) {
      size_t used = 0;
      out = std::stoll(e.atom, &used);
      return used == e.atom.size();
    }
    if (e.kids.size() == 2 && !e.kids[0].is_list && e.kids[0].atom == "-" &&
        !e.kids[1].is_list) {
      size_t used = 0;
      out = -std::stoll(e.kids[1].atom, &used);
      return used == e.kids[1].atom.size();
    }
  } catch (const std::exception&) {
  }
  return false;
}

}  // namespace

SolverClient::SolverClient(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {
  if (command_.empty()) throw ConfigError("solver command must not be empty");
  if (timeout_ms_ <= 0) throw ConfigError("solver timeout must be positive");
  ignore_sigpipe_once();
}

SolverClient::~SolverClient() { shutdown(); }

bool SolverClient::spawn() {
  const std::vector<std::string> args = split_command(command_);
  if (args.empty()) return false;

  int to_pipe[2] = {-1, -1};
  int from_pipe[2] = {-1, -1};
  if (::pipe(to_pipe) != 0) return false;
  if (::pipe(from_pipe) != 0) {
    ::close(to_pipe[0]);
    ::close(to_pipe[1]);
    return false;
  }

  const int pid = ::fork();
  if (pid < 0) {
    ::close(to_pipe[0]);
    ::close(to_pipe[1]);
    ::close(from_pipe[0]);
    ::close(from_pipe[1]);
    return false;
  }
  if (pid == 0) {
    ::dup2(to_pipe[0], STDIN_FILENO);
    ::dup2(from_pipe[1], STDOUT_FILENO);
    const int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::close(to_pipe[0]);
    ::close(to_pipe[1]);
    ::close(from_pipe[0]);
    ::close(from_pipe[1]);
    std::vector<char*> argv;
    for (const auto& a : args) argv.push_back(const_cast<char*>(a.c_str()));
    argv.push_back(nullptr);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }

  ::close(to_pipe[0]);
  ::close(from_pipe[1]);
  pid_ = pid;
  to_child_ = to_pipe[1];
  from_child_ = from_pipe[0];
  buffer_.clear();
  return true;
}

void SolverClient::shutdown() {
  if (pid_ > 0) {
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  pid_ = -1;
  to_child_ = -1;
  from_child_ = -1;
  buffer_.clear();
}

bool SolverClient::write_all(const std::string& data) {
  size_t off = 0;
  while (off < data.size()) {
    const ssize_t n = ::write(to_child_, data.data() + off, data.size() - off);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;
    off += static_cast<size_t>(n);
  }
  return true;
}

bool SolverClient::read_until(const std::string& marker, std::string& out,
                              std::int64_t deadline_ms) {
  while (true) {
    size_t nl;
    while ((nl = buffer_.find('\n')) != std::string::npos) {
      std::string line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line == marker) return true;
      out += line;
      out += '\n';
    }
    const std::int64_t remain = deadline_ms - now_ms();
    if (remain <= 0) return false;
    struct pollfd pfd;
    pfd.fd = from_child_;
    pfd.events = POLLIN;
    const int pr = ::poll(&pfd, 1, static_cast<int>(remain));
    if (pr < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (pr == 0) return false;  // timeout
    char chunk[4096];
    const ssize_t n = ::read(from_child_, chunk, sizeof(chunk));
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    if (n == 0) return false;  // solver closed its output
    buffer_.append(chunk, static_cast<size_t>(n));
  }
}

SolverClient::Reply SolverClient::query(
    const std::string& script, const std::vector<std::string>& value_terms) {
  Reply reply;
  reply.status = "error";
  if (pid_ <= 0 && !spawn()) return reply;

  const std::int64_t deadline = now_ms() + timeout_ms_;
  ++nonce_;
  const std::string done = "@done-" + std::to_string(nonce_) + "@";

  std::string payload = "(reset)\n";
  payload += script;
  if (!script.empty() && script.back() != '\n') payload += '\n';
  payload += "(check-sat)\n(echo \"" + done + "\")\n";
  if (!write_all(payload)) {
    shutdown();
    return reply;
  }

  std::string pre;
  if (!read_until(done, pre, deadline)) {
    shutdown();
    reply.status = "timeout";
    return reply;
  }

  std::string status;
  bool saw_error = false;
  {
    std::istringstream lines(pre);
    std::string line;
    while (std::getline(lines, line)) {
      if (line == "sat" || line == "unsat" || line == "unknown") status = line;
      if (line.rfind("(error", 0) == 0) saw_error = true;
    }
  }
  if (saw_error || status.empty()) {
    reply.status = "error";
    return reply;
  }
  reply.status = status;

  if (status == "sat" && !value_terms.empty()) {
    const std::string vdone = "@vals-" + std::to_string(nonce_) + "@";
    std::string ask = "(get-value (";
    for (size_t i = 0; i < value_terms.size(); ++i) {
      if (i) ask += ' ';
      ask += value_terms[i];
    }
    ask += "))\n(echo \"" + vdone + "\")\n";
    std::string raw;
    if (!write_all(ask) || !read_until(vdone, raw, deadline)) {
      shutdown();  // keep the sat verdict; the model is simply unavailable
      return reply;
    }
    Sexpr top;
    size_t pos = 0;
    if (parse_sexpr(raw, pos, top) && top.is_list) {
      for (const auto& pair : top.kids) {
        if (!pair.is_list || pair.kids.size() != 2 || pair.kids[0].is_list)
          continue;
        std::int64_t v = 0;
        if (sexpr_int(pair.kids[1], v)) reply.values[pair.kids[0].atom] = v;
      }
    }
  }
  return reply;
}

}  // namespace invcomp
