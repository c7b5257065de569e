#pragma once

#include <cctype>
#include <cerrno>
#include <csignal>
#include <cstdlib>
#include <cstring>
#include <chrono>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "stlf/errors.hpp"
#include "stlf/numio.hpp"

namespace stlf {

enum class SatStatus { sat, unsat, unknown };

struct SolverResult {
  SatStatus status = SatStatus::unknown;
  std::map<std::string, double> model;  // define-fun name -> numeric value (bools as 0/1)
  std::string raw;
};

namespace solver_detail {

inline std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : cmd) {
    if (c == ' ' || c == '\t') {
      if (!cur.empty()) {
        out.push_back(cur);
        cur.clear();
      }
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

/// Run `argv`, write `input` to its stdin, read stdout until EOF or
/// deadline. Kills the child on timeout.
inline std::string run_process(const std::vector<std::string>& argv, const std::string& input,
                               double timeout_sec) {
  if (argv.empty()) raise(Errc::solver_unavailable, "empty solver command");

  int in_pipe[2], out_pipe[2], err_pipe[2];
  if (pipe(in_pipe) || pipe(out_pipe) || pipe(err_pipe))
    raise(Errc::solver_protocol_error, "pipe() failed");

  pid_t pid = fork();
  if (pid < 0) raise(Errc::solver_protocol_error, "fork() failed");
  if (pid == 0) {
    dup2(in_pipe[0], STDIN_FILENO);
    dup2(out_pipe[1], STDOUT_FILENO);
    dup2(err_pipe[1], STDERR_FILENO);
    close(in_pipe[0]);
    close(in_pipe[1]);
    close(out_pipe[0]);
    close(out_pipe[1]);
    close(err_pipe[0]);
    close(err_pipe[1]);
    std::vector<char*> cargv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    execvp(cargv[0], cargv.data());
    _exit(127);
  }

  close(in_pipe[0]);
  close(out_pipe[1]);
  close(err_pipe[1]);

  // feed stdin and collect stdout concurrently to avoid pipe deadlocks
  fcntl(in_pipe[1], F_SETFL, O_NONBLOCK);
  fcntl(out_pipe[0], F_SETFL, O_NONBLOCK);
  fcntl(err_pipe[0], F_SETFL, O_NONBLOCK);

  std::string output;
  size_t written = 0;
  bool in_open = true, out_open = true, err_open = true;
  const auto start = std::chrono::steady_clock::now();
  bool timed_out = false;

  while (out_open || err_open || in_open) {
    struct pollfd fds[3];
    int n = 0;
    int in_idx = -1, out_idx = -1, err_idx = -1;
    if (in_open) {
      in_idx = n;
      fds[n++] = {in_pipe[1], POLLOUT, 0};
    }
    if (out_open) {
      out_idx = n;
      fds[n++] = {out_pipe[0], POLLIN, 0};
    }
    if (err_open) {
      err_idx = n;
      fds[n++] = {err_pipe[0], POLLIN, 0};
    }
    int rv = poll(fds, n, 50);
    if (rv < 0 && errno != EINTR) break;
    if (timeout_sec > 0 &&
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() >
            timeout_sec) {
      timed_out = true;
      break;
    }
    char buf[4096];
    if (in_idx >= 0 && (fds[in_idx].revents & (POLLOUT | POLLERR | POLLHUP))) {
      if (written >= input.size() || (fds[in_idx].revents & (POLLERR | POLLHUP))) {
        close(in_pipe[1]);
        in_open = false;
      } else {
        ssize_t w = write(in_pipe[1], input.data() + written, input.size() - written);
        if (w > 0)
          written += static_cast<size_t>(w);
        else if (w < 0 && errno != EAGAIN && errno != EINTR) {
          close(in_pipe[1]);
          in_open = false;
        }
        if (written >= input.size()) {
          close(in_pipe[1]);
          in_open = false;
        }
      }
    }
    if (out_idx >= 0 && (fds[out_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t r = read(out_pipe[0], buf, sizeof(buf));
      if (r > 0)
        output.append(buf, static_cast<size_t>(r));
      else if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR)) {
        close(out_pipe[0]);
        out_open = false;
      }
    }
    if (err_idx >= 0 && (fds[err_idx].revents & (POLLIN | POLLHUP))) {
      ssize_t r = read(err_pipe[0], buf, sizeof(buf));
      if (r == 0 || (r < 0 && errno != EAGAIN && errno != EINTR)) {
        close(err_pipe[0]);
        err_open = false;
      }
      // stderr content is drained and dropped
    }
  }
  if (in_open) close(in_pipe[1]);
  if (out_open) close(out_pipe[0]);
  if (err_open) close(err_pipe[0]);

  int status = 0;
  if (timed_out) {
    kill(pid, SIGKILL);
    waitpid(pid, &status, 0);
    raise(Errc::solver_protocol_error, "solver timed out");
  }
  waitpid(pid, &status, 0);
  if (WIFEXITED(status) && WEXITSTATUS(status) == 127)
    raise(Errc::solver_unavailable, "cannot execute '" + argv[0] + "'");
  return output;
}

// --- s-expression model parsing -------------------------------------------

struct SToken {
  enum Kind { lparen, rparen, atom, end } kind = end;
  std::string text;
};

class SLexer {
public:
  explicit SLexer(const std::string& s) : sp_(&s) {}
  SToken next() {
    const std::string& s_ = *sp_;
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (i_ >= s_.size()) return {SToken::end, ""};
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      return {SToken::lparen, "("};
    }
    if (c == ')') {
      ++i_;
      return {SToken::rparen, ")"};
    }
    if (c == '"') {  // string literal, e.g. inside (error "...")
      size_t b = i_++;
      while (i_ < s_.size() && s_[i_] != '"') ++i_;
      ++i_;
      return {SToken::atom, s_.substr(b, i_ - b)};
    }
    if (c == '|') {
      size_t b = ++i_;
      while (i_ < s_.size() && s_[i_] != '|') ++i_;
      std::string t = s_.substr(b, i_ - b);
      ++i_;
      return {SToken::atom, t};
    }
    size_t b = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' &&
           s_[i_] != ')')
      ++i_;
    return {SToken::atom, s_.substr(b, i_ - b)};
  }

private:
  const std::string* sp_ = nullptr;
  size_t i_ = 0;
};

struct SExpr {
  std::string atom;
  std::vector<SExpr> items;
  bool is_atom() const { return items.empty() && !atom.empty(); }
};

inline bool parse_sexpr(SLexer& lex, SExpr& out) {
  SToken t = lex.next();
  if (t.kind == SToken::end) return false;
  if (t.kind == SToken::atom) {
    out = SExpr{t.text, {}};
    return true;
  }
  if (t.kind == SToken::lparen) {
    out = SExpr{};
    for (;;) {
      SLexer save = lex;
      SToken n = save.next();
      if (n.kind == SToken::rparen) {
        lex = save;
        return true;
      }
      if (n.kind == SToken::end) raise(Errc::solver_protocol_error, "unbalanced model s-expression");
      SExpr child;
      if (!parse_sexpr(lex, child)) raise(Errc::solver_protocol_error, "bad model s-expression");
      out.items.push_back(std::move(child));
    }
  }
  raise(Errc::solver_protocol_error, "unexpected ')' in model");
}

/// Numeric value of a model term: numerals, negation, rationals.
inline std::optional<double> value_of(const SExpr& e) {
  if (e.is_atom()) {
    if (e.atom == "true") return 1.0;
    if (e.atom == "false") return 0.0;
    char* end = nullptr;
    double v = std::strtod(e.atom.c_str(), &end);
    if (end && *end == '\0' && end != e.atom.c_str()) return v;
    return std::nullopt;
  }
  if (!e.items.empty() && e.items[0].is_atom()) {
    const std::string& op = e.items[0].atom;
    if (op == "-" && e.items.size() == 2) {
      auto v = value_of(e.items[1]);
      if (v) return -*v;
    }
    if (op == "/" && e.items.size() == 3) {
      auto a = value_of(e.items[1]);
      auto b = value_of(e.items[2]);
      if (a && b && *b != 0.0) return *a / *b;
    }
  }
  return std::nullopt;
}

}  // namespace solver_detail

/// One external solver invocation: SMT-LIB 2 text over standard streams,
/// one process per query.
class SolverClient {
public:
  explicit SolverClient(std::string command, double timeout_sec = 10.0)
      : command_(std::move(command)), timeout_(timeout_sec) {}

  /// Resolves the solver command: explicit argument, else the STLF_SOLVER
  /// environment variable, else `z3 -in`.
  static std::string resolve_command(const std::string& configured) {
    if (!configured.empty()) return configured;
    if (const char* env = std::getenv("STLF_SOLVER"); env && *env) return env;
    return "z3 -in";
  }

  const std::string& command() const { return command_; }

  SolverResult check(const std::string& script) const {
    auto argv = solver_detail::split_command(command_);
    std::string out = solver_detail::run_process(argv, script, timeout_);

    SolverResult res;
    res.raw = out;

    // first line: sat | unsat | unknown (tolerate leading blank lines)
    std::istringstream ss(out);
    std::string line, status;
    while (std::getline(ss, line)) {
      std::string t;
      for (char c : line)
        if (!std::isspace(static_cast<unsigned char>(c))) t += c;
      if (t.empty()) continue;
      status = t;
      break;
    }
    if (status == "sat")
      res.status = SatStatus::sat;
    else if (status == "unsat")
      res.status = SatStatus::unsat;
    else if (status == "unknown" || status.rfind("(error", 0) == 0 || status == "timeout")
      res.status = SatStatus::unknown;
    else
      raise(Errc::solver_protocol_error, "unrecognized solver reply: '" + status + "'");

    if (res.status == SatStatus::sat) parse_model(out, res);
    return res;
  }

  /// Probe the solver with a trivial script.
  static bool available(const std::string& command, double timeout_sec = 5.0) {
    try {
      SolverClient c(command, timeout_sec);
      SolverResult r = c.check("(set-logic QF_LRA)\n(check-sat)\n");
      return r.status == SatStatus::sat || r.status == SatStatus::unknown;
    } catch (const Error&) {
      return false;
    }
  }

private:
  static void parse_model(const std::string& out, SolverResult& res) {
    auto pos = out.find('\n');
    std::string rest = pos == std::string::npos ? "" : out.substr(pos + 1);
    solver_detail::SLexer lex(rest);
    solver_detail::SExpr root;
    while (solver_detail::parse_sexpr(lex, root)) {
      // accept both (model (define-fun ...) ...) and ((define-fun ...) ...)
      std::vector<const solver_detail::SExpr*> defs;
      auto scan = [&](const solver_detail::SExpr& e) {
        for (const auto& item : e.items)
          if (!item.is_atom() && item.items.size() >= 5 && item.items[0].is_atom() &&
              item.items[0].atom == "define-fun")
            defs.push_back(&item);
      };
      if (!root.is_atom()) scan(root);  // handles both (model ...) and bare (...) forms
      for (const auto* d : defs) {
        // (define-fun name () Sort value)
        const auto& items = d->items;
        if (!items[1].is_atom()) continue;
        auto v = solver_detail::value_of(items.back());
        if (v) res.model[items[1].atom] = *v;
      }
    }
  }

  std::string command_;
  double timeout_ = 10.0;
};

}  // namespace stlf
