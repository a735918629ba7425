#pragma once

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "plan.hpp"
#include "smt_encode.hpp"

namespace gridnav {

enum class SolverStatus { Sat, Unsat, Unknown, Timeout, SolverError };

inline const char* status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Sat: return "sat";
    case SolverStatus::Unsat: return "unsat";
    case SolverStatus::Unknown: return "unknown";
    case SolverStatus::Timeout: return "timeout";
    case SolverStatus::SolverError: return "error";
  }
  return "?";
}

struct SolverResult {
  SolverStatus status = SolverStatus::SolverError;
  std::optional<std::map<std::string, double>> model;
  double wall_time_s = 0.0;
  std::string raw_output;
};

struct SolverConfig {
  // argv split on whitespace; "-in" means the script goes to stdin, otherwise
  // the script path is appended as the last argument
  std::string command = "z3 -in -smt2";
  double timeout_s = 60.0;
};

struct SolverFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline std::vector<std::string> split_command(const std::string& cmd) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  char quote = 0;
  for (char c : cmd) {
    if (quoted) {
      if (c == quote) quoted = false;
      else cur += c;
    } else if (c == '\'' || c == '"') {
      quoted = true;
      quote = c;
    } else if (c == ' ' || c == '\t') {
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

struct TempFile {
  std::string path;
  int fd = -1;

  explicit TempFile(const char* tag) {
    std::string tmpl = (std::filesystem::temp_directory_path() / tag).string() + "XXXXXX";
    std::vector<char> buf(tmpl.begin(), tmpl.end());
    buf.push_back('\0');
    fd = mkstemp(buf.data());
    if (fd < 0) throw SolverFailure("mkstemp failed: " + std::string(strerror(errno)));
    path.assign(buf.data());
  }
  TempFile(const TempFile&) = delete;
  ~TempFile() {
    if (fd >= 0) close(fd);
    if (!path.empty()) unlink(path.c_str());
  }

  void write_all(const std::string& data) {
    size_t off = 0;
    while (off < data.size()) {
      ssize_t n = ::write(fd, data.data() + off, data.size() - off);
      if (n < 0) throw SolverFailure("write failed: " + std::string(strerror(errno)));
      off += static_cast<size_t>(n);
    }
    lseek(fd, 0, SEEK_SET);
  }

  std::string read_all() const {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }
};

struct SexprParser {
  const std::string& s;
  size_t pos = 0;

  void skip_ws() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
  }
  bool done() {
    skip_ws();
    return pos >= s.size();
  }
  char peek() { return s[pos]; }
  void expect(char c) {
    skip_ws();
    if (pos >= s.size() || s[pos] != c)
      throw SolverFailure("model parse: expected '" + std::string(1, c) + "' at offset " +
                          std::to_string(pos));
    pos++;
  }
  std::string atom() {
    skip_ws();
    size_t start = pos;
    while (pos < s.size() && !std::isspace(static_cast<unsigned char>(s[pos])) && s[pos] != '(' &&
           s[pos] != ')')
      pos++;
    if (start == pos) throw SolverFailure("model parse: empty atom at offset " + std::to_string(pos));
    return s.substr(start, pos - start);
  }

  // value := number | (- value) | (/ value value) | (+ value value) | (* value value)
  double value() {
    skip_ws();
    if (pos < s.size() && s[pos] == '(') {
      pos++;
      std::string op = atom();
      if (op == "-") {
        skip_ws();
        if (peek() == ')') throw SolverFailure("model parse: bare (-)");
        double a = value();
        skip_ws();
        if (peek() != ')') {
          double b = value();
          expect(')');
          return a - b;
        }
        expect(')');
        return -a;
      }
      double a = value();
      double b = value();
      expect(')');
      if (op == "/") return a / b;
      if (op == "+") return a + b;
      if (op == "*") return a * b;
      throw SolverFailure("model parse: unsupported operator '" + op + "'");
    }
    std::string t = atom();
    if (!t.empty() && t.back() == '?') t.pop_back();  // truncated-decimal marker
    try {
      size_t p = 0;
      double v = std::stod(t, &p);
      if (p != t.size()) throw std::invalid_argument(t);
      return v;
    } catch (const std::exception&) {
      throw SolverFailure("model parse: bad numeric atom '" + t + "'");
    }
  }
};

}  // namespace detail

// Parses get-value output: ((name value) (name value) ...), possibly split
// over several lines or several groups. Values may be decimals (with z3's
// truncation marker '?'), integers, or (- v), (/ p q) forms.
inline std::map<std::string, double> parse_model_values(const std::string& text) {
  std::map<std::string, double> model;
  detail::SexprParser p{text};
  while (!p.done()) {
    p.expect('(');
    p.skip_ws();
    while (!p.done() && p.peek() != ')') {
      p.expect('(');
      std::string name = p.atom();
      double v = p.value();
      p.expect(')');
      model[name] = v;
      p.skip_ws();
    }
    p.expect(')');
  }
  return model;
}

// Runs the configured solver on the script, enforcing the wall-clock deadline
// with SIGKILL. stdout and stderr are captured; the first status token
// (sat/unsat/unknown) decides the outcome, anything else is SolverError.
inline SolverResult run_solver(const SmtScript& script, const SolverConfig& config) {
  std::vector<std::string> args = detail::split_command(config.command);
  if (args.empty()) throw SolverFailure("empty solver command");
  bool via_stdin = false;
  for (const std::string& a : args) via_stdin |= (a == "-in");

  detail::TempFile script_file("gridnav-smt2-");
  script_file.write_all(script.text);
  if (!via_stdin) args.push_back(script_file.path);

  detail::TempFile out_file("gridnav-out-");

  std::vector<char*> argv;
  for (std::string& a : args) argv.push_back(a.data());
  argv.push_back(nullptr);

  auto start = std::chrono::steady_clock::now();
  pid_t pid = fork();
  if (pid < 0) throw SolverFailure("fork failed: " + std::string(strerror(errno)));
  if (pid == 0) {
    if (via_stdin) dup2(script_file.fd, STDIN_FILENO);
    else {
      int devnull = open("/dev/null", O_RDONLY);
      if (devnull >= 0) dup2(devnull, STDIN_FILENO);
    }
    dup2(out_file.fd, STDOUT_FILENO);
    dup2(out_file.fd, STDERR_FILENO);
    execvp(argv[0], argv.data());
    _exit(127);
  }

  SolverResult result;
  bool timed_out = false;
  int wstatus = 0;
  for (;;) {
    pid_t r = waitpid(pid, &wstatus, WNOHANG);
    if (r == pid) break;
    if (r < 0) throw SolverFailure("waitpid failed: " + std::string(strerror(errno)));
    double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > config.timeout_s) {
      kill(pid, SIGKILL);
      waitpid(pid, &wstatus, 0);
      timed_out = true;
      break;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(2));
  }
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  result.raw_output = out_file.read_all();

  if (timed_out) {
    result.status = SolverStatus::Timeout;
    return result;
  }
  if (WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 127) {
    result.status = SolverStatus::SolverError;
    result.raw_output = "solver command not found: " + args[0] + "\n" + result.raw_output;
    return result;
  }

  result.status = SolverStatus::SolverError;
  const std::string& raw = result.raw_output;
  size_t offset = 0;
  size_t model_start = raw.size();
  while (offset < raw.size()) {
    size_t eol = raw.find('\n', offset);
    size_t next = eol == std::string::npos ? raw.size() : eol + 1;
    std::string t = raw.substr(offset, (eol == std::string::npos ? raw.size() : eol) - offset);
    while (!t.empty() && (t.back() == '\r' || t.back() == ' ')) t.pop_back();
    offset = next;
    if (t == "sat") result.status = SolverStatus::Sat;
    else if (t == "unsat") result.status = SolverStatus::Unsat;
    else if (t == "unknown") result.status = SolverStatus::Unknown;
    else continue;
    model_start = next;
    break;
  }
  if (result.status == SolverStatus::Sat)
    result.model = parse_model_values(raw.substr(model_start));
  return result;
}

// Turns a Sat model into a waypoint sequence. Consecutive duplicated
// waypoints (reach-and-stay padding, kinematic stay steps) collapse to one.
inline MotionPlan decode_plan(const SolverResult& result, int waypoint_budget, bool kinematic) {
  if (result.status != SolverStatus::Sat || !result.model)
    throw SolverFailure("decode_plan needs a sat result with a model");
  const auto& m = *result.model;
  auto get = [&](const std::string& name) {
    auto it = m.find(name);
    if (it == m.end()) throw SolverFailure("model missing variable " + name);
    return it->second;
  };
  MotionPlan plan;
  plan.planner = kinematic ? PlannerKind::SmtKinematic : PlannerKind::Smt;
  for (int t = 0; t <= waypoint_budget; t++) {
    Waypoint w;
    w.x = get("x_" + std::to_string(t));
    w.y = get("y_" + std::to_string(t));
    if (kinematic) w.theta = get("theta_" + std::to_string(t));
    if (!plan.waypoints.empty()) {
      const Waypoint& prev = plan.waypoints.back();
      bool same = std::abs(prev.x - w.x) <= kEps && std::abs(prev.y - w.y) <= kEps &&
                  (!kinematic || std::abs(*prev.theta - *w.theta) <= kEps);
      if (same) continue;
    }
    plan.waypoints.push_back(w);
  }
  return plan;
}

struct DeepeningAttempt {
  int waypoint_budget = 0;
  SolverStatus status = SolverStatus::SolverError;
  double encode_time_s = 0.0;
  double solve_time_s = 0.0;
};

struct DeepeningOutcome {
  std::optional<MotionPlan> plan;
  std::vector<DeepeningAttempt> attempts;

  double total_encode_s() const {
    double s = 0;
    for (const auto& a : attempts) s += a.encode_time_s;
    return s;
  }
  double total_solve_s() const {
    double s = 0;
    for (const auto& a : attempts) s += a.solve_time_s;
    return s;
  }
};

// Tries budgets m_min..m_max in order and returns the first Sat plan, which
// is minimal under this schedule. Unsat/Unknown/Timeout move to the next
// budget; SolverError aborts.
inline DeepeningOutcome plan_with_deepening(PlanningProblem problem, int m_min, int m_max,
                                            EncodingKind kind, const KinematicParams& kp,
                                            const SolverConfig& config) {
  if (m_min < 1 || m_min > m_max) throw std::invalid_argument("bad deepening range");
  DeepeningOutcome outcome;
  for (int m = m_min; m <= m_max; m++) {
    problem.waypoint_budget = m;
    auto enc_start = std::chrono::steady_clock::now();
    SmtScript script = kind == EncodingKind::Pwl
                           ? encode_pwl(problem)
                           : encode_kinematic(problem, kp, kind == EncodingKind::KinematicOptimized);
    double enc_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - enc_start).count();
    SolverResult res = run_solver(script, config);
    outcome.attempts.push_back({m, res.status, enc_s, res.wall_time_s});
    if (res.status == SolverStatus::SolverError)
      throw SolverFailure("solver error at budget " + std::to_string(m) + ":\n" + res.raw_output);
    if (res.status == SolverStatus::Sat) {
      MotionPlan plan = decode_plan(res, m, kind != EncodingKind::Pwl);
      plan.smt_stats = script.stats;
      plan.encode_time_s = outcome.total_encode_s();
      plan.solve_time_s = outcome.total_solve_s();
      outcome.plan = std::move(plan);
      return outcome;
    }
  }
  return outcome;
}

}  // namespace gridnav
