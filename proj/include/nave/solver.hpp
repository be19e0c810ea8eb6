#pragma once

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <atomic>
#include <cctype>
#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nave/field.hpp"
#include "nave/sexpr.hpp"
#include "nave/smt.hpp"

namespace nave {

struct BackendConfig {
    std::string name;  // conventionally ff-split, ff-gb, int
    std::string solver_executable;
    std::vector<std::string> extra_args;
    std::int64_t timeout_ms{120000};
};

struct SolverVerdict {
    enum class Kind { Sat, Unsat, Unknown };
    Kind kind{Kind::Unknown};
    std::map<std::string, BigInt> model;  // Sat only, canonical residues
    std::string reason;                   // Unknown only
    std::int64_t elapsed_ms{0};
    std::string backend;
};

class SolverSpawnError : public std::runtime_error {
  public:
    explicit SolverSpawnError(const std::string& what) : std::runtime_error(what) {}
};

class ProtocolError : public std::runtime_error {
  public:
    explicit ProtocolError(const std::string& what) : std::runtime_error(what) {}
};

inline BigInt canonical_residue(const BigInt& v, const BigInt& modulus) {
    BigInt r = v % modulus;
    if (r < 0) {
        r += modulus;
    }
    return r;
}

/// Parse a get-value response into canonical residues in [0, p): field
/// literals (as ffN F), plain numerals, and negated numerals (- n) all
/// normalize mod p.
inline std::map<std::string, BigInt> parse_model(const std::string& raw,
                                                 const std::vector<std::string>& goal_symbols,
                                                 const BigInt& modulus) {
    std::vector<Sexpr> parsed;
    try {
        parsed = parse_sexprs(raw);
    } catch (const SexprParseError& e) {
        throw ProtocolError(std::string("malformed model response: ") + e.what());
    }
    if (parsed.size() != 1 || !parsed[0].is_list) {
        throw ProtocolError("expected one value-pair list, got: " + raw);
    }
    auto decode = [&](const Sexpr& v) -> BigInt {
        if (v.is_atom()) {
            if (v.atom.empty() || std::isdigit(static_cast<unsigned char>(v.atom[0])) == 0) {
                throw ProtocolError("unrecognized value " + v.atom);
            }
            return canonical_residue(parse_bigint(v.atom), modulus);
        }
        if (v.items.size() == 3 && v.items[0].is_atom() && v.items[0].atom == "as" &&
            v.items[1].is_atom() && v.items[1].atom.rfind("ff", 0) == 0) {
            return canonical_residue(parse_bigint(v.items[1].atom.substr(2)), modulus);
        }
        if (v.items.size() == 2 && v.items[0].is_atom() && v.items[0].atom == "-" &&
            v.items[1].is_atom()) {
            return canonical_residue(-parse_bigint(v.items[1].atom), modulus);
        }
        throw ProtocolError("unrecognized value shape");
    };
    std::map<std::string, BigInt> model;
    for (const Sexpr& pair : parsed[0].items) {
        if (!pair.is_list || pair.items.size() != 2 || !pair.items[0].is_atom()) {
            throw ProtocolError("malformed value pair in: " + raw);
        }
        model[pair.items[0].atom] = decode(pair.items[1]);
    }
    for (const std::string& sym : goal_symbols) {
        if (!model.count(sym)) {
            throw ProtocolError("model is missing symbol " + sym);
        }
    }
    return model;
}

namespace detail {

class TempScriptFile {
  public:
    explicit TempScriptFile(const std::string& contents) {
        const char* dir = std::getenv("TMPDIR");
        std::string templ = std::string(dir && *dir ? dir : "/tmp") + "/nave-script-XXXXXX";
        std::vector<char> buf(templ.begin(), templ.end());
        buf.push_back('\0');
        fd_ = ::mkstemp(buf.data());
        if (fd_ < 0) {
            throw SolverSpawnError("cannot create temporary script file");
        }
        path_.assign(buf.data());
        std::size_t written = 0;
        while (written < contents.size()) {
            ssize_t n = ::write(fd_, contents.data() + written, contents.size() - written);
            if (n < 0) {
                throw SolverSpawnError("cannot write temporary script file");
            }
            written += static_cast<std::size_t>(n);
        }
        ::lseek(fd_, 0, SEEK_SET);
    }

    ~TempScriptFile() {
        if (fd_ >= 0) {
            ::close(fd_);
        }
        if (!path_.empty()) {
            ::unlink(path_.c_str());
        }
    }

    TempScriptFile(const TempScriptFile&) = delete;
    TempScriptFile& operator=(const TempScriptFile&) = delete;

    int fd() const { return fd_; }

  private:
    int fd_{-1};
    std::string path_;
};

struct ChildProcess {
    pid_t pid{-1};
    int out_fd{-1};
};

/// Spawn the solver with the script as its stdin (a regular file, so no
/// writer can deadlock or take SIGPIPE) and stdout+stderr merged into one
/// pipe. argv is prepared before fork; the child only makes async-safe
/// calls.
inline ChildProcess spawn_solver(const BackendConfig& cfg, int script_fd) {
    if (cfg.solver_executable.find('/') != std::string::npos &&
        ::access(cfg.solver_executable.c_str(), X_OK) != 0) {
        throw SolverSpawnError("solver executable not found or not executable: " +
                               cfg.solver_executable);
    }
    std::vector<char*> argv;
    argv.push_back(const_cast<char*>(cfg.solver_executable.c_str()));
    for (const std::string& a : cfg.extra_args) {
        argv.push_back(const_cast<char*>(a.c_str()));
    }
    argv.push_back(nullptr);

    int pipe_fds[2];
    if (::pipe(pipe_fds) != 0) {
        throw SolverSpawnError("cannot create pipe");
    }
    pid_t pid = ::fork();
    if (pid < 0) {
        ::close(pipe_fds[0]);
        ::close(pipe_fds[1]);
        throw SolverSpawnError("fork failed");
    }
    if (pid == 0) {
        // Own process group so a timeout kill reaps any grandchildren too.
        ::setpgid(0, 0);
        ::dup2(script_fd, 0);
        ::dup2(pipe_fds[1], 1);
        ::dup2(pipe_fds[1], 2);
        ::close(pipe_fds[0]);
        ::close(pipe_fds[1]);
        ::execvp(argv[0], argv.data());
        _exit(127);
    }
    ::setpgid(pid, pid);
    ::close(pipe_fds[1]);
    return {pid, pipe_fds[0]};
}

inline void kill_and_reap(const ChildProcess& child) {
    ::kill(-child.pid, SIGKILL);
    ::kill(child.pid, SIGKILL);
    int status = 0;
    ::waitpid(child.pid, &status, 0);
}

/// Wait for exit without trusting the solver: a process that closed stdout
/// but lingers past the deadline is killed.
inline bool reap_with_deadline(const ChildProcess& child, std::int64_t remaining_ms,
                               int& status) {
    auto started = std::chrono::steady_clock::now();
    while (true) {
        pid_t r = ::waitpid(child.pid, &status, WNOHANG);
        if (r == child.pid) {
            ::kill(-child.pid, SIGKILL);  // sweep any forked grandchildren
            return true;
        }
        auto waited = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - started)
                          .count();
        if (waited >= remaining_ms) {
            kill_and_reap(child);
            return false;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
}

}  // namespace detail

/// Run one backend to completion: spawn, feed the script, parse the verdict
/// line and (on sat) the model. Deadline overrun kills the process group and
/// yields Unknown("timeout"); a flipped cancel flag yields
/// Unknown("cancelled").
inline SolverVerdict run_backend(const SmtScript& script, const BackendConfig& cfg,
                                 const std::atomic<bool>* cancel = nullptr) {
    auto start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&start]() {
        return std::chrono::duration_cast<std::chrono::milliseconds>(
                   std::chrono::steady_clock::now() - start)
            .count();
    };
    SolverVerdict verdict;
    verdict.backend = cfg.name;

    std::string text = to_smtlib2(script);
    detail::TempScriptFile script_file(text);
    detail::ChildProcess child = detail::spawn_solver(cfg, script_file.fd());

    std::string output;
    bool timed_out = false;
    bool cancelled = false;
    {
        char buf[4096];
        while (true) {
            if (cancel && cancel->load()) {
                cancelled = true;
                break;
            }
            if (elapsed_ms() >= cfg.timeout_ms) {
                timed_out = true;
                break;
            }
            struct pollfd pfd = {child.out_fd, POLLIN, 0};
            int rc = ::poll(&pfd, 1, 20);
            if (rc < 0) {
                if (errno == EINTR) {
                    continue;
                }
                break;
            }
            if (rc == 0) {
                continue;
            }
            ssize_t n = ::read(child.out_fd, buf, sizeof buf);
            if (n < 0) {
                if (errno == EINTR) {
                    continue;
                }
                break;
            }
            if (n == 0) {
                break;  // solver closed its stdout
            }
            output.append(buf, static_cast<std::size_t>(n));
        }
    }
    ::close(child.out_fd);
    if (timed_out || cancelled) {
        detail::kill_and_reap(child);
        verdict.kind = SolverVerdict::Kind::Unknown;
        verdict.reason = timed_out ? "timeout" : "cancelled";
        verdict.elapsed_ms = elapsed_ms();
        return verdict;
    }
    int status = 0;
    std::int64_t remaining = cfg.timeout_ms - elapsed_ms();
    if (!detail::reap_with_deadline(child, remaining > 0 ? remaining : 0, status)) {
        verdict.kind = SolverVerdict::Kind::Unknown;
        verdict.reason = "timeout";
        verdict.elapsed_ms = elapsed_ms();
        return verdict;
    }
    verdict.elapsed_ms = elapsed_ms();

    // First line reading sat/unsat/unknown is the verdict; anything after a
    // sat line is the get-value response.
    std::istringstream lines(output);
    std::string line;
    std::optional<std::string> answer;
    std::string rest;
    while (std::getline(lines, line)) {
        if (!answer) {
            if (line == "sat" || line == "unsat" || line == "unknown") {
                answer = line;
            }
            continue;
        }
        rest += line;
        rest += '\n';
    }
    if (!answer) {
        if (WIFEXITED(status) && WEXITSTATUS(status) == 127) {
            throw SolverSpawnError("cannot execute solver: " + cfg.solver_executable);
        }
        throw ProtocolError("no verdict line from " + cfg.name + "; output was: " + output);
    }
    if (*answer == "unsat") {
        verdict.kind = SolverVerdict::Kind::Unsat;
        return verdict;
    }
    if (*answer == "unknown") {
        verdict.kind = SolverVerdict::Kind::Unknown;
        verdict.reason = "solver-reported";
        return verdict;
    }
    verdict.kind = SolverVerdict::Kind::Sat;
    if (!script.goal_symbols.empty()) {
        if (!script.value_modulus) {
            throw ProtocolError("script with goal symbols lacks a value modulus");
        }
        try {
            verdict.model = parse_model(rest, script.goal_symbols, *script.value_modulus);
        } catch (const ProtocolError& e) {
            verdict.kind = SolverVerdict::Kind::Unknown;
            verdict.reason = std::string("parse-failure: ") + e.what();
            verdict.model.clear();
        }
    }
    return verdict;
}

/// One backend's work item: the script it consumes plus its configuration.
struct PortfolioJob {
    BackendConfig config;
    SmtScript script;
};

/// Race the configured backends: the first definitive (sat/unsat) answer
/// wins and the rest are killed. Ties resolve by smallest elapsed time, then
/// job order. If nothing is definitive, the Unknown reasons are aggregated;
/// an error is propagated only when every backend errored.
inline SolverVerdict run_portfolio(const std::vector<PortfolioJob>& jobs) {
    if (jobs.empty()) {
        throw SolverSpawnError("no backends configured");
    }
    std::atomic<bool> cancel{false};
    std::vector<std::optional<SolverVerdict>> verdicts(jobs.size());
    std::vector<std::exception_ptr> errors(jobs.size());
    std::vector<std::thread> threads;
    threads.reserve(jobs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        threads.emplace_back([&, i]() {
            try {
                SolverVerdict v = run_backend(jobs[i].script, jobs[i].config, &cancel);
                if (v.kind != SolverVerdict::Kind::Unknown) {
                    cancel.store(true);
                }
                verdicts[i] = std::move(v);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        });
    }
    for (std::thread& t : threads) {
        t.join();
    }

    std::optional<std::size_t> winner;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!verdicts[i] || verdicts[i]->kind == SolverVerdict::Kind::Unknown) {
            continue;
        }
        if (!winner || verdicts[i]->elapsed_ms < verdicts[*winner]->elapsed_ms) {
            winner = i;
        }
    }
    if (winner) {
        return *verdicts[*winner];
    }

    bool all_errored = true;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (!errors[i]) {
            all_errored = false;
        }
    }
    if (all_errored) {
        std::rethrow_exception(errors[0]);
    }

    SolverVerdict aggregate;
    aggregate.kind = SolverVerdict::Kind::Unknown;
    aggregate.backend = "portfolio";
    std::int64_t max_elapsed = 0;
    std::ostringstream reasons;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (i) {
            reasons << "; ";
        }
        reasons << jobs[i].config.name << ": ";
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                reasons << "error: " << e.what();
            }
        } else {
            reasons << verdicts[i]->reason;
            max_elapsed = std::max(max_elapsed, verdicts[i]->elapsed_ms);
        }
    }
    aggregate.reason = reasons.str();
    aggregate.elapsed_ms = max_elapsed;
    return aggregate;
}

}  // namespace nave
