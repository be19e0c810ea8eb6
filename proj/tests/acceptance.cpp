// Acceptance gate: one pass/fail line per stated criterion, exit code equal
// to the number of failures. Runs the real solver binary as a subprocess for
// everything that exercises the verification pipeline.

#include <sys/stat.h>
#include <sys/wait.h>

#include <cerrno>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <signal.h>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "generator.hpp"
#include "nave/ir_text.hpp"
#include "nave/vc.hpp"

using namespace nave;

namespace {

std::string g_solver;
std::string g_stub;
std::string g_cli;
std::string g_fixtures;
std::string g_golden;

std::string require_env(const char* name) {
    const char* v = std::getenv(name);
    if (!v || !*v) {
        std::cerr << "missing environment variable " << name << "\n";
        std::exit(99);
    }
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in.good()) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Circuit load_fixture(const std::string& name) {
    return parse_circuit(read_file(g_fixtures + "/" + name));
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_cli(const std::string& args) {
    std::string cmd = "'" + g_cli + "' " + args + " >/dev/null 2>&1";
    int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

BackendConfig solver_config(const std::string& name, std::int64_t timeout_ms = 120000) {
    BackendConfig cfg;
    cfg.name = name;
    cfg.solver_executable = g_solver;
    cfg.timeout_ms = timeout_ms;
    return cfg;
}

VerifyBackend verify_backend(EncodingKind kind) {
    VerifyBackend b;
    b.config = solver_config(kind == EncodingKind::Ff ? "ff" : "int");
    if (kind == EncodingKind::Ff) {
        b.config.extra_args = {"--ff=split"};
    }
    b.encoding = kind;
    return b;
}

// Satisfiability of a whole-circuit encoding, via the real subprocess.
SolverVerdict::Kind solve_script(const SmtScript& script) {
    return run_backend(script, solver_config("probe")).kind;
}

struct Criterion {
    Criterion(int i, std::string d) : index(i), description(std::move(d)) {}

    int index;
    std::string description;
    bool ok{true};
    std::string detail;

    void check(bool cond, const std::string& msg) {
        if (!cond && ok) {
            ok = false;
            detail = msg;
        }
    }
    void note(const std::string& msg) {
        if (ok) {
            detail = msg;
        }
    }
    int report() const {
        std::cout << (ok ? "PASS" : "FAIL") << " criterion " << index << ": " << description;
        if (!detail.empty()) {
            std::cout << " (" << detail << ")";
        }
        std::cout << "\n";
        return ok ? 0 : 1;
    }
};

// Shared corpus for the differential criteria.
struct CorpusCase {
    Circuit circuit;
    bool brute_any{false};
    SolverVerdict::Kind ff{SolverVerdict::Kind::Unknown};
};

Criterion criterion1() {
    Criterion c{1, "square fixpoint circuit verifies under every backend"};
    std::ostringstream timings;
    for (const char* enc : {"ff-split", "ff-gb", "int"}) {
        auto start = std::chrono::steady_clock::now();
        int code = run_cli("verify '" + g_fixtures + "/square_fixpoint.acir' --encoding " +
                           enc + " --timeout-ms 120000");
        double secs = seconds_since(start);
        c.check(code == 0, std::string(enc) + " exited " + std::to_string(code));
        c.check(secs < 120.0, std::string(enc) + " exceeded 120 s");
        timings << enc << " " << std::fixed << std::setprecision(2) << secs << "s ";
    }
    c.note(timings.str());
    return c;
}

Criterion criterion2() {
    Criterion c{2, "broken variant falsified with validated model w0 = 1"};
    Circuit circuit = load_fixture("square_fixpoint_broken.acir");
    auto results = verify(circuit, {verify_backend(EncodingKind::Ff)}, VerifyMode::Single);
    c.check(results.size() == 1, "expected one condition");
    if (!results.empty()) {
        const VcResult& r = results[0];
        c.check(r.verdict == VcVerdict::Falsified,
                std::string("verdict ") + verdict_name(r.verdict));
        c.check(r.counterexample.has_value(), "no counterexample");
        if (r.counterexample) {
            c.check(r.counterexample->values[0].value() == 1, "model is not w0 = 1");
            // independent interpreter validation of the reported model
            c.check(check_assignment(circuit, *r.counterexample).satisfied(),
                    "model does not satisfy the circuit");
            FieldElement cond = eval_expression(extract_vcs(circuit)[0].cond,
                                                *r.counterexample, circuit.field());
            c.check(!cond.is_one(), "model does not violate the condition");
        }
    }
    return c;
}

Criterion criterion3(std::vector<CorpusCase>& corpus) {
    Criterion c{3, "field-encoding satisfiability matches brute force on random circuits"};
    auto start = std::chrono::steady_clock::now();
    std::mt19937_64 rng(20260816);
    const int kCount = 500;
    int disagreements = 0;
    int unknowns = 0;
    for (int i = 0; i < kCount; ++i) {
        CorpusCase cc;
        cc.circuit = navetest::random_circuit(rng);
        cc.brute_any = enumerate_satisfying(cc.circuit).any_model();
        cc.ff = solve_script(encode_circuit_ff(cc.circuit));
        if (cc.ff == SolverVerdict::Kind::Unknown) {
            ++unknowns;
        } else if ((cc.ff == SolverVerdict::Kind::Sat) != cc.brute_any) {
            ++disagreements;
        }
        corpus.push_back(std::move(cc));
    }
    double secs = seconds_since(start);
    c.check(disagreements == 0, std::to_string(disagreements) + " disagreements");
    c.check(unknowns == 0, std::to_string(unknowns) + " unknown verdicts");
    c.check(secs < 600.0, "exceeded 10 min");
    std::ostringstream os;
    os << kCount << " circuits, " << disagreements << " disagreements, " << unknowns
       << " unknowns, " << std::fixed << std::setprecision(1) << secs << "s";
    c.note(os.str());
    return c;
}

Criterion criterion4(const std::vector<CorpusCase>& corpus) {
    Criterion c{4, "field and integer encodings agree on corpus and fixtures"};
    int compared = 0;
    int skipped = 0;
    for (const CorpusCase& cc : corpus) {
        SolverVerdict::Kind iv = solve_script(encode_circuit_int(cc.circuit));
        if (cc.ff == SolverVerdict::Kind::Unknown || iv == SolverVerdict::Kind::Unknown) {
            ++skipped;
            continue;
        }
        ++compared;
        if (iv != cc.ff) {
            c.check(false, "whole-circuit verdict split on a random circuit");
            return c;
        }
    }

    // every fixture: per-condition verdicts under both encodings, checked
    // against the .expect sidecar where one pins a verdict
    int fixture_vcs = 0;
    for (const auto& entry : std::filesystem::directory_iterator(g_fixtures)) {
        if (entry.path().extension() != ".acir") {
            continue;
        }
        Circuit circuit = parse_circuit(read_file(entry.path().string()));
        auto ff_results =
            verify(circuit, {verify_backend(EncodingKind::Ff)}, VerifyMode::Single);
        auto int_results =
            verify(circuit, {verify_backend(EncodingKind::Int)}, VerifyMode::Single);
        std::string id = entry.path().stem().string();
        for (std::size_t i = 0; i < ff_results.size(); ++i) {
            ++fixture_vcs;
            if (ff_results[i].verdict == VcVerdict::Unknown ||
                int_results[i].verdict == VcVerdict::Unknown) {
                ++skipped;
                continue;
            }
            if (ff_results[i].verdict != int_results[i].verdict) {
                c.check(false, id + " vc " + std::to_string(i) + " split between encodings");
                return c;
            }
        }

        std::ifstream expect(g_fixtures + "/" + id + ".expect");
        std::string line;
        while (std::getline(expect, line)) {
            std::istringstream ls(line);
            std::string kw, want;
            std::size_t vi;
            if (!(ls >> kw >> vi >> want) || kw != "vc") {
                continue;
            }
            if (vi >= ff_results.size() || verdict_name(ff_results[vi].verdict) != want) {
                c.check(false, id + " vc " + std::to_string(vi) + " expected " + want);
                return c;
            }
            std::string pin;  // optional model pins, as w<i>=<decimal>
            while (ls >> pin) {
                auto eq = pin.find('=');
                std::size_t w = std::stoul(pin.substr(1, eq - 1));
                BigInt v = parse_bigint(pin.substr(eq + 1));
                const auto& cex = ff_results[vi].counterexample;
                if (!cex || cex->values[w].value() != v) {
                    c.check(false, id + " vc " + std::to_string(vi) + " model mismatch");
                    return c;
                }
            }
        }
    }
    std::ostringstream os;
    os << corpus.size() << " circuits and " << fixture_vcs << " fixture conditions, "
       << skipped << " skipped as unknown";
    c.note(os.str());
    return c;
}

Criterion criterion5() {
    Criterion c{5, "range checks are tight at both boundaries under both encodings"};
    struct Case {
        const char* modulus;
        std::uint32_t bits;
    };
    const Case cases[] = {{"97", 1}, {"97", 4}, {"bn254", 8}, {"bn254", 32}};
    for (const Case& cs : cases) {
        BigInt p = cs.modulus == std::string("bn254") ? bn254_modulus()
                                                      : parse_bigint(cs.modulus);
        PrimeField f(p);
        BigInt limit = BigInt(1) << cs.bits;
        for (int probe = 0; probe < 2; ++probe) {
            // probe 0 pins 2^n - 1 (must fit), probe 1 pins 2^n (must not)
            Circuit circuit;
            circuit.modulus = p;
            circuit.num_witnesses = 1;
            circuit.opcodes.push_back(RangeCheck{{0}, cs.bits});
            Expression pin;
            pin.linear.push_back({f.one(), {0}});
            pin.constant = f.reduce(-(limit - 1 + probe));
            circuit.opcodes.push_back(AssertZero{pin});
            if (!validate(circuit).empty()) {
                c.check(false, "boundary circuit failed validation");
                return c;
            }

            bool want_sat = probe == 0;
            auto ff = solve_script(encode_circuit_ff(circuit));
            auto iv = solve_script(encode_circuit_int(circuit));
            std::string tag = std::string(cs.modulus) + "/" + std::to_string(cs.bits) +
                              (want_sat ? " at 2^n-1" : " at 2^n");
            c.check(ff == (want_sat ? SolverVerdict::Kind::Sat : SolverVerdict::Kind::Unsat),
                    tag + " wrong under ff");
            c.check(iv == (want_sat ? SolverVerdict::Kind::Sat : SolverVerdict::Kind::Unsat),
                    tag + " wrong under int");
        }
    }

    // a width that cannot be stated at p = 97 must be rejected up front
    Circuit wide;
    wide.modulus = 97;
    wide.num_witnesses = 1;
    wide.opcodes.push_back(RangeCheck{{0}, 8});
    c.check(!validate(wide).empty(), "8-bit range at p = 97 passed validation");
    return c;
}

Criterion criterion6() {
    Criterion c{6, "memory reads return the written value and only the latest write"};
    for (const char* name : {"memory_roundtrip.acir", "memory_two_writes.acir"}) {
        Circuit circuit = load_fixture(name);
        auto results =
            verify(circuit, {verify_backend(EncodingKind::Ff)}, VerifyMode::Single);
        c.check(results.size() == 1, std::string(name) + ": expected one condition");
        if (!results.empty()) {
            c.check(results[0].verdict == VcVerdict::Verified,
                    std::string(name) + ": " + verdict_name(results[0].verdict));
        }

        // brute force: every satisfying execution makes the condition 1
        EnumerationResult models = enumerate_satisfying(circuit);
        c.check(!models.satisfying.empty(), std::string(name) + ": no satisfying model");
        Expression cond = extract_vcs(circuit)[0].cond;
        for (const Assignment& a : models.satisfying) {
            if (!eval_expression(cond, a, circuit.field()).is_one()) {
                c.check(false, std::string(name) + ": brute force found a violation");
                break;
            }
        }
        if (name == std::string("memory_two_writes.acir")) {
            // the overwrite property must not hold merely because both
            // writes stored the same value
            bool writes_differ = false;
            for (const Assignment& a : models.satisfying) {
                if (a.values[1] != a.values[2]) {
                    writes_differ = true;
                    break;
                }
            }
            c.check(writes_differ, "no model separates the two written values");
        }
    }
    return c;
}

Criterion criterion7() {
    Criterion c{7, "portfolio takes the first definitive verdict and kills the rest"};
    SmtScript script;
    script.logic = "QF_FF";

    char pid_template[] = "/tmp/navepidXXXXXX";
    std::string pid_dir = mkdtemp(pid_template);

    auto job = [&](const std::string& name, const std::string& verdict, int delay_ms,
                   std::int64_t timeout_ms = 120000) {
        PortfolioJob j;
        j.config.name = name;
        j.config.solver_executable = g_stub;
        j.config.extra_args = {"--verdict", verdict, "--delay-ms", std::to_string(delay_ms),
                               "--pid-dir", pid_dir};
        j.config.timeout_ms = timeout_ms;
        j.script = script;
        return j;
    };

    // an early unknown must not win over a later unsat; the slow job is
    // cancelled and its process killed
    auto start = std::chrono::steady_clock::now();
    SolverVerdict v = run_portfolio(
        {job("quick-unknown", "unknown", 50), job("decider", "unsat", 400),
         job("slowpoke", "sat", 30000)});
    double secs = seconds_since(start);
    c.check(v.kind == SolverVerdict::Kind::Unsat, "winner was not the definitive verdict");
    c.check(v.backend == "decider", "winner backend " + v.backend);
    c.check(secs < 5.0, "losers were not cancelled promptly");

    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    int recorded = 0;
    for (const auto& entry : std::filesystem::directory_iterator(pid_dir)) {
        ++recorded;
        pid_t pid = static_cast<pid_t>(std::stol(entry.path().stem().string()));
        if (kill(pid, 0) == 0 || errno != ESRCH) {
            c.check(false, "stub process " + std::to_string(pid) + " survived");
        }
    }
    c.check(recorded == 3, "expected 3 recorded stub pids, saw " + std::to_string(recorded));
    std::filesystem::remove_all(pid_dir);

    SolverVerdict agg = run_portfolio({job("a", "unknown", 30000, 150),
                                       job("b", "unknown", 30000, 150),
                                       job("c", "unknown", 30000, 150)});
    c.check(agg.kind == SolverVerdict::Kind::Unknown, "three timeouts were not unknown");
    c.check(agg.backend == "portfolio", "aggregate backend " + agg.backend);
    c.check(agg.reason == "a: timeout; b: timeout; c: timeout",
            "aggregate reason: " + agg.reason);
    return c;
}

Criterion criterion8() {
    Criterion c{8, "emitted scripts are byte-identical to the pinned snapshots"};
    Circuit circuit = load_fixture("square_fixpoint.acir");
    std::string ff = to_smtlib2(encode_circuit_ff(circuit));
    std::string iv = to_smtlib2(encode_circuit_int(circuit));
    c.check(ff == read_file(g_golden + "/square_fixpoint_ff.smt2"), "field script diverged");
    c.check(iv == read_file(g_golden + "/square_fixpoint_int.smt2"),
            "integer script diverged");
    return c;
}

}  // namespace

int main() {
    g_solver = require_env("NAVE_SOLVER_PATH");
    g_stub = require_env("NAVE_STUB_PATH");
    g_cli = require_env("NAVE_CLI_PATH");
    g_fixtures = require_env("NAVE_FIXTURE_DIR");
    g_golden = require_env("NAVE_GOLDEN_DIR");

    int failures = 0;
    std::vector<CorpusCase> corpus;
    failures += criterion1().report();
    failures += criterion2().report();
    failures += criterion3(corpus).report();
    failures += criterion4(corpus).report();
    failures += criterion5().report();
    failures += criterion6().report();
    failures += criterion7().report();
    failures += criterion8().report();
    return failures;
}
