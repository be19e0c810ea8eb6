#include <catch2/catch_amalgamated.hpp>

#include <signal.h>
#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "nave/encode_ff.hpp"
#include "nave/ir_text.hpp"
#include "nave/solver.hpp"

using namespace nave;

namespace {

std::string env_or_fail(const char* name) {
    const char* v = std::getenv(name);
    REQUIRE(v != nullptr);
    return v;
}

SmtScript tiny_ff_script(const BigInt& p, bool satisfiable) {
    // w0 = 1, optionally conjoined with w0 = 2
    Circuit c;
    c.modulus = p;
    c.num_witnesses = 1;
    PrimeField f = c.field();
    Expression pin;
    pin.linear.push_back({f.one(), {0}});
    pin.constant = f.reduce(-1);
    c.opcodes.push_back(AssertZero{pin});
    if (!satisfiable) {
        Expression pin2;
        pin2.linear.push_back({f.one(), {0}});
        pin2.constant = f.reduce(-2);
        c.opcodes.push_back(AssertZero{pin2});
    }
    return encode_circuit_ff(c);
}

struct PidDir {
    std::filesystem::path path;

    PidDir() {
        path = std::filesystem::temp_directory_path() /
               ("stubpids_" + std::to_string(getpid()) + "_" +
                std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
        std::filesystem::create_directories(path);
    }
    ~PidDir() { std::filesystem::remove_all(path); }

    std::vector<pid_t> pids() const {
        std::vector<pid_t> out;
        for (const auto& e : std::filesystem::directory_iterator(path)) {
            out.push_back(static_cast<pid_t>(std::stol(e.path().stem().string())));
        }
        return out;
    }
};

bool process_alive(pid_t pid) { return kill(pid, 0) == 0; }

BackendConfig stub_config(const std::string& name, const PidDir& dir,
                          std::vector<std::string> args, std::int64_t timeout_ms = 5000) {
    BackendConfig cfg;
    cfg.name = name;
    cfg.solver_executable = env_or_fail("NAVE_STUB_PATH");
    cfg.extra_args = std::move(args);
    cfg.extra_args.push_back("--pid-dir");
    cfg.extra_args.push_back(dir.path.string());
    cfg.timeout_ms = timeout_ms;
    return cfg;
}

}  // namespace

TEST_CASE("parse_model decodes field constants, numerals, and negatives") {
    auto m = parse_model("((w0 (as ff1 F)))", {"w0"}, BigInt(17));
    CHECK(m.at("w0") == 1);

    m = parse_model("((w0 16))", {"w0"}, BigInt(17));
    CHECK(m.at("w0") == 16);

    m = parse_model("((w0 (- 1)))", {"w0"}, BigInt(17));
    CHECK(m.at("w0") == 16);

    m = parse_model("((w0 (as ff5 F)) (w1 0))", {"w0", "w1"}, BigInt(7));
    CHECK(m.at("w0") == 5);
    CHECK(m.at("w1") == 0);

    // values reduce to canonical residues
    m = parse_model("((w0 35))", {"w0"}, BigInt(17));
    CHECK(m.at("w0") == 1);
}

TEST_CASE("parse_model rejects incomplete or malformed responses") {
    CHECK_THROWS_AS(parse_model("((w0 1))", {"w0", "w1"}, BigInt(7)), ProtocolError);
    CHECK_THROWS_AS(parse_model("w0 1", {"w0"}, BigInt(7)), ProtocolError);
    CHECK_THROWS_AS(parse_model("((w0 (+ 1 2)))", {"w0"}, BigInt(7)), ProtocolError);
    CHECK_THROWS_AS(parse_model("", {"w0"}, BigInt(7)), ProtocolError);
}

TEST_CASE("run_backend round-trips sat and unsat through a real process") {
    BackendConfig cfg;
    cfg.name = "ff-split";
    cfg.solver_executable = env_or_fail("NAVE_SOLVER_PATH");
    cfg.extra_args = {"--ff=split"};
    cfg.timeout_ms = 10000;

    SolverVerdict sat = run_backend(tiny_ff_script(BigInt(17), true), cfg);
    REQUIRE(sat.kind == SolverVerdict::Kind::Sat);
    CHECK(sat.model.at("w0") == 1);
    CHECK(sat.backend == "ff-split");

    SolverVerdict unsat = run_backend(tiny_ff_script(BigInt(17), false), cfg);
    CHECK(unsat.kind == SolverVerdict::Kind::Unsat);
}

TEST_CASE("missing executable raises a spawn error") {
    BackendConfig cfg;
    cfg.name = "gone";
    cfg.solver_executable = "/no/such/solver";
    CHECK_THROWS_AS(run_backend(tiny_ff_script(BigInt(7), true), cfg), SolverSpawnError);
}

TEST_CASE("garbage output is a protocol error, explicit unknown is not") {
    PidDir dir;
    SolverVerdict v =
        run_backend(tiny_ff_script(BigInt(7), true),
                    stub_config("u", dir, {"--verdict", "unknown"}));
    CHECK(v.kind == SolverVerdict::Kind::Unknown);
    CHECK(v.reason == "solver-reported");

    CHECK_THROWS_AS(run_backend(tiny_ff_script(BigInt(7), true),
                                stub_config("g", dir, {"--verdict", "garbage"})),
                    ProtocolError);
}

TEST_CASE("unparseable model downgrades sat to unknown") {
    PidDir dir;
    SolverVerdict v = run_backend(
        tiny_ff_script(BigInt(7), true),
        stub_config("badmodel", dir, {"--verdict", "sat", "--model", "((w0 (+ 1 2)))"}));
    CHECK(v.kind == SolverVerdict::Kind::Unknown);
    CHECK(v.reason.rfind("parse-failure", 0) == 0);
}

TEST_CASE("timeout kills the solver and reports it") {
    PidDir dir;
    auto start = std::chrono::steady_clock::now();
    SolverVerdict v =
        run_backend(tiny_ff_script(BigInt(7), true),
                    stub_config("slow", dir, {"--verdict", "sat", "--delay-ms", "30000"}, 200));
    auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count();
    CHECK(v.kind == SolverVerdict::Kind::Unknown);
    CHECK(v.reason == "timeout");
    CHECK(wall < 5000);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    for (pid_t pid : dir.pids()) {
        CHECK_FALSE(process_alive(pid));
    }
}

TEST_CASE("portfolio returns the first definitive verdict and kills losers") {
    PidDir dir;
    SmtScript script = tiny_ff_script(BigInt(17), true);
    std::vector<PortfolioJob> jobs;
    // the winner answers after 300 ms, long enough for the loser to have
    // recorded its pid, so the no-orphan sweep below sees both processes
    jobs.push_back({stub_config("fast", dir,
                                {"--verdict", "sat", "--model", "((w0 (as ff1 F)))",
                                 "--delay-ms", "300"}),
                    script});
    jobs.push_back(
        {stub_config("slow", dir, {"--verdict", "unsat", "--delay-ms", "30000"}), script});

    auto start = std::chrono::steady_clock::now();
    SolverVerdict v = run_portfolio(jobs);
    auto wall =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() -
                                                              start)
            .count();
    CHECK(v.kind == SolverVerdict::Kind::Sat);
    CHECK(v.backend == "fast");
    CHECK(v.model.at("w0") == 1);
    CHECK(wall < 10000);

    std::this_thread::sleep_for(std::chrono::milliseconds(50));
    for (pid_t pid : dir.pids()) {
        CHECK_FALSE(process_alive(pid));
    }
    CHECK(dir.pids().size() == 2);
}

TEST_CASE("three unknowns aggregate their reasons") {
    PidDir dir;
    SmtScript script = tiny_ff_script(BigInt(7), true);
    std::vector<PortfolioJob> jobs;
    jobs.push_back(
        {stub_config("a", dir, {"--verdict", "sat", "--delay-ms", "30000"}, 150), script});
    jobs.push_back(
        {stub_config("b", dir, {"--verdict", "sat", "--delay-ms", "30000"}, 150), script});
    jobs.push_back(
        {stub_config("c", dir, {"--verdict", "sat", "--delay-ms", "30000"}, 150), script});
    SolverVerdict v = run_portfolio(jobs);
    CHECK(v.kind == SolverVerdict::Kind::Unknown);
    CHECK(v.backend == "portfolio");
    CHECK(v.reason == "a: timeout; b: timeout; c: timeout");
}

TEST_CASE("portfolio with every job failing to spawn rethrows") {
    SmtScript script = tiny_ff_script(BigInt(7), true);
    BackendConfig bad;
    bad.name = "bad";
    bad.solver_executable = "/no/such/solver";
    std::vector<PortfolioJob> jobs{{bad, script}, {bad, script}};
    CHECK_THROWS_AS(run_portfolio(jobs), SolverSpawnError);
}

TEST_CASE("portfolio mixing errors with a definitive verdict still answers") {
    PidDir dir;
    SmtScript script = tiny_ff_script(BigInt(17), false);
    BackendConfig bad;
    bad.name = "bad";
    bad.solver_executable = "/no/such/solver";
    std::vector<PortfolioJob> jobs;
    jobs.push_back({bad, script});
    jobs.push_back({stub_config("good", dir, {"--verdict", "unsat"}), script});
    SolverVerdict v = run_portfolio(jobs);
    CHECK(v.kind == SolverVerdict::Kind::Unsat);
    CHECK(v.backend == "good");
}
