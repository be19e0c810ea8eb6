// Command-line front end: parse and validate circuit documents, interpret
// assignments, emit SMT-LIB2 scripts, check verification conditions against
// an external solver, and benchmark fixture directories.
//
// Exit codes for verify: 0 all conditions verified, 1 at least one
// falsified, 2 at least one unknown and none falsified, 3 usage, IO or
// solver error. interpret mirrors the scheme: 0 satisfied, 1 violated,
// 2 out-of-range access, 3 error.

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "nave/field.hpp"
#include "nave/interp.hpp"
#include "nave/ir.hpp"
#include "nave/ir_text.hpp"
#include "nave/smt.hpp"
#include "nave/solver.hpp"
#include "nave/vc.hpp"

namespace {

using namespace nave;

class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw UsageError("cannot read " + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Circuit load_circuit(const std::string& path) { return parse_circuit(read_file(path)); }

struct SolverSelection {
    std::string executable;
    std::vector<std::string> extra_args;
    std::int64_t timeout_ms{120000};
};

SolverSelection resolve_solver(const std::string& flag_value, const std::string& args_value,
                               std::int64_t timeout_ms) {
    SolverSelection sel;
    sel.executable = flag_value;
    if (sel.executable.empty()) {
        if (const char* env = std::getenv("NAVE_SOLVER_PATH")) {
            sel.executable = env;
        }
    }
    if (sel.executable.empty()) {
        throw UsageError("no solver configured; pass --solver or set NAVE_SOLVER_PATH");
    }
    std::istringstream split(args_value);
    std::string tok;
    while (split >> tok) {
        sel.extra_args.push_back(tok);
    }
    sel.timeout_ms = timeout_ms;
    return sel;
}

VerifyBackend make_backend(const std::string& encoding, const SolverSelection& sel) {
    VerifyBackend b;
    b.config.name = encoding;
    b.config.solver_executable = sel.executable;
    b.config.timeout_ms = sel.timeout_ms;
    if (encoding == "ff-split") {
        b.config.extra_args = {"--ff=split"};
        b.encoding = EncodingKind::Ff;
    } else if (encoding == "ff-gb") {
        b.config.extra_args = {"--ff=gb"};
        b.encoding = EncodingKind::Ff;
    } else if (encoding == "int") {
        b.config.extra_args = {};
        b.encoding = EncodingKind::Int;
    } else {
        throw UsageError("unknown encoding " + encoding);
    }
    b.config.extra_args.insert(b.config.extra_args.end(), sel.extra_args.begin(),
                               sel.extra_args.end());
    return b;
}

// Sampled interpreter runs looking for reachable out-of-range memory
// accesses, which the encodings deliberately leave unconstrained.
void run_memory_lint(const Circuit& c, std::uint64_t seed) {
    constexpr int kSamples = 256;
    PrimeField f = c.field();
    std::mt19937_64 rng(seed);
    unsigned chunks = static_cast<unsigned>(f.bit_length() / 64 + 2);
    int hits = 0;
    std::optional<std::size_t> first_opcode;
    for (int s = 0; s < kSamples; ++s) {
        Assignment a;
        a.values.reserve(c.num_witnesses);
        for (std::uint32_t w = 0; w < c.num_witnesses; ++w) {
            BigInt raw = 0;
            for (unsigned k = 0; k < chunks; ++k) {
                raw <<= 64;
                raw += BigInt(rng());
            }
            a.values.push_back(f.reduce(raw));
        }
        CheckResult r = check_assignment(c, a);
        if (r.status == CheckStatus::OutOfRange) {
            ++hits;
            if (!first_opcode && r.opcode_index) {
                first_opcode = *r.opcode_index;
            }
        }
    }
    if (hits > 0) {
        std::cerr << "warning: memory lint: " << hits << " of " << kSamples
                  << " sampled assignments hit an out-of-range memory access";
        if (first_opcode) {
            std::cerr << " (first at opcode " << *first_opcode << ")";
        }
        std::cerr << "\n";
    }
}

bool is_public(const Circuit& c, std::uint32_t w) {
    return std::binary_search(c.public_inputs.begin(), c.public_inputs.end(), w);
}

void print_counterexample(const Circuit& c, const Assignment& a) {
    for (std::uint32_t w = 0; w < c.num_witnesses; ++w) {
        std::cout << "  " << witness_symbol({w}) << " = " << a.values[w].value();
        if (is_public(c, w)) {
            std::cout << " (public)";
        }
        std::cout << "\n";
    }
}

int exit_code_for(const std::vector<VcResult>& results) {
    bool any_falsified = false;
    bool any_unknown = false;
    for (const VcResult& r : results) {
        any_falsified = any_falsified || r.verdict == VcVerdict::Falsified;
        any_unknown = any_unknown || r.verdict == VcVerdict::Unknown;
    }
    if (any_falsified) {
        return 1;
    }
    if (any_unknown) {
        return 2;
    }
    return 0;
}

int cmd_verify(const std::string& input, const std::string& encoding,
               const SolverSelection& sel, const std::string& output,
               std::optional<std::size_t> only_vc, bool simplify, bool memory_lint,
               std::uint64_t seed) {
    Circuit c = load_circuit(input);
    if (memory_lint) {
        run_memory_lint(c, seed);
    }
    EncodeOptions opts;
    opts.simplify = simplify;

    std::vector<VerifyBackend> backends;
    VerifyMode mode = VerifyMode::Single;
    if (encoding == "portfolio") {
        backends = {make_backend("ff-split", sel), make_backend("ff-gb", sel),
                    make_backend("int", sel)};
        mode = VerifyMode::Portfolio;
    } else {
        backends = {make_backend(encoding, sel)};
    }

    std::vector<VcResult> results = verify(c, backends, mode, opts, only_vc);

    if (output == "json") {
        std::cout << report_to_json(c, results).dump(2) << "\n";
    } else {
        if (results.empty()) {
            std::cout << "no verification conditions\n";
        }
        for (const VcResult& r : results) {
            std::cout << "vc " << r.vc_index << " (opcode " << r.vc.opcode_index
                      << "): " << verdict_name(r.verdict);
            if (r.verdict == VcVerdict::Unknown && !r.reason.empty()) {
                std::cout << " (" << r.reason << ")";
            }
            std::cout << " [" << r.backend << ", " << r.elapsed_ms << " ms]\n";
            if (r.counterexample) {
                print_counterexample(c, *r.counterexample);
            }
        }
    }
    return exit_code_for(results);
}

int cmd_emit(const std::string& input, const std::string& encoding,
             std::optional<std::size_t> only_vc, bool simplify) {
    Circuit c = load_circuit(input);
    EncodeOptions opts;
    opts.simplify = simplify;
    EncodingKind kind;
    if (encoding == "ff-split" || encoding == "ff-gb") {
        kind = EncodingKind::Ff;
    } else if (encoding == "int") {
        kind = EncodingKind::Int;
    } else {
        throw UsageError("emit needs --encoding ff-split, ff-gb or int");
    }
    SmtScript script;
    if (only_vc) {
        std::vector<VerificationCondition> vcs = extract_vcs(c);
        if (*only_vc >= vcs.size()) {
            throw UsageError("vc index " + std::to_string(*only_vc) + " out of range (" +
                             std::to_string(vcs.size()) + " conditions)");
        }
        script = build_goal_formula(c, vcs[*only_vc], kind, opts);
    } else {
        script = kind == EncodingKind::Ff ? encode_circuit_ff(c, opts)
                                          : encode_circuit_int(c, opts);
    }
    std::cout << to_smtlib2(script);
    return 0;
}

Assignment parse_assignment_file(const Circuit& c, const std::string& path) {
    std::string text = read_file(path);
    std::map<std::uint32_t, BigInt> given;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view sv(line);
        if (auto hash = sv.find('#'); hash != std::string_view::npos) {
            sv = sv.substr(0, hash);
        }
        while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) {
            sv.remove_suffix(1);
        }
        while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) {
            sv.remove_prefix(1);
        }
        if (sv.empty()) {
            continue;
        }
        auto fail = [&](const std::string& msg) {
            throw UsageError(path + ":" + std::to_string(lineno) + ": " + msg);
        };
        if (sv.size() < 4 || sv[0] != 'w') {
            fail("expected w<i>=<decimal>");
        }
        auto eq = sv.find('=');
        if (eq == std::string_view::npos) {
            fail("expected w<i>=<decimal>");
        }
        std::uint32_t idx = 0;
        try {
            idx = static_cast<std::uint32_t>(std::stoul(std::string(sv.substr(1, eq - 1))));
        } catch (const std::exception&) {
            fail("bad witness index");
        }
        if (idx >= c.num_witnesses) {
            fail("witness index " + std::to_string(idx) + " out of range");
        }
        if (given.count(idx)) {
            fail("duplicate assignment for w" + std::to_string(idx));
        }
        BigInt value;
        try {
            value = parse_bigint(std::string(sv.substr(eq + 1)));
        } catch (const std::exception&) {
            fail("bad value");
        }
        given[idx] = value;
    }
    if (given.size() != c.num_witnesses) {
        throw UsageError(path + ": partial assignment: " + std::to_string(given.size()) +
                         " of " + std::to_string(c.num_witnesses) + " witnesses");
    }
    PrimeField f = c.field();
    Assignment a;
    a.values.reserve(c.num_witnesses);
    for (std::uint32_t w = 0; w < c.num_witnesses; ++w) {
        a.values.push_back(f.reduce(given.at(w)));
    }
    return a;
}

int cmd_interpret(const std::string& input, const std::string& assignment) {
    Circuit c = load_circuit(input);
    Assignment a = parse_assignment_file(c, assignment);
    CheckResult r = check_assignment(c, a);
    switch (r.status) {
        case CheckStatus::Satisfied:
            std::cout << "Satisfied\n";
            return 0;
        case CheckStatus::Violated:
            std::cout << "Violated(" << *r.opcode_index << ")\n";
            return 1;
        case CheckStatus::OutOfRange:
            std::cout << "out-of-range(" << *r.opcode_index << ")\n";
            return 2;
    }
    return 3;
}

struct BenchCell {
    std::string status{"ok"};  // ok | timeout | error
    std::int64_t elapsed_ms{0};
};

struct BenchRow {
    std::string id;
    bool loaded{false};
    std::uint32_t witnesses{0};
    std::size_t opcodes{0};
    std::size_t range_checks{0};
    std::uint32_t max_range_bits{0};
    std::map<std::string, BenchCell> cells;  // keyed sp | gb | int
};

std::string format_cell(const BenchCell& cell) {
    if (cell.status == "timeout") {
        return "t";
    }
    if (cell.status == "error") {
        return "err";
    }
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(2);
    os << static_cast<double>(cell.elapsed_ms) / 1000.0;
    return os.str();
}

int cmd_bench(const std::string& dir, const SolverSelection& sel, const std::string& output) {
    namespace fs = std::filesystem;
    std::vector<fs::path> inputs;
    {
        std::error_code ec;
        fs::directory_iterator it(dir, ec);
        if (ec) {
            throw UsageError("cannot read directory " + dir + ": " + ec.message());
        }
        for (const fs::directory_entry& e : it) {
            if (e.path().extension() == ".acir") {
                inputs.push_back(e.path());
            }
        }
    }
    std::sort(inputs.begin(), inputs.end());
    if (inputs.empty()) {
        throw UsageError("no .acir fixtures in " + dir);
    }

    const std::pair<std::string, std::string> kBackends[] = {
        {"sp", "ff-split"}, {"gb", "ff-gb"}, {"int", "int"}};

    std::vector<BenchRow> rows;
    for (const fs::path& path : inputs) {
        BenchRow row;
        row.id = path.stem().string();
        Circuit c;
        try {
            c = load_circuit(path.string());
            row.loaded = true;
        } catch (const std::exception&) {
            for (const auto& [key, encoding] : kBackends) {
                row.cells[key] = {"error", 0};
            }
            rows.push_back(std::move(row));
            continue;
        }
        row.witnesses = c.num_witnesses;
        row.opcodes = c.opcodes.size();
        for (const Opcode& op : c.opcodes) {
            if (const auto* rc = std::get_if<RangeCheck>(&op)) {
                ++row.range_checks;
                row.max_range_bits = std::max(row.max_range_bits, rc->bits);
            }
        }
        for (const auto& [key, encoding] : kBackends) {
            BenchCell cell;
            try {
                std::vector<VcResult> results =
                    verify(c, {make_backend(encoding, sel)}, VerifyMode::Single);
                for (const VcResult& r : results) {
                    cell.elapsed_ms += r.elapsed_ms;
                    if (r.verdict == VcVerdict::Unknown && r.reason == "timeout") {
                        cell.status = "timeout";
                    }
                }
            } catch (const std::exception&) {
                cell.status = "error";
            }
            row.cells[key] = cell;
        }
        rows.push_back(std::move(row));
    }

    if (output == "json") {
        nlohmann::json doc;
        doc["timeout_ms"] = sel.timeout_ms;
        doc["rows"] = nlohmann::json::array();
        for (const BenchRow& row : rows) {
            nlohmann::json r;
            r["id"] = row.id;
            r["witnesses"] = row.witnesses;
            r["opcodes"] = row.opcodes;
            r["range_checks"] = row.range_checks;
            r["max_range_bits"] = row.max_range_bits;
            for (const auto& [key, cell] : row.cells) {
                r[key] = {{"status", cell.status}, {"elapsed_ms", cell.elapsed_ms}};
            }
            doc["rows"].push_back(std::move(r));
        }
        std::cout << doc.dump(2) << "\n";
        return 0;
    }

    std::vector<std::vector<std::string>> table;
    table.push_back({"id", "wit", "ops", "rc", "r_max", "sp", "gb", "int"});
    for (const BenchRow& row : rows) {
        std::vector<std::string> cols;
        cols.push_back(row.id);
        if (row.loaded) {
            cols.push_back(std::to_string(row.witnesses));
            cols.push_back(std::to_string(row.opcodes));
            cols.push_back(std::to_string(row.range_checks));
            cols.push_back(std::to_string(row.max_range_bits));
        } else {
            cols.insert(cols.end(), {"-", "-", "-", "-"});
        }
        for (const auto& [key, encoding] : kBackends) {
            cols.push_back(format_cell(row.cells.at(key)));
        }
        table.push_back(std::move(cols));
    }
    std::vector<std::size_t> width(table[0].size(), 0);
    for (const auto& cols : table) {
        for (std::size_t i = 0; i < cols.size(); ++i) {
            width[i] = std::max(width[i], cols[i].size());
        }
    }
    for (const auto& cols : table) {
        std::ostringstream line;
        for (std::size_t i = 0; i < cols.size(); ++i) {
            if (i > 0) {
                line << "  ";
            }
            line << cols[i];
            if (i + 1 < cols.size()) {
                line << std::string(width[i] - cols[i].size(), ' ');
            }
        }
        std::cout << line.str() << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic-circuit verifier"};
    app.require_subcommand(1);

    std::string input;
    std::string encoding = "ff-split";
    std::string solver;
    std::string solver_args;
    std::string output = "text";
    std::int64_t timeout_ms = 120000;
    std::int64_t vc_index = -1;
    bool simplify = false;
    bool memory_lint = false;
    std::uint64_t seed = 0;
    std::string assignment;
    std::string bench_dir;

    const std::vector<std::string> kEncodings = {"ff-split", "ff-gb", "int", "portfolio"};

    CLI::App* verify_cmd = app.add_subcommand("verify", "check all verification conditions");
    verify_cmd->add_option("input", input, "circuit document")->required();
    verify_cmd->add_option("--encoding", encoding, "ff-split | ff-gb | int | portfolio")
        ->check(CLI::IsMember(kEncodings));
    verify_cmd->add_option("--timeout-ms", timeout_ms, "per-condition solver timeout");
    verify_cmd->add_option("--solver", solver, "solver executable (default $NAVE_SOLVER_PATH)");
    verify_cmd->add_option("--solver-args", solver_args, "extra solver arguments");
    verify_cmd->add_option("--output", output, "text | json")
        ->check(CLI::IsMember({"text", "json"}));
    verify_cmd->add_option("--vc", vc_index, "check a single condition by index");
    verify_cmd->add_flag("--simplify", simplify, "drop unit and zero coefficients");
    verify_cmd->add_flag("--strict-memory-lint", memory_lint,
                         "sample assignments and warn on out-of-range memory accesses");
    verify_cmd->add_option("--seed", seed, "sampling seed for the memory lint");

    CLI::App* emit_cmd = app.add_subcommand("emit", "print the SMT-LIB2 encoding");
    emit_cmd->add_option("input", input, "circuit document")->required();
    emit_cmd->add_option("--encoding", encoding, "ff-split | ff-gb | int")
        ->check(CLI::IsMember(kEncodings));
    emit_cmd->add_option("--vc", vc_index, "append the negated condition with this index");
    emit_cmd->add_flag("--simplify", simplify, "drop unit and zero coefficients");

    CLI::App* interp_cmd = app.add_subcommand("interpret", "evaluate a concrete assignment");
    interp_cmd->add_option("input", input, "circuit document")->required();
    interp_cmd->add_option("assignment", assignment, "file of w<i>=<decimal> lines")->required();

    CLI::App* bench_cmd = app.add_subcommand("bench", "time every fixture under all backends");
    bench_cmd->add_option("dir", bench_dir, "directory of .acir fixtures")->required();
    bench_cmd->add_option("--timeout-ms", timeout_ms, "per-condition solver timeout");
    bench_cmd->add_option("--solver", solver, "solver executable (default $NAVE_SOLVER_PATH)");
    bench_cmd->add_option("--solver-args", solver_args, "extra solver arguments");
    bench_cmd->add_option("--output", output, "text | json")
        ->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    std::optional<std::size_t> only_vc;
    if (vc_index >= 0) {
        only_vc = static_cast<std::size_t>(vc_index);
    }

    try {
        if (verify_cmd->parsed()) {
            SolverSelection sel = resolve_solver(solver, solver_args, timeout_ms);
            return cmd_verify(input, encoding, sel, output, only_vc, simplify, memory_lint,
                              seed);
        }
        if (emit_cmd->parsed()) {
            return cmd_emit(input, encoding, only_vc, simplify);
        }
        if (interp_cmd->parsed()) {
            return cmd_interpret(input, assignment);
        }
        if (bench_cmd->parsed()) {
            SolverSelection sel = resolve_solver(solver, solver_args, timeout_ms);
            return cmd_bench(bench_dir, sel, output);
        }
    } catch (const std::exception& e) {
        std::cerr << "nave: " << e.what() << "\n";
        return 3;
    }
    return 3;
}
