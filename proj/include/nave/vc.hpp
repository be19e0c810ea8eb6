#pragma once

#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "nave/encode_ff.hpp"
#include "nave/encode_int.hpp"
#include "nave/interp.hpp"
#include "nave/ir.hpp"
#include "nave/ir_text.hpp"
#include "nave/smt.hpp"
#include "nave/solver.hpp"

namespace nave {

/// A proof obligation taken from a verify_assert call: the condition
/// expression must evaluate to 1 in every satisfying execution.
struct VerificationCondition {
    std::size_t opcode_index{0};
    Expression cond;
    std::optional<std::string> label;
};

class MalformedVc : public std::runtime_error {
  public:
    explicit MalformedVc(const std::string& what) : std::runtime_error(what) {}
};

/// One VC per verify_assert call, in program order. Other calls to
/// unconstrained functions are ignored.
inline std::vector<VerificationCondition> extract_vcs(const Circuit& c) {
    std::vector<VerificationCondition> out;
    for (std::size_t i = 0; i < c.opcodes.size(); ++i) {
        const auto* call = std::get_if<BrilligCall>(&c.opcodes[i]);
        if (!call || call->function != kVerifyAssertName) {
            continue;
        }
        if (call->inputs.size() != 1) {
            throw MalformedVc("verify_assert at opcode " + std::to_string(i) + " has " +
                              std::to_string(call->inputs.size()) + " inputs, expected 1");
        }
        out.push_back({i, call->inputs[0], std::nullopt});
    }
    return out;
}

enum class EncodingKind { Ff, Int };

/// Whole-circuit script extended with the negated condition. Unsat of this
/// formula means the condition holds in every execution.
inline SmtScript build_goal_formula(const Circuit& c, const VerificationCondition& vc,
                                    EncodingKind encoding, const EncodeOptions& opts = {}) {
    PrimeField f = c.field();
    if (encoding == EncodingKind::Ff) {
        SmtScript script = encode_circuit_ff(c, opts);
        Term cond = encode_expression_ff(vc.cond, f, opts);
        script.assertions.push_back(Term::list(
            {Term::sym("not"), Term::list({Term::sym("="), std::move(cond), Term::ff(1)})}));
        return script;
    }
    SmtScript script = encode_circuit_int(c, opts);
    Term cond = encode_expression_int(vc.cond, f, opts);
    script.assertions.push_back(Term::list(
        {Term::sym("not"), Term::list({Term::sym("="), std::move(cond), Term::num(1)})}));
    return script;
}

enum class VcVerdict { Verified, Falsified, Unknown };

struct VcResult {
    std::size_t vc_index{0};  // ordinal among the circuit's conditions
    VerificationCondition vc;
    VcVerdict verdict{VcVerdict::Unknown};
    std::optional<Assignment> counterexample;  // Falsified only, interp-validated
    std::string reason;                        // Unknown only
    std::string backend;
    std::int64_t elapsed_ms{0};
};

struct VerifyBackend {
    BackendConfig config;
    EncodingKind encoding{EncodingKind::Ff};
};

enum class VerifyMode { Single, Portfolio };

namespace detail {

inline std::optional<Assignment> model_to_assignment(const Circuit& c,
                                                     const std::map<std::string, BigInt>& model) {
    PrimeField f = c.field();
    std::vector<FieldElement> values;
    values.reserve(c.num_witnesses);
    for (std::uint32_t i = 0; i < c.num_witnesses; ++i) {
        auto it = model.find(witness_symbol({i}));
        if (it == model.end()) {
            return std::nullopt;
        }
        values.push_back(f.reduce(it->second));
    }
    return Assignment{std::move(values)};
}

}  // namespace detail

/// Check every VC of the circuit. Sat models are decoded and re-checked with
/// the interpreter before being reported: the circuit must be Satisfied and
/// the condition must evaluate to something other than 1. A model failing
/// that re-check downgrades the result to Unknown rather than presenting an
/// unvalidated counterexample. Per-VC protocol problems also land in
/// Unknown; only a missing solver executable propagates as an exception.
inline std::vector<VcResult> verify(const Circuit& c, const std::vector<VerifyBackend>& backends,
                                    VerifyMode mode, const EncodeOptions& opts = {},
                                    std::optional<std::size_t> only_vc = std::nullopt) {
    if (mode == VerifyMode::Single && backends.size() != 1) {
        throw std::invalid_argument("single mode takes exactly one backend");
    }
    if (mode == VerifyMode::Portfolio && backends.size() < 2) {
        throw std::invalid_argument("portfolio mode needs at least two backends");
    }
    PrimeField f = c.field();
    std::vector<VerificationCondition> vcs = extract_vcs(c);
    if (only_vc && *only_vc >= vcs.size()) {
        throw std::out_of_range("vc index " + std::to_string(*only_vc) + " out of range (" +
                                std::to_string(vcs.size()) + " conditions)");
    }
    std::vector<VcResult> results;
    for (std::size_t vi = 0; vi < vcs.size(); ++vi) {
        if (only_vc && *only_vc != vi) {
            continue;
        }
        const VerificationCondition& vc = vcs[vi];
        VcResult r;
        r.vc_index = vi;
        r.vc = vc;
        SolverVerdict sv;
        try {
            if (mode == VerifyMode::Single) {
                sv = run_backend(build_goal_formula(c, vc, backends[0].encoding, opts),
                                 backends[0].config);
            } else {
                std::vector<PortfolioJob> jobs;
                for (const VerifyBackend& b : backends) {
                    jobs.push_back({b.config, build_goal_formula(c, vc, b.encoding, opts)});
                }
                sv = run_portfolio(jobs);
            }
        } catch (const ProtocolError& e) {
            r.verdict = VcVerdict::Unknown;
            r.reason = e.what();
            r.backend = mode == VerifyMode::Single ? backends[0].config.name : "portfolio";
            results.push_back(std::move(r));
            continue;
        }
        r.backend = sv.backend;
        r.elapsed_ms = sv.elapsed_ms;
        switch (sv.kind) {
            case SolverVerdict::Kind::Unsat:
                r.verdict = VcVerdict::Verified;
                break;
            case SolverVerdict::Kind::Unknown:
                r.verdict = VcVerdict::Unknown;
                r.reason = sv.reason;
                break;
            case SolverVerdict::Kind::Sat: {
                auto asg = detail::model_to_assignment(c, sv.model);
                bool valid = false;
                if (asg) {
                    CheckResult check = check_assignment(c, *asg);
                    FieldElement cond_value = eval_expression(vc.cond, *asg, f);
                    valid = check.status == CheckStatus::Satisfied && !cond_value.is_one();
                }
                if (valid) {
                    r.verdict = VcVerdict::Falsified;
                    r.counterexample = std::move(asg);
                } else {
                    r.verdict = VcVerdict::Unknown;
                    r.reason = "model-validation-failure";
                }
                break;
            }
        }
        results.push_back(std::move(r));
    }
    return results;
}

// ---- machine-readable report ----

inline std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

inline std::string circuit_hash(const Circuit& c) {
    std::uint64_t h = fnv1a64(serialize_circuit(c));
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << h;
    return os.str();
}

inline const char* verdict_name(VcVerdict v) {
    switch (v) {
        case VcVerdict::Verified:
            return "verified";
        case VcVerdict::Falsified:
            return "falsified";
        case VcVerdict::Unknown:
            return "unknown";
    }
    return "unknown";
}

/// Per-run report: circuit hash plus one entry per VC, counterexample values
/// as decimal residue strings.
inline nlohmann::json report_to_json(const Circuit& c, const std::vector<VcResult>& results) {
    nlohmann::json doc;
    doc["circuit_hash"] = circuit_hash(c);
    doc["results"] = nlohmann::json::array();
    for (const VcResult& r : results) {
        nlohmann::json entry;
        entry["vc_index"] = r.vc_index;
        entry["opcode_index"] = r.vc.opcode_index;
        entry["verdict"] = verdict_name(r.verdict);
        entry["backend"] = r.backend;
        entry["elapsed_ms"] = r.elapsed_ms;
        if (r.verdict == VcVerdict::Falsified && r.counterexample) {
            nlohmann::json cex = nlohmann::json::object();
            for (std::uint32_t w = 0; w < c.num_witnesses; ++w) {
                std::ostringstream os;
                os << r.counterexample->values[w].value();
                cex[witness_symbol({w})] = os.str();
            }
            entry["counterexample"] = std::move(cex);
        }
        if (r.verdict == VcVerdict::Unknown) {
            entry["reason"] = r.reason;
        }
        doc["results"].push_back(std::move(entry));
    }
    return doc;
}

/// Parsed form of the report document, for round-tripping.
struct ReportEntry {
    std::size_t vc_index{0};
    std::size_t opcode_index{0};
    std::string verdict;
    std::string backend;
    std::int64_t elapsed_ms{0};
    std::map<std::string, BigInt> counterexample;
    std::string reason;

    friend bool operator==(const ReportEntry&, const ReportEntry&) = default;
};

struct ReportDoc {
    std::string circuit_hash;
    std::vector<ReportEntry> entries;

    friend bool operator==(const ReportDoc&, const ReportDoc&) = default;
};

class ReportParseError : public std::runtime_error {
  public:
    explicit ReportParseError(const std::string& what) : std::runtime_error(what) {}
};

inline ReportDoc parse_report(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ReportParseError(e.what());
    }
    ReportDoc out;
    try {
        out.circuit_hash = doc.at("circuit_hash").get<std::string>();
        for (const nlohmann::json& entry : doc.at("results")) {
            ReportEntry e;
            e.vc_index = entry.at("vc_index").get<std::size_t>();
            e.opcode_index = entry.at("opcode_index").get<std::size_t>();
            e.verdict = entry.at("verdict").get<std::string>();
            e.backend = entry.at("backend").get<std::string>();
            e.elapsed_ms = entry.at("elapsed_ms").get<std::int64_t>();
            if (entry.contains("counterexample")) {
                for (auto it = entry["counterexample"].begin();
                     it != entry["counterexample"].end(); ++it) {
                    e.counterexample[it.key()] = parse_bigint(it.value().get<std::string>());
                }
            }
            if (entry.contains("reason")) {
                e.reason = entry.at("reason").get<std::string>();
            }
            out.entries.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw ReportParseError(e.what());
    }
    return out;
}

}  // namespace nave
