// Command-line front end: `run` computes the canonical height of the toric
// variety described by a JSON problem file and emits a machine-readable
// report; `verify` executes the invariant battery (zero law, mass balance,
// round trips, Monte Carlo agreement) and prints a pass/fail table.
//
// Exit codes: 0 success, 1 failed invariant (verify), 2 validation error,
// 3 internal invariant violation.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "toric/json_io.hpp"

using namespace toric;

namespace {

void apply_env_budget() {
    if (const char* s = std::getenv("TORIC_HEIGHT_BITS")) {
        int bits = std::atoi(s);
        if (bits >= 64) refinement_budget_bits().store(bits);
    }
}

std::string timestamp() {
    auto now = std::chrono::system_clock::now();
    auto t = std::chrono::system_clock::to_time_t(now);
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

int cmd_run(const Problem& prob, const std::string& reportPath, bool quiet) {
    PointConfig A = validate_config(prob.rawConfig);
    json rj;
    std::string summary;
    if (prob.mode == "exact") {
        HeightReport rep = canonical_height(A, prob.alpha);
        json oracles = run_oracle_checks(prob, rep);
        rj = report_json(prob, rep);
        if (!oracles.empty()) rj["oracles"] = std::move(oracles);
        json findings = json::array();
        for (const auto& f : rep.findings) findings.push_back(json{{"kind", f.kind}, {"detail", f.detail}});
        rj["findings"] = std::move(findings);
        std::ostringstream os;
        os << "height = " << rep.height.inPrimes.to_string() << "  (~" << rep.height.inPrimes.approx()
           << ")\n";
        if (rep.height.hasAlphaBasis) {
            os << "alpha-basis b = [";
            for (size_t i = 0; i < rep.height.alphaBasis.size(); ++i)
                os << (i ? ", " : "") << rep.height.alphaBasis[i].get_str();
            os << "]  all integers: " << (rep.height.allIntegral ? "yes" : "no") << "\n";
        }
        os << "degree = " << rep.degree.get_str() << ", chain steps = " << rep.chain.size()
           << ", findings = " << rep.findings.size();
        summary = os.str();
    } else {
        FloatHeightReport rep = canonical_height_float(A, prob.moduli);
        rj = float_report_json(prob, rep);
        std::ostringstream os;
        os << "height ~ " << rep.height << " (float mode, approximate)";
        summary = os.str();
    }
    rj["timestamp"] = timestamp();
    if (!reportPath.empty()) {
        std::ofstream out(reportPath);
        if (!out) throw ValidationError("cannot write report to " + reportPath);
        out << rj.dump(2) << "\n";
    }
    if (!quiet) std::cout << summary << "\n";
    return 0;
}

QVec random_torus_point(int d, uint64_t seed, uint32_t stream) {
    QVec t(static_cast<size_t>(d));
    int m = std::max(1, 2 * d);
    std::vector<double> u(static_cast<size_t>(m));
    rng::uniforms(seed, stream, 0, m, u.data());
    for (int i = 0; i < d; ++i) {
        long num = 1 + static_cast<long>(u[static_cast<size_t>(2 * i)] * 7);
        long den = 1 + static_cast<long>(u[static_cast<size_t>(2 * i + 1)] * 7);
        t[static_cast<size_t>(i)] = Rat(num, den);
        t[static_cast<size_t>(i)].canonicalize();
    }
    return t;
}

int cmd_verify(const Problem& prob, bool quiet) {
    if (prob.mode != "exact") throw ValidationError("verify requires exact mode");
    PointConfig A = validate_config(prob.rawConfig);

    struct Row {
        std::string name;
        bool pass;
        std::string note;
    };
    std::vector<Row> rows;
    auto check = [&](const std::string& name, bool ok, const std::string& note = "") {
        rows.push_back({name, ok, note});
    };

    Coefficients ones;
    ones.values.assign(A.points.size(), Rat(1));
    auto repOnes = canonical_height(A, ones);
    check("zero-law (alpha = 1)", repOnes.height.inPrimes.is_zero());
    check("base-case (terminal height 0)",
          repOnes.stepHeights.empty() || repOnes.stepHeights.back().is_zero());

    HeightReport rep = canonical_height(A, prob.alpha);
    bool massOk = true;
    std::string massNote;
    try {
        if (rep.rawTopMeasure)
            massNote = "mass " + rep.rawTopMeasure->totalMass.get_str() + " = degree " +
                       rep.rawTopMeasure->degree.get_str();
        else
            massNote = "codimension 0, no lift";
    } catch (const MassImbalanceError& e) {
        massOk = false;
        massNote = e.what();
    }
    check("mass-balance", massOk, massNote);

    bool rt = true;
    for (uint32_t s = 0; s < 5 && rt; ++s) {
        QVec t = random_torus_point(A.d, prob.mc.seed, 1000 + s);
        QVec x = parametrize(A, ones, t);
        if (!membership(A, ones, x)) rt = false;
        else rt = (retraction_check(A, x) == t);
    }
    check("round-trip (parametrize/retract)", rt);

    bool pm = true;
    for (long p : {2L, 3L, 5L}) {
        QVec t = random_torus_point(A.d, prob.mc.seed, 2000 + static_cast<uint32_t>(p));
        QVec x = parametrize(A, ones, t);
        QVec xp(x.size());
        for (size_t i = 0; i < x.size(); ++i) xp[i] = rat_pow(x[i], Int(p));
        if (!membership(A, ones, xp)) pm = false;
    }
    check("power-map stability (p = 2,3,5)", pm);

    Coefficients sq;
    for (const Rat& a : prob.alpha.values) sq.values.push_back(a * a);
    auto repSq = canonical_height(A, sq);
    check("homogeneity h(alpha^2) = 2 h(alpha)",
          (repSq.height.inPrimes - rep.height.inPrimes.scaled(Rat(2))).is_zero());

    bool mcOk = true;
    std::vector<LogLinearNumber> la;
    for (const Rat& a : prob.alpha.values) la.push_back(LogLinearNumber::log_abs(a));
    uint32_t stream = 100;
    for (size_t j = 0; j < rep.chain.size() && mcOk; ++j) {
        const auto& ev = rep.evaluations[j];
        for (size_t i = 0; i < ev.measure.atoms.size(); ++i) {
            auto mc = mc_polycircle(ev.measure.atoms[i], rep.chain[j].sd, rep.chain[j].sd.satConfig,
                                    la, prob.mc.samples, prob.mc.seed, stream++, prob.mc.guard);
            if (std::abs(ev.contributions[i].approx() - mc.mean) > 3.0 * mc.stderr_) {
                mcOk = false;
                break;
            }
        }
    }
    check("mc-agreement (3 sigma)", mcOk);

    check("alpha-basis integrality", !rep.height.hasAlphaBasis || rep.height.allIntegral,
          rep.height.hasAlphaBasis ? "" : "no alpha-basis expression");

    bool all = true;
    for (const auto& r : rows) {
        all = all && r.pass;
        if (!quiet)
            std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name
                      << (r.note.empty() ? "" : "  [" + r.note + "]") << "\n";
    }
    if (!quiet) std::cout << (all ? "all invariants hold" : "invariant battery FAILED") << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    apply_env_budget();
    CLI::App app{"canonical heights of projective toric varieties (GKZ)"};
    app.require_subcommand(1);

    std::string path, reportPath, mode, checks;
    long samples = -1;
    long long seed = -1;
    double guard = -1.0, smoothP = -1.0;
    bool quiet = false;

    auto addCommon = [&](CLI::App* cmd) {
        cmd->add_option("file", path, "JSON problem file")->required();
        cmd->add_option("--mode", mode, "exact | float (overrides the file)");
        cmd->add_option("--mc-samples", samples, "Monte Carlo sample count");
        cmd->add_option("--mc-seed", seed, "Monte Carlo seed");
        cmd->add_option("--mc-guard", guard, "singularity guard radius (default 1e-12)");
        cmd->add_option("--mass-smooth-p", smoothP, "mass probe smoothing exponent (default 64)");
        cmd->add_flag("--quiet", quiet, "suppress the summary");
    };
    CLI::App* run = app.add_subcommand("run", "compute the height and write a report");
    addCommon(run);
    run->add_option("--checks", checks, "comma-separated oracle checks: mahler,mc,mass");
    run->add_option("--report", reportPath, "write the JSON report here");
    CLI::App* verify = app.add_subcommand("verify", "run the invariant battery");
    addCommon(verify);

    CLI11_PARSE(app, argc, argv);

    try {
        Problem prob = load_problem(path);
        if (!mode.empty()) prob.mode = mode;
        if (samples > 0) prob.mc.samples = samples;
        if (seed >= 0) prob.mc.seed = static_cast<uint64_t>(seed);
        if (guard > 0) prob.mc.guard = guard;
        if (smoothP > 0) prob.mc.smoothP = smoothP;
        if (!checks.empty()) {
            prob.checks.clear();
            std::stringstream ss(checks);
            std::string tok;
            while (std::getline(ss, tok, ','))
                if (!tok.empty()) prob.checks.push_back(tok);
        }
        if (app.got_subcommand(run)) return cmd_run(prob, reportPath, quiet);
        return cmd_verify(prob, quiet);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const InternalError& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
