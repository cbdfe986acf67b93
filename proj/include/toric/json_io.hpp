#pragma once

// Problem-file parsing and report serialization. The report schema is
// versioned ("schema": 1); log-linear numbers serialize as
// {"log_coeffs": {"2": "1/2"}, "approx": 0.3466}. Reports are deterministic
// apart from the "timestamp" field, which comparisons must exclude.

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "toric/config.hpp"
#include "toric/height.hpp"
#include "toric/oracle.hpp"

namespace toric {

using json = nlohmann::ordered_json;

struct McOptions {
    long samples = 100000;
    uint64_t seed = 42;
    double guard = 1e-12;   // singularity-guard radius for the polycircle MC
    double smoothP = 64.0;  // smoothing exponent of the mass probe
};

struct Problem {
    PointConfig rawConfig;        // as given, before validation
    std::vector<std::string> alphaText;
    Coefficients alpha;           // exact mode
    std::vector<double> moduli;   // float mode
    std::string mode = "exact";   // "exact" | "float"
    McOptions mc;
    std::vector<std::string> checks;  // subset of {"mahler", "mc", "mass"}
};

inline Rat parse_rational(const std::string& s) {
    Rat q;
    if (mpq_set_str(q.get_mpq_t(), s.c_str(), 10) != 0)
        throw ValidationError("malformed rational '" + s + "'");
    if (q.get_den() == 0) throw ValidationError("zero denominator in '" + s + "'");
    q.canonicalize();
    return q;
}

inline Problem parse_problem(const json& j) {
    Problem p;
    if (!j.contains("d") || !j.contains("n") || !j.contains("points") || !j.contains("alpha"))
        throw ValidationError("problem file must contain d, n, points, alpha");
    p.rawConfig.d = j.at("d").get<int>();
    int n = j.at("n").get<int>();
    if (p.rawConfig.d < 0 || n < 0) throw ValidationError("d and n must be nonnegative");
    const auto& pts = j.at("points");
    if (static_cast<int>(pts.size()) != n + 1)
        throw ValidationError("points must list n+1 rows");
    for (const auto& row : pts) {
        if (static_cast<int>(row.size()) != p.rawConfig.d)
            throw ValidationError("each point must have d coordinates");
        IVec v;
        for (const auto& x : row) v.emplace_back(x.get<long>());
        p.rawConfig.points.push_back(std::move(v));
    }
    const auto& al = j.at("alpha");
    if (static_cast<int>(al.size()) != n + 1) throw ValidationError("alpha must list n+1 values");
    p.mode = j.value("mode", std::string("exact"));
    if (p.mode != "exact" && p.mode != "float")
        throw ValidationError("mode must be \"exact\" or \"float\"");
    for (const auto& a : al) {
        std::string s = a.is_string() ? a.get<std::string>() : a.dump();
        p.alphaText.push_back(s);
        if (p.mode == "exact") {
            Rat q = parse_rational(s);
            if (q == 0) throw ValidationError("alpha entries must be nonzero");
            p.alpha.values.push_back(q);
            p.moduli.push_back(std::abs(mpq_get_d(q.get_mpq_t())));
        } else {
            // float mode accepts "p/q" fractions and decimal literals
            double v;
            if (s.find('/') != std::string::npos) v = mpq_get_d(parse_rational(s).get_mpq_t());
            else {
                try {
                    v = std::stod(s);
                } catch (const std::exception&) {
                    throw ValidationError("malformed number '" + s + "'");
                }
            }
            if (v == 0.0) throw ValidationError("alpha entries must be nonzero");
            p.moduli.push_back(std::abs(v));
        }
    }
    if (j.contains("mc")) {
        p.mc.samples = j.at("mc").value("samples", 100000L);
        p.mc.seed = j.at("mc").value("seed", static_cast<uint64_t>(42));
        p.mc.guard = j.at("mc").value("guard", 1e-12);
        p.mc.smoothP = j.at("mc").value("smooth_p", 64.0);
        if (p.mc.samples < 10000) throw ValidationError("mc.samples must be at least 10^4");
    }
    if (j.contains("checks"))
        for (const auto& c : j.at("checks")) p.checks.push_back(c.get<std::string>());
    return p;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot read problem file " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ValidationError(std::string("problem file is not valid JSON: ") + e.what());
    }
    return parse_problem(j);
}

// --- serialization helpers -------------------------------------------------

inline json to_json(const LogLinearNumber& x) {
    json coeffs = json::object();
    for (const auto& [p, q] : x.coeffs()) coeffs[p.get_str()] = q.get_str();
    return json{{"log_coeffs", std::move(coeffs)}, {"approx", x.approx()}};
}

inline json to_json(const ApproxLog& x) { return json{{"approx", x.approx()}}; }

inline json to_json(const IVec& v) {
    json a = json::array();
    for (const Int& x : v) a.push_back(x.get_str());
    return a;
}

inline json points_json(const std::vector<IVec>& pts) {
    json a = json::array();
    for (const auto& p : pts) {
        json row = json::array();
        for (const Int& x : p) row.push_back(static_cast<long>(x.get_si()));
        a.push_back(std::move(row));
    }
    return a;
}

template <TropicalScalar S>
json to_json(const TropicalVertex<S>& v) {
    json coords = json::array();
    for (const auto& c : v.coords) coords.push_back(to_json(c));
    json pairs = json::array();
    for (auto [i, j] : v.pairSet) pairs.push_back(json::array({i, j}));
    return json{{"coords", std::move(coords)},
                {"active_indices", v.activeIndices},
                {"pair_set", std::move(pairs)},
                {"local_config", points_json(v.localPoints)},
                {"mass", static_cast<long>(v.localDegree.get_si())},
                {"local_lattice_index", static_cast<long>(v.localIndex.get_si())}};
}

template <TropicalScalar S>
json to_json(const CurrentMeasure<S>& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms) atoms.push_back(to_json(a));
    return json{{"atoms", std::move(atoms)},
                {"total_mass", static_cast<long>(m.totalMass.get_si())},
                {"degree", static_cast<long>(m.degree.get_si())},
                {"merged_duplicates", m.mergedDuplicates}};
}

inline json to_json(const MCEstimate& e) {
    return json{{"mean", e.mean},
                {"stderr", e.stderr_},
                {"samples", e.samples},
                {"seed", e.seed},
                {"rejected", e.rejected}};
}

inline json chain_step_json(const ChainStep& st, const StepEvaluation<LogLinearNumber>* ev) {
    json out{{"index", st.stepIndex},
             {"config", points_json(st.configA.points)},
             {"lift", points_json(st.configLift.points)},
             {"kappa", st.sd.kappa.get_str()},
             {"lattice_index", st.sd.latticeIndex.get_str()},
             {"sat_config", points_json(st.sd.satConfig.points)},
             {"lambda", to_json(st.sd.lambda)},
             {"c", to_json(st.sd.c)},
             {"k", st.sd.k.get_str()},
             {"prefactor_exponents", to_json(st.sd.prefactorExp)},
             {"prefactor_split",
              json{{"plus", st.sd.prefSplitPlus.get_str()}, {"minus", st.sd.prefSplitMinus.get_str()}}}};
    if (ev) {
        out["prefactor_log"] = to_json(ev->prefactorLog);
        out["measure"] = to_json(ev->measure);
        json contribs = json::array();
        for (const auto& c : ev->contributions) contribs.push_back(to_json(c));
        out["contributions"] = std::move(contribs);
        out["step_height"] = to_json(ev->stepHeight);
    }
    return out;
}

inline json report_json(const Problem& prob, const HeightReport& rep) {
    json steps = json::array();
    for (size_t i = 0; i < rep.chain.size(); ++i)
        steps.push_back(chain_step_json(rep.chain[i], &rep.evaluations[i]));

    json gens = json::array();
    for (const auto& g : rep.generators) {
        gens.push_back(json{{"w", to_json(g.w())},
                            {"wplus", to_json(g.wplus)},
                            {"wminus", to_json(g.wminus)}});
    }
    json height{{"log_coeffs", to_json(rep.height.inPrimes)["log_coeffs"]},
                {"approx", rep.height.inPrimes.approx()},
                {"enclosure", json::array({rep.height.enclosure.first, rep.height.enclosure.second})}};
    if (rep.height.hasAlphaBasis) {
        json b = json::array();
        for (const Rat& q : rep.height.alphaBasis) b.push_back(q.get_str());
        height["alpha_basis"] = json{{"b", std::move(b)}, {"all_integers", rep.height.allIntegral}};
    } else {
        height["alpha_basis"] = nullptr;
    }

    json findings = json::array();
    for (const auto& f : rep.findings) findings.push_back(json{{"kind", f.kind}, {"detail", f.detail}});

    json out{{"schema", 1},
             {"mode", "exact"},
             {"input",
              json{{"d", prob.rawConfig.d},
                   {"n", prob.rawConfig.n()},
                   {"points", points_json(prob.rawConfig.points)},
                   {"alpha", prob.alphaText},
                   {"mc", json{{"samples", prob.mc.samples},
                               {"seed", prob.mc.seed},
                               {"guard", prob.mc.guard},
                               {"smooth_p", prob.mc.smoothP}}},
                   {"checks", prob.checks}}},
             {"config", points_json(rep.config.points)},
             {"generators", std::move(gens)},
             {"degree", static_cast<long>(rep.degree.get_si())},
             {"chain", std::move(steps)},
             {"height", std::move(height)},
             {"normalization_K_over_Q", rep.degreeOverQ},
             {"findings", std::move(findings)}};
    if (rep.rawTopMeasure) out["current_measure"] = to_json(*rep.rawTopMeasure);
    return out;
}

// Runs the oracle checks named in the problem's `checks` list against a
// computed report, appending structured findings on disagreement. Used by
// the CLI `run` command and the acceptance suite.
inline json run_oracle_checks(const Problem& prob, HeightReport& rep) {
    json oracles = json::object();
    auto enabled = [&](const std::string& name) {
        for (const auto& c : prob.checks)
            if (c == name) return true;
        return false;
    };
    std::vector<LogLinearNumber> logAlpha;
    for (const Rat& a : rep.alpha.values) logAlpha.push_back(LogLinearNumber::log_abs(a));

    if (enabled("mahler")) {
        if (rep.config.n() == rep.config.d + 1) {
            auto m = mahler_hypersurface_height(rep.config, rep.alpha, prob.mc.samples, prob.mc.seed);
            double engine = rep.height.inPrimes.approx();
            double tol = std::max(3.0 * m.arch.stderr_, 1e-3);
            bool agree = std::abs(engine - m.total) <= tol;
            oracles["mahler"] = json{{"arch", to_json(m.arch)},   {"finite_term", m.finiteTerm},
                                     {"total", m.total},          {"engine", engine},
                                     {"tolerance", tol},          {"agree", agree},
                                     {"u", m.u.get_str()},        {"v", m.v.get_str()}};
            if (!agree)
                rep.findings.push_back(
                    {"mahler-discrepancy",
                     "engine height " + std::to_string(engine) + " vs Mahler oracle " +
                         std::to_string(m.total) +
                         "; candidate finite-place contribution of the integral model "
                         "(vertical components of div(s) are not part of the computed formula)"});
        } else {
            oracles["mahler"] = json{{"skipped", "input is not a hypersurface"}};
        }
    }
    if (enabled("mc")) {
        json comps = json::array();
        uint32_t stream = 100;
        for (size_t j = 0; j < rep.chain.size(); ++j) {
            const auto& st = rep.chain[j];
            const auto& ev = rep.evaluations[j];
            for (size_t i = 0; i < ev.measure.atoms.size(); ++i) {
                auto mc = mc_polycircle(ev.measure.atoms[i], st.sd, st.sd.satConfig, logAlpha,
                                        prob.mc.samples, prob.mc.seed, stream++, prob.mc.guard);
                double cf = ev.contributions[i].approx();
                bool agree = std::abs(cf - mc.mean) <= 3.0 * mc.stderr_;
                comps.push_back(json{{"step", st.stepIndex},
                                     {"vertex", i},
                                     {"closed_form", cf},
                                     {"mc", to_json(mc)},
                                     {"agree", agree}});
                if (!agree)
                    rep.findings.push_back({"mc-disagreement",
                                            "step " + std::to_string(st.stepIndex) + " vertex " +
                                                std::to_string(i) + ": |closed form - MC| > 3 stderr"});
            }
        }
        oracles["mc_vertices"] = std::move(comps);
    }
    if (enabled("mass")) {
        if (!rep.chain.empty() && rep.chain[0].configLift.d <= 3) {
            std::vector<double> la;
            for (const auto& x : logAlpha) la.push_back(x.approx());
            auto mp = mass_probe(rep.chain[0].configLift, la, prob.mc.samples, prob.mc.seed,
                                 prob.mc.smoothP);
            double deg = mpz_get_d(rep.rawTopMeasure->degree.get_mpz_t());
            bool agree = std::abs(mp.mean - deg) <= 0.1 * std::max(1.0, deg);
            oracles["mass_probe"] = json{{"estimate", to_json(mp)}, {"degree", deg}, {"agree", agree}};
            if (!agree)
                rep.findings.push_back(
                    {"mass-probe-disagreement",
                     "smoothed Monge-Ampere mass differs from the toric degree by more than 10%"});
        } else {
            oracles["mass_probe"] = json{{"skipped", "no lift or dimension above 3"}};
        }
    }
    return oracles;
}

inline json float_report_json(const Problem& prob, const FloatHeightReport& rep) {
    json steps = json::array();
    for (size_t i = 0; i < rep.chain.size(); ++i)
        steps.push_back(chain_step_json(rep.chain[i], nullptr));
    json out{{"schema", 1},
             {"mode", "float"},
             {"approximate", true},
             {"input",
              json{{"d", prob.rawConfig.d},
                   {"n", prob.rawConfig.n()},
                   {"points", points_json(prob.rawConfig.points)},
                   {"alpha", prob.alphaText},
                   {"mc", json{{"samples", prob.mc.samples},
                               {"seed", prob.mc.seed},
                               {"guard", prob.mc.guard},
                               {"smooth_p", prob.mc.smoothP}}},
                   {"checks", prob.checks}}},
             {"config", points_json(rep.config.points)},
             {"chain", std::move(steps)},
             {"height", json{{"approx", rep.height}}},
             {"step_heights", rep.stepHeights},
             {"findings", json::array({json{{"kind", "approximate-mode"},
                                            {"detail", "float mode: no exactness claims"}}})}};
    return out;
}

}  // namespace toric
