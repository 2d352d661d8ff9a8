// pdlkit command-line entry point.
// Exit codes: 0 positive verdict / success, 1 negative verdict,
// 2 usage or shape error, 3 bound exceeded.
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "pdlkit/atm.hpp"
#include "pdlkit/calculus.hpp"
#include "pdlkit/cutelim.hpp"
#include "pdlkit/errors.hpp"
#include "pdlkit/expansion.hpp"
#include "pdlkit/formula.hpp"
#include "pdlkit/json_ast.hpp"
#include "pdlkit/ordinal.hpp"
#include "pdlkit/prover.hpp"
#include "pdlkit/qbf.hpp"
#include "pdlkit/semantics.hpp"

namespace {

using nlohmann::json;
using namespace pdl;

constexpr int kPositive = 0;
constexpr int kNegative = 1;
constexpr int kShape = 2;
constexpr int kBound = 3;

// Default search bounds; PDLKIT_BOUNDS="frame=3,clauses=50000" overrides.
struct Bounds {
    int frame = 3;
    int depth = 8;
    int cap = 12;
    std::size_t clauses = 1'000'000;
    std::size_t configs = 100'000;
    std::size_t states = 200'000;
    int universals = 20;
};

Bounds loadBounds() {
    Bounds b;
    const char* env = std::getenv("PDLKIT_BOUNDS");
    if (!env) return b;
    std::stringstream ss(env);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        auto eq = item.find('=');
        if (eq == std::string::npos) throw ShapeError("PDLKIT_BOUNDS: expected key=value, got '" + item + "'");
        std::string key = item.substr(0, eq);
        long long v = 0;
        try {
            v = std::stoll(item.substr(eq + 1));
        } catch (const std::exception&) {
            throw ShapeError("PDLKIT_BOUNDS: bad number in '" + item + "'");
        }
        if (v <= 0) throw ShapeError("PDLKIT_BOUNDS: bounds must be positive ('" + item + "')");
        if (key == "frame") b.frame = static_cast<int>(v);
        else if (key == "depth") b.depth = static_cast<int>(v);
        else if (key == "cap") b.cap = static_cast<int>(v);
        else if (key == "clauses") b.clauses = static_cast<std::size_t>(v);
        else if (key == "configs") b.configs = static_cast<std::size_t>(v);
        else if (key == "states") b.states = static_cast<std::size_t>(v);
        else if (key == "universals") b.universals = static_cast<int>(v);
        else throw ShapeError("PDLKIT_BOUNDS: unknown key '" + key + "'");
    }
    return b;
}

json readJson(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ShapeError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ShapeError(path + ": " + e.what());
    }
}

void writeText(const std::string& path, const std::string& text) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw ShapeError("cannot write " + path);
    out << text;
}

void writeJson(const std::string& path, const json& j) { writeText(path, j.dump(2) + "\n"); }

json renderAll(const Sequent& s) {
    json a = json::array();
    for (auto f : s) a.push_back(render(f));
    return a;
}

json fragmentsOf(Formula f) {
    json a = json::array();
    for (auto fr : classify_fragment(f)) a.push_back(fragment_name(fr));
    return a;
}

json bcnfJson(const BcnfShape& s) {
    json rows = json::array();
    for (const auto& r : s.rows) {
        json row;
        row["B"] = r.B ? json(render(*r.B)) : json(nullptr);
        row["C"] = r.C ? json(render(*r.C)) : json(nullptr);
        row["D"] = renderAll(r.D);
        rows.push_back(row);
    }
    return {{"program", render(s.prog)}, {"rows", rows}};
}

json bdnfJson(const BdnfShape& s) {
    auto rowsOf = [](const std::vector<BdnfRow>& rs) {
        json a = json::array();
        for (const auto& r : rs)
            a.push_back({{"guard", r.guard ? json(render(*r.guard)) : json(nullptr)}, {"body", render(r.body)}});
        return a;
    };
    return {{"program", render(s.prog)},
            {"F", s.F ? json(render(*s.F)) : json(nullptr)},
            {"box_rows", rowsOf(s.boxRows)},
            {"dia_rows", rowsOf(s.diaRows)}};
}

SystemSpec systemSpec(const std::string& name, bool cut, bool upgraded) {
    return SystemSpec{system_from_name(name), cut, upgraded};
}

// Every subcommand writes its result through one of these.
struct Out {
    bool asJson = false;
    int emit(const json& j, const std::string& text, int code) const {
        if (asJson)
            std::cout << j.dump(2) << "\n";
        else
            std::cout << text << "\n";
        return code;
    }
};

// ---- subcommands ----

int cmdParse(const std::string& text, const std::string& shape, const Out& out) {
    Sequent s = parse_sequent(text);
    json j;
    j["sequent"] = renderAll(s);
    j["ast"] = to_json_ast(s);
    j["plain_complexity"] = sequent_size(s);
    j["fragments"] = json::array();
    for (auto f : s) j["fragments"].push_back(fragmentsOf(f));
    std::string txt = render(s);
    if (!shape.empty()) {
        if (s.size() != 1) throw ShapeError("--shape needs a single formula");
        if (shape == "bcnf") j["bcnf"] = bcnfJson(recognize_bcnf(s[0]));
        else if (shape == "bdnf") j["bdnf"] = bdnfJson(recognize_bdnf(s[0]));
        else throw ShapeError("--shape must be bcnf or bdnf");
        txt += "\n" + j[shape].dump();
    }
    return out.emit(j, txt, kPositive);
}

int cmdNegate(const std::string& text, const Out& out) {
    Formula f = parse_formula(text);
    Formula g = seq_negate(f);
    return out.emit({{"formula", render(f)}, {"negation", render(g)}}, render(g), kPositive);
}

int cmdOrdinal(const std::string& text, const Out& out) {
    Sequent s = parse_sequent(text);
    Ordinal o = s.size() == 1 ? o_complexity(s[0]) : o_complexity(s);
    return out.emit({{"input", render(s)}, {"ordinal", render(o)}}, render(o), kPositive);
}

int cmdProve(const std::string& text, const std::string& system, const std::string& derivOut, bool emitTrace,
             const Out& out) {
    Sequent s = parse_sequent(text);
    System sys = system_from_name(system);
    if (sys != System::Seq00 && sys != System::Seq0)
        throw ShapeError("prove searches seq00 or seq0 only; use check or decide-* for starred systems");
    ProveResult r = prove(s, sys);
    if (r.proved && !derivOut.empty()) writeJson(derivOut, derivation_to_json(r.deriv));
    json j{{"sequent", render(s)},
           {"system", system_name(sys)},
           {"verdict", r.proved ? "proved" : "refuted"},
           {"stats",
            {{"nodes", r.stats.nodes},
             {"peak_path", r.stats.peakPath},
             {"peak_sequent", r.stats.peakSequent},
             {"depth_bound", r.stats.depthBound}}}};
    std::string txt = r.proved ? "proved" : "refuted";
    if (emitTrace && !r.proved) {
        j["trace"] = trace_to_json(r.trace);
        txt += "\n" + r.trace_string();
    }
    if (r.proved) j["height"] = height(r.deriv);
    return out.emit(j, txt, r.proved ? kPositive : kNegative);
}

int cmdCheck(const std::string& path, const std::string& system, bool cut, bool upgraded, const Out& out) {
    DerivPtr d = derivation_from_json(readJson(path));
    CheckResult r = check(systemSpec(system, cut, upgraded), d);
    json j{{"valid", r.valid}, {"endsequent", render(d->seq)}, {"height", render(d->ord)}};
    if (!r.valid) {
        j["reason"] = r.reason;
        j["node"] = renderAll(r.node->seq);
    }
    return out.emit(j, r.valid ? "valid" : "invalid: " + r.reason, r.valid ? kPositive : kNegative);
}

struct InvertArgs {
    std::string path, kind, target, extra, program, progs, columns, output = "-";
    int depth = -1;
};

int cmdInvert(const InvertArgs& a, const Out& out) {
    DerivPtr d = annotate(SystemSpec{System::Seq1, false, true}, derivation_from_json(readJson(a.path)));
    json j;
    DerivPtr res;
    if (a.kind == "pinv") {
        if (a.program.empty()) throw ShapeError("pinv needs --program");
        PInvResult r = p_invert(d, parse_program(a.program));
        res = r.deriv;
        j["result"] = r.side ? "side" : "box";
        if (!r.side) j["box_index"] = r.boxIndex;
    } else {
        Transform t = transform_from_name(a.kind);
        TransformArgs ta;
        if (!a.target.empty()) ta.target = parse_formula(a.target);
        if (!a.extra.empty()) ta.extra = parse_sequent(a.extra);
        ta.depth = a.depth;
        if (t == Transform::GenVec) {
            std::stringstream ps(a.progs);
            std::string tok;
            while (std::getline(ps, tok, ',')) ta.progs.push_back(parse_program(tok));
            json cols = a.columns.empty() ? json::array() : json::parse(a.columns);
            ta.columns = cols.get<std::vector<std::vector<int>>>();
        }
        res = apply_transform(t, d, ta);
    }
    j["endsequent"] = renderAll(res->seq);
    j["height_in"] = render(d->ord);
    j["height_out"] = render(res->ord);
    if (a.output != "-") writeJson(a.output, derivation_to_json(res));
    else j["derivation"] = derivation_to_json(res);
    std::string txt = render(res->seq) + "\nheight " + render(d->ord) + " -> " + render(res->ord);
    if (a.output == "-" && !out.asJson) txt += "\n" + derivation_to_json(res).dump(2);
    return out.emit(j, txt, kPositive);
}

int cmdExpand(const std::string& text, int k, const Out& out) {
    Sequent s = parse_sequent(text);
    StarredExpr e = split_starred(s);
    Sequent pi;
    if (e.Z) pi.push_back(*e.Z);
    if (k < 0) {
        BcneInstance inst = bcne_instance(s);
        k = bcnf_bound(inst.shape) + 1;
    }
    Sequent x = expand(e.A, pi, k, e.prog);
    return out.emit({{"k", k}, {"expansion", renderAll(x)}, {"size", sequent_size(x)}}, render(x), kPositive);
}

int cmdDecideBcne(const std::string& text, bool emitExpansion, const std::string& refOut, const Out& out) {
    BcneInstance inst = bcne_instance(parse_sequent(text));
    BcneDecision d = decide_bcne(inst);
    json j{{"verdict", d.valid ? "valid" : "invalid"}, {"n", d.bound}, {"bcnf", bcnfJson(inst.shape)}};
    std::string txt = d.valid ? "valid" : "invalid";
    if (emitExpansion) {
        j["expansion"] = renderAll(d.expansion);
        txt += "\n" + render(d.expansion);
    }
    if (!refOut.empty()) {
        if (d.valid) throw ShapeError("no refutation tree: the expression is valid");
        auto t = build_refutation_tree(inst.shape, inst.pi, d.bound + 1);
        if (!t) throw std::logic_error("refutation tree missing for an invalid instance");
        writeJson(refOut, refutation_to_json(*t));
        j["refutation_height"] = tree_height(*t);
    }
    return out.emit(j, txt, d.valid ? kPositive : kNegative);
}

int cmdDecideBdne(const std::string& text, const std::string& via, const std::string& qdimacs, const Bounds& b,
                  const Out& out) {
    BdneInstance inst = bdne_instance(parse_sequent(text));
    BdneDecision d = decide_bdne(inst, via_from_name(via));
    json j{{"verdict", d.valid ? "valid" : "invalid"},
           {"via", via},
           {"n", d.n},
           {"xi_count", d.xiCount},
           {"s", d.converted.s},
           {"t", d.converted.t}};
    if (!qdimacs.empty()) {
        QdimacsExport ex = export_qdimacs(emit_qbf(inst), b.clauses);
        writeText(qdimacs, ex.text);
        j["qdimacs"] = {{"universals", ex.universals}, {"gates", ex.gates}, {"clauses", ex.clauses}};
    }
    return out.emit(j, d.valid ? "valid" : "invalid", d.valid ? kPositive : kNegative);
}

int cmdEmitQbf(const std::string& text, const std::string& output, const std::string& qdimacs, const Bounds& b,
               const Out& out) {
    BdneInstance inst = bdne_instance(parse_sequent(text));
    QbfFormula q = emit_qbf(inst);
    bool value = qbf_eval(q);
    json j{{"value", value},
           {"dag_size", q.dag_size()},
           {"tree_size", static_cast<double>(q.tree_size())},
           {"leaves", q.leaf_count()},
           {"nodes", q.nodes.size()}};
    if (!output.empty()) writeJson(output, qbf_to_json(q));
    if (!qdimacs.empty()) {
        QdimacsExport ex = export_qdimacs(q, b.clauses);
        writeText(qdimacs, ex.text);
        j["qdimacs"] = {{"universals", ex.universals}, {"gates", ex.gates}, {"clauses", ex.clauses}};
    }
    std::ostringstream txt;
    txt << (value ? "true" : "false") << "\ndag size " << q.dag_size() << ", leaves " << q.leaf_count();
    return out.emit(j, txt.str(), value ? kPositive : kNegative);
}

struct AtmArgs {
    std::string path;
    bool negate = false, repairEnds = false, repairMove = false, simulate = false, search = false;
};

int cmdEncodeAtm(const AtmArgs& a, const Bounds& b, const Out& out) {
    AtmSpec m = atm_from_json(readJson(a.path));
    EncodeOptions opts{a.repairEnds, a.repairMove};
    json j;
    std::string txt;
    if (a.negate) {
        NegationBdne n = encode_negation_bdne(m, opts);
        j = {{"formula", render(n.formula)},
             {"size", n.formula.size()},
             {"alpha_rows", n.alphaRows},
             {"beta_rows", n.betaRows},
             {"gamma_rows", n.gammaRows}};
        txt = render(n.formula);
    } else {
        AcceptsFormula f = encode_accepts(m, opts);
        j = {{"formula", render(f.formula)}, {"size", f.formula.size()}};
        txt = render(f.formula);
    }
    int code = kPositive;
    if (a.simulate) {
        Simulation s = simulate_atm(m, b.configs);
        if (s.verdict == AtmVerdict::Bound) throw BoundError("simulation exceeded " + std::to_string(b.configs) + " configurations");
        j["simulation"] = {{"verdict", verdict_name(s.verdict)}, {"configs", s.configs}, {"cyclic", s.cyclic}};
        txt += "\nsimulation: " + verdict_name(s.verdict);
        code = s.verdict == AtmVerdict::Accepts ? kPositive : kNegative;
    }
    if (a.search) {
        ModelSearch s = accepts_model_search(m, opts, b.states);
        j["model_search"] = {{"satisfiable", s.satisfiable}, {"candidates", s.candidates}, {"worlds", s.worlds}};
        txt += std::string("\nmodel search: ") + (s.satisfiable ? "satisfiable" : "unsatisfiable");
        if (!a.simulate) code = s.satisfiable ? kPositive : kNegative;
    }
    return out.emit(j, txt, code);
}

int cmdCountermodel(const std::string& text, const Bounds& b, const Out& out) {
    Sequent s = parse_sequent(text);
    bool starred = false;
    for (auto f : s) starred = starred || f.has_star();
    Verdict v;
    std::string method;
    if (!starred) {
        v = sequent_valid(s);
        method = "tableau";
    } else {
        std::optional<BcneInstance> inst;
        try {
            inst = bcne_instance(s);
        } catch (const ShapeError&) {
        }
        if (inst && inst->body.modal_depth() <= 1) {
            v = star_closure_valid(inst->body, inst->pi.empty() ? std::nullopt : std::optional<Formula>(inst->pi[0]),
                                   inst->shape.prog);
            method = "star-closure";
        } else {
            v = sequent_valid_bounded(s, b.frame, b.depth);
            method = "frame-enumeration";
        }
    }
    json j{{"sequent", render(s)}, {"method", method}, {"authoritative", v.authoritative}};
    if (!v.valid) {
        j["countermodel"] = frame_to_json(*v.frame);
        j["world"] = v.world;
        return out.emit(j, "countermodel at world " + std::to_string(v.world) + "\n" + frame_to_json(*v.frame).dump(2),
                        kPositive);
    }
    j["countermodel"] = nullptr;
    return out.emit(j, v.authoritative ? "no countermodel (valid)" : "no countermodel within bounds", kNegative);
}

int cmdCutelim(const std::string& path, const std::string& output, bool trace, const Out& out) {
    DerivPtr d = derivation_from_json(readJson(path));
    SystemSpec withCut{System::Seq0, true, true};
    d = annotate(withCut, d);
    if (auto c = check(withCut, d); !c) throw ShapeError("input derivation invalid: " + c.reason);
    EliminationReport rep;
    DerivPtr e = eliminate(d, &rep);
    if (!output.empty()) writeJson(output, derivation_to_json(e));
    json j = report_to_json(rep);
    j["cut_free"] = cut_free(e);
    j["endsequent"] = renderAll(e->seq);
    if (trace)
        for (const auto& s : rep.steps)
            std::cerr << "R[" << s.reductionCase << "] cut " << render(s.cut) << ": deg " << render(s.degBefore) << " -> "
                      << render(s.degAfter) << ", h " << render(s.h1) << " # " << render(s.h2) << " -> "
                      << render(s.hOut) << " (< " << render(s.heightBound) << ")\n";
    std::string txt = "cut-free, deg " + render(rep.degIn) + " -> 0, height " + render(rep.hIn) + " -> " +
                      render(rep.hOut) + " (bound " + render(rep.bound) + ")";
    return out.emit(j, txt, kPositive);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"pdlkit: sequent calculi, decision procedures and cut elimination for PDL"};
    app.require_subcommand(1);
    Out out;
    app.add_flag("--json", out.asJson, "structured output on stdout");

    std::string text, path, system = "seq00", shape, derivOut, output, via = "f", qdimacs, refOut;
    bool emitTrace = false, cut = false, upgraded = false, emitExpansion = false, trace = false;
    int k = -1;
    InvertArgs inv;
    AtmArgs atm;

    // --json is accepted on every subcommand as well as globally
    auto sub = [&](const char* name, const char* desc) {
        auto* s = app.add_subcommand(name, desc);
        s->add_flag("--json", out.asJson, "structured output on stdout");
        return s;
    };

    auto* parse = sub("parse", "parse a sequent; print rendering, AST, fragments");
    parse->add_option("sequent", text)->required();
    parse->add_option("--shape", shape, "recognize bcnf or bdnf");
    auto* negate = sub("negate", "seq-negation of a formula");
    negate->add_option("formula", text)->required();
    auto* ordinal = sub("ordinal", "o-complexity");
    ordinal->add_option("formula", text)->required();
    auto* prove = sub("prove", "proof search (exit 0 proved, 1 refuted)");
    prove->add_option("sequent", text)->required();
    prove->add_option("--system", system, "seq00 or seq0")->capture_default_str();
    prove->add_option("--emit-derivation", derivOut, "write the derivation JSON");
    prove->add_flag("--emit-trace", emitTrace, "print the failing path when refuted");
    auto* checkCmd = sub("check", "check a derivation JSON");
    checkCmd->add_option("derivation", path)->required();
    checkCmd->add_option("--system", system, "seq00, seq0, seq10 or seq1")->capture_default_str();
    checkCmd->add_flag("--cut", cut, "allow cuts");
    checkCmd->add_flag("--upgraded", upgraded, "allow upgraded rules");
    auto* invert = sub("invert", "apply an admissible transformation or p-inversion");
    invert->add_option("derivation", inv.path)->required();
    invert->add_option("--kind", inv.kind, "W, C, OrInv, AndInv1, ..., GenVec or pinv")->required();
    invert->add_option("--target", inv.target, "target formula occurrence");
    invert->add_option("--extra", inv.extra, "weakening context for W");
    invert->add_option("--depth", inv.depth, "modal prefix depth");
    invert->add_option("--program", inv.program, "atomic program for pinv");
    invert->add_option("--programs", inv.progs, "comma-separated programs for GenVec");
    invert->add_option("--columns", inv.columns, "JSON array of 0/1 columns for GenVec");
    invert->add_option("-o,--output", inv.output, "output derivation JSON (default stdout)");
    auto* expandCmd = sub("expand", "Herbrand expansion of <p*>A, Pi");
    expandCmd->add_option("sequent", text)->required();
    expandCmd->add_option("-k", k, "depth (default n+1 for BCNF bodies)");
    auto* bcne = sub("decide-bcne", "decide <p*>A | Z with A in BCNF");
    bcne->add_option("expression", text)->required();
    bcne->add_flag("--emit-expansion", emitExpansion);
    bcne->add_option("--emit-refutation", refOut, "write the refutation tree JSON");
    auto* bdne = sub("decide-bdne", "decide <p*>A | Z with A in BDNF");
    bdne->add_option("expression", text)->required();
    bdne->add_option("--via", via, "f, expansion or qbf")->capture_default_str();
    bdne->add_option("--emit-qdimacs", qdimacs, "write QDIMACS");
    auto* qbf = sub("emit-qbf", "QBF for a BDNE");
    qbf->add_option("expression", text)->required();
    qbf->add_option("-o,--output", output, "write the QBF DAG JSON");
    qbf->add_option("--qdimacs", qdimacs, "write QDIMACS");
    auto* encAtm = sub("encode-atm", "encode an alternating TM");
    encAtm->add_option("spec", atm.path)->required();
    encAtm->add_flag("--negate", atm.negate, "emit the BDNE of the negation");
    encAtm->add_flag("--repair-endmarkers", atm.repairEnds);
    encAtm->add_flag("--repair-move", atm.repairMove);
    encAtm->add_flag("--simulate", atm.simulate, "run the machine; exit code from its verdict");
    encAtm->add_flag("--search", atm.search, "bounded model search for the acceptance formula");
    auto* cm = sub("countermodel", "search a countermodel (exit 0 found, 1 none)");
    cm->add_option("sequent", text)->required();
    auto* ce = sub("cutelim", "eliminate cuts from a derivation JSON");
    ce->add_option("derivation", path)->required();
    ce->add_option("-o,--output", output, "write the cut-free derivation");
    ce->add_flag("--trace", trace, "log each reduction on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kShape;
    }

    try {
        Bounds b = loadBounds();
        if (*parse) return cmdParse(text, shape, out);
        if (*negate) return cmdNegate(text, out);
        if (*ordinal) return cmdOrdinal(text, out);
        if (*prove) return cmdProve(text, system, derivOut, emitTrace, out);
        if (*checkCmd) return cmdCheck(path, system, cut, upgraded, out);
        if (*invert) return cmdInvert(inv, out);
        if (*expandCmd) return cmdExpand(text, k, out);
        if (*bcne) return cmdDecideBcne(text, emitExpansion, refOut, out);
        if (*bdne) return cmdDecideBdne(text, via, qdimacs, b, out);
        if (*qbf) return cmdEmitQbf(text, output, qdimacs, b, out);
        if (*encAtm) return cmdEncodeAtm(atm, b, out);
        if (*cm) return cmdCountermodel(text, b, out);
        if (*ce) return cmdCutelim(path, output, trace, out);
    } catch (const ShapeError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kShape;
    } catch (const BoundError& e) {
        std::cerr << "bound exceeded: " << e.what() << "\n";
        return kBound;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed JSON input: " << e.what() << "\n";
        return kShape;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kShape;
    }
    return kShape;
}
