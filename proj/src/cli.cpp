#include "jetsym/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"
#include "jetsym/catalog.hpp"
#include "jetsym/flows.hpp"
#include "jetsym/numeric.hpp"

namespace jetsym::cli {

namespace {

constexpr const char *kVersion = "1.0.0";

class UsageError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

std::string clip(const std::string &s, std::size_t n = 400)
{
    return s.size() <= n ? s : s.substr(0, n) + " ...";
}

std::string sci(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

std::map<std::string, std::string> parse_params(const std::vector<std::string> &raw)
{
    std::map<std::string, std::string> out;
    for (const auto &p : raw) {
        auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0)
            throw UsageError("--param expects KEY=VALUE, got '" + p + "'");
        out[p.substr(0, eq)] = p.substr(eq + 1);
    }
    return out;
}

struct Config {
    std::string command;
    std::string equation, family, name, flow, solution = "planewave", mode = "analytic", grid = "201x201";
    std::string potential, residual, solve_for, only, out_path, json_path, csv_path;
    std::string format = "text";
    std::vector<std::string> params, fields;
    int n = 0; // 0: command default
    int refinements = 0;
    double tol = 0;
    std::string case_id;
    int jobs = 1;
};

// Report output ----------------------------------------------------------------

nlohmann::ordered_json to_json(const Report &r)
{
    nlohmann::ordered_json j;
    j["version"] = kVersion;
    j["command"] = r.command;
    j["status"] = r.pass() ? "pass" : "fail";
    auto items = nlohmann::ordered_json::array();
    for (const auto &it : r.items)
        items.push_back({{"id", it.id}, {"section", it.section}, {"status", it.pass ? "pass" : "fail"},
                         {"detail", it.detail}});
    j["items"] = std::move(items);
    j["timing_ms"] = std::round(r.timing_ms * 1000) / 1000;
    return j;
}

std::string to_text(const Report &r)
{
    std::ostringstream os;
    std::size_t passed = 0;
    for (const auto &it : r.items) {
        passed += it.pass;
        os << (it.pass ? "PASS " : "FAIL ") << '[' << it.section << "] " << it.id;
        if (!it.detail.empty())
            os << ": " << it.detail;
        os << '\n';
    }
    os << r.command << ": " << passed << " passed, " << r.items.size() - passed << " failed ("
       << static_cast<long>(r.timing_ms) << " ms)\n";
    return os.str();
}

void write_file(const std::string &path, const std::string &text)
{
    std::ofstream f(path);
    if (!f)
        throw UsageError("cannot write " + path);
    f << text;
}

int emit(const Report &r, const Config &cfg, std::ostream &out)
{
    std::string body = cfg.format == "json" ? to_json(r).dump(2) + "\n" : to_text(r);
    out << body;
    if (!cfg.out_path.empty())
        write_file(cfg.out_path, body);
    if (!cfg.json_path.empty())
        write_file(cfg.json_path, to_json(r).dump(2) + "\n");
    return r.pass() ? 0 : 1;
}

// Shared check builders -------------------------------------------------------------

void add_family(Report &rep, const CatalogKey &key, int jobs, const std::string &tag, const std::string &note = {})
{
    std::string section = section_of(key.family);
    EquationSystem sys = build_equation(key);
    std::string notes = note;
    for (const auto &s : sys.notes)
        notes += (notes.empty() ? "" : "; ") + s;
    CheckReport r = check_family(build_family(key), sys, jobs);
    std::size_t before = rep.items.size();
    rep.add_grouped(section, tag, r);
    if (!notes.empty())
        for (std::size_t i = before; i < rep.items.size(); ++i)
            rep.items[i].detail += "; " + notes;
}

void add_negatives(Report &rep, const CatalogKey &key, const std::string &tag)
{
    std::string section = section_of(key.family);
    EquationSystem sys = build_equation(key);
    for (const auto &neg : build_negative_checks(key)) {
        CheckReport r = check_invariance(neg.field, sys);
        std::string detail = neg.reason;
        for (const auto &it : r.items)
            if (!it.zero) {
                detail += "; " + it.id + " leaves " + clip(it.residual, 160);
                break;
            }
        rep.add(section, tag + neg.field.name + " fails as expected", !r.pass, detail);
    }
}

void add_rejection(Report &rep, const std::string &section, const std::string &id, const CatalogKey &key)
{
    try {
        build_equation(key);
        build_family(key);
        rep.add(section, id, false, "builder accepted the key");
    } catch (const CatalogError &e) {
        rep.add(section, id, true, e.what());
    }
}

void add_closure(Report &rep, const CatalogKey &key, const std::string &tag)
{
    std::string section = section_of(key.family);
    auto gens = build_family(key);
    ClosureResult c = closure_check(gens);
    std::size_t failed = 0;
    std::string first;
    for (const auto &it : c.report.items)
        if (!it.zero && failed++ == 0)
            first = it.id + " = " + clip(it.residual, 200);
    rep.add(section, tag + "closure", c.report.pass,
            c.report.pass ? std::to_string(c.report.items.size()) + " brackets in the span, " +
                                std::to_string(c.constants.size()) + " nonzero structure constants"
                          : first);
    // a couple of sample expansions make the constants visible
    std::size_t shown = 0;
    for (const auto &it : c.report.items)
        if (it.zero && it.note != "0" && shown < 3) {
            rep.add(section, tag + it.id, true, "= " + it.note);
            ++shown;
        }
    CheckReport ids = bracket_identities(gens, 12, 7);
    rep.add(section, tag + "antisymmetry and Jacobi", ids.pass,
            std::to_string(ids.items.size()) + " sampled identities");
}

void add_flow(Report &rep, const std::string &section, const FlowKey &key)
{
    FlowMap f = build_flow(key);
    std::string tag = key.name + (key.n > 1 ? " n=" + std::to_string(key.n) : "") + " ";
    auto one = [&](const std::string &what, const CheckReport &r) {
        std::string detail = std::to_string(r.items.size()) + " identities reduce to 0";
        for (const auto &it : r.items)
            if (!it.zero) {
                detail = it.id + " leaves " + clip(it.residual, 200);
                break;
            }
        rep.add(section, tag + what, r.pass, detail);
    };
    one("Lie equations vs " + f.generator.name, verify_lie_equations(f));
    one("inverse", verify_inverse(f));
    one("group law", verify_group_law(f));
}

void add_numeric(Report &rep, const std::string &flow, const std::string &solution, bool fd, int jobs,
                 double tol = 1e-10)
{
    NumericProblem p = make_problem(flow, solution);
    Grid1D g;
    nlohmann::ordered_json rec{{"flow", flow}, {"solution", solution}, {"mode", fd ? "fd" : "analytic"},
                               {"grid", std::to_string(g.nt) + "x" + std::to_string(g.nx)}};
    if (!fd) {
        double r = residual_max(p, g, jobs);
        rec["residual_max"] = r;
        rec["ratios"] = nlohmann::ordered_json::array();
        rep.add("numeric", flow + " " + solution + " analytic", r <= tol, rec.dump());
        return;
    }
    auto steps = convergence_order(p, g, 3, jobs);
    auto ratios = convergence_ratios(steps);
    bool ok = true;
    for (double q : ratios)
        ok = ok && std::isfinite(q) && std::abs(std::log2(q) - 2) <= 0.3;
    rec["residual_max"] = steps.front().residual;
    rec["ratios"] = ratios;
    rep.add("numeric", flow + " " + solution + " fd order 2", ok, rec.dump());
}

// Commands -----------------------------------------------------------------------------

CatalogKey catalog_key(const Config &cfg, const std::string &family)
{
    CatalogKey key{canonical_family(family), cfg.n > 0 ? cfg.n : 1, parse_params(cfg.params)};
    if (!cfg.case_id.empty())
        key.params["case"] = cfg.case_id;
    return key;
}

EquationSystem user_system(const Config &cfg, int n)
{
    JetSpace space = JetSpace::schrodinger(n);
    SymbolTable sym = SymbolTable::standard(space);
    EquationSystem sys;
    sys.name = "user";
    sys.space = space;
    sys.curated = false;
    Expr r = parse(cfg.residual, sym);
    Expr lead = parse(cfg.solve_for, sym);
    if (lead.kind() != Kind::Jet)
        throw UsageError("--solve-for must name a jet coordinate");
    Expr c = diff(r, lead);
    if (is_zero(c) || contains(c, lead))
        throw UsageError("the residual must be linear in " + print(lead));
    sys.residuals = {r};
    sys.labels = {"user"};
    sys.solved = {{lead, lead - r / c}};
    adjoin_conjugates(sys);
    validate_system(sys);
    return sys;
}

Report cmd_check(const Config &cfg)
{
    Report rep;
    rep.command = "check";
    if (!cfg.residual.empty()) {
        if (cfg.solve_for.empty())
            throw UsageError("--residual needs --solve-for");
        int n = cfg.n > 0 ? cfg.n : 1;
        EquationSystem sys = user_system(cfg, n);
        std::vector<VectorField> fields;
        SymbolTable sym = SymbolTable::standard(sys.space);
        for (std::size_t i = 0; i < cfg.fields.size(); ++i)
            fields.push_back(parse_field(cfg.fields[i], sym, "X" + std::to_string(i + 1)));
        if (!cfg.family.empty()) {
            auto fam = build_family(catalog_key(cfg, cfg.family));
            fields.insert(fields.end(), fam.begin(), fam.end());
        }
        if (fields.empty())
            throw UsageError("a user residual needs --field or --family");
        rep.add_grouped("user", "", check_family(fields, sys, cfg.jobs));
        for (auto &it : rep.items)
            it.detail += "; uncurated system";
        return rep;
    }
    if (cfg.equation.empty())
        throw UsageError("check needs --equation or --residual");
    CatalogKey key = catalog_key(cfg, cfg.equation);
    EquationSystem sys = build_equation(key);
    std::string section = section_of(key.family);
    if (!cfg.fields.empty()) {
        std::vector<VectorField> fields;
        SymbolTable sym = symbols_for(key);
        for (std::size_t i = 0; i < cfg.fields.size(); ++i)
            fields.push_back(parse_field(cfg.fields[i], sym, "X" + std::to_string(i + 1)));
        rep.add_grouped(section, "", check_family(fields, sys, cfg.jobs));
        return rep;
    }
    CatalogKey fam = key;
    if (!cfg.family.empty())
        fam.family = canonical_family(cfg.family);
    if (fam.family == key.family) {
        add_family(rep, key, cfg.jobs, "");
        add_negatives(rep, key, "");
    } else {
        rep.add_grouped(section, "", check_family(build_family(fam), sys, cfg.jobs));
    }
    return rep;
}

void add_determining(Report &rep, int n, bool list_rows)
{
    const std::string section = "sec2-determining";
    std::string tag = "n=" + std::to_string(n) + " ";
    DeterminingSystem det = extract_determining(theorem1_ansatz(n), build_equation({"theorem1", n, {}}));
    if (list_rows)
        for (const auto &eq : det.equations)
            rep.add(section, tag + "row " + eq.origin, true, print(eq.expr));
    std::vector<Expr> cand;
    for (const auto &eq : det.equations)
        cand.push_back(eq.expr);
    for (TraceReading reading : {TraceReading::Literal, TraceReading::Summed}) {
        std::vector<Expr> ref;
        std::vector<std::string> labels;
        for (const auto &r : theorem1_reference_system(n, reading)) {
            ref.push_back(r.expr);
            labels.push_back(r.label);
        }
        EquivalenceReport eq = compare_systems(cand, ref, labels, det.unknowns, theorem1_closure_vars(n));
        std::string missing, derived;
        for (const auto &row : eq.reference_rows) {
            if (row.depth < 0)
                missing += (missing.empty() ? "" : ", ") + row.label;
            else if (row.depth > 0)
                derived += (derived.empty() ? "" : ", ") + row.label;
        }
        std::size_t cand_missing = 0;
        for (const auto &row : eq.candidate_rows)
            cand_missing += row.depth < 0;
        if (reading == TraceReading::Literal) {
            std::string detail = std::to_string(det.equations.size()) + " extracted rows vs " +
                                 std::to_string(ref.size()) + " reference rows";
            if (!derived.empty())
                detail += "; reached after differentiation: " + derived;
            if (!missing.empty())
                detail += "; not generated: " + missing;
            if (cand_missing)
                detail += "; " + std::to_string(cand_missing) + " extracted rows outside the reference";
            rep.add(section, tag + "extraction equivalent to the reference system", eq.equivalent, detail);
        } else {
            // the summed trace only coincides with the literal index when n = 1
            bool expected = n == 1;
            std::string detail = eq.equivalent ? "summed reading equivalent"
                                               : "summed reading not equivalent; not generated: " + missing;
            rep.add(section, tag + (expected ? "summed trace reading agrees" : "summed trace reading differs"),
                    eq.equivalent == expected, detail);
        }
    }
    auto proof = [&](ProofMutation m, const std::string &what, bool expect_pass) {
        CheckReport r = verify_proof_solution(n, m);
        std::size_t bad = 0;
        std::string first;
        for (const auto &it : r.items)
            if (!it.zero && bad++ == 0)
                first = it.id + " leaves " + clip(it.residual, 160);
        std::string detail = bad == 0 ? std::to_string(r.items.size()) + " equations satisfied"
                                      : std::to_string(bad) + (bad == 1 ? " equation" : " equations") + std::string(" violated, e.g. ") + first;
        rep.add(section, tag + what, r.pass == expect_pass, detail);
    };
    proof(ProofMutation::None, "general solution satisfies the system", true);
    if (n >= 2)
        proof(ProofMutation::SymmetricC, "symmetric C mutation fails", false);
    proof(ProofMutation::EEqualsB, "E = B mutation fails", false);
}

Report cmd_determining(const Config &cfg)
{
    Report rep;
    rep.command = "determining";
    std::string eq = cfg.equation.empty() ? "theorem1" : canonical_family(cfg.equation);
    if (eq != "theorem1")
        throw UsageError("determining supports --equation theorem1 only");
    int n = cfg.n > 0 ? cfg.n : 2;
    if (n < 1 || n > 4)
        throw UsageError("determining supports n in 1..4");
    add_determining(rep, n, true);
    return rep;
}

int max_x_index(const Expr &e)
{
    int m = 0;
    for (const auto &a : free_atoms(e))
        if (a.kind() == Kind::Indep && !a.node().index.empty())
            m = std::max(m, a.node().index[0]);
    return m;
}

Report cmd_flow(const Config &cfg)
{
    Report rep;
    rep.command = "flow";
    std::string name = cfg.name.empty() ? cfg.flow : cfg.name;
    if (name.empty())
        throw UsageError("flow needs --name");
    int n = cfg.n;
    Expr W0;
    if (!cfg.potential.empty()) {
        W0 = parse(cfg.potential, SymbolTable::standard(JetSpace::schrodinger(6)));
        if (n == 0)
            n = std::max(1, max_x_index(W0));
    }
    FlowKey key{name, n > 0 ? n : 1, parse_params(cfg.params)};
    std::string section = name == "kdv-galilei"          ? "sec3-kdv"
                          : name == "convection-galilei" ? "sec5-convection"
                          : name == "contact-special"    ? "sec6-contact"
                                                         : "sec2-flows";
    add_flow(rep, section, key);
    if (!cfg.potential.empty()) {
        FlowMap f = build_flow(key);
        if (max_x_index(W0) > key.n)
            throw UsageError("the potential mentions x_a with a > n");
        Expr p2 = constant(print(f.parameter) + "_2");
        Expr W1 = transform_potential(f, W0);
        Expr W2 = transform_potential(with_parameter(f, p2), W1);
        Expr W12 = transform_potential(with_parameter(f, f.parameter + p2), W0);
        auto show = [&](const Expr &w) { return is_zero(w - W0) ? print(W0) + " (unchanged)" : print(w); };
        rep.add("sec2-potentials", name + " W -> W'", true, "W' = " + show(W1));
        rep.add("sec2-potentials", name + " W' -> W''", true, "W'' = " + show(W2));
        rep.add("sec2-potentials", name + " parameters add along the chain", is_zero(W2 - W12),
                "W'' equals the single step with " + print(f.parameter + p2));
    }
    return rep;
}

Report cmd_numeric(const Config &cfg)
{
    Report rep;
    rep.command = "numeric";
    if (cfg.n > 1)
        throw UsageError("numeric runs need n = 1");
    std::string flow = cfg.flow.empty() ? (cfg.name.empty() ? "identity" : cfg.name) : cfg.flow;
    if (flow == "none")
        flow = "identity";
    std::map<std::string, double> params;
    for (const auto &[k, v] : parse_params(cfg.params)) {
        try {
            std::size_t used = 0;
            params[k] = std::stod(v, &used);
            if (used != v.size())
                throw std::invalid_argument(v);
        } catch (const std::exception &) {
            throw UsageError("numeric parameter " + k + " needs a number");
        }
    }
    if (cfg.mode != "analytic" && cfg.mode != "fd")
        throw UsageError("--mode must be analytic or fd");
    Grid1D g = parse_grid(cfg.grid);
    g.mode = cfg.mode == "fd" ? DerivativeMode::FiniteDifference : DerivativeMode::Analytic;
    NumericProblem p = make_problem(flow, cfg.solution, params);
    nlohmann::ordered_json rec{{"flow", flow}, {"solution", cfg.solution}, {"mode", cfg.mode}, {"grid", cfg.grid}};
    if (g.mode == DerivativeMode::Analytic) {
        double tol = cfg.tol > 0 ? cfg.tol : 1e-10;
        double r = residual_max(p, g, cfg.jobs);
        rec["residual_max"] = r;
        rec["ratios"] = nlohmann::ordered_json::array();
        rep.add("numeric", flow + " " + cfg.solution + " analytic residual <= " + sci(tol), r <= tol, rec.dump());
    } else {
        int refinements = cfg.refinements > 0 ? cfg.refinements : 3;
        auto steps = convergence_order(p, g, refinements, cfg.jobs);
        auto ratios = convergence_ratios(steps);
        bool ok = true;
        for (double q : ratios)
            ok = ok && std::isfinite(q) && std::abs(std::log2(q) - 2) <= 0.3;
        rec["residual_max"] = steps.front().residual;
        auto hs = nlohmann::ordered_json::array();
        for (const auto &s : steps)
            hs.push_back({{"h", s.h}, {"residual_max", s.residual}});
        rec["steps"] = hs;
        rec["ratios"] = ratios;
        rep.add("numeric", flow + " " + cfg.solution + " fd order 2 +- 0.3", ok, rec.dump());
        if (cfg.tol > 0)
            rep.add("numeric", flow + " " + cfg.solution + " fd residual <= " + sci(cfg.tol),
                    steps.back().residual <= cfg.tol, sci(steps.back().residual));
    }
    if (!cfg.csv_path.empty())
        write_csv(cfg.csv_path, residual_points(p, g, cfg.jobs));
    return rep;
}

} // namespace

// Report -------------------------------------------------------------------------------

bool Report::pass() const
{
    for (const auto &it : items)
        if (!it.pass)
            return false;
    return true;
}

void Report::add(std::string section, std::string id, bool ok, std::string detail)
{
    items.push_back({std::move(id), std::move(section), ok, std::move(detail)});
}

void Report::add_grouped(const std::string &section, const std::string &prefix, const CheckReport &r)
{
    std::vector<std::string> order;
    std::map<std::string, std::vector<const CheckItem *>> groups;
    for (const auto &it : r.items) {
        std::string key = it.id.substr(0, it.id.find(':'));
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(&it);
    }
    for (const auto &key : order) {
        const auto &g = groups[key];
        bool ok = true;
        std::string detail;
        for (const auto *it : g)
            if (!it->zero && ok) {
                ok = false;
                detail = it->id + " leaves " + clip(it->residual);
            }
        if (ok)
            detail = std::to_string(g.size()) + (g.size() == 1 ? " residual reduces" : " residuals reduce") + " to 0";
        add(section, prefix + key, ok, detail);
    }
}

Report reproduce(const std::string &only, int jobs)
{
    auto start = std::chrono::steady_clock::now();
    Report rep;
    rep.command = "reproduce";
    auto want = [&](const std::string &section) { return only.empty() || section.rfind(only, 0) == 0; };
    auto tag = [](int n) { return "n=" + std::to_string(n) + " "; };

    if (want("sec2-theorem1"))
        for (int n = 1; n <= 3; ++n) {
            add_family(rep, {"theorem1", n, {}}, jobs, tag(n));
            add_negatives(rep, {"theorem1", n, {}}, tag(n));
        }
    if (want("sec2-determining"))
        for (int n = 1; n <= 3; ++n)
            add_determining(rep, n, false);
    if (want("sec2-flows"))
        for (const char *f : {"qb", "qa", "galilei", "dilation", "projective", "identity"})
            add_flow(rep, "sec2-flows", {f, 2, {}});
    if (want("sec2-potentials")) {
        for (const auto &it : potential_chains(2).items)
            rep.add("sec2-potentials", it.id, it.zero, it.zero ? it.note : it.id + " leaves " + clip(it.residual));
        CheckReport sm = verify_solution_mapping(2);
        rep.add_grouped("sec2-potentials", "solution mapping ", sm);
    }
    for (const char *fam : {"laplace-system", "heat-system", "wave-system", "hj-system"}) {
        if (!want(section_of(fam)))
            continue;
        for (int n = 1; n <= 3; ++n)
            add_family(rep, {fam, n, {}}, jobs, tag(n));
    }
    if (want("sec3-kdv")) {
        add_family(rep, {"kdv-system", 1, {}}, jobs, "F arbitrary ");
        add_negatives(rep, {"kdv-system", 1, {}}, "F arbitrary ");
        add_family(rep, {"kdv-system", 1, {{"F", "const"}}}, jobs, "F const ");
        add_negatives(rep, {"kdv-system", 1, {{"lambda1", "0"}}}, "lambda1=0 ");
        add_flow(rep, "sec3-kdv", {"kdv-galilei", 1, {}});
    }
    if (want("sec4-exp"))
        for (int n = 1; n <= 2; ++n) {
            add_family(rep, {"subalg-exp", n, {}}, jobs, tag(n));
            add_closure(rep, {"subalg-exp", n, {}}, tag(n));
        }
    if (want("sec4-trig"))
        for (int n = 1; n <= 2; ++n) {
            add_family(rep, {"subalg-trig", n, {}}, jobs, tag(n));
            add_closure(rep, {"subalg-trig", n, {}}, tag(n));
        }
    if (want("sec4-poly"))
        for (int k = 1; k <= 3; ++k) {
            CatalogKey key{"subalg-poly", 2, {{"k", std::to_string(k)}}};
            add_family(rep, key, jobs, "k=" + std::to_string(k) + " ");
            add_closure(rep, key, "k=" + std::to_string(k) + " ");
        }
    if (want("sec5-convection")) {
        for (int n = 1; n <= 3; ++n) {
            add_family(rep, {"convection", n, {}}, jobs, tag(n));
            if (n >= 2)
                add_negatives(rep, {"convection", n, {}}, tag(n));
        }
        for (int n = 1; n <= 3; ++n)
            add_flow(rep, "sec5-convection", {"convection-galilei", n, {}});
    }
    if (want("sec5-euler")) {
        for (int n = 1; n <= 3; ++n)
            for (int c = 1; c <= 5; ++c) {
                CatalogKey key{"euler-system", n, {{"case", std::to_string(c)}}};
                std::string t = tag(n) + "case " + std::to_string(c) + " ";
                add_family(rep, key, jobs, t);
                add_negatives(rep, key, t);
            }
        add_rejection(rep, "sec5-euler", "case 2 rejects k=0", {"euler-system", 1, {{"case", "2"}, {"k", "0"}}});
        add_rejection(rep, "sec5-euler", "case 2 rejects k=-1", {"euler-system", 1, {{"case", "2"}, {"k", "-1"}}});
    }
    if (want("sec6-contact")) {
        add_family(rep, {"contact", 1, {}}, jobs, "");
        add_flow(rep, "sec6-contact", {"contact-special", 1, {}});
    }
    if (want("numeric")) {
        add_numeric(rep, "galilei", "planewave", false, jobs);
        add_numeric(rep, "projective", "planewave", false, jobs);
        add_numeric(rep, "qb", "planewave", false, jobs);
        add_numeric(rep, "qa", "planewave", false, jobs);
        add_numeric(rep, "dilation", "planewave", false, jobs);
        add_numeric(rep, "identity", "zero", false, jobs);
        add_numeric(rep, "identity", "planewave", true, jobs);
        add_numeric(rep, "projective", "planewave", true, jobs);
    }
    rep.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    return rep;
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    Config cfg;
    CLI::App app{"Symmetry checks for Schrodinger-type systems", "jetsym"};
    app.require_subcommand(1, 1);
    app.set_version_flag("--version", kVersion);

    auto common = [&](CLI::App *sub) {
        sub->add_option("--n", cfg.n, "Spatial dimension")->check(CLI::Range(1, 6));
        sub->add_option("--param", cfg.params, "Parameter KEY=VALUE (repeatable)")->take_last()->multi_option_policy(
            CLI::MultiOptionPolicy::TakeAll);
        sub->add_option("--tol", cfg.tol, "Tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--format", cfg.format, "text or json")->check(CLI::IsMember({"text", "json"}));
        sub->add_option("--out", cfg.out_path, "Write the report to a file");
        sub->add_option("--json", cfg.json_path, "Write the JSON report to a file");
        sub->add_option("--jobs", cfg.jobs, "Worker threads")->check(CLI::Range(1, 256));
    };

    auto *check = app.add_subcommand("check", "Invariance of a catalog family on its equation");
    common(check);
    check->add_option("--equation", cfg.equation, "Catalog equation");
    check->add_option("--family", cfg.family, "Catalog family (defaults to the equation's)");
    check->add_option("--case", cfg.case_id, "Euler case 1..5");
    check->add_option("--field", cfg.fields, "Vector field in the DSL (repeatable)");
    check->add_option("--residual", cfg.residual, "User residual in the DSL");
    check->add_option("--solve-for", cfg.solve_for, "Jet coordinate the residual is solved for");

    auto *det = app.add_subcommand("determining", "Determining equations for the point ansatz");
    common(det);
    det->add_option("--equation", cfg.equation, "Catalog equation (theorem1)");

    auto *flow = app.add_subcommand("flow", "Finite transformations");
    common(flow);
    flow->add_option("--name,--flow", cfg.name, "Flow name")->required();
    flow->add_option("--potential", cfg.potential, "Potential W(t, x) to transport");

    auto *num = app.add_subcommand("numeric", "Grid residuals of transformed solutions");
    common(num);
    num->add_option("--flow", cfg.flow, "Flow applied to the solution");
    num->add_option("--solution", cfg.solution, "planewave, zero or constant");
    num->add_option("--mode", cfg.mode, "analytic or fd");
    num->add_option("--grid", cfg.grid, "NTxNX");
    num->add_option("--refinements", cfg.refinements, "Grid halvings in fd mode")->check(CLI::Range(2, 6));
    num->add_option("--csv", cfg.csv_path, "Per-point residual dump");

    auto *rep = app.add_subcommand("reproduce", "Run the full regression matrix");
    common(rep);
    rep->add_option("--only", cfg.only, "Section id prefix");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError &e) {
        int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }
    cfg.jobs = std::max(1, cfg.jobs);
    try {
        auto start = std::chrono::steady_clock::now();
        Report r;
        if (check->parsed())
            r = cmd_check(cfg);
        else if (det->parsed())
            r = cmd_determining(cfg);
        else if (flow->parsed())
            r = cmd_flow(cfg);
        else if (num->parsed())
            r = cmd_numeric(cfg);
        else
            r = reproduce(cfg.only, cfg.jobs);
        r.timing_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (r.items.empty())
            throw UsageError("nothing matched");
        return emit(r, cfg, out);
    } catch (const ParseError &e) {
        err << "error: " << e.what() << " (line " << e.line() << ", column " << e.column() << ")\n";
    } catch (const std::exception &e) {
        err << "error: " << e.what() << '\n';
    }
    return 2;
}

} // namespace jetsym::cli
