/**
 * @file cli.cpp
 * @brief Command implementations behind the `stf` executable.
 */
#include "stf/cli.hpp"

#include <optional>
#include <sstream>

#include "stf/chargroup.hpp"
#include "stf/depth.hpp"
#include "stf/numtheory.hpp"
#include "stf/transfer.hpp"

namespace stf {

namespace {

using nlohmann::json;

std::string depth_text(int64_t d) { return d >= kInf ? "inf" : std::to_string(d); }

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
    return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
    std::string s;
    for (size_t i = 0; i < fields.size(); ++i) s += (i ? "," : "") + csv_field(fields[i]);
    return s + "\n";
}

/** The tower F_{p^{kn}} shared by one command. */
struct Context {
    std::unique_ptr<FieldTower> tower;
    TorusSpec spec;

    explicit Context(const RunConfig& cfg)
        : tower(std::make_unique<FieldTower>(cfg.p, cfg.k * cfg.n)),
          spec{tower.get(), cfg.k, cfg.n, TorusKind::NormOne} {}

    LaurentElem element(const std::string& text, int64_t prec, uint32_t layer) const {
        LaurentElem x = parse_laurent(text, tower.get(), layer);
        return x.precision() > prec && x.precision() < kInf ? x.truncated(prec) : x;
    }
};

/** Splits "[[a, b], [c, d]]" into rows of entry texts. */
std::vector<std::vector<std::string>> split_matrix(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    size_t i = text.find('[');
    if (i == std::string::npos) throw ParseError("matrix literal must start with '['");
    ++i;
    for (;;) {
        while (i < text.size() && (text[i] == ' ' || text[i] == ',')) ++i;
        if (i >= text.size()) throw ParseError("unterminated matrix literal");
        if (text[i] == ']') break;
        if (text[i] != '[') throw ParseError("expected '[' opening a matrix row");
        const size_t close = text.find(']', i);
        if (close == std::string::npos) throw ParseError("unterminated matrix row");
        std::vector<std::string> row;
        std::stringstream ss(text.substr(i + 1, close - i - 1));
        std::string entry;
        while (std::getline(ss, entry, ',')) row.push_back(entry);
        rows.push_back(std::move(row));
        i = close + 1;
    }
    if (rows.empty()) throw ParseError("empty matrix literal");
    for (const auto& r : rows)
        if (r.size() != rows.size()) throw ParseError("matrix literal is not square");
    return rows;
}

std::string render(const RunConfig& cfg, const json& j, const std::string& csv) {
    return cfg.format == OutputFormat::Json ? j.dump(2) + "\n" : csv;
}

json report_json(const SummationReport& r) {
    json strata = json::array(), partial = json::array();
    for (const auto& s : r.strata) strata.push_back(to_json(s));
    for (const auto& s : r.partial_sums) partial.push_back(to_json(s));
    return {{"strata", strata},
            {"partial_sums", partial},
            {"regularization", to_json(r.regularization)},
            {"stabilization_depth", r.stabilization_depth},
            {"vanishing_from", r.vanishing_from},
            {"stabilized", r.stabilized},
            {"certified", r.certified},
            {"certificate", r.certificate}};
}

json atoms_json(const std::vector<TransferAtom>& atoms) {
    json a = json::array();
    for (const auto& x : atoms) a.push_back({{"location", to_text(x.location)}, {"weight", x.weight.get_str()}});
    return a;
}

}  // namespace

void validate(const RunConfig& cfg) {
    if (!is_prime(cfg.p)) throw UsageError("p must be prime");
    if (cfg.k < 1) throw UsageError("k must be at least 1");
    if (cfg.n < 1 || cfg.n > 8) throw UsageError("n must lie in [1, 8]");
    if (cfg.p <= cfg.n) throw UsageError("p must exceed n");
    if (cfg.depth_cap < 0) throw UsageError("depth cap must be non-negative");
    if (cfg.prec < 2 * cfg.depth_cap + 4) throw UsageError("precision must be at least 2·depth_cap + 4");
    if (cfg.jobs < 1) throw UsageError("jobs must be at least 1");
}

OutputFormat parse_format(const std::string& text) {
    if (text == "json") return OutputFormat::Json;
    if (text == "csv") return OutputFormat::Csv;
    throw UsageError("format must be json or csv");
}

json to_json(const CycNumber& x) {
    json c = json::array();
    for (const auto& v : x.numerator()) c.push_back(v.get_str());
    return {{"modulus", x.modulus()}, {"coefficients", c}, {"denominator", x.denominator().get_str()},
            {"text", x.to_string()}};
}

CycNumber cyc_from_json(const json& j) {
    const uint64_t m = j.at("modulus").get<uint64_t>();
    std::vector<mpz_class> counts(m, 0);
    const auto& c = j.at("coefficients");
    if (c.size() > m) throw ParseError("too many cyclotomic coefficients");
    for (size_t i = 0; i < c.size(); ++i) counts[i] = mpz_class(c[i].get<std::string>());
    return CycNumber::from_histogram(m, counts, mpz_class(j.at("denominator").get<std::string>()));
}

CommandOutput cmd_depth(const RunConfig& cfg, const std::string& gamma) {
    validate(cfg);
    const Context ctx(cfg);
    json j{{"gamma", gamma}};
    std::vector<std::string> row{gamma};
    if (gamma.find('[') != std::string::npos) {
        const auto rows = split_matrix(gamma);
        LMatrix g(rows.size(), LaurentElem::zero(ctx.tower.get(), cfg.k));
        for (size_t i = 0; i < rows.size(); ++i)
            for (size_t c = 0; c < rows.size(); ++c) g.at(i, c) = ctx.element(rows[i][c], cfg.prec, cfg.k);
        std::string nd;
        try {
            nd = newton_depth(g).get_str();
        } catch (const DomainError&) {
            nd = "undefined";  // central matrices have no Newton depth
        }
        const std::string depth = nd == "undefined" ? "inf" : nd, md = depth_text(matrix_depth(g));
        j["kind"] = "matrix";
        j["depth"] = depth;
        j["newton_depth"] = nd;
        j["matrix_depth"] = md;
        j["good"] = nullptr;
        j["discriminant_exponent"] = nullptr;
        row.insert(row.end(), {"matrix", depth, nd, md, "", ""});
    } else {
        const LaurentElem g = ctx.element(gamma, cfg.prec, ctx.spec.layer());
        const int64_t d = torus_depth(g, cfg.k);
        std::string nd = "undefined", good = "false", disc = "undefined";
        if (d < kInf) {
            nd = newton_depth(regular_matrix(g, cfg.k)).get_str();
            good = is_good(g, cfg.k, d) ? "true" : "false";
            disc = std::to_string(weyl_discriminant_exponent(root_orders(g, cfg.k)));
        }
        j["kind"] = "torus";
        j["depth"] = depth_text(d);
        j["newton_depth"] = nd;
        j["matrix_depth"] = nullptr;
        j["good"] = good == "true";
        j["discriminant_exponent"] = disc;
        row.insert(row.end(), {"torus", depth_text(d), nd, "", good, disc});
    }
    return {render(cfg, j,
                   csv_row({"gamma", "kind", "depth", "newton_depth", "matrix_depth", "good", "discriminant_exponent"}) +
                       csv_row(row)),
            0};
}

CommandOutput cmd_theta(const RunConfig& cfg, const std::string& psi_label, const std::string& gamma) {
    validate(cfg);
    const Context ctx(cfg);
    const auto [psi, r] = parse_character(psi_label);
    if (r < 0 || r > cfg.depth_cap) throw UsageError("character level outside [0, depth cap]");
    const TorusQuotient Q(ctx.spec, r + 1);
    validate_character(Q, psi);
    const LaurentElem g = ctx.element(gamma, cfg.prec, ctx.spec.layer());
    const CycNumber table = is_prime(cfg.n) ? theta_table(Q, psi, g) : theta_conjecture(Q, psi, g, cfg.conv);
    const CycNumber conj = theta_conjecture(Q, psi, g, cfg.conv);
    const int64_t d = is_trivial(Q, psi) ? -1 : character_depth(Q, psi);
    json j{{"psi", format_character(Q, psi)},
           {"psi_depth", d},
           {"gamma", gamma},
           {"sign_convention", to_string(cfg.conv)},
           {"table", to_json(table)},
           {"conjecture", to_json(conj)}};
    if (!is_prime(cfg.n)) j["table"] = nullptr;
    return {render(cfg, j,
                   csv_row({"psi", "psi_depth", "gamma", "table", "conjecture"}) +
                       csv_row({format_character(Q, psi), std::to_string(d), gamma,
                                is_prime(cfg.n) ? table.to_string() : "", conj.to_string()})),
            0};
}

CommandOutput cmd_transfer(const RunConfig& cfg, const std::string& gamma, const std::string& t,
                           const std::string& mode) {
    validate(cfg);
    if (mode != "brute" && mode != "closed" && mode != "both") throw UsageError("mode must be brute, closed or both");
    const Context ctx(cfg);
    const LaurentElem g = ctx.element(gamma, cfg.prec, ctx.spec.layer());
    const LaurentElem u = ctx.element(t, cfg.prec, ctx.spec.layer());
    TransferOptions opt;
    opt.depth_cap = cfg.depth_cap;
    opt.conv = cfg.conv;
    opt.jobs = cfg.jobs;
    const PairGeometry geo = pair_geometry(ctx.spec, g, u);
    json j{{"gamma", gamma}, {"t", t}};
    j["geometry"] = {{"gamma_depth", depth_text(geo.gamma_depth)},
                     {"t_depth", depth_text(geo.t_depth)},
                     {"nearly_conjugate", geo.nearly_conjugate},
                     {"stably_conjugate", geo.conjugate_index >= 0}};
    std::string csv = csv_row({"gamma", "t", "depth", "stratum", "partial_sum", "smooth", "closed"});
    std::string closed_text;
    std::optional<BruteResult> brute;
    if (mode != "brute") {
        if (is_prime(cfg.n)) {
            const PrimeClosedForm c = closed_L_prime(ctx.spec, g, u);
            closed_text = c.value.smooth.to_string();
            json cf{{"smooth", to_json(c.value.smooth)},
                    {"atoms", atoms_json(c.value.atoms)},
                    {"routed_to_sl2", c.routed_to_sl2},
                    {"packaged_applies", c.packaged_applies},
                    {"E_T", c.constants.E_T.get_str()},
                    {"C_T", c.constants.C_T.get_str()},
                    {"packaged", c.packaged.get_str()},
                    {"packaged_flipped", c.packaged_flipped.get_str()}};
            j["closed_form"] = cf;
            j["diff"] = {{"finite_minus_packaged", c.diff.get_str()},
                         {"finite_minus_packaged_flipped", c.diff_flipped.get_str()}};
            if (c.routed_to_sl2) {
                const Sl2ClosedForm s = closed_L_sl2(ctx.spec, g, u);
                j["closed_form"]["sl2"] = {{"depth", s.depth},
                                           {"M", s.M},
                                           {"formula", s.formula.get_str()},
                                           {"trace_order", s.trace_order},
                                           {"trace_value", s.trace_value.get_str()},
                                           {"identity_holds", s.identity_holds}};
            }
        } else {
            j["closed_form"] = nullptr;
            j["diff"] = nullptr;
        }
    }
    if (mode != "closed") {
        brute = brute_L(ctx.spec, g, u, opt);
        j["smooth"] = to_json(brute->value.smooth);
        j["atoms"] = atoms_json(brute->value.atoms);
        j["report"] = report_json(brute->report);
        if (mode == "both" && j["closed_form"].is_object())
            j["diff"]["brute_minus_closed"] =
                to_json(brute->value.smooth - cyc_from_json(j["closed_form"]["smooth"]));
        const auto& r = brute->report;
        for (size_t d = 0; d < r.strata.size(); ++d)
            csv += csv_row({gamma, t, std::to_string(d), r.strata[d].to_string(), r.partial_sums[d].to_string(),
                            brute->value.smooth.to_string(), closed_text});
    } else {
        csv += csv_row({gamma, t, "", "", "", "", closed_text});
    }
    return {render(cfg, j, csv), 0};
}

CommandOutput cmd_verify(const RunConfig& cfg, const std::string& suite, bool restrict_field,
                         const std::string& artifact_dir) {
    validate(cfg);
    VerifyConfig vc;
    vc.seed = cfg.seed;
    vc.jobs = cfg.jobs;
    vc.conv = cfg.conv;
    vc.artifact_dir = artifact_dir;
    if (restrict_field) vc.field = std::make_pair(cfg.p, cfg.n);
    std::vector<int> ids;
    if (suite == "all") {
        for (size_t i = 0; i < suite_names().size(); ++i) ids.push_back(int(i + 1));
    } else {
        try {
            ids.push_back(suite_id(suite));
        } catch (const ParseError& e) {
            throw UsageError(e.what());
        }
    }
    json suites = json::array();
    std::string csv = csv_row({"id", "suite", "result", "checks", "summary"});
    bool all_pass = true;
    for (int id : ids) {
        const SuiteResult r = run_suite(id, vc);
        all_pass = all_pass && r.pass;
        suites.push_back({{"id", r.id},
                          {"suite", r.name},
                          {"pass", r.pass},
                          {"checks", r.checks},
                          {"summary", r.summary},
                          {"counterexamples", r.counterexamples},
                          {"notes", r.notes},
                          {"artifacts", r.artifacts}});
        csv += csv_row({std::to_string(r.id), r.name, r.pass ? "PASS" : "FAIL", std::to_string(r.checks), r.summary});
    }
    const json j{{"pass", all_pass}, {"suites", suites}};
    return {render(cfg, j, csv), all_pass ? 0 : 1};
}

}  // namespace stf
