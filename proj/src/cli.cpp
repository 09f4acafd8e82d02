#include "fastod/cli.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fastod/discovery.hpp"
#include "fastod/inference.hpp"
#include "fastod/od.hpp"
#include "fastod/oracle.hpp"
#include "fastod/relation.hpp"

namespace fastod::cli {

namespace {

using nlohmann::json;

struct InputFlags {
    std::string input;
    std::string schema;
    std::string null_policy;
    bool infer_schema = false;
    bool no_header = false;
};

struct CommonFlags {
    std::string format = "text";
    std::optional<std::uint64_t> seed;
    bool timing = false;
};

struct LoadedInput {
    Relation rel;
    std::string path;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

LoadedInput load_input(const InputFlags& f) {
    CsvOptions csv;
    csv.has_header = !f.no_header;
    Schema schema;
    std::string text = read_text(f.input);
    if (!f.schema.empty()) {
        schema = load_schema(f.schema);
    } else if (f.infer_schema) {
        schema = infer_schema(text, csv);
    } else {
        throw SchemaError("--schema is required (or pass --infer-schema)");
    }
    if (!f.null_policy.empty()) schema.null_policy = parse_null_policy(f.null_policy);
    return {parse_csv(text, schema, csv), f.input};
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

json input_json(const LoadedInput& in) {
    return {{"path", in.path},
            {"rows", in.rel.row_count()},
            {"columns", in.rel.attribute_count()},
            {"schema_hash", hex64(in.rel.schema().fingerprint())}};
}

void text_input_header(std::ostream& out, const LoadedInput& in) {
    out << "# input: " << in.path << " rows=" << in.rel.row_count() << " columns=" << in.rel.attribute_count()
        << " schema=" << hex64(in.rel.schema().fingerprint()) << "\n";
}

json od_json(const CanonicalOD& od, const std::vector<std::string>& names) {
    json ctx = json::array();
    for (AttrId a : od.context().members()) ctx.push_back(names.at(a));
    json j = {{"text", format_od(od, names)},
              {"kind", od.is_constant() ? "constant" : "order_compatible"},
              {"context", ctx},
              {"level", od.level()}};
    if (od.is_constant()) {
        j["attribute"] = names.at(od.a());
    } else {
        j["a"] = names.at(od.a());
        j["b"] = names.at(od.b());
    }
    return j;
}

json pairs_json(const std::vector<TuplePair>& pairs) {
    json arr = json::array();
    for (const auto& [s, t] : pairs) arr.push_back({s, t});
    return arr;
}

std::string pairs_text(const std::vector<TuplePair>& pairs) {
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (i) out += ",";
        out += "(t" + std::to_string(pairs[i].first) + ",t" + std::to_string(pairs[i].second) + ")";
    }
    return out;
}

void emit_json(std::ostream& out, json report, const CommonFlags& common,
               std::chrono::steady_clock::time_point started) {
    if (common.seed) report["seed"] = *common.seed;
    if (common.timing)
        report["wall_time_ms"] =
            std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    out << report.dump(2) << "\n";
}

// ---- discover ----

struct DiscoverFlags {
    std::optional<std::size_t> max_level;
    bool no_prune = false;
    bool oracle = false;
    std::size_t threads = 1;
};

int cmd_discover(const InputFlags& inf, const CommonFlags& common, const DiscoverFlags& df, std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    LoadedInput in = load_input(inf);
    const auto names = attribute_names(in.rel.schema());

    ODSet ods;
    std::vector<LevelStats> stats;
    std::string algorithm;
    bool complete = true;
    if (df.oracle) {
        algorithm = "oracle";
        oracle::OracleConfig cfg;
        cfg.max_level = df.max_level;
        ods = oracle::brute_discover(in.rel, cfg);
        complete = !df.max_level || *df.max_level >= in.rel.attribute_count();
    } else {
        DiscoveryOptions opts;
        opts.max_level = df.max_level;
        opts.prune = !df.no_prune;
        opts.threads = df.threads;
        algorithm = opts.prune ? "fastod" : "fastod_unpruned";
        DiscoveryResult r = fastod(in.rel, opts);
        ods = std::move(r.minimal_ods);
        stats = std::move(r.stats);
        complete = r.complete;
    }

    if (common.format == "json") {
        json report;
        report["command"] = "discover";
        report["input"] = input_json(in);
        report["algorithm"] = algorithm;
        report["null_policy"] = std::string(to_string(in.rel.schema().null_policy));
        report["max_level"] = df.max_level ? json(*df.max_level) : json(nullptr);
        report["complete"] = complete;
        json list = json::array();
        for (const auto& od : ods) list.push_back(od_json(od, names));
        report["ods"] = list;
        report["od_count"] = ods.size();
        json st = json::array();
        for (const auto& s : stats)
            st.push_back({{"level", s.level},
                          {"nodes_generated", s.nodes_generated},
                          {"nodes_pruned", s.nodes_pruned},
                          {"constant_checks", s.constant_checks},
                          {"swap_checks", s.swap_checks},
                          {"keys_found", s.keys_found},
                          {"ods_found", s.ods_found}});
        report["stats"] = st;
        emit_json(out, std::move(report), common, started);
        return kOk;
    }

    text_input_header(out, in);
    out << "# algorithm: " << algorithm << (complete ? "" : " (stopped at max level)") << "\n";
    if (common.seed) out << "# seed: " << *common.seed << "\n";
    for (const auto& od : ods) out << format_od(od, names) << "\n";
    for (const auto& s : stats)
        out << "# level " << s.level << ": nodes=" << s.nodes_generated << " pruned=" << s.nodes_pruned
            << " constant_checks=" << s.constant_checks << " swap_checks=" << s.swap_checks << " keys=" << s.keys_found
            << " ods=" << s.ods_found << "\n";
    out << "# total: " << ods.size() << " ods\n";
    if (common.timing)
        out << "# wall_time_ms: "
            << std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count() << "\n";
    return kOk;
}

// ---- validate ----

struct CheckOutcome {
    CanonicalOD od;
    bool valid = true;
    std::optional<ViolationReport> witnesses;
};

int cmd_validate(const InputFlags& inf, const CommonFlags& common, const std::string& od_text, bool witnesses,
                 bool use_oracle, std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    LoadedInput in = load_input(inf);
    const auto names = attribute_names(in.rel.schema());
    ParsedOD parsed = parse_od(od_text, in.rel.schema());

    std::vector<CanonicalOD> checks;
    std::string normalized;
    bool valid = true;
    if (auto* c = std::get_if<CanonicalOD>(&parsed)) {
        if (c->is_trivial()) throw ParseError("trivial canonical OD rejected: " + format_od(*c, names));
        checks.push_back(*c);
        normalized = format_od(*c, names);
    } else {
        auto& l = std::get<ListOD>(parsed);
        l.lhs = normalize_spec(l.lhs);
        l.rhs = normalize_spec(l.rhs);
        checks = map_list_to_canonical(l);
        normalized = format_od(l, names);
        if (use_oracle) valid = oracle::brute_validate_list(in.rel, l);
    }

    std::vector<CheckOutcome> outcomes;
    bool all = true;
    for (const auto& c : checks) {
        CheckOutcome o{c, use_oracle ? oracle::brute_validate_canonical(in.rel, c) : validate_canonical(in.rel, c), {}};
        if (!o.valid && witnesses)
            o.witnesses = c.is_constant() ? find_splits(in.rel, c.context(), AttributeSet::single(c.a()))
                                          : find_swaps(in.rel, c.context(), c.a(), c.b());
        all = all && o.valid;
        outcomes.push_back(std::move(o));
    }
    if (!use_oracle || std::holds_alternative<CanonicalOD>(parsed)) valid = all;

    if (common.format == "json") {
        json report;
        report["command"] = "validate";
        report["input"] = input_json(in);
        report["od"] = normalized;
        report["valid"] = valid;
        json arr = json::array();
        for (const auto& o : outcomes) {
            json j = {{"od", format_od(o.od, names)}, {"valid", o.valid}};
            if (o.witnesses) {
                j["violation"] = o.witnesses->kind == ViolationKind::split ? "split" : "swap";
                j["pairs"] = pairs_json(o.witnesses->pairs);
            }
            arr.push_back(j);
        }
        report["canonical"] = arr;
        emit_json(out, std::move(report), common, started);
    } else {
        text_input_header(out, in);
        out << normalized << ": " << (valid ? "true" : "false") << "\n";
        if (std::holds_alternative<ListOD>(parsed))
            for (const auto& o : outcomes) out << "  " << format_od(o.od, names) << ": " << (o.valid ? "true" : "false") << "\n";
        for (const auto& o : outcomes)
            if (o.witnesses)
                out << "  " << (o.witnesses->kind == ViolationKind::split ? "splits" : "swaps") << " for "
                    << format_od(o.od, names) << ": " << pairs_text(o.witnesses->pairs) << "\n";
    }
    return valid ? kOk : kFalse;
}

// ---- map ----

int cmd_map(const CommonFlags& common, const std::string& od_text, std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    NameTable table;
    ParsedOD parsed = parse_od(od_text, table.resolver());
    auto* l = std::get_if<ListOD>(&parsed);
    if (!l) throw ParseError("map expects a list OD such as [A,B] -> [C,D]");
    auto mapped = map_list_to_canonical(*l);
    const auto& names = table.names();
    if (common.format == "json") {
        json arr = json::array();
        for (const auto& c : mapped) arr.push_back(od_json(c, names));
        emit_json(out, {{"command", "map"}, {"od", format_od(ListOD{normalize_spec(l->lhs), normalize_spec(l->rhs)}, names)}, {"canonical", arr}},
                  common, started);
    } else {
        for (const auto& c : mapped) out << format_od(c, names) << "\n";
        out << "# " << mapped.size() << " canonical ods\n";
    }
    return kOk;
}

// ---- infer ----

struct InferFlags {
    std::string premises_path;
    std::vector<std::string> premises;
    std::vector<std::string> universe;
    std::optional<std::size_t> max_context_size;
    std::optional<std::size_t> max_chain_length;
    bool trace = false;
};

void add_premise(ODSet& set, const ParsedOD& p) {
    if (auto* c = std::get_if<CanonicalOD>(&p)) {
        set.insert(*c);
        return;
    }
    for (const auto& c : map_list_to_canonical(std::get<ListOD>(p))) set.insert(c);
}

std::string describe(const Justification& j, const std::map<CanonicalOD, std::size_t>& index) {
    std::string out = std::string(to_string(j.rule));
    if (j.premises.empty()) return out;
    out += " from";
    for (std::size_t i = 0; i < j.premises.size(); ++i) out += (i ? ", " : " ") + std::to_string(index.at(j.premises[i]));
    return out;
}

int cmd_infer(const CommonFlags& common, const InferFlags& f, const std::string& target_text, std::ostream& out) {
    const auto started = std::chrono::steady_clock::now();
    NameTable table;
    DerivationLimit lim;
    std::vector<std::string> premise_texts = f.premises;
    for (const auto& u : f.universe) table.intern(u);
    if (!f.premises_path.empty()) {
        json doc;
        try {
            doc = json::parse(read_text(f.premises_path));
        } catch (const json::parse_error& e) {
            throw ParseError(std::string("premise file is not valid JSON: ") + e.what());
        }
        if (doc.is_array()) doc = json{{"premises", doc}};
        try {
            if (doc.contains("universe"))
                for (const auto& n : doc.at("universe")) table.intern(n.get<std::string>());
            if (doc.contains("premises"))
                for (const auto& p : doc.at("premises")) premise_texts.push_back(p.get<std::string>());
            if (doc.contains("limits")) {
                const auto& l = doc.at("limits");
                if (l.contains("max_context_size")) lim.max_context_size = l.at("max_context_size").get<std::size_t>();
                if (l.contains("max_chain_length")) lim.max_chain_length = l.at("max_chain_length").get<std::size_t>();
            }
        } catch (const json::exception& e) {
            throw ParseError(std::string("bad premise file: ") + e.what());
        }
    }
    if (f.max_context_size) lim.max_context_size = *f.max_context_size;
    if (f.max_chain_length) lim.max_chain_length = *f.max_chain_length;

    std::vector<ParsedOD> parsed;
    for (const auto& p : premise_texts) parsed.push_back(parse_od(p, table.resolver()));
    std::optional<ParsedOD> target;
    if (!target_text.empty()) target = parse_od(target_text, table.resolver());

    ODSet premises(AttributeSet::first_n(table.names().size()));
    for (const auto& p : parsed) add_premise(premises, p);
    const auto& names = table.names();

    if (!target) {
        ODSet c = closure(premises, lim);
        if (common.format == "json") {
            json arr = json::array();
            for (const auto& od : c) arr.push_back(od_json(od, names));
            emit_json(out, {{"command", "infer"}, {"closure", arr}, {"size", c.size()}}, common, started);
        } else {
            for (const auto& od : c) out << format_od(od, names) << "\n";
            out << "# closure: " << c.size() << " ods\n";
        }
        return kOk;
    }

    std::vector<CanonicalOD> goals;
    if (auto* c = std::get_if<CanonicalOD>(&*target)) goals.push_back(*c);
    else goals = map_list_to_canonical(std::get<ListOD>(*target));

    Answer answer = Answer::yes;
    std::vector<std::pair<CanonicalOD, Justification>> trace;
    std::set<CanonicalOD> traced;
    for (const auto& g : goals) {
        DerivationResult r = derive(premises, g, lim);
        if (r.answer != Answer::yes) {
            answer = r.answer;
            break;
        }
        for (auto& step : r.trace)
            if (traced.insert(step.first).second) trace.push_back(std::move(step));
    }
    const char* verdict = answer == Answer::yes ? "yes" : answer == Answer::no ? "no" : "not derivable within limits";
    std::map<CanonicalOD, std::size_t> index;
    for (std::size_t i = 0; i < trace.size(); ++i) index[trace[i].first] = i + 1;

    if (common.format == "json") {
        json report = {{"command", "infer"},
                       {"target", std::holds_alternative<CanonicalOD>(*target) ? format_od(std::get<CanonicalOD>(*target), names)
                                                                               : format_od(std::get<ListOD>(*target), names)},
                       {"answer", verdict},
                       {"limits", {{"max_context_size", lim.max_context_size}, {"max_chain_length", lim.max_chain_length}}}};
        if (f.trace && answer == Answer::yes) {
            json steps = json::array();
            for (const auto& [od, j] : trace) {
                json prem = json::array();
                for (const auto& p : j.premises) prem.push_back(index.at(p));
                steps.push_back({{"step", index.at(od)}, {"od", format_od(od, names)}, {"rule", to_string(j.rule)}, {"premises", prem}});
            }
            report["trace"] = steps;
        }
        emit_json(out, std::move(report), common, started);
    } else {
        out << verdict << "\n";
        if (f.trace && answer == Answer::yes)
            for (const auto& [od, j] : trace)
                out << "  " << index.at(od) << ". " << format_od(od, names) << "  [" << describe(j, index) << "]\n";
    }
    if (answer == Answer::yes) return kOk;
    return answer == Answer::no ? kFalse : kLimit;
}

void add_input_flags(CLI::App* cmd, InputFlags& f) {
    cmd->add_option("--input", f.input, "CSV file")->required();
    cmd->add_option("--schema", f.schema, "JSON schema file");
    cmd->add_option("--null-policy", f.null_policy, "Override the schema's null policy")
        ->check(CLI::IsMember({"first", "last", "reject", "nulls_first", "nulls_last"}));
    cmd->add_flag("--infer-schema", f.infer_schema, "Guess column types when no schema is given");
    cmd->add_flag("--no-header", f.no_header, "The CSV has no header row");
}

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--format", f.format, "text or json")->check(CLI::IsMember({"text", "json"}));
    cmd->add_option("--seed", f.seed, "Echoed in the report; the algorithms are deterministic");
    cmd->add_flag("--timing", f.timing, "Report wall time");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Order dependency discovery, validation, mapping and inference"};
    app.name("fastod");
    app.require_subcommand(1);

    InputFlags inf;
    CommonFlags common;
    DiscoverFlags df;
    std::string od_text;
    bool witnesses = false;
    bool validate_oracle = false;
    InferFlags ifl;
    std::string target;

    auto* discover = app.add_subcommand("discover", "Discover the minimal set of canonical ODs");
    add_input_flags(discover, inf);
    add_common_flags(discover, common);
    discover->add_option("--max-level", df.max_level, "Largest lattice level to visit")->check(CLI::PositiveNumber);
    discover->add_flag("--no-prune", df.no_prune, "Disable node pruning and key shortcuts");
    discover->add_flag("--oracle", df.oracle, "Use the brute-force reference instead");
    discover->add_option("--threads", df.threads, "Worker threads within a level")->check(CLI::Range(1, 256));

    auto* validate = app.add_subcommand("validate", "Check one OD against the data");
    validate->add_option("od", od_text, "OD text")->required();
    add_input_flags(validate, inf);
    add_common_flags(validate, common);
    validate->add_flag("--witnesses", witnesses, "List split or swap pairs");
    validate->add_flag("--oracle", validate_oracle, "Validate by pairwise enumeration");

    auto* map = app.add_subcommand("map", "Map a list OD to canonical ODs");
    map->add_option("od", od_text, "List OD text")->required();
    add_common_flags(map, common);

    auto* infer = app.add_subcommand("infer", "Derive canonical ODs from premises");
    infer->add_option("target", target, "Target OD; omit to print the closure");
    infer->add_option("--premises", ifl.premises_path, "JSON file with universe, premises and limits");
    infer->add_option("--premise", ifl.premises, "Premise OD text (repeatable)")->allow_extra_args(false);
    infer->add_option("--universe", ifl.universe, "Attribute names (repeatable)")->allow_extra_args(false);
    infer->add_option("--max-context-size", ifl.max_context_size, "Largest context of a derived OD");
    infer->add_option("--max-chain-length", ifl.max_chain_length, "Longest Chain instance");
    infer->add_flag("--trace", ifl.trace, "Print one derivation");
    add_common_flags(infer, common);

    std::vector<std::string> argv_storage{"fastod"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : argv_storage) argv.push_back(s.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (discover->parsed()) return cmd_discover(inf, common, df, out);
        if (validate->parsed()) return cmd_validate(inf, common, od_text, witnesses, validate_oracle, out);
        if (map->parsed()) return cmd_map(common, od_text, out);
        if (infer->parsed()) return cmd_infer(common, ifl, target, out);
    } catch (const oracle::BudgetExceeded& e) {
        err << "error: " << e.what() << "\n";
        return kLimit;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}

}  // namespace fastod::cli
