#include "qsd/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "qsd/error.hpp"
#include "qsd/serialize.hpp"

namespace qsd {

namespace {

// Missing or contradictory arguments; maps to exit code 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::string command;
    std::string scheme;
    std::optional<double> gamma;
    std::optional<double> alpha;
    std::optional<double> x0;
    std::optional<double> x1;
    std::optional<Complex> c_plus;
    std::optional<Complex> c_minus;
    std::optional<std::array<Complex, 3>> overlaps;
    std::vector<double> priors;
    std::map<std::string, GridRange> grid;
    std::optional<std::string> theorem;
    std::optional<double> prior_step;
    bool all_priors = false;
    bool allow_trivial = false;
    std::uint64_t n = 1'000'000;
    std::uint64_t seed = 0;
    std::string output = "-";
    std::string format;
};

// Raw flag text, before parsing into RunConfig.
struct Flags {
    std::optional<std::string> config;
    std::optional<std::string> scheme;
    std::optional<double> gamma;
    std::optional<double> alpha;
    std::optional<double> x0;
    std::optional<double> x1;
    std::optional<std::string> c_plus;
    std::optional<std::string> c_minus;
    std::optional<std::string> overlaps;
    std::optional<std::string> priors;
    std::vector<std::string> grid;
    std::optional<std::string> gamma_grid;
    std::optional<std::string> theorem;
    std::optional<double> prior_step;
    bool all_priors = false;
    bool allow_trivial = false;
    std::optional<std::uint64_t> n;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output;
    std::optional<std::string> format;
};

double parse_real(const std::string& text) {
    std::istringstream in(text);
    double num = 0.0;
    if (!(in >> num)) {
        throw UsageError("not a number: '" + text + "'");
    }
    if (in.peek() == '/') {
        in.get();
        double den = 0.0;
        if (!(in >> den) || den == 0.0) {
            throw UsageError("bad fraction: '" + text + "'");
        }
        num /= den;
    }
    if (!(in >> std::ws).eof()) {
        throw UsageError("trailing characters in '" + text + "'");
    }
    return num;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, sep)) {
        parts.push_back(item);
    }
    if (!text.empty() && text.back() == sep) {
        parts.emplace_back();
    }
    return parts;
}

// "re" or "re:im"
Complex parse_complex(const std::string& text) {
    const auto parts = split(text, ':');
    if (parts.size() == 1) {
        return {parse_real(parts[0]), 0.0};
    }
    if (parts.size() == 2) {
        return {parse_real(parts[0]), parse_real(parts[1])};
    }
    throw UsageError("complex values look like re or re:im, got '" + text + "'");
}

std::vector<double> parse_priors(const std::string& text) {
    std::vector<double> out;
    for (const auto& part : split(text, ',')) {
        out.push_back(parse_real(part));
    }
    return out;
}

std::array<Complex, 3> parse_overlaps(const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 3) {
        throw UsageError("--overlaps takes g01,g12,g20");
    }
    return {parse_complex(parts[0]), parse_complex(parts[1]), parse_complex(parts[2])};
}

GridRange parse_range(const std::string& text) {
    try {
        return GridRange::parse(text);
    } catch (const Error& e) {
        throw UsageError(e.detail());
    }
}

std::pair<std::string, GridRange> parse_grid_entry(const std::string& text) {
    const auto eq = text.find('=');
    if (eq == std::string::npos || eq == 0) {
        throw UsageError("--grid takes name=min:max:step, got '" + text + "'");
    }
    return {text.substr(0, eq), parse_range(text.substr(eq + 1))};
}

void load_config(const std::string& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) {
        throw UsageError("cannot read config '" + path + "'");
    }
    Json j;
    try {
        j = Json::parse(in);
    } catch (const Json::exception& e) {
        throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        if (j.contains("command")) {
            cfg.command = j.at("command").get<std::string>();
        }
        if (j.contains("scheme")) {
            cfg.scheme = j.at("scheme").get<std::string>();
        }
        if (j.contains("params")) {
            const auto& p = j.at("params");
            if (p.contains("gamma")) cfg.gamma = p.at("gamma").get<double>();
            if (p.contains("alpha")) cfg.alpha = p.at("alpha").get<double>();
            if (p.contains("x0")) cfg.x0 = p.at("x0").get<double>();
            if (p.contains("x1")) cfg.x1 = p.at("x1").get<double>();
            if (p.contains("c_plus")) cfg.c_plus = complex_from_json(p.at("c_plus"));
            if (p.contains("c_minus")) cfg.c_minus = complex_from_json(p.at("c_minus"));
            if (p.contains("overlaps")) {
                const auto& o = p.at("overlaps");
                if (!o.is_array() || o.size() != 3) {
                    throw UsageError("config params.overlaps must hold three entries");
                }
                cfg.overlaps = {complex_from_json(o[0]), complex_from_json(o[1]), complex_from_json(o[2])};
            }
        }
        if (j.contains("priors")) {
            cfg.priors = j.at("priors").get<std::vector<double>>();
        }
        if (j.contains("grid")) {
            for (const auto& [name, g] : j.at("grid").items()) {
                GridRange r{g.at("min").get<double>(), g.at("max").get<double>(), g.at("step").get<double>()};
                try {
                    r.values();
                } catch (const Error& e) {
                    throw UsageError("config grid '" + name + "': " + e.detail());
                }
                cfg.grid[name] = r;
            }
        }
        if (j.contains("theorem")) cfg.theorem = j.at("theorem").get<std::string>();
        if (j.contains("prior_step")) cfg.prior_step = j.at("prior_step").get<double>();
        if (j.contains("all_priors")) cfg.all_priors = j.at("all_priors").get<bool>();
        if (j.contains("allow_trivial")) cfg.allow_trivial = j.at("allow_trivial").get<bool>();
        if (j.contains("n")) cfg.n = j.at("n").get<std::uint64_t>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("output")) cfg.output = j.at("output").get<std::string>();
        if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    } catch (const Json::exception& e) {
        throw UsageError("bad config field: " + std::string(e.what()));
    }
}

RunConfig resolve(const std::string& command, const Flags& f) {
    RunConfig cfg;
    if (f.config) {
        load_config(*f.config, cfg);
        if (!cfg.command.empty() && cfg.command != command) {
            throw UsageError("config is for '" + cfg.command + "', not '" + command + "'");
        }
    }
    cfg.command = command;
    if (f.scheme) cfg.scheme = *f.scheme;
    if (f.gamma) cfg.gamma = f.gamma;
    if (f.alpha) cfg.alpha = f.alpha;
    if (f.x0) cfg.x0 = f.x0;
    if (f.x1) cfg.x1 = f.x1;
    if (f.c_plus) cfg.c_plus = parse_complex(*f.c_plus);
    if (f.c_minus) cfg.c_minus = parse_complex(*f.c_minus);
    if (f.overlaps) cfg.overlaps = parse_overlaps(*f.overlaps);
    if (f.priors) cfg.priors = parse_priors(*f.priors);
    for (const auto& entry : f.grid) {
        auto [name, range] = parse_grid_entry(entry);
        cfg.grid.insert_or_assign(name, range);
    }
    if (f.gamma_grid) cfg.grid.insert_or_assign("gamma", parse_range(*f.gamma_grid));
    if (f.theorem) cfg.theorem = f.theorem;
    if (f.prior_step) cfg.prior_step = f.prior_step;
    cfg.all_priors = cfg.all_priors || f.all_priors;
    cfg.allow_trivial = cfg.allow_trivial || f.allow_trivial;
    if (f.n) cfg.n = *f.n;
    if (f.seed) cfg.seed = *f.seed;
    if (f.output) cfg.output = *f.output;
    if (f.format) cfg.format = *f.format;
    if (!cfg.format.empty() && cfg.format != "json" && cfg.format != "csv") {
        throw UsageError("--format must be json or csv");
    }
    return cfg;
}

template <typename T>
T require(const std::optional<T>& v, const char* flag, const std::string& scheme) {
    if (!v) {
        throw UsageError(std::string("scheme '") + scheme + "' needs " + flag);
    }
    return *v;
}

Scheme build_scheme(const RunConfig& cfg) {
    if (cfg.scheme.empty()) {
        throw UsageError("--scheme is required");
    }
    if (cfg.priors.empty()) {
        throw UsageError("--priors is required");
    }
    const BuildOptions opts{cfg.allow_trivial};
    const auto& id = cfg.scheme;
    if (id == "mixed-special") {
        return build_mixed_special(require(cfg.gamma, "--gamma", id), cfg.priors, opts);
    }
    if (id == "mixed-general") {
        return build_mixed_general(require(cfg.gamma, "--gamma", id), require(cfg.alpha, "--alpha", id),
                                   cfg.priors, opts);
    }
    if (id == "unambiguous-special") {
        return build_unambiguous_special(require(cfg.gamma, "--gamma", id), require(cfg.x0, "--x0", id),
                                         require(cfg.x1, "--x1", id), cfg.priors, opts);
    }
    if (id == "zero-aux") {
        const auto o = require(cfg.overlaps, "--overlaps", id);
        return build_zero_aux(o[0], o[1], o[2], cfg.priors);
    }
    if (id == "rra") {
        return build_rra(require(cfg.c_plus, "--c-plus", id), require(cfg.c_minus, "--c-minus", id), cfg.priors);
    }
    throw UsageError("unknown scheme '" + id +
                     "' (expected rra, mixed-special, mixed-general, unambiguous-special, zero-aux)");
}

double pipeline_success(const Scheme& s) { return success_ambiguous(s.coupled_ensemble(), s.povm); }

Json table_json(const ProbabilityTable& t) {
    Json rows = Json::array();
    for (const auto& row : t) {
        rows.push_back(row);
    }
    return rows;
}

Json labels_json(const Povm& p) {
    Json labels = Json::array();
    for (const auto& l : p.labels()) {
        labels.push_back(l.to_string());
    }
    return labels;
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
        out.flush();
        return;
    }
    namespace fs = std::filesystem;
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw UsageError("cannot write '" + tmp.string() + "'");
        }
        f << text;
        if (!f.flush()) {
            throw UsageError("write to '" + tmp.string() + "' failed");
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw UsageError("cannot move output into '" + path + "'");
    }
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

std::string key_value_csv(const std::vector<std::pair<std::string, double>>& rows) {
    std::string s = "metric,value\n";
    for (const auto& [k, v] : rows) {
        s += k + "," + format_number(v) + "\n";
    }
    return s;
}

std::string cmd_validate(const RunConfig& cfg) {
    const Scheme s = build_scheme(cfg);
    const double unitarity = unitarity_residual(s.coupling);
    const double povm = s.povm.completeness_residual();
    const double pipeline = pipeline_success(s);
    const double delta = std::abs(pipeline - s.analytic_success);
    std::optional<UnambiguityReport> una;
    if (s.povm.inconclusive_outcome()) {
        una = unambiguity_check(s.coupled_ensemble(), s.povm);
    }
    if (cfg.format == "csv") {
        std::vector<std::pair<std::string, double>> rows = {{"unitarity_residual", unitarity},
                                                            {"povm_residual", povm},
                                                            {"analytic_success", s.analytic_success},
                                                            {"pipeline_success", pipeline},
                                                            {"pipeline_analytic_delta", delta}};
        if (una) {
            rows.emplace_back("unambiguity_max_cross", una->max_cross);
        }
        return key_value_csv(rows);
    }
    Json j = {{"kind", scheme_kind(s.params)},
              {"params", to_json(s.params)},
              {"unitarity_residual", unitarity},
              {"povm_residual", povm},
              {"analytic_success", s.analytic_success},
              {"pipeline_success", pipeline},
              {"pipeline_analytic_delta", delta}};
    if (una) {
        j["unambiguous"] = una->unambiguous;
        j["unambiguity_max_cross"] = una->max_cross;
    }
    return dump_json(j);
}

std::string cmd_run(const RunConfig& cfg) {
    const Scheme s = build_scheme(cfg);
    const auto table = confusion_matrix(s.coupled_ensemble(), s.povm);
    const double pipeline = pipeline_success(s);
    if (cfg.format == "csv") {
        std::string text = "state";
        for (const auto& l : s.povm.labels()) {
            text += "," + l.to_string();
        }
        text += "\n";
        for (std::size_t i = 0; i < table.size(); ++i) {
            text += std::to_string(i);
            for (double v : table[i]) {
                text += "," + format_number(v);
            }
            text += "\n";
        }
        return text;
    }
    Json j = {{"kind", scheme_kind(s.params)},
              {"params", to_json(s.params)},
              {"priors", s.ensemble.priors},
              {"analytic_success", s.analytic_success},
              {"pipeline_success", pipeline},
              {"labels", labels_json(s.povm)},
              {"confusion_matrix", table_json(table)},
              {"joint_dim", s.joint_dim()}};
    if (!s.branch_note.empty()) {
        j["branch_note"] = s.branch_note;
    }
    if (std::holds_alternative<ZeroAuxParams>(s.params)) {
        j["posterior_inconclusive_is_2"] = zero_aux_posterior(s);
    }
    return dump_json(j);
}

std::string cmd_simulate(const RunConfig& cfg) {
    const Scheme s = build_scheme(cfg);
    const SimResult r = simulate(s, cfg.n, cfg.seed);
    if (cfg.format == "csv") {
        return key_value_csv({{"n", static_cast<double>(r.n)},
                              {"seed", static_cast<double>(r.seed)},
                              {"empirical_success", r.empirical_success},
                              {"std_error", r.std_error},
                              {"analytic_success", s.analytic_success}});
    }
    Json j = to_json(r);
    j["kind"] = scheme_kind(s.params);
    j["analytic_success"] = s.analytic_success;
    j["labels"] = labels_json(s.povm);
    return dump_json(j);
}

std::string cmd_dump(const RunConfig& cfg) {
    const Scheme s = build_scheme(cfg);
    if (cfg.format == "csv") {
        throw UsageError("dump only writes JSON");
    }
    return dump_json(to_json(s));
}

// Scans one scheme parameter and tabulates analytic and pipeline success.
std::string cmd_sweep(const RunConfig& cfg, std::ostream& err) {
    if (cfg.grid.size() != 1) {
        throw UsageError("sweep needs exactly one --grid name=min:max:step");
    }
    const auto& [name, range] = *cfg.grid.begin();
    static const std::vector<std::string> known = {"gamma", "alpha", "x0", "x1"};
    if (std::find(known.begin(), known.end(), name) == known.end()) {
        throw UsageError("cannot sweep '" + name + "' (expected gamma, alpha, x0 or x1)");
    }
    const auto values = range.values();
    std::vector<std::pair<double, Scheme>> rows;
    std::size_t skipped = 0;
    for (double v : values) {
        RunConfig point = cfg;
        if (name == "gamma") point.gamma = v;
        if (name == "alpha") point.alpha = v;
        if (name == "x0") point.x0 = v;
        if (name == "x1") point.x1 = v;
        try {
            rows.emplace_back(v, build_scheme(point));
        } catch (const Error&) {
            ++skipped;
        }
    }
    if (rows.empty()) {
        throw Error(ErrorCode::EmptyGrid, "no grid point gives a valid scheme");
    }
    err << "points: " << rows.size() << "\nskipped: " << skipped << "\n";
    if (cfg.format == "json") {
        Json arr = Json::array();
        for (const auto& [v, s] : rows) {
            arr.push_back({{name, v},
                           {"analytic_success", s.analytic_success},
                           {"pipeline_success", pipeline_success(s)},
                           {"branch_note", s.branch_note}});
        }
        return dump_json(arr);
    }
    std::string text = name + ",analytic_success,pipeline_success,branch_note\n";
    for (const auto& [v, s] : rows) {
        text += format_number(v) + "," + format_number(s.analytic_success) + "," +
                format_number(pipeline_success(s)) + "," + s.branch_note + "\n";
    }
    return text;
}

std::string cmd_compare(const RunConfig& cfg, std::ostream& err) {
    if (!cfg.theorem) {
        throw UsageError("compare needs --theorem 2.1 or 3.1");
    }
    const SweepKind kind = parse_sweep_kind(*cfg.theorem);
    GridRange gammas = kind == SweepKind::Theorem21 ? GridRange{0.05, 0.7, 0.05} : GridRange{0.0, 0.95, 0.05};
    if (auto it = cfg.grid.find("gamma"); it != cfg.grid.end()) {
        gammas = it->second;
    }
    const auto gamma_values = gammas.values();
    const auto priors = simplex_grid(cfg.prior_step.value_or(0.05));
    const SweepResult result = sweep(kind, gamma_values, priors, !cfg.all_priors);

    std::size_t failures = 0;
    double min_margin = INFINITY;
    std::map<std::string, std::size_t> cases;
    for (const auto& r : result.records) {
        failures += r.verdict ? 0 : 1;
        min_margin = std::min(min_margin, r.margin);
        if (!r.xu_case.empty()) {
            ++cases[r.xu_case];
        }
    }
    err << "total: " << result.records.size() << "\nfailures: " << failures
        << "\nmin_margin: " << format_number(min_margin) << "\nskipped: " << result.skipped << "\n";
    if (!cases.empty()) {
        err << "cases:";
        for (const auto& [tag, count] : cases) {
            err << ' ' << tag << '=' << count;
        }
        err << "\n";
    }

    if (cfg.format == "json") {
        Json arr = Json::array();
        for (const auto& r : result.records) {
            arr.push_back(to_json(r));
        }
        Json j = {{"records", std::move(arr)},
                  {"summary",
                   {{"total", result.records.size()},
                    {"failures", failures},
                    {"min_margin", min_margin},
                    {"skipped", result.skipped},
                    {"cases", cases}}}};
        return dump_json(j);
    }
    std::string text = csv_header() + "\n";
    for (const auto& r : result.records) {
        text += to_csv_row(r) + "\n";
    }
    return text;
}

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "JSON file with defaults for any flag");
    sub->add_option("--scheme", f.scheme, "rra | mixed-special | mixed-general | unambiguous-special | zero-aux");
    sub->add_option("--gamma", f.gamma);
    sub->add_option("--alpha", f.alpha);
    sub->add_option("--x0", f.x0);
    sub->add_option("--x1", f.x1);
    sub->add_option("--c-plus", f.c_plus, "re or re:im");
    sub->add_option("--c-minus", f.c_minus, "re or re:im");
    sub->add_option("--overlaps", f.overlaps, "g01,g12,g20, each re or re:im");
    sub->add_option("--priors", f.priors, "comma-separated, fractions like 1/3 accepted");
    sub->add_flag("--allow-trivial", f.allow_trivial, "admit degenerate parameters");
    sub->add_option("-o,--output", f.output, "output path, '-' for stdout");
    sub->add_option("--format", f.format)->check(CLI::IsMember({"json", "csv"}));
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Quantum state discrimination schemes: build, validate, simulate, compare"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all");

    Flags f;
    struct Sub {
        const char* name;
        const char* help;
        const char* default_format;
    };
    const Sub subs[] = {
        {"validate", "Rebuild a scheme and report residuals", "json"},
        {"run", "Build a scheme and report success and confusion matrix", "json"},
        {"sweep", "Tabulate success over one parameter grid", "csv"},
        {"simulate", "Monte-Carlo estimate of the success probability", "json"},
        {"compare", "Check mixed against unambiguous success over a grid", "csv"},
        {"dump", "Write the full scheme as JSON", "json"},
    };
    std::map<std::string, CLI::App*> handles;
    for (const auto& s : subs) {
        CLI::App* sub = app.add_subcommand(s.name, s.help);
        add_common(sub, f);
        handles[s.name] = sub;
    }
    handles["sweep"]->add_option("--grid", f.grid, "name=min:max:step");
    handles["simulate"]->add_option("--n", f.n, "number of trials");
    handles["simulate"]->add_option("--seed", f.seed);
    handles["compare"]->add_option("--theorem", f.theorem, "2.1 or 3.1");
    handles["compare"]->add_option("--gamma-grid", f.gamma_grid, "min:max:step");
    handles["compare"]->add_option("--prior-step", f.prior_step, "simplex lattice step");
    handles["compare"]->add_flag("--all-priors", f.all_priors, "do not restrict 2.1 to its hypothesis");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    std::string command;
    const char* default_format = "json";
    for (const auto& s : subs) {
        if (handles[s.name]->parsed()) {
            command = s.name;
            default_format = s.default_format;
        }
    }

    try {
        RunConfig cfg = resolve(command, f);
        if (cfg.format.empty()) {
            cfg.format = default_format;
        }
        std::string text;
        if (command == "validate") text = cmd_validate(cfg);
        else if (command == "run") text = cmd_run(cfg);
        else if (command == "sweep") text = cmd_sweep(cfg, err);
        else if (command == "simulate") text = cmd_simulate(cfg);
        else if (command == "compare") text = cmd_compare(cfg, err);
        else text = cmd_dump(cfg);
        write_output(cfg.output, text, out);
        return kExitOk;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << Json{{"error", std::string(e.name())}, {"message", e.detail()}}.dump() << "\n";
        return kExitDomain;
    }
}

} // namespace qsd
