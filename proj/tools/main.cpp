// anytime: streaming sequential-inference toolkit.
//
// Subcommands: simulate (run one instrument over one sampled path), verify
// (Monte Carlo verification suites), tree (exact rational tree tools).
// All outputs are deterministic functions of the configuration and seed;
// wall-clock timings go to stderr only.

#include <anytime/gaussian.hpp>
#include <anytime/harness.hpp>
#include <anytime/model.hpp>
#include <anytime/symmetry.hpp>
#include <anytime/tree.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace {

using anytime::Rat;
using nlohmann::json;

// data or domain problem discovered after a valid parse; maps to exit 1
struct CheckFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string g17(double x) { return anytime::Report::fmt_g17(x); }

void write_output(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open output file: " + out_path);
    f << text;
}

std::string read_input(const std::string& in_path) {
    if (in_path.empty() || in_path == "-") {
        return std::string(std::istreambuf_iterator<char>(std::cin),
                           std::istreambuf_iterator<char>());
    }
    std::ifstream f(in_path, std::ios::binary);
    if (!f) throw std::invalid_argument("cannot open input file: " + in_path);
    return std::string(std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>());
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double num(const std::string& s, const std::string& what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument(what + ": not a number: '" + s + "'");
    }
}

// model spec grammar:
//   rademacher[:m] | gauss:m,sigma | twopoint:m,eta | cauchy[:m]
//   | student:df | student:m,df | bernoulli:q | gaussvar:m,rule[,sigma]
anytime::NullModel parse_model(const std::string& spec) {
    using anytime::NullModel;
    auto head_rest = split(spec, ':');
    if (head_rest.size() > 2) throw std::invalid_argument("model: too many ':' in '" + spec + "'");
    const std::string& head = head_rest[0];
    std::vector<std::string> args;
    if (head_rest.size() == 2) args = split(head_rest[1], ',');

    auto want = [&](std::size_t lo, std::size_t hi) {
        if (args.size() < lo || args.size() > hi)
            throw std::invalid_argument("model '" + head + "': wrong number of arguments");
    };
    if (head == "rademacher") {
        if (head_rest.size() == 1) return NullModel::rademacher(0.0);
        want(1, 1);
        return NullModel::rademacher(num(args[0], "model rademacher"));
    }
    if (head == "gauss") {
        want(2, 2);
        return NullModel::gaussian(num(args[0], "model gauss"), num(args[1], "model gauss"));
    }
    if (head == "twopoint") {
        want(2, 2);
        return NullModel::two_point(num(args[0], "model twopoint"), num(args[1], "model twopoint"));
    }
    if (head == "cauchy") {
        if (head_rest.size() == 1) return NullModel::heavy_tail(0.0, NullModel::Tail::cauchy);
        want(1, 1);
        return NullModel::heavy_tail(num(args[0], "model cauchy"), NullModel::Tail::cauchy);
    }
    if (head == "student") {
        want(1, 2);
        double m = args.size() == 2 ? num(args[0], "model student") : 0.0;
        double df = num(args.back(), "model student");
        if (df != std::floor(df) || df < 1)
            throw std::invalid_argument("model student: df must be a positive integer");
        return NullModel::heavy_tail(m, NullModel::Tail::student_t, static_cast<int>(df));
    }
    if (head == "bernoulli") {
        want(1, 1);
        return NullModel::bernoulli_first(num(args[0], "model bernoulli"));
    }
    if (head == "gaussvar") {
        want(2, 3);
        double m = num(args[0], "model gaussvar");
        anytime::VarianceRule rule;
        if (args[1] == "constant") rule = anytime::VarianceRule::constant;
        else if (args[1] == "abs") rule = anytime::VarianceRule::abs;
        else if (args[1] == "square") rule = anytime::VarianceRule::square;
        else if (args[1] == "affine") rule = anytime::VarianceRule::affine;
        else throw std::invalid_argument("model gaussvar: unknown rule '" + args[1] + "'");
        double sigma = args.size() == 3 ? num(args[2], "model gaussvar") : 1.0;
        return NullModel::gaussian_predictable(m, rule, sigma);
    }
    throw std::invalid_argument(
        "unknown model '" + head +
        "' (expected rademacher, gauss, twopoint, cauchy, student, bernoulli, gaussvar)");
}

// --- simulate ---------------------------------------------------------------

struct SimulateConfig {
    std::string model;
    std::string instrument;
    double alpha = std::numeric_limits<double>::quiet_NaN();
    int T = 1000;
    std::uint64_t seed = 1;
    std::uint64_t stream = 0;
    std::string format = "csv";
    std::string out;
};

const std::vector<std::string> kInstruments = {"signwalk", "gauss-nm", "mixture",
                                               "arctan",   "mirrored", "dyadic-p",
                                               "mixture-cs"};

int cmd_simulate(const SimulateConfig& cfg) {
    if (std::isnan(cfg.alpha)) throw std::invalid_argument("simulate: --alpha is required");
    if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
        throw std::invalid_argument("simulate: --alpha must be in (0, 1]");
    if (cfg.T < 1) throw std::invalid_argument("simulate: --T must be >= 1");
    if (cfg.model.empty()) throw std::invalid_argument("simulate: --model is required");
    if (cfg.format != "csv" && cfg.format != "jsonl")
        throw std::invalid_argument("simulate: --format must be csv or jsonl");
    anytime::NullModel model = parse_model(cfg.model);
    const std::string& inst = cfg.instrument;
    if (std::find(kInstruments.begin(), kInstruments.end(), inst) == kInstruments.end())
        throw std::invalid_argument("simulate: unknown instrument '" + inst + "'");

    anytime::PathSampler sampler(model, cfg.seed, cfg.stream);
    // Gaussian models report their per-step variance; other models have no
    // variance notion, so the variance-weighted instruments use 1 per step.
    auto step_var = [&sampler]() {
        const double s = sampler.last_sigma_sq();
        return s > 0.0 ? s : 1.0;
    };
    std::string body;
    auto csv_row3 = [&](int t, const std::string& b, const std::string& c) {
        body += std::to_string(t) + ',' + b + ',' + c + '\n';
    };

    try {
        if (inst == "mixture-cs") {
            // anytime-valid interval for the process mean around the running average
            if (cfg.format == "csv") body = "t,center,radius\n";
            double sum = 0.0, V = 0.0;
            for (int t = 1; t <= cfg.T; ++t) {
                sum += sampler.next();
                V += step_var();
                auto iv = anytime::mixture_mean_interval(sum, V, t, cfg.alpha);
                const double center = 0.5 * (iv.lo + iv.hi);
                const double radius = 0.5 * (iv.hi - iv.lo);
                if (cfg.format == "csv") {
                    csv_row3(t, g17(center), g17(radius));
                } else {
                    body += json{{"t", t}, {"center", center}, {"radius", radius}}.dump();
                    body += '\n';
                }
            }
        } else {
            // single e- or p-instrument; reject flag is sticky once triggered
            const bool p_type = inst == "dyadic-p";
            if (cfg.format == "csv") body = "t,value,reject\n";
            const double e_threshold = 1.0 / cfg.alpha;

            long long walk = 1;
            bool walk_absorbed = false;
            anytime::GaussianNm gauss_nm(0.0, 1.0);
            anytime::MixtureNm mixture_nm(0.0, 1.0);
            anytime::OddNm arctan_nm(anytime::OddFactor::arctan());
            anytime::OddNm mirrored_nm(anytime::OddFactor::mirrored_exp());
            anytime::DyadicP dyadic;

            bool rejected = false;
            for (int t = 1; t <= cfg.T; ++t) {
                const double x = sampler.next();
                double value = 0.0;
                if (inst == "signwalk") {
                    if (!walk_absorbed) {
                        walk += x > 0.0 ? 1 : (x < 0.0 ? -1 : 0);
                        if (walk <= 0 || static_cast<double>(walk) >= e_threshold)
                            walk_absorbed = true;
                    }
                    value = static_cast<double>(walk < 0 ? 0 : walk);
                } else if (inst == "gauss-nm") {
                    gauss_nm.step(x, step_var());
                    value = gauss_nm.value();
                } else if (inst == "mixture") {
                    mixture_nm.step(x, step_var());
                    value = mixture_nm.value();
                } else if (inst == "arctan") {
                    arctan_nm.step(x);
                    value = arctan_nm.value();
                } else if (inst == "mirrored") {
                    mirrored_nm.step(x);
                    value = mirrored_nm.value();
                } else {  // dyadic-p
                    dyadic.step(x);
                    value = dyadic.value();
                }
                if (p_type ? value <= cfg.alpha : value >= e_threshold) rejected = true;
                if (cfg.format == "csv") {
                    csv_row3(t, g17(value), rejected ? "1" : "0");
                } else {
                    body += json{{"t", t}, {"value", value}, {"reject", rejected ? 1 : 0}}.dump();
                    body += '\n';
                }
            }
        }
    } catch (const std::domain_error& ex) {
        // the instrument's factor left its valid domain on this data
        throw CheckFailure(std::string("simulate: ") + ex.what());
    }

    write_output(body, cfg.out);
    return 0;
}

json simulate_schema() {
    return json{
        {"subcommand", "simulate"},
        {"formats", {"csv", "jsonl"}},
        {"outputs",
         {{{"instruments", {"signwalk", "gauss-nm", "mixture", "arctan", "mirrored"}},
           {"columns",
            {{{"name", "t"}, {"type", "integer"}, {"description", "time step, 1-based"}},
             {{"name", "value"}, {"type", "number"}, {"description", "e-process value"}},
             {{"name", "reject"},
              {"type", "integer"},
              {"description", "1 once the value has reached 1/alpha, sticky"}}}}},
          {{"instruments", {"dyadic-p"}},
           {"columns",
            {{{"name", "t"}, {"type", "integer"}, {"description", "time step, 1-based"}},
             {{"name", "value"}, {"type", "number"}, {"description", "p-process value"}},
             {{"name", "reject"},
              {"type", "integer"},
              {"description", "1 once the value has dropped to alpha, sticky"}}}}},
          {{"instruments", {"mixture-cs"}},
           {"columns",
            {{{"name", "t"}, {"type", "integer"}, {"description", "time step, 1-based"}},
             {{"name", "center"}, {"type", "number"}, {"description", "interval center"}},
             {{"name", "radius"},
              {"type", "number"},
              {"description", "interval half-width"}}}}}}}};
}

// --- verify -----------------------------------------------------------------

struct VerifyConfig {
    std::vector<std::string> suites;
    std::uint64_t seed = 1;
    int threads = 0;  // 0: use hardware concurrency
    bool quick = false;
    std::string format = "json";
    std::string out;
};

int cmd_verify(const VerifyConfig& cfg) {
    if (cfg.format != "json" && cfg.format != "csv")
        throw std::invalid_argument("verify: --format must be json or csv");
    std::vector<std::string> suites = cfg.suites;
    if (suites.empty() || (suites.size() == 1 && suites[0] == "all"))
        suites = anytime::suite_names();
    for (const auto& s : suites)
        if (std::find(anytime::suite_names().begin(), anytime::suite_names().end(), s) ==
            anytime::suite_names().end())
            throw std::invalid_argument("verify: unknown suite '" + s + "'");

    anytime::HarnessOptions opt;
    opt.seed = cfg.seed;
    opt.threads = cfg.threads > 0
                      ? cfg.threads
                      : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    opt.quick = cfg.quick;

    std::vector<anytime::Report> reports;
    bool all_pass = true;
    for (const auto& s : suites) {
        auto t0 = std::chrono::steady_clock::now();
        anytime::Report rep = anytime::run_suite(s, opt);
        rep.wall_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
        all_pass = all_pass && rep.all_pass();
        std::cerr << s << ": " << (rep.all_pass() ? "PASS" : "FAIL") << " (" << rep.rows.size()
                  << " checks, " << rep.wall_ms << " ms)\n";
        for (const auto& r : rep.rows)
            if (!r.pass)
                std::cerr << "  FAIL " << r.name << ": estimate " << r.estimate << " outside ["
                          << r.lo << ", " << r.hi << "], witness: " << r.witness << "\n";
        reports.push_back(std::move(rep));
    }

    std::string body;
    if (cfg.format == "json") {
        if (reports.size() == 1) {
            body = reports[0].to_json().dump(2) + "\n";
        } else {
            json arr = json::array();
            for (const auto& r : reports) arr.push_back(r.to_json());
            body = json{{"all_pass", all_pass}, {"reports", arr}}.dump(2) + "\n";
        }
    } else {
        for (std::size_t i = 0; i < reports.size(); ++i) {
            std::string csv = reports[i].to_csv();
            if (i > 0) csv.erase(0, csv.find('\n') + 1);  // keep one header row
            body += csv;
        }
    }
    write_output(body, cfg.out);
    return all_pass ? 0 : 1;
}

json verify_schema() {
    return json{
        {"subcommand", "verify"},
        {"formats", {"json", "csv"}},
        {"report",
         {{"suite", "string"},
          {"seed", "unsigned integer"},
          {"threads", "integer"},
          {"quick", "boolean"},
          {"all_pass", "boolean"},
          {"checks",
           {{"suite", "string"},
            {"name", "string"},
            {"estimate", "number"},
            {"se", "number, 0 for exact checks"},
            {"lo", "number, acceptance lower bound; null for report-only rows"},
            {"hi", "number, acceptance upper bound; null for report-only rows"},
            {"pass", "boolean; for expected_fail rows, true when the raw check failed"},
            {"expected_fail", "boolean, marks negative controls"},
            {"witness", "string, populated when pass is false"},
            {"note", "string"}}}}},
        {"notes", "wall time is reported on stderr only so files are byte-identical per seed"}};
}

// --- tree -------------------------------------------------------------------

struct TreeConfig {
    std::string op;
    std::string in;
    std::string kind = "e";
    std::string out;
};

int cmd_tree(const TreeConfig& cfg) {
    anytime::ParsedTree parsed = anytime::tree_from_text(read_input(cfg.in));
    const anytime::FiniteTree& tree = parsed.tree;
    const std::vector<Rat>& payload = parsed.payload;
    std::ostringstream body;

    if (cfg.op == "snell") {
        auto sr = anytime::snell_doob(tree, payload);
        body << "# id parent prob payload envelope martingale compensator\n";
        for (int v = 0; v < tree.size(); ++v) {
            const auto& n = tree.nodes[static_cast<std::size_t>(v)];
            body << v << ' ' << n.parent << ' ' << anytime::rat_str(n.prob) << ' '
                 << anytime::rat_str(payload[static_cast<std::size_t>(v)]) << ' '
                 << anytime::rat_str(sr.envelope[static_cast<std::size_t>(v)]) << ' '
                 << anytime::rat_str(sr.martingale[static_cast<std::size_t>(v)]) << ' '
                 << anytime::rat_str(sr.compensator[static_cast<std::size_t>(v)]) << '\n';
        }
    } else if (cfg.op == "implied") {
        auto alt = anytime::implied_alternative(tree, payload);
        body << "# id parent prob payload\n";
        for (int v = 0; v < tree.size(); ++v) {
            const auto& n = alt.nodes[static_cast<std::size_t>(v)];
            body << v << ' ' << n.parent << ' ' << anytime::rat_str(n.prob) << ' '
                 << anytime::rat_str(payload[static_cast<std::size_t>(v)]) << '\n';
        }
    } else if (cfg.op == "admissibilize") {
        std::vector<Rat> improved;
        if (cfg.kind == "e") {
            auto bf = anytime::brute_force_safety(tree, payload);
            if (!bf.safe) {
                std::cerr << "not safe: best stopped mean (Snell root) = "
                          << anytime::rat_str(bf.value) << " > 1\n";
                return 1;
            }
            improved = anytime::admissibilize_e(tree, payload);
        } else if (cfg.kind == "p") {
            try {
                improved = anytime::admissibilize_p(tree, payload);
            } catch (const std::invalid_argument& ex) {
                std::cerr << ex.what() << "\n";
                return 1;
            }
        } else {
            throw std::invalid_argument("tree: --kind must be e or p");
        }
        body << "# id parent prob payload admissible\n";
        for (int v = 0; v < tree.size(); ++v) {
            const auto& n = tree.nodes[static_cast<std::size_t>(v)];
            body << v << ' ' << n.parent << ' ' << anytime::rat_str(n.prob) << ' '
                 << anytime::rat_str(payload[static_cast<std::size_t>(v)]) << ' '
                 << anytime::rat_str(improved[static_cast<std::size_t>(v)]) << '\n';
        }
    } else {
        throw std::invalid_argument("tree: unknown operation '" + cfg.op + "'");
    }

    write_output(body.str(), cfg.out);
    return 0;
}

json tree_schema() {
    return json{
        {"subcommand", "tree"},
        {"input",
         "text lines 'id parent prob payload'; '#' comments; ids 0,1,2,... with root first "
         "(parent -1); prob and payload are exact rationals like 3/4 or 2"},
        {"outputs",
         {{{"op", "snell"},
           {"columns", {"id", "parent", "prob", "payload", "envelope", "martingale",
                        "compensator"}}},
          {{"op", "implied"},
           {"columns", {"id", "parent", "prob", "payload"}},
           {"note", "prob holds the implied alternative; payload is the input martingale"}},
          {{"op", "admissibilize"},
           {"columns", {"id", "parent", "prob", "payload", "admissible"}}}}}};
}

// JSON config file: keys matching long flag names; explicit flags win
void merge_config_file(const CLI::App* sub, const std::string& path,
                       const std::map<std::string, std::function<void(const json&)>>& setters) {
    if (path.empty()) return;
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot open config file: " + path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& ex) {
        throw std::invalid_argument("config file " + path + ": " + ex.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config file " + path + ": not a JSON object");
    for (const auto& [key, setter] : setters) {
        if (!j.contains(key)) continue;
        const CLI::Option* opt = sub->get_option_no_throw("--" + key);
        if (opt != nullptr && opt->count() > 0) continue;  // flag overrides file
        try {
            setter(j.at(key));
        } catch (const json::exception& ex) {
            throw std::invalid_argument("config file " + path + ", key '" + key +
                                        "': " + ex.what());
        }
    }
    for (auto it = j.begin(); it != j.end(); ++it)
        if (setters.find(it.key()) == setters.end())
            throw std::invalid_argument("config file " + path + ": unknown key '" + it.key() +
                                        "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anytime-valid sequential inference toolkit"};
    app.require_subcommand(1);

    SimulateConfig sim;
    std::string sim_config_path;
    bool sim_schema = false;
    auto* sim_cmd = app.add_subcommand(
        "simulate", "run one instrument over one sampled path and stream its values");
    sim_cmd->add_option("--model", sim.model,
                        "data model: rademacher[:m], gauss:m,sigma, twopoint:m,eta, cauchy[:m], "
                        "student:[m,]df, bernoulli:q, gaussvar:m,rule[,sigma]");
    sim_cmd->add_option("--instrument", sim.instrument,
                        "one of signwalk, gauss-nm, mixture, arctan, mirrored, dyadic-p, "
                        "mixture-cs");
    sim_cmd->add_option("--alpha", sim.alpha, "error level in (0,1]; required");
    sim_cmd->add_option("--T", sim.T, "horizon (default 1000)");
    sim_cmd->add_option("--seed", sim.seed, "rng seed (default 1, or env ANYTIME_SEED)")
        ->envname("ANYTIME_SEED");
    sim_cmd->add_option("--stream", sim.stream, "rng stream index (default 0)");
    sim_cmd->add_option("--format", sim.format, "csv or jsonl (default csv)");
    sim_cmd->add_option("--out", sim.out, "output path (default stdout)");
    sim_cmd->add_option("--config", sim_config_path, "JSON config file; flags override it");
    sim_cmd->add_flag("--schema", sim_schema, "print the output schema as JSON and exit");

    VerifyConfig ver;
    std::string ver_config_path;
    bool ver_schema = false;
    auto* ver_cmd =
        app.add_subcommand("verify", "run Monte Carlo verification suites and emit a report");
    ver_cmd->add_option("suites", ver.suites,
                        "suites to run: ville, anticoncentration, uniformity, domination, "
                        "stopping-matrix, tree-exact, counterexamples, or all (default all)");
    ver_cmd->add_option("--seed", ver.seed, "rng seed (default 1, or env ANYTIME_SEED)")
        ->envname("ANYTIME_SEED");
    ver_cmd->add_option("--threads", ver.threads,
                        "harness worker threads (default: available cores); results do not "
                        "depend on this");
    ver_cmd->add_flag("--quick", ver.quick, "scaled-down path counts for smoke testing");
    ver_cmd->add_option("--format", ver.format, "json or csv (default json)");
    ver_cmd->add_option("--out", ver.out, "output path (default stdout)");
    ver_cmd->add_option("--config", ver_config_path, "JSON config file; flags override it");
    ver_cmd->add_flag("--schema", ver_schema, "print the report schema as JSON and exit");

    TreeConfig tr;
    bool tree_schema_flag = false;
    auto* tree_cmd = app.add_subcommand(
        "tree", "exact rational tools on finite probability trees with payloads");
    tree_cmd->add_option("op", tr.op, "snell, implied, or admissibilize");
    tree_cmd->add_option("input", tr.in, "tree file ('-' or omitted: stdin)");
    tree_cmd->add_option("--kind", tr.kind,
                         "admissibilize as an e-process (e) or p-process (p); default e");
    tree_cmd->add_option("--out", tr.out, "output path (default stdout)");
    tree_cmd->add_flag("--schema", tree_schema_flag, "print the output schema as JSON and exit");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        if (sim_cmd->parsed()) {
            if (sim_schema) {
                std::cout << simulate_schema().dump(2) << "\n";
                return 0;
            }
            merge_config_file(
                sim_cmd, sim_config_path,
                {{"model", [&](const json& v) { sim.model = v.get<std::string>(); }},
                 {"instrument", [&](const json& v) { sim.instrument = v.get<std::string>(); }},
                 {"alpha", [&](const json& v) { sim.alpha = v.get<double>(); }},
                 {"T", [&](const json& v) { sim.T = v.get<int>(); }},
                 {"seed", [&](const json& v) { sim.seed = v.get<std::uint64_t>(); }},
                 {"stream", [&](const json& v) { sim.stream = v.get<std::uint64_t>(); }},
                 {"format", [&](const json& v) { sim.format = v.get<std::string>(); }},
                 {"out", [&](const json& v) { sim.out = v.get<std::string>(); }}});
            return cmd_simulate(sim);
        }
        if (ver_cmd->parsed()) {
            if (ver_schema) {
                std::cout << verify_schema().dump(2) << "\n";
                return 0;
            }
            merge_config_file(
                ver_cmd, ver_config_path,
                {{"suites",
                  [&](const json& v) {
                      if (ver.suites.empty()) ver.suites = v.get<std::vector<std::string>>();
                  }},
                 {"seed", [&](const json& v) { ver.seed = v.get<std::uint64_t>(); }},
                 {"threads", [&](const json& v) { ver.threads = v.get<int>(); }},
                 {"quick", [&](const json& v) { ver.quick = v.get<bool>(); }},
                 {"format", [&](const json& v) { ver.format = v.get<std::string>(); }},
                 {"out", [&](const json& v) { ver.out = v.get<std::string>(); }}});
            return cmd_verify(ver);
        }
        if (tree_cmd->parsed()) {
            if (tree_schema_flag) {
                std::cout << tree_schema().dump(2) << "\n";
                return 0;
            }
            if (tr.op.empty())
                throw std::invalid_argument("tree: an operation is required (snell, implied, "
                                            "admissibilize)");
            return cmd_tree(tr);
        }
    } catch (const CheckFailure& ex) {
        std::cerr << ex.what() << "\n";
        return 1;
    } catch (const std::invalid_argument& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        const CLI::App* sub = sim_cmd->parsed() ? static_cast<const CLI::App*>(sim_cmd)
                              : ver_cmd->parsed() ? static_cast<const CLI::App*>(ver_cmd)
                                                  : static_cast<const CLI::App*>(tree_cmd);
        std::cerr << sub->help();
        return 2;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
