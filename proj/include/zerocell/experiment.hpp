#pragma once

// Experiment driver behind the command line tool: JSON configs, task
// dispatch, CSV/JSONL outputs written atomically, run manifests with SHA-256
// digests, and merging of finished runs.

#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <openssl/evp.h>

#include <json.hpp>

#include "estimators.hpp"

namespace zerocell {

inline constexpr int config_schema_version = 1;
inline constexpr const char* artifact_version = "1.0.0";

struct ConfigError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

enum class Task { sample, estimate, verify, constants, asymptotics };

struct ExperimentConfig {
    int schema_version = config_schema_version;
    Task task = Task::verify;
    std::optional<int> n;
    std::optional<double> r;
    std::optional<double> alpha, b;
    bool normalized = false;
    double gamma = 1.0;
    std::vector<std::string> functionals;
    std::vector<IdentityRequest> identities;
    std::vector<int> grid;
    std::string target = "gauge"; // asymptotics
    std::string theorem = "vertices";
    double k_or_a = 0.0;
    std::int64_t N = 0;
    std::int64_t c_samples = 1000000;
    int n_dirs = 16;
    std::optional<std::uint64_t> seed;
    std::string output_dir = ".";
    int threads = 0;
    nlohmann::json raw;

    // the resolved model at dimension n (r from alpha, b if given)
    ModelParams params(int dim) const
    {
        const double rr = r ? *r : *b * std::pow(static_cast<double>(dim), *alpha);
        return ModelParams(dim, rr, normalized ? gamma_hat(rr, dim) : gamma);
    }
    ModelParams params() const { return params(*n); }
};

inline std::string task_name(Task t)
{
    switch (t) {
    case Task::sample: return "sample";
    case Task::estimate: return "estimate";
    case Task::verify: return "verify";
    case Task::constants: return "constants";
    case Task::asymptotics: return "asymptotics";
    }
    return "?";
}

namespace detail {

inline double number_field(const nlohmann::json& j, const std::string& key)
{
    if (!j.at(key).is_number()) throw ConfigError("field '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline std::int64_t integer_field(const nlohmann::json& j, const std::string& key)
{
    const double v = number_field(j, key);
    if (v != std::floor(v) || std::abs(v) > 9.0e15) throw ConfigError("field '" + key + "' must be an integer");
    return static_cast<std::int64_t>(v);
}

// argument defaults so that a bare identity name is runnable
inline std::map<std::string, double> default_identity_args(const std::string& id, int n)
{
    if (id == "main" || id == "skel_ratio" || id == "c_bounds") return {{"l", 1}};
    if (id == "fvec_bounds") return {{"l", n}};
    if (id == "r1_F" || id == "r1_fF") return {{"l", 1}, {"j", 0}};
    if (id == "r1_section") return {{"m", n - 1}, {"j", 0}, {"i", 0}};
    if (id == "V1_moments") return {{"m", n}, {"k", 1}};
    if (id == "survival") return {{"s", 1.0}};
    if (id == "section_transfer") return {{"m", n - 1}};
    if (id == "moment_bounds") return {{"m", n - 1}, {"k", 1}};
    return {};
}

} // namespace detail

/// Parses and validates a config. Model fields may sit at the top level or in
/// a "model" object. Errors name the offending field.
inline ExperimentConfig parse_config(const nlohmann::json& j)
{
    using detail::integer_field;
    using detail::number_field;
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.raw = j;
    if (j.contains("schema_version")) {
        c.schema_version = static_cast<int>(integer_field(j, "schema_version"));
        if (c.schema_version != config_schema_version)
            throw ConfigError("field 'schema_version': unsupported version " + std::to_string(c.schema_version));
    }
    const nlohmann::json& m = j.contains("model") ? j.at("model") : j;
    if (!m.is_object()) throw ConfigError("field 'model' must be an object");
    if (m.contains("r") && (m.contains("alpha") || m.contains("b")))
        throw ConfigError("fields 'r' and 'alpha'/'b' are mutually exclusive: give either r or (alpha, b)");
    if (m.contains("r")) c.r = number_field(m, "r");
    if (m.contains("alpha") != m.contains("b")) throw ConfigError("fields 'alpha' and 'b' must be given together");
    if (m.contains("alpha")) {
        c.alpha = number_field(m, "alpha");
        c.b = number_field(m, "b");
        if (!(*c.b > 0.0)) throw ConfigError("field 'b' must be positive");
    }
    if (c.r && !(*c.r > 0.0 && std::isfinite(*c.r))) throw ConfigError("field 'r' must be positive and finite");
    if (m.contains("n")) {
        const auto n = integer_field(m, "n");
        if (n < 2) throw ConfigError("field 'n' must be >= 2");
        if (n > default_max_dim) throw ConfigError("field 'n' exceeds the dimension cap " + std::to_string(default_max_dim));
        c.n = static_cast<int>(n);
    }
    if (m.contains("gamma")) {
        const auto& g = m.at("gamma");
        if (g.is_string()) {
            if (g.get<std::string>() != "normalized")
                throw ConfigError("field 'gamma' must be a positive number or \"normalized\"");
            c.normalized = true;
        } else {
            c.gamma = number_field(m, "gamma");
            if (!(c.gamma > 0.0 && std::isfinite(c.gamma))) throw ConfigError("field 'gamma' must be positive");
        }
    }

    static const std::map<std::string, Task> tasks{{"sample", Task::sample}, {"estimate", Task::estimate},
                                                   {"verify", Task::verify}, {"constants", Task::constants},
                                                   {"asymptotics", Task::asymptotics}};
    if (j.contains("task")) {
        if (!j.at("task").is_string() || !tasks.count(j.at("task").get<std::string>()))
            throw ConfigError("field 'task' must be one of sample, estimate, verify, constants, asymptotics");
        c.task = tasks.at(j.at("task").get<std::string>());
    } else if (j.contains("identities")) {
        c.task = Task::verify;
    } else if (j.contains("functionals")) {
        c.task = Task::estimate;
    } else {
        throw ConfigError("field 'task' is missing");
    }

    const bool needs_n = c.task != Task::asymptotics;
    if (needs_n && !c.n) throw ConfigError("field 'n' is required for task " + task_name(c.task));
    if (c.task != Task::asymptotics && !c.r && !c.alpha)
        throw ConfigError("one of the fields 'r' or ('alpha', 'b') is required");
    if (c.task == Task::asymptotics && !c.alpha) throw ConfigError("task asymptotics needs fields 'alpha' and 'b'");

    if (j.contains("N")) {
        c.N = integer_field(j, "N");
        if (c.N < 2) throw ConfigError("field 'N' must be at least 2");
    } else if (c.task == Task::sample || c.task == Task::estimate || c.task == Task::verify) {
        throw ConfigError("field 'N' is required for task " + task_name(c.task));
    }
    if (j.contains("c_samples")) c.c_samples = integer_field(j, "c_samples");
    if (j.contains("n_dirs")) c.n_dirs = static_cast<int>(integer_field(j, "n_dirs"));
    if (j.contains("seed")) {
        const auto& s = j.at("seed");
        if (!s.is_number_integer()) throw ConfigError("field 'seed' must be a non-negative integer");
        if (s.is_number_unsigned()) c.seed = s.get<std::uint64_t>();
        else if (s.get<std::int64_t>() >= 0) c.seed = static_cast<std::uint64_t>(s.get<std::int64_t>());
        else throw ConfigError("field 'seed' must be a non-negative integer");
    }
    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string()) throw ConfigError("field 'output_dir' must be a string");
        c.output_dir = j.at("output_dir").get<std::string>();
    }
    if (j.contains("threads")) c.threads = static_cast<int>(integer_field(j, "threads"));

    if (j.contains("functionals")) {
        if (!j.at("functionals").is_array()) throw ConfigError("field 'functionals' must be an array of ids");
        for (const auto& f : j.at("functionals")) {
            if (!f.is_string()) throw ConfigError("field 'functionals' must be an array of ids");
            c.functionals.push_back(f.get<std::string>());
        }
    }
    if (c.task == Task::estimate && c.functionals.empty()) throw ConfigError("field 'functionals' is empty");
    if (c.n && (c.task == Task::estimate || c.task == Task::sample))
        for (const auto& f : c.functionals) {
            try {
                resolve_functional(f, *c.n, c.params().r);
            } catch (const std::exception& e) {
                throw ConfigError("field 'functionals': " + std::string(e.what()));
            }
        }

    if (j.contains("identities")) {
        if (!j.at("identities").is_array()) throw ConfigError("field 'identities' must be an array");
        for (const auto& e : j.at("identities")) {
            IdentityRequest q;
            if (e.is_string()) {
                q.id = e.get<std::string>();
            } else if (e.is_object() && e.contains("id") && e.at("id").is_string()) {
                q.id = e.at("id").get<std::string>();
                for (const auto& [k, v] : e.items())
                    if (k != "id") {
                        if (!v.is_number()) throw ConfigError("field 'identities': argument '" + k + "' must be a number");
                        q.args[k] = v.get<double>();
                    }
            } else {
                throw ConfigError("field 'identities': entries are names or objects with an 'id'");
            }
            bool known = false;
            for (const auto& ce : identity_catalogue()) known = known || ce.id == q.id;
            if (!known) throw ConfigError("field 'identities': unknown identity '" + q.id + "'");
            for (const auto& [k, v] : detail::default_identity_args(q.id, c.n.value_or(2)))
                if (!q.args.count(k)) q.args[k] = v;
            c.identities.push_back(q);
        }
    }
    if (c.task == Task::verify && c.identities.empty()) throw ConfigError("field 'identities' is empty");

    if (j.contains("grid")) {
        if (!j.at("grid").is_array()) throw ConfigError("field 'grid' must be an array of dimensions");
        for (const auto& g : j.at("grid")) {
            if (!g.is_number_integer() || g.get<int>() < 2) throw ConfigError("field 'grid' entries must be integers >= 2");
            c.grid.push_back(g.get<int>());
        }
    }
    if (c.task == Task::asymptotics && c.grid.empty()) throw ConfigError("field 'grid' is required for asymptotics");
    if (j.contains("target")) c.target = j.at("target").get<std::string>();
    if (j.contains("theorem")) c.theorem = j.at("theorem").get<std::string>();
    if (j.contains("k_or_a")) c.k_or_a = number_field(j, "k_or_a");
    if (c.task == Task::asymptotics) {
        static const std::set<std::string> targets{"gauge", "sectional_variance", "H_rate", "nthroot_f",
                                                   "sectional_limit"};
        if (!targets.count(c.target)) throw ConfigError("field 'target': unknown trend target '" + c.target + "'");
        static const std::set<std::string> thms{"vertices", "fixed_codim", "proportional"};
        if (!thms.count(c.theorem)) throw ConfigError("field 'theorem': unknown value '" + c.theorem + "'");
        if (c.target == "sectional_variance" && c.N == 0) throw ConfigError("field 'N' is required for sectional_variance");
    }
    if (c.n && c.task != Task::asymptotics) {
        try {
            (void)c.params();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
    }
    return c;
}

// ---------------------------------------------------------------- output

inline std::string format_number(double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

/// RFC 4180 table: CRLF line ends, quoted fields where needed.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const
    {
        std::string s;
        auto line = [&](const std::vector<std::string>& r) {
            for (std::size_t i = 0; i < r.size(); ++i) s += (i ? "," : "") + csv_field(r[i]);
            s += "\r\n";
        };
        line(header);
        for (const auto& r : rows) line(r);
        return s;
    }
};

inline std::vector<std::vector<std::string>> parse_csv(const std::string& text)
{
    std::vector<std::vector<std::string>> out;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        if (quoted) {
            if (ch == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += ch;
            }
            continue;
        }
        if (ch == '"') {
            quoted = any = true;
        } else if (ch == ',') {
            row.push_back(field);
            field.clear();
            any = true;
        } else if (ch == '\r' || ch == '\n') {
            if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            row.push_back(field);
            out.push_back(row);
            row.clear();
            field.clear();
            any = false;
        } else {
            field += ch;
            any = true;
        }
    }
    if (any || !field.empty() || !row.empty()) {
        row.push_back(field);
        out.push_back(row);
    }
    return out;
}

inline std::string sha256_hex(const std::string& data)
{
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
        throw std::runtime_error("SHA-256 digest failed");
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
    return os.str();
}

inline std::string read_file(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + p.string());
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

/// Writes via a temporary file and rename; the target never holds a partial file.
inline void write_atomic(const std::filesystem::path& p, const std::string& data)
{
    auto tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << data;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("write failed for " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, p);
}

inline std::string utc_now()
{
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// ---------------------------------------------------------------- tasks

struct Verdict {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunResult {
    nlohmann::json manifest;
    std::vector<Verdict> verdicts;
    bool all_pass() const
    {
        for (const auto& v : verdicts)
            if (!v.pass) return false;
        return true;
    }
};

namespace detail {

inline std::vector<std::string> param_cols(const ModelParams& p, std::uint64_t seed, std::int64_t N)
{
    return {std::to_string(p.n), format_number(p.r), format_number(p.gamma), std::to_string(seed), std::to_string(N)};
}

inline std::vector<std::string> with(std::vector<std::string> a, const std::vector<std::string>& b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

inline const std::vector<std::string> param_header{"n", "r", "gamma", "seed", "N"};

inline RateTheorem theorem_from(const std::string& s)
{
    if (s == "fixed_codim") return RateTheorem::fixed_codim;
    if (s == "proportional") return RateTheorem::proportional;
    return RateTheorem::vertices;
}

inline TrendTarget target_from(const std::string& s)
{
    if (s == "sectional_variance") return TrendTarget::sectional_variance;
    if (s == "H_rate") return TrendTarget::H_rate;
    if (s == "nthroot_f") return TrendTarget::nthroot_f;
    if (s == "sectional_limit") return TrendTarget::sectional_limit;
    return TrendTarget::gauge;
}

} // namespace detail

/// Runs a validated config, writing outputs into `dir`. Returns the manifest
/// (also written as manifest.json). On any failure the files of this run are
/// removed and the exception propagates.
inline RunResult run_experiment(const ExperimentConfig& c, const std::filesystem::path& dir, std::uint64_t seed,
                                int threads)
{
    namespace fs = std::filesystem;
    using detail::param_cols;
    using detail::param_header;
    using detail::with;
    fs::create_directories(dir);
    std::vector<fs::path> written;
    RunResult res;
    nlohmann::json outputs = nlohmann::json::array();
    const std::string started = utc_now();
    auto emit = [&](const std::string& name, const std::string& data) {
        const auto p = dir / name;
        written.push_back(p);
        write_atomic(p, data);
        outputs.push_back({{"file", name}, {"sha256", sha256_hex(data)}, {"bytes", data.size()}});
    };
    try {
        nlohmann::json resolved;
        if (c.task != Task::asymptotics) {
            const auto p = c.params();
            resolved = {{"n", p.n}, {"r", p.r}, {"gamma", p.gamma}};
        }
        switch (c.task) {
        case Task::sample: {
            const auto p = c.params();
            std::vector<NamedFunctional> fs;
            for (const auto& id : c.functionals) {
                auto f = resolve_functional(id, p.n, p.r);
                fs.push_back({id, [f](const ZeroCellSample& s) { return f(s.cell, face_lattice(s.cell)); }});
            }
            const auto b = batch(p, c.N, seed, fs, threads);
            std::ostringstream os;
            write_jsonl(os, b);
            emit("samples.jsonl", os.str());
            const auto failed = b.report.resource_limits + b.report.degenerate_failures;
            res.verdicts.push_back({"samples", failed == 0, std::to_string(failed) + " failed samples"});
            break;
        }
        case Task::estimate: {
            const auto p = c.params();
            const auto t = sample_table(p, c.functionals, c.N, seed, threads);
            CsvTable csv{with({"functional"}, with(param_header, {"mean", "stderr"})), {}};
            for (const auto& id : c.functionals) {
                const auto e = t.estimate(id, seed);
                csv.rows.push_back(with({id}, with(param_cols(p, seed, c.N), {format_number(e.mean),
                                                                              format_number(e.std_error())})));
            }
            emit("estimates.csv", csv.str());
            res.verdicts.push_back({"estimate", true, ""});
            break;
        }
        case Task::verify: {
            const auto p = c.params();
            VerifyOptions vo;
            vo.threads = threads;
            vo.c_samples = c.c_samples;
            const auto reps = verify_identities(c.identities, p, c.N, seed, vo);
            CsvTable csv{with({"identity", "label"}, with(param_header, {"lhs", "lhs_stderr", "rhs", "rhs_stderr",
                                                                         "z", "bound_lo", "bound_hi", "pass",
                                                                         "note"})),
                         {}};
            for (const auto& r : reps) {
                csv.rows.push_back(with(
                    {r.id, r.label},
                    with(param_cols(p, seed, c.N),
                         {format_number(r.lhs.mean), format_number(r.lhs.std_error()), format_number(r.rhs.mean),
                          format_number(r.rhs_exact ? 0.0 : r.rhs.std_error()), format_number(r.z),
                          r.bound ? format_number(r.lo) : "", r.bound ? format_number(r.hi) : "",
                          r.pass ? "true" : "false", r.note})));
                res.verdicts.push_back({r.label, r.pass, "z = " + format_number(r.z)});
            }
            emit("verify.csv", csv.str());
            break;
        }
        case Task::constants: {
            std::vector<int> dims = c.grid.empty() ? std::vector<int>{*c.n} : c.grid;
            CsvTable csv{with({"quantity", "index"}, with(param_header, {"value"})), {}};
            for (int n : dims) {
                const auto p = c.params(n);
                auto row = [&](const std::string& q, const std::string& idx, double v) {
                    csv.rows.push_back(with({q, idx}, with(param_cols(p, seed, 0), {format_number(v)})));
                };
                row("omega_n", "", omega(n));
                row("kappa_n", "", kappa(n));
                row("gamma_hat", "", gamma_hat(p.r, n));
                row("mean_volume", "", mean_volume(p));
                for (int m = 1; m < n; ++m) row("gamma_m", std::to_string(m), gamma_section(p, m));
                for (int l = 1; l <= n; ++l) {
                    const auto cb = c_bounds(n, l, p.r);
                    row("A", std::to_string(l), A_const(n, l, p.r));
                    row("c_lower", std::to_string(l), cb.lo);
                    row("c_upper", std::to_string(l), cb.hi);
                }
                if (p.r == 1.0) row("c1_vertex", "", c1_vertex_const(n));
            }
            emit("constants.csv", csv.str());
            res.verdicts.push_back({"constants", true, ""});
            break;
        }
        case Task::asymptotics: {
            TrendOptions o;
            o.alpha = *c.alpha;
            o.b = *c.b;
            o.k_or_a = c.k_or_a;
            o.theorem = detail::theorem_from(c.theorem);
            o.N = c.N;
            o.n_dirs = c.n_dirs;
            o.seed = seed;
            o.threads = threads;
            const auto t = trend_check(detail::target_from(c.target), c.grid, o);
            CsvTable csv{with({"target"}, param_header), {}};
            for (const auto& col : t.columns)
                if (col != "r" && col != "gamma") csv.header.push_back(col);
            for (const auto& row : t.rows) {
                const auto p = c.params(row.n);
                std::vector<std::string> line{t.target};
                line = with(line, param_cols(p, seed, c.target == "sectional_variance" ? c.N : 0));
                for (std::size_t i = 0; i < t.columns.size(); ++i)
                    if (t.columns[i] != "r" && t.columns[i] != "gamma") line.push_back(format_number(row.values[i]));
                csv.rows.push_back(line);
            }
            emit("asymptotics.csv", csv.str());
            res.verdicts.push_back({t.target, t.pass, t.verdict});
            break;
        }
        }
        nlohmann::json verdicts = nlohmann::json::array();
        for (const auto& v : res.verdicts) verdicts.push_back({{"name", v.name}, {"pass", v.pass}, {"detail", v.detail}});
        res.manifest = {{"schema_version", config_schema_version},
                        {"artifact_version", artifact_version},
                        {"task", task_name(c.task)},
                        {"config", c.raw},
                        {"seed", seed},
                        {"resolved", resolved},
                        {"started", started},
                        {"finished", utc_now()},
                        {"outputs", outputs},
                        {"verdicts", verdicts},
                        {"all_pass", res.all_pass()}};
        written.push_back(dir / "manifest.json");
        write_atomic(dir / "manifest.json", res.manifest.dump(2) + "\n");
    } catch (...) {
        std::error_code ec;
        for (const auto& p : written) {
            fs::remove(p, ec);
            auto tmp = p;
            tmp += ".tmp";
            fs::remove(tmp, ec);
        }
        throw;
    }
    return res;
}

// ---------------------------------------------------------------- report

/// Merges finished runs into one long table. Estimate rows with the same
/// functional and parameters are pooled; other rows are carried over.
inline CsvTable merge_reports(const std::vector<std::filesystem::path>& manifests)
{
    namespace fs = std::filesystem;
    CsvTable out{{"kind", "name", "n", "r", "gamma", "seed", "N", "value", "stderr", "pass"}, {}};
    struct Pool {
        Estimate e;
        std::vector<std::string> seeds;
        std::string n, r, gamma;
    };
    std::map<std::vector<std::string>, Pool> pools;
    for (const auto& mp : manifests) {
        const auto m = nlohmann::json::parse(read_file(mp));
        const auto base = mp.parent_path();
        for (const auto& o : m.at("outputs")) {
            const auto file = base / o.at("file").get<std::string>();
            if (!fs::exists(file)) throw std::runtime_error("missing output " + file.string());
            if (file.extension() != ".csv") continue;
            const auto rows = parse_csv(read_file(file));
            if (rows.empty()) continue;
            const auto& h = rows[0];
            auto col = [&](const std::string& name) -> int {
                for (std::size_t i = 0; i < h.size(); ++i)
                    if (h[i] == name) return static_cast<int>(i);
                return -1;
            };
            const std::string kind = h[0];
            for (std::size_t k = 1; k < rows.size(); ++k) {
                const auto& row = rows[k];
                auto at = [&](const std::string& name) { return col(name) < 0 ? std::string() : row[col(name)]; };
                if (kind == "functional") {
                    auto& pl = pools[{row[0], at("n"), at("r"), at("gamma")}];
                    const auto N = std::stoll(at("N"));
                    const double se = std::stod(at("stderr"));
                    Estimate e;
                    e.count = N;
                    e.mean = std::stod(at("mean"));
                    e.m2 = se * se * static_cast<double>(N) * static_cast<double>(N - 1);
                    pl.e = Estimate::merge(pl.e, e);
                    pl.seeds.push_back(at("seed"));
                    pl.n = at("n");
                    pl.r = at("r");
                    pl.gamma = at("gamma");
                } else if (kind == "identity") {
                    out.rows.push_back({"verify", at("label"), at("n"), at("r"), at("gamma"), at("seed"), at("N"),
                                        at("lhs"), at("lhs_stderr"), at("pass")});
                } else if (kind == "target") {
                    for (std::size_t i = 6; i < h.size(); ++i)
                        out.rows.push_back({"asymptotics", row[0] + ":" + h[i], at("n"), at("r"), at("gamma"),
                                            at("seed"), at("N"), row[i], "", ""});
                } else if (kind == "quantity") {
                    const std::string idx = at("index");
                    out.rows.push_back({"constants", at("quantity") + (idx.empty() ? "" : "_" + idx), at("n"), at("r"),
                                        at("gamma"), at("seed"), at("N"), at("value"), "", ""});
                }
            }
        }
    }
    for (const auto& [key, pl] : pools) {
        std::string seeds;
        for (const auto& s : pl.seeds) seeds += (seeds.empty() ? "" : ";") + s;
        out.rows.push_back({"estimate", key[0], pl.n, pl.r, pl.gamma, seeds, std::to_string(pl.e.count),
                            format_number(pl.e.mean), format_number(pl.e.std_error()), ""});
    }
    return out;
}

} // namespace zerocell
