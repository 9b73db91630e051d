#include "tailcv/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace tailcv::io {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        parts.push_back(s.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return parts;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::size_t parse_count(std::string_view key, std::string_view text) {
    std::size_t v = 0;
    const auto t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size()) {
        throw Error("config key '" + std::string(key) + "': expected a non-negative integer, got '" +
                    std::string(t) + "'");
    }
    return v;
}

template <class T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

// JSON has no NaN; it is written as null and read back as NaN.
double json_double(const nlohmann::json& j) {
    return j.is_null() ? std::nan("") : j.get<double>();
}

nlohmann::json json_number(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string optional_cell(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string();
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc()) throw Error("cannot format number");
    return std::string(buf, ptr);
}

double parse_double(std::string_view text) {
    const auto t = trim(text);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc() || ptr != t.data() + t.size() || !std::isfinite(v)) {
        throw Error("invalid number '" + std::string(t) + "'");
    }
    return v;
}

std::vector<Method> parse_method_list(std::string_view text) {
    std::vector<Method> methods;
    for (auto part : split(text, ',')) {
        const auto name = trim(part);
        if (name.empty()) continue;
        const Method m = parse_method(name);
        if (std::find(methods.begin(), methods.end(), m) == methods.end()) methods.push_back(m);
    }
    if (methods.empty()) throw Error("empty method list");
    return methods;
}

// ---------------------------------------------------------------------------
// Data files

std::size_t DataFile::coupled_count() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.target ? 1 : 0;
    return n;
}

std::size_t DataFile::unpaired_count() const { return rows.size() - coupled_count(); }

SemiSupervisedDataset DataFile::to_dataset() const {
    std::vector<double> target, source, extra;
    for (const auto& r : rows) {
        if (r.target) {
            target.push_back(*r.target);
            source.push_back(r.source);
        } else {
            extra.push_back(r.source);
        }
    }
    return SemiSupervisedDataset(std::move(target), std::move(source), std::move(extra));
}

DataFile parse_data_csv(std::string_view text, const std::filesystem::path& origin) {
    DataFile file;
    file.path = origin;
    const auto lines = split(text, '\n');
    std::size_t line_no = 0;
    bool have_header = false;
    for (auto raw : lines) {
        ++line_no;
        const auto line = trim(raw);
        if (line.empty()) continue;
        const auto cells = split(line, ',');
        if (!have_header) {
            for (auto c : cells) file.header.emplace_back(trim(c));
            if (file.header != std::vector<std::string>{"target", "source"}) {
                throw Error("line " + std::to_string(line_no) +
                            ": expected header 'target,source'");
            }
            have_header = true;
            continue;
        }
        if (cells.size() != 2) {
            throw Error("line " + std::to_string(line_no) + ": expected 2 columns, found " +
                        std::to_string(cells.size()));
        }
        DataRow row;
        try {
            if (!trim(cells[0]).empty()) row.target = parse_double(cells[0]);
            row.source = parse_double(cells[1]);
        } catch (const Error& e) {
            throw Error("line " + std::to_string(line_no) + ": " + e.what());
        }
        file.rows.push_back(row);
    }
    if (!have_header) throw Error("empty data file");
    if (file.coupled_count() < 3) {
        throw Error("at least 3 coupled rows are required, found " +
                    std::to_string(file.coupled_count()));
    }
    return file;
}

DataFile read_data_file(const std::filesystem::path& path) {
    return parse_data_csv(read_file(path), path);
}

SemiSupervisedDataset load_semi_supervised_csv(const std::filesystem::path& path) {
    return read_data_file(path).to_dataset();
}

void write_semi_supervised_csv(const std::filesystem::path& path,
                               const SemiSupervisedDataset& dataset) {
    std::ostringstream os;
    os << "target,source\n";
    for (std::size_t i = 0; i < dataset.n(); ++i) {
        os << format_double(dataset.paired_target()[i]) << ','
           << format_double(dataset.paired_source()[i]) << '\n';
    }
    for (double s : dataset.extra_source()) os << ',' << format_double(s) << '\n';
    write_text_file(path, os.str());
}

// ---------------------------------------------------------------------------
// Config

ExperimentConfig parse_config(std::string_view text) {
    static const std::vector<std::string> known = {
        "gamma_t", "y_m",          "source_marginal", "gamma_s", "shape_b",   "theta",
        "n",       "k",            "k_source",        "m",       "replications", "seed",
        "estimators"};

    std::map<std::string, std::string> kv;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error("config line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        std::string value(trim(line.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw Error("config line " + std::to_string(line_no) + ": unknown key '" + key + "'");
        }
        if (kv.count(key)) {
            throw Error("config line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        kv[key] = value;
    }

    ExperimentConfig c;
    auto real = [&](const char* key, double fallback) {
        const auto it = kv.find(key);
        if (it == kv.end()) return fallback;
        try {
            return parse_double(it->second);
        } catch (const Error& e) {
            throw Error(std::string("config key '") + key + "': " + e.what());
        }
    };
    auto count = [&](const char* key, std::size_t fallback) {
        const auto it = kv.find(key);
        return it == kv.end() ? fallback : parse_count(key, it->second);
    };

    c.gamma_t = real("gamma_t", c.gamma_t);
    c.y_m = real("y_m", c.y_m);
    c.theta = real("theta", c.theta);
    c.n = count("n", c.n);
    c.k = count("k", default_k(c.n));
    c.k_source = count("k_source", c.k);
    c.m = count("m", c.m);
    c.replications = count("replications", c.replications);
    if (const auto it = kv.find("seed"); it != kv.end()) {
        c.seed = parse_count("seed", it->second);
    }
    if (const auto it = kv.find("estimators"); it != kv.end()) {
        c.estimators = parse_method_list(it->second);
    }

    const double gamma_s = real("gamma_s", 0.5);
    const auto kind_it = kv.find("source_marginal");
    const std::string kind = kind_it == kv.end() ? "auto" : kind_it->second;
    if (kind == "auto") {
        c.source_marginal = marginal_for_evi(gamma_s, c.y_m);
    } else if (kind == "pareto") {
        c.source_marginal = ParetoMarginal{gamma_s, c.y_m};
    } else if (kind == "normal") {
        c.source_marginal = StandardNormalMarginal{};
    } else if (kind == "beta") {
        const double fallback = gamma_s < 0.0 ? -1.0 / gamma_s : 2.0;
        c.source_marginal = BetaMarginal{real("shape_b", fallback)};
    } else {
        throw Error("config key 'source_marginal': expected auto, pareto, normal or beta");
    }
    validate(c);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    try {
        return parse_config(read_file(path));
    } catch (const Error& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

std::string config_to_text(const ExperimentConfig& c) {
    std::ostringstream os;
    os << "gamma_t = " << format_double(c.gamma_t) << '\n';
    os << "y_m = " << format_double(c.y_m) << '\n';
    if (const auto* p = std::get_if<ParetoMarginal>(&c.source_marginal)) {
        os << "source_marginal = pareto\n";
        os << "gamma_s = " << format_double(p->gamma) << '\n';
    } else if (const auto* b = std::get_if<BetaMarginal>(&c.source_marginal)) {
        os << "source_marginal = beta\n";
        os << "shape_b = " << format_double(b->shape_b) << '\n';
    } else {
        os << "source_marginal = normal\n";
    }
    os << "theta = " << format_double(c.theta) << '\n';
    os << "n = " << c.n << '\n';
    os << "k = " << c.k << '\n';
    os << "k_source = " << c.k_source << '\n';
    os << "m = " << c.m << '\n';
    os << "replications = " << c.replications << '\n';
    os << "seed = " << c.seed << '\n';
    os << "estimators = ";
    for (std::size_t i = 0; i < c.estimators.size(); ++i) {
        os << (i ? "," : "") << to_string(c.estimators[i]);
    }
    os << '\n';
    return os.str();
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::json to_json(const ExperimentConfig& c) {
    nlohmann::json marginal;
    if (const auto* p = std::get_if<ParetoMarginal>(&c.source_marginal)) {
        marginal = {{"type", "pareto"}, {"gamma", p->gamma}, {"y_m", p->y_m}};
    } else if (const auto* b = std::get_if<BetaMarginal>(&c.source_marginal)) {
        marginal = {{"type", "beta"}, {"shape_b", b->shape_b}};
    } else {
        marginal = {{"type", "normal"}};
    }
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : c.estimators) methods.push_back(std::string(to_string(m)));
    return {{"gamma_t", c.gamma_t},   {"y_m", c.y_m},
            {"source_marginal", marginal},
            {"theta", c.theta},       {"n", c.n},
            {"k", c.k},               {"k_source", c.k_source},
            {"m", c.m},               {"replications", c.replications},
            {"seed", c.seed},         {"estimators", methods}};
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.gamma_t = j.at("gamma_t").get<double>();
    c.y_m = j.at("y_m").get<double>();
    const auto& marginal = j.at("source_marginal");
    const auto type = marginal.at("type").get<std::string>();
    if (type == "pareto") {
        c.source_marginal =
            ParetoMarginal{marginal.at("gamma").get<double>(), marginal.at("y_m").get<double>()};
    } else if (type == "beta") {
        c.source_marginal = BetaMarginal{marginal.at("shape_b").get<double>()};
    } else {
        c.source_marginal = StandardNormalMarginal{};
    }
    c.theta = j.at("theta").get<double>();
    c.n = j.at("n").get<std::size_t>();
    c.k = j.at("k").get<std::size_t>();
    c.k_source = j.at("k_source").get<std::size_t>();
    c.m = j.at("m").get<std::size_t>();
    c.replications = j.at("replications").get<std::size_t>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.estimators.clear();
    for (const auto& m : j.at("estimators")) c.estimators.push_back(parse_method(m.get<std::string>()));
    return c;
}

nlohmann::json to_json(const EviEstimate& e) {
    nlohmann::json j = {{"method", std::string(to_string(e.method))},
                        {"value", json_number(e.value)},
                        {"k", e.k},
                        {"exceedances", e.exceedances},
                        {"variance_estimate", optional_json(e.variance_estimate)}};
    if (e.coefficients) {
        const auto& c = *e.coefficients;
        j["coefficients"] = {{"alpha", c.alpha},
                             {"beta", c.beta},
                             {"alpha_prime", c.alpha_prime},
                             {"beta_prime", c.beta_prime},
                             {"degenerate", c.degenerate},
                             {"degenerate_prime", c.degenerate_prime}};
    } else {
        j["coefficients"] = nullptr;
    }
    return j;
}

nlohmann::json to_json(const DependenceReport& r) {
    return {{"lambda_hat", r.lambda_hat},
            {"lambda_clipped", r.lambda_clipped},
            {"corr_ab", r.corr_ab},
            {"corr_cd", r.corr_cd},
            {"c_ad_hat", optional_json(r.c_ad_hat)},
            {"c_ab_hat", optional_json(r.c_ab_hat)},
            {"p_hat", r.p_hat},
            {"target_exceedances", r.target_exceedances},
            {"joint_exceedances", r.joint_exceedances}};
}

namespace {

nlohmann::json averaged_json(const AveragedValue& v) {
    return {{"mean", json_number(v.mean)}, {"count", v.count}};
}

AveragedValue averaged_from_json(const nlohmann::json& j) {
    return {json_double(j.at("mean")), j.at("count").get<std::size_t>()};
}

}  // namespace

nlohmann::json to_json(const RvrReport& r) {
    nlohmann::json methods = nlohmann::json::array();
    for (const auto& s : r.methods) {
        methods.push_back({{"method", std::string(to_string(s.method))},
                           {"count", s.count},
                           {"mean", json_number(s.mean)},
                           {"variance", json_number(s.variance)},
                           {"bias", json_number(s.bias)}});
    }
    nlohmann::json pairs = nlohmann::json::array();
    for (const auto& p : r.pairs) {
        pairs.push_back({{"baseline", std::string(to_string(p.baseline))},
                         {"transferred", std::string(to_string(p.transferred))},
                         {"var_base", json_number(p.var_base)},
                         {"var_new", json_number(p.var_new)},
                         {"rvr", json_number(p.rvr)}});
    }
    return {{"config", to_json(r.config)},
            {"replications_completed", r.replications_completed},
            {"replications_failed", r.replications_failed},
            {"methods", methods},
            {"pairs", pairs},
            {"dependence",
             {{"lambda_hat", averaged_json(r.dependence.lambda_hat)},
              {"corr_ab", averaged_json(r.dependence.corr_ab)},
              {"corr_cd", averaged_json(r.dependence.corr_cd)},
              {"c_ab", averaged_json(r.dependence.c_ab)},
              {"c_ad", averaged_json(r.dependence.c_ad)},
              {"p_hat", r.dependence.p_hat}}},
            {"asymptotic_rvr", averaged_json(r.asymptotic_rvr)}};
}

RvrReport rvr_report_from_json(const nlohmann::json& j) {
    RvrReport r;
    r.config = config_from_json(j.at("config"));
    r.replications_completed = j.at("replications_completed").get<std::size_t>();
    r.replications_failed = j.at("replications_failed").get<std::size_t>();
    for (const auto& s : j.at("methods")) {
        r.methods.push_back({parse_method(s.at("method").get<std::string>()),
                             s.at("count").get<std::size_t>(), json_double(s.at("mean")),
                             json_double(s.at("variance")), json_double(s.at("bias"))});
    }
    for (const auto& p : j.at("pairs")) {
        r.pairs.push_back({parse_method(p.at("baseline").get<std::string>()),
                           parse_method(p.at("transferred").get<std::string>()),
                           json_double(p.at("var_base")), json_double(p.at("var_new")),
                           json_double(p.at("rvr"))});
    }
    const auto& d = j.at("dependence");
    r.dependence.lambda_hat = averaged_from_json(d.at("lambda_hat"));
    r.dependence.corr_ab = averaged_from_json(d.at("corr_ab"));
    r.dependence.corr_cd = averaged_from_json(d.at("corr_cd"));
    r.dependence.c_ab = averaged_from_json(d.at("c_ab"));
    r.dependence.c_ad = averaged_from_json(d.at("c_ad"));
    r.dependence.p_hat = d.at("p_hat").get<double>();
    r.asymptotic_rvr = averaged_from_json(j.at("asymptotic_rvr"));
    return r;
}

// ---------------------------------------------------------------------------
// CSV tables

CsvTable read_csv_table(const std::filesystem::path& path) {
    CsvTable table;
    bool header = true;
    const std::string text = read_file(path);
    for (auto raw : split(text, '\n')) {
        const auto line = trim(raw);
        if (line.empty()) continue;
        std::vector<std::string> cells;
        for (auto c : split(line, ',')) cells.emplace_back(trim(c));
        if (header) {
            table.header = std::move(cells);
            header = false;
        } else {
            table.rows.push_back(std::move(cells));
        }
    }
    return table;
}

void write_csv_table(const std::filesystem::path& path, const CsvTable& table) {
    std::ostringstream os;
    auto emit = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
        os << '\n';
    };
    emit(table.header);
    for (const auto& row : table.rows) emit(row);
    write_text_file(path, os.str());
}

CsvTable estimates_table(const RvrReport& report) {
    CsvTable t;
    t.header = {"replication", "ok"};
    for (Method m : report.config.estimators) t.header.emplace_back(to_string(m));
    for (const char* col : {"lambda_hat", "corr_ab", "corr_cd", "c_ab", "c_ad", "asymptotic_rvr"}) {
        t.header.emplace_back(col);
    }
    for (const auto& r : report.records) {
        std::vector<std::string> row = {std::to_string(r.replication), r.ok ? "1" : "0"};
        for (Method m : report.config.estimators) {
            row.push_back(optional_cell(r.estimates[method_index(m)]));
        }
        for (const auto* v : {&r.lambda_hat, &r.corr_ab, &r.corr_cd, &r.c_ab, &r.c_ad,
                              &r.asymptotic_rvr}) {
            row.push_back(optional_cell(*v));
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

CsvTable hill_plot_table(const HillPlotSeries& series) {
    CsvTable t;
    t.header = {"k", "estimate"};
    for (std::size_t i = 0; i < series.k_values.size(); ++i) {
        t.rows.push_back({std::to_string(series.k_values[i]), optional_cell(series.estimates[i])});
    }
    return t;
}

CsvTable threshold_scan_table(const std::vector<ThresholdScanRow>& rows) {
    CsvTable t;
    t.header = {"l", "median", "q1", "q3", "mean", "negative", "count", "failed"};
    for (const auto& r : rows) {
        t.rows.push_back({std::to_string(r.l), format_double(r.median), format_double(r.q1),
                          format_double(r.q3), format_double(r.mean), std::to_string(r.negative),
                          std::to_string(r.count), std::to_string(r.failed)});
    }
    return t;
}

CsvTable bootstrap_table(const std::vector<BootstrapSeries>& series) {
    CsvTable t;
    t.header = {"method", "index", "value"};
    for (const auto& s : series) {
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            t.rows.push_back({std::string(to_string(s.method)), std::to_string(i),
                              format_double(s.values[i])});
        }
    }
    return t;
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
    if (!out) throw Error("failed writing " + path.string());
}

}  // namespace tailcv::io
