#include "grintrap/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "grintrap/table_io.hpp"

namespace grintrap {

namespace {

std::string location_message(const std::string& file, int line, int col, const std::string& msg) {
    std::ostringstream oss;
    oss << file << ":" << line << ":" << col << ": " << msg;
    return oss.str();
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

constexpr const char* kReportMarker = "# grintrap orbit report";

}  // namespace

ConfigError::ConfigError(const std::string& file_, int line_, int col_, const std::string& msg)
    : std::runtime_error(location_message(file_, line_, col_, msg)),
      file(file_),
      line(line_),
      col(col_) {}

ConfigDoc ConfigDoc::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, 0, "cannot open config file");
    std::ostringstream oss;
    oss << in.rdbuf();
    return parse_string(oss.str(), path);
}

ConfigDoc ConfigDoc::parse_string(const std::string& text, const std::string& name) {
    ConfigDoc doc;
    doc.name_ = name;

    std::istringstream in(text);
    std::string rawline;
    int lineno = 0;
    std::string section;

    // Orbit reports embed the resolved config as 'config.<section>.<key>'
    // lines; read those back and ignore the report's own keys.
    bool report_mode = false;

    while (std::getline(in, rawline)) {
        ++lineno;
        if (lineno == 1 && trim(rawline) == kReportMarker) {
            report_mode = true;
            continue;
        }
        std::string line = rawline;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (report_mode) continue;
            if (line.back() != ']')
                throw ConfigError(name, lineno, 1, "malformed section header '" + rawline + "'");
            const std::string sec = trim(line.substr(1, line.size() - 2));
            if (!valid_name(sec))
                throw ConfigError(name, lineno, 1, "malformed section name '" + sec + "'");
            section = sec;
            if (!doc.sections_.count(sec)) {
                doc.sections_[sec].line = lineno;
                doc.section_order_.push_back(sec);
            }
            continue;
        }

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(name, lineno, 1, "expected 'key = value', got '" + rawline + "'");
        std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        std::string sec = section;

        if (report_mode) {
            // keep only config.<section>.<key>
            constexpr const char* kPrefix = "config.";
            if (key.rfind(kPrefix, 0) != 0) continue;
            const std::string rest = key.substr(7);
            const std::size_t dot = rest.find('.');
            if (dot == std::string::npos) continue;
            sec = rest.substr(0, dot);
            key = rest.substr(dot + 1);
        }

        if (!valid_name(key))
            throw ConfigError(name, lineno, 1, "malformed key '" + key + "'");
        if (sec.empty())
            throw ConfigError(name, lineno, 1, "key '" + key + "' appears before any [section]");
        if (value.empty())
            throw ConfigError(name, lineno, static_cast<int>(eq) + 2,
                              "key '" + key + "' has no value");

        auto& secref = doc.sections_[sec];
        if (secref.line == 0) {
            secref.line = lineno;
            doc.section_order_.push_back(sec);
        }
        if (secref.entries.count(key))
            throw ConfigError(name, lineno, 1, "duplicate key '" + key + "' in [" + sec + "]");
        const int col = static_cast<int>(rawline.find(key.substr(key.find_last_of('.') + 1))) + 1;
        secref.entries[key] = Entry{value, lineno, col > 0 ? col : 1, false};
    }
    return doc;
}

bool ConfigDoc::has_section(const std::string& section) const {
    return sections_.count(section) > 0;
}

bool ConfigDoc::has(const std::string& section, const std::string& key) const {
    return find(section, key) != nullptr;
}

ConfigDoc::Entry* ConfigDoc::find(const std::string& section, const std::string& key) {
    auto sit = sections_.find(section);
    if (sit == sections_.end()) return nullptr;
    auto kit = sit->second.entries.find(key);
    if (kit == sit->second.entries.end()) return nullptr;
    return &kit->second;
}

const ConfigDoc::Entry* ConfigDoc::find(const std::string& section, const std::string& key) const {
    return const_cast<ConfigDoc*>(this)->find(section, key);
}

std::string ConfigDoc::require_string(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) {
        const int line = sections_.count(section) ? sections_.at(section).line : 0;
        throw ConfigError(name_, line, 1, "missing required key '" + key + "' in [" + section + "]");
    }
    e->consumed = true;
    std::string v = e->raw;
    if (v.size() >= 2 && ((v.front() == '"' && v.back() == '"') ||
                          (v.front() == '\'' && v.back() == '\'')))
        v = v.substr(1, v.size() - 2);
    return v;
}

double ConfigDoc::parse_double(const std::string& section, const std::string& key,
                               const Entry& e) const {
    const char* begin = e.raw.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end == begin || *end != '\0')
        throw ConfigError(name_, e.line, e.col,
                          "key '" + key + "' in [" + section + "]: '" + e.raw +
                              "' is not a number");
    return v;
}

double ConfigDoc::require_double(const std::string& section, const std::string& key) {
    Entry* e = find(section, key);
    if (!e) {
        const int line = sections_.count(section) ? sections_.at(section).line : 0;
        throw ConfigError(name_, line, 1, "missing required key '" + key + "' in [" + section + "]");
    }
    e->consumed = true;
    return parse_double(section, key, *e);
}

double ConfigDoc::get_double(const std::string& section, const std::string& key, double fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    return parse_double(section, key, *e);
}

long ConfigDoc::get_long(const std::string& section, const std::string& key, long fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    const double v = parse_double(section, key, *e);
    const long lv = static_cast<long>(v);
    if (static_cast<double>(lv) != v)
        throw ConfigError(name_, e->line, e->col,
                          "key '" + key + "' in [" + section + "]: expected an integer");
    return lv;
}

bool ConfigDoc::get_bool(const std::string& section, const std::string& key, bool fallback) {
    Entry* e = find(section, key);
    if (!e) return fallback;
    e->consumed = true;
    if (e->raw == "true" || e->raw == "1") return true;
    if (e->raw == "false" || e->raw == "0") return false;
    throw ConfigError(name_, e->line, e->col,
                      "key '" + key + "' in [" + section + "]: expected true or false");
}

std::string ConfigDoc::get_string(const std::string& section, const std::string& key,
                                  const std::string& fallback) {
    if (!has(section, key)) return fallback;
    return require_string(section, key);
}

std::vector<double> ConfigDoc::require_double_list(const std::string& section,
                                                   const std::string& key) {
    Entry* e = find(section, key);
    if (!e) {
        const int line = sections_.count(section) ? sections_.at(section).line : 0;
        throw ConfigError(name_, line, 1, "missing required key '" + key + "' in [" + section + "]");
    }
    e->consumed = true;
    std::vector<double> out;
    std::stringstream ss(e->raw);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const char* begin = item.c_str();
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin || *end != '\0')
            throw ConfigError(name_, e->line, e->col,
                              "key '" + key + "' in [" + section + "]: '" + item +
                                  "' is not a number");
        out.push_back(v);
    }
    if (out.empty())
        throw ConfigError(name_, e->line, e->col,
                          "key '" + key + "' in [" + section + "]: empty list");
    return out;
}

void ConfigDoc::fail(const std::string& section, const std::string& key,
                     const std::string& msg) const {
    const Entry* e = find(section, key);
    const int line = e ? e->line : (sections_.count(section) ? sections_.at(section).line : 0);
    const int col = e ? e->col : 1;
    throw ConfigError(name_, line, col, "key '" + key + "' in [" + section + "]: " + msg);
}

void ConfigDoc::check_all_consumed() const {
    for (const auto& [sec, secref] : sections_) {
        for (const auto& [key, entry] : secref.entries) {
            if (!entry.consumed)
                throw ConfigError(name_, entry.line, entry.col,
                                  "unknown key '" + key + "' in [" + sec + "]");
        }
    }
}

std::vector<double> GridAxis::points() const {
    std::vector<double> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(min);
        return out;
    }
    for (int i = 0; i < count; ++i)
        out.push_back(min + (max - min) * static_cast<double>(i) / (count - 1));
    return out;
}

namespace {

ProfileSpec resolve_profile(ConfigDoc& doc) {
    ProfileSpec spec;
    const std::string kind = doc.require_string("profile", "kind");
    if (kind == "gaussian") spec.kind = ProfileKind::Gaussian;
    else if (kind == "mexican_hat") spec.kind = ProfileKind::MexicanHat;
    else if (kind == "double_gaussian") spec.kind = ProfileKind::DoubleGaussian;
    else if (kind == "homogeneous") spec.kind = ProfileKind::Homogeneous;
    else doc.fail("profile", "kind", "unknown profile kind '" + kind + "'");

    spec.n_c = doc.require_double("profile", "n_c");
    if (spec.kind == ProfileKind::Homogeneous) {
        spec.n_a = doc.get_double("profile", "n_a", 0.0);
    } else {
        spec.n_a = doc.require_double("profile", "n_a");
    }
    spec.n_d = doc.get_double("profile", "n_d", 0.0);
    spec.sigma = doc.get_double("profile", "sigma", 1.0);
    spec.r_off1 = doc.get_double("profile", "r_off1", 0.0);
    spec.r_off2 = doc.get_double("profile", "r_off2", 0.0);
    spec.bounds.lo = doc.get_double("profile", "bounds_lo", 0.8);
    spec.bounds.hi = doc.get_double("profile", "bounds_hi", 3.8);

    if (!(spec.sigma > 0.0)) doc.fail("profile", "sigma", "must be > 0");
    if (!(spec.bounds.lo < spec.bounds.hi)) doc.fail("profile", "bounds_lo", "requires bounds_lo < bounds_hi");
    if (spec.kind == ProfileKind::MexicanHat && spec.n_d > spec.n_a)
        doc.fail("profile", "n_d", "depression must not exceed the peak amplitude");
    return spec;
}

LaunchSpec resolve_launch_spec(ConfigDoc& doc) {
    LaunchSpec launch;
    const std::string mode = doc.get_string("launch", "mode", "rule");
    if (mode == "rule") {
        launch.mode = LaunchSpec::Mode::Rule;
        launch.rate_fraction = doc.get_double("launch", "rate_fraction", 0.9);
        launch.phi0 = doc.get_double("launch", "phi0", 0.0);
        if (!(launch.rate_fraction > 0.0)) doc.fail("launch", "rate_fraction", "must be > 0");
    } else if (mode == "explicit") {
        launch.mode = LaunchSpec::Mode::Explicit;
        launch.state.r = doc.require_double("launch", "r0");
        launch.state.phi = doc.get_double("launch", "phi0", 0.0);
        launch.state.r_dot = doc.get_double("launch", "r_dot0", 0.0);
        launch.state.phi_dot = doc.get_double("launch", "phi_dot0", 0.0);
        if (!(launch.state.r > 0.0)) doc.fail("launch", "r0", "must be > 0");
    } else {
        doc.fail("launch", "mode", "expected 'rule' or 'explicit'");
    }
    return launch;
}

RunOptions resolve_options(ConfigDoc& doc, const ProfileSpec& profile) {
    RunOptions opt;
    opt.integrator.rel_tol = doc.get_double("integrator", "rel_tol", 1e-10);
    opt.integrator.abs_tol = doc.get_double("integrator", "abs_tol", 1e-12);
    opt.integrator.horizon = doc.get_double("integrator", "horizon", 600.0);
    opt.integrator.max_steps = doc.get_long("integrator", "max_steps", 10000000L);
    opt.integrator.initial_step = doc.get_double("integrator", "initial_step", 0.0);
    opt.integrator.max_step = doc.get_double("integrator", "max_step", 0.0);
    opt.r_floor = doc.get_double("integrator", "r_floor", kDefaultRadiusFloor);
    opt.r_escape = doc.get_double("integrator", "r_escape", 0.0);

    if (!(opt.integrator.rel_tol > 0.0)) doc.fail("integrator", "rel_tol", "must be > 0");
    if (!(opt.integrator.abs_tol > 0.0)) doc.fail("integrator", "abs_tol", "must be > 0");
    if (!(opt.integrator.horizon > 0.0)) doc.fail("integrator", "horizon", "must be > 0");
    if (opt.integrator.max_steps <= 0) doc.fail("integrator", "max_steps", "must be > 0");
    if (!(opt.r_floor > 0.0)) doc.fail("integrator", "r_floor", "must be > 0");

    opt.classify.n_min_pairs = static_cast<int>(doc.get_long("classify", "n_min_pairs", 10));
    opt.classify.band_tol = doc.get_double("classify", "band_tol", 1e-3);
    opt.classify.circ_tol = doc.get_double("classify", "circ_tol", 1e-4);
    opt.classify.noise_floor = doc.get_double("classify", "noise_floor", 1e-7);
    if (opt.classify.n_min_pairs < 1) doc.fail("classify", "n_min_pairs", "must be >= 1");

    (void)profile;
    return opt;
}

GridAxis resolve_axis(ConfigDoc& doc, const std::string& section, const std::string& prefix,
                      bool required, GridAxis fallback) {
    GridAxis axis = fallback;
    if (required) {
        axis.min = doc.require_double(section, prefix + "_min");
        axis.max = doc.require_double(section, prefix + "_max");
        axis.count = static_cast<int>(doc.get_long(section, prefix + "_count", 0));
        if (axis.count < 1) doc.fail(section, prefix + "_count", "must be >= 1");
    } else {
        axis.min = doc.get_double(section, prefix + "_min", fallback.min);
        axis.max = doc.get_double(section, prefix + "_max", fallback.max);
        axis.count = static_cast<int>(doc.get_long(section, prefix + "_count", fallback.count));
        if (axis.count < 1) doc.fail(section, prefix + "_count", "must be >= 1");
    }
    return axis;
}

}  // namespace

void require_valid_profile(const ConfigDoc& doc, const ProfileSpec& spec) {
    const ValidationReport rep = validate(spec);
    if (!rep.valid) {
        std::ostringstream oss;
        oss << "profile leaves the admissible index range [" << spec.bounds.lo << ", "
            << spec.bounds.hi << "]: n spans [" << rep.n_min << ", " << rep.n_max << "]";
        doc.fail("profile", "kind", oss.str());
    }
}

RunConfig load_run_config(const std::string& path) {
    ConfigDoc doc = ConfigDoc::parse_file(path);
    RunConfig cfg;
    cfg.profile = resolve_profile(doc);
    cfg.launch = resolve_launch_spec(doc);
    cfg.options = resolve_options(doc, cfg.profile);
    cfg.output_dir = doc.get_string("output", "directory", "");
    cfg.decimation = doc.get_long("output", "decimation", 1);
    if (cfg.decimation < 1) doc.fail("output", "decimation", "must be >= 1");

    if (doc.has_section("sweep")) {
        SweepBlock blk;
        blk.parameter = doc.require_string("sweep", "parameter");
        blk.values = doc.require_double_list("sweep", "values");
        blk.pin_peak = doc.get_double("sweep", "pin_peak", 0.0);
        blk.threads = static_cast<int>(doc.get_long("sweep", "threads", 0));
        if (blk.parameter != "n_a" && blk.parameter != "n_c" && blk.parameter != "n_d" &&
            blk.parameter != "sigma" && blk.parameter != "r_off1" && blk.parameter != "r_off2")
            doc.fail("sweep", "parameter", "unknown sweep parameter '" + blk.parameter + "'");
        cfg.sweep = std::move(blk);
    }
    if (doc.has_section("phase")) {
        PhaseBlock blk;
        blk.energy_grid = doc.get_bool("phase", "energy_grid", false);
        blk.r = resolve_axis(doc, "phase", "r", false, blk.r);
        blk.r_dot = resolve_axis(doc, "phase", "r_dot", false, blk.r_dot);
        if (!(blk.r.min > 0.0)) doc.fail("phase", "r_min", "must be > 0");
        cfg.phase = blk;
    }
    if (doc.has_section("stability")) {
        StabilityBlock blk;
        blk.r0 = resolve_axis(doc, "stability", "r0", true, {});
        blk.kappa0 = resolve_axis(doc, "stability", "kappa0", true, {});
        blk.beta = resolve_axis(doc, "stability", "beta", true, {});
        if (!(blk.r0.min > 0.0)) doc.fail("stability", "r0_min", "must be > 0");
        cfg.stability = blk;
    }

    doc.check_all_consumed();
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    std::ostringstream oss;
    oss << "[profile]\n";
    oss << "kind = " << to_string(cfg.profile.kind) << "\n";
    oss << "n_a = " << format_g17(cfg.profile.n_a) << "\n";
    oss << "n_c = " << format_g17(cfg.profile.n_c) << "\n";
    oss << "n_d = " << format_g17(cfg.profile.n_d) << "\n";
    oss << "sigma = " << format_g17(cfg.profile.sigma) << "\n";
    oss << "r_off1 = " << format_g17(cfg.profile.r_off1) << "\n";
    oss << "r_off2 = " << format_g17(cfg.profile.r_off2) << "\n";
    oss << "bounds_lo = " << format_g17(cfg.profile.bounds.lo) << "\n";
    oss << "bounds_hi = " << format_g17(cfg.profile.bounds.hi) << "\n";
    oss << "\n[launch]\n";
    if (cfg.launch.mode == LaunchSpec::Mode::Rule) {
        oss << "mode = rule\n";
        oss << "rate_fraction = " << format_g17(cfg.launch.rate_fraction) << "\n";
        oss << "phi0 = " << format_g17(cfg.launch.phi0) << "\n";
    } else {
        oss << "mode = explicit\n";
        oss << "r0 = " << format_g17(cfg.launch.state.r) << "\n";
        oss << "phi0 = " << format_g17(cfg.launch.state.phi) << "\n";
        oss << "r_dot0 = " << format_g17(cfg.launch.state.r_dot) << "\n";
        oss << "phi_dot0 = " << format_g17(cfg.launch.state.phi_dot) << "\n";
    }
    oss << "\n[integrator]\n";
    oss << "rel_tol = " << format_g17(cfg.options.integrator.rel_tol) << "\n";
    oss << "abs_tol = " << format_g17(cfg.options.integrator.abs_tol) << "\n";
    oss << "horizon = " << format_g17(cfg.options.integrator.horizon) << "\n";
    oss << "max_steps = " << cfg.options.integrator.max_steps << "\n";
    oss << "initial_step = " << format_g17(cfg.options.integrator.initial_step) << "\n";
    oss << "max_step = " << format_g17(cfg.options.integrator.max_step) << "\n";
    oss << "r_floor = " << format_g17(cfg.options.r_floor) << "\n";
    oss << "r_escape = " << format_g17(cfg.options.r_escape) << "\n";
    oss << "\n[classify]\n";
    oss << "n_min_pairs = " << cfg.options.classify.n_min_pairs << "\n";
    oss << "band_tol = " << format_g17(cfg.options.classify.band_tol) << "\n";
    oss << "circ_tol = " << format_g17(cfg.options.classify.circ_tol) << "\n";
    oss << "noise_floor = " << format_g17(cfg.options.classify.noise_floor) << "\n";
    oss << "\n[output]\n";
    if (!cfg.output_dir.empty()) oss << "directory = " << cfg.output_dir << "\n";
    oss << "decimation = " << cfg.decimation << "\n";
    if (cfg.sweep) {
        oss << "\n[sweep]\n";
        oss << "parameter = " << cfg.sweep->parameter << "\n";
        oss << "values = ";
        for (std::size_t i = 0; i < cfg.sweep->values.size(); ++i) {
            if (i) oss << ", ";
            oss << format_g17(cfg.sweep->values[i]);
        }
        oss << "\n";
        oss << "pin_peak = " << format_g17(cfg.sweep->pin_peak) << "\n";
        oss << "threads = " << cfg.sweep->threads << "\n";
    }
    if (cfg.phase) {
        oss << "\n[phase]\n";
        oss << "energy_grid = " << (cfg.phase->energy_grid ? "true" : "false") << "\n";
        oss << "r_min = " << format_g17(cfg.phase->r.min) << "\n";
        oss << "r_max = " << format_g17(cfg.phase->r.max) << "\n";
        oss << "r_count = " << cfg.phase->r.count << "\n";
        oss << "r_dot_min = " << format_g17(cfg.phase->r_dot.min) << "\n";
        oss << "r_dot_max = " << format_g17(cfg.phase->r_dot.max) << "\n";
        oss << "r_dot_count = " << cfg.phase->r_dot.count << "\n";
    }
    if (cfg.stability) {
        oss << "\n[stability]\n";
        oss << "r0_min = " << format_g17(cfg.stability->r0.min) << "\n";
        oss << "r0_max = " << format_g17(cfg.stability->r0.max) << "\n";
        oss << "r0_count = " << cfg.stability->r0.count << "\n";
        oss << "kappa0_min = " << format_g17(cfg.stability->kappa0.min) << "\n";
        oss << "kappa0_max = " << format_g17(cfg.stability->kappa0.max) << "\n";
        oss << "kappa0_count = " << cfg.stability->kappa0.count << "\n";
        oss << "beta_min = " << format_g17(cfg.stability->beta.min) << "\n";
        oss << "beta_max = " << format_g17(cfg.stability->beta.max) << "\n";
        oss << "beta_count = " << cfg.stability->beta.count << "\n";
    }
    return oss.str();
}

}  // namespace grintrap
