#include "conecert/scenario.hpp"

#include "conecert/io.hpp"
#include "conecert/rng.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace conecert {

namespace {

[[noreturn]] void config_error(const std::string& origin, int line, const std::string& what) {
    throw std::invalid_argument(origin + ":" + std::to_string(line) + ": " + what);
}

struct Cursor {
    const std::string& s;
    std::size_t i = 0;

    [[nodiscard]] bool done() const { return i >= s.size(); }
    [[nodiscard]] char peek() const { return s[i]; }
    void skip_ws() {
        while (!done() && (s[i] == ' ' || s[i] == '\t')) ++i;
    }
};

ConfigValue::Variant parse_scalar(Cursor& c, const std::string& origin, int line);

ConfigValue::Variant parse_value(Cursor& c, const std::string& origin, int line) {
    c.skip_ws();
    if (c.done()) config_error(origin, line, "missing value");
    if (c.peek() != '[') return parse_scalar(c, origin, line);

    ++c.i; // '['
    c.skip_ws();
    // nested array -> matrix
    if (!c.done() && c.peek() == '[') {
        std::vector<std::vector<double>> rows;
        for (;;) {
            c.skip_ws();
            if (c.done() || c.peek() != '[') config_error(origin, line, "expected '[' in matrix");
            auto inner = parse_value(c, origin, line);
            rows.push_back(std::get<std::vector<double>>(inner));
            c.skip_ws();
            if (!c.done() && c.peek() == ',') {
                ++c.i;
                continue;
            }
            break;
        }
        c.skip_ws();
        if (c.done() || c.peek() != ']') config_error(origin, line, "unterminated matrix");
        ++c.i;
        return rows;
    }

    std::vector<double> arr;
    c.skip_ws();
    if (!c.done() && c.peek() == ']') {
        ++c.i;
        return arr; // empty array
    }
    for (;;) {
        auto v = parse_scalar(c, origin, line);
        if (!std::holds_alternative<double>(v)) {
            config_error(origin, line, "arrays may hold numbers only");
        }
        arr.push_back(std::get<double>(v));
        c.skip_ws();
        if (!c.done() && c.peek() == ',') {
            ++c.i;
            continue;
        }
        break;
    }
    c.skip_ws();
    if (c.done() || c.peek() != ']') config_error(origin, line, "unterminated array");
    ++c.i;
    return arr;
}

ConfigValue::Variant parse_scalar(Cursor& c, const std::string& origin, int line) {
    c.skip_ws();
    if (c.done()) config_error(origin, line, "missing value");
    if (c.peek() == '"') {
        ++c.i;
        std::string out;
        while (!c.done() && c.peek() != '"') out.push_back(c.s[c.i++]);
        if (c.done()) config_error(origin, line, "unterminated string");
        ++c.i;
        return out;
    }
    std::string tok;
    while (!c.done() && c.peek() != ',' && c.peek() != ']' && c.peek() != '#' &&
           c.peek() != ' ' && c.peek() != '\t') {
        tok.push_back(c.s[c.i++]);
    }
    if (tok == "true") return true;
    if (tok == "false") return false;
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) config_error(origin, line, "malformed number '" + tok + "'");
        return v;
    } catch (const std::invalid_argument&) {
        config_error(origin, line, "unrecognized value '" + tok + "' (strings need quotes)");
    }
}

} // namespace

double ConfigValue::as_number() const {
    if (const auto* v = std::get_if<double>(&value)) return *v;
    throw std::invalid_argument("config value is not a number");
}

long ConfigValue::as_integer() const {
    const double v = as_number();
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9) throw std::invalid_argument("config value is not an integer");
    return static_cast<long>(r);
}

bool ConfigValue::as_bool() const {
    if (const auto* v = std::get_if<bool>(&value)) return *v;
    throw std::invalid_argument("config value is not a boolean");
}

const std::string& ConfigValue::as_string() const {
    if (const auto* v = std::get_if<std::string>(&value)) return *v;
    throw std::invalid_argument("config value is not a string");
}

const std::vector<double>& ConfigValue::as_array() const {
    if (const auto* v = std::get_if<std::vector<double>>(&value)) return *v;
    throw std::invalid_argument("config value is not an array");
}

Matrix ConfigValue::as_matrix() const {
    const auto* rows = std::get_if<std::vector<std::vector<double>>>(&value);
    if (!rows || rows->empty()) throw std::invalid_argument("config value is not a matrix");
    const auto cols = rows->front().size();
    Matrix m(rows->size(), cols);
    for (std::size_t i = 0; i < rows->size(); ++i) {
        if ((*rows)[i].size() != cols) {
            throw std::invalid_argument("config matrix rows have unequal lengths");
        }
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = (*rows)[i][j];
    }
    return m;
}

std::string ConfigValue::render() const {
    std::ostringstream out;
    if (const auto* b = std::get_if<bool>(&value)) {
        out << (*b ? "true" : "false");
    } else if (const auto* d = std::get_if<double>(&value)) {
        out << format_full(*d);
    } else if (const auto* s = std::get_if<std::string>(&value)) {
        out << '"' << *s << '"';
    } else if (const auto* a = std::get_if<std::vector<double>>(&value)) {
        out << '[';
        for (std::size_t i = 0; i < a->size(); ++i) {
            if (i) out << ", ";
            out << format_full((*a)[i]);
        }
        out << ']';
    } else if (const auto* m = std::get_if<std::vector<std::vector<double>>>(&value)) {
        out << '[';
        for (std::size_t i = 0; i < m->size(); ++i) {
            if (i) out << ", ";
            out << '[';
            for (std::size_t j = 0; j < (*m)[i].size(); ++j) {
                if (j) out << ", ";
                out << format_full((*m)[i][j]);
            }
            out << ']';
        }
        out << ']';
    }
    return out.str();
}

ConfigDoc ConfigDoc::parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open scenario file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_string(buf.str(), path.string());
}

ConfigDoc ConfigDoc::parse_string(const std::string& text, const std::string& origin) {
    ConfigDoc doc;
    std::istringstream in(text);
    std::string line;
    std::string section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t start = line.find_first_not_of(" \t");
        if (start == std::string::npos) continue;
        if (line[start] == '#') continue;
        if (line[start] == '[') {
            const auto close = line.find(']', start);
            if (close == std::string::npos) config_error(origin, lineno, "unterminated [section]");
            section = line.substr(start + 1, close - start - 1);
            if (section.empty()) config_error(origin, lineno, "empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_error(origin, lineno, "expected key = value");
        std::string key = line.substr(start, eq - start);
        while (!key.empty() && (key.back() == ' ' || key.back() == '\t')) key.pop_back();
        if (key.empty()) config_error(origin, lineno, "empty key");

        std::string rest = line.substr(eq + 1);
        // arrays may span lines; gather until the brackets balance
        auto bracket_balance = [](const std::string& s) {
            int depth = 0;
            bool in_string = false;
            for (const char c : s) {
                if (c == '"') in_string = !in_string;
                if (in_string) continue;
                if (c == '#') break;
                if (c == '[') ++depth;
                if (c == ']') --depth;
            }
            return depth;
        };
        std::string continuation;
        while (bracket_balance(rest) > 0 && std::getline(in, continuation)) {
            ++lineno;
            if (!continuation.empty() && continuation.back() == '\r') continuation.pop_back();
            rest += ' ';
            rest += continuation;
        }
        Cursor c{rest, 0};
        ConfigValue::Variant value = parse_value(c, origin, lineno);
        c.skip_ws();
        if (!c.done() && c.peek() != '#') config_error(origin, lineno, "trailing characters");

        const std::string path = section.empty() ? key : section + "." + key;
        if (doc.entries_.count(path)) config_error(origin, lineno, "duplicate key " + path);
        doc.entries_[path] = ConfigValue{std::move(value)};
    }
    return doc;
}

bool ConfigDoc::has(const std::string& path) const { return entries_.count(path) > 0; }

const ConfigValue& ConfigDoc::at(const std::string& path) const {
    const auto it = entries_.find(path);
    if (it == entries_.end()) {
        throw std::invalid_argument("scenario is missing required key '" + path + "'");
    }
    return it->second;
}

void ConfigDoc::set(const std::string& path, ConfigValue value) {
    entries_[path] = std::move(value);
}

double ConfigDoc::number_or(const std::string& path, double fallback) const {
    return has(path) ? at(path).as_number() : fallback;
}
long ConfigDoc::integer_or(const std::string& path, long fallback) const {
    return has(path) ? at(path).as_integer() : fallback;
}
std::string ConfigDoc::string_or(const std::string& path, const std::string& fallback) const {
    return has(path) ? at(path).as_string() : fallback;
}
bool ConfigDoc::bool_or(const std::string& path, bool fallback) const {
    return has(path) ? at(path).as_bool() : fallback;
}

std::string ConfigDoc::canonical_text() const {
    std::ostringstream out;
    for (const auto& [path, value] : entries_) out << path << " = " << value.render() << "\n";
    return out.str();
}

std::uint64_t ConfigDoc::hash() const { return SplitRng::fnv1a(canonical_text()); }

namespace {

ScalarSignal scalar_signal_from(const ConfigDoc& doc, const std::string& prefix) {
    ScalarSignal sig;
    if (doc.has(prefix + ".values")) {
        sig.values = doc.at(prefix + ".values").as_array();
        if (doc.has(prefix + ".breakpoints")) {
            sig.breakpoints = doc.at(prefix + ".breakpoints").as_array();
        }
    } else {
        sig.values = {doc.at(prefix).as_number()};
    }
    sig.validate();
    return sig;
}

SwitchingSignal signal_from_indexed(const ConfigDoc& doc, const std::string& prefix,
                                    std::size_t family_size) {
    SwitchingSignal signal;
    signal.edges = doc.at(prefix + ".breakpoints").as_array();
    const auto idx = doc.at(prefix + ".index").as_array();
    signal.index.reserve(idx.size());
    for (const double v : idx) {
        signal.index.push_back(static_cast<int>(std::lround(v)));
    }
    if (family_size > 0) {
        for (const int ix : signal.index) {
            if (ix < 0 || ix >= static_cast<int>(family_size)) {
                throw std::invalid_argument("scenario: signal index out of family range");
            }
        }
    }
    return signal;
}

/// Periodic round-robin over a family: phase p on
/// [p*phase, (p+1)*phase) mod (family_size*phase).
SwitchingSignal periodic_cycle_signal(std::size_t family_size, double phase, double horizon) {
    if (!(phase > 0.0)) throw std::invalid_argument("periodic_cycle: phase must be positive");
    SwitchingSignal signal;
    signal.edges.push_back(0.0);
    int p = 0;
    while (signal.edges.back() < horizon) {
        signal.edges.push_back(signal.edges.back() + phase);
        signal.index.push_back(p);
        p = (p + 1) % static_cast<int>(family_size);
    }
    return signal;
}

} // namespace

Scenario Scenario::resolve(const ConfigDoc& doc) {
    Scenario s;
    s.name = doc.string_or("scenario.name", "unnamed");
    if ((doc.has("topology.generator") || doc.has("initial.box")) &&
        !doc.has("scenario.seed")) {
        throw std::invalid_argument(
            "scenario: scenario.seed is required when any stochastic generator is used");
    }
    s.seed = static_cast<std::uint64_t>(doc.integer_or("scenario.seed", 0));

    const std::string kind = doc.at("model.kind").as_string();
    const int n = static_cast<int>(doc.at("model.n").as_integer());
    if (n < 2) throw std::invalid_argument("scenario: model.n must be >= 2");

    const double t0 = doc.number_or("horizon.t0", 0.0);
    const double t_end = doc.at("horizon.t_end").as_number();
    if (!(t_end > t0)) throw std::invalid_argument("scenario: horizon.t_end must exceed t0");
    s.t0 = t0;
    s.t_end = t_end;

    // optional generated topology signal, usable by several kinds
    if (doc.has("topology.generator")) {
        const std::string gen = doc.at("topology.generator").as_string();
        if (gen == "chain_random_activation") {
            ChainActivationConfig cfg;
            cfg.outer_min = doc.number_or("topology.outer_min", cfg.outer_min);
            cfg.outer_max = doc.number_or("topology.outer_max", cfg.outer_max);
            cfg.pieces_min = static_cast<int>(doc.integer_or("topology.pieces_min", cfg.pieces_min));
            cfg.pieces_max = static_cast<int>(doc.integer_or("topology.pieces_max", cfg.pieces_max));
            cfg.weight_factor = doc.number_or("topology.weight_factor", cfg.weight_factor);
            cfg.edges_per_step =
                static_cast<int>(doc.integer_or("topology.edges_per_step", cfg.edges_per_step));
            s.topology_signal = chain_random_activation(
                n, doc.at("topology.delta").as_number(), t_end - t0, s.seed, cfg);
        } else if (gen == "dwell_time") {
            std::vector<WeightedDigraph> family;
            const Matrix stacked = doc.at("topology.graphs").as_matrix();
            if (stacked.rows() % n != 0) {
                throw std::invalid_argument("scenario: topology.graphs must stack n-row blocks");
            }
            for (Eigen::Index r = 0; r + n <= stacked.rows(); r += n) {
                family.emplace_back(Matrix(stacked.middleRows(r, n)));
            }
            s.topology_signal = dwell_time_signal(std::move(family),
                                                  doc.at("topology.tau_d").as_number(),
                                                  t_end - t0, s.seed);
        } else {
            throw std::invalid_argument("scenario: unknown topology.generator '" + gen + "'");
        }
        if (s.topology_signal && t0 != 0.0) {
            for (double& e : s.topology_signal->edges) e += t0;
        }
    }

    if (kind == "ltv") {
        if (doc.has("model.A")) {
            s.model = SystemModel::ltv_constant(doc.at("model.A").as_matrix());
        } else {
            // piecewise family stacked as n-row blocks plus a cycle or
            // explicit index signal
            const Matrix stacked = doc.at("model.family").as_matrix();
            if (stacked.rows() % n != 0 || stacked.cols() != n) {
                throw std::invalid_argument("scenario: model.family must stack n x n blocks");
            }
            std::vector<Matrix> family;
            for (Eigen::Index r = 0; r + n <= stacked.rows(); r += n) {
                family.emplace_back(stacked.middleRows(r, n));
            }
            SwitchingSignal signal;
            if (doc.has("model.phase")) {
                // phases are anchored at absolute time zero and must cover
                // the whole horizon even when t0 > 0
                signal = periodic_cycle_signal(family.size(), doc.at("model.phase").as_number(),
                                               t_end);
            } else {
                signal = signal_from_indexed(doc, "model.signal", family.size());
            }
            s.model = SystemModel::ltv_switching(std::move(family), std::move(signal));
        }
    } else if (kind == "kuramoto") {
        if (s.topology_signal) {
            s.model = SystemModel::kuramoto(*s.topology_signal);
        } else {
            s.model = SystemModel::kuramoto_constant(
                WeightedDigraph(doc.at("model.weights").as_matrix()));
        }
    } else if (kind == "cucker_smale_velocity") {
        s.model = SystemModel::cucker_smale_velocity(doc.at("model.psi").as_matrix(),
                                                     doc.at("model.gain").as_number());
    } else if (kind == "hegselmann_krause") {
        s.model = SystemModel::hegselmann_krause(n, scalar_signal_from(doc, "model.radius"));
    } else if (kind == "animal_group") {
        // constant membership masks and constant kernels; anything richer
        // needs the library API
        const WeightedDigraph attraction(doc.at("model.attraction").as_matrix());
        const WeightedDigraph repulsion(doc.has("model.repulsion")
                                            ? WeightedDigraph(doc.at("model.repulsion").as_matrix())
                                            : WeightedDigraph(n));
        const double phi_a = doc.number_or("model.phi_attract", 1.0);
        const double phi_r = doc.number_or("model.phi_repel", 1.0);
        s.model = SystemModel::animal_group(
            SwitchingSignal::constant(attraction), SwitchingSignal::constant(repulsion),
            [phi_a](double, double) { return phi_a; }, [phi_r](double, double) { return phi_r; },
            doc.number_or("model.distance_floor", 1e-9));
    } else {
        throw std::invalid_argument("scenario: unsupported model.kind '" + kind + "'");
    }
    if (s.model.size() != n) {
        throw std::invalid_argument("scenario: model dimension disagrees with model.n");
    }
    if (doc.has("model.domain_lo")) {
        s.model = s.model.with_domain_box(doc.at("model.domain_lo").as_number(),
                                          doc.at("model.domain_hi").as_number());
    }
    if (doc.string_or("model.validation", "strict") == "permissive") {
        s.model = s.model.with_validation(ValidationMode::permissive);
    }

    // initial state: explicit vector or seeded box draw
    if (doc.has("initial.x0")) {
        const auto arr = doc.at("initial.x0").as_array();
        if (static_cast<int>(arr.size()) != n) {
            throw std::invalid_argument("scenario: initial.x0 length disagrees with model.n");
        }
        s.x0 = Eigen::Map<const Eigen::VectorXd>(arr.data(), n);
    } else {
        const auto box = doc.at("initial.box").as_array();
        if (box.size() != 2 || !(box[1] > box[0])) {
            throw std::invalid_argument("scenario: initial.box must be [lo, hi]");
        }
        SplitRng rng = SplitRng(s.seed).stream("x0");
        s.x0 = StateVector(n);
        for (int i = 0; i < n; ++i) s.x0[i] = rng.uniform(box[0], box[1]);
    }
    s.shift_margin = doc.number_or("initial.shift_margin", 0.0);

    const std::string scheme = doc.string_or("integrator.scheme", "euler");
    if (scheme == "euler") {
        s.scheme = Scheme::euler;
    } else if (scheme == "rk4") {
        s.scheme = Scheme::rk4;
    } else {
        throw std::invalid_argument("scenario: integrator.scheme must be euler or rk4");
    }
    s.step_h = doc.number_or("integrator.h", 1e-2);
    if (!(s.step_h > 0.0)) throw std::invalid_argument("scenario: integrator.h must be positive");

    s.checkpoint_spacing = doc.number_or("checkpoints.spacing", 0.0);
    s.fit_window_fraction = doc.number_or("certification.fit_window_fraction", 0.5);
    s.residual_tol = doc.number_or("certification.residual_tol", 0.05);

    if (doc.has("bound.B")) {
        s.bound = WeightedDigraph(doc.at("bound.B").as_matrix());
    } else if (doc.has("bound.file")) {
        s.bound = read_graph_snapshot(doc.at("bound.file").as_string());
    } else if (doc.has("bound.center")) {
        const int center = static_cast<int>(doc.at("bound.center").as_integer()) - 1;
        const double delta = doc.at("bound.delta").as_number();
        if (center < 0 || center >= n) throw std::invalid_argument("scenario: bound.center range");
        WeightedDigraph b(n);
        for (int i = 0; i < n; ++i) {
            if (i != center) b.set_weight(i, center, delta);
        }
        s.bound = b;
    } else if (doc.has("bound.chain_delta")) {
        const double delta = doc.at("bound.chain_delta").as_number();
        WeightedDigraph b(n);
        for (int i = 0; i + 1 < n; ++i) b.set_weight(i, i + 1, delta);
        s.bound = b;
    }

    s.csv_name = doc.string_or("outputs.csv", "trajectory.csv");
    s.report_name = doc.string_or("outputs.report", "report");
    s.plots_name = doc.string_or("outputs.plots", "plots");

    // record every resolved value; the hash covers defaults too
    s.resolved_ = doc;
    s.resolved_.set("scenario.name", ConfigValue{s.name});
    s.resolved_.set("scenario.seed", ConfigValue{static_cast<double>(s.seed)});
    s.resolved_.set("horizon.t0", ConfigValue{s.t0});
    s.resolved_.set("integrator.scheme", ConfigValue{scheme});
    s.resolved_.set("integrator.h", ConfigValue{s.step_h});
    s.resolved_.set("initial.shift_margin", ConfigValue{s.shift_margin});
    s.resolved_.set("checkpoints.spacing", ConfigValue{s.checkpoint_spacing});
    s.resolved_.set("certification.fit_window_fraction", ConfigValue{s.fit_window_fraction});
    s.resolved_.set("certification.residual_tol", ConfigValue{s.residual_tol});
    s.resolved_.set("outputs.csv", ConfigValue{s.csv_name});
    s.resolved_.set("outputs.report", ConfigValue{s.report_name});
    s.resolved_.set("outputs.plots", ConfigValue{s.plots_name});
    if (doc.has("topology.generator")) {
        ChainActivationConfig defaults;
        s.resolved_.set("topology.outer_min",
                        ConfigValue{doc.number_or("topology.outer_min", defaults.outer_min)});
        s.resolved_.set("topology.outer_max",
                        ConfigValue{doc.number_or("topology.outer_max", defaults.outer_max)});
        s.resolved_.set("topology.pieces_min",
                        ConfigValue{static_cast<double>(
                            doc.integer_or("topology.pieces_min", defaults.pieces_min))});
        s.resolved_.set("topology.pieces_max",
                        ConfigValue{static_cast<double>(
                            doc.integer_or("topology.pieces_max", defaults.pieces_max))});
        s.resolved_.set("topology.weight_factor",
                        ConfigValue{doc.number_or("topology.weight_factor", defaults.weight_factor)});
        s.resolved_.set("topology.edges_per_step",
                        ConfigValue{static_cast<double>(
                            doc.integer_or("topology.edges_per_step", defaults.edges_per_step))});
    }
    return s;
}

std::string Scenario::hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(resolved_.hash()));
    return buf;
}

CheckpointSequence Scenario::checkpoints() const {
    if (checkpoint_spacing > 0.0) {
        return CheckpointSequence::uniform(t0, t_end, checkpoint_spacing);
    }
    CheckpointSequence seq;
    seq.times = {t0, t_end};
    seq.sup_gap = t_end - t0;
    return seq;
}

} // namespace conecert
