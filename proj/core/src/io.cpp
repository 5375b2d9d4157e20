#include "conecert/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace conecert {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary); // binary: identical bytes on every platform
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
    return in;
}

double parse_double(const std::string& tok) {
    if (tok == "inf") return std::numeric_limits<double>::infinity();
    if (tok == "-inf") return -std::numeric_limits<double>::infinity();
    if (tok == "nan") return std::numeric_limits<double>::quiet_NaN();
    std::size_t pos = 0;
    const double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::runtime_error("malformed number: '" + tok + "'");
    return v;
}

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

} // namespace

std::string format_full(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string read_artifact_comment(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::string line;
    while (in && std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] != '#') break;
        std::size_t start = 1;
        while (start < line.size() && line[start] == ' ') ++start;
        return line.substr(start);
    }
    return "";
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj,
                          const std::string& comment) {
    std::ofstream out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t";
    for (int i = 1; i <= traj.dimension(); ++i) out << ",x_" << i;
    out << ",d_hilbert,spread,gamma\n";
    for (int k = 0; k < traj.samples(); ++k) {
        out << format_full(traj.times[k]);
        for (int i = 0; i < traj.dimension(); ++i) out << ',' << format_full(traj.states[k][i]);
        out << ',' << format_full(traj.diagnostics[k].hilbert_to_ones) << ','
            << format_full(traj.diagnostics[k].spread) << ','
            << format_full(traj.diagnostics[k].min_gamma) << '\n';
    }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    // skip comments, find the header
    int n = -1;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (cols.size() < 5 || cols[0] != "t") {
            throw std::runtime_error("trajectory CSV: unexpected header in " + path.string());
        }
        n = static_cast<int>(cols.size()) - 4;
        break;
    }
    if (n < 2) throw std::runtime_error("trajectory CSV: missing or undersized header");

    Trajectory traj;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (static_cast<int>(cols.size()) != n + 4) {
            throw std::runtime_error("trajectory CSV: wrong column count in row");
        }
        traj.times.push_back(parse_double(cols[0]));
        StateVector x(n);
        for (int i = 0; i < n; ++i) x[i] = parse_double(cols[1 + i]);
        traj.states.push_back(std::move(x));
        StepDiagnostics d;
        d.hilbert_to_ones = parse_double(cols[n + 1]);
        d.spread = parse_double(cols[n + 2]);
        d.min_gamma = parse_double(cols[n + 3]);
        traj.diagnostics.push_back(d);
    }
    if (traj.samples() == 0) throw std::runtime_error("trajectory CSV: no data rows");
    return traj;
}

void write_signal_trace(const std::filesystem::path& path, const SwitchingSignal& signal,
                        const std::string& comment) {
    std::ofstream out = open_out(path);
    if (!comment.empty()) out << "# " << comment << "\n";
    out << "t_start,t_end,i,j,weight\n";
    for (int seg = 0; seg < signal.intervals(); ++seg) {
        const WeightedDigraph& g = signal.library[static_cast<std::size_t>(signal.index[seg])];
        for (int i = 0; i < g.size(); ++i) {
            for (int j = 0; j < g.size(); ++j) {
                if (i == j || g.weight(i, j) == 0.0) continue;
                out << format_full(signal.edges[seg]) << ',' << format_full(signal.edges[seg + 1])
                    << ',' << (i + 1) << ',' << (j + 1) << ',' << format_full(g.weight(i, j))
                    << '\n';
            }
        }
    }
}

SwitchingSignal read_signal_trace(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string line;
    bool have_header = false;
    struct Row {
        double t0, t1, w;
        int i, j;
    };
    std::vector<Row> rows;
    int n = 0;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!have_header) {
            if (line != "t_start,t_end,i,j,weight") {
                throw std::runtime_error("signal trace: unexpected header");
            }
            have_header = true;
            continue;
        }
        const auto cols = split(line, ',');
        if (cols.size() != 5) throw std::runtime_error("signal trace: wrong column count");
        Row r{parse_double(cols[0]), parse_double(cols[1]), parse_double(cols[4]),
              std::stoi(cols[2]) - 1, std::stoi(cols[3]) - 1};
        n = std::max({n, r.i + 1, r.j + 1});
        rows.push_back(r);
    }
    if (rows.empty()) throw std::runtime_error("signal trace: no rows");

    // rebuild the interval structure from the distinct boundaries
    std::map<double, int> boundary_ids;
    for (const auto& r : rows) {
        boundary_ids.emplace(r.t0, 0);
        boundary_ids.emplace(r.t1, 0);
    }
    SwitchingSignal signal;
    signal.edges.reserve(boundary_ids.size());
    for (auto& [t, id] : boundary_ids) {
        id = static_cast<int>(signal.edges.size());
        signal.edges.push_back(t);
    }
    const int intervals = static_cast<int>(signal.edges.size()) - 1;
    std::vector<WeightedDigraph> graphs(static_cast<std::size_t>(intervals), WeightedDigraph(n));
    for (const auto& r : rows) {
        for (int seg = boundary_ids[r.t0]; seg < boundary_ids[r.t1]; ++seg) {
            graphs[static_cast<std::size_t>(seg)].set_weight(r.i, r.j, r.w);
        }
    }
    signal.library = std::move(graphs);
    signal.index.resize(static_cast<std::size_t>(intervals));
    for (int seg = 0; seg < intervals; ++seg) signal.index[static_cast<std::size_t>(seg)] = seg;
    signal.validate();
    return signal;
}

void write_graph_snapshot(const std::filesystem::path& path, const WeightedDigraph& g) {
    std::ofstream out = open_out(path);
    out << "n=" << g.size() << "\n";
    for (int i = 0; i < g.size(); ++i) {
        for (int j = 0; j < g.size(); ++j) {
            if (j) out << ' ';
            out << format_full(g.weight(i, j));
        }
        out << '\n';
    }
}

WeightedDigraph read_graph_snapshot(const std::filesystem::path& path) {
    std::ifstream in = open_in(path);
    std::string header;
    if (!std::getline(in, header) || header.rfind("n=", 0) != 0) {
        throw std::runtime_error("graph snapshot: missing n=<int> header");
    }
    const int n = std::stoi(header.substr(2));
    if (n < 1) throw std::runtime_error("graph snapshot: bad dimension");
    Matrix w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            std::string tok;
            if (!(in >> tok)) throw std::runtime_error("graph snapshot: truncated matrix");
            w(i, j) = parse_double(tok);
        }
    }
    return WeightedDigraph(std::move(w));
}

namespace {

struct KeyValues {
    std::vector<std::pair<std::string, std::string>> items;

    void add(const std::string& k, const std::string& v) { items.emplace_back(k, v); }
    void add(const std::string& k, const char* v) { items.emplace_back(k, std::string(v)); }
    void add(const std::string& k, double v) { items.emplace_back(k, format_full(v)); }
    void add(const std::string& k, long v) { items.emplace_back(k, std::to_string(v)); }
    void add(const std::string& k, bool v) { items.emplace_back(k, v ? "true" : "false"); }

    [[nodiscard]] std::string text() const {
        std::ostringstream out;
        for (const auto& [k, v] : items) out << k << " = " << v << "\n";
        return out.str();
    }
    [[nodiscard]] std::string json() const {
        std::ostringstream out;
        out << "{\n";
        for (std::size_t i = 0; i < items.size(); ++i) {
            const auto& [k, v] = items[i];
            const bool quote = v != "true" && v != "false" && v.find_first_not_of("0123456789+-.eE") != std::string::npos;
            out << "  \"" << k << "\": ";
            if (quote) {
                out << '"' << v << '"';
            } else {
                out << v;
            }
            if (i + 1 < items.size()) out << ',';
            out << '\n';
        }
        out << "}\n";
        return out.str();
    }
};

KeyValues consensus_report_kv(const ConsensusReport& r) {
    KeyValues kv;
    kv.add("verdict", to_string(r.verdict));
    kv.add("rate_lambda", r.rate_lambda);
    kv.add("prefactor_k", r.prefactor_k);
    kv.add("fit_residual", r.fit_residual);
    kv.add("spread_initial", r.spread_initial);
    kv.add("spread_final", r.spread_final);
    kv.add("spread_rate_lambda", r.spread_rate_lambda);
    kv.add("window_begin", r.window_begin);
    kv.add("window_end", r.window_end);
    kv.add("samples_used", static_cast<long>(r.samples_used));
    kv.add("degenerate_consensus", r.degenerate_consensus);
    return kv;
}

KeyValues bound_report_kv(const AccumulatedBoundReport& r) {
    KeyValues kv;
    kv.add("bound_check", r.pass ? "pass" : "fail");
    kv.add("bound_form", r.form == BoundForm::along_trajectory ? "along_trajectory"
                                                               : "pointwise_sampled");
    kv.add("bound_verdict_label", r.verdict_label);
    kv.add("bound_is_qsc", r.bound_qsc.has_value());
    if (r.bound_qsc) {
        kv.add("bound_qsc_center", static_cast<long>(r.bound_qsc->center + 1));
        kv.add("bound_qsc_margin", r.bound_qsc->margin);
    }
    kv.add("intervals_checked", static_cast<long>(r.intervals.size()));
    kv.add("worst_margin", r.worst_margin);
    kv.add("worst_interval", static_cast<long>(r.worst_interval));
    if (r.worst_interval >= 0 && r.worst_interval < static_cast<int>(r.intervals.size())) {
        const auto& w = r.intervals[static_cast<std::size_t>(r.worst_interval)];
        kv.add("binding_entry_i", static_cast<long>(w.binding_i + 1));
        kv.add("binding_entry_j", static_cast<long>(w.binding_j + 1));
    }
    return kv;
}

} // namespace

std::string render_report_text(const ConsensusReport& report) {
    return consensus_report_kv(report).text();
}
std::string render_report_json(const ConsensusReport& report) {
    return consensus_report_kv(report).json();
}
std::string render_bound_report_text(const AccumulatedBoundReport& report) {
    return bound_report_kv(report).text();
}
std::string render_bound_report_json(const AccumulatedBoundReport& report) {
    return bound_report_kv(report).json();
}

} // namespace conecert
