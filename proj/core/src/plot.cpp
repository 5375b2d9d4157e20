#include "conecert/plot.hpp"

#include "conecert/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace conecert {

namespace {

constexpr int kWidth = 720;
constexpr int kHeight = 440;
constexpr int kMarginLeft = 64;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 36;
constexpr int kMarginBottom = 48;

const char* const kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

struct Frame {
    double x_lo, x_hi, y_lo, y_hi;

    [[nodiscard]] double px(double x) const {
        return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * (kWidth - kMarginLeft - kMarginRight);
    }
    [[nodiscard]] double py(double y) const {
        return kHeight - kMarginBottom -
               (y - y_lo) / (y_hi - y_lo) * (kHeight - kMarginTop - kMarginBottom);
    }
};

std::string num_label(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void pad_frame(Frame& f) {
    if (f.x_hi <= f.x_lo) f.x_hi = f.x_lo + 1.0;
    if (f.y_hi <= f.y_lo) {
        f.y_lo -= 0.5;
        f.y_hi += 0.5;
    }
    const double pad = 0.04 * (f.y_hi - f.y_lo);
    f.y_lo -= pad;
    f.y_hi += pad;
}

class SvgWriter {
public:
    explicit SvgWriter(const std::filesystem::path& path, const std::string& comment = "") {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        out_.open(path, std::ios::binary);
        if (!out_) throw std::runtime_error("cannot open plot file: " + path.string());
        out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        if (!comment.empty()) out_ << "<!-- " << comment << " -->\n";
        out_ << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
             << kHeight << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n"
             << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    }
    ~SvgWriter() { out_ << "</svg>\n"; }

    void axes(const Frame& f, const std::string& x_label, const std::string& y_label,
              const std::string& title) {
        out_ << "<g stroke=\"#333\" stroke-width=\"1\" fill=\"none\">\n";
        line(f.px(f.x_lo), f.py(f.y_lo), f.px(f.x_hi), f.py(f.y_lo));
        line(f.px(f.x_lo), f.py(f.y_lo), f.px(f.x_lo), f.py(f.y_hi));
        out_ << "</g>\n";
        // ticks
        for (int k = 0; k <= 5; ++k) {
            const double xv = f.x_lo + (f.x_hi - f.x_lo) * k / 5.0;
            const double yv = f.y_lo + (f.y_hi - f.y_lo) * k / 5.0;
            line(f.px(xv), f.py(f.y_lo), f.px(xv), f.py(f.y_lo) + 4, "#333");
            text(f.px(xv), kHeight - kMarginBottom + 18, num_label(xv), "middle");
            line(f.px(f.x_lo) - 4, f.py(yv), f.px(f.x_lo), f.py(yv), "#333");
            text(f.px(f.x_lo) - 8, f.py(yv) + 4, num_label(yv), "end");
        }
        text(kWidth / 2.0, kHeight - 12, x_label, "middle");
        text(16, kMarginTop - 12, y_label, "start");
        if (!title.empty()) text(kWidth / 2.0, 18, title, "middle");
    }

    void polyline(const Frame& f, const std::vector<double>& xs, const std::vector<double>& ys,
                  const std::string& color, double width = 1.4,
                  const std::string& dash = "") {
        out_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"" << width
             << '"';
        if (!dash.empty()) out_ << " stroke-dasharray=\"" << dash << '"';
        out_ << " points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out_ << ' ';
            out_ << coord(f.px(xs[i])) << ',' << coord(f.py(ys[i]));
        }
        out_ << "\"/>\n";
    }

    void line(double x1, double y1, double x2, double y2, const std::string& color = "") {
        out_ << "<line x1=\"" << coord(x1) << "\" y1=\"" << coord(y1) << "\" x2=\"" << coord(x2)
             << "\" y2=\"" << coord(y2) << '"';
        if (!color.empty()) out_ << " stroke=\"" << color << '"';
        out_ << "/>\n";
    }

    void text(double x, double y, const std::string& s, const std::string& anchor) {
        out_ << "<text x=\"" << coord(x) << "\" y=\"" << coord(y)
             << "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333\" text-anchor=\""
             << anchor << "\">" << s << "</text>\n";
    }

private:
    static std::string coord(double v) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.2f", v);
        return buf;
    }
    std::ofstream out_;
};

} // namespace

void plot_states_svg(const std::filesystem::path& path, const Trajectory& traj,
                     const std::string& title, const std::string& comment) {
    if (traj.samples() == 0) throw std::invalid_argument("plot: empty trajectory");
    Frame f{traj.times.front(), traj.times.back(),
            std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& x : traj.states) {
        f.y_lo = std::min(f.y_lo, x.minCoeff());
        f.y_hi = std::max(f.y_hi, x.maxCoeff());
    }
    pad_frame(f);

    SvgWriter svg(path, comment);
    svg.axes(f, "t", "x_i(t)", title);
    const int n = traj.dimension();
    std::vector<double> ys(traj.samples());
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < traj.samples(); ++k) ys[static_cast<std::size_t>(k)] = traj.states[k][i];
        svg.polyline(f, traj.times, ys, kPalette[i % 10]);
    }
}

void plot_metric_svg(const std::filesystem::path& path, const Trajectory& traj, double fit_rate,
                     double fit_prefactor, const std::string& title,
                     const std::string& comment) {
    std::vector<double> ts, logs;
    for (int k = 0; k < traj.samples(); ++k) {
        const double d = traj.diagnostics[k].hilbert_to_ones;
        if (std::isfinite(d) && d > 0.0) {
            ts.push_back(traj.times[k]);
            logs.push_back(std::log(d));
        }
    }
    if (ts.empty()) throw std::invalid_argument("plot: no finite positive metric samples");
    Frame f{ts.front(), ts.back(), *std::min_element(logs.begin(), logs.end()),
            *std::max_element(logs.begin(), logs.end())};
    pad_frame(f);

    SvgWriter svg(path, comment);
    svg.axes(f, "t", "ln d(x(t), 1)", title);
    svg.polyline(f, ts, logs, kPalette[0]);
    if (std::isfinite(fit_rate) && fit_prefactor > 0.0) {
        const std::vector<double> fx{f.x_lo, f.x_hi};
        const std::vector<double> fy{std::log(fit_prefactor) - fit_rate * f.x_lo,
                                     std::log(fit_prefactor) - fit_rate * f.x_hi};
        svg.polyline(f, fx, fy, kPalette[3], 1.2, "6,4");
    }
}

void plot_signal_svg(const std::filesystem::path& path, const SwitchingSignal& signal, int i,
                     int j, const std::string& title, const std::string& comment) {
    signal.validate();
    if (signal.library.empty()) throw std::invalid_argument("plot: signal carries no graphs");
    std::vector<double> ts, ws;
    for (int seg = 0; seg < signal.intervals(); ++seg) {
        const double w =
            signal.library[static_cast<std::size_t>(signal.index[seg])].weight(i, j);
        // step plot: hold the value across the interval
        ts.push_back(signal.edges[seg]);
        ws.push_back(w);
        ts.push_back(signal.edges[seg + 1]);
        ws.push_back(w);
    }
    Frame f{signal.edges.front(), signal.edges.back(), 0.0,
            *std::max_element(ws.begin(), ws.end())};
    pad_frame(f);

    SvgWriter svg(path, comment);
    std::ostringstream ylab;
    ylab << "a_" << (i + 1) << "," << (j + 1) << "(t)";
    svg.axes(f, "t", ylab.str(), title);
    svg.polyline(f, ts, ws, kPalette[1]);
}

} // namespace conecert
