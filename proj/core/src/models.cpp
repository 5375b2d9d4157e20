#include "conecert/models.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <utility>

namespace conecert {

double ScalarSignal::at(double t) const {
    if (values.empty()) throw std::logic_error("scalar signal has no values");
    if (breakpoints.empty()) return values.front();
    if (t <= breakpoints.front()) return values.front();
    const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
    const auto seg = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
    return values[std::min(seg, values.size() - 1)];
}

void ScalarSignal::validate() const {
    if (values.empty()) throw std::invalid_argument("scalar signal needs at least one value");
    if (!breakpoints.empty() && breakpoints.size() != values.size() + 1 &&
        breakpoints.size() != values.size()) {
        throw std::invalid_argument("scalar signal breakpoint/value count mismatch");
    }
    for (std::size_t i = 1; i < breakpoints.size(); ++i) {
        if (!(breakpoints[i] > breakpoints[i - 1])) {
            throw std::invalid_argument("scalar signal breakpoints must be strictly increasing");
        }
    }
}

double sinc_coupling(double d) {
    const double a = std::abs(d);
    if (a < 1e-4) {
        const double d2 = d * d;
        return 1.0 - d2 / 6.0 + d2 * d2 / 120.0;
    }
    return std::sin(d) / d;
}

namespace {

/// Raw coupling source: fills the off-diagonal a_ij(t, x); diagonal is
/// derived as the negated row sum.
using CouplingField = std::function<void(double, const StateVector&, Matrix&)>;

std::vector<double> merge_breakpoints(std::vector<double> pts) {
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

} // namespace

struct SystemModel::Impl {
    int n = 0;
    ModelKind kind = ModelKind::custom;
    std::string name;
    ValidationMode mode = ValidationMode::strict;
    std::optional<std::pair<double, double>> domain;
    std::vector<double> breakpoints;
    // exactly one of these is set
    CouplingField coupling;                                   // off-diagonal source
    std::function<Matrix(double, const StateVector&)> field;  // full-matrix source
    mutable std::atomic<long> clamped{0};
};

SystemModel::SystemModel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

int SystemModel::size() const { return impl_->n; }
ModelKind SystemModel::kind() const { return impl_->kind; }
const std::string& SystemModel::name() const { return impl_->name; }
const std::vector<double>& SystemModel::breakpoints() const { return impl_->breakpoints; }
ValidationMode SystemModel::validation() const { return impl_->mode; }
long SystemModel::clamped_entries() const { return impl_->clamped.load(); }
std::optional<std::pair<double, double>> SystemModel::domain_box() const { return impl_->domain; }

SystemModel SystemModel::with_validation(ValidationMode mode) const {
    auto copy = std::make_shared<Impl>();
    copy->n = impl_->n;
    copy->kind = impl_->kind;
    copy->name = impl_->name;
    copy->mode = mode;
    copy->domain = impl_->domain;
    copy->breakpoints = impl_->breakpoints;
    copy->coupling = impl_->coupling;
    copy->field = impl_->field;
    return SystemModel(copy);
}

SystemModel SystemModel::with_domain_box(double lo, double hi) const {
    if (!(hi > lo)) throw std::invalid_argument("domain box needs hi > lo");
    auto copy = std::make_shared<Impl>();
    copy->n = impl_->n;
    copy->kind = impl_->kind;
    copy->name = impl_->name;
    copy->mode = impl_->mode;
    copy->domain = {{lo, hi}};
    copy->breakpoints = impl_->breakpoints;
    copy->coupling = impl_->coupling;
    copy->field = impl_->field;
    return SystemModel(copy);
}

MetzlerMatrix SystemModel::evaluate(double t, const StateVector& x) const {
    if (x.size() != impl_->n) {
        throw std::invalid_argument("model/state dimension mismatch");
    }
    Matrix a;
    if (impl_->field) {
        a = impl_->field(t, x);
        if (a.rows() != impl_->n || a.cols() != impl_->n) {
            throw std::logic_error("model field returned a wrongly sized matrix");
        }
    } else {
        a = Matrix::Zero(impl_->n, impl_->n);
        impl_->coupling(t, x, a);
    }

    for (int i = 0; i < impl_->n; ++i) {
        for (int j = 0; j < impl_->n; ++j) {
            if (i == j) continue;
            if (a(i, j) < 0.0) {
                if (impl_->mode == ValidationMode::strict) {
                    throw ModelContractError(t, i, j, "negative coupling " + std::to_string(a(i, j)));
                }
                if (impl_->clamped.fetch_add(1) == 0) {
                    std::cerr << "warning: " << impl_->name << ": clamping negative coupling at t="
                              << t << " entry (" << (i + 1) << "," << (j + 1)
                              << "); further clamps counted silently\n";
                }
                a(i, j) = 0.0;
            }
        }
    }
    if (!impl_->field) {
        for (int i = 0; i < impl_->n; ++i) {
            double row = 0.0;
            for (int j = 0; j < impl_->n; ++j) {
                if (j != i) row += a(i, j);
            }
            a(i, i) = -row;
        }
    }
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    return MetzlerMatrix(std::move(a), 1e-12 * scale);
}

SystemModel SystemModel::ltv_constant(Matrix a) {
    MetzlerMatrix checked(a); // validate once up front
    auto impl = std::make_shared<Impl>();
    impl->n = checked.size();
    impl->kind = ModelKind::ltv;
    impl->name = "ltv";
    impl->field = [m = checked.entries()](double, const StateVector&) { return m; };
    return SystemModel(impl);
}

SystemModel SystemModel::ltv_switching(std::vector<Matrix> family, SwitchingSignal signal) {
    if (family.empty()) throw std::invalid_argument("ltv_switching: empty family");
    signal.validate();
    std::vector<Matrix> checked;
    checked.reserve(family.size());
    for (auto& m : family) checked.push_back(MetzlerMatrix(std::move(m)).entries());
    const int n = static_cast<int>(checked.front().rows());
    for (const auto& m : checked) {
        if (m.rows() != n) throw std::invalid_argument("ltv_switching: family dimensions differ");
    }
    for (const int ix : signal.index) {
        if (ix < 0 || ix >= static_cast<int>(checked.size())) {
            throw std::invalid_argument("ltv_switching: signal index out of family range");
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::ltv;
    impl->name = "ltv-switching";
    impl->breakpoints = signal.breakpoints();
    impl->field = [family = std::move(checked), signal = std::move(signal)](
                      double t, const StateVector&) {
        return family[static_cast<std::size_t>(signal.index_at(t))];
    };
    return SystemModel(impl);
}

SystemModel SystemModel::kuramoto(SwitchingSignal weights) {
    weights.validate();
    if (weights.library.empty()) {
        throw std::invalid_argument("kuramoto: weight signal must carry graphs");
    }
    const int n = weights.library.front().size();
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::kuramoto;
    impl->name = "kuramoto";
    impl->breakpoints = weights.breakpoints();
    impl->coupling = [signal = std::move(weights)](double t, const StateVector& x, Matrix& a) {
        const WeightedDigraph& w = signal.graph_at(t);
        const int m = w.size();
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < m; ++j) {
                if (i == j) continue;
                const double wij = w.weight(i, j);
                if (wij == 0.0) continue;
                a(i, j) = wij * sinc_coupling(x[j] - x[i]);
            }
        }
    };
    return SystemModel(impl);
}

SystemModel SystemModel::kuramoto_constant(WeightedDigraph weights) {
    return kuramoto(SwitchingSignal::constant(std::move(weights)));
}

SystemModel SystemModel::cucker_smale_velocity(Matrix psi, double gain) {
    if (psi.rows() != psi.cols()) throw std::invalid_argument("psi must be square");
    if (psi.minCoeff() < 0.0) throw std::invalid_argument("psi must be nonnegative");
    const int n = static_cast<int>(psi.rows());
    return cucker_smale_velocity(
        n, [psi = std::move(psi)](int i, int j, const StateVector&) { return psi(i, j); }, gain);
}

SystemModel SystemModel::cucker_smale_velocity(
    int n, std::function<double(int, int, const StateVector&)> psi, double gain) {
    if (n < 2) throw std::invalid_argument("cucker_smale_velocity: n must be >= 2");
    if (!(gain > 0.0)) throw std::invalid_argument("cucker_smale_velocity: gain must be positive");
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::cucker_smale_velocity;
    impl->name = "cucker-smale-velocity";
    impl->coupling = [psi = std::move(psi), gain, n](double, const StateVector& v, Matrix& a) {
        const double scale = gain / static_cast<double>(n);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) a(i, j) = scale * psi(i, j, v);
            }
        }
    };
    return SystemModel(impl);
}

SystemModel SystemModel::hegselmann_krause(int n, ScalarSignal confidence_radius) {
    if (n < 2) throw std::invalid_argument("hegselmann_krause: n must be >= 2");
    confidence_radius.validate();
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::hegselmann_krause;
    impl->name = "hegselmann-krause";
    impl->breakpoints = confidence_radius.breakpoints;
    impl->coupling = [eps = std::move(confidence_radius), n](double t, const StateVector& x,
                                                             Matrix& a) {
        const double radius = eps.at(t);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j && std::abs(x[i] - x[j]) <= radius) a(i, j) = 1.0;
            }
        }
    };
    return SystemModel(impl);
}

SystemModel SystemModel::animal_group(SwitchingSignal attraction, SwitchingSignal repulsion,
                                      std::function<double(double, double)> phi_attract,
                                      std::function<double(double, double)> phi_repel,
                                      double distance_floor) {
    attraction.validate();
    repulsion.validate();
    if (attraction.library.empty() || repulsion.library.empty()) {
        throw std::invalid_argument("animal_group: membership signals must carry graphs");
    }
    const int n = attraction.library.front().size();
    if (repulsion.library.front().size() != n) {
        throw std::invalid_argument("animal_group: attraction/repulsion dimensions differ");
    }
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::animal_group;
    impl->name = "animal-group";
    impl->breakpoints = merge_breakpoints([&] {
        auto pts = attraction.breakpoints();
        const auto more = repulsion.breakpoints();
        pts.insert(pts.end(), more.begin(), more.end());
        return pts;
    }());
    impl->coupling = [att = std::move(attraction), rep = std::move(repulsion),
                      pa = std::move(phi_attract), pr = std::move(phi_repel), distance_floor,
                      n](double t, const StateVector& x, Matrix& a) {
        const WeightedDigraph& ga = att.graph_at(t);
        const WeightedDigraph& gr = rep.graph_at(t);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                const double dist = std::max(std::abs(x[i] - x[j]), distance_floor);
                double c = 0.0;
                if (ga.weight(i, j) > 0.0) c += pa(x[i], x[j]) / dist;
                if (gr.weight(i, j) > 0.0) c -= pr(x[i], x[j]) / dist;
                a(i, j) = c;
            }
        }
    };
    return SystemModel(impl);
}

SystemModel SystemModel::custom_switching(
    std::vector<std::function<Matrix(const StateVector&)>> family, SwitchingSignal signal,
    int n) {
    if (family.empty()) throw std::invalid_argument("custom_switching: empty family");
    signal.validate();
    for (const int ix : signal.index) {
        if (ix < 0 || ix >= static_cast<int>(family.size())) {
            throw std::invalid_argument("custom_switching: signal index out of family range");
        }
    }
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::custom_switching;
    impl->name = "custom-switching";
    impl->breakpoints = signal.breakpoints();
    impl->field = [family = std::move(family), signal = std::move(signal)](
                      double t, const StateVector& x) {
        return family[static_cast<std::size_t>(signal.index_at(t))](x);
    };
    return SystemModel(impl);
}

SystemModel SystemModel::custom(int n, std::function<Matrix(double, const StateVector&)> field,
                                std::vector<double> breakpoints, std::string name) {
    if (n < 2) throw std::invalid_argument("custom model: n must be >= 2");
    auto impl = std::make_shared<Impl>();
    impl->n = n;
    impl->kind = ModelKind::custom;
    impl->name = std::move(name);
    impl->breakpoints = merge_breakpoints(std::move(breakpoints));
    impl->field = std::move(field);
    return SystemModel(impl);
}

SystemModel SystemModel::shifted(SystemModel base, double alpha) {
    auto impl = std::make_shared<Impl>();
    impl->n = base.size();
    impl->kind = base.kind();
    impl->name = base.name() + "+shift";
    impl->mode = base.validation();
    impl->domain = base.domain_box();
    impl->breakpoints = base.breakpoints();
    impl->field = [base = std::move(base), alpha](double t, const StateVector& y) {
        const StateVector x = y.array() - alpha;
        return base.evaluate(t, x).entries();
    };
    return SystemModel(impl);
}

} // namespace conecert
