#include "opsf/milp.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <map>

namespace opsf {

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::optimal: return "optimal";
        case SolveStatus::infeasible: return "infeasible";
        case SolveStatus::unbounded: return "unbounded";
        case SolveStatus::limit: return "limit";
    }
    return "unknown";
}

LinExpr& LinExpr::add(const LinExpr& other) {
    terms_.insert(terms_.end(), other.terms_.begin(), other.terms_.end());
    constant_ += other.constant_;
    return *this;
}

void LinExpr::normalize() {
    std::map<int, std::size_t> seen;
    std::vector<LinTerm> merged;
    merged.reserve(terms_.size());
    for (const auto& t : terms_) {
        auto it = seen.find(t.var.index);
        if (it == seen.end()) {
            seen[t.var.index] = merged.size();
            merged.push_back(t);
        } else {
            merged[it->second].coef += t.coef;
        }
    }
    merged.erase(std::remove_if(merged.begin(), merged.end(),
                                [](const LinTerm& t) { return t.coef == 0.0; }),
                 merged.end());
    terms_ = std::move(merged);
}

double LinExpr::evaluate(const std::vector<double>& values) const {
    double v = constant_;
    for (const auto& t : terms_) v += t.coef * values.at(static_cast<std::size_t>(t.var.index));
    return v;
}

namespace {
std::atomic<int> g_model_serial{0};
}

MilpModel::MilpModel() : serial_(g_model_serial.fetch_add(1)) {}

VarHandle MilpModel::add_variable(VarKind kind, double lb, double ub, const std::string& name) {
    if (lb > ub)
        throw ModelError("variable '" + name + "': inverted bounds [" + std::to_string(lb) + ", " +
                         std::to_string(ub) + "]");
    if (kind == VarKind::binary && (lb < 0.0 || ub > 1.0))
        throw ModelError("variable '" + name + "': binary bounds must lie within [0, 1]");
    VarHandle h;
    h.index = static_cast<int>(variables_.size());
    h.kind = kind;
    h.lb = lb;
    h.ub = ub;
    h.name = name;
    h.model_serial = serial_;
    variables_.push_back(h);
    return h;
}

void MilpModel::check_owned(const LinExpr& expr, const std::string& context) const {
    for (const auto& t : expr.terms()) {
        if (t.var.model_serial != serial_ || t.var.index < 0 ||
            t.var.index >= static_cast<int>(variables_.size()))
            throw ModelError(context + ": expression references a handle ('" + t.var.name +
                             "') not issued by this model");
    }
}

int MilpModel::add_constraint(LinExpr expr, Sense sense, double rhs, const std::string& tag) {
    check_owned(expr, "constraint '" + tag + "'");
    if (!std::isfinite(rhs)) throw ModelError("constraint '" + tag + "': non-finite rhs");
    expr.normalize();
    constraints_.push_back({std::move(expr), sense, rhs, tag});
    return static_cast<int>(constraints_.size()) - 1;
}

void MilpModel::set_objective(LinExpr expr) {
    check_owned(expr, "objective");
    expr.normalize();
    objective_ = std::move(expr);
    objective_set_ = true;
}

std::size_t MilpModel::binary_count() const {
    return static_cast<std::size_t>(
        std::count_if(variables_.begin(), variables_.end(),
                      [](const VarHandle& v) { return v.kind == VarKind::binary; }));
}

std::size_t MilpModel::continuous_count() const {
    return variables_.size() - binary_count();
}

std::vector<int> MilpModel::constraints_with_tag_prefix(const std::string& prefix) const {
    std::vector<int> out;
    for (std::size_t i = 0; i < constraints_.size(); ++i)
        if (constraints_[i].tag.rfind(prefix, 0) == 0) out.push_back(static_cast<int>(i));
    return out;
}

std::size_t MilpModel::count_tag_prefix(const std::string& prefix) const {
    return constraints_with_tag_prefix(prefix).size();
}

void MilpModel::set_bounds(const VarHandle& v, double lb, double ub) {
    if (v.model_serial != serial_) throw ModelError("set_bounds: foreign handle");
    if (lb > ub) throw ModelError("set_bounds: inverted bounds");
    auto& stored = variables_.at(static_cast<std::size_t>(v.index));
    stored.lb = lb;
    stored.ub = ub;
}

std::uint64_t MilpModel::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix_bytes = [&h](const void* data, std::size_t n) {
        const unsigned char* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= p[i];
            h *= 1099511628211ULL;
        }
    };
    auto mix_double = [&](double d) { mix_bytes(&d, sizeof(d)); };
    auto mix_string = [&](const std::string& s) { mix_bytes(s.data(), s.size()); };

    for (const auto& v : variables_) {
        mix_string(v.name);
        mix_bytes(&v.kind, sizeof(v.kind));
        mix_double(v.lb);
        mix_double(v.ub);
    }
    auto mix_expr = [&](const LinExpr& e) {
        for (const auto& t : e.terms()) {
            int idx = t.var.index;
            mix_bytes(&idx, sizeof(idx));
            mix_double(t.coef);
        }
        mix_double(e.constant());
    };
    for (const auto& c : constraints_) {
        mix_string(c.tag);
        mix_bytes(&c.sense, sizeof(c.sense));
        mix_double(c.rhs);
        mix_expr(c.expr);
    }
    mix_expr(objective_);
    return h;
}

double MilpModel::max_violation(const std::vector<double>& values) const {
    double worst = 0.0;
    for (const auto& v : variables_) {
        double x = values.at(static_cast<std::size_t>(v.index));
        worst = std::max(worst, v.lb - x);
        worst = std::max(worst, x - v.ub);
        if (v.kind == VarKind::binary) worst = std::max(worst, std::abs(x - std::round(x)));
    }
    for (const auto& c : constraints_) {
        double scale = 1.0;
        for (const auto& t : c.expr.terms()) scale = std::max(scale, std::abs(t.coef));
        double lhs = c.expr.evaluate(values);
        double resid = 0.0;
        switch (c.sense) {
            case Sense::le: resid = lhs - c.rhs; break;
            case Sense::ge: resid = c.rhs - lhs; break;
            case Sense::eq: resid = std::abs(lhs - c.rhs); break;
        }
        worst = std::max(worst, resid / scale);
    }
    return worst;
}

SolveResult solve(const MilpModel& model, MilpBackend& backend, const SolveOptions& options) {
    if (!model.has_objective()) throw ModelError("solve: model has no objective");

    // Degenerate empty model; nothing to hand to a backend.
    if (model.variable_count() == 0) {
        SolveResult r;
        r.status = SolveStatus::optimal;
        r.objective_value = model.objective().constant();
        r.values = {};
        return r;
    }

    auto t0 = std::chrono::steady_clock::now();
    SolveResult r = backend.solve_raw(model, options);
    r.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (r.status == SolveStatus::limit && !r.has_values())
        throw SolveError("time limit reached with no incumbent solution");

    if (r.status == SolveStatus::optimal) {
        double viol = model.max_violation(r.values);
        if (viol > kFeasTol)
            throw SolveError("backend '" + backend.name() +
                             "' returned an optimal point violating feasibility by " +
                             std::to_string(viol));
    }
    return r;
}

} // namespace opsf
