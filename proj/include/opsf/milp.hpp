#pragma once

#include <limits>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

namespace opsf {

class ModelError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class BackendUnavailable : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SolveError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class VarKind { binary, continuous };

struct VarHandle {
    int index = -1;
    VarKind kind = VarKind::continuous;
    double lb = -kInfinity;
    double ub = kInfinity;
    std::string name;
    int model_serial = -1; // issuing model, used to reject foreign handles

    bool valid() const { return index >= 0; }
};

struct LinTerm {
    VarHandle var;
    double coef = 0.0;
};

class LinExpr {
  public:
    LinExpr() = default;
    explicit LinExpr(double constant) : constant_(constant) {}

    LinExpr& add(const VarHandle& v, double coef) {
        terms_.push_back({v, coef});
        return *this;
    }
    LinExpr& add(const LinExpr& other);
    LinExpr& add_constant(double c) {
        constant_ += c;
        return *this;
    }

    const std::vector<LinTerm>& terms() const { return terms_; }
    double constant() const { return constant_; }

    // Merges duplicate handles and drops zero coefficients.
    void normalize();

    double evaluate(const std::vector<double>& values) const;

  private:
    std::vector<LinTerm> terms_;
    double constant_ = 0.0;
};

enum class Sense { le, eq, ge };

struct Constraint {
    LinExpr expr;
    Sense sense = Sense::le;
    double rhs = 0.0;
    std::string tag;
};

enum class SolveStatus { optimal, infeasible, unbounded, limit };

std::string to_string(SolveStatus s);

struct SolveOptions {
    double time_limit_s = 0.0; // 0 disables the limit
    double mip_gap = 0.0;      // prove optimality by default
    std::uint64_t seed = 0;    // passed through; ignored by deterministic engines
};

struct SolveResult {
    SolveStatus status = SolveStatus::limit;
    double objective_value = 0.0;
    std::vector<double> values; // indexed by variable index; empty without incumbent
    double solve_seconds = 0.0;
    double gap = 0.0;

    bool has_values() const { return !values.empty(); }
    double value(const VarHandle& v) const { return values.at(static_cast<std::size_t>(v.index)); }
};

class MilpModel {
  public:
    MilpModel();
    MilpModel(MilpModel&&) = default;
    MilpModel& operator=(MilpModel&&) = default;
    MilpModel(const MilpModel&) = delete;
    MilpModel& operator=(const MilpModel&) = delete;

    VarHandle add_variable(VarKind kind, double lb, double ub, const std::string& name);
    VarHandle add_binary(const std::string& name) { return add_variable(VarKind::binary, 0, 1, name); }

    int add_constraint(LinExpr expr, Sense sense, double rhs, const std::string& tag);

    void set_objective(LinExpr expr); // minimized
    bool has_objective() const { return objective_set_; }
    const LinExpr& objective() const { return objective_; }

    const std::vector<VarHandle>& variables() const { return variables_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    std::size_t variable_count() const { return variables_.size(); }
    std::size_t constraint_count() const { return constraints_.size(); }
    std::size_t binary_count() const;
    std::size_t continuous_count() const;

    std::vector<int> constraints_with_tag_prefix(const std::string& prefix) const;
    std::size_t count_tag_prefix(const std::string& prefix) const;

    // Tightens a variable's bounds (used to pin binaries in enumeration tests).
    void set_bounds(const VarHandle& v, double lb, double ub);

    int serial() const { return serial_; }

    // Stable content fingerprint of variables, bounds, rows and objective.
    std::uint64_t fingerprint() const;

    // Largest normalized violation over all rows, bounds and integrality.
    double max_violation(const std::vector<double>& values) const;

  private:
    void check_owned(const LinExpr& expr, const std::string& context) const;

    int serial_;
    std::vector<VarHandle> variables_;
    std::vector<Constraint> constraints_;
    LinExpr objective_;
    bool objective_set_ = false;
};

class MilpBackend {
  public:
    virtual ~MilpBackend() = default;
    virtual std::string name() const = 0;
    virtual SolveResult solve_raw(const MilpModel& model, const SolveOptions& options) = 0;
};

// Supported names: "highs" (HiGHS via a persistent python/scipy worker).
// Throws BackendUnavailable for unknown names or when the worker cannot start.
std::unique_ptr<MilpBackend> make_backend(const std::string& name);

// Solves and, for optimal results, re-checks primal feasibility of every
// constraint at tolerance 1e-6 on normalized rows.
// Throws SolveError when a time limit expires with no incumbent.
SolveResult solve(const MilpModel& model, MilpBackend& backend, const SolveOptions& options = {});

constexpr double kFeasTol = 1e-6;

} // namespace opsf
