#include "opsf/milp.hpp"

#include <nlohmann/json.hpp>

#include <cerrno>
#include <csignal>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <sys/wait.h>
#include <unistd.h>

namespace opsf {

namespace {

using json = nlohmann::json;

// Worker protocol: one JSON request per line on stdin, one JSON response per
// line on stdout. The worker stays alive across solves so the interpreter
// start-up cost is paid once per backend instance.
const char* kWorkerScript = R"PY(
import sys, json
import numpy as np
from scipy.optimize import milp, LinearConstraint, Bounds
from scipy.sparse import csr_matrix

INF = 1e30

def conv(vals):
    return [(-np.inf if v <= -INF else (np.inf if v >= INF else v)) for v in vals]

print(json.dumps({"ready": True}), flush=True)
for raw in sys.stdin:
    raw = raw.strip()
    if not raw:
        continue
    try:
        m = json.loads(raw)
        n = m["ncols"]
        cons = None
        if m["nrows"] > 0:
            A = csr_matrix((m["val"], m["idx"], m["starts"]), shape=(m["nrows"], n))
            cons = LinearConstraint(A, conv(m["rlb"]), conv(m["rub"]))
        opts = {"presolve": True, "mip_rel_gap": m.get("mip_rel_gap", 0.0)}
        if m.get("time_limit", 0) > 0:
            opts["time_limit"] = m["time_limit"]
        res = milp(c=m["obj"], integrality=m["integrality"],
                   bounds=Bounds(conv(m["lb"]), conv(m["ub"])),
                   constraints=cons, options=opts)
        out = {"status": int(res.status), "message": str(res.message)}
        if res.x is not None:
            out["x"] = [float(v) for v in res.x]
            out["objective"] = float(res.fun)
            gap = getattr(res, "mip_gap", None)
            out["gap"] = float(gap) if gap is not None else 0.0
        print(json.dumps(out), flush=True)
    except Exception as exc:
        print(json.dumps({"status": -1, "message": repr(exc)}), flush=True)
)PY";

class HighsSubprocessBackend : public MilpBackend {
  public:
    HighsSubprocessBackend() = default;
    ~HighsSubprocessBackend() override { shutdown(); }

    std::string name() const override { return "highs"; }

    SolveResult solve_raw(const MilpModel& model, const SolveOptions& options) override {
        ensure_worker();
        std::string request = encode(model, options);
        request.push_back('\n');
        write_all(request);
        json reply = read_reply();
        return decode(model, reply);
    }

  private:
    void ensure_worker() {
        if (pid_ > 0) return;
        std::signal(SIGPIPE, SIG_IGN);

        // O_CLOEXEC keeps these descriptors out of workers forked later by
        // other backend instances; a leaked write end would block the EOF
        // that tells a worker to exit.
        int to_child[2];
        int from_child[2];
        if (pipe2(to_child, O_CLOEXEC) != 0 || pipe2(from_child, O_CLOEXEC) != 0)
            throw BackendUnavailable("highs backend: cannot create pipes");

        pid_ = fork();
        if (pid_ < 0) throw BackendUnavailable("highs backend: fork failed");
        if (pid_ == 0) {
            // dup2 clears the close-on-exec flag on the worker's own ends.
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            int devnull = open("/dev/null", O_WRONLY);
            if (devnull >= 0) dup2(devnull, STDERR_FILENO);
            execlp("python3", "python3", "-c", kWorkerScript, static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        wfd_ = to_child[1];
        rstream_ = fdopen(from_child[0], "r");
        if (!rstream_) {
            shutdown();
            throw BackendUnavailable("highs backend: cannot open worker stream");
        }

        json hello = read_reply_or_null();
        if (hello.is_null() || !hello.value("ready", false)) {
            shutdown();
            throw BackendUnavailable(
                "highs backend: python3 worker failed to start (python3 with scipy >= 1.9 required)");
        }
    }

    void shutdown() {
        if (wfd_ >= 0) {
            close(wfd_);
            wfd_ = -1;
        }
        if (rstream_) {
            fclose(rstream_);
            rstream_ = nullptr;
        }
        if (pid_ > 0) {
            // The worker exits on stdin EOF; escalate if it lingers.
            int status = 0;
            for (int i = 0; i < 200; ++i) {
                if (waitpid(pid_, &status, WNOHANG) == pid_) {
                    pid_ = -1;
                    return;
                }
                usleep(10000);
            }
            kill(pid_, SIGKILL);
            waitpid(pid_, &status, 0);
            pid_ = -1;
        }
    }

    void write_all(const std::string& data) {
        std::size_t off = 0;
        while (off < data.size()) {
            ssize_t n = write(wfd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                shutdown();
                throw BackendUnavailable("highs backend: worker pipe closed");
            }
            off += static_cast<std::size_t>(n);
        }
    }

    json read_reply_or_null() {
        char* line = nullptr;
        size_t cap = 0;
        ssize_t n = getline(&line, &cap, rstream_);
        if (n <= 0) {
            free(line);
            return json();
        }
        json j = json::parse(line, nullptr, false);
        free(line);
        if (j.is_discarded()) return json();
        return j;
    }

    json read_reply() {
        json j = read_reply_or_null();
        if (j.is_null()) {
            shutdown();
            throw BackendUnavailable("highs backend: worker terminated unexpectedly");
        }
        return j;
    }

    static double clamp_inf(double v) {
        if (v == kInfinity) return 1e30;
        if (v == -kInfinity) return -1e30;
        return v;
    }

    static std::string encode(const MilpModel& model, const SolveOptions& options) {
        json req;
        const auto& vars = model.variables();
        req["ncols"] = vars.size();
        std::vector<double> obj(vars.size(), 0.0), lb, ub;
        std::vector<int> integrality;
        lb.reserve(vars.size());
        ub.reserve(vars.size());
        integrality.reserve(vars.size());
        for (const auto& v : vars) {
            lb.push_back(clamp_inf(v.lb));
            ub.push_back(clamp_inf(v.ub));
            integrality.push_back(v.kind == VarKind::binary ? 1 : 0);
        }
        for (const auto& t : model.objective().terms())
            obj[static_cast<std::size_t>(t.var.index)] += t.coef;
        req["obj"] = obj;
        req["lb"] = lb;
        req["ub"] = ub;
        req["integrality"] = integrality;

        const auto& rows = model.constraints();
        req["nrows"] = rows.size();
        std::vector<std::size_t> starts;
        std::vector<int> idx;
        std::vector<double> val, rlb, rub;
        starts.push_back(0);
        for (const auto& c : rows) {
            for (const auto& t : c.expr.terms()) {
                idx.push_back(t.var.index);
                val.push_back(t.coef);
            }
            starts.push_back(idx.size());
            double rhs = c.rhs - c.expr.constant();
            switch (c.sense) {
                case Sense::le:
                    rlb.push_back(-1e30);
                    rub.push_back(rhs);
                    break;
                case Sense::ge:
                    rlb.push_back(rhs);
                    rub.push_back(1e30);
                    break;
                case Sense::eq:
                    rlb.push_back(rhs);
                    rub.push_back(rhs);
                    break;
            }
        }
        req["starts"] = starts;
        req["idx"] = idx;
        req["val"] = val;
        req["rlb"] = rlb;
        req["rub"] = rub;
        req["mip_rel_gap"] = options.mip_gap;
        req["time_limit"] = options.time_limit_s;
        return req.dump();
    }

    static SolveResult decode(const MilpModel& model, const json& reply) {
        int status = reply.value("status", -1);
        if (status == -1 || status == 4)
            throw SolveError("highs backend: " + reply.value("message", std::string("solver error")));

        SolveResult r;
        switch (status) {
            case 0: r.status = SolveStatus::optimal; break;
            case 1: r.status = SolveStatus::limit; break;
            case 2: r.status = SolveStatus::infeasible; break;
            case 3: r.status = SolveStatus::unbounded; break;
            default: throw SolveError("highs backend: unknown status " + std::to_string(status));
        }
        if (reply.contains("x")) {
            r.values = reply.at("x").get<std::vector<double>>();
            r.objective_value = reply.at("objective").get<double>() + model.objective().constant();
            r.gap = reply.value("gap", 0.0);
        }
        return r;
    }

    pid_t pid_ = -1;
    int wfd_ = -1;
    FILE* rstream_ = nullptr;
};

} // namespace

std::unique_ptr<MilpBackend> make_backend(const std::string& name) {
    if (name == "highs") return std::make_unique<HighsSubprocessBackend>();
    throw BackendUnavailable("unknown MILP backend '" + name + "' (available: highs)");
}

} // namespace opsf
