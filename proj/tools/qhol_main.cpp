/**
 * @file qhol_main.cpp
 * @brief The `qhol` command line: evaluation, recurrence guessing and
 *        verification, closure operations, creative telescoping, growth
 *        analysis, finiteness classification, identity proving, and the
 *        formal-series layer, over the expression language of dsl.hpp.
 *
 * Exit codes: 0 success / verified; 1 honest mathematical negative (nonzero
 * residual, mismatch witness, nothing found within bounds); 2 usage error.
 */

#include "CLI11.hpp"
#include "json.hpp"

#include "qhol/analysis.hpp"
#include "qhol/builtins.hpp"
#include "qhol/closure.hpp"
#include "qhol/dsl.hpp"
#include "qhol/fourier.hpp"
#include "qhol/guess.hpp"
#include "qhol/telescope.hpp"

#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace qhol;
using nlohmann::ordered_json;

bool g_json = false;

// ------------------------------------------------------------- small utils ---

std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            std::string part = trimmed(s.substr(start, i - start));
            if (!part.empty()) out.push_back(std::move(part));
            start = i + 1;
        }
    }
    return out;
}

/// Splits on commas that are not inside parentheses ("(0,0),(1,0)").
std::vector<std::string> split_top_level(const std::string& s) {
    std::vector<std::string> out;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || (s[i] == ',' && depth == 0)) {
            std::string part = trimmed(s.substr(start, i - start));
            if (!part.empty()) out.push_back(std::move(part));
            start = i + 1;
        } else if (s[i] == '(') {
            ++depth;
        } else if (s[i] == ')') {
            --depth;
        }
    }
    return out;
}

Point parse_one_point(const std::string& text, int rank) {
    std::string t = trimmed(text);
    if (!t.empty() && t.front() == '(' && t.back() == ')') t = t.substr(1, t.size() - 2);
    Point p;
    for (const std::string& c : split_on(t, ',')) {
        try {
            p.push_back(std::stoll(c));
        } catch (const std::exception&) {
            throw UsageError("cannot read integer coordinate '" + c + "' in point '" + text + "'");
        }
    }
    if (static_cast<int>(p.size()) != rank)
        throw UsageError("point '" + text + "' has " + std::to_string(p.size()) +
                         " coordinates, expected " + std::to_string(rank));
    return p;
}

ordered_json window_json(const Window& w) {
    ordered_json a = ordered_json::array();
    for (const auto& [lo, hi] : w.axes) a.push_back({lo, hi});
    return a;
}

void emit(const ordered_json& j) { std::cout << j.dump() << "\n"; }

// ---------------------------------------------------------- expression glue ---

/// Parses with the session variable list when given, else auto-declares.
DslExpression parse_expr_text(const std::string& text, const std::string& vars_csv) {
    if (vars_csv.empty()) return dsl_parse(text);
    return dsl_parse(text, split_on(vars_csv, ','));
}

/// Parses a second expression over the first one's variables so that both
/// sequences share rank and axis order.
DslExpression parse_second_expr(const std::string& text, const DslExpression& first) {
    return dsl_parse(text, first.vars);
}

RingPtr common_ring_for(const DslExpression& a, const DslExpression& b) {
    if (dsl_ring_for(a)->size() > 1 || dsl_ring_for(b)->size() > 1) return qx_ring();
    return q_ring();
}

/// Attaches a window-verified system obtained by guessing when the sequence
/// does not already carry one.
Sequence ensure_system(Sequence f, const GuessConfig& cfg) {
    if (f.system()) return f;
    try {
        return f.with_system(guess_system(f, cfg));
    } catch (const UsageError&) {
        throw;
    } catch (const Error& e) {
        throw NotFoundError(std::string("no recurrence system for '") + f.name() +
                            "' within the guessing bounds: " + e.what());
    }
}

// --------------------------------------------------------------- reporting ---

void emit_operator_list(const std::vector<WeylOperator>& ops,
                        const std::vector<std::string>& vars) {
    if (g_json) {
        ordered_json j;
        j["schema"] = "qhol/1";
        j["kind"] = "operator-list";
        j["vars"] = vars;
        j["found"] = !ops.empty();
        ordered_json arr = ordered_json::array();
        for (const auto& op : ops) arr.push_back(op.str(vars));
        j["operators"] = std::move(arr);
        emit(j);
        return;
    }
    for (const auto& op : ops) std::cout << op.str(vars) << "\n";
}

void emit_system(const AnnihilatorSystem& sys, const std::vector<std::string>& vars) {
    if (g_json) {
        ordered_json j;
        j["schema"] = "qhol/1";
        j["kind"] = "annihilator-system";
        j["rank"] = sys.rank;
        ordered_json dir = ordered_json::object();
        for (const auto& [axis, op] : sys.direction) dir[std::to_string(axis)] = op.str(vars);
        j["direction"] = std::move(dir);
        ordered_json ex = ordered_json::array();
        for (const auto& op : sys.extras) ex.push_back(op.str(vars));
        j["extras"] = std::move(ex);
        j["status"] = to_string(sys.status);
        j["window"] = window_json(sys.window);
        j["provenance"] = sys.provenance;
        emit(j);
        return;
    }
    for (const auto& [axis, op] : sys.direction) {
        std::cout << "direction " << axis;
        if (axis < static_cast<int>(vars.size())) std::cout << " (" << vars[axis] << ")";
        std::cout << ": " << op.str(vars) << "\n";
    }
    for (const auto& op : sys.extras) std::cout << "extra: " << op.str(vars) << "\n";
    std::cout << "status: " << to_string(sys.status) << " on " << sys.window.str() << "\n";
}

int fail_with(const std::string& kind, const std::string& message,
              const std::map<std::string, ordered_json>& extra = {}) {
    if (g_json) {
        ordered_json j;
        j["schema"] = "qhol/1";
        j["kind"] = "error";
        j["error"] = kind;
        j["message"] = message;
        for (const auto& [k, v] : extra) j[k] = v;
        emit(j);
    } else {
        std::cerr << "error (" << kind << "): " << message << "\n";
    }
    return 2;
}

// ----------------------------------------------------------- shared options ---

struct BoundsOpts {
    std::vector<std::int64_t> order;
    std::int64_t mdeg = 2;
    std::int64_t qdeg = 4;
    std::int64_t pdeg = 1;
    std::string gens;
    std::string eval_window;
    std::string verify_window;

    void attach(CLI::App* sub) {
        sub->add_option("--order", order,
                        "max L-exponent per axis (one value broadcasts; default 2)");
        sub->add_option("--mdeg", mdeg, "max total M-degree of ansatz coefficients");
        sub->add_option("--qdeg", qdeg, "max q-degree of ansatz coefficients");
        sub->add_option("--pdeg", pdeg, "max degree per extra parameter");
        sub->add_option("--gens", gens, "comma-separated generators, e.g. M,L or Mn,Lk");
        sub->add_option("--eval-window", eval_window, "window the linear system is built on");
        sub->add_option("--verify-window", verify_window, "window survivors are re-checked on");
    }

    GuessConfig to_config(const Sequence& f) const {
        GuessConfig cfg;
        if (!order.empty()) cfg.order = order;
        cfg.mdeg = mdeg;
        cfg.qdeg = qdeg;
        cfg.pdeg = pdeg;
        if (!gens.empty()) cfg.gens = GeneratorSet::parse(gens, f.rank(), f.vars());
        if (!eval_window.empty()) cfg.eval_window = Window::parse(eval_window, f.rank());
        if (!verify_window.empty()) cfg.verify_window = Window::parse(verify_window, f.rank());
        return cfg;
    }
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exact computation with q-holonomic sequences"};
    app.require_subcommand(1);
    app.set_config("--session", "",
                   "key=value session file; [section] per subcommand; explicit flags win");

    std::string vars_csv;
    std::optional<std::uint64_t> seed;
    app.add_flag("--json", g_json, "machine-readable JSON output");
    app.add_option("--vars", vars_csv,
                   "declared variables in order (default: first appearance in the expression)");
    app.add_option("--seed", seed, "random seed (required by probabilistic modes)");

    // ---- eval ------------------------------------------------------------
    auto* c_eval = app.add_subcommand("eval", "evaluate an expression at a lattice point");
    std::string eval_expr, eval_at;
    c_eval->add_option("expr", eval_expr, "sequence expression")->required();
    c_eval->add_option("--at", eval_at, "bindings, e.g. n=3 or n=3,k=1")->required();
    c_eval->fallthrough();

    // ---- guess -----------------------------------------------------------
    auto* c_guess = app.add_subcommand("guess", "find annihilating operators from values");
    std::string guess_expr;
    BoundsOpts guess_bounds;
    c_guess->add_option("expr", guess_expr, "sequence expression")->required();
    guess_bounds.attach(c_guess);
    c_guess->fallthrough();

    // ---- verify ----------------------------------------------------------
    auto* c_verify = app.add_subcommand("verify", "check an operator against a sequence");
    std::string verify_op, verify_expr, verify_window;
    c_verify->add_option("operator", verify_op, "operator text, e.g. \"L - q\"")->required();
    c_verify->add_option("expr", verify_expr, "sequence expression")->required();
    c_verify->add_option("--window", verify_window, "window, e.g. -4..8 or 0..6,0..6")
        ->required();
    c_verify->fallthrough();

    // ---- closure ---------------------------------------------------------
    auto* c_closure = app.add_subcommand("closure", "recurrences for sums/products/reindexings");
    c_closure->require_subcommand(1);
    c_closure->fallthrough();
    std::string cl_expr1, cl_expr2, cl_window, cl_map;
    std::int64_t cl_axis = -1;
    BoundsOpts cl_bounds;

    auto* c_cl_sum = c_closure->add_subcommand("sum", "recurrence for f + g");
    c_cl_sum->add_option("expr1", cl_expr1, "first summand")->required();
    c_cl_sum->add_option("expr2", cl_expr2, "second summand")->required();
    c_cl_sum->add_option("--axis", cl_axis, "single direction (default: whole system)");
    c_cl_sum->add_option("--window", cl_window, "verification window");
    cl_bounds.attach(c_cl_sum);
    c_cl_sum->fallthrough();

    auto* c_cl_mul = c_closure->add_subcommand("mul", "recurrence for the pointwise product");
    c_cl_mul->add_option("expr1", cl_expr1, "first factor")->required();
    c_cl_mul->add_option("expr2", cl_expr2, "second factor")->required();
    c_cl_mul->add_option("--axis", cl_axis, "single direction (default: whole system)");
    c_cl_mul->add_option("--window", cl_window, "verification window");
    cl_bounds.attach(c_cl_mul);
    c_cl_mul->fallthrough();

    auto* c_cl_subst = c_closure->add_subcommand("subst", "recurrence for f(An + b)");
    c_cl_subst->add_option("expr", cl_expr1, "sequence expression")->required();
    c_cl_subst
        ->add_option("--map", cl_map, "substitutions, e.g. \"n -> n - k\" (unmapped stay fixed)")
        ->required();
    c_cl_subst->add_option("--window", cl_window, "verification window");
    cl_bounds.attach(c_cl_subst);
    c_cl_subst->fallthrough();

    // ---- telescope -------------------------------------------------------
    auto* c_tel = app.add_subcommand("telescope", "creative telescoping over the last axis");
    std::string tel_expr, tel_eval_window, tel_check_window, tel_sum;
    std::int64_t tel_J = 3, tel_degM = 4, tel_degQ = 6;
    bool tel_nodouble = false;
    c_tel->add_option("expr", tel_expr, "rank-2 sequence expression")->required();
    c_tel->add_option("--J", tel_J, "max operator order in the ansatz");
    c_tel->add_option("--degM", tel_degM, "max M-degree in the ansatz");
    c_tel->add_option("--degQ", tel_degQ, "max q-degree in the ansatz");
    c_tel->add_flag("--no-double", tel_nodouble, "do not retry once at doubled bounds");
    c_tel->add_option("--eval-window", tel_eval_window, "points the linear system is built on");
    c_tel->add_option("--check-window", tel_check_window,
                      "window for re-verification (default: the certificate's)");
    c_tel->add_option("--sum", tel_sum, "check the bounded sum a..b instead of the full line");
    c_tel->fallthrough();

    // ---- dim -------------------------------------------------------------
    auto* c_dim = app.add_subcommand("dim", "filtration growth degree with verdict");
    std::string dim_expr, dim_window;
    std::int64_t dim_K = -1;
    int dim_trials = 3;
    bool dim_exact = false;
    c_dim->add_option("expr", dim_expr, "sequence expression")->required();
    c_dim->add_option("--window", dim_window, "evaluation window")->required();
    c_dim->add_option("--K", dim_K, "truncation depth (default: calibrated per rank)");
    c_dim->add_flag("--exact", dim_exact, "exact ranks over k(q) instead of probabilistic");
    c_dim->add_option("--trials", dim_trials, "probabilistic trials (default 3)");
    c_dim->fallthrough();

    // ---- classify --------------------------------------------------------
    auto* c_cls = app.add_subcommand("classify", "finiteness evidence by bounded searches");
    std::string cls_expr;
    BoundsOpts cls_bounds;
    c_cls->add_option("expr", cls_expr, "sequence expression")->required();
    cls_bounds.attach(c_cls);
    c_cls->fallthrough();

    // ---- prove-equal -----------------------------------------------------
    auto* c_peq = app.add_subcommand("prove-equal",
                                     "equality relative to a verified recurrence system");
    std::string peq_expr1, peq_expr2, peq_base, peq_range, peq_use = "auto";
    BoundsOpts peq_bounds;
    c_peq->add_option("expr1", peq_expr1, "first sequence")->required();
    c_peq->add_option("expr2", peq_expr2, "second sequence")->required();
    c_peq->add_option("--base", peq_base, "base points, e.g. \"-1,0,1\" or \"(0,0),(1,0)\"")
        ->required();
    c_peq->add_option("--range", peq_range, "window to determine (default: system's window)");
    c_peq->add_option("--use", peq_use,
                      "which system to use: auto | first | second | guess (default auto)");
    peq_bounds.attach(c_peq);
    c_peq->fallthrough();

    // ---- fourier ---------------------------------------------------------
    auto* c_fou = app.add_subcommand("fourier", "truncated formal-series layer");
    std::string fou_expr, fou_box, fou_apply, fou_had, fou_prod;
    c_fou->add_option("expr", fou_expr, "sequence expression")->required();
    c_fou->add_option("--box", fou_box, "truncation box")->required();
    c_fou->add_option("--apply", fou_apply, "apply an operator to the series");
    c_fou->add_option("--hadamard", fou_had, "coefficientwise product with a second series");
    c_fou->add_option("--prod", fou_prod, "series product (convolution) with a second series");
    c_fou->fallthrough();

    // ----------------------------------------------------------------------

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        // ---- eval
        if (app.got_subcommand(c_eval)) {
            DslExpression e = parse_expr_text(eval_expr, vars_csv);
            Sequence f = dsl_compile(e);
            std::map<std::string, std::int64_t> binds;
            for (const std::string& part : split_on(eval_at, ',')) {
                std::size_t eq = part.find('=');
                if (eq == std::string::npos)
                    throw UsageError("binding '" + part + "' is not of the form var=integer");
                std::string v = trimmed(part.substr(0, eq));
                std::string val = trimmed(part.substr(eq + 1));
                try {
                    binds[v] = std::stoll(val);
                } catch (const std::exception&) {
                    throw UsageError("binding '" + part + "' is not of the form var=integer");
                }
            }
            Point p;
            for (const std::string& v : e.vars) {
                auto it = binds.find(v);
                if (it == binds.end()) throw UsageError("--at does not bind variable '" + v + "'");
                p.push_back(it->second);
                binds.erase(it);
            }
            if (!binds.empty())
                throw UsageError("--at binds '" + binds.begin()->first +
                                 "', which is not a variable of the expression");
            Scalar v = f.at(p);
            if (g_json) {
                ordered_json j;
                j["schema"] = "qhol/1";
                j["kind"] = "value";
                j["expression"] = e.str();
                j["vars"] = e.vars;
                j["point"] = p;
                j["value"] = v.str();
                emit(j);
            } else {
                std::cout << v.str() << "\n";
            }
            return 0;
        }

        // ---- guess
        if (app.got_subcommand(c_guess)) {
            DslExpression e = parse_expr_text(guess_expr, vars_csv);
            Sequence f = dsl_compile(e);
            std::vector<WeylOperator> ops = guess_annihilator(f, guess_bounds.to_config(f));
            emit_operator_list(ops, e.vars);
            if (ops.empty()) {
                if (!g_json) std::cerr << "no annihilator within the given bounds\n";
                return 1;
            }
            return 0;
        }

        // ---- verify
        if (app.got_subcommand(c_verify)) {
            DslExpression e = parse_expr_text(verify_expr, vars_csv);
            Sequence f = dsl_compile(e);
            Window w = Window::parse(verify_window, f.rank());
            WeylOperator P = WeylOperator::parse(f.rank(), f.sring(), verify_op, e.vars);
            bool all_zero = true;
            std::optional<Point> witness;
            ordered_json residuals = ordered_json::array();
            w.for_each_point([&](const Point& p) {
                Scalar v = weyl_apply(P, f, p);
                if (!v.is_zero() && !witness) {
                    all_zero = false;
                    witness = p;
                }
                if (g_json) {
                    ordered_json r;
                    r["point"] = p;
                    r["value"] = v.str();
                    residuals.push_back(std::move(r));
                } else {
                    std::cout << point_to_string(p) << " : " << v.str() << "\n";
                }
            });
            if (g_json) {
                ordered_json j;
                j["schema"] = "qhol/1";
                j["kind"] = "verification";
                j["operator"] = P.str(e.vars);
                j["window"] = window_json(w);
                j["all_zero"] = all_zero;
                if (witness)
                    j["witness"] = *witness;
                else
                    j["witness"] = nullptr;
                j["residuals"] = std::move(residuals);
                emit(j);
            } else if (all_zero) {
                std::cout << "all residuals zero on " << w.str() << "\n";
            } else {
                std::cout << "nonzero residual at " << point_to_string(*witness) << "\n";
            }
            return all_zero ? 0 : 1;
        }

        // ---- closure
        if (app.got_subcommand(c_closure)) {
            bool is_sum = c_closure->got_subcommand(c_cl_sum);
            bool is_mul = c_closure->got_subcommand(c_cl_mul);
            DslExpression e1 = parse_expr_text(cl_expr1, vars_csv);
            if (is_sum || is_mul) {
                DslExpression e2 = parse_second_expr(cl_expr2, e1);
                RingPtr ring = common_ring_for(e1, e2);
                GuessConfig cfg;  // bounds only consulted when a system is missing
                Sequence f = dsl_compile(e1, ring);
                Sequence g = dsl_compile(e2, ring);
                f = ensure_system(f, cl_bounds.to_config(f));
                g = ensure_system(g, cl_bounds.to_config(g));
                std::optional<Window> w;
                if (!cl_window.empty()) w = Window::parse(cl_window, f.rank());
                if (cl_axis >= 0) {
                    WeylOperator op = is_sum
                                          ? closure_sum(f, g, static_cast<int>(cl_axis), w)
                                          : closure_mul(f, g, static_cast<int>(cl_axis), w);
                    emit_operator_list({op}, e1.vars);
                } else {
                    AnnihilatorSystem sys =
                        is_sum ? closure_sum_system(f, g, w) : closure_mul_system(f, g, w);
                    emit_system(sys, e1.vars);
                }
                return 0;
            }
            // subst
            Sequence f = dsl_compile(e1);
            f = ensure_system(f, cl_bounds.to_config(f));
            const int r = f.rank();
            std::map<std::string, AffineForm> maps;
            for (const std::string& part : split_top_level(cl_map)) {
                std::size_t arrow = part.find("->");
                if (arrow == std::string::npos)
                    throw UsageError("map entry '" + part + "' is not of the form var -> affine");
                std::string v = trimmed(part.substr(0, arrow));
                if (std::find(e1.vars.begin(), e1.vars.end(), v) == e1.vars.end())
                    throw UsageError("'" + v + "' is not a variable of the expression");
                maps[v] = dsl_parse_affine(part.substr(arrow + 2), e1.vars);
            }
            std::vector<std::vector<std::int64_t>> A;
            std::vector<std::int64_t> b;
            for (int row = 0; row < r; ++row) {
                const std::string& v = e1.vars[static_cast<std::size_t>(row)];
                std::vector<std::int64_t> rw(e1.vars.size(), 0);
                std::int64_t off = 0;
                auto it = maps.find(v);
                if (it == maps.end()) {
                    rw[static_cast<std::size_t>(row)] = 1;
                } else {
                    for (const auto& [tv, c] : it->second.terms) {
                        auto pos = std::find(e1.vars.begin(), e1.vars.end(), tv);
                        rw[static_cast<std::size_t>(pos - e1.vars.begin())] += c;
                    }
                    off = it->second.offset;
                }
                A.push_back(std::move(rw));
                b.push_back(off);
            }
            std::optional<Window> w;
            if (!cl_window.empty()) w = Window::parse(cl_window, r);
            AnnihilatorSystem sys = closure_affine(f, A, b, w);
            emit_system(sys, e1.vars);
            return 0;
        }

        // ---- telescope
        if (app.got_subcommand(c_tel)) {
            DslExpression e = parse_expr_text(tel_expr, vars_csv);
            Sequence f = dsl_compile(e);
            TelescopeBounds tb;
            tb.J = static_cast<int>(tel_J);
            tb.degM = static_cast<int>(tel_degM);
            tb.degQ = static_cast<int>(tel_degQ);
            tb.double_once = !tel_nodouble;
            std::optional<Window> ew;
            if (!tel_eval_window.empty()) ew = Window::parse(tel_eval_window, f.rank());
            TelescopingCertificate cert = telescope_search(f, tb, ew);
            Window cw = tel_check_window.empty() ? cert.window
                                                 : Window::parse(tel_check_window, f.rank());
            std::optional<std::pair<std::int64_t, std::int64_t>> sr;
            if (!tel_sum.empty()) {
                Window sw = Window::parse(tel_sum, 1);
                sr = sw.axes[0];
            }
            TelescopeReport rep = telescope_check(f, cert, cw, sr);
            bool ok = rep.status == VerifyStatus::WindowVerified && !rep.residual_witness &&
                      !rep.boundary_witness;
            std::vector<std::string> survivor{e.vars.empty() ? std::string("n") : e.vars[0]};
            if (g_json) {
                ordered_json j;
                j["schema"] = "qhol/1";
                j["kind"] = "telescoping";
                j["certificate"] = ordered_json::parse(cert.to_json(e.vars));
                ordered_json chk;
                chk["status"] = to_string(rep.status);
                chk["residual_witness"] =
                    rep.residual_witness ? ordered_json(*rep.residual_witness) : ordered_json();
                chk["boundary_witness"] =
                    rep.boundary_witness ? ordered_json(*rep.boundary_witness) : ordered_json();
                chk["message"] = rep.message;
                chk["induced"] = rep.induced.str(survivor);
                j["check"] = std::move(chk);
                j["passed"] = ok;
                emit(j);
            } else {
                std::cout << "T: " << cert.T.str(e.vars) << "\n";
                std::cout << "R: " << cert.R.str(e.vars) << "\n";
                std::cout << "verified: " << cert.window.str() << "\n";
                std::cout << "check: " << (ok ? "passed" : "FAILED") << " — " << rep.message
                          << "\n";
                std::cout << "induced recurrence: " << rep.induced.str(survivor) << "\n";
            }
            return ok ? 0 : 1;
        }

        // ---- dim
        if (app.got_subcommand(c_dim)) {
            DslExpression e = parse_expr_text(dim_expr, vars_csv);
            Sequence f = dsl_compile(e);
            Window w = Window::parse(dim_window, f.rank());
            int K = dim_K >= 0 ? static_cast<int>(dim_K) : dimension_default_K(f.rank());
            RankMode mode = dim_exact ? RankMode::Exact : RankMode::Probabilistic;
            if (!dim_exact && !seed)
                throw UsageError(
                    "probabilistic mode requires --seed; pass --exact for the exact mode");
            DimensionReport rep =
                dimension_estimate(f, K, w, mode, seed.value_or(0), dim_trials);
            if (g_json) {
                emit(ordered_json::parse(rep.to_json()));
            } else {
                std::cout << "ranks:";
                for (std::size_t r : rep.ranks) std::cout << " " << r;
                std::cout << "\nfitted degree: " << rep.fitted_degree
                          << (rep.stabilized ? "" : " (lower bound)") << "\n";
                std::cout << "verdict: " << to_string(rep.verdict);
                if (!rep.note.empty()) std::cout << " (" << rep.note << ")";
                std::cout << "\n";
            }
            return 0;
        }

        // ---- classify
        if (app.got_subcommand(c_cls)) {
            DslExpression e = parse_expr_text(cls_expr, vars_csv);
            Sequence f = dsl_compile(e);
            FinitenessReport rep = classify_finiteness(f, cls_bounds.to_config(f));
            if (g_json) {
                emit(ordered_json::parse(rep.to_json(e.vars)));
            } else {
                auto yn = [](bool b) { return b ? "yes" : "no (not found within bounds)"; };
                std::cout << "zero sequence: " << (rep.zero_sequence ? "yes" : "no") << "\n";
                std::cout << "integrally finite: " << yn(rep.integrally_finite) << "\n";
                std::cout << "finite: " << yn(rep.finite) << "\n";
                std::cout << "strongly finite evidence: " << yn(rep.strongly_finite_evidence)
                          << "\n";
                for (const auto& d : rep.directions) {
                    std::cout << "direction " << d.axis << " (" << e.vars[d.axis]
                              << "): " << (d.found ? d.op->str(e.vars) : "not found") << " ["
                              << d.source << "]";
                    if (d.unit_leading)
                        std::cout << "; unit leading: " << d.unit_op->str(e.vars);
                    std::cout << "\n";
                }
                for (const auto& s : rep.subsets) {
                    std::cout << "subset {" << s.gens_text
                              << "}: " << (s.found ? s.op->str(e.vars) : "not found within bounds")
                              << "\n";
                }
            }
            return 0;
        }

        // ---- prove-equal
        if (app.got_subcommand(c_peq)) {
            DslExpression e1 = parse_expr_text(peq_expr1, vars_csv);
            DslExpression e2 = parse_second_expr(peq_expr2, e1);
            RingPtr ring = common_ring_for(e1, e2);
            Sequence f = dsl_compile(e1, ring);
            Sequence g = dsl_compile(e2, ring);
            std::optional<AnnihilatorSystem> sys;
            if (peq_use == "first" || peq_use == "auto") {
                if (f.system()) sys = *f.system();
                else if (peq_use == "first")
                    throw UsageError("the first sequence carries no recurrence system");
            }
            if (!sys && (peq_use == "second" || peq_use == "auto")) {
                if (g.system()) sys = *g.system();
                else if (peq_use == "second")
                    throw UsageError("the second sequence carries no recurrence system");
            }
            if (!sys && (peq_use == "guess" || peq_use == "auto"))
                sys = *ensure_system(f, peq_bounds.to_config(f)).system();
            if (!sys)
                throw UsageError("unknown --use mode '" + peq_use +
                                 "' (expected auto, first, second, or guess)");
            std::vector<Point> S;
            for (const std::string& t : split_top_level(peq_base))
                S.push_back(parse_one_point(t, f.rank()));
            if (S.empty()) throw UsageError("--base needs at least one point");
            std::optional<Window> range;
            if (!peq_range.empty()) range = Window::parse(peq_range, f.rank());
            EqualityReport rep = prove_equal(f, g, *sys, S, range);
            if (g_json) {
                emit(ordered_json::parse(rep.to_json(e1.vars)));
            } else {
                std::cout << rep.status << ": " << rep.message << "\n";
            }
            return rep.equal ? 0 : 1;
        }

        // ---- fourier
        if (app.got_subcommand(c_fou)) {
            int chosen = (!fou_apply.empty()) + (!fou_had.empty()) + (!fou_prod.empty());
            if (chosen > 1)
                throw UsageError("--apply, --hadamard, and --prod are mutually exclusive");
            DslExpression e = parse_expr_text(fou_expr, vars_csv);
            RingPtr ring = dsl_ring_for(e);
            if (!fou_had.empty() || !fou_prod.empty()) {
                DslExpression e2 =
                    parse_second_expr(fou_had.empty() ? fou_prod : fou_had, e);
                ring = common_ring_for(e, e2);
            }
            Sequence f = dsl_compile(e, ring);
            Window box = Window::parse(fou_box, f.rank());
            FormalSeries s = fourier_truncate(f, box);
            if (!fou_apply.empty()) {
                WeylOperator P = WeylOperator::parse(f.rank(), f.sring(), fou_apply, e.vars);
                s = series_op(P, s);
            } else if (!fou_had.empty()) {
                Sequence g = dsl_compile(parse_second_expr(fou_had, e), ring);
                s = hadamard(s, fourier_truncate(g, box));
            } else if (!fou_prod.empty()) {
                Sequence g = dsl_compile(parse_second_expr(fou_prod, e), ring);
                s = series_mul(s, fourier_truncate(g, box));
            }
            if (g_json) {
                ordered_json j;
                j["schema"] = "qhol/1";
                j["kind"] = "formal-series";
                j["box"] = window_json(s.box);
                j["exact_support"] = s.exact_support;
                ordered_json coeffs = ordered_json::array();
                for (const auto& [p, v] : s.coeff) {
                    ordered_json c;
                    c["point"] = p;
                    c["value"] = v.str();
                    coeffs.push_back(std::move(c));
                }
                j["coefficients"] = std::move(coeffs);
                emit(j);
            } else {
                std::cout << s.str() << "\n";
                std::cout << "box: " << s.box.str()
                          << (s.exact_support ? " (exact support)" : " (truncation)") << "\n";
            }
            return 0;
        }

        return fail_with("usage", "no command given");
    } catch (const NotFoundError& e) {
        if (g_json) {
            ordered_json j;
            j["schema"] = "qhol/1";
            j["kind"] = "error";
            j["error"] = "not-found";
            j["message"] = e.what();
            emit(j);
        } else {
            std::cerr << e.what() << "\n";
        }
        return 1;
    } catch (const UndeclaredVariableError& e) {
        return fail_with("undeclared-variable", e.what(), {{"variable", e.variable}});
    } catch (const ArityError& e) {
        return fail_with("arity", e.what(),
                         {{"builtin", e.builtin}, {"expected", e.expected}, {"given", e.given}});
    } catch (const ParseError& e) {
        return fail_with("syntax", e.what(), {{"position", e.position}});
    } catch (const DivisionByZeroError& e) {
        return fail_with("division-by-zero", e.what());
    } catch (const UsageError& e) {
        return fail_with("usage", e.what());
    } catch (const Error& e) {
        return fail_with("error", e.what());
    }
}
