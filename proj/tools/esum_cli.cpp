// Command-line front end: sieving, exponential sums, arc classification,
// bound envelopes, ratio sweeps, the explicit formula, partition counts,
// saddle solves, arc scans and figure-data regeneration.
//
// Scalar results print as JSON; series go to CSV with a leading
// "# config: ..." provenance line.  Identical configuration (including seed)
// produces byte-identical output.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "esum/arith.hpp"
#include "esum/bounds.hpp"
#include "esum/diophantine.hpp"
#include "esum/expsum.hpp"
#include "esum/partitions.hpp"
#include "esum/summation.hpp"
#include "esum/zeta.hpp"

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", v);
    return buf;
}

// Streams rows either to stdout or to a file that is removed again if the
// run fails before commit().
class Output {
  public:
    explicit Output(const std::string& path) : path_(path) {
        if (!path_.empty()) {
            file_.open(path_);
            if (!file_) throw std::runtime_error("cannot open output " + path_);
        }
    }
    ~Output() {
        if (!committed_ && !path_.empty()) {
            file_.close();
            std::error_code ec;
            std::filesystem::remove(path_, ec);
        }
    }
    std::ostream& stream() { return path_.empty() ? std::cout : file_; }
    void commit() {
        if (!path_.empty()) file_.flush();
        committed_ = true;
    }

  private:
    std::string path_;
    std::ofstream file_;
    bool committed_ = false;
};

std::string zeros_path_default() {
    if (const char* env = std::getenv("ESUM_ZEROS")) return env;
    return "data/zeta_zeros.txt";
}

int threads_default() {
    if (const char* env = std::getenv("ESUM_THREADS")) return std::atoi(env);
    return 0;
}

esum::PartKind part_kind_from(const std::string& s) {
    if (s == "squarefree") return esum::PartKind::squarefree_parts;
    if (s == "squares_of_squarefree")
        return esum::PartKind::squares_of_squarefree_parts;
    throw CLI::ValidationError("--kind", "unknown partition kind " + s);
}

struct VerifyRow {
    double alpha, X;
    std::int64_t a, q;
    double upsilon, s_abs, env, ratio;
    int dominant;
    bool in_regime;
};

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"exponential sums, bound envelopes, explicit formula and "
                 "squarefree-part partitions"};
    app.require_subcommand(1);
    app.fallthrough();  // accept global options after the subcommand too
    int threads = threads_default();
    app.add_option("--threads", threads, "worker thread cap (0 = machine)");

    // ---- sieve ----------------------------------------------------------
    auto* sc_sieve = app.add_subcommand("sieve", "tabulate an arithmetic function");
    std::string sieve_kind = "mu", sieve_out;
    std::uint64_t sieve_limit = 0;
    int sieve_k = 2;
    sc_sieve->add_option("--kind", sieve_kind,
                         "mu|mu_abs|lambda|one_p|one|log|tau_k|mu_prime|omega")
        ->required();
    sc_sieve->add_option("--limit", sieve_limit, "table size X")->required();
    sc_sieve->add_option("--k", sieve_k, "order for tau_k");
    sc_sieve->add_option("--out", sieve_out, "CSV path (default stdout)");

    // ---- expsum ---------------------------------------------------------
    auto* sc_exp = app.add_subcommand("expsum", "evaluate a twisted exponential sum");
    std::string exp_weight = "mu_abs", exp_phase = "linear", exp_out, exp_sweep;
    double exp_alpha = 0.0, exp_x = 1e6;
    int exp_fold = 1;
    std::vector<double> exp_poly;
    sc_exp->add_option("--weight", exp_weight, "weight table kind")->required();
    sc_exp->add_option("--alpha", exp_alpha, "phase alpha")->required();
    sc_exp->add_option("--x", exp_x, "summation length X")->required();
    sc_exp->add_option("--phase", exp_phase, "linear|quadratic|poly");
    sc_exp->add_option("--fold", exp_fold, "convolve the weight with itself r times");
    sc_exp->add_option("--poly", exp_poly, "polynomial coefficients c0 c1 ... (low to high)");
    sc_exp->add_option("--sweep", exp_sweep,
                       "q=LO..HI: one row per convergent denominator of alpha");
    sc_exp->add_option("--out", exp_out, "CSV path (default stdout)");

    // ---- arcs -----------------------------------------------------------
    auto* sc_arcs = app.add_subcommand("arcs", "classify alpha against the dissection");
    double arcs_alpha = 0.0, arcs_x = 1e5, arcs_A = 4.0;
    sc_arcs->add_option("--alpha", arcs_alpha)->required();
    sc_arcs->add_option("--x", arcs_x)->required();
    sc_arcs->add_option("--a-param", arcs_A)->required();

    // ---- envelope -------------------------------------------------------
    auto* sc_env = app.add_subcommand("envelope", "evaluate a bound envelope");
    std::string env_id;
    double env_x = 1e6, env_q = 1.0, env_upsilon = 1.0, env_eta = 0.0;
    int env_r = 0, env_k = 0;
    sc_env->add_option("--theorem", env_id, "e.g. 1.2, 1.4-S2, 1.8")->required();
    sc_env->add_option("--x", env_x)->required();
    sc_env->add_option("--q", env_q)->required();
    sc_env->add_option("--upsilon", env_upsilon);
    sc_env->add_option("--r", env_r, "fold count for r-parametric bounds");
    sc_env->add_option("--eta", env_eta, "growth exponent for the abstract family");
    sc_env->add_option("--k", env_k, "degree for the polynomial-phase bounds");

    // ---- verify ---------------------------------------------------------
    auto* sc_verify = app.add_subcommand("verify", "empirical |S|/envelope ratios");
    std::string ver_id, ver_weight = "one_p", ver_out;
    double ver_x = 1e6;
    int ver_samples = 100, ver_fold = 1;
    std::uint64_t ver_seed = 7;
    sc_verify->add_option("--theorem", ver_id)->required();
    sc_verify->add_option("--weight", ver_weight)->required();
    sc_verify->add_option("--samples", ver_samples)->required();
    sc_verify->add_option("--x", ver_x)->required();
    sc_verify->add_option("--seed", ver_seed);
    sc_verify->add_option("--fold", ver_fold);
    sc_verify->add_option("--out", ver_out, "CSV path (default stdout)");

    // ---- explicit -------------------------------------------------------
    auto* sc_expl = app.add_subcommand("explicit", "Phi_1 vs Phi_2 sweep");
    double ex_xmin = 10, ex_xmax = 500, ex_step = 5;
    int ex_tcount = 25, ex_j = 1500, ex_n = 1500, ex_ntriv = 1;
    std::string ex_zeros = zeros_path_default(), ex_out;
    sc_expl->add_option("--xmin", ex_xmin);
    sc_expl->add_option("--xmax", ex_xmax);
    sc_expl->add_option("--step", ex_step);
    sc_expl->add_option("--zeros", ex_zeros, "zeros table path");
    sc_expl->add_option("--t-count", ex_tcount, "zero pairs in Phi_2");
    sc_expl->add_option("--j-terms", ex_j, "J truncation of Phi_1");
    sc_expl->add_option("--n-terms", ex_n, "N truncation of Phi_1");
    sc_expl->add_option("--n-trivial", ex_ntriv, "trivial-zero terms in Phi_2");
    sc_expl->add_option("--out", ex_out, "CSV path (default stdout)");

    // ---- partitions -----------------------------------------------------
    auto* sc_part = app.add_subcommand("partitions", "exact partition counts");
    std::string part_kind = "squarefree", part_out;
    std::uint64_t part_n = 1000;
    sc_part->add_option("--kind", part_kind, "squarefree|squares_of_squarefree");
    sc_part->add_option("--n", part_n, "count up to n")->required();
    sc_part->add_option("--out", part_out, "CSV path (default stdout)");

    // ---- saddle ---------------------------------------------------------
    auto* sc_saddle = app.add_subcommand("saddle", "solve x = rho Phi'(rho)");
    double saddle_x = 1e6;
    sc_saddle->add_option("--x", saddle_x)->required();

    // ---- arc-scan -------------------------------------------------------
    auto* sc_scan = app.add_subcommand("arc-scan", "|Phi| on a circle grid");
    double scan_x = 200.0, scan_A = 3.0;
    int scan_grid = 20000;
    std::string scan_out;
    sc_scan->add_option("--x-param", scan_x)->required();
    sc_scan->add_option("--a-param", scan_A)->required();
    sc_scan->add_option("--grid", scan_grid)->required();
    sc_scan->add_option("--out", scan_out, "CSV path (default stdout)");

    // ---- figures --------------------------------------------------------
    auto* sc_fig = app.add_subcommand("figures", "regenerate figure data");
    int fig_which = 1;
    std::uint64_t fig_limit = 500;
    double fig_xmin = 10, fig_xmax = 500, fig_step = 5;
    std::string fig_zeros = zeros_path_default(), fig_out;
    sc_fig->add_option("--which", fig_which, "1: mu_P sums; 2|3|4: Phi columns")
        ->required();
    sc_fig->add_option("--limit", fig_limit, "range for figure 1");
    sc_fig->add_option("--xmin", fig_xmin);
    sc_fig->add_option("--xmax", fig_xmax);
    sc_fig->add_option("--step", fig_step);
    sc_fig->add_option("--zeros", fig_zeros);
    sc_fig->add_option("--out", fig_out, "CSV path (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    esum::set_thread_cap(threads);

    try {
        if (*sc_sieve) {
            const auto kind = esum::fn_from_name(sieve_kind);
            const auto t = esum::sieve(kind, sieve_limit, sieve_k);
            Output out(sieve_out);
            out.stream() << "# config: sieve kind=" << sieve_kind
                         << (kind == esum::Fn::tau_k ? " k=" + std::to_string(sieve_k) : "")
                         << " limit=" << sieve_limit << "\n";
            out.stream() << "n,value\n";
            for (std::uint64_t n = 1; n <= t.limit; ++n) {
                if (t.real_valued)
                    out.stream() << n << "," << fmt(t.rval[n]) << "\n";
                else
                    out.stream() << n << "," << t.ival[n] << "\n";
            }
            out.commit();
            return 0;
        }

        if (*sc_exp) {
            const auto kind = esum::fn_from_name(exp_weight);
            const auto X = static_cast<std::uint64_t>(exp_x);
            auto table = esum::sieve(kind, X);
            if (exp_fold > 1) table = esum::r_fold(table, exp_fold);
            auto evaluate_at = [&](double alpha) {
                if (exp_phase == "linear")
                    return esum::exp_sum_linear(table, alpha, X);
                if (exp_phase == "quadratic")
                    return esum::exp_sum_quadratic(table, alpha, X);
                if (exp_phase == "poly") {
                    if (exp_poly.size() < 2)
                        throw std::runtime_error("--phase poly needs --poly c0 c1 ...");
                    return esum::exp_sum_poly(table, exp_poly, alpha, X);
                }
                throw std::runtime_error("unknown --phase " + exp_phase);
            };
            Output out(exp_out);
            std::ostringstream cfg;
            cfg << "# config: expsum weight=" << exp_weight << " fold=" << exp_fold
                << " phase=" << exp_phase << " alpha=" << fmt(exp_alpha)
                << " x=" << fmt(exp_x);
            if (!exp_sweep.empty()) cfg << " sweep=" << exp_sweep;
            out.stream() << cfg.str() << "\n";
            if (exp_sweep.empty()) {
                const auto r = evaluate_at(exp_alpha);
                out.stream() << "re,im,abs\n"
                             << fmt(r.value.real()) << "," << fmt(r.value.imag())
                             << "," << fmt(std::abs(r.value)) << "\n";
            } else {
                std::uint64_t q_lo = 0, q_hi = 0;
                if (std::sscanf(exp_sweep.c_str(), "q=%lu..%lu", &q_lo, &q_hi) != 2)
                    throw std::runtime_error("--sweep wants q=LO..HI");
                out.stream() << "q,a,upsilon,re,im,abs\n";
                // walk the convergent denominators of alpha in [q_lo, q_hi]
                std::int64_t prev_q = 0;
                for (std::int64_t cap = static_cast<std::int64_t>(q_lo);;) {
                    const auto ra = esum::best_approx(exp_alpha, cap);
                    if (ra.q > prev_q &&
                        ra.q >= static_cast<std::int64_t>(q_lo) &&
                        ra.q <= static_cast<std::int64_t>(q_hi)) {
                        const auto r = evaluate_at(static_cast<double>(ra.a) /
                                                   static_cast<double>(ra.q));
                        out.stream() << ra.q << "," << ra.a << "," << fmt(ra.upsilon)
                                     << "," << fmt(r.value.real()) << ","
                                     << fmt(r.value.imag()) << ","
                                     << fmt(std::abs(r.value)) << "\n";
                        prev_q = ra.q;
                    }
                    if (ra.q >= static_cast<std::int64_t>(q_hi) || ra.upsilon == 0.0)
                        break;
                    cap = std::max<std::int64_t>(cap + 1, ra.q + 1);
                }
            }
            out.commit();
            return 0;
        }

        if (*sc_arcs) {
            const esum::ArcDissection d(arcs_x, arcs_A);
            const auto c = esum::classify(arcs_alpha, d);
            json j{{"kind", esum::arc_kind_name(c.kind)},
                   {"a", c.a},
                   {"q", c.q},
                   {"delta_q", c.delta_q}};
            if (c.overlapping) j["overlapping"] = true;
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*sc_env) {
            esum::EnvelopeParams p;
            p.r = env_r;
            p.k = env_k;
            p.eta = esum::Rat(static_cast<std::int64_t>(env_eta * 100), 100);
            const auto env = esum::envelope_for(env_id, p);
            const auto v = esum::evaluate(env, env_x, env_q, env_upsilon);
            json j{{"theorem", env_id},
                   {"value", v.value},
                   {"dominant_term", v.dominant_term},
                   {"in_regime", v.in_regime},
                   {"validity", env.validity}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*sc_verify) {
            esum::EnvelopeParams p;
            const auto env = esum::envelope_for(ver_id, p);
            std::mt19937_64 rng(ver_seed);
            std::uniform_real_distribution<double> unif(-0.5, 0.5);
            std::vector<std::pair<double, double>> samples;
            samples.reserve(ver_samples);
            for (int i = 0; i < ver_samples; ++i)
                samples.push_back({unif(rng), ver_x});
            const auto stats = esum::empirical_ratio(
                {esum::fn_from_name(ver_weight), ver_fold}, env, samples);
            Output out(ver_out);
            out.stream() << "# config: verify theorem=" << ver_id
                         << " weight=" << ver_weight << " fold=" << ver_fold
                         << " samples=" << ver_samples << " x=" << fmt(ver_x)
                         << " seed=" << ver_seed << "\n";
            out.stream() << "alpha,X,a,q,upsilon,s_abs,envelope,ratio,dominant_term,"
                            "in_regime\n";
            for (const auto& s : stats.samples)
                out.stream() << fmt(s.alpha) << "," << fmt(s.X) << "," << s.a << ","
                             << s.q << "," << fmt(s.upsilon) << "," << fmt(s.s_abs)
                             << "," << fmt(s.env_value) << "," << fmt(s.ratio) << ","
                             << s.dominant_term << "," << (s.in_regime ? 1 : 0)
                             << "\n";
            out.stream() << "# max_ratio=" << fmt(stats.max_ratio)
                         << " mean_ratio=" << fmt(stats.mean_ratio)
                         << " median_ratio=" << fmt(stats.median_ratio) << "\n";
            out.commit();
            return 0;
        }

        if (*sc_expl || (*sc_fig && fig_which >= 2)) {
            const bool figures = !*sc_expl;
            const double xmin = figures ? fig_xmin : ex_xmin;
            const double xmax = figures ? fig_xmax : ex_xmax;
            const double step = figures ? fig_step : ex_step;
            const std::string zpath = figures ? fig_zeros : ex_zeros;
            const int tcount = figures ? 25 : ex_tcount;
            const int jterms = figures ? 1500 : ex_j;
            const int nterms = figures ? 1500 : ex_n;
            const int ntriv = figures ? 1 : ex_ntriv;
            const auto zeros = esum::load_zeros(zpath);
            const esum::ExplicitFormula ef(zeros, std::max(1, ntriv));
            const auto mu = esum::sieve(esum::Fn::mu_abs, nterms);
            Output out(figures ? fig_out : ex_out);
            out.stream() << "# config: " << (figures ? "figures which=" : "explicit which=")
                         << (figures ? std::to_string(fig_which) : std::string("-"))
                         << " xmin=" << fmt(xmin) << " xmax=" << fmt(xmax)
                         << " step=" << fmt(step) << " t_count=" << tcount
                         << " J=" << jterms << " N=" << nterms
                         << " n_trivial=" << ntriv << " zeros=" << zpath << "\n";
            out.stream()
                << "X,re_phi1,im_phi1,re_phi2,im_phi2,re_phi20,im_phi20\n";
            for (double X = xmin; X <= xmax + 1e-9; X += step) {
                const auto e = esum::explicit_eval(X, esum::theta_for_x(X), jterms,
                                                   nterms, tcount, ntriv, ef, mu);
                out.stream() << fmt(e.X) << "," << fmt(e.phi1.real()) << ","
                             << fmt(e.phi1.imag()) << "," << fmt(e.phi2.real())
                             << "," << fmt(e.phi2.imag()) << ","
                             << fmt(e.phi20.real()) << "," << fmt(e.phi20.imag())
                             << "\n";
            }
            out.commit();
            return 0;
        }

        if (*sc_fig) {  // --which 1
            const auto mp = esum::sieve(esum::Fn::mu_prime, fig_limit);
            Output out(fig_out);
            out.stream() << "# config: figures which=1 limit=" << fig_limit << "\n";
            out.stream() << "x,mu_p,partial_sum\n";
            std::int64_t acc = 0;
            for (std::uint64_t x = 1; x <= fig_limit; ++x) {
                acc += mp.ival[x];
                out.stream() << x << "," << mp.ival[x] << "," << acc << "\n";
            }
            out.commit();
            return 0;
        }

        if (*sc_part) {
            const auto kind = part_kind_from(part_kind);
            const auto series = esum::partition_counts(kind, part_n);
            Output out(part_out);
            out.stream() << "# config: partitions kind=" << part_kind
                         << " n=" << part_n << "\n";
            out.stream() << "n,count,log_count\n";
            for (std::uint64_t n = 0; n <= part_n; ++n) {
                const auto& c = series.counts[n];
                out.stream() << n << "," << c.get_str() << ","
                             << (n == 0 ? "0" : fmt(esum::log_count(c))) << "\n";
            }
            out.commit();
            return 0;
        }

        if (*sc_saddle) {
            const auto s = esum::solve_saddle(saddle_x);
            json j{{"x", s.x},          {"X_param", s.X_param}, {"rho", s.rho},
                   {"phi", s.phi},      {"phi1", s.phi1},       {"phi2", s.phi2},
                   {"sqrt_x", std::sqrt(s.x)}};
            std::cout << j.dump(2) << "\n";
            return 0;
        }

        if (*sc_scan) {
            const auto rep = esum::arc_diagnostics(scan_x, scan_A, scan_grid);
            Output out(scan_out);
            out.stream() << "# config: arc-scan x_param=" << fmt(scan_x)
                         << " a_param=" << fmt(scan_A) << " grid=" << scan_grid
                         << "\n";
            out.stream() << "alpha,abs_phi,kind,a,q\n";
            const esum::ArcDissection d(scan_x, scan_A);
            for (int i = 0; i < scan_grid; ++i) {
                const double alpha = -0.5 + static_cast<double>(i) / scan_grid;
                const auto c = esum::classify(alpha, d);
                const auto v = std::abs(esum::phi_on_circle(alpha, scan_x, 1e-10));
                out.stream() << fmt(alpha) << "," << fmt(v) << ","
                             << esum::arc_kind_name(c.kind) << "," << c.a << ","
                             << c.q << "\n";
            }
            out.commit();
            json j{{"phi_rho", rep.phi_rho},
                   {"n_principal", rep.n_principal},
                   {"n_major", rep.n_major},
                   {"n_minor", rep.n_minor},
                   {"n_overlap", rep.n_overlap},
                   {"principal_max", rep.principal_max.abs_phi},
                   {"major_max", rep.major_max.abs_phi},
                   {"minor_max", rep.minor_max.abs_phi},
                   {"three_quarter_threshold", rep.three_quarter_threshold},
                   {"minor_lemma_threshold", rep.minor_lemma_threshold}};
            std::cerr << j.dump(2) << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
