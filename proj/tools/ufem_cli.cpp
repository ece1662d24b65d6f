#include "report.hpp"

#include "ufem/analysis.hpp"
#include "ufem/lemma_oracle.hpp"
#include "ufem/quadrature.hpp"

#include <CLI11.hpp>
#include <Eigen/Core>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <thread>

namespace fs = std::filesystem;
using namespace ufem;

namespace {

constexpr const char* kVersion = "1.0.0";

struct Settings {
    std::string scheme = "hosgfem";
    std::string schemes = "fem,gfem,cgfem,sgfem,hosgfem";
    std::string p = "3";
    std::string N = "5,10,20,40";
    std::string geom = "line";
    std::string kappa;
    std::string delta_i = "1..15";
    double lpca_xi = 1e-15;
    std::string orthogonalize = "auto";
    std::string distance = "onesided";
    std::string out = ".";
    int bump = 0;
    bool dump_matrix = false;
    bool timing = false;
    int jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::string config;
};

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Scheme make_scheme(const Settings& s, SchemeKind kind)
{
    Scheme sc;
    sc.kind = kind;
    sc.lpca_xi = s.lpca_xi;
    if (s.orthogonalize == "auto") sc.orthogonalize = Orthogonalize::Auto;
    else if (s.orthogonalize == "on") sc.orthogonalize = Orthogonalize::On;
    else if (s.orthogonalize == "off") sc.orthogonalize = Orthogonalize::Off;
    else throw UsageError("--orthogonalize must be auto, on or off");
    if (s.distance == "onesided") sc.distance = DistanceFlavor::OneSided;
    else if (s.distance == "twosided") sc.distance = DistanceFlavor::TwoSided;
    else throw UsageError("--distance must be onesided or twosided");
    return sc;
}

SchemeKind scheme_kind(const std::string& name)
{
    try {
        return parse_scheme(name);
    } catch (const std::invalid_argument&) {
        throw UsageError("unknown scheme '" + name + "' (fem, gfem, cgfem, sgfem, hosgfem)");
    }
}

ManufacturedProblem make_problem(const Settings& s)
{
    double k0 = 1.0, k1 = s.geom == "circle" ? 20.0 : 10.0;
    if (!s.kappa.empty()) std::tie(k0, k1) = report::parse_pair(s.kappa);
    if (s.geom == "line") return line_problem(k0, k1);
    if (s.geom == "circle") return circle_problem(k0, k1);
    if (s.geom == "hline") {
        auto prob = robustness_config(robustness_delta(report::parse_range(s.delta_i).first));
        prob.kappa0 = k0;
        prob.kappa1 = k1;
        return prob;
    }
    throw UsageError("unknown geometry '" + s.geom + "' (line, circle, hline)");
}

RunOptions base_options(const Settings& s, SchemeKind kind)
{
    RunOptions opt;
    opt.scheme = make_scheme(s, kind);
    opt.quad.bump = s.bump;
    return opt;
}

std::string stem_for(const std::string& what, const std::string& scheme, const std::string& geom)
{
    return what + "_" + scheme + "_" + geom;
}

void finish_records(std::vector<ExperimentRecord>& recs, const Settings& s)
{
    sort_records(recs);
    if (!s.timing) {
        for (auto& r : recs) r.seconds = 0.0;
    }
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << text;
}

void write_records(const fs::path& path, const std::vector<ExperimentRecord>& recs)
{
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    write_csv(os, recs);
}

nlohmann::json metadata(const Settings& s, const std::string& command)
{
    const SCNOptions scn;
    const SolveOptions solve;
    nlohmann::json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["compiler"] = __VERSION__;
    j["eigen"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                 std::to_string(EIGEN_MINOR_VERSION);
    j["settings"] = {{"scheme", s.scheme}, {"schemes", s.schemes}, {"p", s.p}, {"N", s.N}, {"geom", s.geom},
                     {"kappa", s.kappa}, {"delta_i", s.delta_i}, {"lpca_xi", s.lpca_xi},
                     {"orthogonalize", s.orthogonalize}, {"distance", s.distance},
                     {"quad_order_bump", s.bump}, {"jobs", s.jobs}};
    j["scn"] = {{"nullspace_cutoff", scn.cutoff}, {"dense_limit", scn.dense_limit},
                {"dense_fallback_limit", scn.dense_fallback_limit}, {"max_iterations", scn.max_iterations},
                {"tolerance", scn.tolerance}, {"seed", scn.seed}};
    j["solver"] = {{"shift", solve.shift}, {"max_sweeps", solve.max_sweeps}};
    j["quadrature"] = {{"uncut_cell_points_per_direction", "p + 2 + bump"},
                       {"enriched_points_per_direction", "2p + 3 + bump"},
                       {"error_points_per_direction", "p + 4 + bump, enriched 2p + 5 + bump"},
                       {"gram_schmidt_points_per_direction", "2p + 9"},
                       {"bump", s.bump}};
    j["seconds_recorded"] = s.timing;
    return j;
}

void write_metadata(const fs::path& path, const nlohmann::json& j) { write_text(path, j.dump(2) + "\n"); }

int cmd_converge(const Settings& s, bool scn_mode)
{
    const auto prob = make_problem(s);
    if (!scn_mode && !prob.has_exact) throw UsageError("converge needs a manufactured solution (line or circle)");
    const SchemeKind kind = scheme_kind(s.scheme);
    const auto ps = report::parse_int_list(s.p);
    const auto Ns = report::parse_int_list(s.N);
    const fs::path out(s.out);
    fs::create_directories(out);

    const std::string what = scn_mode ? "scn" : "converge";
    std::vector<ExperimentRecord> all;
    std::vector<report::Series> series;
    nlohmann::json meta = metadata(s, what);
    for (int p : ps) {
        RunOptions opt = base_options(s, kind);
        opt.solve = !scn_mode;
        opt.compute_scn = scn_mode;
        ConvergenceResult res;
        if (s.dump_matrix) {
            // one run per N so that each matrix lands in its own file
            std::vector<int> n_ok;
            std::vector<double> v;
            for (int N : Ns) {
                opt.dump_matrix_path =
                    (out / ("K_" + s.scheme + "_p" + std::to_string(p) + "_N" + std::to_string(N) + ".txt")).string();
                res.records.push_back(run_case(prob, p, N, opt).record);
                const auto& r = res.records.back();
                const double y = scn_mode ? r.scn : r.energy_error;
                if (r.ok && std::isfinite(y) && y > 0) {
                    n_ok.push_back(N);
                    v.push_back(y);
                }
            }
            if (n_ok.size() >= 2) {
                if (scn_mode) res.scn_slope = -convergence_slope(n_ok, v);
                else res.slope = convergence_slope(n_ok, v);
            }
        } else {
            res = convergence_study(prob, p, Ns, opt, s.jobs);
        }
        report::Series ser{s.scheme + " p=" + std::to_string(p), {}, {}};
        for (const auto& r : res.records) {
            ser.x.push_back(r.N);
            ser.y.push_back(scn_mode ? r.scn : r.energy_error);
            if (!r.ok || !r.message.empty()) {
                std::cerr << "warning: p=" << p << " N=" << r.N << ": " << r.message << "\n";
            }
        }
        series.push_back(ser);
        const double slope = scn_mode ? res.scn_slope : res.slope;
        std::printf("%s %s p=%d geom=%s slope=%s\n", what.c_str(), s.scheme.c_str(), p, s.geom.c_str(),
                    format_double(slope).c_str());
        meta["slopes"][std::to_string(p)] = std::isfinite(slope) ? nlohmann::json(slope) : nlohmann::json();
        all.insert(all.end(), res.records.begin(), res.records.end());
    }
    finish_records(all, s);
    const std::string stem = stem_for(what, s.scheme, s.geom);
    write_records(out / (stem + ".csv"), all);
    write_text(out / (stem + ".svg"),
               report::loglog_svg(scn_mode ? "Scaled condition number" : "Energy-norm error", "N",
                                  scn_mode ? "SCN" : "energy error", series));
    write_metadata(out / (stem + ".json"), meta);
    return 0;
}

int cmd_robustness(const Settings& s)
{
    std::vector<SchemeKind> kinds;
    for (const auto& name : report::split_list(s.schemes)) kinds.push_back(scheme_kind(name));
    if (kinds.empty()) throw UsageError("--schemes is empty");
    const auto ps = report::parse_int_list(s.p);
    const auto Ns = report::parse_int_list(s.N);
    if (ps.size() != 1 || Ns.size() != 1) throw UsageError("robustness takes a single --p and a single --N");
    const auto [lo, hi] = report::parse_range(s.delta_i);
    if (lo < 1) throw UsageError("--delta-i must start at 1 or above");
    const fs::path out(s.out);
    fs::create_directories(out);

    auto recs = robustness_sweep(kinds, ps[0], Ns[0], lo, hi, base_options(s, kinds[0]), s.jobs);
    std::map<std::string, report::Series> by_scheme;
    for (const auto& r : recs) {
        auto& ser = by_scheme[r.scheme];
        ser.name = r.scheme;
        ser.x.push_back(r.delta);
        ser.y.push_back(r.scn);
        if (!r.ok || !r.message.empty()) std::cerr << "warning: " << r.scheme << " delta=" << r.delta << ": " << r.message << "\n";
    }
    finish_records(recs, s);
    std::vector<report::Series> series;
    for (auto k : kinds) series.push_back(by_scheme[scheme_name(k)]);

    const std::string stem = "robustness_p" + std::to_string(ps[0]) + "_N" + std::to_string(Ns[0]);
    write_records(out / (stem + ".csv"), recs);
    write_text(out / (stem + ".svg"), report::loglog_svg("SCN against interface offset", "delta", "SCN", series));
    write_metadata(out / (stem + ".json"), metadata(s, "robustness"));
    std::printf("robustness p=%d N=%d: %zu rows\n", ps[0], Ns[0], recs.size());
    return 0;
}

struct Check {
    std::string name;
    double value;
    double limit;
    bool pass;
};

void print_check(const Check& c)
{
    std::printf("[%s] %-48s value=%.3e limit=%.3e\n", c.pass ? "PASS" : "FAIL", c.name.c_str(), c.value, c.limit);
}

int cmd_verify_lemma(const Settings& s)
{
    const auto ps = report::parse_int_list(s.p);
    int p_max = 0;
    for (int p : ps) p_max = std::max(p_max, p);
    if (p_max < 1) throw UsageError("--p must be positive");
    if (s.geom != "line" && s.geom != "circle" && s.geom != "all") throw UsageError("--geom must be line, circle or all");
    const std::string want = s.geom == "line" ? "flat" : s.geom;

    const fs::path out(s.out);
    fs::create_directories(out);
    std::ofstream csv(out / "lemma1.csv");
    if (!csv) throw std::runtime_error("cannot write lemma1.csv");
    csv << "case,p,residual,tolerance,pass\n";
    bool ok = true;
    std::printf("%-8s %3s %12s %12s\n", "case", "p", "residual", "tolerance");
    for (const auto& row : lemma::verify_lemma(p_max)) {
        if (want != "all" && row.name != want) continue;
        std::printf("%-8s %3d %12.3e %12.3e %s\n", row.name.c_str(), row.p, row.residual, row.tolerance,
                    row.pass() ? "ok" : "FAIL");
        csv << row.name << ',' << row.p << ',' << format_double(row.residual) << ','
            << format_double(row.tolerance) << ',' << (row.pass() ? 1 : 0) << '\n';
        ok = ok && row.pass();
    }
    write_metadata(out / "lemma1.json", metadata(s, "verify-lemma1"));
    return ok ? 0 : 2;
}

int cmd_selftest(const Settings& s)
{
    std::vector<Check> checks;
    auto add = [&](std::string name, double value, double limit, bool pass) {
        checks.push_back({std::move(name), value, limit, pass});
        print_check(checks.back());
    };

    {
        double worst = 0.0;
        const auto prob = patch_problem();
        for (auto kind : {SchemeKind::FEM, SchemeKind::GFEM, SchemeKind::CGFEM, SchemeKind::SGFEM, SchemeKind::HoSGFEM}) {
            for (int p = 1; p <= 3; ++p) {
                const auto r = run_case(prob, p, 5, base_options(s, kind)).record;
                worst = std::max(worst, r.ok ? r.energy_error : std::numeric_limits<double>::infinity());
            }
        }
        add("patch test, all schemes, p=1..3, N=5", worst, 1e-8, worst <= 1e-8);
    }
    {
        double pu = 0.0, area = 0.0, length = 0.0;
        const double exact_length = 2.0 * std::acos(-1.0) / std::sqrt(10.0);
        for (const auto& geom : {InterfaceGeometry::standard_line(), InterfaceGeometry::standard_circle()}) {
            for (int N : {5, 10}) {
                for (int p = 1; p <= 5; ++p) {
                    const QuadMesh mesh(N, p);
                    const auto cls = classify_cells(mesh, geom);
                    pu = std::max(pu, pu_defect(mesh, cls, geom, build_pu(mesh, cls, p)));
                    double a = 0.0, l = 0.0;
                    for (int c = 0; c < mesh.num_cells(); ++c) {
                        for (const auto& rule : cell_rule(mesh, cls, geom, c, p)) a += rule.measure();
                        if (cls.is_cut[static_cast<std::size_t>(c)]) {
                            l += interface_rule(geom, *cls.topology[static_cast<std::size_t>(c)], p + 3).measure();
                        }
                    }
                    area = std::max(area, std::abs(a - 1.0));
                    if (geom.is_circle()) length = std::max(length, std::abs(l - exact_length));
                }
            }
        }
        add("partition of unity on cut cells", pu, 1e-12, pu <= 1e-12);
        add("total cell area", area, 1e-12, area <= 1e-12);
        add("circle interface length", length, 1e-10, length <= 1e-10);
    }
    {
        double flat = 0.0, circ = 0.0;
        for (const auto& row : lemma::verify_lemma(4)) {
            double& worst = row.name == "flat" ? flat : circ;
            worst = std::max(worst, row.residual);
        }
        add("interface factorization, flat", flat, 1e-8, flat <= 1e-8);
        add("interface factorization, circle", circ, 1e-4, circ <= 1e-4);
    }
    {
        const auto prob = line_problem(1.0, 10.0);
        const auto fem = convergence_study(prob, 1, {10, 20, 40}, base_options(s, SchemeKind::FEM), s.jobs);
        add("FEM p=1 line slope in [0.3, 0.8]", fem.slope, 0.8, fem.slope >= 0.3 && fem.slope <= 0.8);
        const auto ho = convergence_study(prob, 2, {10, 20, 40}, base_options(s, SchemeKind::HoSGFEM), s.jobs);
        add("HoSGFEM p=2 line slope within 0.35 of 2", ho.slope, 2.35, std::abs(ho.slope - 2.0) <= 0.35);
    }

    const fs::path out(s.out);
    fs::create_directories(out);
    std::ofstream csv(out / "selftest.csv");
    csv << "check,value,limit,pass\n";
    bool ok = true;
    for (const auto& c : checks) {
        csv << '"' << c.name << "\"," << format_double(c.value) << ',' << format_double(c.limit) << ','
            << (c.pass ? 1 : 0) << '\n';
        ok = ok && c.pass;
    }
    write_metadata(out / "selftest.json", metadata(s, "selftest"));
    std::printf("selftest: %s\n", ok ? "all checks passed" : "threshold violation");
    return ok ? 0 : 2;
}

void add_common(CLI::App* sub, Settings& s)
{
    sub->add_option("--scheme", s.scheme, "fem, gfem, cgfem, sgfem or hosgfem");
    sub->add_option("--schemes", s.schemes, "comma list of schemes");
    sub->add_option("--p", s.p, "polynomial degree(s), comma list");
    sub->add_option("--N", s.N, "cells per direction, comma list");
    sub->add_option("--geom", s.geom, "line, circle or hline");
    sub->add_option("--kappa", s.kappa, "k0,k1");
    sub->add_option("--delta-i,--i", s.delta_i, "offset index range a..b, delta_i = 0.03 * 2^-i");
    sub->add_option("--lpca-xi", s.lpca_xi, "LPCA threshold for sgfem");
    sub->add_option("--orthogonalize", s.orthogonalize, "auto, on or off");
    sub->add_option("--distance", s.distance, "onesided or twosided");
    sub->add_option("--out", s.out, "output directory");
    sub->add_option("--quad-order-bump", s.bump, "extra Gauss points per direction");
    sub->add_flag("--dump-matrix", s.dump_matrix, "write the scaled stiffness matrix of every run");
    sub->add_flag("--timing", s.timing, "record wall time in the seconds column");
    sub->add_option("--jobs", s.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--config", s.config, "JSON file of flag values; flags on the command line win");
}

/// Removes `--config X` / `--config=X` and returns X.
std::string take_config(std::vector<std::string>& args)
{
    for (std::size_t k = 0; k < args.size(); ++k) {
        if (args[k] == "--config" && k + 1 < args.size()) {
            std::string path = args[k + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k), args.begin() + static_cast<std::ptrdiff_t>(k) + 2);
            return path;
        }
        if (args[k].rfind("--config=", 0) == 0) {
            std::string path = args[k].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(k));
            return path;
        }
    }
    return {};
}

}  // namespace

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    CLI::App app{"Unfitted generalized FEM experiments"};
    app.require_subcommand(1);
    Settings s;
    auto* converge = app.add_subcommand("converge", "energy-error convergence study");
    auto* robustness = app.add_subcommand("robustness", "SCN against interface offset");
    auto* scn = app.add_subcommand("scn", "SCN against mesh size");
    auto* lemma = app.add_subcommand("verify-lemma1", "check the interface factorization recursion");
    auto* selftest = app.add_subcommand("selftest", "quick threshold checks");
    for (auto* sub : {converge, robustness, scn, lemma, selftest}) add_common(sub, s);

    try {
        const std::string config_path = take_config(args);
        if (!config_path.empty()) {
            std::ifstream is(config_path);
            if (!is) throw std::runtime_error("cannot read config " + config_path);
            args = report::merge_config(args, nlohmann::json::parse(is));
        }
        std::vector<std::string> rev(args.rbegin(), args.rend() - 1);
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*converge) return cmd_converge(s, false);
        if (*scn) return cmd_converge(s, true);
        if (*robustness) return cmd_robustness(s);
        if (*lemma) return cmd_verify_lemma(s);
        if (*selftest) return cmd_selftest(s);
    } catch (const UsageError& e) {
        const auto subs = app.get_subcommands();
        std::cerr << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
