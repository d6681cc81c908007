#include <CLI11.hpp>
#include <Eigen/Core>
#include <filesystem>
#include <iostream>

#include "ctk/census.hpp"
#include "ctk/config.hpp"
#include "ctk/dynamics.hpp"
#include "ctk/expr.hpp"
#include "ctk/io.hpp"
#include "ctk/levelset.hpp"
#include "ctk/seba.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 1;
    long seed = -1; // -1: use config / default
};

void add_common(CLI::App* cmd, CommonArgs& a) {
    cmd->add_option("--config", a.config_path, "key = value config file")->required();
    cmd->add_option("--out", a.out_dir, "output directory (created if absent)");
    cmd->add_option("--threads", a.threads, "worker thread count");
    cmd->add_option("--seed", a.seed, "RNG seed override");
}

// One config file may serve several subcommands (solve/sweep/pack share a
// manifold block), so validation is against the full documented schema: any
// key outside it is rejected, keys for sibling commands are tolerated.
void check_schema(const ctk::Config& cfg) {
    static const char* keys[] = {
        "manifold", "nx",   "ny",    "lx",        "ly",        "phi",
        "bc",       "k",    "l",     "domain",    "levels",    "selection",
        "a",        "flow", "b",     "t_max",     "eigen_count",
        "seed",     "eigen_tol",     "eigen_max_iter",         "eigen_shift",
        "seba_max_iter",    "census_manifold",    "k_max",     "p",
        "q"};
    for (const char* k : keys) cfg.has(k);
    cfg.check_consumed();
}

std::string outpath(const CommonArgs& a, const std::string& name) {
    fs::create_directories(a.out_dir);
    return (fs::path(a.out_dir) / name).string();
}

ctk::WeightedGrid grid_from_config(const ctk::Config& cfg) {
    ctk::GridKind kind = ctk::grid_kind_from_string(cfg.get_string("manifold"));
    std::vector<int> res{cfg.get_int("nx")};
    std::vector<double> ext{cfg.get_double("lx")};
    if (kind != ctk::GridKind::Interval) {
        res.push_back(cfg.get_int("ny"));
        ext.push_back(cfg.get_double("ly"));
    }
    return ctk::build_grid(kind, res, ext, cfg.get_string("phi", ""));
}

ctk::BC bc_from_config(const ctk::Config& cfg) {
    return ctk::bc_from_string(cfg.get_string("bc", "neumann"));
}

ctk::EigOptions eig_options(const ctk::Config& cfg, const CommonArgs& a) {
    ctk::EigOptions o;
    o.tol = cfg.get_double("eigen_tol", o.tol);
    o.max_iter = cfg.get_int("eigen_max_iter", o.max_iter);
    o.shift = cfg.get_double("eigen_shift", o.shift);
    o.seed = static_cast<unsigned>(cfg.get_int("seed", 0));
    if (a.seed >= 0) o.seed = static_cast<unsigned>(a.seed);
    return o;
}

void write_basis_csv(const CommonArgs& a, const std::string& name,
                     const ctk::WeightedGrid& wg, const ctk::SpectralBasis& basis) {
    std::vector<std::string> hdr{"k", "lambda", "residual"};
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < basis.eigenvalues.size(); ++i)
        rows.push_back({static_cast<double>(i + 1), basis.eigenvalues[i], basis.residuals[i]});
    ctk::write_csv(outpath(a, name + ".csv"), hdr, rows);

    std::vector<std::string> vh{"vertex", "x", "y"};
    for (size_t i = 0; i < basis.eigenvalues.size(); ++i)
        vh.push_back("u" + std::to_string(i + 1));
    std::vector<std::vector<double>> vrows;
    const ctk::Grid& g = wg.grid;
    for (int v = 0; v < g.nvert(); ++v) {
        std::vector<double> row{static_cast<double>(v), g.xcoord(v % g.nx),
                                g.dim == 2 ? g.ycoord(v / g.nx) : 0.0};
        for (Eigen::Index j = 0; j < basis.eigenvectors.cols(); ++j)
            row.push_back(basis.eigenvectors(v, j));
        vrows.push_back(std::move(row));
    }
    ctk::write_csv(outpath(a, name + "_vectors.csv"), vh, vrows);
}

json sweep_json(const ctk::SweepResult& sw) {
    return json{{"lambda", sw.lambda},
                {"s_max", sw.s_max},
                {"norm_u2", sw.norm_u2},
                {"mu_G", sw.mu_G},
                {"hbar", sw.hbar},
                {"inf_ratio", sw.inf_ratio},
                {"smeasure_estimate", sw.smeasure_estimate},
                {"smeasure_lower_bound", sw.smeasure_lower_bound},
                {"degenerate_bound", sw.degenerate_bound},
                {"s_admissible_end", sw.s_admissible_end}};
}

void write_sweep_csv(const CommonArgs& a, const std::string& name,
                     const ctk::SweepResult& sw) {
    std::vector<std::string> hdr{"s", "volume", "perimeter", "ratio", "admissible",
                                 "touches_boundary"};
    std::vector<std::vector<double>> rows;
    for (const auto& r : sw.records)
        rows.push_back({r.s, r.volume, r.perimeter, r.ratio, r.admissible ? 1.0 : 0.0,
                        r.touches_boundary ? 1.0 : 0.0});
    ctk::write_csv(outpath(a, name), hdr, rows);
}

json packing_json(const ctk::Packing& p) {
    json sets = json::array();
    for (const auto& s : p.sets)
        sets.push_back({{"domain_index", s.domain_index},
                        {"s", s.s},
                        {"ratio", s.ratio},
                        {"volume", s.volume},
                        {"perimeter", s.perimeter}});
    return json{{"k", p.k},
                {"r_k", p.r_k},
                {"witness", p.witness},
                {"lambda_k", p.lambda_k},
                {"max_ratio", p.max_ratio},
                {"certificate", "lambda_k <= -max_ratio^2/4"},
                {"certificate_lhs", p.lambda_k},
                {"certificate_rhs", -0.25 * p.max_ratio * p.max_ratio},
                {"certificate_ok", p.certificate_ok},
                {"sets", sets}};
}

void write_segments_csv(const CommonArgs& a, const std::string& name,
                        const std::vector<ctk::PackedRegion>& sets) {
    std::vector<std::string> hdr{"set", "x0", "y0", "x1", "y1"};
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < sets.size(); ++i)
        for (const auto& seg : sets[i].boundary_segments)
            rows.push_back({static_cast<double>(i), seg[0], seg[1], seg[2], seg[3]});
    ctk::write_csv(outpath(a, name), hdr, rows);
}

// ---------------------------------------------------------------- commands

int cmd_solve(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    ctk::WeightedGrid wg = grid_from_config(cfg);
    ctk::BC bc = bc_from_config(cfg);
    int count = cfg.get_int("eigen_count", 6);
    ctk::EigOptions opts = eig_options(cfg, a);
    check_schema(cfg);

    ctk::DiscreteOperator op = ctk::assemble(wg.grid, wg.metric, wg.weight, bc);
    ctk::SpectralBasis basis = ctk::smallest_eigenpairs(op, count, opts);
    write_basis_csv(a, "eigenvalues", wg, basis);
    json j{{"command", "solve"},
           {"manifold", ctk::to_string(ctk::grid_kind_from_string(cfg.get_string("manifold")))},
           {"bc", ctk::to_string(bc)},
           {"count", count},
           {"eigenvalues", basis.eigenvalues},
           {"residuals", basis.residuals}};
    ctk::write_json(outpath(a, "summary.json"), j);
    return 0;
}

int cmd_sweep(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    ctk::WeightedGrid wg = grid_from_config(cfg);
    ctk::BC bc = bc_from_config(cfg);
    int k = cfg.get_int("k", 2);
    int domain = cfg.get_int("domain", 0);
    int levels = cfg.get_int("levels", 256);
    ctk::EigOptions opts = eig_options(cfg, a);
    check_schema(cfg);

    ctk::DiscreteOperator op = ctk::assemble(wg.grid, wg.metric, wg.weight, bc);
    ctk::SpectralBasis basis = ctk::smallest_eigenpairs(op, k, opts);
    Eigen::VectorXd u = basis.eigenvectors.col(k - 1);
    ctk::NodalDecomposition dec = ctk::nodal_domains(wg.grid, u);
    if (domain < 0 || domain >= static_cast<int>(dec.domains.size()))
        throw ctk::ConfigError("domain index out of range (eigenfunction has " +
                               std::to_string(dec.domains.size()) + " nodal domains)");
    ctk::SweepResult sw = ctk::superlevel_sweep(wg.grid, wg.metric, wg.weight, u,
                                                dec.domains[domain],
                                                basis.eigenvalues[k - 1], bc, levels);
    write_sweep_csv(a, "sweep.csv", sw);
    json j = sweep_json(sw);
    j["command"] = "sweep";
    j["k"] = k;
    j["domain"] = domain;
    j["nodal_domains"] = dec.domains.size();
    ctk::write_json(outpath(a, "sweep.json"), j);
    return 0;
}

int cmd_pack(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    ctk::WeightedGrid wg = grid_from_config(cfg);
    ctk::BC bc = bc_from_config(cfg);
    int k = cfg.get_int("k", 2);
    int levels = cfg.get_int("levels", 256);
    std::string sel = cfg.get_string("selection", "min_ratio");
    ctk::EigOptions opts = eig_options(cfg, a);
    check_schema(cfg);
    ctk::LevelSelection selection;
    if (sel == "min_ratio") selection = ctk::LevelSelection::MinRatio;
    else if (sel == "midpoint") selection = ctk::LevelSelection::Midpoint;
    else throw ctk::ConfigError("selection must be min_ratio or midpoint");

    ctk::DiscreteOperator op = ctk::assemble(wg.grid, wg.metric, wg.weight, bc);
    ctk::SpectralBasis basis = ctk::smallest_eigenpairs(op, k, opts);
    ctk::Packing p = ctk::build_packing(wg.grid, wg.metric, wg.weight, basis, k, bc,
                                        selection, levels);
    std::vector<std::string> hdr{"set", "domain_index", "s", "volume", "perimeter", "ratio"};
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < p.sets.size(); ++i)
        rows.push_back({static_cast<double>(i), static_cast<double>(p.sets[i].domain_index),
                        p.sets[i].s, p.sets[i].volume, p.sets[i].perimeter, p.sets[i].ratio});
    ctk::write_csv(outpath(a, "packing_sets.csv"), hdr, rows);
    write_segments_csv(a, "packing_boundary.csv", p.sets);
    json j = packing_json(p);
    j["command"] = "pack";
    ctk::write_json(outpath(a, "packing.json"), j);
    return 0;
}

int cmd_seba(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    ctk::WeightedGrid wg = grid_from_config(cfg);
    ctk::BC bc = bc_from_config(cfg);
    int k = cfg.get_int("k", 3);
    int l = cfg.get_int("l", k);
    int levels = cfg.get_int("levels", 256);
    int max_iter = cfg.get_int("seba_max_iter", 5000);
    double a_thresh = cfg.get_double("a", -1.0);
    ctk::EigOptions opts = eig_options(cfg, a);
    check_schema(cfg);

    ctk::DiscreteOperator op = ctk::assemble(wg.grid, wg.metric, wg.weight, bc);
    ctk::SpectralBasis basis = ctk::smallest_eigenpairs(op, k, opts);
    ctk::SebaRotation rot = ctk::seba_rotate(wg.grid, basis.eigenvectors.leftCols(k), l,
                                             max_iter);
    if (a_thresh < 0) {
        Eigen::MatrixXd combos =
            ctk::sup_normalized(basis.eigenvectors.leftCols(k)) * rot.alpha.transpose();
        a_thresh = ctk::min_disjoint_threshold(combos);
    }
    ctk::SebaCertificate cert =
        ctk::seba_certify(wg.grid, wg.metric, wg.weight, basis, rot.alpha, a_thresh, bc, levels);

    std::vector<std::vector<double>> alpha_rows;
    for (Eigen::Index i = 0; i < cert.alpha.rows(); ++i) {
        std::vector<double> row;
        for (Eigen::Index j = 0; j < cert.alpha.cols(); ++j) row.push_back(cert.alpha(i, j));
        alpha_rows.push_back(std::move(row));
    }
    json j{{"command", "seba"},
           {"k", k},
           {"l", l},
           {"a", cert.a},
           {"iterations", rot.iterations},
           {"converged", rot.converged},
           {"alpha", alpha_rows},
           {"retention", cert.retention},
           {"rayleigh", cert.rayleigh},
           {"level_end", cert.level_end},
           {"ratio_bound", cert.ratio_bound},
           {"norm_ratio_bound", cert.norm_ratio_bound},
           {"bound_ok", cert.bound_ok},
           {"packing", packing_json(cert.packing)},
           {"eigenvalues", basis.eigenvalues}};
    ctk::write_json(outpath(a, "seba.json"), j);

    std::vector<std::string> hdr{"vertex", "x"};
    if (wg.grid.dim == 2) hdr.push_back("y");
    for (int i = 0; i < l; ++i) hdr.push_back("f" + std::to_string(i + 1));
    for (int i = 0; i < l; ++i) hdr.push_back("tau_f" + std::to_string(i + 1));
    std::vector<std::vector<double>> rows;
    for (int v = 0; v < wg.grid.nvert(); ++v) {
        std::vector<double> row{static_cast<double>(v), wg.grid.xcoord(v % wg.grid.nx)};
        if (wg.grid.dim == 2) row.push_back(wg.grid.ycoord(v / wg.grid.nx));
        for (int i = 0; i < l; ++i) row.push_back(cert.combinations(v, i));
        for (int i = 0; i < l; ++i) row.push_back(cert.sparse_functions(v, i));
        rows.push_back(std::move(row));
    }
    ctk::write_csv(outpath(a, "seba_functions.csv"), hdr, rows);
    return 0;
}

int cmd_dynamic(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    ctk::WeightedGrid wg = grid_from_config(cfg);
    ctk::BC bc = bc_from_config(cfg);
    if (wg.grid.dim != 2) throw ctk::ConfigError("dynamic mode requires a 2-D manifold");
    std::string flow_name = cfg.get_string("flow", "shear");
    double b = cfg.get_double("b", 0.0);
    int t_max = cfg.get_int("t_max", 2);
    int k = cfg.get_int("k", 2);
    int domain = cfg.get_int("domain", 0);
    int levels = cfg.get_int("levels", 256);
    ctk::EigOptions opts = eig_options(cfg, a);
    check_schema(cfg);
    if (flow_name != "shear" && flow_name != "identity")
        throw ctk::ConfigError("flow must be shear or identity");
    ctk::FlowMap flow =
        flow_name == "identity" ? ctk::identity_flow(t_max) : ctk::shear_flow(b, t_max);

    ctk::DiscreteOperator op = ctk::assemble_dynamic(wg.grid, wg.metric, wg.weight, flow, bc);
    ctk::SpectralBasis basis = ctk::smallest_eigenpairs(op, k, opts);
    write_basis_csv(a, "dynamic_eigenvalues", wg, basis);

    Eigen::VectorXd u = basis.eigenvectors.col(k - 1);
    ctk::NodalDecomposition dec = ctk::nodal_domains(wg.grid, u);
    if (domain < 0 || domain >= static_cast<int>(dec.domains.size()))
        throw ctk::ConfigError("domain index out of range (eigenfunction has " +
                               std::to_string(dec.domains.size()) + " nodal domains)");
    ctk::SweepResult sw = ctk::dynamic_sweep(wg.grid, wg.metric, wg.weight, flow, u,
                                             dec.domains[domain],
                                             basis.eigenvalues[k - 1], bc, levels);
    write_sweep_csv(a, "dynamic_sweep.csv", sw);

    json j = sweep_json(sw);
    j["command"] = "dynamic";
    j["flow"] = flow_name;
    j["b"] = b;
    j["t_max"] = t_max;
    j["k"] = k;
    j["domain"] = domain;
    j["eigenvalues"] = basis.eigenvalues;

    // independent upper-bound check on the best admissible level, if any
    double best_s = -1, best_ratio = 0;
    for (const auto& r : sw.records)
        if (r.admissible && (best_s < 0 || r.ratio < best_ratio)) {
            best_s = r.s;
            best_ratio = r.ratio;
        }
    if (best_s >= 0) {
        ctk::LevelGeometry geo = ctk::superlevel_geometry(wg.grid, wg.metric, wg.weight, u,
                                                          dec.domains[domain], best_s);
        ctk::MixingBoundCheck chk =
            ctk::check_mixing_bound(flow, wg.grid, geo.segments, geo.volume);
        j["mixing_bound"] = {{"j_dynamic", chk.j_dynamic},
                             {"j_mixing_metric", chk.j_mixing_metric},
                             {"holds", chk.holds}};
    }
    ctk::write_json(outpath(a, "dynamic.json"), j);
    return 0;
}

int cmd_census(const CommonArgs& a) {
    ctk::Config cfg = ctk::Config::parse_file(a.config_path);
    std::string name = cfg.get_string("census_manifold");
    int kmax = cfg.get_int("k_max", 200);
    ctk::ShearParams sp;
    ctk::CensusManifold m;
    if (name == "torus") m = ctk::CensusManifold::Torus;
    else if (name == "cylinder") m = ctk::CensusManifold::Cylinder;
    else if (name == "ball") m = ctk::CensusManifold::Ball;
    else if (name == "shear") {
        m = ctk::CensusManifold::Shear;
        sp.p = cfg.get_int("p");
        sp.q = cfg.get_int("q");
        sp.t_max = cfg.get_int("t_max", 2);
    } else {
        throw ctk::ConfigError("census_manifold must be torus, cylinder, ball or shear");
    }
    check_schema(cfg);

    const int kmin = ctk::rk_validity_threshold(m, sp);
    if (kmax < kmin)
        throw ctk::ConfigError("k_max below formula validity threshold " +
                               std::to_string(kmin));
    std::vector<std::string> hdr{"k", "lambda_k", "enumerated_r_k", "formula_bound",
                                 "cheeger_bound"};
    std::vector<std::vector<double>> rows;
    bool all_ok = true;
    for (const ctk::RkBound& rb : ctk::census_table(m, kmin, kmax, sp)) {
        rows.push_back({static_cast<double>(rb.k), rb.lambda_k,
                        static_cast<double>(rb.enumerated_r_k),
                        static_cast<double>(rb.formula_value), rb.cheeger_bound});
        if (rb.enumerated_r_k < rb.formula_value) all_ok = false;
    }
    ctk::write_csv(outpath(a, "census.csv"), hdr, rows);
    json j{{"command", "census"}, {"census_manifold", name}, {"k_min", kmin},
           {"k_max", kmax},       {"all_bounds_hold", all_ok}};
    if (m == ctk::CensusManifold::Shear) {
        j["p"] = sp.p;
        j["q"] = sp.q;
        j["t_max"] = sp.t_max;
        j["b"] = sp.b();
    }
    ctk::write_json(outpath(a, "census.json"), j);
    if (!all_ok) throw ctk::NumericalError("enumerated r_k fell below the formula bound");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weighted-manifold spectral Cheeger toolkit"};
    app.require_subcommand(1);

    CommonArgs args;
    std::string cmd_name;
    for (const char* name : {"solve", "sweep", "pack", "seba", "dynamic", "census"}) {
        CLI::App* sub = app.add_subcommand(name);
        add_common(sub, args);
        sub->callback([&cmd_name, name] { cmd_name = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        Eigen::setNbThreads(std::max(1, args.threads));
        if (cmd_name == "solve") return cmd_solve(args);
        if (cmd_name == "sweep") return cmd_sweep(args);
        if (cmd_name == "pack") return cmd_pack(args);
        if (cmd_name == "seba") return cmd_seba(args);
        if (cmd_name == "dynamic") return cmd_dynamic(args);
        if (cmd_name == "census") return cmd_census(args);
        std::cerr << "error: no subcommand\n";
        return 2;
    } catch (const ctk::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ctk::ExprError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ctk::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
