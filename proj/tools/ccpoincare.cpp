// ccpoincare: command-line front end wiring spaces, weights, and checkers
// into reproducible experiments. Exit codes: 0 success, 1 usage/input error,
// 2 a verified inequality came back violated.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "ccp/dyadic.hpp"
#include "ccp/fields.hpp"
#include "ccp/io.hpp"
#include "ccp/operators.hpp"
#include "ccp/orlicz.hpp"
#include "ccp/poincare.hpp"
#include "ccp/space.hpp"
#include "ccp/weights.hpp"

using json = nlohmann::json;
using namespace ccp;

namespace {

std::string now_string() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[64];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%S", std::gmtime(&t));
    return buf;
}

void emit(const json& j, const std::string& out, const std::string& format,
          const std::vector<std::vector<std::string>>& csv_rows) {
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out.empty()) {
        file.open(out);
        if (!file) throw input_error("cannot write " + out);
        os = &file;
    }
    if (format == "csv") {
        for (const auto& row : csv_rows) {
            for (std::size_t i = 0; i < row.size(); ++i)
                (*os) << (i ? "," : "") << row[i];
            (*os) << "\n";
        }
    } else {
        (*os) << j.dump(2) << "\n";
    }
}

// "a..b" geometric schedule (factor-2 steps toward b), single values too.
// Accepts 2^-3 style powers.
double parse_number(const std::string& s) {
    const auto caret = s.find('^');
    if (caret != std::string::npos)
        return std::pow(std::stod(s.substr(0, caret)), std::stod(s.substr(caret + 1)));
    return std::stod(s);
}

std::vector<double> parse_schedule(const std::string& s) {
    const auto dots = s.find("..");
    if (dots == std::string::npos) return {parse_number(s)};
    const double a = parse_number(s.substr(0, dots));
    const double b = parse_number(s.substr(dots + 2));
    std::vector<double> out;
    if (a == b) return {a};
    const bool down = b < a;
    for (double v = a; down ? v >= b * 0.999999 : v <= b * 1.000001; v *= (down ? 0.5 : 2.0))
        out.push_back(v);
    return out;
}

struct SpaceBundle {
    GridSpace gs;          // grid may be empty for file-loaded spaces
    bool has_grid = false;
    std::string spec;
    std::string fields_id;
};

GridSpace cc_space_cached(const FieldFamily& field, const RectGrid& grid) {
    const char* dir = std::getenv("CCPOINCARE_CACHE_DIR");
    if (!dir) return cc_distance_matrix(field, grid);
    std::uint64_t h = fnv1a(field.name());
    for (std::size_t a = 0; a < grid.dim(); ++a) {
        h = fnv1a(&grid.origin[a], sizeof(double), h);
        h = fnv1a(&grid.h[a], sizeof(double), h);
        h = fnv1a(&grid.shape[a], sizeof(int), h);
    }
    const std::filesystem::path path =
        std::filesystem::path(dir) / ("ccdist-" + hex_digest(h) + ".bin");
    const std::size_t n = grid.size();
    if (std::filesystem::exists(path)) {
        std::ifstream in(path, std::ios::binary);
        std::vector<double> dist(n * n);
        in.read(reinterpret_cast<char*>(dist.data()), dist.size() * sizeof(double));
        if (in) {
            std::vector<double> mu(n, grid.cell_volume());
            return GridSpace{grid, DiscreteSpace::from_matrix(grid.all_points(), std::move(mu),
                                                              std::move(dist), 1.0)};
        }
    }
    GridSpace gs = cc_distance_matrix(field, grid);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    std::ofstream outf(path, std::ios::binary);
    if (outf) {
        std::vector<double> dist(n * n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dist[i * n + j] = gs.space.dist(i, j);
        outf.write(reinterpret_cast<const char*>(dist.data()), dist.size() * sizeof(double));
    }
    return gs;
}

SpaceBundle make_space(const std::string& space_spec, const std::string& fields_id) {
    SpaceBundle sb;
    sb.spec = space_spec;
    sb.fields_id = fields_id;
    if (space_spec.rfind("grid:", 0) == 0) {
        const RectGrid grid = parse_grid_spec(space_spec);
        sb.has_grid = true;
        if (fields_id.empty() || fields_id.rfind("euclidean", 0) == 0) {
            sb.gs = euclidean_grid_space(grid);
        } else {
            sb.gs = cc_space_cached(load_field_family(fields_id), grid);
        }
        return sb;
    }
    sb.gs.space = load_space_json(space_spec);
    return sb;
}

FieldFamily field_for(const SpaceBundle& sb) {
    if (sb.fields_id.empty()) {
        if (!sb.has_grid) throw input_error("this command needs --fields");
        return FieldFamily::euclidean(static_cast<int>(sb.gs.grid.dim()));
    }
    return load_field_family(sb.fields_id);
}

Ball default_ball(const GridSpace& gs) {
    // Centered ball covering the interior: radius = half the smallest box
    // extent, center = the middle grid node.
    std::vector<int> mid(gs.grid.dim());
    double r = kInf;
    for (std::size_t a = 0; a < gs.grid.dim(); ++a) {
        mid[a] = (gs.grid.shape[a] - 1) / 2;
        r = std::min(r, gs.grid.h[a] * (gs.grid.shape[a] - 1) / 2.0);
    }
    return Ball{static_cast<int>(gs.grid.flatten(mid)), r};
}

json base_report(const std::string& command, const SpaceBundle& sb) {
    json j;
    j["command"] = command;
    j["space"] = sb.spec;
    j["fields"] = sb.fields_id.empty() ? "euclidean" : sb.fields_id;
    j["space_digest"] = space_digest(sb.gs.space);
    j["timestamp"] = now_string();
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"carnot-caratheodory poincare toolkit"};
    app.require_subcommand(1);

    std::string space_spec = "grid:1d:129", fields_id, weights_path, variant_name_s = "theorem1_q>1";
    std::string young_spec, out_path, format = "json", eps_range = "2^-3..2^-8";
    double alpha = 1.0, p_flag = 2.0, q_flag = 0.0, t_flag = 2.0;
    std::vector<double> p_i_flag;
    int m_flag = 1, trials = 50, refine = 0, threads = 0;
    std::uint64_t seed = 7;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--space", space_spec, "grid spec or space JSON file");
        cmd->add_option("--fields", fields_id, "euclidean:<n> | grushin | heisenberg | file");
        cmd->add_option("--threads", threads, "worker cap (0 = hardware)");
        cmd->add_option("--out", out_path, "output file (default stdout)");
        cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--seed", seed, "rng seed, recorded in reports");
    };

    CLI::App* c_build = app.add_subcommand("build-space", "build a space and report diagnostics");
    add_common(c_build);

    CLI::App* c_dyadic = app.add_subcommand("dyadic", "build Christ cubes and verify (i)-(v)");
    add_common(c_dyadic);

    CLI::App* c_weights = app.add_subcommand("check-weights", "sup-over-balls weight conditions");
    add_common(c_weights);
    c_weights->add_option("--weights", weights_path, "weight system JSON")->required();
    c_weights->add_option("--variant", variant_name_s, "condition variant");
    c_weights->add_option("--alpha", alpha, "kernel order for cc/general variants");
    c_weights->add_option("--m", m_flag, "multilinearity degree");

    CLI::App* c_pot = app.add_subcommand("potential",
                                         "potential vs dyadic majorant margins on random inputs");
    add_common(c_pot);
    c_pot->add_option("--alpha", alpha, "kernel order");
    c_pot->add_option("--m", m_flag, "multilinearity degree");
    c_pot->add_option("--trials", trials, "random nonnegative input draws");

    CLI::App* c_ver = app.add_subcommand("verify-poincare", "multilinear Poincare harness");
    add_common(c_ver);
    c_ver->add_option("--m", m_flag, "number of factor functions");
    c_ver->add_option("--p", p_flag, "integrability p");
    c_ver->add_option("--q", q_flag, "oscillation exponent q (0 = classical)");
    c_ver->add_option("--p_i", p_i_flag, "comma list of p_i")->delimiter(',');
    c_ver->add_option("--t", t_flag, "auxiliary exponent t > 1");
    c_ver->add_option("--weights", weights_path, "weight system JSON (default all-ones)");
    c_ver->add_option("--trials", trials, "random trials");
    c_ver->add_option("--refine", refine, "extra refinement passes for the trace");

    CLI::App* c_rep = app.add_subcommand("representation", "pointwise representation bound");
    add_common(c_rep);
    c_rep->add_option("--m", m_flag, "number of factor functions");
    c_rep->add_option("--trials", trials, "random trials");
    c_rep->add_option("--refine", refine, "extra refinement passes");

    CLI::App* c_fail = app.add_subcommand("failure-demo", "p<1 ramp blow-up slope");
    add_common(c_fail);
    c_fail->add_option("--p", p_flag, "exponent in (0,1]")->required();
    c_fail->add_option("--q", q_flag, "oscillation exponent (0 = classical)");
    c_fail->add_option("--eps", eps_range, "geometric schedule a..b");

    CLI::App* c_orl = app.add_subcommand("orlicz-check", "B_p tail verdict for a Young function");
    add_common(c_orl);
    c_orl->add_option("--young", young_spec, "power:r | powerlog:r:delta")->required();
    c_orl->add_option("--p", p_flag, "Lebesgue exponent p > 1")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints usage text
        return e.get_exit_code() == 0 ? 0 : 1;
    }
    if (threads > 0) set_max_threads(static_cast<unsigned>(threads));

    try {
        std::vector<std::vector<std::string>> csv;

        if (c_build->parsed()) {
            SpaceBundle sb = make_space(space_spec, fields_id);
            json j = base_report("build-space", sb);
            j["points"] = sb.gs.space.size();
            j["kappa"] = sb.gs.space.kappa();
            j["diameter"] = sb.gs.space.diameter();
            j["total_measure"] = sb.gs.space.total_measure();
            const auto dbl = doubling_constant(sb.gs.space);
            j["doubling_L"] = dbl.L;
            csv = {{"points", "kappa", "diameter", "doubling_L"},
                   {std::to_string(sb.gs.space.size()), std::to_string(sb.gs.space.kappa()),
                    std::to_string(sb.gs.space.diameter()), std::to_string(dbl.L)}};
            if (!out_path.empty() && format == "json" && out_path.size() > 5 &&
                out_path.substr(out_path.size() - 5) == ".json" && c_build->count("--out")) {
                // --out on build-space writes the space itself
                save_space_json(sb.gs.space, sb.fields_id.empty() ? "euclidean" : sb.fields_id,
                                out_path);
                std::cout << j.dump(2) << "\n";
                return 0;
            }
            emit(j, out_path, format, csv);
            return 0;
        }

        if (c_dyadic->parsed()) {
            SpaceBundle sb = make_space(space_spec, fields_id);
            const DyadicTree tree = build_dyadic(sb.gs.space);
            const PropertyReport rep = verify_properties(tree, sb.gs.space);
            json j = base_report("dyadic", sb);
            j["A"] = tree.A;
            j["levels"] = tree.num_levels();
            j["a0"] = rep.measured_a0;
            j["a1"] = rep.measured_a1;
            j["all_properties_pass"] = rep.all();
            if (!rep.witness.empty()) j["witness"] = rep.witness;
            if (!out_path.empty()) save_tree_json(tree, rep, out_path);
            std::cout << j.dump(2) << "\n";
            return rep.all() ? 0 : 2;
        }

        if (c_weights->parsed()) {
            SpaceBundle sb = make_space(space_spec, fields_id);
            const WeightSystem ws = load_weights_json(weights_path, sb.gs.space);
            const ConditionVariant variant = parse_variant(variant_name_s);
            ConditionResult res;
            if (variant == ConditionVariant::general_q_gt1 ||
                variant == ConditionVariant::general_q_le1) {
                const Kernel kern = Kernel::cc_alpha(alpha, ws.m());
                const DyadicTree tree = build_dyadic(sb.gs.space);
                const PhiFunctional phi = PhiFunctional::for_tree(kern, sb.gs.space, tree);
                res = check_power_condition(sb.gs.space, &phi, alpha, ws, variant);
            } else if (!ws.Phi.empty()) {
                const Kernel kern = Kernel::cc_alpha(alpha, ws.m());
                const DyadicTree tree = build_dyadic(sb.gs.space);
                const PhiFunctional phi = PhiFunctional::for_tree(kern, sb.gs.space, tree);
                res = check_orlicz_condition(sb.gs.space, phi, ws);
            } else {
                res = check_power_condition(sb.gs.space, nullptr, alpha, ws, variant);
            }
            json j = base_report("check-weights", sb);
            j["variant"] = variant_name_s;
            j["weights_digest"] = hex_digest(fnv1a(weights_path));
            j["sup"] = res.infinite ? -1.0 : res.sup;
            j["finite"] = !res.infinite;
            j["witness_center"] = res.infinite ? res.witness.center : res.ball.center;
            j["witness_radius"] = res.infinite ? res.witness.radius : res.ball.radius;
            j["balls_checked"] = res.balls_checked;
            csv = {{"sup", "finite", "center", "radius"},
                   {std::to_string(res.sup), res.infinite ? "0" : "1",
                    std::to_string(res.ball.center), std::to_string(res.ball.radius)}};
            emit(j, out_path, format, csv);
            return 0;
        }

        if (c_pot->parsed()) {
            SpaceBundle sb = make_space(space_spec, fields_id);
            const DyadicTree tree = build_dyadic(sb.gs.space);
            const Kernel kern = Kernel::cc_alpha(alpha, m_flag);
            const PhiFunctional phi = PhiFunctional::for_tree(kern, sb.gs.space, tree);
            Rng rng(seed);
            double worst_margin = kInf;
            json trials_json = json::array();
            csv.push_back({"trial", "min_margin", "max_ratio"});
            for (int t = 0; t < trials; ++t) {
                std::vector<std::vector<double>> fs(m_flag);
                for (auto& f : fs) {
                    f.resize(sb.gs.space.size());
                    for (auto& v : f) v = rng.uniform(0.0, 1.0);
                }
                const DiscretizeReport rep = discretize_bound_check(sb.gs.space, tree, phi, fs);
                worst_margin = std::min(worst_margin, rep.min_margin);
                trials_json.push_back({{"trial", t},
                                       {"min_margin", rep.min_margin},
                                       {"max_ratio", rep.max_ratio}});
                csv.push_back({std::to_string(t), std::to_string(rep.min_margin),
                               std::to_string(rep.max_ratio)});
            }
            json j = base_report("potential", sb);
            j["alpha"] = alpha;
            j["m"] = m_flag;
            j["seed"] = seed;
            j["worst_margin"] = worst_margin;
            j["trials"] = trials_json;
            emit(j, out_path, format, csv);
            return worst_margin >= -1e-12 ? 0 : 2;
        }

        if (c_ver->parsed()) {
            SpaceBundle sb0 = make_space(space_spec, fields_id);
            if (!sb0.has_grid) throw input_error("verify-poincare needs a grid space");
            const FieldFamily field = field_for(sb0);

            if (q_flag == 0.0) {
                const int n = static_cast<int>(sb0.gs.grid.dim());
                q_flag = (p_flag < n) ? n * p_flag / (n - p_flag) : p_flag;
            }
            if (p_i_flag.empty()) p_i_flag.assign(m_flag, m_flag * p_flag);

            json refinement = json::array();
            json j;
            PoincareReport last;
            RectGrid grid = sb0.gs.grid;
            for (int pass = 0; pass <= refine; ++pass) {
                SpaceBundle sb = sb0;
                if (pass > 0) {
                    grid = grid.refined();
                    sb.gs = (fields_id.empty() || fields_id.rfind("euclidean", 0) == 0)
                                ? euclidean_grid_space(grid)
                                : cc_space_cached(field, grid);
                }
                WeightSystem ws;
                if (!weights_path.empty()) {
                    ws = load_weights_json(weights_path, sb.gs.space);
                } else {
                    ws.u.assign(sb.gs.space.size(), 1.0);
                    ws.v.assign(m_flag, std::vector<double>(sb.gs.space.size(), 1.0));
                    ws.p = p_flag;
                    ws.q = q_flag;
                    ws.p_i = p_i_flag;
                    ws.t = t_flag;
                }
                const Ball ball = default_ball(sb.gs);
                const ConditionVariant variant = ws.q > 1.0 ? ConditionVariant::theorem1_q_gt1
                                                            : ConditionVariant::theorem1_q_le1;
                const ConditionResult cond =
                    check_power_condition(sb.gs.space, nullptr, 1.0, ws, variant);

                TestFunctionFamily fam;
                fam.kind = TestFunctionFamily::Kind::polynomial;
                fam.degree = 2;
                std::vector<std::vector<double>> pinned;
                const std::vector<std::vector<double>>* pinned_ptr = nullptr;
                if (m_flag == 1) {
                    std::vector<double> fx(sb.gs.space.size());
                    for (std::size_t i = 0; i < sb.gs.space.size(); ++i)
                        fx[i] = sb.gs.space.point(i)[0];
                    pinned.push_back(std::move(fx));
                    pinned_ptr = &pinned;
                }
                last = verify_theorem(sb.gs, field, ws, ball, fam, trials, seed, pinned_ptr,
                                      cond.infinite ? std::optional<double>() : cond.sup);
                refinement.push_back({{"h", grid.h[0]}, {"max_ratio", last.max_ratio}});
                if (pass == 0) {
                    j = base_report("verify-poincare", sb);
                    j["theorem"] = "weighted multilinear poincare";
                    j["exponents"] = {{"p", ws.p}, {"q", ws.q}, {"p_i", ws.p_i}, {"t", ws.t}};
                    j["weights_digest"] =
                        weights_path.empty() ? "ones" : hex_digest(fnv1a(weights_path));
                    j["condition_sup"] = cond.infinite ? -1.0 : cond.sup;
                    if (m_flag == 1 && !last.trials.empty())
                        j["pinned_trial_ratio"] = last.trials[0].ratio;
                }
            }
            j["trials"] = static_cast<int>(last.trials.size());
            j["max_ratio"] = last.max_ratio;
            j["ratio_quantiles"] = {{"q50", last.q50}, {"q90", last.q90}};
            j["refinement"] = refinement;
            j["seed"] = seed;
            csv.push_back({"trial", "lhs", "rhs", "ratio"});
            for (std::size_t i = 0; i < last.trials.size(); ++i)
                csv.push_back({std::to_string(i), std::to_string(last.trials[i].lhs),
                               std::to_string(last.trials[i].rhs),
                               std::to_string(last.trials[i].ratio)});
            emit(j, out_path, format, csv);
            return 0;
        }

        if (c_rep->parsed()) {
            SpaceBundle sb0 = make_space(space_spec, fields_id);
            if (!sb0.has_grid) throw input_error("representation needs a grid space");
            const FieldFamily field = field_for(sb0);
            json refinement = json::array();
            RectGrid grid = sb0.gs.grid;
            double final_c = 0.0;
            bool any_violation = false;
            for (int pass = 0; pass <= refine; ++pass) {
                SpaceBundle sb = sb0;
                if (pass > 0) {
                    grid = grid.refined();
                    sb.gs = (fields_id.empty() || fields_id.rfind("euclidean", 0) == 0)
                                ? euclidean_grid_space(grid)
                                : cc_space_cached(field, grid);
                }
                const Ball ball = default_ball(sb.gs);
                Rng rng(seed);
                TestFunctionFamily fam;
                fam.kind = TestFunctionFamily::Kind::polynomial;
                double worst_c = 0.0;
                for (int t = 0; t < trials; ++t) {
                    std::vector<std::vector<double>> fs(m_flag);
                    for (auto& f : fs) f = fam.sample(sb.gs.grid, rng);
                    const RepresentationReport rep = representation_check(sb.gs, field, ball, fs);
                    worst_c = std::max(worst_c, rep.C);
                    any_violation = any_violation || rep.violation;
                }
                refinement.push_back({{"h", grid.h[0]}, {"C", worst_c}});
                final_c = worst_c;
            }
            SpaceBundle sb = sb0;
            json j = base_report("representation", sb);
            j["m"] = m_flag;
            j["C"] = final_c;
            j["violation_candidates"] = any_violation;
            j["refinement"] = refinement;
            j["seed"] = seed;
            csv = {{"C"}, {std::to_string(final_c)}};
            emit(j, out_path, format, csv);
            return any_violation ? 2 : 0;
        }

        if (c_fail->parsed()) {
            const std::vector<double> eps = parse_schedule(eps_range);
            const FailureDemoReport rep = linear_failure_demo(
                p_flag, q_flag > 0.0 ? std::optional<double>(q_flag) : std::nullopt, eps);
            json j;
            j["command"] = "failure-demo";
            j["p"] = p_flag;
            j["slope"] = rep.slope;
            j["expected_slope"] = rep.expected_slope;
            j["timestamp"] = now_string();
            json rows = json::array();
            csv.push_back({"eps", "lhs", "rhs", "ratio"});
            for (std::size_t i = 0; i < rep.eps.size(); ++i) {
                rows.push_back({{"eps", rep.eps[i]},
                                {"lhs", rep.lhs[i]},
                                {"rhs", rep.rhs[i]},
                                {"ratio", rep.ratio[i]}});
                csv.push_back({std::to_string(rep.eps[i]), std::to_string(rep.lhs[i]),
                               std::to_string(rep.rhs[i]), std::to_string(rep.ratio[i])});
            }
            csv.push_back({"slope", std::to_string(rep.slope), "expected",
                           std::to_string(rep.expected_slope)});
            j["rows"] = rows;
            emit(j, out_path, format, csv);
            return 0;
        }

        if (c_orl->parsed()) {
            const YoungFunction psi = YoungFunction::parse(young_spec);
            const TailReport rep = bp_condition_check(psi, p_flag, 1.0);
            json j;
            j["command"] = "orlicz-check";
            j["young"] = young_spec;
            j["p"] = p_flag;
            j["verdict"] = to_string(rep.verdict);
            j["increments"] = rep.increments;
            j["timestamp"] = now_string();
            csv = {{"young", "p", "verdict"},
                   {young_spec, std::to_string(p_flag), to_string(rep.verdict)}};
            emit(j, out_path, format, csv);
            return 0;
        }
    } catch (const input_error& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 1;
    } catch (const cap_error& e) {
        std::cerr << "cap exceeded: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
