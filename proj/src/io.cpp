#include "ccp/io.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

#include "ccp/expr.hpp"
#include "ccp/orlicz.hpp"

namespace ccp {

using nlohmann::json;

namespace {

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw input_error("malformed JSON in " + path + ": " + e.what());
    }
    return j;
}

}  // namespace

DiscreteSpace load_space_json(const std::string& path) {
    const json j = read_json(path);
    if (!j.contains("points") || !j.contains("measure") || !j.contains("metric"))
        throw input_error(path + ": space file needs points, measure, metric");
    std::vector<std::vector<double>> points = j.at("points").get<std::vector<std::vector<double>>>();
    std::vector<double> measure = j.at("measure").get<std::vector<double>>();
    const std::string metric = j.at("metric").get<std::string>();
    const double kappa = j.value("kappa", 0.0);

    if (metric == "euclidean") return DiscreteSpace::euclidean(std::move(points), std::move(measure));
    if (metric == "matrix") {
        if (!j.contains("matrix")) throw input_error(path + ": metric 'matrix' needs a matrix");
        const auto rows = j.at("matrix").get<std::vector<std::vector<double>>>();
        const std::size_t n = rows.size();
        std::vector<double> flat;
        flat.reserve(n * n);
        for (const auto& r : rows) {
            if (r.size() != n) throw input_error(path + ": distance matrix is not square");
            flat.insert(flat.end(), r.begin(), r.end());
        }
        return DiscreteSpace::from_matrix(std::move(points), std::move(measure), std::move(flat),
                                          kappa);
    }
    if (metric.rfind("cc:", 0) == 0) {
        // The points must form a uniform rectangular lattice; recover it,
        // run the CC shortest-path construction, keep the file's measure.
        const FieldFamily field = load_field_family(metric.substr(3));
        if (points.empty()) throw input_error(path + ": empty point set");
        const std::size_t d = points[0].size();
        std::vector<std::vector<double>> axes(d);
        for (const auto& p : points) {
            if (p.size() != d) throw input_error(path + ": ragged coordinates");
            for (std::size_t a = 0; a < d; ++a) axes[a].push_back(p[a]);
        }
        RectGrid grid;
        grid.origin.resize(d);
        grid.h.resize(d);
        grid.shape.resize(d);
        for (std::size_t a = 0; a < d; ++a) {
            auto& ax = axes[a];
            std::sort(ax.begin(), ax.end());
            ax.erase(std::unique(ax.begin(), ax.end(),
                                 [](double u, double v) { return std::abs(u - v) < 1e-12; }),
                     ax.end());
            grid.origin[a] = ax.front();
            grid.shape[a] = static_cast<int>(ax.size());
            grid.h[a] = ax.size() > 1 ? (ax.back() - ax.front()) / (ax.size() - 1) : 1.0;
            for (std::size_t i = 0; i < ax.size(); ++i)
                if (std::abs(ax[i] - (grid.origin[a] + i * grid.h[a])) > 1e-9 * std::max(1.0, grid.h[a]))
                    throw input_error(path + ": cc metric needs a uniform lattice on axis " +
                                      std::to_string(a));
        }
        if (grid.size() != points.size())
            throw input_error(path + ": cc metric needs a full tensor lattice");
        GridSpace gs = cc_distance_matrix(field, grid);
        // Re-order the file's measures into grid order, then rebuild.
        std::vector<double> mu(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            std::vector<int> mi(d);
            for (std::size_t a = 0; a < d; ++a)
                mi[a] = static_cast<int>(std::lround((points[i][a] - grid.origin[a]) / grid.h[a]));
            mu[grid.flatten(mi)] = measure[i];
        }
        std::vector<double> dist(gs.space.size() * gs.space.size());
        for (std::size_t i = 0; i < gs.space.size(); ++i)
            for (std::size_t k = 0; k < gs.space.size(); ++k)
                dist[i * gs.space.size() + k] = gs.space.dist(i, k);
        return DiscreteSpace::from_matrix(grid.all_points(), std::move(mu), std::move(dist), 1.0);
    }
    throw input_error(path + ": unknown metric kind '" + metric + "'");
}

void save_space_json(const DiscreteSpace& space, const std::string& metric,
                     const std::string& path) {
    json j;
    std::vector<std::vector<double>> pts;
    for (std::size_t i = 0; i < space.size(); ++i) pts.push_back(space.point(i));
    j["points"] = pts;
    j["measure"] = space.measures();
    j["metric"] = "matrix";
    j["source_metric"] = metric;
    j["kappa"] = space.kappa();
    std::vector<std::vector<double>> rows(space.size(), std::vector<double>(space.size()));
    for (std::size_t i = 0; i < space.size(); ++i)
        for (std::size_t k = 0; k < space.size(); ++k) rows[i][k] = space.dist(i, k);
    j["matrix"] = rows;
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

RectGrid parse_grid_spec(const std::string& spec) {
    // grid:<d>d:<shape>[@lo,hi]
    if (spec.rfind("grid:", 0) != 0) throw input_error("not a grid spec: " + spec);
    std::string rest = spec.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string::npos) throw input_error("grid spec needs a shape: " + spec);
    const std::string dim_part = rest.substr(0, colon);
    std::string shape_part = rest.substr(colon + 1);
    double lo = 0.0, hi = 1.0;
    const auto at = shape_part.find('@');
    if (at != std::string::npos) {
        const std::string box = shape_part.substr(at + 1);
        shape_part = shape_part.substr(0, at);
        const auto comma = box.find(',');
        if (comma == std::string::npos) throw input_error("grid box needs lo,hi: " + spec);
        lo = std::stod(box.substr(0, comma));
        hi = std::stod(box.substr(comma + 1));
    }
    if (dim_part.size() < 2 || dim_part.back() != 'd')
        throw input_error("grid spec dimension must look like '2d': " + spec);
    const int d = std::stoi(dim_part.substr(0, dim_part.size() - 1));
    if (d < 1 || d > 4) throw input_error("grid spec supports 1..4 dimensions");
    std::vector<int> shape;
    std::size_t pos = 0;
    while (pos < shape_part.size()) {
        auto x = shape_part.find('x', pos);
        if (x == std::string::npos) x = shape_part.size();
        shape.push_back(std::stoi(shape_part.substr(pos, x - pos)));
        pos = x + 1;
    }
    if (static_cast<int>(shape.size()) == 1) shape.assign(d, shape[0]);
    if (static_cast<int>(shape.size()) != d)
        throw input_error("grid spec shape must have 1 or d entries: " + spec);
    return RectGrid::box(std::vector<double>(d, lo), std::vector<double>(d, hi), shape);
}

FieldFamily load_field_family(const std::string& id_or_path) {
    if (id_or_path == "grushin" || id_or_path == "heisenberg" ||
        id_or_path.rfind("euclidean:", 0) == 0)
        return FieldFamily::by_id(id_or_path);

    const json j = read_json(id_or_path);
    const int n = j.at("n").get<int>();
    const int M = j.at("M").get<int>();
    const int step = j.value("step", 1);
    std::vector<std::vector<double>> pts;
    std::vector<std::vector<std::vector<double>>> vecs;
    for (const auto& s : j.at("samples")) {
        pts.push_back(s.at("point").get<std::vector<double>>());
        vecs.push_back(s.at("vectors").get<std::vector<std::vector<double>>>());
    }
    return FieldFamily::custom(n, M, step, std::move(pts), std::move(vecs), id_or_path);
}

WeightSystem load_weights_json(const std::string& path, const DiscreteSpace& space) {
    const json j = read_json(path);
    WeightSystem ws;
    auto grid_fn = [&](const json& spec) -> std::vector<double> {
        if (spec.is_array()) {
            auto v = spec.get<std::vector<double>>();
            if (v.size() != space.size())
                throw input_error(path + ": weight array length mismatch");
            return v;
        }
        const Expr e = Expr::parse(spec.get<std::string>());
        std::vector<double> v(space.size());
        for (std::size_t i = 0; i < space.size(); ++i) v[i] = e.eval(space.point(i));
        return v;
    };
    ws.u = grid_fn(j.at("u"));
    for (const auto& vs : j.at("v")) ws.v.push_back(grid_fn(vs));
    ws.p = j.at("p").get<double>();
    ws.q = j.at("q").get<double>();
    ws.p_i = j.at("p_i").get<std::vector<double>>();
    ws.t = j.value("t", 2.0);
    if (j.contains("young")) {
        ws.Psi = YoungFunction::parse(j.at("young").at("Psi").get<std::string>());
        for (const auto& ph : j.at("young").at("Phi"))
            ws.Phi.push_back(YoungFunction::parse(ph.get<std::string>()));
    }
    ws.validate(space.size());
    return ws;
}

void save_tree_json(const DyadicTree& tree, const PropertyReport& rep, const std::string& path) {
    json j;
    j["A"] = tree.A;
    j["kappa"] = tree.kappa;
    j["a0"] = rep.measured_a0;
    j["a1"] = rep.measured_a1;
    j["levels"] = json::array();
    for (std::size_t d = 0; d < tree.num_levels(); ++d) {
        json lvl;
        lvl["k"] = tree.level_of(d);
        lvl["cubes"] = json::array();
        for (const Cube& q : tree.levels[d]) {
            json c;
            c["center"] = q.center;
            c["members"] = q.members;
            c["parent"] = q.parent;
            lvl["cubes"].push_back(std::move(c));
        }
        j["levels"].push_back(std::move(lvl));
    }
    std::ofstream out(path);
    if (!out) throw input_error("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

std::string space_digest(const DiscreteSpace& space) {
    std::uint64_t h = fnv1a("space");
    const std::size_t n = space.size();
    h = fnv1a(&n, sizeof n, h);
    for (std::size_t i = 0; i < n; ++i) {
        const double m = space.mu(i);
        h = fnv1a(&m, sizeof m, h);
        for (double c : space.point(i)) h = fnv1a(&c, sizeof c, h);
        for (std::size_t k = 0; k < n; k += std::max<std::size_t>(1, n / 16)) {
            const double d = space.dist(i, k);
            h = fnv1a(&d, sizeof d, h);
        }
    }
    return hex_digest(h);
}

}  // namespace ccp
