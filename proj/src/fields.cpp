#include "ccp/fields.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <queue>
#include <set>

namespace ccp {

std::size_t RectGrid::size() const {
    std::size_t n = 1;
    for (int s : shape) n *= static_cast<std::size_t>(s);
    return n;
}

double RectGrid::cell_volume() const {
    double v = 1.0;
    for (double s : h) v *= s;
    return v;
}

std::vector<int> RectGrid::unflatten(std::size_t idx) const {
    std::vector<int> mi(shape.size());
    for (std::size_t a = shape.size(); a-- > 0;) {
        mi[a] = static_cast<int>(idx % shape[a]);
        idx /= shape[a];
    }
    return mi;
}

std::size_t RectGrid::flatten(const std::vector<int>& mi) const {
    std::size_t idx = 0;
    for (std::size_t a = 0; a < shape.size(); ++a) idx = idx * shape[a] + mi[a];
    return idx;
}

std::vector<double> RectGrid::point(std::size_t idx) const {
    const std::vector<int> mi = unflatten(idx);
    std::vector<double> x(shape.size());
    for (std::size_t a = 0; a < shape.size(); ++a) x[a] = origin[a] + mi[a] * h[a];
    return x;
}

bool RectGrid::on_boundary(std::size_t idx) const {
    const std::vector<int> mi = unflatten(idx);
    for (std::size_t a = 0; a < shape.size(); ++a)
        if (mi[a] == 0 || mi[a] == shape[a] - 1) return true;
    return false;
}

std::vector<std::vector<double>> RectGrid::all_points() const {
    std::vector<std::vector<double>> pts(size());
    for (std::size_t i = 0; i < pts.size(); ++i) pts[i] = point(i);
    return pts;
}

RectGrid RectGrid::refined() const {
    RectGrid g;
    g.origin = origin;
    g.h.resize(h.size());
    g.shape.resize(shape.size());
    for (std::size_t a = 0; a < h.size(); ++a) {
        g.h[a] = h[a] / 2.0;
        g.shape[a] = 2 * (shape[a] - 1) + 1;
    }
    return g;
}

RectGrid RectGrid::box(const std::vector<double>& lo, const std::vector<double>& hi,
                       const std::vector<int>& shape) {
    if (lo.size() != hi.size() || lo.size() != shape.size())
        throw input_error("grid: dimension mismatch in box spec");
    RectGrid g;
    g.origin = lo;
    g.shape = shape;
    g.h.resize(lo.size());
    for (std::size_t a = 0; a < lo.size(); ++a) {
        if (shape[a] < 2) throw input_error("grid: each axis needs at least 2 nodes");
        if (!(hi[a] > lo[a])) throw input_error("grid: empty box");
        g.h[a] = (hi[a] - lo[a]) / (shape[a] - 1);
    }
    return g;
}

FieldFamily FieldFamily::euclidean(int n) {
    if (n < 1) throw input_error("fields: euclidean dimension must be >= 1");
    FieldFamily f;
    f.name_ = "euclidean:" + std::to_string(n);
    f.n_ = n;
    f.m_ = n;
    f.step_ = 1;
    f.eval_ = [n](const std::vector<double>&) {
        std::vector<std::vector<double>> vs(n, std::vector<double>(n, 0.0));
        for (int k = 0; k < n; ++k) vs[k][k] = 1.0;
        return vs;
    };
    return f;
}

FieldFamily FieldFamily::grushin() {
    FieldFamily f;
    f.name_ = "grushin";
    f.n_ = 2;
    f.m_ = 2;
    f.step_ = 2;
    f.eval_ = [](const std::vector<double>& x) {
        return std::vector<std::vector<double>>{{1.0, 0.0}, {0.0, x[0]}};
    };
    return f;
}

FieldFamily FieldFamily::heisenberg() {
    FieldFamily f;
    f.name_ = "heisenberg";
    f.n_ = 3;
    f.m_ = 2;
    f.step_ = 2;
    f.eval_ = [](const std::vector<double>& x) {
        return std::vector<std::vector<double>>{{1.0, 0.0, -x[1] / 2.0},
                                                {0.0, 1.0, x[0] / 2.0}};
    };
    return f;
}

namespace {

// Tensor-grid multilinear interpolation table for custom field families.
struct InterpTable {
    std::vector<std::vector<double>> axes;      // sorted unique coordinates per axis
    std::vector<int> shape;
    int n = 0, M = 0;
    // values[node][k][a] in row-major node order matching `shape`
    std::vector<std::vector<std::vector<double>>> values;

    std::size_t flatten(const std::vector<int>& mi) const {
        std::size_t idx = 0;
        for (std::size_t a = 0; a < shape.size(); ++a) idx = idx * shape[a] + mi[a];
        return idx;
    }

    std::vector<std::vector<double>> eval(const std::vector<double>& x) const {
        // Per-axis bracket + weight, clamped to the table range.
        std::vector<int> lo(n);
        std::vector<double> w(n);
        for (int a = 0; a < n; ++a) {
            const auto& ax = axes[a];
            auto it = std::upper_bound(ax.begin(), ax.end(), x[a]);
            int hi = static_cast<int>(it - ax.begin());
            hi = std::clamp(hi, 1, static_cast<int>(ax.size()) - 1);
            lo[a] = hi - 1;
            const double span = ax[hi] - ax[lo[a]];
            w[a] = span > 0.0 ? std::clamp((x[a] - ax[lo[a]]) / span, 0.0, 1.0) : 0.0;
        }
        std::vector<std::vector<double>> out(M, std::vector<double>(n, 0.0));
        const int corners = 1 << n;
        std::vector<int> mi(n);
        for (int c = 0; c < corners; ++c) {
            double weight = 1.0;
            for (int a = 0; a < n; ++a) {
                const bool up = (c >> a) & 1;
                mi[a] = lo[a] + (up ? 1 : 0);
                weight *= up ? w[a] : (1.0 - w[a]);
            }
            if (weight == 0.0) continue;
            const auto& v = values[flatten(mi)];
            for (int k = 0; k < M; ++k)
                for (int a = 0; a < n; ++a) out[k][a] += weight * v[k][a];
        }
        return out;
    }
};

}  // namespace

FieldFamily FieldFamily::custom(int n, int M, int step,
                                std::vector<std::vector<double>> sample_points,
                                std::vector<std::vector<std::vector<double>>> sample_vectors,
                                std::string name) {
    if (sample_points.size() != sample_vectors.size() || sample_points.empty())
        throw input_error("fields: custom table needs matching, nonempty samples");
    auto table = std::make_shared<InterpTable>();
    table->n = n;
    table->M = M;
    table->axes.assign(n, {});
    for (const auto& p : sample_points) {
        if (static_cast<int>(p.size()) != n) throw input_error("fields: sample point dim mismatch");
        for (int a = 0; a < n; ++a) table->axes[a].push_back(p[a]);
    }
    std::size_t expected = 1;
    for (auto& ax : table->axes) {
        std::sort(ax.begin(), ax.end());
        ax.erase(std::unique(ax.begin(), ax.end(),
                             [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                 ax.end());
        table->shape.push_back(static_cast<int>(ax.size()));
        expected *= ax.size();
    }
    if (expected != sample_points.size())
        throw input_error("fields: custom samples must form a full tensor grid");
    table->values.resize(expected);
    for (std::size_t s = 0; s < sample_points.size(); ++s) {
        std::vector<int> mi(n);
        for (int a = 0; a < n; ++a) {
            const auto& ax = table->axes[a];
            auto it = std::lower_bound(ax.begin(), ax.end(), sample_points[s][a] - 1e-12);
            mi[a] = static_cast<int>(it - ax.begin());
        }
        if (static_cast<int>(sample_vectors[s].size()) != M)
            throw input_error("fields: sample vector count mismatch");
        for (const auto& v : sample_vectors[s])
            if (static_cast<int>(v.size()) != n)
                throw input_error("fields: sample vector dim mismatch");
        table->values[table->flatten(mi)] = sample_vectors[s];
    }
    FieldFamily f;
    f.name_ = std::move(name);
    f.n_ = n;
    f.m_ = M;
    f.step_ = step;
    f.eval_ = [table](const std::vector<double>& x) { return table->eval(x); };
    return f;
}

FieldFamily FieldFamily::by_id(const std::string& id) {
    if (id == "grushin") return grushin();
    if (id == "heisenberg") return heisenberg();
    if (id.rfind("euclidean:", 0) == 0) {
        const int n = std::stoi(id.substr(10));
        return euclidean(n);
    }
    throw input_error("fields: unknown family id '" + id + "'");
}

std::vector<std::vector<double>> FieldFamily::eval(const std::vector<double>& x) const {
    if (static_cast<int>(x.size()) != n_)
        throw input_error("fields: point dimension mismatch for " + name_);
    return eval_(x);
}

namespace {

// grad f at a node, central differences, one-sided at the boundary.
std::vector<double> grid_gradient(const RectGrid& grid, const std::vector<double>& f,
                                  std::size_t node, bool* one_sided) {
    const std::size_t d = grid.dim();
    const std::vector<int> mi = grid.unflatten(node);
    std::vector<double> g(d, 0.0);
    if (one_sided) *one_sided = false;
    for (std::size_t a = 0; a < d; ++a) {
        std::vector<int> up = mi, dn = mi;
        const bool has_up = mi[a] + 1 < grid.shape[a];
        const bool has_dn = mi[a] - 1 >= 0;
        if (has_up && has_dn) {
            up[a] += 1;
            dn[a] -= 1;
            g[a] = (f[grid.flatten(up)] - f[grid.flatten(dn)]) / (2.0 * grid.h[a]);
        } else if (has_up) {
            up[a] += 1;
            g[a] = (f[grid.flatten(up)] - f[node]) / grid.h[a];
            if (one_sided) *one_sided = true;
        } else if (has_dn) {
            dn[a] -= 1;
            g[a] = (f[node] - f[grid.flatten(dn)]) / grid.h[a];
            if (one_sided) *one_sided = true;
        } else {
            throw input_error("fields: axis with a single node has no stencil");
        }
    }
    return g;
}

}  // namespace

SubellipticGradient subelliptic_gradient(const FieldFamily& field, const RectGrid& grid,
                                         const std::vector<double>& f, std::size_t node) {
    if (f.size() != grid.size()) throw input_error("fields: grid function size mismatch");
    SubellipticGradient out;
    std::vector<double> g = grid_gradient(grid, f, node, &out.one_sided);
    const auto vs = field.eval(grid.point(node));
    out.components.resize(field.count());
    for (int k = 0; k < field.count(); ++k) {
        double s = 0.0;
        for (std::size_t a = 0; a < grid.dim(); ++a) s += vs[k][a] * g[a];
        out.components[k] = s;
    }
    return out;
}

double gradient_norm(const FieldFamily& field, const RectGrid& grid,
                     const std::vector<double>& f, std::size_t node) {
    const auto g = subelliptic_gradient(field, grid, f, node);
    double s = 0.0;
    for (double c : g.components) s += c * c;
    return std::sqrt(s);
}

std::vector<double> gradient_norm_field(const FieldFamily& field, const RectGrid& grid,
                                        const std::vector<double>& f) {
    std::vector<double> out(grid.size());
    parallel_for(grid.size(), [&](std::size_t i) { out[i] = gradient_norm(field, grid, f, i); });
    return out;
}

CCGraph build_cc_graph(const FieldFamily& field, const RectGrid& grid) {
    if (static_cast<int>(grid.dim()) != field.ambient_dim())
        throw input_error("fields: grid dimension does not match field family " + field.name());
    const std::size_t n = grid.size();
    const std::size_t d = grid.dim();

    // Axis steps and face diagonals: offsets with one or two entries in {-1,+1}.
    std::vector<std::vector<int>> offsets;
    for (std::size_t a = 0; a < d; ++a)
        for (int s : {-1, 1}) {
            std::vector<int> o(d, 0);
            o[a] = s;
            offsets.push_back(o);
        }
    for (std::size_t a = 0; a < d; ++a)
        for (std::size_t b = a + 1; b < d; ++b)
            for (int sa : {-1, 1})
                for (int sb : {-1, 1}) {
                    std::vector<int> o(d, 0);
                    o[a] = sa;
                    o[b] = sb;
                    offsets.push_back(o);
                }

    CCGraph g;
    g.grid = grid;
    g.spacing = *std::max_element(grid.h.begin(), grid.h.end());
    g.adjacency.assign(n, {});

    std::size_t edges = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::vector<int> mi = grid.unflatten(i);
        const std::vector<double> xi = grid.point(i);
        for (const auto& off : offsets) {
            std::vector<int> mj = mi;
            bool ok = true;
            for (std::size_t a = 0; a < d; ++a) {
                mj[a] += off[a];
                if (mj[a] < 0 || mj[a] >= grid.shape[a]) {
                    ok = false;
                    break;
                }
            }
            if (!ok) continue;
            const std::size_t j = grid.flatten(mj);
            if (j < i) continue;  // add undirected edge once

            const std::vector<double> xj = grid.point(j);
            std::vector<double> mid(d), dx(d);
            for (std::size_t a = 0; a < d; ++a) {
                mid[a] = 0.5 * (xi[a] + xj[a]);
                dx[a] = xj[a] - xi[a];
            }
            const auto vs = field.eval(mid);
            Eigen::MatrixXd A(d, field.count());
            for (int k = 0; k < field.count(); ++k)
                for (std::size_t a = 0; a < d; ++a) A(a, k) = vs[k][a];
            Eigen::VectorXd rhs(d);
            for (std::size_t a = 0; a < d; ++a) rhs(a) = dx[a];

            // Minimal-norm coefficients with the displacement frozen at the
            // midpoint: travel time = ||c||_2 under sum c_j^2 <= 1 scaling.
            const Eigen::VectorXd c = A.completeOrthogonalDecomposition().solve(rhs);
            const double residual = (A * c - rhs).norm();
            const double scale = rhs.norm();
            if (residual > 1e-8 * std::max(scale, 1e-300)) continue;  // off-span edge
            const double cost = c.norm();
            if (!(cost > 0.0)) continue;
            g.adjacency[i].emplace_back(static_cast<int>(j), cost);
            g.adjacency[j].emplace_back(static_cast<int>(i), cost);
            ++edges;
        }
    }
    // Step >= 2 families need motions a single lattice hop cannot express: a
    // straight step is almost never in span(Y) (on the unit box Heisenberg
    // loses every t-step and every off-diagonal move, so span edges alone
    // disconnect the graph). Three admissible-curve edge families repair it,
    // each integrated with RK4 and accepted only when the endpoint lands on a
    // lattice node essentially exactly (the polynomial built-ins land exactly):
    //   squares    flow Y_i, Y_j, -Y_i, -Y_j for time s each: cost 4s,
    //              displacement ~ s^2 [Y_i, Y_j]  (pure bracket motion)
    //   flows      flow one field for time s from a ladder: cost s
    //   corrected  one flow leg whose lattice defect is cancelled by a single
    //              square sized from a probe of the local bracket
    if (field.hormander_step() > 1) {
        const double hmin = *std::min_element(grid.h.begin(), grid.h.end());
        std::vector<double> box_lo = grid.origin, box_hi = grid.origin;
        for (std::size_t a = 0; a < d; ++a) box_hi[a] += grid.h[a] * (grid.shape[a] - 1);
        double extent = 0.0;
        for (std::size_t a = 0; a < d; ++a) extent = std::max(extent, box_hi[a] - box_lo[a]);

        auto flow = [&](std::vector<double> y, int k, double sign, double time, bool* ok) {
            const int substeps = std::max(8, static_cast<int>(std::ceil(time / (0.5 * hmin))));
            const double dt = time / substeps;
            auto vel = [&](const std::vector<double>& z) {
                auto vs = field.eval(z);
                std::vector<double> v(d);
                for (std::size_t a = 0; a < d; ++a) v[a] = sign * vs[k][a];
                return v;
            };
            std::vector<double> tmp(d);
            for (int st = 0; st < substeps && *ok; ++st) {
                const auto k1 = vel(y);
                for (std::size_t a = 0; a < d; ++a) tmp[a] = y[a] + 0.5 * dt * k1[a];
                const auto k2 = vel(tmp);
                for (std::size_t a = 0; a < d; ++a) tmp[a] = y[a] + 0.5 * dt * k2[a];
                const auto k3 = vel(tmp);
                for (std::size_t a = 0; a < d; ++a) tmp[a] = y[a] + dt * k3[a];
                const auto k4 = vel(tmp);
                for (std::size_t a = 0; a < d; ++a)
                    y[a] += dt / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
                for (std::size_t a = 0; a < d; ++a)
                    if (y[a] < box_lo[a] - 1e-9 || y[a] > box_hi[a] + 1e-9) *ok = false;
            }
            return y;
        };
        // Leg signs matter near the boundary: the transient excursion of
        // (+i,+j,-i,-j) may exit the box where a reflected variant stays in.
        auto square = [&](std::vector<double> y, int fi, int fj, double si, double sj, double s,
                          bool* ok) {
            y = flow(std::move(y), fi, si, s, ok);
            if (*ok) y = flow(std::move(y), fj, sj, s, ok);
            if (*ok) y = flow(std::move(y), fi, -si, s, ok);
            if (*ok) y = flow(std::move(y), fj, -sj, s, ok);
            return y;
        };
        // Nearest node when the landing is essentially exact; -1 otherwise.
        auto snap = [&](const std::vector<double>& y, double scale) -> long {
            std::vector<int> mj(d);
            double err = 0.0;
            for (std::size_t a = 0; a < d; ++a) {
                const double raw = (y[a] - grid.origin[a]) / grid.h[a];
                mj[a] = static_cast<int>(std::lround(raw));
                if (mj[a] < 0 || mj[a] >= grid.shape[a]) return -1;
                err = std::max(err, std::abs(y[a] - (grid.origin[a] + mj[a] * grid.h[a])));
            }
            if (err > 1e-6 * std::max(scale, hmin)) return -1;
            return static_cast<long>(grid.flatten(mj));
        };

        std::vector<std::vector<std::pair<int, double>>> extra(n);
        parallel_for(n, [&](std::size_t node) {
            const std::vector<double> xi = grid.point(node);
            auto accept = [&](long target, double cost) {
                if (target >= 0 && target != static_cast<long>(node))
                    extra[node].emplace_back(static_cast<int>(target), cost);
            };
            // squares
            for (int fi = 0; fi < field.count(); ++fi)
                for (int fj = 0; fj < field.count(); ++fj) {
                    if (fi == fj) continue;
                    for (double si : {1.0, -1.0})
                        for (double sj : {1.0, -1.0})
                            for (double s2 = hmin; s2 <= 0.35 * extent * extent; s2 *= 2.0) {
                                bool ok = true;
                                const auto y = square(xi, fi, fj, si, sj, std::sqrt(s2), &ok);
                                if (!ok) break;
                                accept(snap(y, s2), 4.0 * std::sqrt(s2));
                            }
                }
            // flows, with one corrective square on lattice defects
            for (int k = 0; k < field.count(); ++k)
                for (double sign : {1.0, -1.0})
                    for (double s = hmin; s <= extent; s *= 2.0) {
                        bool ok = true;
                        const auto y1 = flow(xi, k, sign, s, &ok);
                        if (!ok) break;
                        const long direct = snap(y1, s);
                        if (direct >= 0) {
                            accept(direct, s);
                            continue;
                        }
                        // defect against the nearest in-box node
                        std::vector<double> target(d);
                        bool inside = true;
                        for (std::size_t a = 0; a < d; ++a) {
                            const double raw = (y1[a] - grid.origin[a]) / grid.h[a];
                            const int mj = static_cast<int>(std::lround(raw));
                            if (mj < 0 || mj >= grid.shape[a]) inside = false;
                            target[a] = grid.origin[a] + mj * grid.h[a];
                        }
                        if (!inside) continue;
                        bool done = false;
                        for (int fi = 0; fi < field.count() && !done; ++fi)
                            for (int fj = 0; fj < field.count() && !done; ++fj) {
                                if (fi == fj) continue;
                                for (double si : {1.0, -1.0})
                                    for (double sj : {1.0, -1.0}) {
                                        if (done) break;
                                        // probe the local bracket displacement
                                        const double s0 = 0.5 * std::sqrt(hmin);
                                        bool pok = true;
                                        const auto probe =
                                            square(y1, fi, fj, si, sj, s0, &pok);
                                        if (!pok) continue;
                                        double bb = 0.0, bd = 0.0;
                                        for (std::size_t a = 0; a < d; ++a) {
                                            const double b = (probe[a] - y1[a]) / (s0 * s0);
                                            bb += b * b;
                                            bd += b * (target[a] - y1[a]);
                                        }
                                        if (!(bb > 0.0) || !(bd > 0.0)) continue;
                                        const double sc2 = bd / bb;
                                        bool ok2 = true;
                                        const auto y2 =
                                            square(y1, fi, fj, si, sj, std::sqrt(sc2), &ok2);
                                        if (!ok2) continue;
                                        const long fixed = snap(y2, sc2);
                                        if (fixed >= 0) {
                                            accept(fixed, s + 4.0 * std::sqrt(sc2));
                                            done = true;  // one correction is enough
                                        }
                                    }
                            }
                    }
        });
        for (std::size_t i = 0; i < n; ++i)
            for (auto [j, w] : extra[i]) {
                g.adjacency[i].emplace_back(j, w);
                g.adjacency[j].emplace_back(static_cast<int>(i), w);
                ++edges;
            }
    }

    g.edges = edges;
    if (edges == 0) throw input_error("fields: degenerate span everywhere, no admissible edges");
    return g;
}

namespace {

std::vector<double> dijkstra(const CCGraph& g, int source) {
    const std::size_t n = g.adjacency.size();
    std::vector<double> dist(n, kInf);
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[source] = 0.0;
    heap.emplace(0.0, source);
    while (!heap.empty()) {
        auto [d, u] = heap.top();
        heap.pop();
        if (d > dist[u]) continue;
        for (auto [v, w] : g.adjacency[u]) {
            const double nd = d + w;
            if (nd < dist[v]) {
                dist[v] = nd;
                heap.emplace(nd, v);
            }
        }
    }
    return dist;
}

}  // namespace

GridSpace cc_distance_matrix(const FieldFamily& field, const RectGrid& grid,
                             std::size_t node_cap) {
    const std::size_t n = grid.size();
    if (n > node_cap)
        throw cap_error("fields: grid has " + std::to_string(n) + " nodes, cap is " +
                        std::to_string(node_cap));
    const CCGraph g = build_cc_graph(field, grid);

    std::vector<double> dist(n * n, kInf);
    parallel_for(n, [&](std::size_t src) {
        const std::vector<double> row = dijkstra(g, static_cast<int>(src));
        std::copy(row.begin(), row.end(), dist.begin() + src * n);
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (!std::isfinite(dist[i * n + j]))
                throw input_error("fields: CC graph disconnected, node " + std::to_string(j) +
                                  " unreachable from node " + std::to_string(i));
    // Symmetrize exactly (undirected graph; per-source rounding can differ).
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::min(dist[i * n + j], dist[j * n + i]);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }

    std::vector<double> measure(n, grid.cell_volume());
    GridSpace out{grid, DiscreteSpace::from_matrix(grid.all_points(), std::move(measure),
                                                   std::move(dist), 1.0)};
    return out;
}

GridSpace euclidean_grid_space(const RectGrid& grid) {
    std::vector<double> measure(grid.size(), grid.cell_volume());
    return GridSpace{grid, DiscreteSpace::euclidean(grid.all_points(), std::move(measure))};
}

ComparabilityReport comparability_check(const GridSpace& gs, int hormander_step) {
    if (hormander_step < 1) throw input_error("fields: hormander step must be >= 1");
    const DiscreteSpace& s = gs.space;
    ComparabilityReport rep;
    for (std::size_t i = 0; i < s.size(); ++i)
        for (std::size_t j = i + 1; j < s.size(); ++j) {
            const double e = s.euclidean_dist(i, j);
            const double r = s.dist(i, j);
            if (e <= 0.0) continue;
            const double low = r / e;
            if (low < rep.c1) {
                rep.c1 = low;
                rep.c1_witness = {static_cast<int>(i), static_cast<int>(j)};
            }
            const double high = r / std::pow(e, 1.0 / hormander_step);
            if (high > rep.c2) {
                rep.c2 = high;
                rep.c2_witness = {static_cast<int>(i), static_cast<int>(j)};
            }
        }
    return rep;
}

DiscreteSpace product_metric(const DiscreteSpace& a, const DiscreteSpace& b,
                             std::size_t node_cap) {
    const std::size_t n = a.size() * b.size();
    if (n > node_cap)
        throw cap_error("product_metric: " + std::to_string(n) + " points exceeds cap " +
                        std::to_string(node_cap));
    std::vector<std::vector<double>> points(n);
    std::vector<double> measure(n);
    std::vector<double> dist(n * n);
    auto id = [&](std::size_t i, std::size_t j) { return i * b.size() + j; };
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) {
            auto& p = points[id(i, j)];
            p = a.point(i);
            p.insert(p.end(), b.point(j).begin(), b.point(j).end());
            measure[id(i, j)] = a.mu(i) * b.mu(j);
        }
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            for (std::size_t k = 0; k < a.size(); ++k)
                for (std::size_t l = 0; l < b.size(); ++l)
                    dist[id(i, j) * n + id(k, l)] = std::max(a.dist(i, k), b.dist(j, l));
    const double kappa = std::max(a.kappa(), b.kappa());
    return DiscreteSpace::from_matrix(std::move(points), std::move(measure), std::move(dist),
                                      kappa);
}

}  // namespace ccp
