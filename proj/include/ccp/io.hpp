#pragma once

#include <string>
#include <vector>

#include "ccp/dyadic.hpp"
#include "ccp/fields.hpp"
#include "ccp/space.hpp"
#include "ccp/weights.hpp"

namespace ccp {

/// Space file: {points: [[..]], measure: [..], metric: "matrix"|"euclidean"|
/// "cc:<field-family-id>", matrix?: [[..]], kappa: number}. For "cc:" metrics
/// the points must form a graph-connectable set; lattice neighbors are
/// inferred from the smallest positive Euclidean gap.
DiscreteSpace load_space_json(const std::string& path);
void save_space_json(const DiscreteSpace& space, const std::string& metric,
                     const std::string& path);

/// Generator strings: "grid:1d:129", "grid:2d:21", "grid:2d:21x31",
/// "grid:3d:9", all on the unit box, or "grid:<d>d:<shape>@lo,hi" for a
/// custom cube [lo,hi]^d.
RectGrid parse_grid_spec(const std::string& spec);

/// Custom field family file: {n, M, step?, samples: [{point: [..],
/// vectors: [[..],..]}, ..]} on a full tensor grid.
FieldFamily load_field_family(const std::string& id_or_path);

/// Weight file: {u: expr|array, v: [expr|array..], p, q, p_i: [..], t?,
/// young?: {Psi: spec, Phi: [spec..]}} with exprs over point coordinates.
WeightSystem load_weights_json(const std::string& path, const DiscreteSpace& space);

/// Tree export: {A, kappa, levels: [{k, cubes: [{center, members, parent}]}],
/// a0, a1}.
void save_tree_json(const DyadicTree& tree, const PropertyReport& rep, const std::string& path);

std::string space_digest(const DiscreteSpace& space);

}  // namespace ccp
