#pragma once

#include "affgeo/atlas.hpp"
#include "affgeo/automorphism.hpp"
#include "affgeo/connection.hpp"
#include "affgeo/vector_field.hpp"

#include <string>
#include <vector>

// Built-in manifolds, connections and fields referenced by name from scenarios.
//
//   plane          R², chart "id"                       flat
//   plane_polar    R², charts "cart" and "pol" (r, θ)    flat
//   flat3          R³, chart "id"                       flat
//   torus          R²/Z², four shifted unit squares      flat
//   sphere         S², stereographic "N", "S" + "colatlon" (θ, φ)   round
//   halfplane      upper half plane, chart "h"          hyperbolic
//   disk           open unit disk, chart "id"           flat
//   punctured_disk disk minus origin, chart "id"        flat
namespace affgeo::catalog {

/// Atlases are built once per process and shared, so fields and connections
/// built from the same name compare equal by atlas pointer.
AtlasPtr manifold(const std::string& name);
Connection connection(const std::string& name, const AtlasPtr& atlas);
VectorField field(const std::string& name, const AtlasPtr& atlas);

/// The connection a manifold is usually paired with ("flat", "round", "hyperbolic").
std::string default_connection(const std::string& manifold);

std::vector<std::string> manifold_names();
std::vector<std::string> connection_names(const std::string& manifold);
std::vector<std::string> field_names(const std::string& manifold);

/// Catalog version echoed in reports.
inline constexpr const char* kVersion = "1";

// --- sphere helpers -------------------------------------------------------

/// Unit-sphere point of chart coordinates, and its derivative (3 x 2).
Vec sphere_embed(const ChartId& chart, const Vec& x);
Mat sphere_embed_jacobian(const ChartId& chart, const Vec& x);
/// Chart coordinates of a unit vector, and the derivative of the ambient extension (2 x 3).
Vec sphere_chart(const ChartId& chart, const Vec& p);
Mat sphere_chart_jacobian(const ChartId& chart, const Vec& p);
/// A point of the sphere atlas for a unit vector (N or S, whichever is deeper).
Point sphere_point(const AtlasPtr& atlas, const Vec& p);

/// Σ ω_i L_i with L_i(p) = p × e_i, so [L1, L2] = L3.
VectorField sphere_rotation(const AtlasPtr& atlas, const Vec& omega);

/// Rotation matrix exp([axis]_x) for a rotation vector (Rodrigues).
Mat rotation_matrix(const Vec& rotvec);

/// The rigid rotation p -> R p as a closed-form diffeo of the sphere atlas.
Diffeo sphere_rotation_map(const AtlasPtr& atlas, const Mat& r, const std::string& name = "rotation");

}  // namespace affgeo::catalog
