#pragma once

#include "geokp/mesh.hpp"

namespace geokp {

// Subdivided icosahedron; level 4 gives 2562 vertices / 5120 faces.
Mesh icosphere(int subdivisions, double radius = 1.0);

// Capsule from p0 to p1: cylinder wall plus hemispherical caps.
Mesh capsule(const Vec3& p0, const Vec3& p1, double radius, int segments = 24, int rings = 8);

// Disjoint union; face indices of `extra` are shifted past `base`'s vertices.
Mesh merge_meshes(const Mesh& base, const Mesh& extra);

}  // namespace geokp
