#pragma once

#include <string>

#include "geokp/mesh.hpp"

namespace geokp {

// OBJ or PLY, dispatched on extension. Polygonal faces are fan-triangulated
// from the first vertex; vertex order is preserved.
Mesh load_mesh(const std::string& path);

Mesh load_obj(const std::string& path);
Mesh load_ply(const std::string& path);

void save_obj(const Mesh& mesh, const std::string& path);
void save_ply(const Mesh& mesh, const std::string& path, bool binary = true);
void save_mesh(const Mesh& mesh, const std::string& path);

// JSON document: joints: [{name, position:[x,y,z], parent?}],
// bones: [{name, joints:[a,b]}], optional skin_weights attached to a mesh on load.
Skeleton load_skeleton(const std::string& path);
void save_skeleton(const Skeleton& skeleton, const std::string& path);

// Reads the optional skin_weights block of a skeleton file into the mesh.
void load_skin_weights(const std::string& skeleton_path, Mesh& mesh);
void save_skeleton_with_weights(const Skeleton& skeleton, const Mesh& mesh, const std::string& path);

}  // namespace geokp
