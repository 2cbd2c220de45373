#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace geokp {

using Vec3 = Eigen::Vector3d;

// Per-vertex skinning weights, keyed by joint name. Empty map = unweighted vertex.
using SkinWeights = std::vector<std::map<std::string, double>>;

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> faces;
    SkinWeights skin_weights;  // empty, or one entry per vertex

    bool has_skin_weights() const { return !skin_weights.empty(); }

    Vec3 face_normal(int f) const;
    double face_area(int f) const;
    double mean_edge_length() const;
    double total_area() const;
};

struct Joint {
    std::string name;
    Vec3 position;
    std::optional<std::string> parent;
};

struct Bone {
    std::string name;
    std::string joint_a;
    std::string joint_b;
};

struct Skeleton {
    std::vector<Joint> joints;
    std::vector<Bone> bones;

    int joint_index(const std::string& name) const;  // -1 if absent
    const Joint& joint(const std::string& name) const;
};

struct MeshReport {
    int degenerate_faces = 0;
    int nonmanifold_edges = 0;
    int boundary_edges = 0;
    int connected_components = 0;
};

// The 12 joints the default cattle rig is annotated with.
std::vector<std::string> default_joint_names();

MeshReport validate_mesh(const Mesh& mesh);

// Drops faces with area below the degeneracy tolerance (1e-12 m^2).
Mesh remove_degenerate_faces(const Mesh& mesh);

// Checks the structural invariants (index ranges, weight sums); throws on violation.
void check_mesh(const Mesh& mesh);
void check_skeleton(const Skeleton& skeleton);

std::map<std::string, double> bone_lengths(const Skeleton& skeleton);

// Connected-component label per vertex (faces define connectivity).
std::vector<int> vertex_components(const Mesh& mesh);

}  // namespace geokp
