#include "geokp/mesh.hpp"

#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace geokp {

Vec3 Mesh::face_normal(int f) const {
    const auto& tri = faces[f];
    Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    double len = n.norm();
    return len > 0 ? Vec3(n / len) : Vec3::Zero();
}

double Mesh::face_area(int f) const {
    const auto& tri = faces[f];
    return 0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]).norm();
}

double Mesh::mean_edge_length() const {
    double sum = 0;
    std::size_t count = 0;
    for (const auto& tri : faces) {
        for (int e = 0; e < 3; ++e) {
            sum += (vertices[tri[(e + 1) % 3]] - vertices[tri[e]]).norm();
            ++count;
        }
    }
    return count ? sum / static_cast<double>(count) : 0.0;
}

double Mesh::total_area() const {
    double sum = 0;
    for (std::size_t f = 0; f < faces.size(); ++f) sum += face_area(static_cast<int>(f));
    return sum;
}

int Skeleton::joint_index(const std::string& name) const {
    for (std::size_t i = 0; i < joints.size(); ++i)
        if (joints[i].name == name) return static_cast<int>(i);
    return -1;
}

const Joint& Skeleton::joint(const std::string& name) const {
    int idx = joint_index(name);
    if (idx < 0) throw std::runtime_error("skeleton: unknown joint '" + name + "'");
    return joints[idx];
}

std::vector<std::string> default_joint_names() {
    return {"Carpal L",  "Carpal R", "Elbow L", "Elbow R", "Tarsal L",    "Tarsal R",
            "Stifle L",  "Stifle R", "Hip L",   "Hip R",   "Front spine", "Illium"};
}

void check_mesh(const Mesh& mesh) {
    const int nv = static_cast<int>(mesh.vertices.size());
    for (const auto& tri : mesh.faces)
        for (int idx : tri)
            if (idx < 0 || idx >= nv) throw std::runtime_error("mesh: face index out of range");
    if (mesh.has_skin_weights()) {
        if (mesh.skin_weights.size() != mesh.vertices.size())
            throw std::runtime_error("mesh: skin weight count does not match vertex count");
        for (const auto& weights : mesh.skin_weights) {
            double sum = 0;
            for (const auto& [name, w] : weights) {
                if (w < 0) throw std::runtime_error("mesh: negative skin weight for '" + name + "'");
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-6)
                throw std::runtime_error("mesh: skin weights do not sum to 1");
        }
    }
}

void check_skeleton(const Skeleton& skeleton) {
    std::set<std::string> names;
    for (const auto& j : skeleton.joints)
        if (!names.insert(j.name).second)
            throw std::runtime_error("skeleton: duplicate joint name '" + j.name + "'");
    for (const auto& j : skeleton.joints)
        if (j.parent && !names.count(*j.parent))
            throw std::runtime_error("skeleton: dangling parent '" + *j.parent + "'");
    for (const auto& b : skeleton.bones)
        if (!names.count(b.joint_a) || !names.count(b.joint_b))
            throw std::runtime_error("skeleton: bone '" + b.name + "' references missing joint");
}

std::map<std::string, double> bone_lengths(const Skeleton& skeleton) {
    std::map<std::string, double> out;
    for (const auto& b : skeleton.bones)
        out[b.name] = (skeleton.joint(b.joint_a).position - skeleton.joint(b.joint_b).position).norm();
    return out;
}

namespace {

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(int a, int b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<int> vertex_components(const Mesh& mesh) {
    UnionFind uf(static_cast<int>(mesh.vertices.size()));
    for (const auto& tri : mesh.faces) {
        uf.unite(tri[0], tri[1]);
        uf.unite(tri[0], tri[2]);
    }
    std::vector<int> labels(mesh.vertices.size());
    std::map<int, int> relabel;
    for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
        int root = uf.find(static_cast<int>(v));
        auto [it, inserted] = relabel.emplace(root, static_cast<int>(relabel.size()));
        labels[v] = it->second;
    }
    return labels;
}

MeshReport validate_mesh(const Mesh& mesh) {
    MeshReport report;
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        if (mesh.face_area(static_cast<int>(f)) < 1e-12) ++report.degenerate_faces;

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : mesh.faces) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            if (a > b) std::swap(a, b);
            ++edge_count[{a, b}];
        }
    }
    for (const auto& [edge, count] : edge_count) {
        if (count == 1) ++report.boundary_edges;
        if (count > 2) ++report.nonmanifold_edges;
    }

    auto labels = vertex_components(mesh);
    // Vertices referenced by no face each count as their own component too.
    std::set<int> distinct(labels.begin(), labels.end());
    report.connected_components = static_cast<int>(distinct.size());
    return report;
}

Mesh remove_degenerate_faces(const Mesh& mesh) {
    Mesh out = mesh;
    out.faces.clear();
    for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        if (mesh.face_area(static_cast<int>(f)) >= 1e-12) out.faces.push_back(mesh.faces[f]);
    return out;
}

}  // namespace geokp
