#pragma once

#include <Eigen/Sparse>
#include <memory>
#include <string>
#include <vector>

#include "geokp/mesh.hpp"
#include "geokp/scan.hpp"

namespace geokp {

struct LaplaceOperator {
    Eigen::SparseMatrix<double> stiffness;  // positive semidefinite cotangent matrix
    Eigen::VectorXd mass;                   // barycentric lumped areas (diagonal)
    double mean_edge_length = 0;
};

// Cotangent stiffness with intrinsic mollification (edge lengths lifted to
// >= delta * mean edge, delta = 1e-6) and barycentric-lumped mass.
LaplaceOperator build_laplacian(const Mesh& mesh);

struct SourceWeight {
    int vertex;
    double weight;
};

struct GeodesicField {
    std::vector<double> distances;  // per vertex; +inf marks unreachable
    std::string source_name;
    double offset = 0;  // joint-to-surface gap; consumers add it on top
};

// Prefactors the two heat-method solves once; reusable across joints.
class HeatGeodesicSolver {
  public:
    HeatGeodesicSolver(const Mesh& mesh, const LaplaceOperator& op);
    ~HeatGeodesicSolver();
    HeatGeodesicSolver(HeatGeodesicSolver&&) noexcept;

    GeodesicField solve(const std::vector<SourceWeight>& source) const;

  private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

GeodesicField heat_geodesic(const Mesh& mesh, const LaplaceOperator& op,
                            const std::vector<SourceWeight>& source);

// Shortest path over the edge graph with Euclidean weights; validation oracle.
GeodesicField dijkstra_geodesic(const Mesh& mesh, int source_vertex);

struct BarycentricCoords {
    double alpha;  // weight on B
    double beta;   // weight on C
    double gamma() const { return 1.0 - alpha - beta; }  // weight on A
};

BarycentricCoords barycentric_coords(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& p);

// D = gamma*D_g(A) + alpha*D_g(B) + beta*D_g(C)
double interpolate_distance(double value_a, double value_b, double value_c, const BarycentricCoords& bary);

struct JointSource {
    std::vector<SourceWeight> weights;
    double offset = 0;     // Euclidean joint-to-surface distance
    int face = -1;         // the face carrying the nearest surface point
    Vec3 surface_point = Vec3::Zero();
};

// Nearest surface point to an interior joint; source weights are its
// barycentric coordinates spread over the face's vertices.
JointSource joint_surface_source(const Mesh& mesh, const TriangleBvh& bvh, const Vec3& joint);
JointSource joint_surface_source(const Mesh& mesh, const Vec3& joint);

void save_field_csv(const GeodesicField& field, const std::string& path);

}  // namespace geokp
