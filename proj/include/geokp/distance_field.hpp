#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "geokp/geodesics.hpp"
#include "geokp/mesh.hpp"
#include "geokp/scan.hpp"

namespace geokp {

enum class FieldKind : uint8_t { euclidean = 0, manifold = 1, dmax = 2, log_target = 3, predicted = 4 };

std::string field_kind_name(FieldKind kind);

struct DistanceField {
    Eigen::MatrixXd values;  // n points x m joints
    FieldKind kind = FieldKind::euclidean;
    std::vector<std::string> joint_names;
    std::string source = "oracle";

    std::size_t n() const { return static_cast<std::size_t>(values.rows()); }
    std::size_t m() const { return static_cast<std::size_t>(values.cols()); }
};

DistanceField euclidean_field(const ScanCloud& cloud, const Skeleton& skeleton);

// Eq-style interpolation of precomputed per-vertex geodesic fields onto scan
// points, plus each field's joint-to-surface offset.
DistanceField manifold_field(const ScanCloud& cloud, const Mesh& mesh,
                             const std::vector<GeodesicField>& fields,
                             const std::vector<std::string>& joint_names);

// Elementwise max; infinite manifold entries fall back to the Euclidean value.
DistanceField dmax_field(const DistanceField& manifold, const DistanceField& euclidean,
                         int* inf_replacements = nullptr);

// L = -ln(max(D, eps)) / 10, eps = 1e-6 m
DistanceField log_target(const DistanceField& dmax);
DistanceField invert_target(const DistanceField& log_field);

DistanceField corrupt_field(const DistanceField& field, double sigma_m, uint64_t seed);

void write_field(const DistanceField& field, const std::string& path);
DistanceField read_field(const std::string& path);

}  // namespace geokp
