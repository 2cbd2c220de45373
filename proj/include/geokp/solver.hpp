#pragma once

#include <string>
#include <vector>

#include "geokp/distance_field.hpp"
#include "geokp/mesh.hpp"
#include "geokp/scan.hpp"

namespace geokp {

struct AnchorSet {
    Vec3 anchor;                    // first point of the area of interest
    std::vector<Vec3> others;       // remaining k-1 points
    std::vector<double> distances;  // k predicted distances, anchor first
    bool near_coplanar = false;
};

struct JointEstimate {
    std::string joint_name;
    Vec3 position = Vec3::Zero();
    double residual_rms = 0;
    int anchor_count = 0;
    bool ridge_fallback = false;
    bool failed = false;
    std::string failure_reason;
};

// The k points with the smallest predicted distance (ties by point index);
// the anchor is the member with the lowest original index.
AnchorSet select_area_of_interest(const ScanCloud& cloud, const Eigen::VectorXd& column, int k);

JointEstimate multilaterate(const AnchorSet& anchors);

std::vector<JointEstimate> solve_all_joints(const ScanCloud& cloud, const DistanceField& field, int k);

struct JointErrorTable {
    std::vector<std::string> joint_names;
    std::vector<double> errors_m;
    double mean = 0;
    double stddev = 0;
};

JointErrorTable joint_errors(const std::vector<JointEstimate>& estimates, const Skeleton& truth);

struct BoneStats {
    std::string bone_name;
    double mean = 0, stddev = 0, min = 0, max = 0;
    int excluded_frames = 0;
};

std::vector<BoneStats> bone_length_stats(const std::vector<Skeleton>& frames, const std::vector<Bone>& bones);

void save_estimates_csv(const std::vector<JointEstimate>& estimates, const std::string& path);
std::vector<JointEstimate> load_estimates_csv(const std::string& path);
void save_error_table_csv(const JointErrorTable& table, const std::string& path);
void save_bone_stats_csv(const std::vector<BoneStats>& stats, const std::string& path);

// Builds a skeleton from estimates (failed joints dropped), for bone statistics.
Skeleton estimates_to_skeleton(const std::vector<JointEstimate>& estimates, const std::vector<Bone>& bones);

}  // namespace geokp
