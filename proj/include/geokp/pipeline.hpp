#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "geokp/scan.hpp"

namespace geokp {

struct FrameInput {
    std::string mesh_path;
    std::string skeleton_path;
};

struct PipelineConfig {
    // either explicit frame pairs, a single mesh+skeleton, or the builtin
    // quadruped proxy ("builtin:quadruped" / "builtin:quadruped-walk:<n>" /
    // "builtin:quadruped-rigid:<n>")
    std::string model = "builtin:quadruped";
    std::string skeleton_path;
    std::vector<FrameInput> frames;

    std::optional<std::string> rig_path;  // default: 4-camera ring
    Vec3 scale = Vec3(1, 1, 1);
    double deform_amplitude_m = 0;
    int deform_kernels = 0;
    double deform_radius_m = 0.1;

    std::size_t downsample_n = 4096;
    int area_k = 50;
    double noise_sigma_m = 0;
    uint64_t seed = 0;
    int workers = 1;
    std::string out_dir = "out";
};

PipelineConfig load_config(const std::string& path);

// gen: per-frame scan clouds + posed meshes + ground-truth skeletons + manifest
int cmd_gen(const PipelineConfig& config);

// distfield: euclidean / manifold / dmax / log_target field files per frame
int cmd_distfield(const PipelineConfig& config, const std::string& dataset_dir);

// solve: estimates per frame; source is "oracle", "noise", or a field-file path
int cmd_solve(const PipelineConfig& config, const std::string& dataset_dir, const std::string& source);

// eval: per-joint errors and per-bone statistics against ground truth
int cmd_eval(const std::string& dataset_dir, const std::string& estimates_dir);

// hip: leave-one-out hip-height regression on a feature CSV
int cmd_hip(const std::string& dataset_csv, const std::string& out_dir, uint64_t seed, int workers);

int frame_count(const std::string& dataset_dir);

}  // namespace geokp
